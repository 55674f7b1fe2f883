"""Config-driven command line harness.

    chain <task> --config <file> [--out <dir>] [--format csv|json] [--deterministic]

Tasks: spectrum, density, filling-curve, wells, envelope, frequencies,
compare, reproduce.  The config file is JSON with a "profile" block
(builtin family or custom record, see profiles.from_config) plus task
parameters.  Outputs are plot-ready CSV (17 significant digits) or JSON,
each with a header echoing the config; timestamps are suppressed under
--deterministic so reruns byte-reproduce the data.  Exit codes: 1 config
error, 2 numerical error, 3 I/O error.

The environment variable CHAIN_NUM_THREADS caps how many reproduction
targets run concurrently (default 1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import analytic, exact, profiles, wkb
from .numerics import NumericsError

VERSION = "0.1.0"

TASKS = (
    "spectrum", "density", "filling-curve", "wells",
    "envelope", "frequencies", "compare", "reproduce",
)

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    task: str
    profile: dict
    params: dict
    out_dir: Path
    fmt: str = "csv"
    deterministic: bool = False


@dataclass
class ComparisonReport:
    """Error metrics between exact and WKB series on a common grid."""

    quantity: str
    grid: np.ndarray
    exact_values: np.ndarray
    wkb_values: np.ndarray
    bulk_margin: int
    runtime: float

    @property
    def sup_error(self) -> float:
        return float(np.abs(self.exact_values - self.wkb_values).max())

    @property
    def mean_abs_error(self) -> float:
        return float(np.abs(self.exact_values - self.wkb_values).mean())

    @property
    def bulk_sup_error(self) -> float:
        m = self.bulk_margin
        core = slice(m, len(self.grid) - m)
        return float(np.abs(self.exact_values - self.wkb_values)[core].max())


def compare_density(lat, cont, M: int) -> ComparisonReport:
    """Exact vs WKB site density at filling M/N, bulk margin ceil(N/20)."""
    t0 = time.perf_counter()
    spectrum = exact.diagonalize(lat)
    st = exact.filled_state(spectrum, M)
    rho_exact = exact.density_exact(spectrum, st)
    prof = wkb.density_profile(cont, st.fermi_energy, lat.site_positions)
    margin = int(np.ceil(lat.num_sites / 20))
    return ComparisonReport(
        quantity="density",
        grid=lat.site_positions,
        exact_values=rho_exact,
        wkb_values=prof.density,
        bulk_margin=margin,
        runtime=time.perf_counter() - t0,
    )


# --- output helpers -------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _write_table(cfg: RunConfig, name: str, meta: dict, columns: Dict[str, Sequence]):
    from .numerics import DEFAULT_QUAD_TOL, DEFAULT_ROOT_TOL

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    header = {
        "config": {"task": cfg.task, "profile": cfg.profile, "params": cfg.params},
        "tolerances": {
            "quadrature": {"abs": DEFAULT_QUAD_TOL.abs_tol,
                           "rel": DEFAULT_QUAD_TOL.rel_tol},
            "root": {"abs": DEFAULT_ROOT_TOL.abs_tol,
                     "rel": DEFAULT_ROOT_TOL.rel_tol},
        },
        "version": f"fermichain {VERSION}",
        **meta,
    }
    if not cfg.deterministic:
        header["generated"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    names = list(columns)
    rows = zip(*(columns[k] for k in names)) if names else []
    if cfg.fmt == "json":
        path = cfg.out_dir / f"{name}.json"
        payload = {
            "meta": header,
            "columns": {k: [None if _is_nan(v) else float(v) for v in columns[k]]
                        if _is_float_col(columns[k]) else list(columns[k])
                        for k in names},
        }
        path.write_text(json.dumps(payload, indent=2))
    else:
        path = cfg.out_dir / f"{name}.csv"
        lines = [f"# {k}: {json.dumps(v) if isinstance(v, dict) else v}"
                 for k, v in header.items()]
        lines.append(",".join(names))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
    return path


def _is_float_col(col) -> bool:
    return len(col) > 0 and isinstance(col[0], (float, np.floating, int, np.integer))


def _is_nan(v) -> bool:
    return isinstance(v, (float, np.floating)) and np.isnan(v)


# --- task runners ----------------------------------------------------------

def _profile_pair(cfg: RunConfig):
    record = cfg.profile
    if "path" in record:
        path = Path(record["path"])
        try:
            record = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"profile file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"profile parse error in {path}: line {exc.lineno}, "
                              f"column {exc.colno}: {exc.msg}") from exc
    lat, cont = profiles.from_config(record)
    return lat, cont


def _need_continuum(cont, task: str):
    if cont is None:
        raise ConfigError(f"task {task!r} needs a continuum profile "
                          "(builtin family or expression record)")
    return cont


def _resolve_energy(cfg: RunConfig, lat) -> float:
    params = cfg.params
    if "energy" in params:
        return float(params["energy"])
    if "mode_index" in params:
        spectrum = exact.diagonalize(lat)
        return float(spectrum.energies[int(params["mode_index"])])
    raise ConfigError("task needs 'energy' or 'mode_index'")


def run_spectrum(cfg: RunConfig) -> List[Path]:
    lat, _ = _profile_pair(cfg)
    spectrum = exact.diagonalize(lat)
    return [_write_table(cfg, "spectrum", {"N": lat.num_sites},
                         {"k": list(range(lat.num_sites)),
                          "energy": list(spectrum.energies)})]


def _fillings_to_M(params: dict, N: int) -> List[int]:
    if "fillings" in params:
        out = [int(round(nu * N)) for nu in params["fillings"]]
    elif "M" in params:
        out = [int(m) for m in params["M"]]
    else:
        raise ConfigError("density/compare tasks need 'fillings' or 'M'")
    if not out:
        raise ConfigError("empty fillings list")
    return out


def run_density(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    spectrum = exact.diagonalize(lat)
    out = []
    for M in _fillings_to_M(cfg.params, lat.num_sites):
        st = exact.filled_state(spectrum, M)
        rho = exact.density_exact(spectrum, st)
        prof = wkb.density_profile(cont, st.fermi_energy, lat.site_positions)
        regions = [[r.lower, r.upper, r.kind] for r in prof.regions]
        out.append(_write_table(
            cfg, f"density_M{M}",
            {"M": M, "fermi_energy": st.fermi_energy, "regions": json.dumps(regions)},
            {"site": list(range(lat.num_sites)),
             "x": list(lat.site_positions),
             "density_exact": list(rho),
             "density_wkb": list(prof.density)},
        ))
    return out


def run_filling_curve(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    params = cfg.params
    if "energies" in params:
        es = np.asarray(params["energies"], dtype=float)
    else:
        grid = params.get("energy_grid", {})
        lo, hi = profiles.gerschgorin_bounds(lat)
        es = np.linspace(float(grid.get("min", lo)), float(grid.get("max", hi)),
                         int(grid.get("count", 101)))
    spectrum = exact.diagonalize(lat)
    nu_exact = [float(np.sum(spectrum.energies <= e)) / lat.num_sites for e in es]
    nu_wkb = [wkb.filling_fraction(cont, float(e)) for e in es]
    return [_write_table(cfg, "filling_curve", {},
                         {"energy": list(es),
                          "nu_exact": nu_exact,
                          "nu_wkb": nu_wkb})]


def run_wells(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    e = _resolve_energy(cfg, lat)
    wd = wkb.wells(cont, e)
    freqs = wkb.well_frequencies(wd) if not wd.is_empty else []
    return [_write_table(
        cfg, "wells", {"energy": e, "count": len(wd.wells)},
        {"well": list(range(len(wd.wells))),
         "lower": [w.lower for w in wd.wells],
         "upper": [w.upper for w in wd.wells],
         "lower_kind": [w.lower_kind for w in wd.wells],
         "upper_kind": [w.upper_kind for w in wd.wells],
         "inv_norm": list(wd.inv_norms),
         "frequency": list(freqs)},
    )]


def run_envelope(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    e = _resolve_energy(cfg, lat)
    wd = wkb.wells(cont, e)
    grid = lat.mode_positions  # eigenvector component n sits at (n+1) a
    x, env = wkb.envelope(cont, e, wd, grid)
    cols = {"x": list(x), "envelope_plus": list(env), "envelope_minus": list(-env)}
    if "mode_index" in cfg.params:
        spectrum = exact.diagonalize(lat)
        k = int(cfg.params["mode_index"])
        keep = np.isin(grid, x)
        a = lat.lattice_spacing
        cols["mode_exact"] = list(spectrum.modes[keep, k] / np.sqrt(a))
    return [_write_table(cfg, "envelope", {"energy": e}, cols)]


def run_frequencies(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    e = _resolve_energy(cfg, lat)
    wd = wkb.wells(cont, e)
    freqs = wkb.well_frequencies(wd)
    paths = [_write_table(
        cfg, "frequencies", {"energy": e},
        {"well": list(range(len(wd.wells))),
         "frequency": list(freqs)},
    )]
    band = cfg.params.get("mode_band")
    if band:
        spectrum = exact.diagonalize(lat)
        counts = [0] * len(wd.wells)
        deloc = 0
        for k in range(int(band[0]), int(band[1])):
            idx = exact.localize_eigenfunction(spectrum, k, wd)
            if idx is None:
                deloc += 1
            else:
                counts[idx] += 1
        paths.append(_write_table(
            cfg, "localization_counts",
            {"energy": e, "band": list(band), "delocalized": deloc},
            {"well": list(range(len(wd.wells))), "count_exact": counts},
        ))
    return paths


def run_compare(cfg: RunConfig) -> List[Path]:
    lat, cont = _profile_pair(cfg)
    cont = _need_continuum(cont, cfg.task)
    Ms, rows, paths = _fillings_to_M(cfg.params, lat.num_sites), [], []
    for M in Ms:
        rep = compare_density(lat, cont, M)
        rows.append((M, M / lat.num_sites, rep.sup_error, rep.mean_abs_error,
                     rep.bulk_sup_error, rep.runtime))
        paths.append(_write_table(
            cfg, f"compare_series_M{M}",
            {"M": M, "bulk_margin_sites": rep.bulk_margin},
            {"x": list(rep.grid),
             "density_exact": list(rep.exact_values),
             "density_wkb": list(rep.wkb_values)},
        ))
    cols = dict(zip(
        ("M", "filling", "sup_error", "mean_abs_error", "bulk_sup_error", "runtime_s"),
        map(list, zip(*rows)),
    ))
    margin = int(np.ceil(lat.num_sites / 20))
    paths.insert(0, _write_table(
        cfg, "compare_report", {"bulk_margin_sites": margin}, cols))
    return paths


# --- reproduction targets ---------------------------------------------------

def _target_cfg(cfg: RunConfig, name: str, profile: dict, params: dict) -> RunConfig:
    return RunConfig(
        task=cfg.task, profile=profile, params=params,
        out_dir=cfg.out_dir / name, fmt=cfg.fmt, deterministic=cfg.deterministic,
    )


def _reproduce_homogeneous_density(cfg):
    sub = _target_cfg(cfg, "homogeneous-density",
                      {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0},
                       "N": 400},
                      {"fillings": [0.25, 0.5]})
    sub.task = "density"
    return run_density(sub)


def _reproduce_krawtchouk_density(cfg):
    sub = _target_cfg(cfg, "krawtchouk-density",
                      {"family": "krawtchouk", "parameters": {"q": 0.25}, "N": 400},
                      {"fillings": [0.125, 0.5, 0.875]})
    sub.task = "density"
    return run_density(sub)


def _reproduce_krawtchouk_envelopes(cfg):
    out = []
    for nu in (0.125, 0.5, 0.875):
        sub = _target_cfg(cfg, "krawtchouk-envelopes",
                          {"family": "krawtchouk", "parameters": {"q": 0.25}, "N": 400},
                          {"mode_index": int(400 * nu)})
        sub.task = "envelope"
        paths = run_envelope(sub)
        for p in paths:
            renamed = p.with_name(f"envelope_nu{nu}".replace(".", "_") + p.suffix)
            p.rename(renamed)
            out.append(renamed)
    return out


def _reproduce_rainbow_filling(cfg):
    out = []
    for h in (1.0, 10.0):
        sub = _target_cfg(cfg, "rainbow-filling",
                          {"family": "rainbow", "parameters": {"h": h}, "N": 400},
                          {"energy_grid": {"min": -1.0, "max": 1.0, "count": 81}})
        sub.task = "filling-curve"
        paths = run_filling_curve(sub)
        lat, cont = profiles.from_config(sub.profile)
        es = np.linspace(-1.0, 1.0, 81)
        closed = [analytic.rainbow_filling(h, float(e)) for e in es]
        out.append(_write_table(sub, f"filling_closed_h{h:g}", {"h": h},
                                {"energy": list(es), "nu_closed": closed}))
        for p in paths:
            renamed = p.with_name(f"filling_curve_h{h:g}" + p.suffix)
            p.rename(renamed)
            out.append(renamed)
    return out


def _reproduce_rainbow_density(cfg):
    sub = _target_cfg(cfg, "rainbow-density",
                      {"family": "rainbow", "parameters": {"h": 1.0}, "N": 400},
                      {"fillings": [0.125, 0.4]})
    sub.task = "density"
    return run_density(sub)


def _reproduce_rainbow_envelopes(cfg):
    out = []
    for k in (50, 160):
        sub = _target_cfg(cfg, "rainbow-envelopes",
                          {"family": "rainbow", "parameters": {"h": 1.0}, "N": 400},
                          {"mode_index": k})
        sub.task = "envelope"
        for p in run_envelope(sub):
            renamed = p.with_name(f"envelope_mode{k}" + p.suffix)
            p.rename(renamed)
            out.append(renamed)
    return out


def _reproduce_cosine_density(cfg):
    sub = _target_cfg(cfg, "cosine-density",
                      {"family": "cosine", "parameters": {"J0": 0.5}, "N": 400},
                      {"fillings": [0.4, 0.6, 0.1, 0.9]})
    sub.task = "density"
    return run_density(sub)


def _reproduce_cosine_filling(cfg):
    sub = _target_cfg(cfg, "cosine-filling",
                      {"family": "cosine", "parameters": {"J0": 0.5}, "N": 400},
                      {"energy_grid": {"min": -3.0, "max": 3.0, "count": 121}})
    sub.task = "filling-curve"
    out = run_filling_curve(sub)
    # Maximum filling with a depletion interval: WKB curve vs the exact
    # threshold (largest M/N with min site density below 0.01).
    J0s = np.linspace(0.05, 0.95, 19)
    numax_wkb = [analytic.cosine_numax(float(j)) for j in J0s]
    numax_exact = []
    for j in J0s:
        lat, _ = profiles.make_builtin(profiles.Cosine(float(j)), 400)
        spectrum = exact.diagonalize(lat)
        lo, hi = 0, 400
        while hi - lo > 1:  # density min is decreasing in M
            mid = (lo + hi) // 2
            dens = exact.density_exact(spectrum, exact.filled_state(spectrum, mid))
            if dens.min() < 0.01:
                lo = mid
            else:
                hi = mid
        numax_exact.append(lo / 400)
    out.append(_write_table(sub, "numax", {"exact_threshold": 0.01},
                            {"J0": list(J0s),
                             "numax_wkb": numax_wkb,
                             "numax_exact": numax_exact}))
    return out


def _reproduce_asymmetric_cosine_density(cfg):
    sub = _target_cfg(cfg, "asymmetric-cosine-density",
                      {"family": "asymmetric_cosine",
                       "parameters": {"J0": 0.75, "b": 5.0, "r": 2}, "N": 400},
                      {"fillings": [0.21, 0.4725, 0.77]})
    sub.task = "density"
    return run_density(sub)


def _reproduce_asymmetric_cosine_frequencies(cfg):
    N = 400
    sub = _target_cfg(cfg, "asymmetric-cosine-frequencies",
                      {"family": "asymmetric_cosine",
                       "parameters": {"J0": 0.75, "b": 5.0, "r": 2}, "N": N},
                      {"mode_index": N // 2 - 1,
                       "mode_band": [N // 2 - 21, N // 2 + 19]})
    sub.task = "frequencies"
    out = run_frequencies(sub)
    lat, cont = profiles.from_config(sub.profile)
    rows = analytic.asymmetric_cosine_critical_energies()
    nu_wkb = [wkb.filling_fraction(cont, e) for e, _ in rows]
    out.append(_write_table(sub, "critical_fillings", {},
                            {"e_i": [e for e, _ in rows],
                             "nu_i": [nu for _, nu in rows],
                             "nu_wkb": nu_wkb}))
    return out


REPRODUCE_TARGETS: Dict[str, Callable] = {
    "homogeneous-density": _reproduce_homogeneous_density,
    "krawtchouk-density": _reproduce_krawtchouk_density,
    "krawtchouk-envelopes": _reproduce_krawtchouk_envelopes,
    "rainbow-filling": _reproduce_rainbow_filling,
    "rainbow-density": _reproduce_rainbow_density,
    "rainbow-envelopes": _reproduce_rainbow_envelopes,
    "cosine-density": _reproduce_cosine_density,
    "cosine-filling": _reproduce_cosine_filling,
    "asymmetric-cosine-density": _reproduce_asymmetric_cosine_density,
    "asymmetric-cosine-frequencies": _reproduce_asymmetric_cosine_frequencies,
}


def reproduce_catalog() -> List[str]:
    """Names of the desk-scale reproduction targets."""
    return list(REPRODUCE_TARGETS)


def run_reproduce(cfg: RunConfig) -> List[Path]:
    wanted = cfg.params.get("targets", cfg.params.get("figure", "all"))
    if isinstance(wanted, str) and wanted != "all":
        wanted = [wanted]
    if wanted == "all" or wanted == ["all"]:
        names = reproduce_catalog()
    else:
        names = list(wanted)
        unknown = [n for n in names if n not in REPRODUCE_TARGETS]
        if unknown:
            raise ConfigError(f"unknown reproduce target(s): {unknown}")
    workers = max(1, int(os.environ.get("CHAIN_NUM_THREADS", "1")))
    paths: List[Path] = []
    if workers == 1:
        for name in names:
            paths.extend(REPRODUCE_TARGETS[name](cfg))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(REPRODUCE_TARGETS[n], cfg): n for n in names}
            for fut in futures:
                paths.extend(fut.result())
    return paths


RUNNERS = {
    "spectrum": run_spectrum,
    "density": run_density,
    "filling-curve": run_filling_curve,
    "wells": run_wells,
    "envelope": run_envelope,
    "frequencies": run_frequencies,
    "compare": run_compare,
    "reproduce": run_reproduce,
}


def run(cfg: RunConfig) -> List[Path]:
    """Execute a task; returns the written output paths."""
    return RUNNERS[cfg.task](cfg)


def _load_config(task: str, args) -> RunConfig:
    path = Path(args.config)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    if "task" in raw and raw["task"] != task:
        raise ConfigError(f"config declares task {raw['task']!r} "
                          f"but {task!r} was requested")
    if task != "reproduce" and "profile" not in raw:
        raise ConfigError("config needs a 'profile' block")
    params = {k: v for k, v in raw.items() if k not in ("profile", "task")}
    return RunConfig(
        task=task,
        profile=raw.get("profile", {}),
        params=params,
        out_dir=Path(args.out),
        fmt=args.format,
        deterministic=args.deterministic,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="chain",
        description="Exact and WKB computations on free-fermion chains.",
    )
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", default="chain-out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--deterministic", action="store_true",
                        help="omit timestamps so reruns byte-reproduce outputs")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.task, args)
        written = run(cfg)
    except (ConfigError, profiles.ProfileError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericsError, wkb.UnsupportedRegimeError, wkb.SingularProfileError,
            exact.ExactError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
