import json

import numpy as np

from fermichain import cli
from fermichain.cli import compare_density, main, reproduce_catalog
from fermichain.profiles import Krawtchouk, make_builtin


def _write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _read_csv(path):
    header, names, rows = [], None, []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            header.append(line)
        elif names is None:
            names = line.split(",")
        else:
            rows.append(line.split(","))
    return header, names, rows


def test_spectrum_task(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0},
                    "N": 10},
    })
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfgfile, "--out", str(out)]) == 0
    header, names, rows = _read_csv(out / "spectrum.csv")
    assert names == ["k", "energy"]
    assert len(rows) == 10
    assert any("version" in h for h in header)
    energies = [float(r[1]) for r in rows]
    expect = -2 * np.cos(np.pi * np.arange(1, 11) / 11)
    assert np.abs(np.array(energies) - expect).max() < 1e-10


def test_density_task_and_regions(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "rainbow", "parameters": {"h": 1.0}, "N": 80},
        "fillings": [0.125],
    })
    out = tmp_path / "out"
    assert main(["density", "--config", cfgfile, "--out", str(out)]) == 0
    _, names, rows = _read_csv(out / "density_M10.csv")
    assert names == ["site", "x", "density_exact", "density_wkb"]
    assert len(rows) == 80
    wkb_col = np.array([float(r[3]) for r in rows])
    assert wkb_col.min() >= 0.0 and wkb_col.max() <= 1.0


def test_compare_task_reports_bulk_error(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "krawtchouk", "parameters": {"q": 0.25}, "N": 400},
        "fillings": [0.125, 0.5, 0.875],
    })
    out = tmp_path / "out"
    assert main(["compare", "--config", cfgfile, "--out", str(out)]) == 0
    _, names, rows = _read_csv(out / "compare_report.csv")
    i = names.index("bulk_sup_error")
    for row in rows:
        assert float(row[i]) < 0.05


def test_compare_density_report_fields():
    lat, cont = make_builtin(Krawtchouk(q=0.25), 200)
    rep = compare_density(lat, cont, 100)
    assert rep.bulk_margin == 10
    assert 0 <= rep.bulk_sup_error <= rep.sup_error
    assert rep.mean_abs_error >= 0
    assert rep.runtime > 0


def test_deterministic_outputs_byte_identical(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "cosine", "parameters": {"J0": 0.5}, "N": 40},
        "fillings": [0.5],
    })
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main(["density", "--config", cfgfile, "--out", str(out),
                     "--deterministic"]) == 0
    assert (out1 / "density_M20.csv").read_bytes() == \
        (out2 / "density_M20.csv").read_bytes()


def test_json_format(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0},
                    "N": 6},
    })
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfgfile, "--out", str(out),
                 "--format", "json"]) == 0
    payload = json.loads((out / "spectrum.json").read_text())
    assert payload["meta"]["config"]["task"] == "spectrum"
    assert len(payload["columns"]["energy"]) == 6


def test_wells_and_frequencies_tasks(tmp_path):
    profile = {"family": "asymmetric_cosine",
               "parameters": {"J0": 0.75, "b": 5.0, "r": 2}, "N": 400}
    out = tmp_path / "out"
    cfgfile = _write_config(tmp_path, {"profile": profile, "mode_index": 199})
    assert main(["wells", "--config", cfgfile, "--out", str(out)]) == 0
    _, names, rows = _read_csv(out / "wells.csv")
    assert len(rows) == 3
    cfgfile = _write_config(tmp_path, {"profile": profile, "mode_index": 199,
                                       "mode_band": [179, 219]}, "freq.json")
    assert main(["frequencies", "--config", cfgfile, "--out", str(out)]) == 0
    _, names, rows = _read_csv(out / "localization_counts.csv")
    counts = [int(r[1]) for r in rows]
    assert counts == [8, 22, 10]


def test_custom_profile_expressions(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"expressions": {"J": "exp(x)", "B": "2*exp(x)"},
                    "N": 50, "lattice_spacing": 0.02},
        "fillings": [0.3],
    })
    out = tmp_path / "out"
    assert main(["density", "--config", cfgfile, "--out", str(out)]) == 0
    assert (out / "density_M15.csv").exists()


# --- error paths -------------------------------------------------------------

def test_missing_config_file(tmp_path, capsys):
    assert main(["spectrum", "--config", str(tmp_path / "nope.json")]) == 1
    assert "config error" in capsys.readouterr().err


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["spectrum", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_task_mismatch(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "task": "density",
        "profile": {"family": "homogeneous", "parameters": {}, "N": 6},
    })
    assert main(["spectrum", "--config", cfgfile]) == 1


def test_bad_family_parameters(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "krawtchouk", "parameters": {"q": 2.0}, "N": 10},
    })
    assert main(["spectrum", "--config", cfgfile]) == 1


def test_numerical_error_exit_code(tmp_path, capsys):
    # Envelope at an energy outside the spectrum: empty decomposition.
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0},
                    "N": 20},
        "energy": 9.0,
    })
    assert main(["envelope", "--config", cfgfile, "--out", str(tmp_path / "o")]) == 2
    assert "numerical error" in capsys.readouterr().err


def test_density_needs_continuum(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"arrays": {"J": [1.0, 1.0], "B": [0.0, 0.0, 0.0]}},
        "fillings": [0.5],
    })
    assert main(["density", "--config", cfgfile, "--out", str(tmp_path / "o")]) == 1


# --- reproduce ---------------------------------------------------------------

def test_catalog_has_all_targets():
    cat = reproduce_catalog()
    assert len(cat) >= 9
    assert "rainbow-density" in cat and "asymmetric-cosine-frequencies" in cat


def test_unknown_target_rejected(tmp_path):
    cfgfile = _write_config(tmp_path, {"targets": ["no-such-figure"]})
    assert main(["reproduce", "--config", cfgfile, "--out", str(tmp_path / "o")]) == 1


def test_reproduce_single_target(tmp_path):
    cfgfile = _write_config(tmp_path, {"targets": ["homogeneous-density"]})
    out = tmp_path / "out"
    assert main(["reproduce", "--config", cfgfile, "--out", str(out),
                 "--deterministic"]) == 0
    files = sorted(p.name for p in (out / "homogeneous-density").iterdir())
    assert files == ["density_M100.csv", "density_M200.csv"]
    _, names, _ = _read_csv(out / "homogeneous-density" / "density_M200.csv")
    assert "density_exact" in names and "density_wkb" in names


def test_profile_from_file_path(tmp_path):
    profile_file = tmp_path / "profile.json"
    profile_file.write_text(json.dumps(
        {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0}, "N": 8}))
    cfgfile = _write_config(tmp_path, {"profile": {"path": str(profile_file)}})
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfgfile, "--out", str(out)]) == 0
    _, _, rows = _read_csv(out / "spectrum.csv")
    assert len(rows) == 8
    cfgfile = _write_config(tmp_path, {"profile": {"path": str(tmp_path / "x.json")}})
    assert main(["spectrum", "--config", cfgfile, "--out", str(out)]) == 1


def test_reproduce_figure_alias_and_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAIN_NUM_THREADS", "2")
    cfgfile = _write_config(tmp_path, {"figure": "rainbow-density"})
    out = tmp_path / "out"
    assert main(["reproduce", "--config", cfgfile, "--out", str(out),
                 "--deterministic"]) == 0
    _, names, _ = _read_csv(out / "rainbow-density" / "density_M50.csv")
    assert "density_exact" in names and "density_wkb" in names


def test_output_header_echoes_tolerances(tmp_path):
    cfgfile = _write_config(tmp_path, {
        "profile": {"family": "homogeneous", "parameters": {"J": 1.0, "B": 0.0},
                    "N": 6},
    })
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfgfile, "--out", str(out)]) == 0
    header, _, _ = _read_csv(out / "spectrum.csv")
    assert any("tolerances" in h for h in header)
    assert any("config" in h for h in header)


def test_reproduce_full_catalog_runs_fast(tmp_path):
    # Every target must finish end-to-end at N = 400 in well under a
    # minute; the whole catalog takes a few seconds in practice.
    import time

    from fermichain.cli import REPRODUCE_TARGETS, RunConfig

    out = tmp_path / "out"
    cfg = RunConfig(task="reproduce", profile={}, params={},
                    out_dir=out, fmt="csv", deterministic=True)
    for name, runner in REPRODUCE_TARGETS.items():
        t0 = time.perf_counter()
        paths = runner(cfg)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60, f"{name} took {elapsed:.1f}s"
        assert paths and all(p.exists() for p in paths), name
        # both exact and WKB series somewhere in each target's output
        text = "".join(p.read_text() for p in paths)
        assert "exact" in text and ("wkb" in text or "envelope" in text), name
