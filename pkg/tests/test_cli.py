import json

import pytest

from fiberheat import cli
from fiberheat.config import OUTPUT_ROOT_ENV, parse_config
from fiberheat.errors import ConfigError
from fiberheat.experiments import EXPERIMENTS, default_config

QUICK = {
    "annulus2d": "[grid]\nn_psi = 33\nn_theta = 16\n[run]\nrefinements = 17, 33\n",
    "channel2d": "[grid]\nn_psi = 33\nn_theta = 32\n[run]\neps_list = 0.1, 0.05, 0.02\n",
    "torus-integrable": "[grid]\nn_psi = 9\nn_theta = 12\nn_phi = 12\n[run]\neps_list = 0.1, 0.03, 0.01\n",
    "torus-perturbed": "[grid]\nn_psi = 9\nn_theta = 12\nn_phi = 12\n[run]\neps_list = 0.1, 0.03, 0.01\n"
                       "amplitudes = 0.1, 0.2\na_list = 0.5\n",
    "noninteg-volume": "[grid]\nn_psi = 9\nn_theta = 12\nn_phi = 12\n[run]\neps_list = 0.1, 0.01\n"
                       "amplitudes = 0.1, 0.2\n",
    "diophantine-scan": "[ergodic]\nK = 20\nM_list = 10, 100\nsamples = 5\n",
    "mde-demo": "[ergodic]\nK = 6\nsamples = 3\n",
    "geometry-selftest": "[run]\nrefinements = 17, 33\n",
}


def _write(tmp_path, name, body, out=None):
    out = out or tmp_path / "out" / name
    path = tmp_path / f"{name}.ini"
    path.write_text(f"[experiment]\nname = {name}\noutput_dir = {out}\n{body}")
    return path, out


def test_list_experiments(capsys):
    assert cli.main(["list-experiments"]) == 0
    listed = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert listed == list(EXPERIMENTS)
    assert len(listed) == 8


def test_unsorted_eps_list_exit_code(tmp_path, capsys):
    path, _ = _write(tmp_path, "channel2d", "[run]\neps_list = 0.1, 0.01, 0.05\n")
    assert cli.main(["validate", str(path)]) == 1
    err = capsys.readouterr().err
    assert "eps_list" in err and "line 5" in err
    assert cli.main(["run", str(path)]) == 1


@pytest.mark.parametrize("body,field", [
    ("[run]\nepsilon = 0.1\n", "epsilon"),
    ("[solver]\npreconditioner = ilu\n", "preconditioner"),
    ("[grid]\nn_psi = many\n", "n_psi"),
    ("[run]\neps_list = 0.1, -0.2\n", "eps_list"),
    ("[ergodic]\nM_list = 100, 10\n", "M_list"),
    ("[plotting]\ndpi = 100\n", "plotting"),
])
def test_config_errors_name_the_field(tmp_path, body, field):
    path, _ = _write(tmp_path, "channel2d", body)
    with pytest.raises(ConfigError) as info:
        cli.load_config(path, default_config)
    assert info.value.field == field and info.value.line is not None


def test_unknown_experiment():
    with pytest.raises(ConfigError) as info:
        parse_config("[experiment]\nname = heat\n", default_config)
    assert info.value.field == "name" and info.value.line == 2


def test_missing_name():
    with pytest.raises(ConfigError):
        parse_config("[grid]\nn_psi = 9\n", default_config)


def test_invalid_field_is_config_error():
    with pytest.raises(ConfigError) as info:
        parse_config("[experiment]\nname = channel2d\n[field]\ndelta = 5\n", default_config)
    assert info.value.field == "delta" and info.value.line == 4


def test_config_merges_defaults_and_hash():
    a = parse_config("[experiment]\nname = channel2d\n", default_config)
    b = parse_config("[experiment]\nname = channel2d\nworkers = 3\noutput_dir = /tmp/x\n", default_config)
    c = parse_config("[experiment]\nname = channel2d\n[field]\ndelta = 0.1\n", default_config)
    assert a.field == {"kind": "Channel2D", "delta": 0.15} and c.field["delta"] == 0.1
    assert a.content_hash() == b.content_hash() != c.content_hash()


def test_output_root_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    cfg = parse_config("[experiment]\nname = mde-demo\n", default_config)
    assert cfg.resolved_output_dir() == tmp_path / "root" / "mde-demo"


def test_validate_ok(tmp_path, capsys):
    path, _ = _write(tmp_path, "mde-demo", QUICK["mde-demo"])
    assert cli.main(["validate", str(path)]) == 0
    assert "ok" in capsys.readouterr().out


@pytest.mark.parametrize("name", list(QUICK))
def test_every_experiment_runs_and_writes_artifacts(tmp_path, name):
    path, out = _write(tmp_path, name, QUICK[name])
    assert cli.main(["run", str(path)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == name and len(manifest["config_hash"]) == 64
    assert set(manifest["versions"]) == {"fiberheat", "numpy", "scipy", "python"}
    names = {f["name"] for f in manifest["files"]}
    assert "summary.csv" in names and "solve_log.csv" in names
    for entry in manifest["files"]:
        assert (out / entry["name"]).exists()
    assert (out / f"plot_{name.replace('-', '_')}.py").read_text().startswith('"""Plot')
    assert (out / "summary.csv").read_text().startswith("quantity,value,target,passed")
    compile((out / f"plot_{name.replace('-', '_')}.py").read_text(), "plot", "exec")


def test_numerical_failure_exit_code(tmp_path, capsys):
    path, _ = _write(tmp_path, "channel2d", QUICK["channel2d"] + "[solver]\nmaxiter = 2\n")
    assert cli.main(["run", str(path)]) == 2
    assert "NoConvergence" in capsys.readouterr().err


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    from dataclasses import replace

    from fiberheat import experiments
    from fiberheat.errors import InvariantViolation

    def broken(cfg, workers=1):
        raise InvariantViolation("flux mismatch")

    monkeypatch.setitem(experiments.EXPERIMENTS, "mde-demo",
                        replace(experiments.EXPERIMENTS["mde-demo"], runner=broken))
    path, _ = _write(tmp_path, "mde-demo", "")
    assert cli.main(["run", str(path)]) == 3


def test_worker_pool_gives_identical_csvs(tmp_path):
    p1, o1 = _write(tmp_path, "channel2d", QUICK["channel2d"], tmp_path / "a")
    o2 = tmp_path / "b"
    p2 = tmp_path / "pool.ini"
    p2.write_text(p1.read_text().replace(str(o1), str(o2)).replace("[grid]", "workers = 2\n[grid]"))
    assert cli.main(["run", str(p1)]) == 0 and cli.main(["run", str(p2)]) == 0
    for name in ("channel_runs.csv", "summary.csv", "manifest.json"):
        assert (o1 / name).read_bytes() == (o2 / name).read_bytes()
