import filecmp

import pytest

from relaxshock.cli import main
from relaxshock.config import RunConfig, parse_config, validate_config, with_overrides
from relaxshock.errors import ConfigError
from relaxshock.experiments import EXIT_CONFIG, EXIT_OK, TIMESERIES_COLUMNS, run_stability


def test_parse_basic_and_aliases():
    cfg = parse_config("""
# comment
gamma = 1.4
lambda = 0.5   # trailing comment
T = 3
CFL = 0.3
tau_list = 0.1, 0.01
mode = oneD
""")
    assert cfg.gamma == 1.4 and cfg.lam == 0.5 and cfg.T_final == 3.0 and cfg.cfl == 0.3
    assert cfg.tau_list == (0.1, 0.01)


@pytest.mark.parametrize("text", [
    "bogus = 1",
    "gamma 1.4",
    "N1 = many",
    "gamma = 0.9",
    "v_plus = 0.8",
    "mu = -1",
    "tau = 50",
    "tau_list = 0.001, 0.01",
    "mode = threeD",
    "N2 = 8\nN3 = 8",
    "bump_center = 49",
    "bump_amplitude = -10",
    "nu = 10",
    "cfl = 1.5",
])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_overrides_revalidate():
    cfg = validate_config(RunConfig())
    assert with_overrides(cfg, mu=2.0).mu == 2.0
    with pytest.raises(ConfigError):
        with_overrides(cfg, v_plus=1.0)


def test_cli_config_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("v_plus = 0.9\n")
    assert main(["profile", "--config", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert main(["profile", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["relax-limit", "--tau", "0.1,x", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_profile(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("v_plus = 1.2\n")
    assert main(["profile", "--config", str(p), "--out", str(tmp_path / "o")]) == EXIT_OK
    text = (tmp_path / "o" / "report.txt").read_text()
    assert "ok=true" in text.splitlines()
    assert (tmp_path / "o" / "profile.bin").stat().st_size > 0


def _short_cfg(tmp_path, name):
    p = tmp_path / name
    p.write_text("v_plus = 1.1\nL = 50\nN1 = 256\nT = 4\noutput_dt = 1\nbump_amplitude = 0.01\n")
    return p


def test_cli_stability_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["stability", "--config", str(_short_cfg(tmp_path, f"c{k}.cfg")), "--out", str(out)]) == EXIT_OK
        outs.append(out / "timeseries.csv")
    assert filecmp.cmp(outs[0], outs[1], shallow=False)
    lines = outs[0].read_text().splitlines()
    assert lines[0].split(",") == list(TIMESERIES_COLUMNS)
    assert len(lines) == 1 + 5


def test_run_stability_shift_bound():
    cfg = validate_config(RunConfig(v_plus=1.1, L=50.0, N1=256, T_final=4.0, output_dt=1.0))
    res = run_stability(cfg)
    assert res.summary["X_bound_ok"]
    assert [r["t"] for r in res.rows] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert res.max_trace_residual < 1e-10
