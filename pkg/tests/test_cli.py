import subprocess
import sys

import numpy as np
import pytest

from nsceval.asynchrony import AsynchronySpec
from nsceval.cli import main
from nsceval.io import read_csv, read_curve, write_curve, write_toml
from nsceval.noise import NoiseSpec
from nsceval.sensitivity import KCurve, KCurvePoint
from nsceval.simulation import ClockSpec, EffectSpec, Scenario


def test_help_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "nsceval", "--help"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0
    assert "kcurve" in result.stdout


def test_no_arguments(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["stats", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_preset(tmp_path):
    assert main(["simulate", "--preset", "fig6", "--out", str(tmp_path)]) == 2


@pytest.fixture
def simulated(tmp_path, capsys):
    out = tmp_path / "sim"
    status = main(
        [
            "simulate",
            "--preset",
            "fig4_wfn",
            "--scale",
            "0.01",
            "--seed",
            "7",
            "--out",
            str(out),
        ]
    )
    assert status == 0
    assert "seed = 7" in capsys.readouterr().out
    return out


def test_simulate_writes_outputs(simulated):
    data = simulated / "data.csv"
    text = data.read_text()
    assert "# tau0 = 1.0" in text
    assert "# seed = 7" in text
    assert "# nsceval_version = " in text
    assert "# command = nsceval simulate --preset fig4_wfn" in text
    assert (simulated / "truth.toml").is_file()
    assert (simulated / "scenario.toml").is_file()
    dataset = read_csv(data)
    assert list(dataset.data_vars) == ["y", "xI"]
    assert dataset.sizes["time"] == 20_000


def test_simulate_is_deterministic(simulated, tmp_path):
    assert main(
        ["simulate", "--preset", "fig4_wfn", "--scale", "0.01", "--seed", "7"]
        + ["--out", str(tmp_path / "again")]
    ) == 0
    first = read_csv(simulated / "data.csv")
    second = read_csv(tmp_path / "again" / "data.csv")
    np.testing.assert_array_equal(first["y"].values, second["y"].values)


def test_simulate_from_scenario_file(simulated, tmp_path, capsys):
    out = tmp_path / "replay"
    status = main(
        ["simulate", "--scenario", str(simulated / "scenario.toml"), "--out", str(out)]
    )
    assert status == 0
    assert "seed = 7" in capsys.readouterr().out
    np.testing.assert_array_equal(
        read_csv(out / "data.csv")["xI"].values,
        read_csv(simulated / "data.csv")["xI"].values,
    )


def test_kcurve(simulated, tmp_path):
    curve_path = tmp_path / "curve.csv"
    status = main(
        ["kcurve", "--in", str(simulated / "data.csv"), "--y", "y", "--x", "xI"]
        + ["--noise", "wfn", "--max-factor", "1000", "--out", str(curve_path)]
    )
    assert status == 0
    curve = read_curve(curve_path)
    assert curve.m[-1] == 1000
    assert curve.noise_kind == "wfn"
    assert abs(curve.k[0] - 1.0) <= 5 * curve.sigma_k[0]


def test_kcurve_config_file(simulated, tmp_path):
    curve_path = tmp_path / "curve.csv"
    config = tmp_path / "kcurve.toml"
    config.write_text(
        f'input_file = "{simulated / "data.csv"}"\ny = "y"\nx = "xI"\n'
        f'out = "{curve_path}"\nvariant = "nscd"\nnoise = "wfn"\n'
    )
    assert main(["kcurve", "--config", str(config)]) == 0
    assert read_curve(curve_path).variant == "nscd"


def test_kcurve_print_config(capsys):
    status = main(
        ["kcurve", "--in", "a.csv", "--y", "y", "--x", "xI", "--out", "c.csv"]
        + ["--style", "normal", "--print-config"]
    )
    assert status == 0
    out = capsys.readouterr().out
    assert 'style = "normal"' in out
    assert 'input_file = "a.csv"' in out


def test_kcurve_missing_input(tmp_path, capsys):
    status = main(
        ["kcurve", "--in", str(tmp_path / "missing.csv"), "--y", "y", "--x", "xI"]
        + ["--out", str(tmp_path / "curve.csv")]
    )
    assert status == 3
    assert capsys.readouterr().err.startswith("error: parse: ")


def test_kcurve_missing_column(simulated, tmp_path, capsys):
    status = main(
        ["kcurve", "--in", str(simulated / "data.csv"), "--y", "y", "--x", "temp"]
        + ["--out", str(tmp_path / "curve.csv")]
    )
    assert status == 3
    assert "temp" in capsys.readouterr().err


def test_stats_constant_column(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("# tau0 = 1.0\ny\n" + "5.0\n" * 40)
    assert main(["stats", "--in", str(data), "--col", "y", "--style", "both"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "m,tau,adev_normal,adev_overlap"
    assert lines[1:] == [
        "1,1.0,0.0,0.0",
        "2,2.0,0.0,0.0",
        "5,5.0,0.0,0.0",
        "10,10.0,0.0,0.0",
    ]


def write_flat_curve(path, factors):
    points = [KCurvePoint(m, float(m), 1.0, 0.5, 100.0 / m) for m in factors]
    write_curve(KCurve(tuple(points)), path)


def test_estimate(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    write_flat_curve(path, (1, 2, 5, 10, 20))
    assert main(["estimate", "--curve", str(path)]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split() == [
        "k_bar",
        "sigma_bar",
        "sigma_max",
        "sigma_total",
        "m_lo",
        "m_hi",
    ]
    assert row.split() == ["1.0", "0.0", "0.5", "0.5", "1", "20"]


def test_estimate_without_decade_span(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    write_flat_curve(path, (1, 2, 5))
    assert main(["estimate", "--curve", str(path)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith("error: extraction-failed: ")


def test_budget(tmp_path, capsys):
    spec = tmp_path / "budget.toml"
    spec.write_text("[a]\nk = 1.0\nsigma_x = 3.0\n\n[b]\nk = 2.0\nsigma_x = 2.0\n")
    assert main(["budget", "--spec", str(spec)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,k,sigma_x,contribution"
    assert lines[-1] == "u_B = 5.0"


def test_empty_budget(tmp_path, capsys):
    spec = tmp_path / "budget.toml"
    spec.write_text("")
    assert main(["budget", "--spec", str(spec)]) == 1
    assert "error: empty-budget: " in capsys.readouterr().err


def test_compensate(tmp_path, capsys):
    clock = ClockSpec(
        noise_floor=(NoiseSpec("wfn", 0.02, seed=1),),
        effects=(
            EffectSpec(
                "xI",
                0.5,
                (NoiseSpec("wfn", 1.0, seed=2),),
                asynchrony=AsynchronySpec(3, 1),
            ),
        ),
    )
    scenario = Scenario(clock, 5000, seed=0, name="delayed")
    write_toml(scenario.as_dict(), tmp_path / "scenario.toml")
    assert main(
        ["simulate", "--scenario", str(tmp_path / "scenario.toml")]
        + ["--out", str(tmp_path / "sim")]
    ) == 0
    capsys.readouterr()
    curve_path = tmp_path / "compensated.csv"
    status = main(
        ["compensate", "--in", str(tmp_path / "sim" / "data.csv"), "--y", "y"]
        + ["--x", "xI", "--dmax", "5", "--imax", "3", "--noise", "wfn"]
        + ["--out", str(curve_path)]
    )
    assert status == 0
    out = capsys.readouterr().out
    assert "delay = 3" in out
    assert "integral = 1" in out
    curve = read_curve(curve_path)
    assert curve.provenance["delay"] == "3"


def test_simulate_kcurve_estimate_pipeline(simulated, capsys):
    curve = simulated / "curve.csv"
    assert main(
        ["kcurve", "--in", str(simulated / "data.csv"), "--y", "y", "--x", "xI"]
        + ["--out", str(curve)]
    ) == 0
    capsys.readouterr()
    assert main(["estimate", "--curve", str(curve)]) == 0
    _, row = capsys.readouterr().out.splitlines()
    k_bar, sigma_bar, sigma_max, sigma_total, m_lo, m_hi = row.split()
    assert abs(float(k_bar) - 1.0) <= 3 * float(sigma_total)
    np.testing.assert_allclose(
        float(sigma_total), np.hypot(float(sigma_bar), float(sigma_max))
    )
    assert int(m_hi) >= 10 * int(m_lo)
