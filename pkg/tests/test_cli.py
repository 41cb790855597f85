import json
import math
import subprocess
import sys

import pytest

from pointint import cli

MIXED_FLAGS = ["--alpha", "3", "--beta=-2", "--gamma=-7", "--delta", "5"]
FLAT_FLAGS = ["--alpha", "5", "--beta", "3", "--gamma", "0", "--delta", "0.2"]


def run(argv, capsys, env=None, monkeypatch=None):
    if env and monkeypatch:
        for k, v in env.items():
            monkeypatch.setenv(k, v)
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(csv_text):
    lines = [l for l in csv_text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_spectrum_mixed(capsys):
    code, out, _ = run(["spectrum", *MIXED_FLAGS], capsys)
    assert code == 0
    by_n = {int(r["n"]): r for r in rows(out)}
    assert abs(float(by_n[10]["k_exact"]) - 0.894964) < 1e-6
    assert abs(float(by_n[10]["k_approx"]) - 0.905264) < 1e-6
    assert "\r" not in out


def test_spectrum_flat(capsys):
    code, out, _ = run(["spectrum", *FLAT_FLAGS], capsys)
    by_n = {int(r["n"]): r for r in rows(out)}
    assert abs(float(by_n[7]["k_exact"]) - 0.775671) < 1e-6
    assert abs(float(by_n[7]["k_approx"]) - 0.775312) < 1e-6


def test_spectrum_free_box(capsys):
    code, out, _ = run(["spectrum"], capsys)
    for r in rows(out):
        n = int(r["n"])
        assert float(r["k_exact"]) == pytest.approx(n * math.pi / 30, abs=1e-11)
        assert float(r["k_approx"]) == pytest.approx(n * math.pi / 30, abs=1e-11)


def test_spectrum_negative_rows(capsys):
    _, out, _ = run(["spectrum", *MIXED_FLAGS, "--include-negative"], capsys)
    first = rows(out)[0]
    assert first["n"] == "1" and first["k_exact"] == "" and float(first["energy_approx"]) < -7000


def test_float_format(capsys):
    _, out, _ = run(["spectrum", "--k-hi", "0.3"], capsys)
    fields = out.splitlines()[1].split(",")
    assert fields[:4] == ["1", f"{math.pi / 30:.12g}", f"{math.pi / 30:.12g}", "0"]
    assert len(fields[4].replace("0.0", "").replace(".", "")) <= 12


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 3, "beta": -2, "gamma": -7, "delta": 5, "k_hi": 0.95}))
    _, from_file, _ = run(["spectrum", "--config", str(cfg)], capsys)
    _, from_flags, _ = run(["spectrum", *MIXED_FLAGS, "--k-hi", "0.95"], capsys)
    assert from_file == from_flags
    # flags win over the file
    _, overridden, _ = run(["spectrum", "--config", str(cfg), "--alpha", "1", "--beta", "0",
                            "--gamma", "0", "--delta", "1"], capsys)
    assert rows(overridden)[0]["k_exact"] == f"{math.pi / 30:.12g}"


def test_output_is_deterministic_across_threads(capsys, monkeypatch):
    _, serial, _ = run(["spectrum", *FLAT_FLAGS], capsys)
    monkeypatch.setenv("POINTINT_THREADS", "4")
    _, threaded, _ = run(["spectrum", *FLAT_FLAGS], capsys)
    assert serial == threaded


def test_wavefunction_mixed_json(capsys):
    code, out, _ = run(["wavefunction", *MIXED_FLAGS, "--n", "13", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert len(doc["rows"]) == 12000
    assert doc["footer"]["nodes_exact"] == 10
    assert doc["footer"]["nodes_approx"] == 12
    assert doc["columns"] == ["x", "re_exact", "im_exact", "re_approx", "im_approx", "left_limit_at_0"]


def test_wavefunction_free_half_sine(capsys):
    _, out, _ = run(["wavefunction", "--n", "1", "--sample-points", "301"], capsys)
    data = rows(out)
    assert len(data) == 301
    re = [float(r["re_exact"]) for r in data]
    assert min(re) > -1e-12 and max(re) == pytest.approx(math.sqrt(2 / 30), rel=1e-6)


def test_wavefunction_flat_jump(capsys):
    _, out, _ = run(["wavefunction", *FLAT_FLAGS, "--n", "7"], capsys)
    origin = [r for r in rows(out) if r["left_limit_at_0"] != ""]
    assert len(origin) == 1 and float(origin[0]["x"]) == 0.0
    right, left = float(origin[0]["re_exact"]), float(origin[0]["left_limit_at_0"])
    assert right == pytest.approx(0.2 * left, rel=1e-9)


def test_wavefunction_unused_label(capsys):
    code, out, err = run(["wavefunction", *MIXED_FLAGS, "--n", "1", "--sample-points", "50"], capsys)
    assert code == 0 and "no zero-range counterpart" in err
    assert rows(out)[5]["re_exact"] == ""


def test_converge_table(capsys):
    code, out, _ = run(["converge", *MIXED_FLAGS, "--n", "10"], capsys)
    assert code == 0
    data = rows(out)
    assert len(data) == 9
    assert all(float(r["det_error"]) < 1e-8 for r in data)
    footer = dict(l[2:].split("=") for l in out.splitlines() if l.startswith("# "))
    assert float(footer["expansion_slope"]) == pytest.approx(3, abs=0.3)
    assert float(footer["drift_slope"]) == pytest.approx(1, abs=0.1)


def test_converge_single_delta(capsys):
    _, out, _ = run(["converge", "--beta", "0.7", "--a-seq", "0.01,0.001,0.0001"], capsys)
    # the delta itself is exact; what remains is free propagation across 2a
    for r in rows(out):
        assert max(float(r[c]) for c in ("err_11", "err_12", "err_21", "err_22")) <= 2.5 * float(r["a"])


def test_check_default_passes(capsys):
    code, out, _ = run(["check"], capsys)
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["failed"] == []


def test_check_failure_exit_code(capsys, monkeypatch):
    from pointint.invariants import CheckResult

    monkeypatch.setattr(cli, "generic_checks", lambda d: [lambda: CheckResult("forced", False, "x")])
    monkeypatch.setattr(cli, "configured_checks", lambda *a: [])
    code, out, err = run(["check"], capsys)
    assert code == 1 and json.loads(out)["failed"] == ["forced"] and "forced" in err


@pytest.mark.parametrize(
    "argv, field",
    [
        (["spectrum", "--alpha", "2"], "alpha"),
        (["spectrum", "--a", "20"], "a"),
        (["spectrum", "--x1", "3"], "x1"),
        (["spectrum", "--k-lo", "2"], "k_lo"),
        (["spectrum", "--grid-steps", "1"], "grid_steps"),
        (["wavefunction", "--n", "0"], "n"),
        (["converge", "--a-seq", "0.1,0.2"], "a_seq"),
    ],
)
def test_config_errors(argv, field, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert field in err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"alpha": 3, "nonsense": 1}')
    code, _, err = run(["spectrum", "--config", str(cfg)], capsys)
    assert code == 2 and "nonsense" in err
    cfg.write_text("[1, 2]")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 2


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("POINTINT_THREADS", "-1")
    code, _, err = run(["spectrum"], capsys)
    assert code == 2 and "POINTINT_THREADS" in err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise FloatingPointError("forced")

    monkeypatch.setattr(cli, "exact_spectrum", boom)
    code, _, err = run(["spectrum"], capsys)
    assert code == 3 and "forced" in err


def test_small_gamma_warning(capsys):
    _, _, err = run(["spectrum", "--gamma", "1e-8", "--k-hi", "0.3"], capsys)
    assert "tiny" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pointint", "spectrum", "--k-hi", "0.25"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,k_exact,k_approx,difference,energy_exact,energy_approx"
