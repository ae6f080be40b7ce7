import hashlib
import json
import math
import subprocess
import sys

import pytest

from epdt_lab import cli
from epdt_lab.errors import Nonconvergence


def _cfg(tmp_path, text, name="c.yaml"):
    path = tmp_path / name
    path.write_text("config_version: 1\n" + text)
    return str(path)


def _main(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def _hashes(d):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.iterdir())}


def test_exponents_classical_wave(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 0, nu2: 0, n: 3}\n")
    code, out = _main(capsys, "exponents", "--config", cfg, "--out", str(tmp_path / "o"))
    assert code == 0
    assert out["summary"]["p_strauss"] == pytest.approx(1 + math.sqrt(2), abs=1e-8)
    written = json.loads((tmp_path / "o" / f"{out['slug']}.json").read_text())
    assert written["p_strauss"] == pytest.approx(2.41421356, abs=1e-8)


def test_exponents_infinite_strauss_is_a_string(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 0, nu2: 0, n: 1}\n")
    code, out = _main(capsys, "exponents", "--config", cfg, "--out", str(tmp_path))
    assert code == 0
    assert out["summary"]["p_strauss"] == "+inf"
    assert '"+inf"' in (tmp_path / f"{out['slug']}.json").read_text()


def test_negative_delta_exits_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 1, nu2: 1, n: 1}\n")
    code, out = _main(capsys, "exponents", "--config", cfg, "--out", str(tmp_path / "o"))
    assert code == 2
    assert out["error"] == "NegativeDelta"
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("text", [
    "params: {ell: 0, mu: 0, nu2: 0, n: 1.5}\n",
    "params: {ell: zero}\n",
    "params: {speed: 1}\n",
    "bogus: 1\n",
    "kato: {draws: 0}\n",
    "blowup_sweep: {eps: [-1.0]}\n",
    "radon: {profile: indicator}\n",
    "iterate: {theta: 0.4}\n",
])
def test_validation_failures_exit_2(tmp_path, capsys, text):
    cmd = {"kato": "kato", "blowup_sweep": "blowup-sweep", "radon": "radon", "iterate": "iterate"}
    command = next((v for k, v in cmd.items() if text.startswith(k)), "exponents")
    if command == "radon":
        text += "params: {n: 3}\n"
    code, out = _main(capsys, command, "--config", _cfg(tmp_path, text), "--out", str(tmp_path / "o"))
    assert code == 2 and "error" in out and out["message"]


def test_version_and_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("config_version: 2\n")
    assert _main(capsys, "exponents", "--config", str(bad))[0] == 2
    bad.write_text("[unclosed\n")
    assert _main(capsys, "exponents", "--config", str(bad))[0] == 2
    assert _main(capsys, "exponents", "--config", str(tmp_path / "missing.yaml"))[0] == 2


def test_numeric_failure_exits_3(tmp_path, capsys, monkeypatch):
    import epdt_lab.semilinear as sl

    def boom(*a, **k):
        raise Nonconvergence("solver stalled")

    monkeypatch.setattr(sl, "lifespan_sweep", boom)
    cfg = _cfg(tmp_path, "params: {mu: 2}\nblowup_sweep: {eps: [1.0], t_max: 2.0}\n")
    code, out = _main(capsys, "blowup-sweep", "--config", cfg, "--out", str(tmp_path))
    assert code == 3 and out["error"] == "Nonconvergence"


def test_kato_is_byte_identical_across_runs(tmp_path, capsys):
    cfg = _cfg(tmp_path, "kato: {draws: 12}\nseed: 5\n")
    for d in ("a", "b"):
        assert _main(capsys, "kato", "--config", cfg, "--out", str(tmp_path / d))[0] == 0
    ha, hb = _hashes(tmp_path / "a"), _hashes(tmp_path / "b")
    assert ha == hb and len(ha) == 2


def test_seed_changes_slug_and_draws(tmp_path, capsys):
    cfg = _cfg(tmp_path, "kato: {draws: 6}\n")
    _, a = _main(capsys, "kato", "--config", cfg, "--out", str(tmp_path), "--seed", "1")
    _, b = _main(capsys, "kato", "--config", cfg, "--out", str(tmp_path), "--seed", "2")
    assert a["slug"] != b["slug"]


def test_blowup_sweep_outputs(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 2, nu2: 0, n: 1}\n"
                         "blowup_sweep: {eps: [0.4, 0.55, 0.7, 0.85, 1.0, 1.2, 1.4, 1.6], t_max: 1000}\n")
    code, out = _main(capsys, "blowup-sweep", "--config", cfg, "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / f"{out['slug']}_lifespan.csv").read_text().splitlines()
    assert rows[0] == "eps,T,blew_up,dt_min" and len(rows) == 9
    fit = json.loads((tmp_path / f"{out['slug']}_fit.json").read_text())
    assert fit["slope_E"] > 0 and fit["monotone"] and not fit["partial"]


def test_partial_sweep_flagged(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 2, nu2: 0, n: 1}\nblowup_sweep: {eps: [0.3, 1.5], t_max: 10}\n")
    code, out = _main(capsys, "blowup-sweep", "--config", cfg, "--out", str(tmp_path))
    assert code == 0 and out["summary"]["partial"] and out["summary"]["incomplete_eps"] == [0.3]


def test_linear_cross_validation(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {ell: 0, mu: 2, nu2: 0.1}\nlinear: {dx: 0.005, points: 21}\n")
    code, out = _main(capsys, "linear", "--config", cfg, "--out", str(tmp_path))
    assert code == 0
    s = json.loads((tmp_path / f"{out['slug']}.json").read_text())
    assert s["passed"] and s["rel_linf_error"] <= 2e-3 and s["tolerance"] == 2e-3
    assert 3.0 <= s["halving_ratio"] <= 5.0


def test_radon_and_iterate(tmp_path, capsys):
    cfg = _cfg(tmp_path, "params: {n: 3}\nradon: {rho: [0.0, 0.5]}\n")
    code, out = _main(capsys, "radon", "--config", cfg, "--out", str(tmp_path))
    assert code == 0 and out["summary"]["oracle_max_abs_diff"] < 1e-6
    assert out["summary"]["laplacian_identity_residual"] < 1e-3
    cfg = _cfg(tmp_path, "params: {n: 3}\n", "it.yaml")
    code, out = _main(capsys, "iterate", "--config", cfg, "--out", str(tmp_path))
    assert code == 0 and out["summary"]["J"] >= out["summary"]["j0"]
    assert (tmp_path / f"{out['slug']}_sequence.csv").exists()


def test_out_dir_precedence(tmp_path, capsys, monkeypatch):
    cfg = _cfg(tmp_path, f"out: {tmp_path / 'from_cfg'}\n")
    monkeypatch.setenv("EPDT_LAB_OUT", str(tmp_path / "from_env"))
    assert _main(capsys, "exponents", "--config", cfg)[1]["out"] == str(tmp_path / "from_env")
    assert _main(capsys, "exponents", "--config", cfg, "--out", str(tmp_path / "flag"))[1]["out"] == str(tmp_path / "flag")
    monkeypatch.delenv("EPDT_LAB_OUT")
    assert _main(capsys, "exponents", "--config", cfg)[1]["out"] == str(tmp_path / "from_cfg")


def test_integer_and_float_params_share_slug(tmp_path, capsys):
    a = _cfg(tmp_path, "params: {ell: 0, mu: 2}\n", "a.yaml")
    b = _cfg(tmp_path, "params: {ell: 0.0, mu: 2.0}\n", "b.yaml")
    assert _main(capsys, "exponents", "--config", a, "--out", str(tmp_path))[1]["slug"] == \
        _main(capsys, "exponents", "--config", b, "--out", str(tmp_path))[1]["slug"]


def test_default_params_have_no_finite_critical_power(tmp_path, capsys):
    code, out = _main(capsys, "iterate", "--out", str(tmp_path))
    assert code == 2 and "finite" in out["message"]


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "epdt_lab", "exponents", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["command"] == "exponents"
