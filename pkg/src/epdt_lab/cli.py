"""Command-line front end: ``epdt-lab <command> [--config PATH] [--out DIR] [--seed N] [--jobs N]``.

Configs are YAML mappings with a ``config_version`` field, an optional
``params`` block (``ell``, ``mu``, ``nu2``, ``n``, ``R``) and one optional block
per command (``linear``, ``kato``, ``radon``, ``blowup_sweep``, ``iterate``).
Everything is validated before any computation starts.

Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.  Errors
are printed to stdout as ``{"error": <code>, "message": <text>}``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from collections import Counter
from dataclasses import asdict
from pathlib import Path

import numpy as np
import yaml

from .errors import EPDTError, NumericFailure, ValidationError
from .model import ModelParams, spectral_constants, strauss_exponent_shifted

CONFIG_VERSION = 1
DEFAULT_OUT = "epdt_lab_out"
LINEAR_TOL = 2e-3

_DEFAULTS = {
    "linear": {"t": 3.0, "dx": 0.0025, "points": 41, "x_half_width": 2.0, "tol": 1e-9,
               "bump_power": 6, "convergence": True},
    "kato": {"draws": 200},
    "radon": {"profile": "bump", "rho": [0.0, 0.25, 0.5, 0.75], "oracle": True, "identity_check": True},
    "blowup_sweep": {"p": None, "eps": [0.4, 0.55, 0.7, 0.85, 1.0, 1.2, 1.4, 1.6], "t_max": 1000.0,
                     "dx": 0.1, "threshold": 1e8},
    "iterate": {"theta": 0.75, "a0": 2.0, "alpha0": 4.0, "D": 1.0, "B0": 1.0, "M": 1.0, "Q": 1.0,
                "T2": 2.5, "p": None, "j_max": 30, "eps": [0.25, 0.5, 1.0]},
}
_TOP_KEYS = {"config_version", "params", "seed", "out", *_DEFAULTS}


def _clean(o):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python ones."""
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, (bool, np.bool_)):
        return bool(o)
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        f = float(o)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "+inf" if f > 0 else "-inf"
        return f
    return o


def _dumps(o) -> str:
    return json.dumps(_clean(o), sort_keys=True, indent=2) + "\n"


def _load_config(path: str | None) -> dict:
    if path is None:
        return {"config_version": CONFIG_VERSION}
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValidationError(f"malformed YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a mapping")
    if cfg.get("config_version") != CONFIG_VERSION:
        raise ValidationError(f"config_version must be {CONFIG_VERSION}")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _section(cfg: dict, name: str) -> dict:
    block = cfg.get(name) or {}
    if not isinstance(block, dict):
        raise ValidationError(f"block '{name}' must be a mapping")
    unknown = set(block) - set(_DEFAULTS[name])
    if unknown:
        raise ValidationError(f"unknown keys in '{name}': {sorted(unknown)}")
    return {**_DEFAULTS[name], **block}


def _params(cfg: dict, **force) -> ModelParams:
    block = dict(cfg.get("params") or {})
    unknown = set(block) - {"ell", "mu", "nu2", "n", "R"}
    if unknown:
        raise ValidationError(f"unknown keys in 'params': {sorted(unknown)}")
    block.update(force)
    try:
        # YAML's 0 and 0.0 must give the same slug
        block = {k: (v if k == "n" else float(v)) for k, v in block.items()}
        return ModelParams(**block).require_admissible()
    except (TypeError, ValueError) as exc:
        if isinstance(exc, EPDTError):
            raise
        raise ValidationError(str(exc)) from exc


def _slug(command: str, payload: dict) -> str:
    digest = hashlib.sha256(json.dumps(_clean(payload), sort_keys=True).encode()).hexdigest()[:12]
    return f"{command}-{digest}"


# Each preparer validates its inputs and returns (payload for the slug, runner).

def _prep_exponents(cfg, args):
    params = _params(cfg)

    def run(out, slug):
        report = asdict(spectral_constants(params))
        report["p_strauss"] = report.pop("p_strauss_shifted")
        report["p_fujita"] = report.pop("p_fujita_shifted")
        report["params"] = asdict(params)
        _write(out / f"{slug}.json", _dumps(report))
        return report

    return {"params": asdict(params)}, run


def _prep_linear(cfg, args):
    from .linear1d import LinearProblem
    from .semilinear import bump

    params = _params(cfg, n=1)
    s = _section(cfg, "linear")
    if not s["t"] > 1 or not s["dx"] > 0 or int(s["points"]) < 2 or not s["x_half_width"] > 0:
        raise ValidationError("linear: need t > 1, dx > 0, points >= 2, x_half_width > 0")
    b = bump(params.R, int(s["bump_power"]))
    u1 = lambda x: b(x) * (0.5 + 0.3 * np.asarray(x) / params.R)
    prob = LinearProblem(params, b, u1, t_end=float(s["t"]))

    def run(out, slug):
        from .linear1d import relative_linf, solve_representation_many
        from .semilinear import SemilinearProblem, solve_semilinear

        xs = np.linspace(-s["x_half_width"], s["x_half_width"], int(s["points"]))
        ref = solve_representation_many(prob, s["t"], xs, tol=s["tol"])
        # the linear equation solved by the semilinear scheme with the source switched off
        sp = SemilinearProblem(params, 2.0, 1.0, b, u1, nonlinear=False, theorem_data=False)

        def fd(dx):
            r = solve_semilinear(sp, s["t"], dx, snapshot_times=[s["t"]])
            return np.interp(xs, r.grid.coords, r.snapshots[float(s["t"])])

        num = fd(s["dx"])
        err = relative_linf(num, ref)
        summary = {"params": asdict(params), "t": s["t"], "dx": s["dx"], "rel_linf_error": err,
                   "tolerance": LINEAR_TOL, "passed": err <= LINEAR_TOL}
        if s["convergence"]:
            coarse = relative_linf(fd(2 * s["dx"]), ref)
            summary["rel_linf_error_2dx"] = coarse
            summary["halving_ratio"] = coarse / err if err > 0 else math.inf
        _write_rows(out / f"{slug}_solution.csv", ["x", "u_representation", "u_fd"], zip(xs, ref, num))
        _write(out / f"{slug}.json", _dumps(summary))
        return summary

    return {"params": asdict(params), "linear": s}, run


def _prep_kato(cfg, args):
    s = _section(cfg, "kato")
    if int(s["draws"]) < 1:
        raise ValidationError("kato: draws must be positive")

    def run(out, slug):
        from .kato import monte_carlo, write_monte_carlo_csv

        results = monte_carlo(int(s["draws"]), seed=args.seed, jobs=args.jobs)
        counts = Counter(rep.status for _, _, rep in results)
        applicable = [rep for _, _, rep in results if rep.status in ("verified", "violated")]
        ratio = max((rep.blowup_time / (2 * rep.thresholds.T1) for rep in applicable), default=math.nan)
        summary = {"draws": int(s["draws"]), "seed": args.seed, "status_counts": dict(sorted(counts.items())),
                   "applicable": len(applicable), "violations": counts.get("violated", 0),
                   "max_blowup_over_2T1": ratio}
        write_monte_carlo_csv(out / f"{slug}_draws.csv", results)
        _write(out / f"{slug}.json", _dumps(summary))
        return summary

    return {"kato": s, "seed": args.seed}, run


def _prep_radon(cfg, args):
    from .radon import RadialFunction

    params = _params(cfg)
    s = _section(cfg, "radon")
    if params.n < 2:
        raise ValidationError("radon: need n >= 2")
    R = params.R
    if s["profile"] == "bump":
        prof = lambda r: np.clip(1.0 - (np.asarray(r) / R) ** 2, 0.0, None) ** 3
    elif s["profile"] == "indicator":
        prof = lambda r: (np.asarray(r) <= R).astype(float)
        if s["identity_check"]:
            raise ValidationError("radon: the Laplacian identity needs a smooth profile")
    else:
        raise ValidationError("radon: profile must be 'bump' or 'indicator'")
    f = RadialFunction(prof, R, params.n)
    if s["oracle"] and params.n > 4:
        raise ValidationError("radon: the hyperplane oracle supports n <= 4")
    rhos = [float(r) for r in s["rho"]]

    def run(out, slug):
        from .radon import radon_hyperplane_oracle, radon_laplacian_identity_check, radon_radial

        vals = [radon_radial(f, r) for r in rhos]
        summary = {"params": asdict(params), "profile": s["profile"], "rho": rhos, "radon": vals}
        if s["oracle"]:
            orc = [radon_hyperplane_oracle(f, r) for r in rhos]
            summary["oracle_max_abs_diff"] = max(abs(a - b) for a, b in zip(vals, orc))
        if s["identity_check"]:
            inner = [r for r in rhos if abs(r) < 0.9 * R]
            summary["laplacian_identity_residual"] = radon_laplacian_identity_check(f, inner) if inner else 0.0
        _write_rows(out / f"{slug}_profile.csv", ["rho", "radon"], zip(rhos, vals))
        _write(out / f"{slug}.json", _dumps(summary))
        return summary

    return {"params": asdict(params), "radon": s}, run


def _prep_sweep(cfg, args):
    from .semilinear import SemilinearProblem

    params = _params(cfg)
    s = _section(cfg, "blowup_sweep")
    p = strauss_exponent_shifted(params) if s["p"] is None else float(s["p"])
    eps = [float(e) for e in s["eps"]]
    if not eps or min(eps) <= 0:
        raise ValidationError("blowup_sweep: eps values must be positive")
    if not s["t_max"] > 1 or not s["dx"] > 0 or not s["threshold"] > 0:
        raise ValidationError("blowup_sweep: need t_max > 1, dx > 0, threshold > 0")
    for e in eps:
        SemilinearProblem(params, p, e)

    def run(out, slug):
        from .semilinear import lifespan_sweep, write_lifespan_table

        sw = lifespan_sweep(params, p, eps, s["t_max"], s["dx"], s["threshold"], jobs=args.jobs)
        summary = {"params": asdict(params), "p": p, "slope_E": sw.slope, "intercept": sw.intercept,
                   "fit_rms_residual": sw.fit_residual, "monotone": sw.monotone,
                   "incomplete_eps": list(sw.incomplete), "partial": bool(sw.incomplete),
                   "t_max": s["t_max"], "dx": s["dx"], "threshold": s["threshold"]}
        write_lifespan_table(out / f"{slug}_lifespan.csv", sw.records)
        _write(out / f"{slug}_fit.json", _dumps(summary))
        return summary

    return {"params": asdict(params), "blowup_sweep": s}, run


def _prep_iterate(cfg, args):
    from .iteration import IterationConfig

    params = _params(cfg)
    s = _section(cfg, "iterate")
    keys = ("theta", "a0", "alpha0", "D", "B0", "M", "Q", "T2", "p")
    it = IterationConfig(params, **{k: s[k] for k in keys})
    j_max = int(s["j_max"])
    eps = [float(e) for e in s["eps"]]
    if j_max < 1 or not eps or min(eps) <= 0:
        raise ValidationError("iterate: need j_max >= 1 and positive eps values")

    def run(out, slug):
        from .iteration import find_J, find_j0, write_lifespan_csv, write_sequence_csv

        summary = {"params": asdict(params), "p": it.p, "E1": it.E1, "E2": it.E2, "log_N": it.log_N,
                   "j0": find_j0(it), "J": find_J(it), "j_max": j_max}
        write_sequence_csv(out / f"{slug}_sequence.csv", it, j_max)
        write_lifespan_csv(out / f"{slug}_lifespan.csv", it, eps)
        _write(out / f"{slug}.json", _dumps(summary))
        return summary

    return {"params": asdict(params), "iterate": s}, run


_PREP = {"exponents": _prep_exponents, "linear": _prep_linear, "kato": _prep_kato, "radon": _prep_radon,
         "blowup-sweep": _prep_sweep, "iterate": _prep_iterate}


def _write(path: Path, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_rows(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    _write(path, "\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epdt-lab", description="Numerical experiments for the semilinear EPDT equation.")
    ap.add_argument("command", choices=sorted(_PREP))
    ap.add_argument("--config", help="YAML config file")
    ap.add_argument("--out", help="output directory (default: $EPDT_LAB_OUT, the config's 'out', or ./epdt_lab_out)")
    ap.add_argument("--seed", type=int, default=None, help="seed for Monte-Carlo draws")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return ap


def _fail(exc: EPDTError) -> int:
    sys.stdout.write(_dumps({"error": exc.code, "message": str(exc)}))
    return 3 if isinstance(exc, NumericFailure) else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.seed is None:
            args.seed = int(cfg.get("seed", 0))
        if args.jobs < 1:
            raise ValidationError("--jobs must be positive")
        try:
            payload, run = _PREP[args.command](cfg, args)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, EPDTError):
                raise
            # ill-typed config values
            raise ValidationError(str(exc)) from exc
    except EPDTError as exc:
        return _fail(exc)
    out = Path(args.out or os.environ.get("EPDT_LAB_OUT") or cfg.get("out") or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    slug = _slug(args.command, payload)
    try:
        summary = run(out, slug)
    except EPDTError as exc:
        return _fail(exc)
    sys.stdout.write(_dumps({"command": args.command, "slug": slug, "out": str(out), "summary": summary}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
