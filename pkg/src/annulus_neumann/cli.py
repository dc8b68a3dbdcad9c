"""Command-line front end: ``annulus-neumann constants|check|solve|nonexist|example``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .config import ConfigError, ProblemConfig, example_config, load_config
from .expr import EvalError
from .hypotheses import (LadderError, check_nonexistence, check_theorem_ellyptic, check_theorem_ellyptic2,
                         check_theorem_multi2, make_pool)
from .solver import reconstruct_radial, solve_seeds, multi_solve, write_solution_csv
from .system import check_H

__all__ = ["main", "cmd_constants", "cmd_check", "cmd_solve", "cmd_nonexist", "cmd_example"]

log = logging.getLogger("annulus_neumann")

EXIT_OK, EXIT_CONFIG, EXIT_SHORTFALL, EXIT_STRICT = 0, 2, 3, 4
SWEEP_SEEDS = 50
_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _finite(x):
    """JSON has no inf/nan; map them to strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, np.generic):
        return _finite(x.item())
    return x


def _dump(obj, path: Path | None = None) -> str:
    text = json.dumps(_finite(obj), indent=2)
    if path is not None:
        path.write_text(text + "\n", encoding="utf-8")
    return text


# --------------------------------------------------------------------- commands


def cmd_constants(cfg: ProblemConfig) -> dict:
    sys_ = cfg.build_system()
    geom = sys_.geom
    inf_d, sup_d = geom.d_extrema()
    comps = []
    for i, (omega, kc) in enumerate(zip(sys_.omegas, sys_.constants()), start=1):
        comps.append({
            "i": i, "omega": omega, **kc.as_dict(),
            "c_squared": kc.c**2,
            "sup_threshold_coeff": (min(kc.m, kc.m_star) - omega**2) / sup_d,
            "pde3_threshold_coeff": omega**2 / inf_d,
        })
    return {"geometry": {"n": geom.n, "r0": geom.r0, "r1": geom.r1, "alpha": geom.alpha(),
                         "inf_d": inf_d, "sup_d": sup_d},
            "components": comps}


def cmd_check(cfg: ProblemConfig, threads: int | None = None) -> dict:
    sys_ = cfg.build_system()
    ladder = cfg.build_ladder()
    if ladder is None:
        raise ConfigError("check needs a [ladder] table")
    budget = cfg.build_budget()
    h = check_H(sys_, budget.h_density, budget.z_bound)
    pool = make_pool(threads)
    try:
        if ladder.four_level:
            theorems = [check_theorem_multi2(sys_, ladder, budget, pool)]
        else:
            theorems = [check_theorem_ellyptic(sys_, ladder, budget, pool),
                        check_theorem_ellyptic2(sys_, ladder, budget, pool)]
    finally:
        if pool is not None:
            pool.shutdown()
    overall = {t.theorem: f"{t.theorem}: hypotheses {'sampled-PASS' if t.passed and h.passed else 'FAIL'}"
               for t in theorems}
    return {"H": h.as_dict(), "theorems": [t.as_dict() for t in theorems], "overall": overall,
            "passed": h.passed and any(t.passed for t in theorems)}


def _plot(path: Path, profile, title: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "annulus-neumann"
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    top.plot(profile.r, profile.u, label="u")
    top.plot(profile.r, profile.v, label="v")
    top.set_ylabel("value")
    top.legend()
    top.set_title(title)
    bottom.plot(profile.r, profile.grad_u, label="|grad u|")
    bottom.plot(profile.r, profile.grad_v, label="|grad v|")
    bottom.set_xlabel("r")
    bottom.set_ylabel("gradient norm")
    bottom.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_solve(cfg: ProblemConfig, out: Path, threads: int | None = None) -> tuple[dict, int]:
    sys_ = cfg.build_system()
    ladder = cfg.build_ladder()
    result = multi_solve(sys_, ladder, cfg.build_solve_options(threads))
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, sol in enumerate(result.solutions):
        profile = reconstruct_radial(sys_, sol)
        name = f"sol_{k}.csv"
        write_solution_csv(out / name, profile)
        _plot(out / f"sol_{k}.svg", profile, f"solution {k} ({sol.region})")
        s = sol.summary()
        entries.append({"file": name, "norms": {"u_c1": s["norms"]["u_c1"], "v_c1": s["norms"]["v_c1"]},
                        "minima": s["minima"], "residual_sup": sol.residual_sup,
                        "cone_margins": s["cone_margins"], "region": sol.region,
                        "nonconstant": list(sol.nonconstant), "oscillation": s["oscillation"],
                        "grid": sol.n, "seed": sol.seed_label})
    expected = 0 if ladder is None else (3 if ladder.four_level else 1)
    found = len(result.nontrivial)
    summary = {"constants": cmd_constants(cfg), "solutions": entries, "failures": result.failures,
               "seeds_tried": result.seeds_tried, "nontrivial_count": found, "expected_count": expected}
    _dump(summary, out / "summary.json")
    (out / "config.toml").write_text(cfg.to_toml(), encoding="utf-8")
    code = EXIT_OK if ladder is not None and found >= expected else EXIT_SHORTFALL
    return summary, code


def sweep_seeds(z: float, count: int = SWEEP_SEEDS) -> list[tuple[str, float, float]]:
    """Deterministic Halton points in (0, z]^2, skipping the origin."""
    pts = qmc.Halton(d=2, scramble=False).random(count + 1)[1:]
    return [("sweep", float(a * z), float(b * z)) for a, b in pts]


def cmd_nonexist(cfg: ProblemConfig, threads: int | None = None) -> dict:
    sys_ = cfg.build_system()
    budget = cfg.build_budget()
    pool = make_pool(threads)
    try:
        cond1, cond2 = check_nonexistence(sys_, budget, pool)
    finally:
        if pool is not None:
            pool.shutdown()
    h = check_H(sys_, budget.h_density, budget.z_bound)
    result = solve_seeds(sys_, sweep_seeds(budget.z_bound), cfg.build_solve_options(threads))
    nontrivial = [s for s in result.solutions if not s.is_trivial
                  and min(s.u.min, s.v.min) >= -1e-10]
    sign_ok = cond1.passed or cond2.passed
    if sign_ok and not nontrivial:
        verdict = "consistent-with-nonexistence"
    elif nontrivial:
        verdict = "nontrivial-solutions-found"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "H": h.as_dict(), "cond1": cond1.as_dict(), "cond2": cond2.as_dict(),
            "sweep": {"seeds": result.seeds_tried, "distinct": len(result.solutions),
                      "nontrivial": [s.summary() for s in nontrivial], "failures": result.failures}}


def cmd_example(out: Path, threads: int | None = None, strict: bool = False) -> tuple[dict, int]:
    cfg = example_config()
    out.mkdir(parents=True, exist_ok=True)
    constants = cmd_constants(cfg)
    _dump(constants, out / "constants.json")
    check = cmd_check(cfg, threads)
    _dump(check, out / "check.json")
    summary, code = cmd_solve(cfg, out, threads)
    if code == EXIT_OK and strict and not check["passed"]:
        code = EXIT_STRICT
    return {"constants": constants, "check": check, "solve": summary}, code


# ------------------------------------------------------------------------ text


def _fmt_constants(rep: dict) -> str:
    g = rep["geometry"]
    lines = [f"geometry: n={g['n']} r0={g['r0']:.12g} r1={g['r1']:.12g}",
             f"  alpha={g['alpha']:.12g} inf d={g['inf_d']:.12g} sup d={g['sup_d']:.12g}"]
    for c in rep["components"]:
        lines.append(f"component {c['i']} (omega={c['omega']:.12g}):")
        for key in ("m", "M", "m_star", "c_k", "c", "c_squared", "sup_threshold_coeff",
                    "pde3_threshold_coeff"):
            lines.append(f"  {key:<22} {c[key]:.15g}")
    return "\n".join(lines)


def _fmt_condition(c: dict) -> str:
    return (f"  {c['condition']:<16} {c['mode']} = {c['extremum']:.6e}  threshold {c['threshold']:.6e}  "
            f"margin {c['margin']:.3e}  {c['verdict']}")


def _fmt_check(rep: dict) -> str:
    h = rep["H"]
    lines = [f"H (sampled on [0, {h['z_bound']:g}]^4): {h['verdict']}"]
    for c in h["components"]:
        lines.append(f"  i={c['i']} worst margin {c['worst_margin']:.6e} {c['verdict']}")
    for t in rep["theorems"]:
        lines.append(f"{t['theorem']}: {t['verdict']}")
        lines.extend(_fmt_condition(c) for c in t["conditions"])
        lines.extend(f"  note: {n}" for n in t["notes"])
    lines.extend(rep["overall"].values())
    return "\n".join(lines)


def _fmt_solve(rep: dict) -> str:
    lines = []
    for s in rep["solutions"]:
        lines.append(f"{s['file']}: region {s['region']:<7} |u|={s['norms']['u_c1']:.6g} "
                     f"|v|={s['norms']['v_c1']:.6g} residual {s['residual_sup']:.2e} "
                     f"nonconstant {s['nonconstant']}")
    lines.append(f"nontrivial solutions: {rep['nontrivial_count']} (expected >= {rep['expected_count']})")
    lines.extend(f"seed failed: {f}" for f in rep["failures"])
    return "\n".join(lines)


def _fmt_nonexist(rep: dict) -> str:
    lines = [_fmt_condition(rep["cond1"]), _fmt_condition(rep["cond2"]),
             f"sweep: {rep['sweep']['seeds']} seeds, {len(rep['sweep']['nontrivial'])} nontrivial",
             f"verdict: {rep['verdict']}"]
    return "\n".join(lines)


# ------------------------------------------------------------------------ main


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="annulus-neumann",
                                description="Radial solutions of gradient-dependent Neumann systems on annuli.")
    p.add_argument("command", choices=["constants", "check", "solve", "nonexist", "example"])
    p.add_argument("--config", type=Path, help="problem configuration (TOML)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--strict", action="store_true", help="exit 4 when a sampled hypothesis fails")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    return p


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("ANNULUS_NEUMANN_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = _parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    code = EXIT_OK
    try:
        if args.command == "example":
            out = args.out or Path("example-out")
            rep, code = cmd_example(out, args.threads, args.strict)
            text = "\n".join([_fmt_constants(rep["constants"]), _fmt_check(rep["check"]),
                              _fmt_solve(rep["solve"])])
        else:
            if args.config is None:
                raise ConfigError(f"{args.command} needs --config FILE")
            cfg = load_config(args.config)
            if args.command == "constants":
                rep = cmd_constants(cfg)
                text = _fmt_constants(rep)
            elif args.command == "check":
                rep = cmd_check(cfg, args.threads)
                text = _fmt_check(rep)
                if args.strict and not rep["passed"]:
                    code = EXIT_STRICT
            elif args.command == "solve":
                if args.out is None:
                    raise ConfigError("solve needs --out DIR")
                rep, code = cmd_solve(cfg, args.out, args.threads)
                text = _fmt_solve(rep)
            else:
                rep = cmd_nonexist(cfg, args.threads)
                text = _fmt_nonexist(rep)
            if args.out is not None and args.command in ("constants", "check", "nonexist"):
                args.out.mkdir(parents=True, exist_ok=True)
                _dump(rep, args.out / f"{args.command}.json")
    except (ConfigError, LadderError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            err.update(line=exc.line, key=exc.key)
        print(json.dumps(err) if args.json else f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvalError as exc:
        print(f"error: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(_dump(rep) if args.json else text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
