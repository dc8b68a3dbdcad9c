"""Sampled verification of the box conditions behind the existence,
multiplicity and non-existence results.

Each condition compares an infimum or supremum of f_i over a 5-dimensional
box (r, w1, w2, z1, z2) with a threshold.  Extrema are estimated by a tensor
grid followed by coordinate-wise bounded Brent searches in shrinking windows
around the incumbent.  Verdicts are sampled, never certified.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .expr import Expr, evaluate
from .geometry import AnnulusGeometry
from .system import NonlinearSystem

log = logging.getLogger(__name__)

__all__ = [
    "Box5",
    "ConditionReport",
    "LadderError",
    "RadiiLadder",
    "SamplingBudget",
    "TheoremReport",
    "box_extremum",
    "check_nonexistence",
    "check_theorem_ellyptic",
    "check_theorem_ellyptic2",
    "check_theorem_multi2",
    "make_box",
]

STRICT_MARGIN = 1e-12
NONEXIST_DELTA = 1e-6
AXES = ("r", "w1", "w2", "z1", "z2")

BoxKind = Literal["OmegaTilde", "ATilde", "OmegaTildeStar"]


class LadderError(ValueError):
    pass


@dataclass(frozen=True)
class Box5:
    r: tuple[float, float]
    w1: tuple[float, float]
    w2: tuple[float, float]
    z1: tuple[float, float]
    z2: tuple[float, float]

    def __post_init__(self) -> None:
        for name in AXES:
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"empty interval for {name}: [{lo}, {hi}]")
            if name != "r" and lo < 0:
                raise ValueError(f"{name} interval must lie in [0, inf)")

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [getattr(self, name) for name in AXES]

    def as_dict(self) -> dict[str, list[float]]:
        return {name: list(getattr(self, name)) for name in AXES}


@dataclass(frozen=True)
class SamplingBudget:
    base_per_axis: int = 9
    refine_rounds: int = 3
    z_bound: float = 10.0
    h_density: int = 17

    def __post_init__(self) -> None:
        if self.base_per_axis < 3:
            raise ValueError("base_per_axis must be >= 3")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")


@dataclass(frozen=True)
class RadiiLadder:
    rho: tuple[float, float]
    s: tuple[float, float]
    theta: tuple[float, float] | None = None
    sigma: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if (self.theta is None) != (self.sigma is None):
            raise LadderError("theta and sigma must be given together")
        for name in ("rho", "s", "theta", "sigma"):
            pair = getattr(self, name)
            if pair is None:
                continue
            pair = tuple(float(x) for x in pair)
            if len(pair) != 2 or min(pair) <= 0:
                raise LadderError(f"{name} must be a pair of positive numbers, got {pair}")
            object.__setattr__(self, name, pair)
        if self.four_level:
            for i in range(2):
                if not self.rho[i] < self.s[i]:
                    raise LadderError(f"need rho_{i+1} < s_{i+1}")
                if not self.theta[i] < self.sigma[i]:
                    raise LadderError(f"need theta_{i+1} < sigma_{i+1}")

    @property
    def four_level(self) -> bool:
        return self.theta is not None

    @property
    def mode(self) -> str:
        return "four-level" if self.four_level else "two-level"

    def validate(self, c: Sequence[float]) -> list[str]:
        """Check the c-dependent inequalities; returns informational notes."""
        notes = []
        for i in range(2):
            if self.four_level:
                lhs, rhs = self.s[i] / c[i], c[i] * self.theta[i]
                if not lhs < rhs:
                    if lhs < self.theta[i]:
                        notes.append(f"i={i+1}: only the weaker s/c < theta holds")
                    raise LadderError(
                        f"need s_{i+1}/c_{i+1} < c_{i+1} theta_{i+1}: {lhs:.6g} >= {rhs:.6g}"
                        + (f" ({notes[-1]})" if notes else ""))
            else:
                lhs, rhs = self.rho[i] / c[i], c[i] * self.s[i]
                if not lhs < rhs:
                    raise LadderError(f"need rho_{i+1}/c_{i+1} < c_{i+1} s_{i+1}: {lhs:.6g} >= {rhs:.6g}")
        return notes

    def as_dict(self) -> dict:
        out = {"rho": list(self.rho), "s": list(self.s)}
        if self.four_level:
            out.update(theta=list(self.theta), sigma=list(self.sigma))
        return out


@dataclass
class ConditionReport:
    condition: str
    mode: Literal["inf", "sup"]
    extremum: float
    threshold: float
    witness: tuple[float, ...]
    samples: int
    box: dict | None = None
    certified: bool = False
    note: str = ""
    margin: float = field(init=False)
    verdict: str = field(init=False)

    def __post_init__(self) -> None:
        if self.mode == "sup":
            self.margin = self.threshold - self.extremum
        else:
            self.margin = self.extremum - self.threshold
        # relative guard: the example's extrema carry exp(-|grad|^2) factors far below 1e-12
        scale = max(abs(self.extremum), abs(self.threshold))
        self.verdict = "PASS" if self.margin > 0.0 and self.margin > STRICT_MARGIN * scale else "FAIL"

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness)
        return d


@dataclass
class TheoremReport:
    theorem: str
    conditions: list[ConditionReport]
    passed: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "verdict": "sampled-PASS" if self.passed else "FAIL",
            "conditions": [c.as_dict() for c in self.conditions],
            "notes": list(self.notes),
        }


def make_box(kind: BoxKind, i: int | None, levels: Sequence[float], geom: AnnulusGeometry,
             c: Sequence[float], alpha: float | None = None) -> Box5:
    """The product sets OmegaTilde_i, ATilde_i and OmegaTildeStar for given levels."""
    l1, l2 = (float(x) for x in levels)
    if l1 <= 0 or l2 <= 0:
        raise ValueError("levels must be positive")
    if kind != "OmegaTildeStar" and i not in (1, 2):
        raise ValueError(f"component index must be 1 or 2, got {i!r}")
    a = geom.alpha() if alpha is None else alpha
    c1, c2 = c
    r = (geom.r0, geom.r1)
    if kind == "ATilde":
        w1 = (c1 * l1, l1) if i == 1 else (0.0, l1)
        w2 = (c2 * l2, l2) if i == 2 else (0.0, l2)
        return Box5(r, w1, w2, (0.0, a * l1), (0.0, a * l2))
    top1, top2 = l1 / c1, l2 / c2
    if kind == "OmegaTilde":
        w1 = (l1, top1) if i == 1 else (0.0, top1)
        w2 = (l2, top2) if i == 2 else (0.0, top2)
    elif kind == "OmegaTildeStar":
        w1, w2 = (0.0, top1), (0.0, top2)
    else:
        raise ValueError(f"unknown box kind {kind!r}")
    return Box5(r, w1, w2, (0.0, a * top1), (0.0, a * top2))


def _grid_extremum(f: Expr, box: Box5, base: int, sign: float, pool=None):
    axes = [np.linspace(lo, hi, base) for lo, hi in box.intervals]
    rest = np.meshgrid(*axes[1:], indexing="ij")
    rest = [a.ravel() for a in rest]

    def scan(r):
        vals = sign * evaluate(f, np.full_like(rest[0], r), *rest)
        k = int(np.argmin(vals))
        return float(vals[k]), (float(r),) + tuple(float(a[k]) for a in rest)

    results = list(pool.map(scan, axes[0])) if pool is not None else [scan(r) for r in axes[0]]
    best = min(results, key=lambda x: x[0])
    return best[0], np.array(best[1]), base**5


def box_extremum(f: Expr, box: Box5, mode: Literal["inf", "sup"], budget: SamplingBudget | None = None,
                 pool=None) -> tuple[float, tuple[float, ...], int]:
    """Estimate inf or sup of ``f`` over ``box``.

    Returns ``(value, witness, samples)``.  The incumbent only ever improves,
    so more refinement rounds never give a worse estimate.
    """
    budget = budget or SamplingBudget()
    if mode not in ("inf", "sup"):
        raise ValueError(f"mode must be 'inf' or 'sup', got {mode!r}")
    sign = 1.0 if mode == "inf" else -1.0
    best, x, samples = _grid_extremum(f, box, budget.base_per_axis, sign, pool)
    bounds = box.intervals
    half = np.array([(hi - lo) / (budget.base_per_axis - 1) for lo, hi in bounds])

    for _ in range(budget.refine_rounds):
        for k, (lo, hi) in enumerate(bounds):
            a, b = max(lo, x[k] - half[k]), min(hi, x[k] + half[k])
            if b <= a:
                continue

            def line(s, k=k):
                y = x.copy()
                y[k] = s
                return sign * evaluate(f, *y)

            res = minimize_scalar(line, bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, abs(b - a))})
            samples += int(res.nfev)
            # bounded Brent never probes the window ends
            for cand in (res.x, a, b):
                val = line(cand)
                samples += 1
                if val < best:
                    best, x[k] = val, cand
        half /= 2.0
    return sign * best, tuple(float(v) for v in x), samples


def _threshold_coeff(sys: NonlinearSystem, i: int) -> float:
    const = sys.constants()[i - 1]
    omega = sys.omegas[i - 1]
    _, sup_d = sys.geom.d_extrema()
    return (min(const.m, const.m_star) - omega**2) / sup_d


def _condition(sys, cid, i, kind, levels, mode, threshold, budget, pool) -> ConditionReport:
    c = sys.cone_constants()
    box = make_box(kind, i, levels, sys.geom, c)
    expr = sys.f1 if i == 1 else sys.f2
    value, witness, samples = box_extremum(expr, box, mode, budget, pool)
    rep = ConditionReport(cid, mode, value, threshold, witness, samples, box.as_dict())
    log.info("%s: %s %s=%.6g threshold=%.6g margin=%.3g", cid, rep.verdict, mode, value, threshold, rep.margin)
    return rep


def _require_mode(ladder: RadiiLadder, four_level: bool, theorem: str) -> None:
    if ladder.four_level != four_level:
        raise LadderError(f"{theorem} needs a {'four' if four_level else 'two'}-level ladder, got {ladder.mode}")


def check_theorem_ellyptic(sys: NonlinearSystem, ladder: RadiiLadder, budget: SamplingBudget | None = None,
                           pool=None) -> TheoremReport:
    """One solution in K_s minus closure(V_rho): pde1 (inf > 0) and pde2 (sup below threshold)."""
    _require_mode(ladder, False, "ellyptic")
    notes = ladder.validate(sys.cone_constants())
    reports = []
    for i in (1, 2):
        reports.append(_condition(sys, f"pde1[i={i}]", i, "OmegaTilde", ladder.rho, "inf", 0.0, budget, pool))
    for i in (1, 2):
        thr = _threshold_coeff(sys, i) * ladder.s[i - 1]
        reports.append(_condition(sys, f"pde2[i={i}]", i, "ATilde", ladder.s, "sup", thr, budget, pool))
    return TheoremReport("ellyptic", reports, all(r.passed for r in reports), notes)


def check_theorem_ellyptic2(sys: NonlinearSystem, ladder: RadiiLadder, budget: SamplingBudget | None = None,
                            pool=None) -> TheoremReport:
    """Variant with pde3 on the larger box OmegaTildeStar, required for some i only."""
    _require_mode(ladder, False, "ellyptic2")
    notes = ladder.validate(sys.cone_constants())
    inf_d, _ = sys.geom.d_extrema()
    pde3 = []
    for i in (1, 2):
        thr = sys.omegas[i - 1] ** 2 * ladder.rho[i - 1] / inf_d
        pde3.append(_condition(sys, f"pde3[i={i}]", i, "OmegaTildeStar", ladder.rho, "inf", thr, budget, pool))
    pde4 = []
    for i in (1, 2):
        thr = _threshold_coeff(sys, i) * ladder.s[i - 1]
        pde4.append(_condition(sys, f"pde4[i={i}]", i, "ATilde", ladder.s, "sup", thr, budget, pool))
    passed = any(r.passed for r in pde3) and all(r.passed for r in pde4)
    notes.append("pde3 is required for at least one i")
    return TheoremReport("ellyptic2", pde3 + pde4, passed, notes)


def check_theorem_multi2(sys: NonlinearSystem, ladder: RadiiLadder, budget: SamplingBudget | None = None,
                         pool=None) -> TheoremReport:
    """Three solutions: conditions uno, due, tre, quattro for i = 1, 2."""
    _require_mode(ladder, True, "multi2")
    notes = ladder.validate(sys.cone_constants())
    reports = []
    plan = (("uno", "ATilde", ladder.rho, "sup"), ("due", "OmegaTilde", ladder.s, "inf"),
            ("tre", "ATilde", ladder.theta, "sup"), ("quattro", "OmegaTilde", ladder.sigma, "inf"))
    for name, kind, levels, mode in plan:
        for i in (1, 2):
            thr = _threshold_coeff(sys, i) * levels[i - 1] if mode == "sup" else 0.0
            reports.append(_condition(sys, f"{name}[i={i}]", i, kind, levels, mode, thr, budget, pool))
    return TheoremReport("multi2", reports, all(r.passed for r in reports), notes)


def check_nonexistence(sys: NonlinearSystem, budget: SamplingBudget | None = None,
                       pool=None) -> tuple[ConditionReport, ConditionReport]:
    """Sign checks: cond1 (f_i < 0 whenever w_i > 0) and cond2 (f_i > 0 whenever w_i > 0).

    Sampled on w, z in [0, z_bound] with w_i restricted to [1e-6, z_bound].
    Each returned report is the worse of the two components.
    """
    budget = budget or SamplingBudget()
    z = budget.z_bound
    geom = sys.geom
    out = []
    for cid, mode in (("cond1", "sup"), ("cond2", "inf")):
        worst = None
        for i in (1, 2):
            w1 = (NONEXIST_DELTA, z) if i == 1 else (0.0, z)
            w2 = (NONEXIST_DELTA, z) if i == 2 else (0.0, z)
            box = Box5((geom.r0, geom.r1), w1, w2, (0.0, z), (0.0, z))
            expr = sys.f1 if i == 1 else sys.f2
            value, witness, samples = box_extremum(expr, box, mode, budget, pool)
            rep = ConditionReport(f"{cid}[i={i}]", mode, value, 0.0, witness, samples, box.as_dict())
            if worst is None or rep.margin < worst.margin:
                worst = rep
        worst.condition = cid
        out.append(worst)
    return out[0], out[1]


def make_pool(threads: int | None):
    if threads is not None and threads <= 1:
        return None
    return ThreadPoolExecutor(max_workers=threads)
