"""Discretization of the shifted system and a multi-start solver.

The fixed-point operator T is applied by a Nystrom rule: g is sampled on the
grid, interpolated by a cubic spline and integrated against the separable
kernel with 8-point Gauss-Legendre on every cell, so each node is a split
point.  Solutions are computed by damped Newton on the second-order finite
difference collocation of

    -u'' + omega_1^2 u = g_1,   -v'' + omega_2^2 v = g_2,   u'(0)=u'(1)=v'(0)=v'(1)=0,

followed by Richardson extrapolation between nested grids.
"""
from __future__ import annotations

import csv
import itertools
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .expr import EvalError
from .hypotheses import RadiiLadder
from .system import NonlinearSystem

log = logging.getLogger(__name__)

__all__ = [
    "GridFunction",
    "MultiSolveResult",
    "NoConvergence",
    "RadialProfile",
    "SolutionPair",
    "SolveOptions",
    "SolverError",
    "apply_T",
    "fd4_derivative",
    "multi_solve",
    "newton_solve",
    "picard_refine",
    "reconstruct_radial",
    "write_solution_csv",
]

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
ABS_SMOOTHING = 1e-12
FD_JAC_STEP = 1e-7
NONCONSTANT_OSC = 1e-3
TRIVIAL_NORM = 1e-6
CONE_TOL = 1e-6
NONNEG_TOL = 1e-10
DEDUP_REL = 1e-6
PICARD_BLOWUP = 1e6


class SolverError(RuntimeError):
    pass


class NoConvergence(SolverError):
    def __init__(self, message: str, residual: float = math.inf):
        super().__init__(message)
        self.residual = residual


def fd4_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid (N >= 5)."""
    f = np.asarray(values, dtype=float)
    if f.size < 5:
        raise ValueError("need at least 5 nodes")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return d


@dataclass(frozen=True)
class GridFunction:
    """Values and derivative values on the uniform nodes t_j = j/(N-1)."""

    values: np.ndarray
    derivs: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        ders = np.asarray(self.derivs, dtype=float)
        if vals.ndim != 1 or vals.shape != ders.shape or vals.size < 5:
            raise ValueError("values and derivs must be 1-d arrays of equal length >= 5")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "derivs", ders)

    @classmethod
    def from_values(cls, values) -> "GridFunction":
        vals = np.asarray(values, dtype=float)
        return cls(vals, fd4_derivative(vals, 1.0 / (vals.size - 1)))

    @classmethod
    def constant(cls, n: int, value: float) -> "GridFunction":
        return cls(np.full(n, float(value)), np.zeros(n))

    @classmethod
    def from_function(cls, n: int, fn, dfn) -> "GridFunction":
        t = np.linspace(0.0, 1.0, n)
        return cls(fn(t), dfn(t))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def c1_norm(self) -> float:
        return max(self.sup_norm, float(np.max(np.abs(self.derivs))))

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def oscillation(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    def cone_margin(self, c: float) -> float:
        return self.min - c * self.c1_norm

    def resample(self, n: int) -> "GridFunction":
        if n == self.n:
            return self
        spline = CubicSpline(self.t, self.values)
        t = np.linspace(0.0, 1.0, n)
        return GridFunction(spline(t), spline(t, 1))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.values - other.values, self.derivs - other.derivs)


def _on_common_grid(a: GridFunction, b: GridFunction) -> tuple[GridFunction, GridFunction]:
    if a.n == b.n:
        return a, b
    fine, coarse = (a, b) if a.n > b.n else (b, a)
    step = (fine.n - 1) // (coarse.n - 1)
    if step * (coarse.n - 1) == fine.n - 1:
        sub = GridFunction(fine.values[::step], fine.derivs[::step])
    else:
        sub = fine.resample(coarse.n)
    return (sub, coarse) if a is fine else (coarse, sub)


def c1_distance(a: GridFunction, b: GridFunction) -> float:
    x, y = _on_common_grid(a, b)
    return (x - y).c1_norm


@dataclass
class SolveOptions:
    n: int = 257
    n_max: int = 2049
    tol: float = 1e-8
    max_iter: int = 50
    newton_ftol: float = 1e-10
    picard_steps: int = 3
    threads: int | None = None

    def __post_init__(self) -> None:
        if self.n < 65 or self.n % 2 == 0:
            raise ValueError("grid size n must be odd and >= 65")
        if self.n_max < self.n:
            raise ValueError("n_max must be >= n")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class SolutionPair:
    u: GridFunction
    v: GridFunction
    residual_sup: float
    cone_margin_1: float
    cone_margin_2: float
    discrete_residual: float = 0.0
    region: str = "unclassified"
    nonconstant: tuple[bool, bool] = (False, False)
    degenerate_jacobian: bool = False
    newton_iterations: int = 0
    seed_label: str = ""

    @property
    def n(self) -> int:
        return self.u.n

    @property
    def norm(self) -> float:
        return max(self.u.c1_norm, self.v.c1_norm)

    @property
    def is_trivial(self) -> bool:
        return max(self.u.sup_norm, self.v.sup_norm) <= TRIVIAL_NORM

    def summary(self) -> dict:
        return {
            "n": self.n,
            "norms": {"u_c1": self.u.c1_norm, "v_c1": self.v.c1_norm,
                      "u_sup": self.u.sup_norm, "v_sup": self.v.sup_norm},
            "minima": {"u": self.u.min, "v": self.v.min},
            "oscillation": {"u": self.u.oscillation, "v": self.v.oscillation},
            "residual_sup": self.residual_sup,
            "discrete_residual": self.discrete_residual,
            "cone_margins": [self.cone_margin_1, self.cone_margin_2],
            "region": self.region,
            "nonconstant": list(self.nonconstant),
            "degenerate_jacobian": self.degenerate_jacobian,
            "seed": self.seed_label,
        }


# --------------------------------------------------------------------------- T


def _g_on_grid(sys: NonlinearSystem, u: GridFunction, v: GridFunction):
    t = u.t
    p, q = np.abs(u.derivs), np.abs(v.derivs)
    return sys.g(1, t, u.values, v.values, p, q), sys.g(2, t, u.values, v.values, p, q)


def _hammerstein(omega: float, t: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integrate k(t_i, s) g(s) and dk/dt(t_i, s) g(s) over s for every node t_i."""
    h = t[1] - t[0]
    spline = CubicSpline(t, g)
    s = t[:-1, None] + 0.5 * h * (1.0 + GL_NODES[None, :])
    wg = 0.5 * h * GL_WEIGHTS[None, :] * spline(s)
    left_cells = np.sum(wg * np.cosh(omega * s), axis=1)
    right_cells = np.sum(wg * np.cosh(omega * (1.0 - s)), axis=1)
    left = np.concatenate(([0.0], np.cumsum(left_cells)))
    right = np.concatenate((np.cumsum(right_cells[::-1])[::-1], [0.0]))
    sh = math.sinh(omega)
    vals = (np.cosh(omega * (1.0 - t)) * left + np.cosh(omega * t) * right) / (omega * sh)
    ders = (-np.sinh(omega * (1.0 - t)) * left + np.sinh(omega * t) * right) / sh
    return vals, ders


def apply_T(sys: NonlinearSystem, u: GridFunction, v: GridFunction) -> tuple[GridFunction, GridFunction]:
    """One application of the Hammerstein operator; values and derivatives on the same grid."""
    if u.n != v.n:
        raise ValueError("u and v must share the grid")
    g1, g2 = _g_on_grid(sys, u, v)
    t = u.t
    out = []
    for omega, g in ((sys.omega1, g1), (sys.omega2, g2)):
        vals, ders = _hammerstein(omega, t, g)
        out.append(GridFunction(vals, ders))
    return out[0], out[1]


def fixed_point_residual(sys: NonlinearSystem, u: GridFunction, v: GridFunction) -> float:
    """max(||T_1 - u||_C1, ||T_2 - v||_C1)."""
    tu, tv = apply_T(sys, u, v)
    return max((tu - u).c1_norm, (tv - v).c1_norm)


def picard_refine(sys: NonlinearSystem, seed: tuple[GridFunction, GridFunction],
                  iters: int) -> tuple[GridFunction, GridFunction]:
    u, v = seed
    for k in range(iters):
        u, v = apply_T(sys, u, v)
        if max(u.c1_norm, v.c1_norm) > PICARD_BLOWUP:
            raise SolverError(f"Picard iteration diverged after {k + 1} steps")
    return u, v


# --------------------------------------------------------------------- Newton


class _Collocation:
    """Residual and Jacobian of the finite-difference system on N nodes.

    Unknowns are stored as deviations from fixed reference constants so the
    second differences do not lose digits to the mean level.
    """

    def __init__(self, sys: NonlinearSystem, n: int, ref: tuple[float, float]):
        self.sys = sys
        self.n = n
        self.h = 1.0 / (n - 1)
        self.t = np.linspace(0.0, 1.0, n)
        self.ref = ref
        self.inner = slice(1, n - 1)
        self._lap = self._laplacian()

    def _laplacian(self) -> sp.csr_matrix:
        n, h = self.n, self.h
        main = np.full(n, 2.0 / h**2)
        off = np.full(n - 1, -1.0 / h**2)
        a = sp.diags([off, main, off], [-1, 0, 1], format="lil")
        a[0, :] = 0.0
        a[-1, :] = 0.0
        a[0, 0], a[0, 1], a[0, 2] = -3.0 / (2 * h), 4.0 / (2 * h), -1.0 / (2 * h)
        a[-1, -1], a[-1, -2], a[-1, -3] = 3.0 / (2 * h), -4.0 / (2 * h), 1.0 / (2 * h)
        return a.tocsr()

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return x[: self.n], x[self.n:]

    def central(self, dev: np.ndarray) -> np.ndarray:
        return (dev[2:] - dev[:-2]) / (2.0 * self.h)

    def _g_args(self, x):
        du, dv = self.split(x)
        u, v = self.ref[0] + du, self.ref[1] + dv
        ti = self.t[self.inner]
        return ti, u[self.inner], v[self.inner], self.central(du), self.central(dv)

    def residual(self, x: np.ndarray) -> np.ndarray:
        du, dv = self.split(x)
        ti, ui, vi, pu, pv = self._g_args(x)
        sys = self.sys
        res = []
        for i, dev, w, omega in ((1, du, ui, sys.omega1), (2, dv, vi, sys.omega2)):
            r = self._lap @ dev
            r[self.inner] += omega**2 * w - sys.g(i, ti, ui, vi, np.abs(pu), np.abs(pv))
            res.append(r)
        return np.concatenate(res)

    def jacobian(self, x: np.ndarray) -> sp.csc_matrix:
        n, h = self.n, self.h
        ti, ui, vi, pu, pv = self._g_args(x)
        sys = self.sys
        args = [ui, vi, np.abs(pu), np.abs(pv)]
        # chain rule through |p| smoothed as sqrt(p^2 + eps^2)
        sgn = [pu / np.sqrt(pu**2 + ABS_SMOOTHING**2), pv / np.sqrt(pv**2 + ABS_SMOOTHING**2)]
        idx = np.arange(1, n - 1)
        blocks = {}
        for i, omega in ((1, sys.omega1), (2, sys.omega2)):
            g0 = sys.g(i, ti, *args)
            partial = []
            for k in range(4):
                step = FD_JAC_STEP * np.maximum(1.0, np.abs(args[k]))
                bumped = list(args)
                bumped[k] = args[k] + step
                partial.append((sys.g(i, ti, *bumped) - g0) / step)
            for j, (dval, dgrad) in enumerate(((partial[0], partial[2] * sgn[0]),
                                               (partial[1], partial[3] * sgn[1]))):
                rows = np.concatenate([idx, idx, idx])
                cols = np.concatenate([idx, idx + 1, idx - 1])
                data = np.concatenate([-dval, -dgrad / (2 * h), dgrad / (2 * h)])
                block = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
                if j == i - 1:
                    diag = np.zeros(n)
                    diag[1:-1] = omega**2
                    block = block + self._lap + sp.diags(diag)
                blocks[(i - 1, j)] = block
        return sp.bmat([[blocks[(0, 0)], blocks[(0, 1)]], [blocks[(1, 0)], blocks[(1, 1)]]], format="csc")


def _newton_grid(sys: NonlinearSystem, seed_u: np.ndarray, seed_v: np.ndarray,
                 opts: SolveOptions) -> tuple[np.ndarray, np.ndarray, float, int, bool]:
    n = seed_u.size
    ref = (float(np.mean(seed_u)), float(np.mean(seed_v)))
    col = _Collocation(sys, n, ref)
    x = np.concatenate([seed_u - ref[0], seed_v - ref[1]])
    fx = col.residual(x)
    fnorm = float(np.max(np.abs(fx)))
    iters = 0
    while fnorm > opts.newton_ftol:
        if iters >= opts.max_iter:
            raise NoConvergence(f"Newton did not converge in {opts.max_iter} steps (N={n})", fnorm)
        iters += 1
        jac = col.jacobian(x)
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                step = spsolve(jac, -fx)
            except MatrixRankWarning as exc:
                raise SolverError(f"singular Jacobian (N={n})") from exc
        if not np.all(np.isfinite(step)):
            raise SolverError(f"singular Jacobian (N={n})")
        merit = float(fx @ fx)
        lam = 1.0
        while True:
            trial = x + lam * step
            try:
                ft = col.residual(trial)
                ok = np.all(np.isfinite(ft)) and float(ft @ ft) <= (1.0 - 2e-4 * lam) * merit
            except EvalError:
                ok = False
            if ok:
                break
            lam *= 0.5
            if lam < 2.0**-12:
                break
        if not ok:
            if fnorm <= 1e3 * opts.newton_ftol:
                break  # roundoff floor
            raise NoConvergence(f"line search failed (N={n}, |F|={fnorm:.3g})", fnorm)
        x, fx = trial, ft
        new_norm = float(np.max(np.abs(fx)))
        small_step = lam * np.max(np.abs(step)) <= 1e-15 * (1.0 + np.max(np.abs(x)) + max(map(abs, ref)))
        fnorm = new_norm
        if small_step:
            break
    if fnorm > 1e3 * opts.newton_ftol:
        raise NoConvergence(f"Newton stagnated at |F|={fnorm:.3g} (N={n})", fnorm)
    du, dv = col.split(x)
    degenerate = _constant_mode_degenerate(col, x)
    return ref[0] + du, ref[1] + dv, fnorm, iters, degenerate


def _constant_mode_degenerate(col: _Collocation, x: np.ndarray) -> bool:
    jac = col.jacobian(x)
    scale = sp.linalg.norm(jac, np.inf)
    n = col.n
    for block in (slice(0, n), slice(n, 2 * n)):
        e = np.zeros(2 * n)
        e[block] = 1.0
        if np.max(np.abs(jac @ e)) <= 1e-10 * scale:
            return True
    return False


def _interp_to(values: np.ndarray, n: int) -> np.ndarray:
    if values.size == n:
        return values.copy()
    return CubicSpline(np.linspace(0.0, 1.0, values.size), values)(np.linspace(0.0, 1.0, n))


def _pair_from(sys, u_vals, v_vals, residual, discrete, iters, degenerate) -> SolutionPair:
    u, v = GridFunction.from_values(u_vals), GridFunction.from_values(v_vals)
    c1, c2 = sys.cone_constants()
    return SolutionPair(u, v, residual, u.cone_margin(c1), v.cone_margin(c2),
                        discrete_residual=discrete, newton_iterations=iters,
                        degenerate_jacobian=degenerate)


def newton_solve(sys: NonlinearSystem, seed: tuple[GridFunction, GridFunction],
                 opts: SolveOptions | None = None, richardson: bool = True) -> SolutionPair:
    """Solve the collocation system from ``seed``.

    With ``richardson`` the grid is doubled (N -> 2N-1) and the two solutions
    combined until the integral-form residual ||T(u,v) - (u,v)||_C1 is at most
    ``opts.tol`` or ``opts.n_max`` is reached.  Without it the solve happens on
    ``opts.n`` nodes only.
    """
    opts = opts or SolveOptions()
    n = opts.n
    su, sv = _interp_to(seed[0].values, n), _interp_to(seed[1].values, n)
    u, v, disc, iters, degen = _newton_grid(sys, su, sv, opts)
    if not richardson:
        pair = _pair_from(sys, u, v, math.nan, disc, iters, degen)
        pair.residual_sup = fixed_point_residual(sys, pair.u, pair.v)
        return pair
    best = None
    prev_rich = None
    while 2 * n - 1 <= opts.n_max:
        n2 = 2 * n - 1
        uf, vf, disc, it2, degen = _newton_grid(sys, _interp_to(u, n2), _interp_to(v, n2), opts)
        iters += it2
        # Richardson: the h^2 term cancels with the correction (fine - coarse)/3
        ru = uf + _interp_to((uf[::2] - u) / 3.0, n2)
        rv = vf + _interp_to((vf[::2] - v) / 3.0, n2)
        candidates = [(ru, rv)]
        if prev_rich is not None:
            # one-sided boundary closures leave an h^3 term; a second level removes it
            candidates.append((ru + _interp_to((ru[::2] - prev_rich[0]) / 7.0, n2),
                               rv + _interp_to((rv[::2] - prev_rich[1]) / 7.0, n2)))
        prev_rich = (ru, rv)
        for cu, cv in candidates:
            pair = _pair_from(sys, cu, cv, math.nan, disc, iters, degen)
            pair.residual_sup = fixed_point_residual(sys, pair.u, pair.v)
            log.debug("N=%d residual_sup=%.3g", n2, pair.residual_sup)
            if best is None or pair.residual_sup < best.residual_sup:
                best = pair
        if best.residual_sup <= opts.tol:
            return best
        u, v, n = uf, vf, n2
    res = best.residual_sup if best is not None else math.inf
    raise NoConvergence(f"residual {res:.3g} above tol {opts.tol:.3g} at N <= {opts.n_max}", res)


# ----------------------------------------------------------------- multi-start


@dataclass
class MultiSolveResult:
    solutions: list[SolutionPair]
    failures: list[str] = field(default_factory=list)
    seeds_tried: int = 0

    @property
    def nontrivial(self) -> list[SolutionPair]:
        return [s for s in self.solutions if s.region not in ("trivial", "other")]

    def regions(self) -> list[str]:
        return [s.region for s in self.solutions]


def _levels(lo: float, hi: float) -> tuple[float, float, float]:
    return lo, 0.5 * (lo + hi), hi


def region_seeds(ladder: RadiiLadder | None) -> list[tuple[str, float, float]]:
    """Constant seed pairs (label, u, v) at low/mid/high levels inside each target region."""
    seeds = [("trivial", 0.0, 0.0)]
    if ladder is None:
        return seeds
    if ladder.four_level:
        bands = {"S1": (ladder.rho, ladder.s), "S2": (ladder.s, ladder.theta), "S3": (ladder.theta, ladder.sigma)}
    else:
        bands = {"S1": (ladder.rho, ladder.s)}
    for label, (lo, hi) in bands.items():
        for a, b in itertools.product(_levels(lo[0], hi[0]), _levels(lo[1], hi[1])):
            seeds.append((label, a, b))
    return seeds


def classify(sol: SolutionPair, ladder: RadiiLadder | None, c: Sequence[float]) -> str:
    if sol.is_trivial:
        return "trivial"
    if sol.degenerate_jacobian:
        return "other"
    if sol.u.min < -NONNEG_TOL or sol.v.min < -NONNEG_TOL:
        return "other"
    if sol.cone_margin_1 < -CONE_TOL or sol.cone_margin_2 < -CONE_TOL:
        return "other"
    if ladder is None:
        return "other"
    nu, nv = sol.u.c1_norm, sol.v.c1_norm
    mu, mv = sol.u.min, sol.v.min

    def in_k(lv):
        return nu < lv[0] and nv < lv[1]

    def in_k_closed(lv):
        return nu <= lv[0] and nv <= lv[1]

    def in_v(lv):
        return mu < lv[0] and mv < lv[1]

    def in_v_closed(lv):
        return mu <= lv[0] and mv <= lv[1]

    if ladder.four_level:
        if in_v(ladder.s) and not in_k_closed(ladder.rho):
            return "S1"
        if in_k(ladder.theta) and not in_v_closed(ladder.s):
            return "S2"
        if in_v(ladder.sigma) and not in_k_closed(ladder.theta):
            return "S3"
        return "other"
    if in_k(ladder.s) and not in_v_closed(ladder.rho):
        return "S1"
    return "other"


def dedupe(solutions: Sequence[SolutionPair]) -> list[SolutionPair]:
    kept: list[SolutionPair] = []
    for sol in sorted(solutions, key=lambda s: (s.norm, s.residual_sup)):
        dup = False
        for other in kept:
            dist = max(c1_distance(sol.u, other.u), c1_distance(sol.v, other.v))
            if dist <= DEDUP_REL * (1.0 + max(sol.norm, other.norm)):
                dup = True
                break
        if not dup:
            kept.append(sol)
    return kept


def _solve_seed(sys: NonlinearSystem, label: str, a: float, b: float, opts: SolveOptions):
    seed = (GridFunction.constant(opts.n, a), GridFunction.constant(opts.n, b))
    tag = f"{label}(u={a:.6g}, v={b:.6g})"
    notes = []
    sol = None
    # the raw seed goes first: Picard depends on omega, the collocation system does not
    for picard in (0, opts.picard_steps) if opts.picard_steps else (0,):
        try:
            start = picard_refine(sys, seed, picard) if picard else seed
            sol = newton_solve(sys, start, opts)
            break
        except (SolverError, EvalError) as exc:
            notes.append(f"{'picard+' if picard else ''}newton: {exc}")
    if sol is None:
        return None, f"{tag}: {'; '.join(notes)}"
    sol.seed_label = tag
    return sol, None


def solve_seeds(sys: NonlinearSystem, seeds: Sequence[tuple[str, float, float]],
                opts: SolveOptions, ladder: RadiiLadder | None = None) -> MultiSolveResult:
    if opts.threads is not None and opts.threads <= 1:
        outcomes = [_solve_seed(sys, *s, opts) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            outcomes = list(pool.map(lambda s: _solve_seed(sys, *s, opts), seeds))
    found = [sol for sol, _ in outcomes if sol is not None]
    failures = [msg for _, msg in outcomes if msg is not None]
    c = sys.cone_constants()
    kept = dedupe(found)
    for sol in kept:
        sol.region = classify(sol, ladder, c)
        sol.nonconstant = (sol.u.oscillation > NONCONSTANT_OSC, sol.v.oscillation > NONCONSTANT_OSC)
    for msg in failures:
        log.info("seed failed: %s", msg)
    return MultiSolveResult(kept, failures, len(seeds))


def multi_solve(sys: NonlinearSystem, ladder: RadiiLadder | None, opts: SolveOptions | None = None) -> MultiSolveResult:
    """Region-seeded multi-start: Picard conditioning, Newton, dedupe, classification."""
    opts = opts or SolveOptions()
    return solve_seeds(sys, region_seeds(ladder), opts, ladder)


# ------------------------------------------------------------------ radial form


@dataclass
class RadialProfile:
    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    du_dt: np.ndarray
    v: np.ndarray
    dv_dt: np.ndarray
    grad_u: np.ndarray
    grad_v: np.ndarray
    residual_u: np.ndarray
    residual_v: np.ndarray

    @property
    def residual_sup(self) -> float:
        return float(max(np.max(np.abs(self.residual_u)), np.max(np.abs(self.residual_v))))


def reconstruct_radial(sys: NonlinearSystem, sol: SolutionPair) -> RadialProfile:
    """Map a solution back to r in [R0, R1] and recheck -w'' - (n-1)/r w' = f there."""
    geom = sys.geom
    t = sol.u.t
    r, rp, rpp = geom.r(t), geom.rprime(t), geom.rsecond(t)
    out = {}
    for name, gf in (("u", sol.u), ("v", sol.v)):
        w_r = gf.derivs / rp
        w_tt = fd4_derivative(gf.derivs, gf.h)
        w_rr = (w_tt - w_r * rpp) / rp**2
        out[name] = (w_r, w_rr)
    grad_u, grad_v = np.abs(out["u"][0]), np.abs(out["v"][0])
    res = []
    for i, name in ((1, "u"), (2, "v")):
        w_r, w_rr = out[name]
        f = sys.f(i, r, sol.u.values, sol.v.values, grad_u, grad_v)
        res.append(-w_rr - (geom.n - 1) / r * w_r - f)
    return RadialProfile(t, r, sol.u.values, sol.u.derivs, sol.v.values, sol.v.derivs,
                         grad_u, grad_v, res[0], res[1])


CSV_HEADER = ("t", "r", "u", "du_dt", "v", "dv_dt", "grad_u", "grad_v")


def write_solution_csv(path: str | Path, profile: RadialProfile) -> None:
    cols = [profile.t, profile.r, profile.u, profile.du_dt, profile.v, profile.dv_dt,
            profile.grad_u, profile.grad_v]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in zip(*cols):
            writer.writerow([f"{x:.17g}" for x in row])
