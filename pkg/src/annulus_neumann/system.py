"""The shifted system on [0, 1] induced by two nonlinearities and a geometry.

    g_i(t, u, v, p, q) = d(t) f_i(r(t), u, v, p/|r'(t)|, q/|r'(t)|) + omega_i^2 w_i

with w_1 = u, w_2 = v.  Condition (H) asks that f_i >= -omega_i^2 w_i / sup d,
which makes every g_i non-negative; ``check_H`` tests it on a finite box.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import Expr, evaluate, parse, to_source
from .geometry import AnnulusGeometry
from .kernel import KernelConstants, ShiftedKernel

__all__ = ["HComponentResult", "HReport", "NonlinearSystem", "check_H"]

EXAMPLE_F1 = "exp(-(gu^2+gv^2+6))*u*(u-1-r^2/333)*(u-2-r^2/333)*(u-4-r^2/333)*(2-cos(v))"
EXAMPLE_F2 = "exp(-(gu^2+gv^2+7))*v*(v-1-r^2/333)*(v-4-r^2/333)*(v-7-r^2/333)*(2-sin(u))"


@dataclass(frozen=True)
class NonlinearSystem:
    f1: Expr
    f2: Expr
    omega1: float
    omega2: float
    geom: AnnulusGeometry
    kernels: tuple[ShiftedKernel, ShiftedKernel] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernels", (ShiftedKernel(self.omega1), ShiftedKernel(self.omega2)))
        object.__setattr__(self, "omega1", self.kernels[0].omega)
        object.__setattr__(self, "omega2", self.kernels[1].omega)

    @classmethod
    def from_strings(cls, f1: str, f2: str, omega1: float, omega2: float,
                     geom: AnnulusGeometry) -> "NonlinearSystem":
        return cls(parse(f1), parse(f2), omega1, omega2, geom)

    @classmethod
    def builtin_example(cls, omega: float = 1.0) -> "NonlinearSystem":
        return cls.from_strings(EXAMPLE_F1, EXAMPLE_F2, omega, omega, AnnulusGeometry(2, 1.0, float(np.e)))

    @property
    def omegas(self) -> tuple[float, float]:
        return self.omega1, self.omega2

    def constants(self) -> tuple[KernelConstants, KernelConstants]:
        return self.kernels[0].constants(), self.kernels[1].constants()

    def cone_constants(self) -> tuple[float, float]:
        c1, c2 = self.constants()
        return c1.c, c2.c

    def f(self, i: int, r, u, v, gu, gv):
        return evaluate(self._expr(i), r, u, v, gu, gv)

    def g(self, i: int, t, u, v, p, q):
        """Shifted right-hand side g_i; p and q are |u'(t)| and |v'(t)|."""
        expr = self._expr(i)
        geom = self.geom
        speed = np.abs(geom.rprime(t))
        fval = evaluate(expr, geom.r(t), u, v, np.abs(p) / speed, np.abs(q) / speed)
        w = u if i == 1 else v
        omega = self.omega1 if i == 1 else self.omega2
        return geom.d(t) * fval + omega**2 * w

    def _expr(self, i: int) -> Expr:
        if i == 1:
            return self.f1
        if i == 2:
            return self.f2
        raise ValueError(f"component index must be 1 or 2, got {i!r}")

    def describe(self) -> dict:
        return {
            "f1": to_source(self.f1), "f2": to_source(self.f2),
            "omega1": self.omega1, "omega2": self.omega2,
            "n": self.geom.n, "r0": self.geom.r0, "r1": self.geom.r1,
        }


@dataclass
class HComponentResult:
    i: int
    passed: bool
    worst_margin: float
    witness: tuple[float, float, float, float, float]
    samples: int


@dataclass
class HReport:
    passed: bool
    z_bound: float
    density: int
    components: list[HComponentResult]

    def as_dict(self) -> dict:
        return {
            "condition": "H",
            "verdict": "PASS" if self.passed else "FAIL",
            "z_bound": self.z_bound,
            "density": self.density,
            "certified": False,
            "components": [
                {"i": c.i, "verdict": "PASS" if c.passed else "FAIL", "worst_margin": c.worst_margin,
                 "witness": list(c.witness), "samples": c.samples}
                for c in self.components
            ],
        }


def check_H(sys: NonlinearSystem, sample_density: int = 17, z_bound: float = 10.0,
            tol: float = 1e-12) -> HReport:
    """Sample f_i + omega_i^2 w_i / sup d >= 0 on [R0, R1] x [0, z_bound]^4.

    A sampled check only: (H) is a statement about the whole quadrant.
    """
    if sample_density < 2:
        raise ValueError("sample_density must be >= 2")
    if not z_bound > 0:
        raise ValueError("z_bound must be positive")
    geom = sys.geom
    _, sup_d = geom.d_extrema()
    rs = np.linspace(geom.r0, geom.r1, sample_density)
    zs = np.linspace(0.0, z_bound, sample_density)
    w1, w2, z1, z2 = np.meshgrid(zs, zs, zs, zs, indexing="ij")
    w1, w2, z1, z2 = (a.ravel() for a in (w1, w2, z1, z2))
    results = []
    for i, omega in ((1, sys.omega1), (2, sys.omega2)):
        best, witness = np.inf, None
        wi = w1 if i == 1 else w2
        for r in rs:
            vals = sys.f(i, np.full_like(w1, r), w1, w2, z1, z2)
            margin = vals + omega**2 * wi / sup_d
            k = int(np.argmin(margin))
            if margin[k] < best:
                best = float(margin[k])
                witness = (float(r), float(w1[k]), float(w2[k]), float(z1[k]), float(z2[k]))
        results.append(HComponentResult(i, best >= -tol, best, witness, sample_density**5))
    return HReport(all(c.passed for c in results), float(z_bound), sample_density, results)

