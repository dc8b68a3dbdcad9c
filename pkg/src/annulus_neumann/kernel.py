"""Green's kernel of -w'' + omega^2 w on [0, 1] with w'(0) = w'(1) = 0.

    k(t, s) = cosh(omega (1 - max(t, s))) cosh(omega min(t, s)) / (omega sinh omega)

Every constant used by the existence theorems has a closed form here;
quadrature only appears in the tests as a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["KernelConstants", "KernelError", "ShiftedKernel"]

OMEGA_MAX = 50.0


class KernelError(ValueError):
    pass


def _unit(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise KernelError(f"{name} must lie in [0, 1], got {x!r}")
    return arr


def _out(arr, *like):
    if all(np.ndim(x) == 0 for x in like):
        return float(arr)
    return arr


@dataclass(frozen=True)
class KernelConstants:
    m: float
    big_m: float
    m_star: float
    c_k: float
    c: float

    def as_dict(self) -> dict[str, float]:
        return {"m": self.m, "M": self.big_m, "m_star": self.m_star, "c_k": self.c_k, "c": self.c}


@dataclass(frozen=True)
class ShiftedKernel:
    omega: float

    def __post_init__(self) -> None:
        w = float(self.omega)
        if not math.isfinite(w) or w <= 0.0:
            raise KernelError(f"omega must be positive, got {self.omega!r}")
        if w > OMEGA_MAX:
            raise KernelError(f"omega > {OMEGA_MAX} makes the kernel numerically degenerate")
        object.__setattr__(self, "omega", w)

    @property
    def sinh_omega(self) -> float:
        return math.sinh(self.omega)

    @property
    def cosh_omega(self) -> float:
        return math.cosh(self.omega)

    def k(self, t, s):
        tt, ss = _unit(t, "t"), _unit(s, "s")
        w = self.omega
        hi, lo = np.maximum(tt, ss), np.minimum(tt, ss)
        res = np.cosh(w * (1.0 - hi)) * np.cosh(w * lo) / (w * self.sinh_omega)
        return _out(res, t, s)

    def dk_dt(self, t, s):
        """Partial derivative in t; on the diagonal t = s the s > t branch is used."""
        tt, ss = _unit(t, "t"), _unit(s, "s")
        w = self.omega
        below = -np.cosh(w * ss) * np.sinh(w * (1.0 - tt))
        above = np.cosh(w * (1.0 - ss)) * np.sinh(w * tt)
        res = np.where(ss < tt, below, above) / self.sinh_omega
        return _out(res, t, s)

    def phi(self, s):
        """sup_t k(t, s) = k(s, s)."""
        ss = _unit(s, "s")
        w = self.omega
        res = np.cosh(w * (1.0 - ss)) * np.cosh(w * ss) / (w * self.sinh_omega)
        return _out(res, s)

    def constants(self) -> KernelConstants:
        w = self.omega
        m_star = w * math.sinh(w) / (2.0 * math.sinh(w / 2.0) ** 2)
        c_k = 1.0 / math.cosh(w)
        return KernelConstants(m=w * w, big_m=w * w, m_star=m_star, c_k=c_k, c=c_k * min(1.0, 1.0 / w))

    def row_integral(self, t):
        """Integral of k(t, s) over s in [0, 1] (equal to 1/omega^2 for every t)."""
        tt = _unit(t, "t")
        w = self.omega
        # s <= t: cosh(w(1-t)) * int_0^t cosh(ws) ds;  s >= t: cosh(wt) * int_t^1 cosh(w(1-s)) ds
        left = np.cosh(w * (1.0 - tt)) * np.sinh(w * tt) / w
        right = np.cosh(w * tt) * np.sinh(w * (1.0 - tt)) / w
        return _out((left + right) / (w * self.sinh_omega), t)

    def abs_deriv_row_integral(self, t):
        """Integral of |dk/dt (t, s)| over s in [0, 1]."""
        tt = _unit(t, "t")
        w = self.omega
        left = np.sinh(w * (1.0 - tt)) * np.sinh(w * tt) / w
        right = np.sinh(w * tt) * np.sinh(w * (1.0 - tt)) / w
        return _out((left + right) / self.sinh_omega, t)
