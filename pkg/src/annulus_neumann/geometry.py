"""Radial change of variables between an annulus R0 < |x| < R1 and [0, 1].

For n = 2 the map is logarithmic, r(t) = R1^(1-t) R0^t (decreasing in t);
for n >= 3 it is r(t) = (A / (B - t))^(1/(n-2)) (increasing in t).  The
weight d(t) turns the radial Laplacian into -w''(t) and equals r'(t)^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["AnnulusGeometry", "GeometryError"]


class GeometryError(ValueError):
    """Invalid annulus or an argument outside [0, 1]."""


def _check_unit(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise GeometryError(f"t must lie in [0, 1], got {t!r}")
    return arr


def _out(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class AnnulusGeometry:
    """Annulus {R0 < |x| < R1} in R^n together with its radial transform.

    All evaluation methods accept scalars or numpy arrays of t in [0, 1].
    """

    n: int
    r0: float
    r1: float
    _a: float = field(init=False, repr=False, compare=False)
    _b: float = field(init=False, repr=False, compare=False)
    _log_ratio: float = field(init=False, repr=False, compare=False)
    _gap: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise GeometryError(f"dimension n must be an integer >= 2, got {self.n!r}")
        r0, r1 = float(self.r0), float(self.r1)
        if not (math.isfinite(r0) and math.isfinite(r1)) or not 0.0 < r0 < r1:
            raise GeometryError(f"radii must satisfy 0 < r0 < r1 < inf, got r0={r0}, r1={r1}")
        if r1 - r0 < 1e-9 * r0:
            raise GeometryError("degenerate annulus: r1 - r0 below 1e-9 * r0")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "_log_ratio", math.log(r1 / r0))
        if self.n >= 3:
            k = self.n - 2
            gap = r1**k - r0**k
            object.__setattr__(self, "_a", (r0 * r1) ** k / gap)
            object.__setattr__(self, "_b", r1**k / gap)
            object.__setattr__(self, "_gap", gap)
        else:
            object.__setattr__(self, "_a", math.nan)
            object.__setattr__(self, "_b", math.nan)
            object.__setattr__(self, "_gap", math.nan)

    def _den(self, tt):
        # gap * (B - t) written as a sum of non-negative terms, free of cancellation near t = 1
        k = self.n - 2
        return self.r1**k * (1.0 - tt) + self.r0**k * tt

    @property
    def A(self) -> float:
        return self._a

    @property
    def B(self) -> float:
        return self._b

    def r(self, t):
        """Radius r(t)."""
        tt = _check_unit(t)
        if self.n == 2:
            res = self.r1 * np.exp(-tt * self._log_ratio)
        else:
            res = self.r0 * self.r1 / self._den(tt) ** (1.0 / (self.n - 2))
        return _out(res, t)

    def rprime(self, t):
        """Signed derivative dr/dt; negative for n = 2, positive for n >= 3."""
        tt = _check_unit(t)
        if self.n == 2:
            res = -self.r1 * np.exp(-tt * self._log_ratio) * self._log_ratio
        else:
            k = self.n - 2
            den = self._den(tt)
            res = self.r0 * self.r1 * self._gap / (k * den ** (1.0 + 1.0 / k))
        return _out(res, t)

    def rsecond(self, t):
        """Second derivative d^2r/dt^2, which equals (n-1) r'(t)^2 / r(t)."""
        tt = _check_unit(t)
        if self.n == 2:
            res = self.r1 * np.exp(-tt * self._log_ratio) * self._log_ratio**2
        else:
            k = self.n - 2
            den = self._den(tt)
            res = self.r0 * self.r1 * (k + 1) * self._gap**2 / (k * k * den ** (2.0 + 1.0 / k))
        return _out(res, t)

    def d(self, t):
        """Weight d(t) multiplying f in -w''(t) = d(t) f(...)."""
        tt = _check_unit(t)
        if self.n == 2:
            res = (self.r1 * np.exp(-tt * self._log_ratio)) ** 2 * self._log_ratio**2
        else:
            k = self.n - 2
            num = (self.r0 * self.r1 * self._gap / k) ** 2
            res = num / self._den(tt) ** (2.0 * (k + 1) / k)
        return _out(res, t)

    def t_of_r(self, r):
        """Inverse map r -> t."""
        rr = np.asarray(r, dtype=float)
        if np.any(rr < self.r0 * (1 - 1e-12)) or np.any(rr > self.r1 * (1 + 1e-12)):
            raise GeometryError(f"r must lie in [{self.r0}, {self.r1}]")
        if self.n == 2:
            res = np.log(self.r1 / rr) / self._log_ratio
        else:
            res = self._b - self._a / rr ** (self.n - 2)
        return _out(np.clip(res, 0.0, 1.0), r)

    def d_extrema(self) -> tuple[float, float]:
        """(inf d, sup d) over [0, 1]; d is monotone so the endpoints suffice."""
        d0, d1 = self.d(0.0), self.d(1.0)
        return min(d0, d1), max(d0, d1)

    def alpha(self) -> float:
        """inf |r'(t)| over [0, 1], attained at an endpoint."""
        return min(abs(self.rprime(0.0)), abs(self.rprime(1.0)))
