"""Detection-threshold calibration.

For an idle user the correlation statistic ``rho`` is independent of ``y``
and follows the law of ``|<u, v>|^2`` for a uniformly random unit vector
``u`` in C^m: a Beta distribution with 2 and 2(m-1) chi-squared degrees of
freedom, i.e. the standard Beta(1, m - 1) with tail ``(1 - mu)**(m - 1)``.
For large m this is close to ``exp(-mu * m)``, which gives the usual
threshold rule ``mu = -log(pfa) / m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_FPMIN = 1e-300
_EPS = 1e-15


def _betacf(a: float, b: float, x: float, max_iter: int = 10_000) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for k in range(1, max_iter + 1):
        k2 = 2 * k
        aa = k * (b - k) * x / ((qam + k2) * (a + k2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + k) * (qab + k) * x / ((a + k2) * (qap + k2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def betainc_reg_upper(a: float, b: float, x: float) -> float:
    """``1 - I_x(a, b)`` without cancellation in the far tail."""
    return betainc_reg(b, a, 1.0 - x)


@dataclass(frozen=True)
class NullModel:
    """Law of the correlation statistic of an idle user with ``m`` dimensions.

    ``dof`` gives the chi-squared degrees of freedom (2, 2(m-1)); ``shape``
    the equivalent standard Beta shape parameters (1, m-1).
    """

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("the null model needs m >= 2")

    @property
    def dof(self) -> tuple:
        return (2, 2 * (self.m - 1))

    @property
    def shape(self) -> tuple:
        return (1.0, float(self.m - 1))

    def cdf(self, mu: float) -> float:
        return betainc_reg(*self.shape, mu)

    def sf(self, mu: float) -> float:
        return betainc_reg_upper(*self.shape, mu)


def null_tail(mu: float, m: int, mode: str = "exact") -> float:
    """False-alarm probability ``P(rho > mu)`` for an idle user.

    ``mode="exact"`` evaluates the Beta tail; ``mode="approx"`` returns
    ``exp(-mu * m)``.
    """
    if mode == "approx":
        return math.exp(-mu * m)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    return NullModel(m).sf(mu)


def threshold_from_pfa(pfa: float, m: int, mode: str = "approx", xtol: float = 1e-12) -> float:
    """Correlation threshold giving false-alarm probability ``pfa``.

    ``approx`` is ``-log(pfa) / m``; ``exact`` inverts the Beta tail by
    bisection to ``xtol``.
    """
    if not 0.0 < pfa < 1.0:
        raise ValueError(f"pfa must lie in (0, 1), got {pfa}")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if mode == "approx":
        approx = -math.log(pfa) / m
        if approx >= 1.0:
            raise ValueError(f"m={m} is too small for pfa={pfa}: threshold would be {approx:.3g} >= 1")
        return approx
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")

    model = NullModel(m)
    lo, hi = 0.0, 1.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if model.sf(mid) > pfa:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
