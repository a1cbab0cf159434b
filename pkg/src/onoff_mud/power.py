"""Receive power profiles for sequential detection.

A profile holds the conditional receive power ``p_j`` of each user (power
given the user is active), indexed in detection order. All profiles satisfy
the total average SNR constraint ``lam * sum(p) == snr``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _check_args(n: int, lam: float, snr: float) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"activity probability must lie in (0, 1), got {lam}")
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")


@dataclass(frozen=True, eq=False)
class PowerProfile:
    powers: np.ndarray
    activity_probability: float
    total_snr: float

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=float)
        if powers.ndim != 1 or powers.size == 0:
            raise ValueError("powers must be a nonempty 1-D array")
        if np.any(powers <= 0):
            raise ValueError("all powers must be positive")
        _check_args(powers.size, self.activity_probability, self.total_snr)
        implied = self.activity_probability * powers.sum()
        if abs(implied - self.total_snr) > 1e-9 * self.total_snr:
            raise ValueError(
                f"lam * sum(p) = {implied!r} does not match snr = {self.total_snr!r}"
            )
        powers.flags.writeable = False
        object.__setattr__(self, "powers", powers)

    @property
    def n(self) -> int:
        return self.powers.size

    def interference(self) -> np.ndarray:
        """Average interference-plus-noise seen by each user.

        Entry ``l`` is ``1 + lam * sum_{j > l} p_j``, i.e. what user ``l`` sees
        when every earlier user has been cancelled perfectly.
        """
        tail = np.cumsum(self.powers[::-1])[::-1]
        later = np.append(tail[1:], 0.0)
        return 1.0 + self.activity_probability * later

    def to_csv(self) -> str:
        """Two-column CSV ``index,power`` with 1-based detection-order indices."""
        lines = ["index,power"]
        lines += [f"{j + 1},{p!r}" for j, p in enumerate(self.powers.tolist())]
        return "\n".join(lines) + "\n"


def constant_profile(n: int, lam: float, snr: float) -> PowerProfile:
    """Equal receive power ``snr / (lam * n)`` for every user."""
    _check_args(n, lam, snr)
    return PowerProfile(np.full(n, snr / (lam * n)), lam, snr)


def gamma_const(n: int, lam: float, snr: float) -> float:
    """Minimum SINR of the constant profile."""
    return snr / (lam * (n + (n - 1) * snr))


def _log_leak_ratio(snr: float, theta: float) -> float:
    # log((1 + snr) / (1 + theta*snr)) without cancellation as theta -> 1
    return float(np.log1p((1.0 - theta) * snr / (1.0 + theta * snr)))


def gamma_robust(n: int, lam: float, snr: float, theta: float = 0.0) -> float:
    """Optimal minimum SINR when a fraction ``theta`` of cancelled energy leaks.

    Exact solution of the leakage fixed point together with the total SNR
    constraint. ``theta = 0`` gives ``gamma_opt`` and ``theta = 1`` the
    constant-profile SINR.
    """
    _check_args(n, lam, snr)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"leakage fraction must lie in [0, 1], got {theta}")
    if theta == 1.0:
        return gamma_const(n, lam, snr)
    # r - 1 where r**n == (1 + snr) / (1 + theta*snr)
    growth = np.expm1(_log_leak_ratio(snr, theta) / n)
    return float(growth / (lam * ((1.0 - theta) - theta * growth)))


def gamma_opt(n: int, lam: float, snr: float) -> float:
    """Largest achievable minimum SINR, ``((1 + snr)^(1/n) - 1) / lam``."""
    return gamma_robust(n, lam, snr, 0.0)


def exponential_profile(n: int, lam: float, snr: float) -> PowerProfile:
    """SINR-maximizing profile ``p_l = g * (1 + lam*g)^(n - l)``.

    Every user sees exactly the same SINR ``g = gamma_opt`` after perfect
    cancellation of the earlier (stronger) users.
    """
    return robust_profile(n, lam, snr, 0.0)


def robust_profile(n: int, lam: float, snr: float, theta: float) -> PowerProfile:
    """Power profile that stays optimal when ``theta`` of cancelled power leaks.

    Solves ``p_l = g * (1 + theta*lam*sum_{j<l} p_j + lam*sum_{j>l} p_j)``
    jointly with ``lam * sum(p) = snr``. The solution is geometric,
    ``p_l = p_n * r**(n - l)`` with ``r**n = (1 + snr) / (1 + theta*snr)`` and
    ``p_n = g * (1 + theta*snr) / (1 + lam*theta*g)``.
    ``theta = 1`` returns the constant profile.
    """
    g = gamma_robust(n, lam, snr, theta)
    if theta == 1.0:
        return constant_profile(n, lam, snr)
    last = g * (1.0 + theta * snr) / (1.0 + lam * theta * g)
    log_r = _log_leak_ratio(snr, theta) / n
    powers = last * np.exp(np.arange(n - 1, -1, -1) * log_r)
    return PowerProfile(powers, lam, snr)


def min_sinr(profile: PowerProfile) -> float:
    """Minimum over users of ``p_l / (1 + lam * sum_{j > l} p_j)``."""
    return float(np.min(profile.powers / profile.interference()))


def technical_condition(profile: PowerProfile) -> float:
    """``max_{i < n} log(n) * sum_{j > i} p_j^2 / sigma_i^4``.

    Reported as a raw number; it only has meaning as ``n`` grows.
    """
    n = profile.n
    if n < 2:
        raise ValueError("the technical condition needs n >= 2")
    sq_tail = np.cumsum((profile.powers**2)[::-1])[::-1][1:]
    sigma2 = profile.interference()[:-1]
    return float(np.log(n) * np.max(sq_tail / sigma2**2))
