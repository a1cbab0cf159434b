"""Measurement-count scaling laws and the sum-rate/capacity ratio.

Each function returns the number of measurements ``m`` named by a scaling
law (necessary or sufficient for reliable detection as n grows) in its full
form, smaller terms included. ``table_rows`` also gives the leading-term
forms. Logarithms are natural; rates are in nats.

Laws whose constant is not known (``C`` in the ML-sufficient and OMP laws)
take it as an argument that defaults to 1.
"""

from __future__ import annotations

import math

from .power import gamma_opt


def _check(n: float, lam: float, need_active: bool = False) -> None:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"activity must lie in (0, 1), got {lam}")
    if n * (1.0 - lam) <= 1.0:
        raise ValueError(f"need n*(1-lam) > 1 (n={n}, lam={lam})")
    if need_active and n * lam <= 1.0:
        raise ValueError(f"need n*lam > 1 (n={n}, lam={lam})")


def _check_snr(snr: float, mar: float = 1.0) -> None:
    if not snr > 0:
        raise ValueError("snr must be positive")
    if not 0.0 < mar <= 1.0:
        raise ValueError("mar must lie in (0, 1]")


def l_factor(lam: float, n: float) -> float:
    """``(sqrt(log(n(1-lam))) + sqrt(log(n lam)))**2``."""
    _check(n, lam, need_active=True)
    return (math.sqrt(math.log(n * (1.0 - lam))) + math.sqrt(math.log(n * lam))) ** 2


def ml_necessary_m(n, lam, snr, mar=1.0, delta=0.0) -> float:
    _check(n, lam)
    _check_snr(snr, mar)
    return (1.0 - delta) / (mar * snr) * lam * n * math.log(n * (1.0 - lam)) + lam * n


def ml_sufficient_m(n, lam, snr, mar=1.0, C=1.0) -> float:
    _check(n, lam)
    _check_snr(snr, mar)
    noise_term = lam * n * math.log(n * (1.0 - lam)) / (mar * snr)
    return C * max(noise_term, lam * n * math.log(1.0 / lam))


def sud_sufficient_m(n, lam, snr, mar=1.0, delta=0.0, simplified=False) -> float:
    """Single-user detection. ``simplified=True`` replaces the L factor by
    its upper bound ``4 log(n(1-lam))`` (valid for lam < 1/2)."""
    _check(n, lam)
    _check_snr(snr, mar)
    factor = 4.0 * math.log(n * (1.0 - lam)) if simplified else l_factor(lam, n)
    return (1.0 + delta) * factor * (1.0 + snr) / (snr * mar) * lam * n


def lasso_m(n, lam) -> float:
    _check(n, lam)
    return lam * n * math.log(n * (1.0 - lam)) + lam * n + 1.0


def omp_m(n, lam, C=1.0) -> float:
    _check(n, lam)
    return 2.0 * lam * n * math.log(n) + C * lam * n


def seqomp_m(n, lam, gamma, delta=0.0) -> float:
    """SeqOMP with any power profile whose minimum SINR is ``gamma``."""
    _check(n, lam)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return (1.0 + delta) * l_factor(lam, n) / gamma + lam * n


def seqomp_shaped_m(n, lam, snr, delta=0.0, simplified=False) -> float:
    """SeqOMP with exponential power shaping, using ``gamma ~ log(1+snr)/(lam n)``."""
    _check(n, lam)
    _check_snr(snr)
    factor = 4.0 * math.log(n * (1.0 - lam)) if simplified else l_factor(lam, n)
    return (1.0 + delta) * factor / math.log1p(snr) * lam * n + lam * n


def seqomp_exact_shaping_m(n, lam, snr, delta=0.0) -> float:
    """``seqomp_m`` evaluated at the exact exponential-profile SINR."""
    return seqomp_m(n, lam, gamma_opt(int(n), lam, snr), delta)


def binary_entropy(lam: float) -> float:
    """Binary entropy in nats."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie in (0, 1)")
    return -lam * math.log(lam) - (1.0 - lam) * math.log1p(-lam)


def sum_rate_ratio(n, lam, snr, m) -> tuple:
    """Sum rate ``R = n h(lam)``, coordinated capacity ``C = m log(1+snr)``
    (both nats) and ``R / C``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_snr(snr)
    rate = n * binary_entropy(lam)
    capacity = m * math.log1p(snr)
    return rate, capacity, rate / capacity


LAWS = ("ml_necessary", "ml_sufficient", "sud_sufficient", "lasso", "omp", "seqomp_shaped")


def table_rows(n, lam, snr, mar=1.0, delta=0.0, C=1.0) -> list:
    """One row per scaling law: ``(law, full, leading)``.

    ``full`` keeps every term; ``leading`` is the finite-SNR leading term.
    Lasso and OMP are only characterized at high SNR, so their leading term is
    the high-SNR one.
    """
    log_term = lam * n * math.log(n * (1.0 - lam))
    return [
        ("ml_necessary", ml_necessary_m(n, lam, snr, mar, delta), log_term / (mar * snr)),
        # already a max of two leading terms
        ("ml_sufficient", ml_sufficient_m(n, lam, snr, mar, C), ml_sufficient_m(n, lam, snr, mar, C)),
        ("sud_sufficient", sud_sufficient_m(n, lam, snr, mar, delta),
         4.0 * (1.0 + snr) / (mar * snr) * log_term),
        ("lasso", lasso_m(n, lam), log_term),
        ("omp", omp_m(n, lam, C), 2.0 * lam * n * math.log(n)),
        ("seqomp_shaped", seqomp_shaped_m(n, lam, snr, delta), 4.0 / math.log1p(snr) * log_term),
    ]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)
