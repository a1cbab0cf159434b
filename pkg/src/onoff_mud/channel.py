"""Random codebooks, activity models and channel realizations.

The received vector is ``y = A x + w`` where ``A`` is an ``m x n`` codebook
with i.i.d. CN(0, 1/m) entries, ``x`` the modulation vector (zero for idle
users) and ``w`` CN(0, I/m) noise. User indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .power import PowerProfile

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a PCG64 generator for an int, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def complex_normal(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with E|z|^2 = variance."""
    parts = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    parts *= np.sqrt(variance / 2.0)
    return parts[..., 0] + 1j * parts[..., 1]


def generate_codebook(m: int, n: int, seed: SeedLike) -> np.ndarray:
    """Draw an ``m x n`` codebook with i.i.d. CN(0, 1/m) entries.

    Columns are the users' codewords, so ``E||a_j||^2 = 1``.
    """
    if m < 1 or n < 1:
        raise ValueError(f"codebook dimensions must be positive, got m={m}, n={n}")
    return complex_normal(make_rng(seed), (m, n), 1.0 / m)


@dataclass(frozen=True)
class Deterministic:
    """Fixed active set with given complex symbols."""

    support: tuple
    symbols: tuple

    def __post_init__(self):
        support = tuple(int(j) for j in self.support)
        symbols = tuple(complex(s) for s in self.symbols)
        if len(support) != len(symbols):
            raise ValueError("support and symbols must have the same length")
        if len(set(support)) != len(support):
            raise ValueError("support indices must be distinct")
        if any(s == 0 for s in symbols):
            raise ValueError("symbols must be nonzero on the support")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "symbols", symbols)

    def check(self, n: int) -> None:
        if any(j < 0 or j >= n for j in self.support):
            raise ValueError(f"support indices must lie in [0, {n})")


@dataclass(frozen=True)
class Bernoulli:
    """Each user independently active with the profile's activity probability.

    An active user ``j`` sends ``sqrt(p_j) * exp(i*phi)`` with a uniform phase.
    """

    profile: PowerProfile

    @property
    def activity_probability(self) -> float:
        return self.profile.activity_probability

    def check(self, n: int) -> None:
        if self.profile.n != n:
            raise ValueError(
                f"profile has {self.profile.n} users but the codebook has {n}"
            )


ActivityModel = Union[Deterministic, Bernoulli]


@dataclass(frozen=True)
class ChannelInstance:
    codebook: np.ndarray
    x: np.ndarray
    w: np.ndarray
    y: np.ndarray
    true_active: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.codebook.shape[0]

    @property
    def n(self) -> int:
        return self.codebook.shape[1]


def draw_instance(
    codebook: np.ndarray,
    model: ActivityModel,
    noise_on: bool = True,
    seed: SeedLike = 0,
) -> ChannelInstance:
    """Realize ``x`` from the activity model, add noise and form ``y``."""
    m, n = codebook.shape
    model.check(n)
    rng = make_rng(seed)

    x = np.zeros(n, dtype=complex)
    if isinstance(model, Deterministic):
        if model.support:
            x[list(model.support)] = model.symbols
    elif isinstance(model, Bernoulli):
        active = rng.random(n) < model.activity_probability
        phase = rng.uniform(0.0, 2.0 * np.pi, n)
        amp = np.sqrt(model.profile.powers)
        x = np.where(active, amp * np.exp(1j * phase), 0.0).astype(complex)
    else:
        raise TypeError(f"unknown activity model {type(model).__name__}")

    if noise_on:
        w = complex_normal(rng, m, 1.0 / m)
    else:
        w = np.zeros(m, dtype=complex)
    y = codebook @ x + w
    return ChannelInstance(codebook, x, w, y, np.flatnonzero(x))


def snr_of(x: np.ndarray) -> float:
    """Conditional SNR ``||x||^2`` (noise power normalized to one)."""
    x = np.asarray(x)
    return float(np.vdot(x, x).real)


def _active_powers(x: np.ndarray) -> np.ndarray:
    power = np.abs(np.asarray(x)) ** 2
    power = power[power > 0]
    if power.size == 0:
        raise ValueError("x has no active entries")
    return power


def mar_of(x: np.ndarray) -> float:
    """Minimum-to-average ratio of the active receive powers."""
    power = _active_powers(x)
    return float(power.min() / power.mean())


def snr_min_of(x: np.ndarray) -> float:
    """Receive power of the weakest active user."""
    return float(_active_powers(x).min())
