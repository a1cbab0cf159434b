"""Deterministic Monte Carlo estimation of missed-detection and false-alarm rates.

Every trial draws a fresh codebook and channel realization from seeds keyed
by ``(master_seed, m, trial_index, stream)``, so a trial's outcome does not
depend on which worker runs it or in what order. Per-m results are sums of
integer counts, which makes the aggregate independent of the worker count.
"""

from __future__ import annotations

import dataclasses
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import calibration, detectors, power
from .channel import Bernoulli, Deterministic, draw_instance, generate_codebook

log = logging.getLogger(__name__)

WORKERS_ENV = "ONOFF_MUD_WORKERS"

PROFILES = ("constant", "exponential", "robust")
DETECTORS = ("sud", "seqomp", "omp", "lasso", "ml")
ORDERS = ("descending", "natural", "ascending")
ACTIVITY_MODELS = ("bernoulli", "fixed")

_STREAM_CODEBOOK = 0
_STREAM_CHANNEL = 1
_STREAM_SUPPORT = 2

CSV_HEADER = "m,p_md,p_md_ci,p_fa,p_fa_ci,exact_rate,trials"


@dataclass(frozen=True)
class ExperimentSpec:
    """A Monte Carlo sweep over the number of measurements ``m``.

    ``activity="bernoulli"`` activates each user independently with
    probability ``activity_probability`` at the profile's power;
    ``activity="fixed"`` activates exactly ``k`` uniformly chosen users at
    equal power ``snr / k``.
    """

    n: int = 100
    activity_probability: float = 0.1
    snr: float = 100.0
    m_values: tuple = ()
    trials: int = 1000
    master_seed: int = 0
    profile: str = "constant"
    theta: float = 0.1
    detector: str = "sud"
    order: str = "descending"
    pfa: float = 1e-3
    threshold_mode: str = "approx"
    penalty: Optional[float] = None
    support_epsilon: Optional[float] = None
    activity: str = "bernoulli"
    k: int = 0
    noise: bool = True

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(m < 1 for m in self.m_values):
            raise ValueError("m values must be positive")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}, got {self.profile!r}")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.activity not in ACTIVITY_MODELS:
            raise ValueError(f"activity must be one of {ACTIVITY_MODELS}, got {self.activity!r}")
        if self.threshold_mode not in ("approx", "exact"):
            raise ValueError(f"threshold_mode must be 'approx' or 'exact', got {self.threshold_mode!r}")
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("pfa must lie in (0, 1)")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.activity == "fixed" and not 0 <= self.k <= self.n:
            raise ValueError("k must lie in [0, n]")
        if self.penalty is not None and not self.penalty > 0:
            raise ValueError("penalty must be positive")
        if self.activity == "bernoulli":
            # validates activity_probability and snr
            self.power_profile()
        elif not self.snr > 0:
            raise ValueError("snr must be positive")

    @classmethod
    def from_db(cls, snr_db: float, **kwargs) -> "ExperimentSpec":
        return cls(snr=10.0 ** (snr_db / 10.0), **kwargs)

    def power_profile(self) -> power.PowerProfile:
        args = (self.n, self.activity_probability, self.snr)
        if self.profile == "constant":
            return power.constant_profile(*args)
        if self.profile == "exponential":
            return power.exponential_profile(*args)
        return power.robust_profile(*args, self.theta)

    def detection_order(self, profile: Optional[power.PowerProfile]) -> np.ndarray:
        if self.order == "natural" or profile is None:
            return np.arange(self.n)
        # stable sort keeps natural order among equal powers
        order = np.argsort(-profile.powers, kind="stable")
        return order if self.order == "descending" else order[::-1]

    def threshold(self, m: int) -> float:
        return calibration.threshold_from_pfa(self.pfa, m, self.threshold_mode)


@dataclass(frozen=True)
class TrialCounts:
    md_count: int
    active_count: int
    fa_count: int
    inactive_count: int
    exact: bool


def trial_seed(master_seed: int, m: int, trial_index: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(m), int(trial_index), stream))


def _model(spec: ExperimentSpec, profile, trial_seq):
    if spec.activity == "bernoulli":
        return Bernoulli(profile)
    rng = np.random.default_rng(trial_seq)
    support = np.sort(rng.choice(spec.n, size=spec.k, replace=False))
    phase = rng.uniform(0.0, 2.0 * np.pi, spec.k)
    symbols = math.sqrt(spec.snr / spec.k) * np.exp(1j * phase) if spec.k else []
    return Deterministic(tuple(support), tuple(symbols))


def _lasso_penalty(spec: ExperimentSpec, m: int) -> float:
    if spec.penalty is not None:
        return spec.penalty
    # soft threshold at the noise-only level that an idle user exceeds w.p. pfa
    return 2.0 * math.sqrt(-math.log(spec.pfa) / m)


def _detect(spec, y, codebook, m, k_true, order):
    name = spec.detector
    if name == "sud":
        return detectors.sud_detect(y, codebook, spec.threshold(m))
    if name == "seqomp":
        return detectors.seqomp_detect(y, codebook, spec.threshold(m), order)
    if name == "omp":
        return detectors.omp_detect(y, codebook, threshold=spec.threshold(m))
    if name == "lasso":
        return detectors.lasso_detect(y, codebook, _lasso_penalty(spec, m), spec.support_epsilon)
    return detectors.ml_detect(y, codebook, min(k_true, m))


def _run_trial(spec, m, trial_index, profile, order) -> TrialCounts:
    codebook = generate_codebook(m, spec.n, trial_seed(spec.master_seed, m, trial_index, _STREAM_CODEBOOK))
    model = _model(spec, profile, trial_seed(spec.master_seed, m, trial_index, _STREAM_SUPPORT))
    inst = draw_instance(
        codebook, model, spec.noise, trial_seed(spec.master_seed, m, trial_index, _STREAM_CHANNEL)
    )
    truth = np.zeros(spec.n, dtype=bool)
    truth[inst.true_active] = True
    found = np.zeros(spec.n, dtype=bool)
    result = _detect(spec, inst.y, codebook, m, int(truth.sum()), order)
    found[result.active] = True
    return TrialCounts(
        md_count=int(np.sum(truth & ~found)),
        active_count=int(truth.sum()),
        fa_count=int(np.sum(found & ~truth)),
        inactive_count=int(np.sum(~truth)),
        exact=bool(np.array_equal(truth, found)),
    )


def _setup(spec):
    profile = spec.power_profile() if spec.activity == "bernoulli" else None
    return profile, spec.detection_order(profile)


def run_trial(spec: ExperimentSpec, m: int, trial_index: int) -> TrialCounts:
    """Run one trial: fresh codebook, fresh channel, one detection."""
    return _run_trial(spec, m, trial_index, *_setup(spec))


@dataclass
class MRow:
    m: int
    trials: int
    md_count: int
    active_count: int
    fa_count: int
    inactive_count: int
    exact_count: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def p_md(self) -> Optional[float]:
        return self.md_count / self.active_count if self.active_count else None

    @property
    def p_fa(self) -> Optional[float]:
        return self.fa_count / self.inactive_count if self.inactive_count else None

    @property
    def p_md_ci(self) -> Optional[float]:
        return wilson_half_width(self.md_count, self.active_count)

    @property
    def p_fa_ci(self) -> Optional[float]:
        return wilson_half_width(self.fa_count, self.inactive_count)

    @property
    def exact_rate(self) -> float:
        return self.exact_count / self.trials


def wilson_half_width(successes: int, total: int, z: float = 1.959963984540054) -> Optional[float]:
    """Half-width of the Wilson score interval (95% by default)."""
    if total == 0:
        return None
    p = successes / total
    z2 = z * z
    return z / (1.0 + z2 / total) * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total))


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054) -> tuple:
    p = successes / total
    z2 = z * z
    center = (p + z2 / (2.0 * total)) / (1.0 + z2 / total)
    half = wilson_half_width(successes, total, z)
    # the endpoints are exactly 0 and 1 at the extremes; pin them against rounding
    lo = 0.0 if successes == 0 else center - half
    hi = 1.0 if successes == total else center + half
    return lo, hi


@dataclass
class AggregateResult:
    spec: ExperimentSpec
    rows: list

    def row(self, m: int) -> MRow:
        for r in self.rows:
            if r.m == m:
                return r
        raise KeyError(m)

    def to_records(self) -> list:
        return [
            {
                "m": r.m,
                "p_md": r.p_md,
                "p_md_ci": r.p_md_ci,
                "p_fa": r.p_fa,
                "p_fa_ci": r.p_fa_ci,
                "exact_rate": r.exact_rate,
                "trials": r.trials,
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for rec in self.to_records():
            out.write(",".join(_fmt(v) for v in rec.values()) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"spec": dataclasses.asdict(self.spec), "rows": self.to_records()}, indent=2
        )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _run_chunk(args):
    spec, m, start, stop = args
    profile, order = _setup(spec)
    t0 = time.perf_counter()
    totals = np.zeros(5, dtype=np.int64)
    for t in range(start, stop):
        c = _run_trial(spec, m, t, profile, order)
        totals += (c.md_count, c.active_count, c.fa_count, c.inactive_count, c.exact)
    return m, totals, time.perf_counter() - t0


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return 1
    workers = int(value)
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1")
    return workers


def run_experiment(
    spec: ExperimentSpec, workers: Optional[int] = None, chunk_size: int = 100
) -> AggregateResult:
    """Run ``spec.trials`` trials at each m and aggregate the counts."""
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")
    tasks = [
        (spec, m, start, min(start + chunk_size, spec.trials))
        for m in spec.m_values
        for start in range(0, spec.trials, chunk_size)
    ]
    totals = {m: np.zeros(5, dtype=np.int64) for m in spec.m_values}
    elapsed = {m: 0.0 for m in spec.m_values}

    if workers == 1:
        outputs = map(_run_chunk, tasks)
        for m, counts, dt in outputs:
            totals[m] += counts
            elapsed[m] += dt
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for m, counts, dt in pool.map(_run_chunk, tasks):
                totals[m] += counts
                elapsed[m] += dt

    rows = []
    for m in spec.m_values:
        md, active, fa, inactive, exact = (int(v) for v in totals[m])
        row = MRow(m, spec.trials, md, active, fa, inactive, exact, elapsed[m])
        log.debug("m=%d p_md=%s p_fa=%s (%.1fs)", m, row.p_md, row.p_fa, row.elapsed)
        rows.append(row)
    return AggregateResult(spec, rows)


def find_crossing(result: AggregateResult, target_pmd: float) -> float:
    """Smallest m at which the missed-detection curve falls to ``target_pmd``.

    Interpolates linearly in ``log p_md`` between the bracketing grid points
    (linearly in ``p_md`` when the lower point is zero).
    """
    pts = sorted((r.m, r.p_md) for r in result.rows if r.p_md is not None)
    for i, (m0, p0) in enumerate(pts):
        if p0 == target_pmd:
            return float(m0)
        if i + 1 == len(pts):
            break
        m1, p1 = pts[i + 1]
        if p0 > target_pmd > p1:
            if p1 > 0:
                frac = (math.log(p0) - math.log(target_pmd)) / (math.log(p0) - math.log(p1))
            else:
                frac = (p0 - target_pmd) / (p0 - p1)
            return m0 + frac * (m1 - m0)
    raise ValueError(f"no pair of grid points brackets p_md = {target_pmd}")
