"""Active-user detectors.

Every detector takes the received vector ``y`` and the codebook ``A`` and
returns a :class:`DetectionResult` whose ``active`` field is the sorted array
of detected (0-based) user indices.

The correlation statistic shared by the threshold detectors is

    rho(j) = |a_j' P y|^2 / (||P a_j||^2 ||P y||^2)

where ``P`` projects onto the orthogonal complement of the codewords
detected so far (``P = I`` for single-user detection). It always lies in
[0, 1]. Degenerate projections (``P y = 0`` or ``P a_j = 0``) give
``rho = 0`` instead of raising, so Monte Carlo loops never abort.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# relative squared-norm level below which a projected vector counts as zero
_DEGENERATE = 1e-20

ML_MAX_SUBSETS = 10**6


@dataclass
class DetectionResult:
    active: np.ndarray
    statistics: np.ndarray
    iterations: int = 0
    converged: bool = True
    estimate: Optional[np.ndarray] = None
    objective: Optional[float] = None
    history: Optional[np.ndarray] = None

    def __post_init__(self):
        self.active = np.sort(np.asarray(self.active, dtype=np.intp))

    @property
    def active_set(self) -> frozenset:
        return frozenset(self.active.tolist())


class OrthoBasis:
    """Orthonormal basis grown one vector at a time (classical Gram-Schmidt
    with one re-orthogonalization pass)."""

    def __init__(self, m: int, capacity: Optional[int] = None):
        self.m = m
        self._q = np.zeros((m, capacity or m), dtype=complex)
        self.size = 0

    @property
    def vectors(self) -> np.ndarray:
        return self._q[:, : self.size]

    def project(self, v: np.ndarray) -> np.ndarray:
        """Component of ``v`` (vector or matrix of columns) orthogonal to the span."""
        if self.size == 0:
            return np.array(v, dtype=complex, copy=True)
        q = self.vectors
        return v - q @ (q.conj().T @ v)

    def add(self, v: np.ndarray, tol: float = 1e-10) -> bool:
        """Append the normalized residual of ``v``; False if ``v`` is in the span."""
        if self.size == self.m:
            return False
        scale = np.linalg.norm(v)
        u = self.project(self.project(v))
        norm = np.linalg.norm(u)
        if scale == 0 or norm <= tol * scale:
            return False
        if self.size == self._q.shape[1]:
            self._q = np.hstack([self._q, np.zeros_like(self._q)])
        self._q[:, self.size] = u / norm
        self.size += 1
        return True


def _correlations(pa: np.ndarray, pa_norm2, r: np.ndarray, r_norm2, col_norm2):
    inner = pa.conj().T @ r if pa.ndim == 2 else np.vdot(pa, r)
    valid = pa_norm2 > _DEGENERATE * col_norm2
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.abs(inner) ** 2 / (pa_norm2 * r_norm2)
    rho = np.where(valid, rho, 0.0)
    return np.clip(rho, 0.0, 1.0)


def sud_detect(y: np.ndarray, codebook: np.ndarray, mu: float) -> DetectionResult:
    """Single-user detection: threshold the plain correlation of each codeword with y."""
    y = np.asarray(y)
    col_norm2 = np.sum(np.abs(codebook) ** 2, axis=0)
    y_norm2 = float(np.vdot(y, y).real)
    if y_norm2 == 0.0:
        return DetectionResult(np.empty(0, dtype=np.intp), np.zeros(codebook.shape[1]))
    rho = _correlations(codebook, col_norm2, y, y_norm2, col_norm2)
    return DetectionResult(np.flatnonzero(rho > mu), rho)


def _check_order(order, n: int) -> np.ndarray:
    if order is None:
        return np.arange(n)
    order = np.asarray(order, dtype=np.intp)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order must be a permutation of range(n)")
    return order


def seqomp_detect(
    y: np.ndarray,
    codebook: np.ndarray,
    mu: float,
    order: Optional[Sequence[int]] = None,
) -> DetectionResult:
    """Sequential OMP: one pass over the users in ``order``.

    User ``order[t]`` is accepted when its correlation with the residual,
    both projected away from the already-accepted codewords, exceeds ``mu``.
    Statistics are reported in natural index order.
    """
    y = np.asarray(y, dtype=complex)
    m, n = codebook.shape
    order = _check_order(order, n)
    col_norm2 = np.sum(np.abs(codebook) ** 2, axis=0)
    y_norm2 = float(np.vdot(y, y).real)

    stats = np.zeros(n)
    accepted = []
    basis = OrthoBasis(m, capacity=min(m, 32))
    r = y.copy()
    pos = 0
    # Between acceptances the projector is fixed, so the statistics of the
    # remaining users are evaluated as one block and scanned for the first hit.
    while pos < n and basis.size < m:
        r_norm2 = float(np.vdot(r, r).real)
        if y_norm2 == 0.0 or r_norm2 <= _DEGENERATE * y_norm2:
            break
        idx = order[pos:]
        pa = basis.project(codebook[:, idx])
        pa_norm2 = np.sum(np.abs(pa) ** 2, axis=0)
        rho = _correlations(pa, pa_norm2, r, r_norm2, col_norm2[idx])
        hits = np.flatnonzero(rho > mu)
        if hits.size == 0:
            stats[idx] = rho
            break
        h = hits[0]
        stats[idx[: h + 1]] = rho[: h + 1]
        j = idx[h]
        accepted.append(j)
        basis.add(codebook[:, j])
        r = basis.project(y)
        pos += h + 1
    return DetectionResult(np.array(accepted, dtype=np.intp), stats, iterations=len(accepted))


def omp_detect(
    y: np.ndarray,
    codebook: np.ndarray,
    *,
    threshold: Optional[float] = None,
    k: Optional[int] = None,
    max_iters: Optional[int] = None,
) -> DetectionResult:
    """Orthogonal matching pursuit with a threshold, known-sparsity or
    iteration-count stopping rule (any combination; the first to trigger wins).

    Each iteration picks the unselected user with the largest projected
    correlation ``rho``; with ``threshold`` set, it stops once that maximum is
    ``<= threshold``.
    """
    if threshold is None and k is None and max_iters is None:
        raise ValueError("omp_detect needs threshold, k or max_iters")
    y = np.asarray(y, dtype=complex)
    m, n = codebook.shape
    limit = min(m, n)
    if k is not None:
        if k < 0:
            raise ValueError("k must be nonnegative")
        limit = min(limit, k)
    if max_iters is not None:
        limit = min(limit, max_iters)

    col_norm2 = np.sum(np.abs(codebook) ** 2, axis=0)
    pa_norm2 = col_norm2.copy()
    y_norm2 = float(np.vdot(y, y).real)
    stats = np.zeros(n)
    selected = np.zeros(n, dtype=bool)
    order = []
    basis = OrthoBasis(m, capacity=max(limit, 1))
    r = y.copy()
    iterations = 0
    while len(order) < limit:
        r_norm2 = float(np.vdot(r, r).real)
        if y_norm2 == 0.0 or r_norm2 <= _DEGENERATE * y_norm2:
            stats[~selected] = 0.0
            break
        iterations += 1
        # a_j' P y == a_j' r because r = P y already lies in the complement
        rho = _correlations(codebook, pa_norm2, r, r_norm2, col_norm2)
        stats[~selected] = rho[~selected]
        j = int(np.argmax(np.where(selected, -1.0, rho)))
        if threshold is not None and rho[j] <= threshold:
            break
        if not basis.add(codebook[:, j]):
            break
        selected[j] = True
        order.append(j)
        q = basis.vectors[:, -1]
        pa_norm2 = np.maximum(pa_norm2 - np.abs(q.conj() @ codebook) ** 2, 0.0)
        r = r - q * np.vdot(q, r)
    return DetectionResult(np.array(order, dtype=np.intp), stats, iterations=iterations)


def soft_threshold(z: np.ndarray, tau: float) -> np.ndarray:
    """Complex soft-thresholding: shrink each magnitude by ``tau``, keep phase."""
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > tau, 1.0 - tau / mag, 0.0)
    return z * scale


def spectral_norm_sq(a: np.ndarray, iters: int = 20) -> float:
    """Power-iteration estimate of the largest eigenvalue of ``A' A``."""
    v = np.ones(a.shape[1], dtype=complex) / np.sqrt(a.shape[1])
    est = 0.0
    for _ in range(iters):
        w = a.conj().T @ (a @ v)
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        v = w / est
    return est


def lasso_objective(y, codebook, x, penalty) -> float:
    resid = y - codebook @ x
    return float(np.vdot(resid, resid).real + penalty * np.sum(np.abs(x)))


def lasso_detect(
    y: np.ndarray,
    codebook: np.ndarray,
    penalty: float,
    support_epsilon: Optional[float] = None,
    *,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    keep_history: bool = False,
) -> DetectionResult:
    """Complex lasso ``min ||y - A x||^2 + penalty * ||x||_1`` by proximal gradient.

    The support is ``{j : |x_j| > support_epsilon}``; the default epsilon is
    ``1e-6 * max|x|``. Iteration stops when the prox-gradient step changes
    ``x`` by less than ``tol`` relative to ``||x||``.
    """
    if not penalty > 0:
        raise ValueError("penalty must be positive")
    y = np.asarray(y, dtype=complex)
    n = codebook.shape[1]
    lip = 2.0 * 1.1 * spectral_norm_sq(codebook)
    x = np.zeros(n, dtype=complex)
    history = [lasso_objective(y, codebook, x, penalty)] if keep_history else None
    converged = False
    it = 0
    if lip == 0.0:
        converged = True
    else:
        for it in range(1, max_iter + 1):
            grad = -2.0 * (codebook.conj().T @ (y - codebook @ x))
            x_new = soft_threshold(x - grad / lip, penalty / lip)
            step = np.linalg.norm(x_new - x)
            x = x_new
            if keep_history:
                history.append(lasso_objective(y, codebook, x, penalty))
            if step <= tol * max(np.linalg.norm(x), np.finfo(float).tiny):
                converged = True
                break

    mag = np.abs(x)
    if support_epsilon is None:
        support_epsilon = 1e-6 * mag.max() if mag.size else 0.0
    active = np.flatnonzero(mag > support_epsilon)
    return DetectionResult(
        active,
        mag,
        iterations=it,
        converged=converged,
        estimate=x,
        objective=lasso_objective(y, codebook, x, penalty),
        history=None if history is None else np.array(history),
    )


def subspace_energy(y: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """``||proj(y)||^2`` onto the span of each stacked column set.

    ``columns`` has shape ``(..., m, k)``.
    """
    q, _ = np.linalg.qr(columns)
    coeff = np.einsum("...mk,m->...k", q.conj(), y)
    return np.sum(np.abs(coeff) ** 2, axis=-1)


def ml_detect(y: np.ndarray, codebook: np.ndarray, k: int, chunk: int = 4096) -> DetectionResult:
    """Exhaustive ML: the k-subset whose span captures the most energy of ``y``.

    Ties go to the lexicographically smallest subset.
    """
    y = np.asarray(y, dtype=complex)
    m, n = codebook.shape
    nan_stats = np.full(n, np.nan)
    if k == 0:
        return DetectionResult(np.empty(0, dtype=np.intp), nan_stats, objective=0.0)
    if k < 0 or k > m or k > n:
        raise ValueError(f"need 0 <= k <= min(m, n), got k={k}")
    total = math.comb(n, k)
    if total > ML_MAX_SUBSETS:
        raise ValueError(f"C({n}, {k}) = {total} subsets exceeds the {ML_MAX_SUBSETS} limit")

    best_energy = -np.inf
    best = None
    subsets = itertools.combinations(range(n), k)
    while True:
        block = np.array(list(itertools.islice(subsets, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        cols = np.transpose(codebook[:, block], (1, 0, 2))
        energy = subspace_energy(y, cols)
        i = int(np.argmax(energy))
        if energy[i] > best_energy:
            best_energy = float(energy[i])
            best = block[i]
    return DetectionResult(best, nan_stats, objective=best_energy)
