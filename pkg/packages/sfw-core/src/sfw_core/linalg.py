"""Linear-algebra kernels: dominant singular triplet, thin SVD, l1 projection."""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from sfw_core.errors import ValidationFailure, ZeroMatrixError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


class SvdTriplet(BaseModel):
    """A singular value with its left and right singular vectors.

    Attributes:
        sigma: The singular value.
        u: Unit left singular vector (length = rows).
        v: Unit right singular vector (length = cols).
        converged: False when power iteration hit ``max_iter`` first.
        iterations: Power-iteration sweeps performed.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sigma: float
    u: FloatArray
    v: FloatArray
    converged: bool = True
    iterations: int = 0

    def outer(self) -> FloatArray:
        """Return the rank-one matrix ``u v^T``."""
        return np.outer(self.u, self.v)


def _canonical_sign(u: FloatArray, v: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Flip ``(u, v)`` so that the first nonzero coordinate of ``u`` is positive."""
    nonzero = np.flatnonzero(np.abs(u) > 1e-14)
    if nonzero.size and u[nonzero[0]] < 0.0:
        return -u, -v
    return u, v


def top_singular_triplet(
    M: FloatArray,
    tol: float = 1e-9,
    max_iter: int = 1000,
    seed: int = 0,
) -> SvdTriplet:
    """Compute the dominant singular triplet by power iteration.

    Alternates ``u = M v / ||M v||`` and ``v = M^T u / ||M^T u||`` from a
    seeded Gaussian start until ``v`` moves less than ``tol``. The returned
    pair satisfies ``M v = sigma u`` to rounding.

    Args:
        M: Real matrix with finite entries.
        tol: Stopping threshold on the change of ``v``.
        max_iter: Iteration budget.
        seed: Seed of the start vector.

    Returns:
        The triplet. If the budget runs out, the pair is taken from
        ``full_svd`` instead and ``converged`` is False.

    Raises:
        ZeroMatrixError: If ``M`` is all zero.
        ValidationFailure: If ``M`` is not a finite 2-D array.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        msg = "top_singular_triplet needs a finite 2-D matrix"
        raise ValidationFailure(msg)
    if not np.any(M):
        msg = "zero matrix has no dominant pair"
        raise ZeroMatrixError(msg)

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        mv = M @ v
        norm_mv = np.linalg.norm(mv)
        if norm_mv == 0.0:
            # Start vector fell in the null space; restart from the heaviest row.
            v = M[np.argmax(np.abs(M).sum(axis=1))].copy()
            v /= np.linalg.norm(v)
            continue
        w = M.T @ (mv / norm_mv)
        v_next = w / np.linalg.norm(w)
        step = float(np.linalg.norm(v_next - v))
        v = v_next
        if step <= tol:
            converged = True
            break

    if converged:
        mv = M @ v
        sigma = float(np.linalg.norm(mv))
        u = mv / sigma
    else:
        logger.warning(
            "Power iteration unconverged after %d sweeps on %dx%d matrix; using full SVD",
            max_iter,
            M.shape[0],
            M.shape[1],
        )
        U, s, V = full_svd(M)
        sigma, u, v = float(s[0]), U[:, 0], V[:, 0]
    u, v = _canonical_sign(u, v)
    return SvdTriplet(sigma=sigma, u=u, v=v, converged=converged, iterations=iterations)


def full_svd(M: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Thin SVD ``M = U diag(s) V^T`` with nonincreasing ``s``.

    Args:
        M: Real matrix with finite entries.

    Returns:
        ``(U, s, V)`` where ``U`` is ``m x k``, ``V`` is ``n x k`` and
        ``k = min(m, n)``.
    """
    U, s, Vt = np.linalg.svd(np.asarray(M, dtype=np.float64), full_matrices=False)
    return U, s, Vt.T


def singular_values(M: FloatArray) -> FloatArray:
    """Singular values of ``M`` in nonincreasing order."""
    return np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)


def nuclear_norm(M: FloatArray) -> float:
    """Sum of the singular values of ``M``."""
    return float(singular_values(M).sum())


def numerical_rank(M: FloatArray, rel_tol: float = 1e-8) -> int:
    """Count singular values above ``rel_tol * sigma_1`` (0 for a zero matrix)."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def project_l1_ball(v: FloatArray, r: float) -> FloatArray:
    """Euclidean projection of a vector onto ``{w : ||w||_1 <= r}``.

    Sort-based soft thresholding: find the threshold ``theta`` such that
    ``sum(max(|v| - theta, 0)) = r`` and shrink every magnitude by it.
    Vectors already inside the ball are returned unchanged (as a copy).

    Args:
        v: Real vector.
        r: Positive radius.

    Returns:
        The projected vector; signs of surviving entries match ``v``.
    """
    v = np.asarray(v, dtype=np.float64)
    if r < 0.0:
        msg = f"l1 radius must be nonnegative, got {r}"
        raise ValidationFailure(msg)
    magnitudes = np.abs(v)
    if magnitudes.sum() <= r:
        return v.copy()
    if r == 0.0:
        return np.zeros_like(v)
    ordered = np.sort(magnitudes.reshape(-1))[::-1]
    cumulative = np.cumsum(ordered)
    ranks = np.arange(1, ordered.size + 1)
    candidates = (cumulative - r) / ranks
    rho = int(np.flatnonzero(ordered - candidates > 0.0)[-1])
    theta = candidates[rho]
    return np.sign(v) * np.maximum(magnitudes - theta, 0.0)
