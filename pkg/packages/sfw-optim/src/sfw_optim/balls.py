"""Norm evaluation, linear minimization oracles, projection and sampling.

Every function dispatches on the distortion-ball variant. Spectral balls
(Schatten and group-nuclear) work on matrices: either the matricization of
the whole tensor or the stacked channel blocks of each pixel group.

The LMO follows the minimization convention: ``lmo(ball, d)`` returns the
point of the ball minimizing ``<d, v>``, so Frank-Wolfe calls it with the
gradient itself.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict

from sfw_core.errors import ShapeMismatchError, UnsupportedBallError, ValidationFailure
from sfw_core.linalg import full_svd, project_l1_ball, singular_values, top_singular_triplet
from sfw_core.models.balls import (
    DistortionBall,
    GroupNuclearBall,
    GroupSelection,
    LpBall,
    Matricization,
    SchattenBall,
)
from sfw_core.models.groups import GroupPartition, PixelGroup
from sfw_core.tensor import FloatArray, dematricize, extract_group, matricize, scatter_group

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)


class LmoVertex(BaseModel):
    """Output of the linear minimization oracle.

    Attributes:
        tensor: The minimizing point, same shape as the direction.
        support: Group carrying the mass (group balls only).
        group_index: Index of ``support`` within the partition.
        degenerate: True when the direction was zero on the whole ball
            domain and the zero tensor was returned.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tensor: FloatArray
    support: PixelGroup | None = None
    group_index: int | None = None
    degenerate: bool = False


def conjugate_exponent(p: float) -> float:
    """Hoelder conjugate ``p'`` with ``1/p + 1/p' = 1``."""
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def schatten_norm(M: FloatArray, q: float) -> float:
    """q-norm of the singular values of ``M``."""
    return float(np.linalg.norm(singular_values(M), ord=q))


def _check_shape(ball: DistortionBall, x: FloatArray) -> None:
    if x.ndim != 3:
        msg = f"expected a (c, h, w) tensor, got shape {x.shape}"
        raise ShapeMismatchError(msg)
    if isinstance(ball, GroupNuclearBall):
        ball.partition.check_bounds((x.shape[0], x.shape[1], x.shape[2]))


def _spectrum(x: FloatArray, mode: Matricization) -> FloatArray:
    """Concatenated singular values of every matricized block."""
    return np.concatenate([singular_values(m) for m in matricize(x, mode)])


def _group_scores(
    d: FloatArray,
    partition: GroupPartition,
    active: Sequence[int],
    selection: GroupSelection,
) -> FloatArray:
    """Weighted per-group score used to pick the active group."""
    scores = np.empty(len(active))
    for k, idx in enumerate(active):
        spectrum = singular_values(extract_group(d, partition.groups[idx]))
        value = spectrum[0] if selection is GroupSelection.SPECTRAL else spectrum.sum()
        scores[k] = value / partition.weights[idx]
    return scores


# ---- Norms ----


def norm_value(ball: DistortionBall, delta: FloatArray) -> float:
    """Evaluate the norm that defines ``ball`` at ``delta``.

    Schatten balls take the q-norm of all singular values of the
    matricization (per-channel blocks are concatenated). Group-nuclear
    balls sum ``w_g * ||delta[g]||_S1`` over the partition; entries outside
    every group do not contribute.

    Raises:
        ShapeMismatchError: If ``delta`` is not a (c, h, w) tensor.
        GroupBoundsError: If a group does not fit ``delta``.
    """
    delta = np.asarray(delta, dtype=np.float64)
    _check_shape(ball, delta)
    if isinstance(ball, LpBall):
        return float(np.linalg.norm(delta.reshape(-1), ord=ball.p))
    if isinstance(ball, SchattenBall):
        return float(np.linalg.norm(_spectrum(delta, ball.matricization), ord=ball.q))
    return float(
        sum(
            w * singular_values(extract_group(delta, g)).sum()
            for g, w in zip(ball.partition.groups, ball.partition.weights, strict=True)
        )
    )


def dual_norm_value(ball: DistortionBall, d: FloatArray) -> float:
    """Evaluate the dual norm of ``ball``'s norm at ``d``.

    For every ball ``<d, lmo(ball, d)> = -radius * dual_norm_value(ball, d)``.
    """
    d = np.asarray(d, dtype=np.float64)
    _check_shape(ball, d)
    if isinstance(ball, LpBall):
        return float(np.linalg.norm(d.reshape(-1), ord=conjugate_exponent(ball.p)))
    if isinstance(ball, SchattenBall):
        spectrum = _spectrum(d, ball.matricization)
        return float(np.linalg.norm(spectrum, ord=conjugate_exponent(ball.q)))
    active = range(len(ball.partition))
    return float(_group_scores(d, ball.partition, active, GroupSelection.SPECTRAL).max())


def group_norm(
    delta: FloatArray,
    partition: GroupPartition,
    r: float = 1.0,
    p: float = 1.0,
) -> float:
    """General weighted group norm ``(sum_g (w_g ||delta[g]||_S(p))^r)^(1/r)``.

    Evaluation only; with ``r = p = 1`` it is the group-nuclear norm.
    """
    per_group = np.array(
        [
            w * schatten_norm(extract_group(delta, g), p)
            for g, w in zip(partition.groups, partition.weights, strict=True)
        ]
    )
    return float(np.linalg.norm(per_group, ord=r))


def group_dual_norm(
    d: FloatArray,
    partition: GroupPartition,
    r: float = 1.0,
    p: float = 1.0,
) -> float:
    """Dual of :func:`group_norm`: ``(sum_g (||d[g]||_S(p')/w_g)^(r'))^(1/r')``."""
    p_dual, r_dual = conjugate_exponent(p), conjugate_exponent(r)
    per_group = np.array(
        [
            schatten_norm(extract_group(d, g), p_dual) / w
            for g, w in zip(partition.groups, partition.weights, strict=True)
        ]
    )
    return float(np.linalg.norm(per_group, ord=r_dual))


# ---- Linear minimization oracle ----


def _zero_vertex(d: FloatArray) -> LmoVertex:
    logger.debug("LMO direction is zero on the ball domain; returning zero vertex")
    return LmoVertex(tensor=np.zeros_like(d), degenerate=True)


def _lp_lmo(ball: LpBall, d: FloatArray) -> LmoVertex:
    eps = ball.radius
    if math.isinf(ball.p):
        return LmoVertex(tensor=-eps * np.sign(d))
    flat = d.reshape(-1)
    out = np.zeros_like(flat)
    if ball.p == 1.0:
        idx = int(np.argmax(np.abs(flat)))
        out[idx] = -eps * np.sign(flat[idx])
    else:
        out = -eps * flat / np.linalg.norm(flat)
    return LmoVertex(tensor=out.reshape(d.shape))


def group_lmo(
    partition: GroupPartition,
    radius: float,
    d: FloatArray,
    *,
    active: Sequence[int] | None = None,
    selection: GroupSelection = GroupSelection.SPECTRAL,
) -> LmoVertex:
    """LMO of the weighted group-nuclear ball, optionally restricted to groups.

    Picks the group with the largest weighted score (ties go to the lowest
    index) and places ``-(radius / w_g) u v^T`` on it, where ``(u, v)`` is
    the dominant singular pair of ``d[g]``.

    Args:
        partition: Groups and weights of the ball.
        radius: Ball radius.
        d: Direction tensor.
        active: Indices of the groups the oracle may use (all by default).
        selection: Spectral (exact) or nuclear (comparison) selection rule.

    Returns:
        The vertex, supported on a single group.
    """
    indices = list(range(len(partition))) if active is None else list(active)
    scores = _group_scores(d, partition, indices, selection)
    best = int(np.argmax(scores))
    if not scores[best] > 0.0:
        return _zero_vertex(d)
    idx = indices[best]
    group = partition.groups[idx]
    triplet = top_singular_triplet(extract_group(d, group))
    magnitude = radius / partition.weights[idx]
    out = scatter_group(-magnitude * triplet.outer(), group, np.zeros_like(d))
    logger.debug(
        "Group LMO chose group %d (score %.6g, magnitude %.6g)", idx, scores[best], magnitude
    )
    return LmoVertex(tensor=out, support=group, group_index=idx)


def _schatten_lmo(ball: SchattenBall, d: FloatArray) -> LmoVertex:
    eps = ball.radius
    if ball.is_nuclear:
        if ball.matricization is Matricization.PER_CHANNEL:
            partition = GroupPartition.per_channel((d.shape[0], d.shape[1], d.shape[2]))
            return group_lmo(partition, eps, d)
        (matrix,) = matricize(d, Matricization.STACKED)
        triplet = top_singular_triplet(matrix)
        return LmoVertex(
            tensor=dematricize([-eps * triplet.outer()], Matricization.STACKED, d.shape)
        )

    blocks = [full_svd(m) for m in matricize(d, ball.matricization)]
    spectrum = np.concatenate([s for _, s, _ in blocks])
    top = spectrum.max()
    if not top > 0.0:
        return _zero_vertex(d)
    if math.isinf(ball.q):
        coeffs = np.ones_like(spectrum)
    else:
        # Normalized by the top value so large conjugate exponents do not underflow.
        q_dual = conjugate_exponent(ball.q)
        scaled = spectrum / top
        coeffs = scaled ** (q_dual - 1.0) / np.linalg.norm(scaled, ord=q_dual) ** (q_dual - 1.0)
    matrices = []
    offset = 0
    for U, s, V in blocks:
        c = coeffs[offset : offset + s.size]
        offset += s.size
        matrices.append(-eps * (U * c) @ V.T)
    return LmoVertex(tensor=dematricize(matrices, ball.matricization, d.shape))


def lmo(
    ball: DistortionBall,
    d: FloatArray,
    *,
    active_groups: Sequence[int] | None = None,
) -> LmoVertex:
    """Return the point of ``ball`` (centered at 0) minimizing ``<d, v>``.

    Args:
        ball: The distortion ball.
        d: Direction tensor, typically the loss gradient.
        active_groups: For group-nuclear balls, the groups the oracle may
            use; ignored by other families.

    Returns:
        The vertex. A direction that vanishes on the ball's domain yields
        the zero tensor flagged ``degenerate``.

    Raises:
        ValidationFailure: If ``d`` contains NaN or Inf.
    """
    d = np.asarray(d, dtype=np.float64)
    _check_shape(ball, d)
    if not np.all(np.isfinite(d)):
        msg = "LMO direction contains NaN or Inf"
        raise ValidationFailure(msg)
    if isinstance(ball, GroupNuclearBall):
        return group_lmo(
            ball.partition, ball.radius, d, active=active_groups, selection=ball.selection
        )
    if not np.any(d):
        return _zero_vertex(d)
    if isinstance(ball, LpBall):
        return _lp_lmo(ball, d)
    return _schatten_lmo(ball, d)


# ---- Projection ----


def project(ball: DistortionBall, delta: FloatArray) -> FloatArray:
    """Euclidean projection of ``delta`` onto ``ball``.

    Supported for the l_inf, l_2 and l_1 balls and for nuclear balls in
    either matricization. Points already inside are returned unchanged.

    Raises:
        UnsupportedBallError: For Schatten q > 1 and group-nuclear balls.
    """
    delta = np.asarray(delta, dtype=np.float64)
    _check_shape(ball, delta)
    eps = ball.radius
    if isinstance(ball, LpBall):
        if math.isinf(ball.p):
            return np.clip(delta, -eps, eps)
        if ball.p == 2.0:
            norm = float(np.linalg.norm(delta))
            return delta.copy() if norm <= eps else delta * (eps / norm)
        return project_l1_ball(delta.reshape(-1), eps).reshape(delta.shape)
    if isinstance(ball, SchattenBall) and ball.is_nuclear:
        if norm_value(ball, delta) <= eps:
            return delta.copy()
        blocks = [full_svd(m) for m in matricize(delta, ball.matricization)]
        shrunk = project_l1_ball(np.concatenate([s for _, s, _ in blocks]), eps)
        matrices = []
        offset = 0
        for U, s, V in blocks:
            matrices.append((U * shrunk[offset : offset + s.size]) @ V.T)
            offset += s.size
        return dematricize(matrices, ball.matricization, delta.shape)
    msg = f"projection not available for this ball: {ball.describe()}"
    raise UnsupportedBallError(msg)


# ---- Sampling ----


def _random_rank_one(rng: np.random.Generator, rows: int, cols: int) -> FloatArray:
    u = rng.standard_normal(rows)
    v = rng.standard_normal(cols)
    return np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))


def sample_in_ball(
    ball: DistortionBall,
    shape: tuple[int, int, int],
    rng_seed: int,
) -> FloatArray:
    """Draw a random point of ``ball`` for random-start attacks.

    Spectral balls get ``t * (radius / w_g) * u v^T`` on a uniformly chosen
    block (the whole matricization, one channel, or one group) with ``t``
    uniform on [0, 1]. The l_inf ball is sampled uniformly; l_1 and l_2 use
    a Gaussian direction scaled to norm ``t * radius``.

    Args:
        ball: The distortion ball.
        shape: Tensor shape ``(c, h, w)``.
        rng_seed: Seed of the draw.

    Returns:
        A tensor with ``norm_value(ball, sample) <= radius``.
    """
    rng = np.random.default_rng(rng_seed)
    eps = ball.radius
    if isinstance(ball, LpBall):
        if math.isinf(ball.p):
            return rng.uniform(-eps, eps, size=shape)
        z = rng.standard_normal(shape)
        t = rng.uniform()
        return z * (t * eps / float(np.linalg.norm(z.reshape(-1), ord=ball.p)))

    if isinstance(ball, GroupNuclearBall):
        partition = ball.partition
    elif ball.matricization is Matricization.PER_CHANNEL:
        partition = GroupPartition.per_channel(shape)
    else:
        partition = GroupPartition.full_frame(shape)
    idx = int(rng.integers(len(partition)))
    group = partition.groups[idx]
    t = rng.uniform()
    block = _random_rank_one(rng, *group.matrix_shape)
    magnitude = t * eps / partition.weights[idx]
    return scatter_group(magnitude * block, group, np.zeros(shape))
