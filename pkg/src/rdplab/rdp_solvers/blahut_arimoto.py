"""
Rate-distortion function of a finite source by alternating minimization in
the log domain, with a bisection over the Lagrange slope to hit a target
distortion.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy
from loguru import logger
from scipy.special import logsumexp

from rdplab.rdp_solvers.channel import (
    Channel,
    DistortionSpec,
    constant_output_distortion,
)
from rdplab.source_models import Pmf
from rdplab.utils import ConvergenceFailureError, InfeasibleConstraintError, to_base

__all__ = [
    "DEFAULT_BA_TOL",
    "DEFAULT_BA_MAX_ITER",
    "blahut_arimoto",
    "rate_distortion_curve",
]

DEFAULT_BA_TOL = 1e-6
DEFAULT_BA_MAX_ITER = 10_000

_SLOPE_MIN = 2.0**-40
_SLOPE_MAX = 2.0**60
_BISECTION_STEPS = 200
_WARM_START_FLOOR = 1e-3


@dataclass
class _FixedPoint:
    log_q: numpy.ndarray
    log_w: numpy.ndarray
    distortion: float
    rate_nats: float
    gap: float
    iterations: int


def _iterate(
    log_p: numpy.ndarray,
    log_kernel: numpy.ndarray,
    distortion: numpy.ndarray,
    log_q: numpy.ndarray,
    tol: float,
    max_iter: int,
) -> _FixedPoint:
    """
    Alternate W(y|x) = q(y) K(x,y) / Z(x) and q = p W until the upper and
    lower bounds on the Lagrangian at this slope are within tol nats.
    The kernel is exp(-s delta) for a finite slope s or the indicator of the
    row minimizers for an infinite slope.
    """
    gap = math.inf
    with numpy.errstate(divide="ignore", invalid="ignore"):
        for iteration in range(1, max_iter + 1):
            log_z = logsumexp(log_q[None, :] + log_kernel, axis=1)
            log_ratio = log_kernel - log_z[:, None]
            log_c = logsumexp(log_p[:, None] + log_ratio, axis=0)
            log_q_next = log_q + log_c

            reachable = numpy.isfinite(log_q_next)
            q_next = numpy.exp(log_q_next[reachable])
            gap = float(
                numpy.max(log_c[reachable]) - numpy.sum(q_next * log_c[reachable])
            )
            log_q = log_q_next - logsumexp(log_q_next)
            if gap <= tol:
                break
        else:
            raise ConvergenceFailureError(
                f"alternating minimization did not converge in {max_iter} iterations",
                duality_gap=gap,
            )

        log_z = logsumexp(log_q[None, :] + log_kernel, axis=1)
        log_w = log_q[None, :] + log_kernel - log_z[:, None]

    return _FixedPoint(
        log_q=log_q,
        log_w=log_w,
        distortion=_distortion(log_p, log_w, distortion),
        rate_nats=_rate_nats(log_p, log_w),
        gap=gap,
        iterations=iteration,
    )


def _distortion(
    log_p: numpy.ndarray, log_w: numpy.ndarray, distortion: numpy.ndarray
) -> float:
    joint = numpy.exp(log_p[:, None] + log_w)
    return float(numpy.sum(joint * distortion))


def _rate_nats(log_p: numpy.ndarray, log_w: numpy.ndarray) -> float:
    rows = numpy.exp(log_w)
    p = numpy.exp(log_p)
    return _mutual_information_nats(p, rows)


def _mutual_information_nats(p: numpy.ndarray, rows: numpy.ndarray) -> float:
    joint = p[:, None] * rows
    q = joint.sum(axis=0)
    mask = joint > 0
    ratio = rows[mask] / numpy.broadcast_to(q[None, :], rows.shape)[mask]
    return max(float(numpy.sum(joint[mask] * numpy.log(ratio))), 0.0)


def _normalized_rows(log_w: numpy.ndarray) -> numpy.ndarray:
    rows = numpy.exp(log_w)
    return rows / rows.sum(axis=1, keepdims=True)


def _warm_start(log_q: numpy.ndarray) -> numpy.ndarray:
    """
    Mix a previous output law with the uniform law, every output keeps at
    least _WARM_START_FLOOR / |Y| of the mass.
    """
    floor = math.log(_WARM_START_FLOOR / log_q.shape[0])
    return numpy.logaddexp(math.log1p(-_WARM_START_FLOOR) + log_q, floor)


def blahut_arimoto(
    p_x: Pmf,
    delta: DistortionSpec,
    D: float,
    tol: float = DEFAULT_BA_TOL,
    max_iter: int = DEFAULT_BA_MAX_ITER,
    base: float = 2.0,
) -> Tuple[float, Channel]:
    """
    Evaluate the rate-distortion function R(D) = min I(X; Y) over channels
    with expected per-symbol distortion at most D.

    A slope s > 0 is bracketed by doubling or halving and refined by
    bisection on log s. When the distortion of the slope family jumps across
    D (a linear stretch of R(D)), the two bracketing channels are mixed so
    the returned channel meets D exactly.

    :param p_x: source pmf (a block pmf when delta is a block distortion)
    :param delta: distortion measure, divided by its block_length so D and
        the returned rate are per symbol
    :param D: distortion level, >= 0
    :param tol: tolerance on the rate and on the distortion target
    :param max_iter: iteration limit per slope
    :param base: logarithm base of the returned rate
    :return: the rate and a channel achieving it
    :raises InfeasibleConstraintError: if D is below the smallest attainable
        distortion
    :raises ConvergenceFailureError: if an inner iteration hits max_iter
    """
    if D < 0:
        raise ValueError(f"D must be >= 0, given {D}")
    if delta.size != len(p_x):
        raise ValueError(
            f"distortion matrix has size {delta.size}, pmf has {len(p_x)} labels"
        )

    scale = delta.block_length
    distortion = delta.matrix / scale
    support = p_x.support

    d_max, constant_index = constant_output_distortion(p_x, delta)
    d_max /= scale
    if D >= d_max:
        logger.debug(f"D={D} >= {d_max:.6g}, constant reconstruction is optimal")
        return 0.0, Channel.constant(support, support[constant_index])

    row_min = distortion.min(axis=1)
    d_min = float(p_x.probs @ row_min)
    if D < d_min - tol:
        raise InfeasibleConstraintError(
            f"D={D} is below the smallest attainable distortion {d_min:.6g}"
        )

    with numpy.errstate(divide="ignore"):
        log_p = numpy.log(p_x.probs)
    log_q = numpy.full(len(support), -math.log(len(support)))
    tol_nats = tol * math.log(base)

    if D <= d_min + tol:
        with numpy.errstate(divide="ignore"):
            log_mask = numpy.log(
                (distortion <= row_min[:, None] + 1e-12).astype(numpy.float64)
            )
        point = _iterate(log_p, log_mask, distortion, log_q, tol_nats, max_iter)
        logger.debug(
            f"minimum-distortion channel after {point.iterations} iterations, "
            f"gap {point.gap:.3e}"
        )
        rows = _normalized_rows(point.log_w)
        return to_base(point.rate_nats, base) / scale, Channel.from_rows(rows, support)

    def solve(slope: float, start: numpy.ndarray) -> _FixedPoint:
        kernel = -slope * distortion
        return _iterate(
            log_p, kernel, distortion, _warm_start(start), tol_nats, max_iter
        )

    slope = 1.0
    point = solve(slope, log_q)
    if point.distortion > D:
        low, low_point = slope, point
        while True:
            slope *= 2.0
            if slope > _SLOPE_MAX:
                raise ConvergenceFailureError(
                    f"no slope reaches distortion {D}", duality_gap=point.gap
                )
            point = solve(slope, point.log_q)
            if point.distortion <= D:
                high, high_point = slope, point
                break
            low, low_point = slope, point
    else:
        high, high_point = slope, point
        while True:
            slope /= 2.0
            if slope < _SLOPE_MIN:
                # the slope family reaches D only at a vanishing slope, so
                # R(D) is zero up to tolerance
                low, low_point = slope, solve(slope, point.log_q)
                break
            point = solve(slope, point.log_q)
            if point.distortion > D:
                low, low_point = slope, point
                break
            high, high_point = slope, point

    for _ in range(_BISECTION_STEPS):
        spread = low_point.distortion - high_point.distortion
        if spread <= tol * 1e-2 or high / low < 1.0 + 1e-12:
            break
        middle = math.sqrt(low * high)
        point = solve(middle, high_point.log_q)
        if point.distortion > D:
            low, low_point = middle, point
        else:
            high, high_point = middle, point

    high_rows = _normalized_rows(high_point.log_w)
    spread = low_point.distortion - high_point.distortion
    if spread > 0 and low_point.distortion > D:
        weight = (low_point.distortion - D) / spread
        rows = weight * high_rows + (1.0 - weight) * _normalized_rows(low_point.log_w)
    else:
        rows = high_rows
    rows = rows / rows.sum(axis=1, keepdims=True)

    rate = to_base(_mutual_information_nats(p_x.probs, rows), base) / scale
    logger.debug(
        f"R({D})={rate:.6g} at slope {high:.6g}, gap {high_point.gap:.3e}"
    )
    return rate, Channel.from_rows(rows, support)


def rate_distortion_curve(
    p_x: Pmf,
    delta: DistortionSpec,
    D_grid: Sequence[float],
    tol: float = DEFAULT_BA_TOL,
    base: float = 2.0,
) -> List[Tuple[float, float]]:
    """
    :return: (D, R(D)) for every D in D_grid, in grid order
    """
    return [
        (float(D), blahut_arimoto(p_x, delta, D, tol=tol, base=base)[0])
        for D in D_grid
    ]
