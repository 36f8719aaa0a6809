import itertools
import math
from typing import List, Optional, Tuple

import numpy
from loguru import logger

from rdplab.info_measures import binary_entropy
from rdplab.rdp_solvers import Channel, DistortionSpec
from rdplab.source_models import Pmf
from rdplab.utils import AlphabetMismatchError, InfeasibleConstraintError

from .verify import verify_oracle_point

__all__ = ["exact_min_entropy_2x2"]

_VERTEX_TOL = 1e-12


def _constraint_lines(
    p: numpy.ndarray, cost: numpy.ndarray, D: float, S: float
) -> List[Tuple[float, float, float]]:
    """
    Boundary lines u * a + v * b = w of the feasible set in the coordinates
    a = W(1|0), b = W(0|1)
    """
    p0, p1 = p
    # expected cost = p0 c00 + p1 c11 + a p0 (c01 - c00) + b p1 (c10 - c11)
    offset = p0 * cost[0, 0] + p1 * cost[1, 1]
    cost_line = (
        p0 * (cost[0, 1] - cost[0, 0]),
        p1 * (cost[1, 0] - cost[1, 1]),
        D - offset,
    )
    # q0 - p0 = -p0 a + p1 b, bounded by S on both sides
    return [
        (1.0, 0.0, 0.0),
        (1.0, 0.0, 1.0),
        (0.0, 1.0, 0.0),
        (0.0, 1.0, 1.0),
        cost_line,
        (-p0, p1, S),
        (-p0, p1, -S),
    ]


def _is_feasible(
    a: float, b: float, p: numpy.ndarray, cost: numpy.ndarray, D: float, S: float
) -> bool:
    low, high = -_VERTEX_TOL, 1 + _VERTEX_TOL
    if not (low <= a <= high and low <= b <= high):
        return False
    p0, p1 = p
    expected = p0 * ((1 - a) * cost[0, 0] + a * cost[0, 1]) + p1 * (
        b * cost[1, 0] + (1 - b) * cost[1, 1]
    )
    return expected <= D + 1e-10 and abs(p1 * b - p0 * a) <= S + 1e-10


def exact_min_entropy_2x2(
    p_x: Pmf,
    delta: DistortionSpec,
    D: float,
    S: float,
    base: float = 2.0,
) -> Tuple[float, Channel]:
    """
    Closed-form minimum output entropy for a two-symbol alphabet. The feasible
    channels form a polygon in the plane of the two crossover probabilities,
    cut out by the unit box, the distortion budget and the strip
    |q0 - p0| <= S. The output entropy is concave along the polygon, so the
    minimum sits on one of the pairwise line intersections.

    :param p_x: binary source pmf
    :param delta: 2x2 distortion
    :param D: per-symbol distortion level
    :param S: perception level in [0, 1]
    :param base: logarithm base
    :return: per-symbol entropy and the lexicographically smallest optimal channel
    :raises InfeasibleConstraintError: if no channel meets both constraints
    """
    if len(p_x) != 2 or delta.size != 2:
        raise AlphabetMismatchError("the closed form covers two-symbol alphabets only")
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"S must be in [0, 1], given {S}")

    p = p_x.probs
    cost = delta.matrix / delta.block_length
    best_value, best_rows = math.inf, None

    lines = _constraint_lines(p, cost, D, S)
    for (u1, v1, w1), (u2, v2, w2) in itertools.combinations(lines, 2):
        det = u1 * v2 - u2 * v1
        if abs(det) < 1e-14:
            continue
        a = (w1 * v2 - w2 * v1) / det
        b = (u1 * w2 - u2 * w1) / det
        if not _is_feasible(a, b, p, cost, D, S):
            continue
        a, b = min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
        q0 = min(max(p[0] * (1 - a) + p[1] * b, 0.0), 1.0)
        value = binary_entropy(q0, base)
        rows = numpy.array([[1 - a, a], [b, 1 - b]])
        if _is_better(value, rows, best_value, best_rows):
            best_value, best_rows = value, rows

    if best_rows is None:
        raise InfeasibleConstraintError(f"no binary channel meets D={D} with S={S}")

    # inputs without mass keep the identity row
    empty = p == 0
    best_rows[empty] = numpy.eye(2)[empty]
    channel = Channel.from_rows(best_rows, p_x.support)
    verify_oracle_point(p_x, channel, cost, D, S, best_value, base)
    logger.debug(f"closed-form binary optimum H={best_value:.6g}")
    return best_value / delta.block_length, channel


def _is_better(
    value: float,
    rows: numpy.ndarray,
    best_value: float,
    best_rows: Optional[numpy.ndarray],
) -> bool:
    if best_rows is None or value < best_value - _VERTEX_TOL:
        return True
    if value > best_value + _VERTEX_TOL:
        return False
    key = tuple(numpy.round(rows, 12).ravel())
    return key < tuple(numpy.round(best_rows, 12).ravel())
