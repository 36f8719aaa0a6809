"""
Exhaustive scan of channels whose rows lie on the probability simplex
lattice of a given spacing.
"""

import itertools
import math
from typing import Tuple

import numpy
from loguru import logger

from rdplab.info_measures import binary_entropy
from rdplab.rdp_solvers import Channel, DistortionSpec
from rdplab.source_models import Pmf
from rdplab.utils import BudgetExceededError, InfeasibleConstraintError, to_base

from .verify import verify_oracle_point

__all__ = [
    "DEFAULT_GRID_RESOLUTION",
    "DEFAULT_GRID_BUDGET",
    "simplex_lattice",
    "grid_error_bound",
    "scan_channel_grid",
    "grid_min_entropy",
]

DEFAULT_GRID_RESOLUTION = 1e-3
DEFAULT_GRID_BUDGET = 10**8
GRID_FEASIBILITY_TOL = 1e-10


def simplex_lattice(size: int, steps: int) -> numpy.ndarray:
    """
    :param size: dimension of the simplex
    :param steps: lattice points per unit, spacing is 1 / steps
    :return: (count, size) array of every probability vector with entries
        in multiples of 1 / steps, in lexicographic order of the entries
    """
    if size == 1:
        return numpy.ones((1, 1))
    rows = []
    # stars and bars: bar positions split steps into size parts
    for bars in itertools.combinations(range(steps + size - 1), size - 1):
        edges = (-1,) + bars + (steps + size - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(size)])
    lattice = numpy.array(rows, dtype=numpy.float64) / steps
    order = numpy.lexsort(lattice.T[::-1])
    return lattice[order]


def _lattice_size(size: int, steps: int) -> int:
    return math.comb(steps + size - 1, size - 1)


def grid_error_bound(resolution: float, alphabet_size: int, base: float = 2.0) -> float:
    """
    Continuity bound on the output entropy across one lattice cell: rounding
    every channel row to the lattice moves the output law by at most
    t = (alphabet_size - 1) * resolution / 2 in variational distance, which
    changes the entropy by at most t log(alphabet_size - 1) + h(t).

    :return: the bound in log-base units
    """
    t = min(0.5, (alphabet_size - 1) * resolution / 2.0)
    spread = t * math.log(max(alphabet_size - 1, 1)) / math.log(base)
    return spread + binary_entropy(t, base)


def scan_channel_grid(
    p_x: Pmf,
    cost: numpy.ndarray,
    budget: float,
    S: float,
    resolution: float = DEFAULT_GRID_RESOLUTION,
    base: float = 2.0,
    max_points: int = DEFAULT_GRID_BUDGET,
) -> Tuple[float, Channel, float]:
    """
    Minimize the output entropy over lattice channels with expected cost at
    most budget and output law within variational distance S of p_x. Rows of
    zero-probability inputs are fixed to the identity. The first point in
    scan order wins among equal values.

    :param p_x: input pmf
    :param cost: per-pair cost matrix
    :param budget: bound on the expected cost
    :param S: perception level
    :param resolution: lattice spacing, 1 / resolution must be an integer
    :param base: logarithm base
    :param max_points: budget on the number of scanned channels
    :return: the entropy, its channel and the continuity bound of the lattice
    :raises BudgetExceededError: if the scan would exceed max_points
    :raises InfeasibleConstraintError: if no lattice channel is feasible
    """
    steps = int(round(1.0 / resolution))
    if steps < 1 or abs(steps * resolution - 1.0) > 1e-9:
        raise ValueError(
            f"1 / resolution must be a positive integer, given {resolution}"
        )

    size = len(p_x)
    p = p_x.probs
    active = numpy.flatnonzero(p > 0)
    points = _lattice_size(size, steps) ** len(active)
    if points > max_points:
        raise BudgetExceededError(
            requested=points, budget=max_points, what="channel grid"
        )

    lattice = simplex_lattice(size, steps)
    lattice_cost = {x: lattice @ cost[x] for x in active}
    rows = numpy.eye(size)

    last = active[-1]
    min_last_cost = float(p[last] * lattice_cost[last].min())
    best_value, best_rows = math.inf, None

    for prefix in itertools.product(range(lattice.shape[0]), repeat=len(active) - 1):
        partial_cost = sum(
            p[x] * lattice_cost[x][idx] for x, idx in zip(active, prefix)
        )
        if partial_cost + min_last_cost > budget + GRID_FEASIBILITY_TOL:
            continue
        partial_q = sum(
            (p[x] * lattice[idx] for x, idx in zip(active, prefix)), numpy.zeros(size)
        )

        q = partial_q[None, :] + p[last] * lattice
        total_cost = partial_cost + p[last] * lattice_cost[last]
        tv = 0.5 * numpy.abs(q - p[None, :]).sum(axis=1)
        feasible = (total_cost <= budget + GRID_FEASIBILITY_TOL) & (
            tv <= S + GRID_FEASIBILITY_TOL
        )
        if not numpy.any(feasible):
            continue

        with numpy.errstate(divide="ignore", invalid="ignore"):
            terms = numpy.where(q > 0, q * numpy.log(q), 0.0)
        values = numpy.where(feasible, -terms.sum(axis=1), numpy.inf)
        pick = int(numpy.argmin(values))
        if values[pick] < best_value:
            best_value = float(values[pick])
            best_rows = rows.copy()
            for x, idx in zip(active, prefix):
                best_rows[x] = lattice[idx]
            best_rows[last] = lattice[pick]

    if best_rows is None:
        raise InfeasibleConstraintError(
            f"no lattice channel at resolution {resolution} meets the constraints"
        )

    bound = grid_error_bound(resolution, size, base)
    value = to_base(max(best_value, 0.0), base) + 0.0
    channel = Channel.from_rows(best_rows, p_x.support)
    verify_oracle_point(p_x, channel, cost, budget, S, value, base)
    logger.debug(f"grid scan over {points} channels: H={value:.6g} (+- {bound:.3g})")
    return value, channel, bound


def grid_min_entropy(
    p_x: Pmf,
    delta: DistortionSpec,
    D: float,
    S: float,
    resolution: float = DEFAULT_GRID_RESOLUTION,
    base: float = 2.0,
    max_points: int = DEFAULT_GRID_BUDGET,
) -> Tuple[float, Channel]:
    """
    Brute-force minimum output entropy over lattice channels with expected
    per-symbol distortion at most D and variational distance at most S

    :return: per-symbol entropy and the lattice channel attaining it
    """
    value, channel, bound = scan_channel_grid(
        p_x,
        delta.matrix / delta.block_length,
        D,
        S,
        resolution=resolution,
        base=base,
        max_points=max_points,
    )
    logger.debug(f"grid optimum {value:.6g} within continuity bound {bound:.3g}")
    return value / delta.block_length, channel
