"""
Exhaustive search over deterministic encoders y = m(x), the baseline against
which the benefit of randomized encoders is measured on tiny instances.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy
from loguru import logger

from rdplab.rdp_solvers import (
    Channel,
    DistortionSpec,
    min_output_entropy,
    resolve_method,
)
from rdplab.source_models import Pmf
from rdplab.utils import BudgetExceededError, to_base

from .verify import verify_oracle_point

__all__ = [
    "DETERMINISTIC_MAX_BLOCKS",
    "DEFAULT_MAP_BUDGET",
    "best_deterministic_encoder",
    "stochasticity_gap",
]

DETERMINISTIC_MAX_BLOCKS = 8
DEFAULT_MAP_BUDGET = DETERMINISTIC_MAX_BLOCKS**DETERMINISTIC_MAX_BLOCKS
_MAP_CHUNK = 1 << 16


def _map_chunk(
    start: int, stop: int, size: int, targets: numpy.ndarray
) -> numpy.ndarray:
    # map number m spelled in base len(targets), first input most significant
    numbers = numpy.arange(start, stop, dtype=numpy.int64)
    powers = len(targets) ** numpy.arange(size - 1, -1, -1, dtype=numpy.int64)
    digits = (numbers[:, None] // powers[None, :]) % len(targets)
    return targets[digits]


def best_deterministic_encoder(
    block_pmf: Pmf,
    delta_n: DistortionSpec,
    D: float,
    S: float,
    codebook: Optional[Sequence[int]] = None,
    base: float = 2.0,
    max_maps: int = DEFAULT_MAP_BUDGET,
) -> Optional[Tuple[float, numpy.ndarray]]:
    """
    Search every map from blocks to blocks, or into codebook when given, for
    the smallest output entropy with expected per-symbol distortion at most
    D and output law within variational distance S of the source. Among
    equal entropies the lexicographically smallest map wins.

    :param block_pmf: law of the source blocks
    :param delta_n: block distortion
    :param D: per-symbol distortion level
    :param S: perception level in [0, 1]
    :param codebook: block indices the map may use, all blocks when None
    :param base: logarithm base
    :param max_maps: budget on the number of maps searched
    :return: per-symbol entropy and the map as an array of block indices, or
        None when no deterministic map is feasible
    :raises BudgetExceededError: if the search would exceed max_maps
    """
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"S must be in [0, 1], given {S}")
    size = len(block_pmf)
    if delta_n.size != size:
        raise ValueError(f"distortion covers {delta_n.size} blocks, pmf has {size}")

    if codebook is None:
        if size > DETERMINISTIC_MAX_BLOCKS:
            raise BudgetExceededError(
                requested=size**size, budget=max_maps, what="deterministic maps"
            )
        targets = numpy.arange(size, dtype=numpy.int64)
    else:
        targets = numpy.unique(numpy.asarray(codebook, dtype=numpy.int64))
        if targets.size == 0 or targets[0] < 0 or targets[-1] >= size:
            raise ValueError(f"codebook entries must be block indices in 0..{size - 1}")

    total = len(targets) ** size
    if total > max_maps:
        raise BudgetExceededError(
            requested=total, budget=max_maps, what="deterministic maps"
        )

    p = block_pmf.probs
    cost = delta_n.matrix / delta_n.block_length
    rows = numpy.arange(size)
    best_value, best_map = math.inf, None

    for start in range(0, total, _MAP_CHUNK):
        maps = _map_chunk(start, min(start + _MAP_CHUNK, total), size, targets)
        spent = cost[rows[None, :], maps] @ p
        q = numpy.zeros((len(maps), size))
        for x in range(size):
            q[numpy.arange(len(maps)), maps[:, x]] += p[x]
        distance = 0.5 * numpy.abs(q - p[None, :]).sum(axis=1)
        feasible = (spent <= D + 1e-12) & (distance <= S + 1e-12)
        if not numpy.any(feasible):
            continue
        with numpy.errstate(divide="ignore", invalid="ignore"):
            values = -numpy.where(q > 0, q * numpy.log(q), 0.0).sum(axis=1)
        values = numpy.where(feasible, values, numpy.inf)
        pick = int(numpy.argmin(values))
        # chunks run in map order, so strict improvement keeps the smallest map
        if values[pick] < best_value - 1e-12:
            best_value, best_map = float(values[pick]), maps[pick].copy()

    if best_map is None:
        logger.debug(f"no deterministic map meets D={D} with S={S}")
        return None

    value = to_base(max(best_value, 0.0), base) + 0.0
    channel = Channel.from_mapping(block_pmf.support, best_map)
    verify_oracle_point(block_pmf, channel, cost, D, S, value, base)
    logger.debug(f"best of {total} deterministic maps: H={value:.6g}")
    return value / delta_n.block_length, best_map


def stochasticity_gap(
    block_pmf: Pmf,
    delta_n: DistortionSpec,
    D: float,
    S: float,
    method: str = "auto",
    base: float = 2.0,
) -> float:
    """
    :return: best deterministic entropy minus the minimum over all channels,
        inf when no deterministic map is feasible
    :raises InfeasibleConstraintError: if not even a randomized encoder is
        feasible
    :raises RuntimeError: if a deterministic map beats the exact channel optimum
    """
    stochastic, _ = min_output_entropy(
        block_pmf, delta_n, D, S, method=method, base=base
    )
    found = best_deterministic_encoder(block_pmf, delta_n, D, S, base=base)
    if found is None:
        return math.inf
    gap = found[0] - stochastic
    # multistart values are upper bounds and may sit above a deterministic map
    if gap < -1e-6 and resolve_method(method, len(block_pmf)) == "exact":
        raise RuntimeError(
            f"deterministic optimum {found[0]:.6g} undercuts the channel optimum "
            f"{stochastic:.6g}"
        )
    return max(gap, 0.0)
