"""
The information spectrum of a source: the law of the normalized
self-information (1/n) log 1/P(X^n), its tail F_n(R) and the smallest rate
whose tail stays within a perception level.
"""

import math
from typing import Literal, Tuple

import numpy
from loguru import logger

from rdplab.info_measures import CONFIDENCE_Z, binomial_radius
from rdplab.source_models import (
    DEFAULT_ENUMERATION_CAP,
    Pmf,
    SourceModel,
    block_pmf,
    sample_blocks,
)

__all__ = [
    "SPECTRUM_MERGE_TOL",
    "SpectrumMode",
    "self_information_spectrum",
    "f_spectrum",
    "f_spectrum_with_radius",
    "rate_for_perception",
    "best_support_tv",
    "sampled_self_information",
]

SPECTRUM_MERGE_TOL = 1e-12
_COMPARE_TOL = 1e-12
_MC_CHUNK = 65_536

SpectrumMode = Literal["exact", "mc"]


def _merge_atoms(
    values: numpy.ndarray, probs: numpy.ndarray
) -> Tuple[numpy.ndarray, numpy.ndarray]:
    order = numpy.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    if values.size == 0:
        return values, probs
    scale = numpy.maximum(1.0, numpy.abs(values[1:]))
    starts = numpy.concatenate(
        [[True], numpy.diff(values) > SPECTRUM_MERGE_TOL * scale]
    )
    groups = numpy.cumsum(starts) - 1
    merged_probs = numpy.bincount(groups, weights=probs)
    merged_values = values[starts]
    return merged_values, merged_probs


def self_information_spectrum(
    source: SourceModel,
    n: int,
    base: float = 2.0,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Tuple[numpy.ndarray, numpy.ndarray]:
    """
    Atoms of the law of (1/n) log 1/P(X^n) over blocks of positive
    probability. For i.i.d. sources the per-symbol self-informations are
    convolved n times, merging values that agree to within 1e-12, so the
    block space is never enumerated. Markov sources enumerate blocks.

    :param source: the source
    :param n: block length, >= 1
    :param base: logarithm base, > 1
    :param cap: enumeration cap for Markov sources
    :return: increasing attainable values and their probabilities
    """
    if n < 1:
        raise ValueError(f"block length must be >= 1, given {n}")

    if source.kind == "iid":
        probs = source.symbol_pmf.probs
        positive = probs > 0
        letter_values = -numpy.log(probs[positive])
        letter_probs = probs[positive]
        values, weights = numpy.zeros(1), numpy.ones(1)
        for _ in range(n):
            values, weights = _merge_atoms(
                (values[:, None] + letter_values[None, :]).ravel(),
                (weights[:, None] * letter_probs[None, :]).ravel(),
            )
    else:
        block = block_pmf(source, n, cap).probs
        positive = block > 0
        values, weights = _merge_atoms(-numpy.log(block[positive]), block[positive])

    return values / (n * math.log(base)) + 0.0, weights


def sampled_self_information(
    source: SourceModel, symbols: numpy.ndarray, base: float = 2.0
) -> numpy.ndarray:
    """
    :param source: the source the blocks were drawn from
    :param symbols: (trials, n) array of symbol indices
    :param base: logarithm base, > 1
    :return: normalized self-information of every block
    """
    n = symbols.shape[1]
    with numpy.errstate(divide="ignore"):
        if source.kind == "iid":
            log_prob = numpy.log(source.symbol_pmf.probs)[symbols].sum(axis=1)
        else:
            log_prob = numpy.log(source.initial.probs)[symbols[:, 0]]
            log_transition = numpy.log(source.transition)
            steps = log_transition[symbols[:, :-1], symbols[:, 1:]]
            log_prob = log_prob + steps.sum(axis=1)
    return -log_prob / (n * math.log(base))


def f_spectrum_with_radius(
    source: SourceModel,
    n: int,
    R: float,
    base: float = 2.0,
    mode: SpectrumMode = "exact",
    trials: int = 100_000,
    seed: int = 0,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Tuple[float, float]:
    """
    :return: F_n(R) = Pr[(1/n) log 1/P(X^n) >= R] and its confidence radius,
        zero in exact mode and CONFIDENCE_Z binomial deviations in mc mode
    """
    if mode == "exact":
        values, probs = self_information_spectrum(source, n, base, cap)
        tail = float(probs[values >= R - _COMPARE_TOL].sum())
        return min(max(tail, 0.0), 1.0), 0.0

    if mode != "mc":
        raise ValueError(f"unknown spectrum mode {mode!r}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, given {trials}")

    rng = numpy.random.default_rng(seed)
    hits = 0
    remaining = trials
    while remaining:
        count = min(remaining, _MC_CHUNK)
        symbols = sample_blocks(source, n, count, rng)
        values = sampled_self_information(source, symbols, base)
        hits += int(numpy.count_nonzero(values >= R - _COMPARE_TOL))
        remaining -= count

    estimate = hits / trials
    radius = binomial_radius(estimate, trials, CONFIDENCE_Z)
    logger.debug(f"F_{n}({R}) ~ {estimate:.6g} +- {radius:.3g} from {trials} blocks")
    return estimate, radius


def f_spectrum(
    source: SourceModel,
    n: int,
    R: float,
    base: float = 2.0,
    mode: SpectrumMode = "exact",
    trials: int = 100_000,
    seed: int = 0,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """
    Tail of the normalized self-information at R

    :param source: the source
    :param n: block length, >= 1
    :param R: rate threshold in log-base units per symbol
    :param base: logarithm base, > 1
    :param mode: 'exact' enumeration or 'mc' Monte Carlo
    :param trials: Monte Carlo sample size
    :param seed: Monte Carlo seed
    :param cap: enumeration cap in exact mode
    :return: Pr[(1/n) log 1/P(X^n) >= R] in [0, 1]
    """
    return f_spectrum_with_radius(source, n, R, base, mode, trials, seed, cap)[0]


def rate_for_perception(
    source: SourceModel,
    n: int,
    S: float,
    base: float = 2.0,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """
    inf{R : F_n(R) <= S}, the smallest attainable self-information value v
    whose strict tail Pr[Z > v] is at most S. Zero when S >= 1.

    :param source: the source
    :param n: block length, >= 1
    :param S: perception level in [0, 1]
    :param base: logarithm base, > 1
    :param cap: enumeration cap for Markov sources
    :return: the perception floor in log-base units per symbol
    """
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"S must be in [0, 1], given {S}")
    if S >= 1.0:
        return 0.0

    values, probs = self_information_spectrum(source, n, base, cap)
    # strict tail above each atom
    tails = numpy.clip(1.0 - numpy.cumsum(probs), 0.0, None)
    index = int(numpy.argmax(tails <= S + _COMPARE_TOL))
    return float(values[index])


def best_support_tv(p: Pmf, M: int) -> float:
    """
    Smallest variational distance from p of any pmf supported on at most M
    labels, 1 - (sum of the M largest probabilities)

    :param p: the pmf
    :param M: support size bound, >= 1
    :return: the distance in [0, 1]
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, given {M}")
    # stable sort keeps the lowest block index among equal probabilities
    order = numpy.argsort(-p.probs, kind="stable")
    kept = float(p.probs[order[:M]].sum())
    return max(0.0, 1.0 - kept) + 0.0
