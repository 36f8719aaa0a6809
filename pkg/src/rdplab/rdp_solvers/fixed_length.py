"""
The fixed-length rate under average distortion: the larger of the
rate-distortion term and the perception floor of the information spectrum.
"""

from typing import Optional

from loguru import logger

from rdplab.rdp_solvers.blahut_arimoto import DEFAULT_BA_TOL, blahut_arimoto
from rdplab.rdp_solvers.channel import DistortionSpec
from rdplab.rdp_solvers.tradeoff import TradeoffPoint
from rdplab.source_models import SourceModel, block_pmf
from rdplab.spectrum import rate_for_perception

__all__ = [
    "DEFAULT_FA_BLOCK_LENGTH",
    "MARKOV_BLOCK_LIMIT",
    "MARKOV_SPECTRUM_LIMIT",
    "default_spectrum_length",
    "markov_block_length",
    "rfa_evaluate",
]

DEFAULT_FA_BLOCK_LENGTH = 64
MARKOV_BLOCK_LIMIT = 256
MARKOV_SPECTRUM_LIMIT = 2**16


def markov_block_length(
    alphabet_size: int, n: int, limit: int = MARKOV_BLOCK_LIMIT
) -> int:
    """
    :return: the largest m <= n with alphabet_size**m <= limit, at least 1
    """
    m = 1
    while m < n and alphabet_size ** (m + 1) <= limit:
        m += 1
    return m


def default_spectrum_length(
    source: SourceModel, n: int = DEFAULT_FA_BLOCK_LENGTH
) -> int:
    """
    :return: n for i.i.d. sources, whose spectrum never enumerates blocks,
        and for Markov sources the largest length <= n with at most
        MARKOV_SPECTRUM_LIMIT blocks
    """
    if source.kind == "iid":
        return n
    return markov_block_length(source.alphabet_size, n, limit=MARKOV_SPECTRUM_LIMIT)


def rfa_evaluate(
    source: SourceModel,
    delta: DistortionSpec,
    D: float,
    S: float,
    n: int,
    base: float = 2.0,
    K: Optional[int] = None,
    tol: float = DEFAULT_BA_TOL,
) -> TradeoffPoint:
    """
    Evaluate max{R(D), inf{R : F_n(R) <= S}} at block length n.
    For i.i.d. sources the distortion term is the single-letter
    rate-distortion function. For Markov sources it is R_m(D) / m of the
    m-block source with the largest m <= n keeping |alphabet|^m <= 256,
    reported as an upper bound.

    :param source: the source
    :param delta: single-letter distortion certified zero-diagonal
    :param D: per-symbol distortion level
    :param S: perception level in [0, 1]
    :param n: block length of the information spectrum
    :param base: logarithm base, replaced by K when a code alphabet size is given
    :param K: optional code alphabet size
    :param tol: Blahut-Arimoto tolerance
    :return: the tradeoff point with both components reported
    """
    if not delta.zero_diagonal:
        raise ValueError(
            "the fixed-length rate needs a distortion with delta(x, x) = 0 for all x"
        )
    if delta.size != source.alphabet_size or delta.block_length != 1:
        raise ValueError(
            "delta must be a single-letter distortion on the source alphabet"
        )
    if K is not None:
        if K < 2:
            raise ValueError(f"code alphabet size must be >= 2, given {K}")
        base = float(K)

    if source.kind == "iid":
        ba_rate, _ = blahut_arimoto(source.symbol_pmf, delta, D, tol=tol, base=base)
        bound_type = "exact"
    else:
        m = markov_block_length(source.alphabet_size, n)
        ba_rate, _ = blahut_arimoto(
            block_pmf(source, m), delta.for_blocks(m), D, tol=tol, base=base
        )
        bound_type = "upper_bound"
        logger.debug(f"markov distortion term from {m}-blocks: {ba_rate:.6g}")

    floor = rate_for_perception(source, n, S, base=base)
    rate = max(ba_rate, floor)
    logger.debug(
        f"R_fa(D={D}, S={S}, n={n}) = max({ba_rate:.6g}, {floor:.6g}) = {rate:.6g}"
    )
    return TradeoffPoint(
        R=max(rate, 0.0),
        D=D,
        S=S,
        criterion="fa",
        base=base,
        method="blahut_arimoto",
        bound_type=bound_type,
        ba_component=ba_rate,
        spectrum_floor=floor,
    )
