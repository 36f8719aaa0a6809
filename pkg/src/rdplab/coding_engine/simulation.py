"""
Monte Carlo runs of the two coding schemes. Trials are split into fixed-size
chunks, chunk c draws from default_rng([seed, c]) and chunk statistics are
combined in chunk order, so a report depends only on its inputs and seed,
never on the number of workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy
from loguru import logger
from tqdm import tqdm

from rdplab.coding_engine.codec import (
    decode_fixed_length,
    encode_blocks,
    encode_fixed_length,
    fixed_length_digits,
)
from rdplab.coding_engine.huffman import CodeTable, build_huffman, decode_stream
from rdplab.coding_engine.report import SimulationReport
from rdplab.info_measures import (
    CONFIDENCE_Z,
    DEFAULT_P_LIMSUP_EPS,
    entropy,
    p_limsup_estimate,
    tv_distance,
)
from rdplab.logger import log_metrics
from rdplab.rdp_solvers import (
    Channel,
    DistortionSpec,
    expected_distortion,
    output_marginal,
)
from rdplab.source_models import (
    Pmf,
    SourceModel,
    block_pmf,
    sample_blocks,
    symbols_to_block_indices,
)
from rdplab.spectrum import best_support_tv
from rdplab.utils import ConverseViolationError

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "TV_SUPPORT_RATIO",
    "block_distortion",
    "simulate_variable_length",
    "simulate_fixed_length",
]

DEFAULT_CHUNK_SIZE = 4096
TV_SUPPORT_RATIO = 10

# maps source block indices and a generator to (reconstruction indices,
# code lengths in K-ary digits) after a full encode and decode
Transmit = Callable[
    [numpy.ndarray, numpy.random.Generator], Tuple[numpy.ndarray, numpy.ndarray]
]


@dataclass
class _ChunkStats:
    count: int
    length_sum: float
    length_sq_sum: float
    distortion: numpy.ndarray
    decoded_counts: numpy.ndarray


def block_distortion(
    delta: DistortionSpec, alphabet_size: int, n: int
) -> DistortionSpec:
    """
    :return: delta itself when it already covers n-blocks, its additive
        extension when it is single-letter
    """
    if delta.block_length == n and delta.size == alphabet_size**n:
        return delta
    if delta.block_length == 1 and delta.size == alphabet_size:
        return delta.for_blocks(n)
    raise ValueError(
        f"distortion of size {delta.size} and block length {delta.block_length} "
        f"does not fit blocks of length {n} over {alphabet_size} symbols"
    )


def _run_chunks(
    source: SourceModel,
    n: int,
    trials: int,
    seed: int,
    delta_n: DistortionSpec,
    transmit: Transmit,
    chunk_size: int,
    workers: int,
    show_progress: bool,
) -> List[_ChunkStats]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, given {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, given {workers}")
    size = delta_n.size
    chunks = math.ceil(trials / chunk_size)

    def run(chunk: int) -> _ChunkStats:
        rng = numpy.random.default_rng([seed, chunk])
        count = min(chunk_size, trials - chunk * chunk_size)
        symbols = sample_blocks(source, n, count, rng)
        x = symbols_to_block_indices(symbols, source.alphabet_size)
        y, lengths = transmit(x, rng)
        lengths = lengths.astype(numpy.float64)
        return _ChunkStats(
            count=count,
            length_sum=float(lengths.sum()),
            length_sq_sum=float((lengths**2).sum()),
            distortion=delta_n.matrix[x, y] / n,
            decoded_counts=numpy.bincount(y, minlength=size),
        )

    with ThreadPoolExecutor(max_workers=workers) as executor:
        # map yields in submission order
        return list(
            tqdm(
                executor.map(run, range(chunks)),
                total=chunks,
                desc="simulating",
                disable=not show_progress,
            )
        )


def _aggregate(
    stats: List[_ChunkStats],
    n: int,
    source_law: Pmf,
    eps: float,
) -> Tuple[dict, int]:
    trials = sum(chunk.count for chunk in stats)
    mean_length = sum(chunk.length_sum for chunk in stats) / trials
    mean_square = sum(chunk.length_sq_sum for chunk in stats) / trials
    length_var = max(mean_square - mean_length**2, 0.0)
    distortion = numpy.concatenate([chunk.distortion for chunk in stats])
    counts = numpy.sum([chunk.decoded_counts for chunk in stats], axis=0)

    decoded = Pmf(source_law.support, counts / trials)
    support = int(numpy.count_nonzero(counts))
    return {
        "trials": trials,
        "avg_len_per_symbol": mean_length / n,
        "avg_len_radius": CONFIDENCE_Z * math.sqrt(length_var / trials) / n,
        "empirical_distortion": float(distortion.mean()),
        "distortion_radius": CONFIDENCE_Z * float(distortion.std()) / math.sqrt(trials),
        "empirical_tv": tv_distance(decoded, source_law),
        "max_distortion_quantile": p_limsup_estimate(distortion, eps),
        "quantile_eps": eps,
        "decoded_counts": [int(count) for count in counts],
    }, support


def _tv_bias_bound(support: int, trials: int) -> float:
    if support * TV_SUPPORT_RATIO > trials:
        logger.warning(
            f"{support} blocks against {trials} trials, the plug-in variational "
            "distance is dominated by its bias"
        )
    return math.sqrt(support / trials)


def _log_report(report: SimulationReport):
    log_metrics(
        f"{report.criterion} n={report.n} trials={report.trials}",
        rate=report.avg_len_per_symbol,
        rate_radius=report.avg_len_radius,
        theory_rate=report.theory_rate,
        distortion=report.empirical_distortion,
        distortion_radius=report.distortion_radius,
        theory_distortion=report.theory_distortion,
        tv=report.empirical_tv,
        theory_tv=report.theory_tv,
    )


def simulate_variable_length(
    source: SourceModel,
    channel: Channel,
    delta: DistortionSpec,
    n: int,
    trials: int,
    K: int = 2,
    seed: int = 0,
    eps: float = DEFAULT_P_LIMSUP_EPS,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    show_progress: bool = False,
) -> SimulationReport:
    """
    Run the stochastic encoder followed by a Huffman code of the channel's
    output law. Every trial samples X^n, draws Y^n from the channel, encodes
    and decodes it, and records length, distortion and the decoded block.

    :param source: the source
    :param channel: block channel over the n-blocks of the source
    :param delta: single-letter or n-block distortion
    :param n: block length
    :param trials: number of simulated blocks
    :param K: code alphabet size
    :param seed: master seed
    :param eps: tail tolerance of the maximum-distortion quantile
    :param workers: threads running chunks concurrently
    :param chunk_size: trials per chunk
    :param show_progress: show a progress bar over chunks
    :return: measured statistics next to their exact values
    """
    p_xn = block_pmf(source, n)
    delta_n = block_distortion(delta, source.alphabet_size, n)
    if channel.x_support != p_xn.support:
        raise ValueError(f"channel must act on the {len(p_xn)} blocks of length {n}")

    q_yn = output_marginal(p_xn, channel)
    table: CodeTable = build_huffman(q_yn, K)
    support = int(numpy.count_nonzero(q_yn.probs))

    def transmit(x: numpy.ndarray, rng: numpy.random.Generator):
        y = channel.sample(x, rng)
        stream = encode_blocks(table, y)
        decoded = numpy.array(
            decode_stream(table, stream, count=len(y)), dtype=numpy.int64
        )
        if not numpy.array_equal(decoded, y):
            raise RuntimeError("lossless decoding did not return the encoded blocks")
        return decoded, table.lengths[decoded]

    stats = _run_chunks(
        source, n, trials, seed, delta_n, transmit, chunk_size, workers, show_progress
    )
    measured, _ = _aggregate(stats, n, p_xn, eps)

    report = SimulationReport(
        criterion="va",
        n=n,
        k=K,
        seed=seed,
        tv_bias_bound=_tv_bias_bound(support, trials),
        support_size=support,
        theory_rate=table.expected_length(q_yn) / n,
        theory_entropy_rate=entropy(q_yn, base=K) / n,
        theory_distortion=expected_distortion(p_xn, channel, delta_n) / n,
        theory_tv=tv_distance(q_yn, p_xn),
        **measured,
    )
    _log_report(report)
    return report


def simulate_fixed_length(
    source: SourceModel,
    quantizer: numpy.ndarray,
    reproduction: numpy.ndarray,
    delta: DistortionSpec,
    n: int,
    trials: int,
    seed: int = 0,
    K: int = 2,
    eps: float = DEFAULT_P_LIMSUP_EPS,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    show_progress: bool = False,
) -> SimulationReport:
    """
    Run a deterministic fixed-length code: each block is mapped to one of M
    codeword indices, sent as ceil(log_K M) digits and decoded to its
    reproduction block. The rate is log_K(M) / n exactly.

    :param source: the source
    :param quantizer: codeword index in 0..M-1 for every source block
    :param reproduction: block index reproduced by every codeword
    :param delta: single-letter or n-block distortion
    :param n: block length
    :param trials: number of simulated blocks
    :param seed: master seed
    :param K: code alphabet size
    :return: measured statistics, with the support-size bound on the
        variational distance in best_support_tv
    :raises ConverseViolationError: if the measured distance falls below the
        support-size bound by more than the estimation radius
    """
    p_xn = block_pmf(source, n)
    delta_n = block_distortion(delta, source.alphabet_size, n)
    quantizer = numpy.asarray(quantizer, dtype=numpy.int64)
    reproduction = numpy.asarray(reproduction, dtype=numpy.int64)
    M = len(reproduction)
    if M < 1:
        raise ValueError("the codebook must hold at least one block")
    if quantizer.shape != (len(p_xn),) or numpy.any((quantizer < 0) | (quantizer >= M)):
        raise ValueError(
            f"quantizer must map each of {len(p_xn)} blocks into 0..{M - 1}"
        )
    if numpy.any((reproduction < 0) | (reproduction >= len(p_xn))):
        raise ValueError("reproduction entries must be block indices")

    mapping = reproduction[quantizer]
    channel = Channel.from_mapping(p_xn.support, mapping)
    q_yn = output_marginal(p_xn, channel)
    width = fixed_length_digits(M, K)

    def transmit(x: numpy.ndarray, rng: numpy.random.Generator):
        digits = encode_fixed_length(quantizer[x], M, K)
        decoded = decode_fixed_length(digits, M, K)
        if not numpy.array_equal(decoded, quantizer[x]):
            raise RuntimeError("fixed-length decoding did not return the sent indices")
        return reproduction[decoded], numpy.full(len(x), width)

    stats = _run_chunks(
        source, n, trials, seed, delta_n, transmit, chunk_size, workers, show_progress
    )
    measured, observed_support = _aggregate(stats, n, p_xn, eps)

    rate = math.log(M) / (n * math.log(K))
    measured["avg_len_per_symbol"] = rate
    measured["avg_len_radius"] = 0.0
    bias_bound = _tv_bias_bound(observed_support, trials)
    floor = best_support_tv(p_xn, M)

    report = SimulationReport(
        criterion="fa",
        n=n,
        k=K,
        seed=seed,
        tv_bias_bound=bias_bound,
        support_size=int(numpy.count_nonzero(q_yn.probs)),
        theory_rate=rate,
        theory_entropy_rate=entropy(q_yn, base=K) / n,
        theory_distortion=expected_distortion(p_xn, channel, delta_n) / n,
        theory_tv=tv_distance(q_yn, p_xn),
        codebook_size=M,
        best_support_tv=floor,
        **measured,
    )
    _log_report(report)

    if report.empirical_tv < floor - CONFIDENCE_Z * bias_bound:
        raise ConverseViolationError(
            f"measured variational distance {report.empirical_tv:.6g} is below the "
            f"support bound {floor:.6g} beyond the estimation radius"
        )
    return report
