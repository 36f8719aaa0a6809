from typing import Tuple

import numpy
from loguru import logger

from rdplab.rdp_solvers import DistortionSpec
from rdplab.source_models import Pmf

__all__ = ["design_greedy_quantizer", "quantizer_distortion"]


def design_greedy_quantizer(
    block_pmf: Pmf, delta_n: DistortionSpec, M: int
) -> Tuple[numpy.ndarray, numpy.ndarray]:
    """
    Build an M-codeword fixed-length code. The first reproduction block is
    the best constant reconstruction; each further one is the block that
    lowers the expected distortion of nearest-reproduction coding the most.
    Reproductions are kept in increasing block order and each source block
    maps to its nearest reproduction, ties to the lowest index.

    :param block_pmf: law of the source blocks
    :param delta_n: block distortion
    :param M: number of codewords, 1 <= M <= number of blocks
    :return: quantizer (codeword index in 0..M-1 per source block) and
        reproduction (block index per codeword)
    """
    size = len(block_pmf)
    if not 1 <= M <= size:
        raise ValueError(f"M must be in 1..{size}, given {M}")
    if delta_n.size != size:
        raise ValueError(f"distortion covers {delta_n.size} blocks, pmf has {size}")

    probs = block_pmf.probs
    matrix = delta_n.matrix
    chosen = [int(numpy.argmin(probs @ matrix))]
    nearest = matrix[:, chosen[0]].copy()

    while len(chosen) < M:
        # expected distortion after adding each candidate column
        candidates = probs @ numpy.minimum(nearest[:, None], matrix)
        candidates[chosen] = numpy.inf
        pick = int(numpy.argmin(candidates))
        chosen.append(pick)
        nearest = numpy.minimum(nearest, matrix[:, pick])

    reproduction = numpy.array(sorted(chosen), dtype=numpy.int64)
    quantizer = numpy.argmin(matrix[:, reproduction], axis=1).astype(numpy.int64)
    logger.debug(
        f"greedy codebook of {M} blocks, expected distortion "
        f"{quantizer_distortion(block_pmf, delta_n, quantizer, reproduction):.6g}"
    )
    return quantizer, reproduction


def quantizer_distortion(
    block_pmf: Pmf,
    delta_n: DistortionSpec,
    quantizer: numpy.ndarray,
    reproduction: numpy.ndarray,
) -> float:
    """
    :return: expected per-symbol distortion of the deterministic code
    """
    targets = numpy.asarray(reproduction)[numpy.asarray(quantizer)]
    per_block = delta_n.matrix[numpy.arange(len(block_pmf)), targets]
    return float(block_pmf.probs @ per_block) / delta_n.block_length
