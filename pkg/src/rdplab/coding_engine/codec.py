"""
The two encoders of the laboratory: a stochastic encoder that draws the
reconstruction block from a channel and codes it losslessly, and a
fixed-length index code for deterministic quantizers.
"""

from typing import List, Sequence, Tuple

import numpy

from rdplab.coding_engine.huffman import (
    Codeword,
    CodeTable,
    encode_lossless,
)
from rdplab.rdp_solvers import Channel
from rdplab.source_models import Block
from rdplab.utils import DecodeError

__all__ = [
    "stochastic_encode",
    "encode_blocks",
    "fixed_length_digits",
    "encode_fixed_length",
    "decode_fixed_length",
]


def stochastic_encode(
    x: Block, channel: Channel, table: CodeTable, seed: int
) -> Tuple[Codeword, Block]:
    """
    Draw Y^n from the channel row of x and code it losslessly

    :param x: the source block
    :param channel: block channel over lexicographically ordered blocks of
        x's length
    :param table: code table built for the output law of the channel
    :param seed: seed of the draw
    :return: the codeword and the reconstruction block it decodes to
    """
    if channel.size != len(x.alphabet) ** x.n:
        raise ValueError(
            f"channel covers {channel.size} blocks, expected {len(x.alphabet) ** x.n}"
        )
    rng = numpy.random.default_rng(seed)
    y_index = int(channel.sample(numpy.array([x.index]), rng)[0])
    return encode_lossless(table, y_index), Block.from_index(y_index, x.n, x.alphabet)


def encode_blocks(table: CodeTable, indices: Sequence[int]) -> List[int]:
    """
    :return: the concatenated codewords of indices
    """
    stream: List[int] = []
    for index in indices:
        stream.extend(encode_lossless(table, index))
    return stream


def fixed_length_digits(M: int, K: int) -> int:
    """
    :return: number of K-ary digits needed to index M codewords
    """
    if M < 1 or K < 2:
        raise ValueError(f"need M >= 1 and K >= 2, given M={M}, K={K}")
    digits, capacity = 0, 1
    while capacity < M:
        capacity *= K
        digits += 1
    return digits


def encode_fixed_length(indices: numpy.ndarray, M: int, K: int) -> numpy.ndarray:
    """
    :param indices: codeword indices in 0..M-1
    :return: (len(indices), digits) array of K-ary digits, most significant first
    """
    indices = numpy.asarray(indices, dtype=numpy.int64)
    if numpy.any((indices < 0) | (indices >= M)):
        raise ValueError(f"indices must lie in 0..{M - 1}")
    width = fixed_length_digits(M, K)
    powers = K ** numpy.arange(width - 1, -1, -1, dtype=numpy.int64)
    return (indices[:, None] // powers[None, :]) % K


def decode_fixed_length(digits: numpy.ndarray, M: int, K: int) -> numpy.ndarray:
    """
    :param digits: (count, width) digit array from encode_fixed_length
    :return: the codeword indices
    :raises DecodeError: on a malformed digit array or an index outside 0..M-1
    """
    width = fixed_length_digits(M, K)
    digits = numpy.asarray(digits, dtype=numpy.int64)
    if digits.ndim != 2 or digits.shape[1] != width:
        raise DecodeError(f"expected rows of {width} digits", offset=0)
    bad = numpy.flatnonzero(((digits < 0) | (digits >= K)).ravel())
    if bad.size:
        raise DecodeError("digit outside the code alphabet", offset=int(bad[0]))
    powers = K ** numpy.arange(width - 1, -1, -1, dtype=numpy.int64)
    indices = digits @ powers
    overflow = numpy.flatnonzero(indices >= M)
    if overflow.size:
        raise DecodeError(f"index exceeds {M - 1}", offset=int(overflow[0]) * width)
    return indices
