"""
Channels (conditional distributions of the reconstruction given the source)
and distortion measures, plus the two quantities every solver constrains:
expected distortion and the induced output marginal.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, Optional, Sequence, Tuple, Union

import numpy

from rdplab.source_models import (
    DEFAULT_ENUMERATION_CAP,
    PROB_TOL,
    Pmf,
    block_support,
    check_enumerable,
)
from rdplab.utils import AlphabetMismatchError

__all__ = [
    "Channel",
    "DistortionSpec",
    "expected_distortion",
    "per_symbol_distortion",
    "output_marginal",
    "constant_output_distortion",
]


def _default_support(size: int) -> Tuple[str, ...]:
    return tuple(str(idx) for idx in range(size))


def _block_digits(size: int, n: int) -> numpy.ndarray:
    """
    :return: (n, size**n) array, row i holds symbol i of every block in
        lexicographic order
    """
    indices = numpy.arange(size**n, dtype=numpy.int64)
    powers = size ** numpy.arange(n - 1, -1, -1, dtype=numpy.int64)
    return (indices[None, :] // powers[:, None]) % size


@dataclass(frozen=True, eq=False)
class Channel:
    """
    A row-stochastic conditional distribution P(y | x). Source and
    reconstruction share one ordered alphabet.

    :param x_support: ordered input labels, indexing rows
    :param y_support: ordered output labels, indexing columns, equal to
        x_support
    :param rows: matrix of transition probabilities
    """

    x_support: Tuple[Hashable, ...]
    y_support: Tuple[Hashable, ...]
    rows: numpy.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "x_support", tuple(self.x_support))
        object.__setattr__(self, "y_support", tuple(self.y_support))
        if self.x_support != self.y_support:
            raise AlphabetMismatchError(
                "source and reconstruction alphabets must be equal, given "
                f"{self.x_support} and {self.y_support}"
            )

        rows = numpy.array(self.rows, dtype=numpy.float64)
        if rows.shape != (len(self.x_support), len(self.y_support)):
            raise ValueError(
                f"rows shape {rows.shape} does not match the supports "
                f"({len(self.x_support)}, {len(self.y_support)})"
            )
        if numpy.any(rows < 0) or not numpy.all(numpy.isfinite(rows)):
            raise ValueError("channel entries must be finite and nonnegative")
        sums = rows.sum(axis=1)
        if numpy.any(numpy.abs(sums - 1.0) > PROB_TOL):
            raise ValueError(f"channel rows must sum to 1, got {sums}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(
        cls,
        rows: Union[Sequence[Sequence[float]], numpy.ndarray],
        support: Optional[Sequence[Hashable]] = None,
    ) -> "Channel":
        rows = numpy.asarray(rows, dtype=numpy.float64)
        support = tuple(support) if support is not None else _default_support(len(rows))
        return cls(x_support=support, y_support=support, rows=rows)

    @classmethod
    def identity(cls, support: Sequence[Hashable]) -> "Channel":
        return cls.from_rows(numpy.eye(len(support)), support)

    @classmethod
    def constant(cls, support: Sequence[Hashable], label: Hashable) -> "Channel":
        support = tuple(support)
        rows = numpy.zeros((len(support), len(support)))
        rows[:, support.index(label)] = 1.0
        return cls.from_rows(rows, support)

    @classmethod
    def bsc(
        cls, crossover: float, support: Sequence[Hashable] = ("0", "1")
    ) -> "Channel":
        """
        :param crossover: probability of flipping the input symbol
        :param support: the two symbol labels
        :return: binary symmetric channel
        """
        if not 0.0 <= crossover <= 1.0:
            raise ValueError(f"crossover must be in [0, 1], given {crossover}")
        if len(support) != 2:
            raise ValueError("a binary symmetric channel needs exactly two labels")
        rows = [[1.0 - crossover, crossover], [crossover, 1.0 - crossover]]
        return cls.from_rows(rows, support)

    @classmethod
    def from_mapping(
        cls,
        support: Sequence[Hashable],
        mapping: Union[Sequence[int], Dict[Hashable, Hashable]],
    ) -> "Channel":
        """
        Deterministic encoder y = m(x) as a 0/1 channel

        :param support: the common alphabet
        :param mapping: output index per input index, or a label to label dict
        """
        support = tuple(support)
        if isinstance(mapping, dict):
            targets = [support.index(mapping[label]) for label in support]
        else:
            targets = [int(target) for target in mapping]
        if len(targets) != len(support):
            raise ValueError("mapping must assign an output to every input")
        rows = numpy.zeros((len(support), len(support)))
        rows[numpy.arange(len(support)), targets] = 1.0
        return cls.from_rows(rows, support)

    @property
    def size(self) -> int:
        return len(self.x_support)

    @property
    def is_deterministic(self) -> bool:
        return bool(numpy.all((self.rows == 0.0) | (self.rows == 1.0)))

    def per_letter_product(
        self, n: int, cap: int = DEFAULT_ENUMERATION_CAP
    ) -> "Channel":
        """
        :param n: block length
        :param cap: enumeration cap on the number of block channel entries
        :return: the memoryless channel acting letter by letter on length n
            blocks, over lexicographically ordered block labels
        """
        check_enumerable(self.size, 2 * n, cap)
        rows = self.rows
        for _ in range(n - 1):
            rows = numpy.kron(rows, self.rows)
        support = block_support(self.x_support, n, cap)
        return Channel(x_support=support, y_support=support, rows=rows)

    def sample(
        self, x_indices: numpy.ndarray, rng: numpy.random.Generator
    ) -> numpy.ndarray:
        """
        :param x_indices: input positions
        :param rng: generator supplying all randomness
        :return: one output position per input, drawn from the matching row
        """
        x_indices = numpy.asarray(x_indices, dtype=numpy.int64)
        cdf = numpy.cumsum(self.rows, axis=1)
        cdf[:, -1] = 1.0
        uniforms = rng.random(x_indices.shape)
        picks = (uniforms[..., None] >= cdf[x_indices]).sum(axis=-1)
        return numpy.minimum(picks, self.size - 1)


@dataclass(frozen=True, eq=False)
class DistortionSpec:
    """
    A nonnegative distortion matrix delta(x, y).

    :param matrix: distortion values, rows indexed by source symbol
    :param zero_diagonal: certification that delta(x, x) = 0 for every x
    :param block_length: number of source symbols each row label spans,
        solvers divide by it to report per-symbol values
    """

    matrix: numpy.ndarray = field(repr=False)
    zero_diagonal: bool = False
    block_length: int = 1

    def __post_init__(self):
        matrix = numpy.array(self.matrix, dtype=numpy.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"distortion matrix must be square, got {matrix.shape}")
        if numpy.any(matrix < 0) or not numpy.all(numpy.isfinite(matrix)):
            raise ValueError("distortion entries must be finite and nonnegative")
        if self.zero_diagonal and numpy.any(numpy.diag(matrix) != 0):
            raise ValueError("zero_diagonal is set but delta(x, x) != 0 for some x")
        if self.block_length < 1:
            raise ValueError(f"block_length must be >= 1, given {self.block_length}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def hamming(cls, size: int) -> "DistortionSpec":
        return cls(matrix=1.0 - numpy.eye(size), zero_diagonal=True)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]]) -> "DistortionSpec":
        """
        :return: a spec certified zero-diagonal whenever its diagonal is zero
        """
        matrix = numpy.asarray(matrix, dtype=numpy.float64)
        zero_diagonal = bool(numpy.all(numpy.diag(matrix) == 0))
        return cls(matrix=matrix, zero_diagonal=zero_diagonal)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "DistortionSpec":
        matrix = numpy.loadtxt(path, delimiter=",", ndmin=2, comments="#")
        return cls.from_matrix(matrix)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def for_blocks(
        self, n: int, cap: int = DEFAULT_ENUMERATION_CAP
    ) -> "DistortionSpec":
        """
        :param n: block length
        :param cap: enumeration cap on the number of block matrix entries
        :return: additive block distortion delta_n(x^n, y^n) = sum_i delta(x_i, y_i)
            over lexicographically ordered blocks
        """
        check_enumerable(self.size, 2 * n, cap)
        digits = _block_digits(self.size, n)
        matrix = numpy.zeros((self.size**n, self.size**n))
        for position in digits:
            matrix += self.matrix[position[:, None], position[None, :]]
        return DistortionSpec(
            matrix=matrix,
            zero_diagonal=self.zero_diagonal,
            block_length=self.block_length * n,
        )


def _check_dimensions(
    p_x: Pmf, channel: Optional[Channel], delta: Optional[DistortionSpec]
):
    if channel is not None and channel.x_support != p_x.support:
        raise AlphabetMismatchError(
            "channel inputs must be indexed by the pmf support, given "
            f"{channel.x_support} and {p_x.support}"
        )
    if delta is not None and delta.size != len(p_x):
        raise AlphabetMismatchError(
            f"distortion matrix has size {delta.size}, pmf has {len(p_x)} labels"
        )


def expected_distortion(p_x: Pmf, channel: Channel, delta: DistortionSpec) -> float:
    """
    :return: sum_{x,y} p(x) W(y|x) delta(x, y)
    """
    _check_dimensions(p_x, channel, delta)
    return float(numpy.einsum("x,xy,xy->", p_x.probs, channel.rows, delta.matrix))


def per_symbol_distortion(p_x: Pmf, channel: Channel, delta: DistortionSpec) -> float:
    """
    :return: expected distortion divided by the block length of delta
    """
    return expected_distortion(p_x, channel, delta) / delta.block_length


def output_marginal(p_x: Pmf, channel: Channel) -> Pmf:
    """
    :return: the law of Y, y -> sum_x p(x) W(y|x)
    """
    _check_dimensions(p_x, channel, None)
    probs = p_x.probs @ channel.rows
    return Pmf(channel.y_support, probs / probs.sum())


def constant_output_distortion(p_x: Pmf, delta: DistortionSpec) -> Tuple[float, int]:
    """
    :return: min_y E[delta(X, y)] and the lowest index attaining it, both
        for the raw (unnormalized) delta
    """
    _check_dimensions(p_x, None, delta)
    costs = p_x.probs @ delta.matrix
    best = int(numpy.argmin(costs))
    return float(costs[best]), best
