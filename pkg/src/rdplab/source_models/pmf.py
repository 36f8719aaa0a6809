"""
Probability mass functions over ordered finite alphabets and the blocks
drawn from them.
"""

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Sequence, Tuple, Union

import numpy

__all__ = [
    "PROB_TOL",
    "Pmf",
    "Block",
    "block_label",
    "entropy_nats",
    "as_probs",
]

PROB_TOL = 1e-12


def _frozen_array(values: Iterable[float]) -> numpy.ndarray:
    array = numpy.array(values, dtype=numpy.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Pmf:
    """
    A probability mass function over an ordered finite alphabet.
    Instances are immutable, `probs` is a read-only float64 array.

    :param support: ordered, distinct symbol labels
    :param probs: probability of each label, in support order
    """

    support: Tuple[Hashable, ...]
    probs: numpy.ndarray = field(repr=False)

    def __post_init__(self):
        support = tuple(self.support)
        probs = _frozen_array(self.probs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

        if probs.ndim != 1:
            raise ValueError(f"probs must be one dimensional, got shape {probs.shape}")
        if len(support) != probs.shape[0]:
            raise ValueError(
                f"support has {len(support)} labels but probs has {probs.shape[0]}"
            )
        if len(set(support)) != len(support):
            raise ValueError("support labels must be distinct")
        if len(support) == 0:
            raise ValueError("support must not be empty")
        if numpy.any(probs < 0) or not numpy.all(numpy.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities must sum to 1, sum is {total!r}")

    @classmethod
    def uniform(cls, support: Sequence[Hashable]) -> "Pmf":
        size = len(support)
        return cls(support=tuple(support), probs=numpy.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, support: Sequence[Hashable], label: Hashable) -> "Pmf":
        probs = numpy.zeros(len(support))
        probs[tuple(support).index(label)] = 1.0
        return cls(support=tuple(support), probs=probs)

    @classmethod
    def from_dict(cls, mapping: Dict[Hashable, float]) -> "Pmf":
        return cls(support=tuple(mapping.keys()), probs=list(mapping.values()))

    def __len__(self) -> int:
        return len(self.support)

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"{label!r}: {prob:.6g}" for label, prob in zip(self.support, self.probs)
        )
        return f"Pmf({{{pairs}}})"

    def index(self, label: Hashable) -> int:
        return self.support.index(label)

    def prob(self, label: Hashable) -> float:
        return float(self.probs[self.index(label)])

    def as_dict(self) -> Dict[Hashable, float]:
        return {label: float(prob) for label, prob in zip(self.support, self.probs)}

    @property
    def support_size(self) -> int:
        """
        :return: number of labels carrying positive probability
        """
        return int(numpy.count_nonzero(self.probs))

    def allclose(self, other: "Pmf", atol: float = 1e-12) -> bool:
        return self.support == other.support and numpy.allclose(
            self.probs, other.probs, rtol=0.0, atol=atol
        )


@dataclass(frozen=True)
class Block:
    """
    A length-n block of source symbols.

    :param symbols: the symbols of the block, each a member of alphabet
    :param alphabet: the ordered source alphabet the block is drawn from
    """

    symbols: Tuple[Hashable, ...]
    alphabet: Tuple[Hashable, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(self.symbols) < 1:
            raise ValueError("a block must hold at least one symbol")
        unknown = [sym for sym in self.symbols if sym not in self.alphabet]
        if unknown:
            raise ValueError(f"symbols {unknown} are not in alphabet {self.alphabet}")

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def symbol_indices(self) -> Tuple[int, ...]:
        return tuple(self.alphabet.index(sym) for sym in self.symbols)

    @property
    def index(self) -> int:
        """
        :return: lexicographic index of the block among all
            |alphabet|^n blocks, first symbol most significant
        """
        size = len(self.alphabet)
        value = 0
        for sym_idx in self.symbol_indices:
            value = value * size + sym_idx
        return value

    @property
    def label(self) -> str:
        return block_label(self.symbols)

    @classmethod
    def from_index(
        cls, index: int, n: int, alphabet: Sequence[Hashable]
    ) -> "Block":
        alphabet = tuple(alphabet)
        size = len(alphabet)
        if not 0 <= index < size**n:
            raise ValueError(f"block index {index} out of range for n={n}")
        digits = []
        for _ in range(n):
            index, digit = divmod(index, size)
            digits.append(alphabet[digit])
        return cls(symbols=tuple(reversed(digits)), alphabet=alphabet)


def block_label(symbols: Sequence[Hashable]) -> str:
    """
    :param symbols: the symbols of a block
    :return: printable label, symbols concatenated when all labels are single
        characters and joined by '-' otherwise
    """
    labels = [str(sym) for sym in symbols]
    if all(len(label) == 1 for label in labels):
        return "".join(labels)
    return "-".join(labels)


def as_probs(value: Union[Pmf, Sequence[float], numpy.ndarray]) -> numpy.ndarray:
    """
    :param value: a Pmf or a raw probability vector
    :return: the probability vector as a float64 array
    """
    if isinstance(value, Pmf):
        return value.probs
    return numpy.asarray(value, dtype=numpy.float64)


def entropy_nats(probs: numpy.ndarray) -> float:
    """
    :param probs: probability vector (or any array of probabilities)
    :return: Shannon entropy in nats with 0 log 0 = 0
    """
    probs = numpy.asarray(probs, dtype=numpy.float64)
    positive = probs[probs > 0]
    # + 0.0 folds -0.0 into 0.0
    return float(-numpy.sum(positive * numpy.log(positive))) + 0.0
