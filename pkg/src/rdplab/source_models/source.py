"""
Finite-alphabet information sources: i.i.d. and first-order Markov models,
their block distributions, samplers and entropy rates.
"""

from dataclasses import dataclass, field
from typing import Hashable, Literal, Optional, Sequence, Tuple, Union

import numpy
from loguru import logger

from rdplab.source_models.pmf import PROB_TOL, Block, Pmf, block_label, entropy_nats
from rdplab.utils import (
    EnumerationTooLargeError,
    InfiniteSelfInformationError,
    MultipleStationaryDistributionsError,
    to_base,
)

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "SourceKind",
    "SourceModel",
    "block_pmf",
    "block_support",
    "sample_block",
    "sample_blocks",
    "symbols_to_block_indices",
    "stationary_distribution",
    "entropy_rate",
    "self_information_block",
    "check_enumerable",
]

DEFAULT_ENUMERATION_CAP = 2**24
STATIONARY_TOL = 1e-12
_POWER_ITERATION_MAX = 1_000_000

SourceKind = Literal["iid", "markov"]


def _default_alphabet(size: int) -> Tuple[str, ...]:
    return tuple(str(idx) for idx in range(size))


@dataclass(frozen=True, eq=False)
class SourceModel:
    """
    A stationary description of a finite-alphabet source, either i.i.d.
    with a fixed symbol pmf or a first-order Markov chain.
    Use the `iid`, `markov` and `point_mass` constructors.

    :param kind: 'iid' or 'markov'
    :param alphabet: ordered source alphabet
    :param symbol_pmf: per-symbol pmf for i.i.d. sources
    :param transition: row-stochastic transition matrix for Markov sources,
        rows indexed by the current symbol
    :param initial: pmf of the first symbol for Markov sources
    """

    kind: SourceKind
    alphabet: Tuple[Hashable, ...]
    symbol_pmf: Optional[Pmf] = None
    transition: Optional[numpy.ndarray] = field(default=None, repr=False)
    initial: Optional[Pmf] = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        size = len(self.alphabet)

        if self.kind == "iid":
            if self.symbol_pmf is None:
                raise ValueError("an iid source requires symbol_pmf")
            if self.symbol_pmf.support != self.alphabet:
                raise ValueError("symbol_pmf support must equal the alphabet")
        elif self.kind == "markov":
            if self.transition is None or self.initial is None:
                raise ValueError("a markov source requires transition and initial")
            transition = numpy.array(self.transition, dtype=numpy.float64)
            if transition.shape != (size, size):
                raise ValueError(
                    f"transition must be {size}x{size} to match the alphabet, "
                    f"got shape {transition.shape}"
                )
            if numpy.any(transition < 0):
                raise ValueError("transition entries must be nonnegative")
            row_sums = transition.sum(axis=1)
            if numpy.any(numpy.abs(row_sums - 1.0) > PROB_TOL):
                raise ValueError(f"transition rows must sum to 1, got {row_sums}")
            if self.initial.support != self.alphabet:
                raise ValueError("initial support must equal the alphabet")
            transition.setflags(write=False)
            object.__setattr__(self, "transition", transition)
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")

    @classmethod
    def iid(
        cls,
        probs: Union[Sequence[float], Pmf],
        alphabet: Optional[Sequence[Hashable]] = None,
    ) -> "SourceModel":
        if isinstance(probs, Pmf):
            return cls(kind="iid", alphabet=probs.support, symbol_pmf=probs)
        alphabet = tuple(alphabet) if alphabet else _default_alphabet(len(probs))
        return cls(kind="iid", alphabet=alphabet, symbol_pmf=Pmf(alphabet, probs))

    @classmethod
    def markov(
        cls,
        initial: Sequence[float],
        rows: Sequence[Sequence[float]],
        alphabet: Optional[Sequence[Hashable]] = None,
    ) -> "SourceModel":
        alphabet = tuple(alphabet) if alphabet else _default_alphabet(len(initial))
        return cls(
            kind="markov",
            alphabet=alphabet,
            transition=numpy.asarray(rows, dtype=numpy.float64),
            initial=Pmf(alphabet, initial),
        )

    @classmethod
    def point_mass(
        cls, alphabet: Sequence[Hashable], label: Hashable
    ) -> "SourceModel":
        return cls.iid(Pmf.point_mass(tuple(alphabet), label))

    @property
    def alphabet_size(self) -> int:
        return len(self.alphabet)

    def first_symbol_probs(self) -> numpy.ndarray:
        if self.kind == "iid":
            return self.symbol_pmf.probs
        return self.initial.probs

    def transition_matrix(self) -> numpy.ndarray:
        """
        :return: the transition matrix, for i.i.d. sources every row is the
            symbol pmf
        """
        if self.kind == "iid":
            return numpy.tile(self.symbol_pmf.probs, (self.alphabet_size, 1))
        return self.transition

    def describe(self) -> str:
        if self.kind == "iid":
            probs = ",".join(f"{p:g}" for p in self.symbol_pmf.probs)
            return f"iid:{probs}"
        init = ",".join(f"{p:g}" for p in self.initial.probs)
        rows = ",".join(
            "[" + ",".join(f"{p:g}" for p in row) + "]" for row in self.transition
        )
        return f"markov:init=[{init}];rows=[{rows}]"


def check_enumerable(
    alphabet_size: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> int:
    """
    :param alphabet_size: number of symbols
    :param n: block length
    :param cap: enumeration cap on the number of blocks
    :return: the number of blocks |alphabet|^n
    :raises EnumerationTooLargeError: if the block count exceeds the cap
    """
    if n < 1:
        raise ValueError(f"block length must be >= 1, given {n}")
    size = alphabet_size**n
    if size > cap:
        raise EnumerationTooLargeError(size=size, cap=cap)
    return size


def block_support(
    alphabet: Sequence[Hashable], n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Tuple[str, ...]:
    """
    :return: labels of all |alphabet|^n blocks in lexicographic order
    """
    alphabet = tuple(alphabet)
    count = check_enumerable(len(alphabet), n, cap)
    return tuple(
        block_label(Block.from_index(idx, n, alphabet).symbols) for idx in range(count)
    )


def block_pmf(
    source: SourceModel, n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Pmf:
    """
    Enumerate the distribution of X^n over all blocks in lexicographic order

    :param source: the source to enumerate
    :param n: block length, >= 1
    :param cap: maximum number of blocks to enumerate
    :return: Pmf over the |alphabet|^n blocks
    :raises EnumerationTooLargeError: if |alphabet|^n exceeds cap
    """
    check_enumerable(source.alphabet_size, n, cap)
    size = source.alphabet_size

    probs = numpy.array(source.first_symbol_probs(), dtype=numpy.float64)
    if source.kind == "iid":
        symbol_probs = source.symbol_pmf.probs
        for _ in range(n - 1):
            probs = numpy.kron(probs, symbol_probs)
    else:
        transition = source.transition
        for _ in range(n - 1):
            # the last symbol of block b is b % size
            last = numpy.arange(probs.shape[0]) % size
            probs = (probs[:, None] * transition[last]).reshape(-1)

    return Pmf(support=block_support(source.alphabet, n, cap), probs=probs)


def _inverse_cdf(cdf: numpy.ndarray, uniforms: numpy.ndarray) -> numpy.ndarray:
    # cdf rows end in exactly 1.0 so zero-probability tail symbols are never drawn
    picks = (uniforms[:, None] >= cdf).sum(axis=1)
    return numpy.minimum(picks, cdf.shape[-1] - 1)


def _stochastic_cdf(probs: numpy.ndarray) -> numpy.ndarray:
    cdf = numpy.cumsum(probs, axis=-1)
    cdf[..., -1] = 1.0
    return cdf


def sample_blocks(
    source: SourceModel, n: int, trials: int, rng: numpy.random.Generator
) -> numpy.ndarray:
    """
    Draw independent blocks from the source

    :param source: the source to sample
    :param n: block length, >= 1
    :param trials: number of blocks
    :param rng: generator supplying all randomness
    :return: integer array of shape (trials, n) holding symbol indices
    """
    if n < 1:
        raise ValueError(f"block length must be >= 1, given {n}")

    uniforms = rng.random((trials, n))
    symbols = numpy.empty((trials, n), dtype=numpy.int64)

    if source.kind == "iid":
        cdf = _stochastic_cdf(source.symbol_pmf.probs)
        symbols[:] = numpy.minimum(
            numpy.searchsorted(cdf, uniforms, side="right"), source.alphabet_size - 1
        )
        return symbols

    initial_cdf = _stochastic_cdf(source.initial.probs)
    transition_cdf = _stochastic_cdf(numpy.array(source.transition))
    symbols[:, 0] = _inverse_cdf(
        numpy.broadcast_to(initial_cdf, (trials, source.alphabet_size)),
        uniforms[:, 0],
    )
    for step in range(1, n):
        symbols[:, step] = _inverse_cdf(
            transition_cdf[symbols[:, step - 1]], uniforms[:, step]
        )
    return symbols


def symbols_to_block_indices(
    symbols: numpy.ndarray, alphabet_size: int
) -> numpy.ndarray:
    """
    :param symbols: (trials, n) array of symbol indices
    :param alphabet_size: number of source symbols
    :return: lexicographic block index of every row
    """
    n = symbols.shape[1]
    weights = alphabet_size ** numpy.arange(n - 1, -1, -1, dtype=numpy.int64)
    return symbols @ weights


def sample_block(source: SourceModel, n: int, seed: int) -> Block:
    """
    :param source: the source to sample
    :param n: block length, >= 1
    :param seed: seed fully determining the draw
    :return: a single block distributed as X^n
    """
    rng = numpy.random.default_rng(seed)
    indices = sample_blocks(source, n, 1, rng)[0]
    return Block(
        symbols=tuple(source.alphabet[idx] for idx in indices),
        alphabet=source.alphabet,
    )


def stationary_distribution(source: SourceModel) -> numpy.ndarray:
    """
    :param source: the source, i.i.d. sources return the symbol pmf
    :return: the unique stationary distribution of the transition matrix
    :raises MultipleStationaryDistributionsError: if the chain has more than
        one closed class
    """
    if source.kind == "iid":
        return numpy.array(source.symbol_pmf.probs)

    transition = source.transition
    eigenvalues, eigenvectors = numpy.linalg.eig(transition.T)
    unit = numpy.flatnonzero(numpy.abs(eigenvalues - 1.0) < 1e-9)
    if unit.size > 1:
        raise MultipleStationaryDistributionsError(
            f"transition matrix has eigenvalue 1 with multiplicity {unit.size}, "
            "the stationary distribution is not unique"
        )

    if unit.size == 1:
        vector = numpy.real(eigenvectors[:, unit[0]])
        vector = vector / vector.sum()
        if numpy.all(vector > -STATIONARY_TOL):
            return numpy.clip(vector, 0.0, None) / numpy.clip(vector, 0.0, None).sum()

    logger.debug("eigenvector solve unusable, falling back to power iteration")
    # the lazy chain shares the stationary law and is aperiodic
    lazy = 0.5 * (numpy.eye(source.alphabet_size) + transition)
    current = numpy.full(source.alphabet_size, 1.0 / source.alphabet_size)
    for _ in range(_POWER_ITERATION_MAX):
        updated = current @ lazy
        if numpy.abs(updated - current).sum() < STATIONARY_TOL:
            return updated / updated.sum()
        current = updated
    raise MultipleStationaryDistributionsError(
        "power iteration did not settle on a stationary distribution"
    )


def entropy_rate(source: SourceModel, base: float = 2.0) -> float:
    """
    :param source: the source
    :param base: logarithm base, > 1
    :return: entropy per symbol; for Markov sources the stationary rate
        sum_i pi_i H(T_i)
    """
    if source.kind == "iid":
        return to_base(entropy_nats(source.symbol_pmf.probs), base)

    stationary = stationary_distribution(source)
    row_entropies = numpy.array([entropy_nats(row) for row in source.transition])
    return to_base(float(stationary @ row_entropies), base)


def _block_log_prob(source: SourceModel, indices: Sequence[int]) -> float:
    with numpy.errstate(divide="ignore"):
        if source.kind == "iid":
            return float(numpy.sum(numpy.log(source.symbol_pmf.probs[list(indices)])))
        log_prob = float(numpy.log(source.initial.probs[indices[0]]))
        for prev, cur in zip(indices[:-1], indices[1:]):
            log_prob += float(numpy.log(source.transition[prev, cur]))
        return log_prob


def self_information_block(
    source: SourceModel, block: Block, base: float = 2.0
) -> float:
    """
    :param source: the source
    :param block: a block of positive probability
    :param base: logarithm base, > 1
    :return: (1/n) log(1 / P_{X^n}(block))
    :raises InfiniteSelfInformationError: if the block has probability zero
    """
    if block.alphabet != source.alphabet:
        raise ValueError("block alphabet does not match the source alphabet")
    log_prob = _block_log_prob(source, block.symbol_indices)
    if not numpy.isfinite(log_prob):
        raise InfiniteSelfInformationError(
            f"block {block.label!r} has probability zero under the source"
        )
    return to_base(-log_prob / block.n, base) + 0.0
