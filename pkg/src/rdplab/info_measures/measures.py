"""
Entropy, divergence, mutual information and variational distance for pmfs
on common ordered alphabets.
All quantities are computed in nats and converted to the requested base.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Hashable, Tuple

import numpy

from rdplab.source_models import PROB_TOL, Pmf, entropy_nats
from rdplab.utils import AlphabetMismatchError, DivergenceInfiniteError, to_base

if TYPE_CHECKING:
    from rdplab.rdp_solvers import Channel

__all__ = [
    "JointPmf",
    "entropy",
    "binary_entropy",
    "tv_distance",
    "kl_divergence",
    "joint_pmf",
    "mutual_information",
]


@dataclass(frozen=True, eq=False)
class JointPmf:
    """
    Joint distribution of a pair (X, Y) on finite alphabets.

    :param x_support: ordered labels of X, indexing rows
    :param y_support: ordered labels of Y, indexing columns
    :param probs: matrix of joint probabilities
    """

    x_support: Tuple[Hashable, ...]
    y_support: Tuple[Hashable, ...]
    probs: numpy.ndarray = field(repr=False)

    def __post_init__(self):
        probs = numpy.array(self.probs, dtype=numpy.float64)
        object.__setattr__(self, "x_support", tuple(self.x_support))
        object.__setattr__(self, "y_support", tuple(self.y_support))
        if probs.shape != (len(self.x_support), len(self.y_support)):
            raise ValueError(
                f"probs shape {probs.shape} does not match supports "
                f"({len(self.x_support)}, {len(self.y_support)})"
            )
        if numpy.any(probs < 0):
            raise ValueError("joint probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"joint probabilities must sum to 1, sum is {total!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def marginal_x(self) -> Pmf:
        return Pmf(self.x_support, self.probs.sum(axis=1))

    def marginal_y(self) -> Pmf:
        return Pmf(self.y_support, self.probs.sum(axis=0))


def entropy(p: Pmf, base: float = 2.0) -> float:
    """
    :param p: the pmf
    :param base: logarithm base, > 1
    :return: Shannon entropy -sum p log p with 0 log 0 = 0
    """
    return to_base(entropy_nats(p.probs), base)


def binary_entropy(p: float, base: float = 2.0) -> float:
    """
    :param p: probability of one of the two outcomes, in [0, 1]
    :param base: logarithm base, > 1
    :return: entropy of a Bernoulli(p) variable
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], given {p}")
    return to_base(entropy_nats(numpy.array([p, 1.0 - p])), base)


def _check_common_support(p: Pmf, q: Pmf):
    if p.support != q.support:
        raise AlphabetMismatchError(
            f"pmfs must share one ordered support, given {p.support} and {q.support}"
        )


def tv_distance(p: Pmf, q: Pmf) -> float:
    """
    Variational distance between two pmfs on the same ordered alphabet

    :param p: first pmf
    :param q: second pmf
    :return: (1/2) sum |p - q|, in [0, 1]
    :raises AlphabetMismatchError: if the supports differ
    """
    _check_common_support(p, q)
    return float(min(1.0, 0.5 * numpy.abs(p.probs - q.probs).sum()))


def kl_divergence(p: Pmf, q: Pmf, base: float = 2.0) -> float:
    """
    :param p: first pmf
    :param q: reference pmf
    :param base: logarithm base, > 1
    :return: sum p log(p / q), zero iff p == q
    :raises AlphabetMismatchError: if the supports differ
    :raises DivergenceInfiniteError: if p puts mass where q has none
    """
    _check_common_support(p, q)
    mask = p.probs > 0
    if numpy.any(q.probs[mask] == 0):
        offending = [
            label for label, m, qv in zip(p.support, mask, q.probs) if m and qv == 0
        ]
        raise DivergenceInfiniteError(
            f"p is not absolutely continuous w.r.t. q at {offending}"
        )
    nats = float(numpy.sum(p.probs[mask] * numpy.log(p.probs[mask] / q.probs[mask])))
    return to_base(max(nats, 0.0), base)


def joint_pmf(p_x: Pmf, channel: "Channel") -> JointPmf:
    """
    :param p_x: input pmf
    :param channel: conditional distribution with rows indexed by p_x support
    :return: the joint law p(x) W(y|x)
    """
    if tuple(channel.x_support) != p_x.support:
        raise AlphabetMismatchError(
            "channel inputs must be indexed by the pmf support, given "
            f"{channel.x_support} and {p_x.support}"
        )
    probs = p_x.probs[:, None] * channel.rows
    return JointPmf(p_x.support, channel.y_support, probs)


def mutual_information(p_x: Pmf, channel: "Channel", base: float = 2.0) -> float:
    """
    :param p_x: input pmf
    :param channel: conditional distribution with rows indexed by p_x support
    :param base: logarithm base, > 1
    :return: I(X; Y) under the joint law induced by p_x and channel
    """
    joint = joint_pmf(p_x, channel).probs
    q_y = joint.sum(axis=0)
    product = p_x.probs[:, None] * q_y[None, :]
    mask = joint > 0
    nats = float(numpy.sum(joint[mask] * numpy.log(joint[mask] / product[mask])))
    return to_base(max(nats, 0.0), base)
