import math
from typing import TYPE_CHECKING

import numpy

from rdplab.info_measures import DEFAULT_P_LIMSUP_EPS, p_limsup_estimate
from rdplab.source_models import SourceModel, sample_blocks
from rdplab.utils import AlphabetMismatchError

if TYPE_CHECKING:
    from rdplab.rdp_solvers import Channel

__all__ = ["sup_information_rate_estimate"]


def sup_information_rate_estimate(
    source: SourceModel,
    channel: "Channel",
    n: int,
    eps: float = DEFAULT_P_LIMSUP_EPS,
    trials: int = 10_000,
    seed: int = 0,
    base: float = 2.0,
) -> float:
    """
    Monte Carlo surrogate of the sup-information rate of an i.i.d. source
    sent letter by letter through a single-letter channel: the p-limsup
    estimate of (1/n) log W(Y^n|X^n) / P(Y^n) over sampled pairs.

    :param source: i.i.d. source
    :param channel: single-letter channel on the source alphabet
    :param n: block length
    :param eps: tail tolerance of the p-limsup estimate
    :param trials: number of sampled block pairs
    :param seed: seed of all sampling
    :param base: logarithm base
    :return: estimated rate in log-base units per symbol
    """
    if source.kind != "iid":
        raise ValueError("the information rate estimate needs an i.i.d. source")
    if tuple(channel.x_support) != source.alphabet:
        raise AlphabetMismatchError("channel must act on the source alphabet")

    rng = numpy.random.default_rng(seed)
    x = sample_blocks(source, n, trials, rng)
    y = channel.sample(x, rng)

    output = source.symbol_pmf.probs @ channel.rows
    with numpy.errstate(divide="ignore"):
        density = numpy.log(channel.rows) - numpy.log(output)[None, :]
    per_block = density[x, y].sum(axis=1) / (n * math.log(base))
    return p_limsup_estimate(per_block, eps)
