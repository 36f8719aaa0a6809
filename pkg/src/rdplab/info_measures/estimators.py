"""
Empirical estimators: plug-in pmfs, binomial confidence radii and the
finite-sample surrogate of the limit superior in probability.
"""

import math
from typing import Hashable, Sequence

import numpy

from rdplab.source_models import Pmf
from rdplab.utils import EmptySamplesError

__all__ = [
    "CONFIDENCE_Z",
    "DEFAULT_P_LIMSUP_EPS",
    "empirical_pmf",
    "empirical_pmf_from_indices",
    "binomial_radius",
    "p_limsup_estimate",
]

CONFIDENCE_Z = 3.0
DEFAULT_P_LIMSUP_EPS = 0.01


def empirical_pmf(samples: Sequence[Hashable], alphabet: Sequence[Hashable]) -> Pmf:
    """
    :param samples: observed symbols, each in alphabet
    :param alphabet: ordered alphabet of the returned pmf
    :return: relative frequencies of the samples over alphabet
    :raises EmptySamplesError: if no samples are given
    """
    alphabet = tuple(alphabet)
    if len(samples) == 0:
        raise EmptySamplesError("cannot estimate a pmf from zero samples")

    positions = {label: idx for idx, label in enumerate(alphabet)}
    try:
        indices = numpy.fromiter(
            (positions[sample] for sample in samples), dtype=numpy.int64
        )
    except KeyError as err:
        raise ValueError(f"sample {err.args[0]!r} is not in the alphabet") from err

    return empirical_pmf_from_indices(indices, alphabet)


def empirical_pmf_from_indices(
    indices: numpy.ndarray, alphabet: Sequence[Hashable]
) -> Pmf:
    """
    :param indices: observed alphabet positions
    :param alphabet: ordered alphabet of the returned pmf
    :return: relative frequencies of the observed positions
    """
    indices = numpy.asarray(indices, dtype=numpy.int64)
    if indices.size == 0:
        raise EmptySamplesError("cannot estimate a pmf from zero samples")
    counts = numpy.bincount(indices, minlength=len(alphabet))
    if counts.shape[0] != len(alphabet):
        raise ValueError("sample indices fall outside the alphabet")
    return Pmf(tuple(alphabet), counts / indices.size)


def binomial_radius(p_hat: float, trials: int, z: float = CONFIDENCE_Z) -> float:
    """
    :param p_hat: observed proportion (or mean of a [0, 1] variable)
    :param trials: number of independent trials
    :param z: number of standard deviations
    :return: z * sqrt(p_hat (1 - p_hat) / trials)
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, given {trials}")
    variance = min(max(p_hat * (1.0 - p_hat), 0.0), 0.25)
    return z * math.sqrt(variance / trials)


def p_limsup_estimate(
    samples: Sequence[float], eps: float = DEFAULT_P_LIMSUP_EPS
) -> float:
    """
    Smallest observed value alpha such that the fraction of samples strictly
    greater than alpha is at most eps.

    >>> p_limsup_estimate(list(range(1, 101)), eps=0.05)
    95.0

    :param samples: observed realizations
    :param eps: tail tolerance in (0, 1)
    :return: the finite-sample surrogate of the p-limsup
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), given {eps}")
    values = numpy.sort(numpy.asarray(samples, dtype=numpy.float64))
    if values.size == 0:
        raise EmptySamplesError("p-limsup estimate needs at least one sample")

    above = values.size - numpy.searchsorted(values, values, side="right")
    allowed = math.floor(eps * values.size + 1e-9)
    first = int(numpy.argmax(above <= allowed))
    return float(values[first])
