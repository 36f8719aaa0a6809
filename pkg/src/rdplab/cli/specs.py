from pathlib import Path
from typing import Hashable, Sequence

import numpy
import yaml

from rdplab.rdp_solvers import Channel, DistortionSpec

__all__ = ["ChannelSpecError", "parse_distortion", "parse_channel"]


class ChannelSpecError(ValueError):
    """
    A channel specification that does not describe a valid channel on the
    requested alphabet
    """


def parse_distortion(spec: str, alphabet_size: int) -> DistortionSpec:
    """
    :param spec: 'hamming' or the path of a comma separated matrix
    :param alphabet_size: size the matrix must have
    :return: the single-letter distortion
    """
    if spec.strip().lower() == "hamming":
        return DistortionSpec.hamming(alphabet_size)

    path = Path(spec)
    if not path.is_file():
        raise ValueError(f"distortion must be 'hamming' or a CSV file, given {spec!r}")
    delta = DistortionSpec.from_csv(path)
    if delta.size != alphabet_size:
        raise ValueError(
            f"distortion matrix in {spec} has size {delta.size}, "
            f"the source alphabet has {alphabet_size} symbols"
        )
    return delta


def parse_channel(spec: str, support: Sequence[Hashable]) -> Channel:
    """
    Parse a channel on support from one of:
    'identity', 'bsc:q', 'constant:label', 'rows=[[...], ...]' or the path
    of a comma separated row-stochastic matrix.

    :raises ChannelSpecError: on malformed or non-stochastic specifications
    """
    spec = spec.strip()
    support = tuple(support)
    try:
        if spec == "identity":
            return Channel.identity(support)
        if spec.startswith("bsc:"):
            return Channel.bsc(float(spec[len("bsc:"):]), support)
        if spec.startswith("constant:"):
            label = spec[len("constant:"):].strip()
            if label not in support:
                raise ChannelSpecError(f"{label!r} is not one of {support}")
            return Channel.constant(support, label)
        if spec.startswith("rows="):
            rows = yaml.safe_load(spec[len("rows="):])
            return Channel.from_rows(numpy.asarray(rows, dtype=numpy.float64), support)
        if Path(spec).is_file():
            rows = numpy.loadtxt(spec, delimiter=",", ndmin=2, comments="#")
            return Channel.from_rows(rows, support)
    except ChannelSpecError:
        raise
    except (ValueError, TypeError, yaml.YAMLError) as err:
        raise ChannelSpecError(f"invalid channel {spec!r}: {err}") from err

    raise ChannelSpecError(f"unrecognized channel specification {spec!r}")
