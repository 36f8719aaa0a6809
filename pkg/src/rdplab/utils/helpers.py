"""
General utility helper functions.
Common functions for interfacing with python primitives and command line values.
"""

import hashlib
import json
import math
from typing import Any, List, Union

import numpy

__all__ = [
    "convert_to_bool",
    "parse_range",
    "config_hash",
    "log_base",
    "to_base",
]


def convert_to_bool(val: Any):
    """
    :param val: the value to be converted to a bool,
        supports logical values as strings ie True, t, false, 0
    :return: the boolean representation of the value, if it can't be determined,
        falls back on returning True
    """
    return (
        bool(val)
        if not isinstance(val, str)
        else bool(val) and "f" not in val.lower() and "0" not in val.lower()
    )


def parse_range(spec: Union[str, float, int]) -> List[float]:
    """
    Parse an inclusive `start:stop:step` grid, or a single value

    >>> parse_range("0:0.5:0.25")
    [0.0, 0.25, 0.5]

    :param spec: the grid string, a bare number is a single-point grid
    :return: the grid values in increasing order, rounded to remove
        accumulated floating point error
    """
    if isinstance(spec, (int, float)):
        return [float(spec)]

    parts = [part.strip() for part in str(spec).split(":")]
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {spec!r}")

    start, stop, step = (float(part) for part in parts)
    if step <= 0:
        raise ValueError(f"step must be positive, given {step}")
    if stop < start:
        raise ValueError(f"stop must be >= start, given {start}:{stop}")

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + idx * step, 12) for idx in range(count)]


def config_hash(config: Any) -> str:
    """
    :param config: any json serializable object describing a run
    :return: short, stable sha256 digest of the sorted json form
    """
    payload = json.dumps(config, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def log_base(values: Union[float, numpy.ndarray], base: float):
    """
    :param values: positive values to take the logarithm of
    :param base: logarithm base, must be > 1
    :return: log of values in the given base
    """
    if base <= 1:
        raise ValueError(f"log base must be > 1, given {base}")
    return numpy.log(values) / math.log(base)


def to_base(nats: float, base: float) -> float:
    """
    :param nats: a quantity measured in natural units
    :param base: target logarithm base, must be > 1
    :return: the quantity in log-base units
    """
    if base <= 1:
        raise ValueError(f"log base must be > 1, given {base}")
    return nats / math.log(base)
