"""
Parsing of source specifications from strings or files.

Supported forms::

    iid:0.3,0.7
    markov:init=[0.5,0.5];rows=[[0.9,0.1],[0.2,0.8]]
    markov:init=[1,0];rows=[[1,0],[0,1]];alphabet=[a,b]
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Union

import yaml

from rdplab.source_models.source import SourceModel

__all__ = ["parse_source"]


def _load_list(text: str, key: str) -> List[Any]:
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ValueError(f"could not parse {key}={text!r}: {err}") from err
    if not isinstance(value, list):
        raise ValueError(f"{key} must be a bracketed list, given {text!r}")
    return value


def _parse_fields(body: str) -> Dict[str, str]:
    fields = {}
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"expected key=value, given {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def _parse_iid(body: str) -> SourceModel:
    fields = body.split(";")
    try:
        probs = [float(value) for value in fields[0].split(",") if value.strip()]
    except ValueError as err:
        raise ValueError(f"iid probabilities must be numbers, given {body!r}") from err

    alphabet = None
    if len(fields) > 1:
        extra = _parse_fields(";".join(fields[1:]))
        if set(extra) - {"alphabet"}:
            raise ValueError(f"unknown iid fields {sorted(set(extra) - {'alphabet'})}")
        alphabet = [str(label) for label in _load_list(extra["alphabet"], "alphabet")]

    return SourceModel.iid(probs, alphabet=alphabet)


def _parse_markov(body: str) -> SourceModel:
    fields = _parse_fields(body)
    missing = {"init", "rows"} - set(fields)
    if missing:
        raise ValueError(f"markov source is missing fields {sorted(missing)}")
    unknown = set(fields) - {"init", "rows", "alphabet"}
    if unknown:
        raise ValueError(f"unknown markov fields {sorted(unknown)}")

    initial = [float(value) for value in _load_list(fields["init"], "init")]
    rows = [
        [float(value) for value in row] for row in _load_list(fields["rows"], "rows")
    ]
    alphabet = None
    if "alphabet" in fields:
        alphabet = [str(label) for label in _load_list(fields["alphabet"], "alphabet")]

    return SourceModel.markov(initial, rows, alphabet=alphabet)


def parse_source(spec: Union[str, Path]) -> SourceModel:
    """
    Build a SourceModel from a spec string or a file holding one.
    Default alphabet labels are "0", "1", ... in order.

    :param spec: the spec string, or a path to a file whose (stripped)
        content is a spec string
    :return: the parsed source
    :raises ValueError: if the spec is malformed or describes an invalid source
    """
    text = str(spec).strip()
    if os.path.isfile(text):
        text = Path(text).read_text().strip()

    kind, sep, body = text.partition(":")
    if not sep:
        raise ValueError(
            f"source spec must start with 'iid:' or 'markov:', given {text!r}"
        )

    kind = kind.strip().lower()
    if kind == "iid":
        return _parse_iid(body)
    if kind == "markov":
        return _parse_markov(body)

    raise ValueError(f"unknown source kind {kind!r}, expected 'iid' or 'markov'")
