"""
Emission of command results. CSV tables start with '#' metadata lines naming
the schema version, tool version, seed and config hash; JSON results are one
flat object with sorted snake_case keys.
"""

import csv
import json
import math
from typing import Any, Dict, List, Optional, Sequence, TextIO

from rdplab.utils import config_hash
from rdplab.version import version

__all__ = ["format_value", "write_table", "dump_json"]


def format_value(value: Any) -> str:
    """
    :return: a stable text form, floats with ten significant digits
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    return str(value)


def write_table(
    stream: TextIO,
    command: str,
    schema_version: int,
    config: Dict[str, Any],
    seed: Optional[int],
    columns: Sequence[str],
    rows: List[Dict[str, Any]],
):
    stream.write(f"# rdplab {command} schema_version={schema_version}\n")
    stream.write(f"# tool_version={version}\n")
    stream.write(f"# seed={format_value(seed) or 'none'}\n")
    stream.write(f"# config_hash={config_hash(config)}\n")

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True)
