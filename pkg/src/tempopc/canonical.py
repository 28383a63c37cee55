"""Canonical JSON serialization shared by all on-disk and on-wire formats.

Every serialized artifact (scans, cluster models, layouts, selections) goes
through :func:`canonical_json_bytes` so that equal inputs always produce
byte-identical output, which is what the golden-file and replay tests pin.
"""

import json
import math


def _reject_non_finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite value {obj!r} cannot be serialized")
    if isinstance(obj, dict):
        for key, value in obj.items():
            if not isinstance(key, str):
                raise ValueError(f"non-string key {key!r} cannot be serialized")
            _reject_non_finite(value)
    elif isinstance(obj, (list, tuple)):
        for value in obj:
            _reject_non_finite(value)


def canonical_json_bytes(obj) -> bytes:
    """Serialize a JSON-compatible object deterministically.

    Keys are sorted, floats use their shortest round-trip repr, NaN and
    infinities are rejected, and the document ends with a newline.
    """
    _reject_non_finite(obj)
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
    return (text + "\n").encode("utf-8")


def canonical_json_loads(data: bytes):
    """Parse JSON bytes, rejecting NaN/Infinity literals."""

    def _no_special(value):
        raise ValueError(f"non-finite literal {value!r} is not allowed")

    return json.loads(data.decode("utf-8"), parse_constant=_no_special)
