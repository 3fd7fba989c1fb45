"""Family file format: JSON with 1-based block keys and two scalar modes.

Layout:

    {
      "scalar": "rational" | "complex64",
      "dims": [n_1, ..., n_K],
      "blocks": {"i,j": [[entry, ...], ...], ...},
      "meta": {...}                              # optional, round-tripped
    }

Block keys are 1-based "i,j" strings; omitted keys mean zero blocks.
Rational entries are "p/q" strings (or ["p/q", "r/s"] pairs when an
imaginary part is present); floating entries are [re, im] pairs.  Parsing
a serialized family reproduces it exactly on the exact backend and to
full double precision on the floating backend.
"""

from __future__ import annotations

import json

import numpy as np

from .encoding import decode_complex_entry, decode_rational_entry, encode_entry
from .family import CoupledFamily
from .linalg import is_zero_matrix

__all__ = ["FamilyFileError", "parse_family", "serialize_family", "family_meta"]

_SCALAR_TAGS = ("rational", "complex64")


class FamilyFileError(ValueError):
    """Malformed family file; carries the offending position when known."""

    def __init__(self, message: str, position: str | None = None):
        super().__init__(message if position is None
                         else f"{message} (at block {position})")
        self.position = position


def _reject_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise FamilyFileError(f"duplicate key {key!r} in family file")
        seen.add(key)
    return dict(pairs)


def _parse_block_key(key: str, k: int) -> tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2:
        raise FamilyFileError(f"block key {key!r} is not of the form \"i,j\"")
    try:
        i, j = int(parts[0]), int(parts[1])
    except ValueError:
        raise FamilyFileError(f"block key {key!r} has non-integer indices") from None
    if not (1 <= i <= k and 1 <= j <= k):
        raise FamilyFileError(
            f"block key {key!r} outside the 1..{k} index range"
        )
    return i - 1, j - 1


def _decode_block(raw, shape: tuple[int, int], exact: bool, key: str) -> np.ndarray:
    if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
        raise FamilyFileError("block is not a nested array", key)
    rows = len(raw)
    cols = len(raw[0]) if rows else 0
    if any(len(r) != cols for r in raw):
        raise FamilyFileError("block rows have uneven lengths", key)
    if (rows, cols) != shape:
        raise FamilyFileError(
            f"block is {rows} x {cols}, dims require {shape[0]} x {shape[1]}", key
        )
    if exact:
        out = np.empty(shape, dtype=object)
    else:
        out = np.zeros(shape, dtype=complex)
    for r in range(rows):
        for c in range(cols):
            try:
                out[r, c] = (decode_rational_entry(raw[r][c]) if exact
                             else decode_complex_entry(raw[r][c]))
            except ValueError as exc:
                raise FamilyFileError(
                    f"entry ({r + 1}, {c + 1}): {exc}", key
                ) from None
    return out


def parse_family(text: str) -> CoupledFamily:
    """Parse and validate a family file; raises FamilyFileError on any
    malformed content, naming the offending block where possible."""
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except FamilyFileError:
        raise
    except json.JSONDecodeError as exc:
        raise FamilyFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FamilyFileError("top level must be a JSON object")
    scalar = doc.get("scalar")
    if scalar not in _SCALAR_TAGS:
        raise FamilyFileError(
            f"scalar must be one of {_SCALAR_TAGS}, got {scalar!r}"
        )
    dims = doc.get("dims")
    if (
        not isinstance(dims, list)
        or not dims
        or any(not isinstance(n, int) or isinstance(n, bool) or n <= 0 for n in dims)
    ):
        raise FamilyFileError("dims must be a non-empty list of positive integers")
    blocks_raw = doc.get("blocks", {})
    if not isinstance(blocks_raw, dict):
        raise FamilyFileError("blocks must be an object keyed by \"i,j\"")
    exact = scalar == "rational"
    k = len(dims)
    block_map: dict[tuple[int, int], np.ndarray] = {}
    for key, raw in blocks_raw.items():
        i, j = _parse_block_key(key, k)
        block_map[(i, j)] = _decode_block(raw, (dims[i], dims[j]), exact, key)
    return CoupledFamily.from_block_map(tuple(dims), block_map, exact=exact).validate()


def serialize_family(
    family: CoupledFamily, meta: dict | None = None, indent: int = 2
) -> str:
    """Serialize with zero blocks omitted; byte-deterministic output."""
    family.validate()
    doc: dict = {
        "scalar": "rational" if family.exact else "complex64",
        "dims": list(family.dims),
        "blocks": {},
    }
    for i in range(family.K):
        for j in range(family.K):
            block = family.blocks[i][j]
            # only exactly-zero blocks may be omitted (lossless round trip)
            omit = is_zero_matrix(block) if family.exact else not block.any()
            if omit:
                continue
            doc["blocks"][f"{i + 1},{j + 1}"] = [
                [encode_entry(block[r, c]) for c in range(block.shape[1])]
                for r in range(block.shape[0])
            ]
    if meta is not None:
        doc["meta"] = meta
    return json.dumps(doc, indent=indent, sort_keys=True)


def family_meta(text: str) -> dict:
    """The optional meta object of a family file ({} when absent)."""
    doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    meta = doc.get("meta", {}) if isinstance(doc, dict) else {}
    return meta if isinstance(meta, dict) else {}
