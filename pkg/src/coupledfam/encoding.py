"""JSON-friendly encodings of scalars and matrices in both backends.

Floating entries encode as ``[re, im]`` pairs of floats; exact entries as
``"p/q"`` strings (real) or ``["p/q", "r/s"]`` pairs (complex rational).
These encodings are shared by the family file format, certificates, and
CLI reports so that identical inputs produce byte-identical output.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .linalg import GaussianRational, is_exact

__all__ = ["encode_entry", "decode_rational_entry", "encode_matrix", "decode_complex_entry"]


def _frac_str(f: Fraction) -> str:
    return str(f)  # "p/q" or "p"


def encode_entry(v):
    """Encode one matrix entry for JSON."""
    if isinstance(v, GaussianRational):
        if v.im == 0:
            return _frac_str(v.re)
        return [_frac_str(v.re), _frac_str(v.im)]
    c = complex(v)
    return [c.real, c.imag]


def decode_rational_entry(raw) -> GaussianRational:
    """Inverse of :func:`encode_entry` for the exact backend."""
    if isinstance(raw, (str, int)):
        return GaussianRational(Fraction(raw))
    if isinstance(raw, list) and len(raw) == 2:
        return GaussianRational(Fraction(raw[0]), Fraction(raw[1]))
    raise ValueError(f"malformed rational entry: {raw!r}")


def decode_complex_entry(raw) -> complex:
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 \
            and all(isinstance(x, (int, float)) for x in raw):
        return complex(raw[0], raw[1])
    raise ValueError(f"malformed complex entry: {raw!r}")


def encode_matrix(m: np.ndarray) -> list:
    """Nested-list encoding of a matrix in either backend."""
    if is_exact(m):
        return [[encode_entry(m[i, j]) for j in range(m.shape[1])]
                for i in range(m.shape[0])]
    a = np.asarray(m, dtype=complex)
    return [[[float(a[i, j].real), float(a[i, j].imag)] for j in range(a.shape[1])]
            for i in range(a.shape[0])]
