"""Coupled matrix families and block-diagonal similarity.

A coupled family over spaces of dimensions ``dims = (n_0, ..., n_{K-1})``
stores one ``n_i x n_j`` block for every ordered pair ``(i, j)``; block
``(i, j)`` maps the j-th space into the i-th.  All blocks share a backend
(floating complex128 or exact object-dtype, see :mod:`coupledfam.linalg`).

Indices are 0-based throughout the API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    conj_t,
    eye_like_backend,
    exact_solve,
    inverse,
    is_exact,
    is_nonsingular,
    max_abs,
    to_float,
    zeros_like_backend,
)

__all__ = [
    "InvalidFamilyError",
    "CoupledFamily",
    "SimilarityWitness",
    "apply_coupled_similarity",
    "coupled_normality_violations",
    "is_coupled_normal",
    "block_offsets",
    "split_blocks",
]


class InvalidFamilyError(ValueError):
    """Raised by validation; carries the first offending block position."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        super().__init__(message)
        self.position = position


def _norm_block(b) -> np.ndarray:
    # lists and real arrays become complex128; object arrays stay exact
    arr = b if isinstance(b, np.ndarray) else np.asarray(b)
    if arr.dtype == object:
        return arr
    return np.asarray(arr, dtype=complex)


def block_offsets(dims: tuple[int, ...]) -> list[int]:
    """Cumulative starting offsets of each space in the assembled matrix."""
    offs = [0]
    for n in dims:
        offs.append(offs[-1] + n)
    return offs


@dataclass(frozen=True)
class CoupledFamily:
    """Immutable K x K grid of coupling blocks over ``dims``."""

    dims: tuple[int, ...]
    blocks: tuple[tuple[np.ndarray, ...], ...]

    @property
    def K(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def exact(self) -> bool:
        return is_exact(self.blocks[0][0])

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    @classmethod
    def from_blocks(cls, blocks) -> "CoupledFamily":
        """Build from a K x K nested sequence; dims read off the diagonal."""
        rows = tuple(tuple(_norm_block(b) for b in row) for row in blocks)
        k = len(rows)
        if any(len(row) != k for row in rows):
            raise InvalidFamilyError(f"expected a {k} x {k} grid of blocks")
        dims = tuple(int(rows[i][i].shape[0]) for i in range(k))
        return cls(dims, rows)

    @classmethod
    def from_block_map(
        cls, dims, block_map: dict[tuple[int, int], np.ndarray], exact: bool = False
    ) -> "CoupledFamily":
        """Build from a sparse {(i, j): block} map; omitted blocks are zero."""
        dims = tuple(int(n) for n in dims)
        k = len(dims)
        grid = []
        for i in range(k):
            row = []
            for j in range(k):
                b = block_map.get((i, j))
                if b is None:
                    b = zeros_like_backend(dims[i], dims[j], exact)
                else:
                    b = _norm_block(b)
                row.append(b)
            grid.append(tuple(row))
        return cls(dims, tuple(grid))

    def shape_violations(self) -> list[tuple[int, int]]:
        """All (i, j) whose block shape or backend disagrees with dims."""
        bad = []
        want_exact = self.exact
        for i in range(self.K):
            for j in range(self.K):
                b = self.blocks[i][j]
                if (
                    not isinstance(b, np.ndarray)
                    or b.ndim != 2
                    or b.shape != (self.dims[i], self.dims[j])
                    or is_exact(b) != want_exact
                ):
                    bad.append((i, j))
        return bad

    def validate(self) -> "CoupledFamily":
        """Return self, or raise InvalidFamilyError at the first bad block."""
        if self.K == 0:
            raise InvalidFamilyError("family must couple at least one space")
        if any(n <= 0 for n in self.dims):
            raise InvalidFamilyError(f"dims must be positive, got {self.dims}")
        if len(self.blocks) != self.K or any(len(r) != self.K for r in self.blocks):
            raise InvalidFamilyError("block grid is not K x K")
        bad = self.shape_violations()
        if bad:
            i, j = bad[0]
            b = self.blocks[i][j]
            got = b.shape if isinstance(b, np.ndarray) else type(b)
            raise InvalidFamilyError(
                f"block ({i}, {j}) should be {self.dims[i]} x {self.dims[j]} "
                f"in a uniform backend, got {got}",
                position=(i, j),
            )
        return self

    def assemble(self) -> np.ndarray:
        """Single (sum dims) x (sum dims) matrix with block (i, j) placed
        at row offset i, column offset j."""
        return np.block([[self.blocks[i][j] for j in range(self.K)]
                         for i in range(self.K)])

    def to_float(self) -> "CoupledFamily":
        if not self.exact:
            return self
        grid = tuple(tuple(to_float(b) for b in row) for row in self.blocks)
        return CoupledFamily(self.dims, grid)

    def conj_transpose(self) -> "CoupledFamily":
        """Family with block (i, j) replaced by block (j, i) conjugate-transposed."""
        grid = tuple(
            tuple(conj_t(self.blocks[j][i]) for j in range(self.K))
            for i in range(self.K)
        )
        return CoupledFamily(self.dims, grid)

    def allclose(self, other: "CoupledFamily", atol: float = 1e-12) -> bool:
        if self.dims != other.dims:
            return False
        for i in range(self.K):
            for j in range(self.K):
                if max_abs(to_float(self.blocks[i][j]) - to_float(other.blocks[i][j])) > atol:
                    return False
        return True


def split_blocks(m: np.ndarray, dims) -> CoupledFamily:
    """Inverse of :meth:`CoupledFamily.assemble`."""
    dims = tuple(int(n) for n in dims)
    offs = block_offsets(dims)
    if m.shape != (offs[-1], offs[-1]):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    grid = tuple(
        tuple(m[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] for j in range(len(dims)))
        for i in range(len(dims))
    )
    return CoupledFamily(dims, grid)


@dataclass(frozen=True)
class SimilarityWitness:
    """Block-diagonal change of basis: one nonsingular n_i x n_i matrix per space."""

    matrices: tuple[np.ndarray, ...]

    @property
    def K(self) -> int:
        return len(self.matrices)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m.shape[0] for m in self.matrices)

    def validate(self, dims=None, tol: TolerancePolicy = DEFAULT_TOL) -> "SimilarityWitness":
        for i, m in enumerate(self.matrices):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise InvalidFamilyError(f"witness matrix {i} is not square", (i, i))
            if dims is not None and m.shape[0] != dims[i]:
                raise InvalidFamilyError(
                    f"witness matrix {i} is {m.shape[0]} x {m.shape[0]}, "
                    f"expected {dims[i]}",
                    (i, i),
                )
            if not is_nonsingular(m, tol):
                raise InvalidFamilyError(f"witness matrix {i} is singular", (i, i))
        return self

    def assemble(self) -> np.ndarray:
        exact = is_exact(self.matrices[0])
        dims = self.dims
        grid = [
            [
                self.matrices[i] if i == j else zeros_like_backend(dims[i], dims[j], exact)
                for j in range(self.K)
            ]
            for i in range(self.K)
        ]
        return np.block(grid)

    def is_unitary(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        for m in self.matrices:
            f = to_float(m)
            if max_abs(conj_t(f) @ f - np.eye(f.shape[0])) > tol.equality_atol:
                return False
        return True

    @classmethod
    def identity(cls, dims, exact: bool = False) -> "SimilarityWitness":
        return cls(tuple(eye_like_backend(int(n), exact) for n in dims))


def apply_coupled_similarity(
    family: CoupledFamily,
    witness: SimilarityWitness,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> CoupledFamily:
    """Conjugated family with block (i, j) equal to T_i^{-1} A_ij T_j.

    The witness must match the family's dims and backend; exact witnesses are
    inverted exactly.
    """
    if witness.K != family.K:
        raise InvalidFamilyError("witness and family couple different numbers of spaces")
    witness.validate(family.dims, tol)
    exact = family.exact
    if any(is_exact(m) != exact for m in witness.matrices):
        raise InvalidFamilyError("witness backend differs from family backend")
    if exact:
        transformed = [
            [
                exact_solve(witness.matrices[i], family.blocks[i][j] @ witness.matrices[j])
                for j in range(family.K)
            ]
            for i in range(family.K)
        ]
    else:
        invs = [inverse(m, tol) for m in witness.matrices]
        transformed = [
            [invs[i] @ family.blocks[i][j] @ witness.matrices[j] for j in range(family.K)]
            for i in range(family.K)
        ]
    return CoupledFamily(family.dims, tuple(tuple(r) for r in transformed))


def coupled_normality_violations(
    family: CoupledFamily, tol: TolerancePolicy = DEFAULT_TOL
) -> list[tuple[int, int]]:
    """Pairs (i, j) where block(i,j)* block(i,j) != block(j,i) block(j,i)*.

    The defining balance condition couples the (i, j) and (j, i) blocks; the
    family is coupled normal when the list is empty.
    """
    bad = []
    for i in range(family.K):
        for j in range(family.K):
            a_ij = family.blocks[i][j]
            a_ji = family.blocks[j][i]
            lhs = conj_t(a_ij) @ a_ij
            rhs = a_ji @ conj_t(a_ji)
            diff = lhs - rhs
            if family.exact:
                if any(v for v in diff.flat):
                    bad.append((i, j))
            else:
                scale = max(1.0, max_abs(lhs), max_abs(rhs))
                if max_abs(diff) > tol.equality_atol * scale:
                    bad.append((i, j))
    return bad


def is_coupled_normal(
    family: CoupledFamily, tol: TolerancePolicy = DEFAULT_TOL
) -> tuple[bool, list[tuple[int, int]]]:
    """(truth, violating pairs) for the coupled normality balance condition."""
    bad = coupled_normality_violations(family, tol)
    return (len(bad) == 0, bad)
