"""Graded reducibility: witnesses, closures, certification, block forms.

A subspace family (U_0, ..., U_{K-1}) reduces a coupled family when every
block maps block(i, j) U_j into U_i.  The grading is classified by strength:

* ``not-reducing``: some containment fails
* ``trivial``: all U_i = 0 or all U_i = V_i
* ``reducible``: containments hold, some U_i != 0 and some U_j != V_j
* ``properly-reducible``: additionally some single U_i is nonzero proper
* ``strongly-reducible``: every U_i is nonzero proper

Certification routes:

* :func:`coupled_irreducible_burnside` -- floating span-growth certificate:
  the matrix algebra generated by the assembled family together with the
  coordinate projections has dimension N^2 exactly when no nontrivial graded
  invariant family exists (graded invariant subspaces of the family are the
  invariant subspaces of that algebra, because the projections force any
  invariant subspace to split along the grading).
* :func:`chain_classify` -- exhaustive enumeration when every diagonal
  block has a finite, known invariant-subspace lattice (full nilpotent
  Jordan blocks, 1-dimensional spaces, and real 2x2 blocks with negative
  discriminant, whose only real invariant subspaces are 0 and the plane).
  Any invariant family must pick each U_i from the i-th diagonal lattice,
  so enumerating lattice products is exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .encoding import encode_matrix
from .family import CoupledFamily, SimilarityWitness, apply_coupled_similarity
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    complete_to_basis,
    conj_t,
    containment_residual,
    exact_matrix,
    exact_zeros,
    is_exact,
    kernel_basis,
    matrix_rank,
    max_abs,
    orthonormal_columns,
    pivot_columns,
    range_basis,
    subspace_contains,
    to_float,
    zeros_like_backend,
)

__all__ = [
    "PreconditionError",
    "BudgetExceededError",
    "Strength",
    "SubspaceFamily",
    "verify_reducing",
    "containment_table",
    "closure_from_seed",
    "BurnsideCertificate",
    "coupled_irreducible_burnside",
    "search_witness",
    "ReducibilityVerdict",
    "chain_classify",
    "BlockFormResult",
    "block_form_transform",
    "complement_family",
]


class PreconditionError(ValueError):
    """An operation's precondition failed; the message names it."""


class BudgetExceededError(RuntimeError):
    """A bounded search or enumeration ran out of budget."""


class Strength(IntEnum):
    NOT_REDUCING = 0
    TRIVIAL = 1
    REDUCIBLE = 2
    PROPERLY_REDUCIBLE = 3
    STRONGLY_REDUCIBLE = 4

    @property
    def label(self) -> str:
        return _STRENGTH_LABELS[self]


_STRENGTH_LABELS = {
    Strength.NOT_REDUCING: "not-reducing",
    Strength.TRIVIAL: "trivial",
    Strength.REDUCIBLE: "reducible",
    Strength.PROPERLY_REDUCIBLE: "properly-reducible",
    Strength.STRONGLY_REDUCIBLE: "strongly-reducible",
}


@dataclass(frozen=True)
class SubspaceFamily:
    """One subspace per coupled space, stored as basis columns.

    ``bases[i]`` is an ``n_i x d_i`` matrix whose columns span the i-th
    subspace (``d_i = 0`` for the zero subspace).
    """

    bases: tuple[np.ndarray, ...]

    @property
    def K(self) -> int:
        return len(self.bases)

    @property
    def ambient_dims(self) -> tuple[int, ...]:
        return tuple(int(b.shape[0]) for b in self.bases)

    def dims_profile(self, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[int, ...]:
        return tuple(matrix_rank(b, tol) for b in self.bases)

    @property
    def exact(self) -> bool:
        return any(is_exact(b) for b in self.bases)

    @classmethod
    def zero(cls, dims, exact: bool = False) -> "SubspaceFamily":
        return cls(tuple(zeros_like_backend(int(n), 0, exact) for n in dims))

    @classmethod
    def full(cls, dims, exact: bool = False) -> "SubspaceFamily":
        from .linalg import eye_like_backend

        return cls(tuple(eye_like_backend(int(n), exact) for n in dims))

    @classmethod
    def from_map(cls, dims, vectors: dict[int, np.ndarray], exact: bool = False) -> "SubspaceFamily":
        """Sparse constructor; indices absent from the map get the zero subspace."""
        bases = []
        for i, n in enumerate(dims):
            v = vectors.get(i)
            if v is None:
                bases.append(zeros_like_backend(int(n), 0, exact))
            else:
                v = np.asarray(v) if not isinstance(v, np.ndarray) else v
                if v.ndim == 1:
                    v = v.reshape(-1, 1)
                # coerce to the requested backend so one family never mixes
                if exact and v.dtype != object:
                    v = exact_matrix(v)
                elif not exact and v.dtype == object:
                    v = to_float(v)
                elif not exact:
                    v = np.asarray(v, dtype=complex)
                bases.append(v)
        return cls(tuple(bases))

    def normalized(self, tol: TolerancePolicy = DEFAULT_TOL) -> "SubspaceFamily":
        """Prune each basis to independent columns (orthonormal when floating)."""
        out = []
        for b in self.bases:
            if is_exact(b):
                cols = pivot_columns(b)
                out.append(b[:, cols] if cols else exact_zeros(b.shape[0], 0))
            else:
                out.append(orthonormal_columns(np.asarray(b, dtype=complex), tol))
        return SubspaceFamily(tuple(out))

    def to_float(self) -> "SubspaceFamily":
        return SubspaceFamily(tuple(to_float(b) for b in self.bases))

    def to_json(self, tol: TolerancePolicy = DEFAULT_TOL) -> dict:
        return {
            "dims": list(self.ambient_dims),
            "subspace_dims": list(self.dims_profile(tol)),
            "bases": [encode_matrix(b) for b in self.bases],
        }


def _check_family_subspaces(family: CoupledFamily, sub: SubspaceFamily) -> None:
    if sub.K != family.K:
        raise PreconditionError("subspace family and coupled family sizes differ")
    for i in range(family.K):
        if sub.bases[i].shape[0] != family.dims[i]:
            raise PreconditionError(
                f"subspace {i} lives in dimension {sub.bases[i].shape[0]}, "
                f"family space has dimension {family.dims[i]}"
            )


def _grade_strength(dims: tuple[int, ...], sub_dims: tuple[int, ...]) -> Strength:
    some_nonzero = any(d > 0 for d in sub_dims)
    some_not_full = any(d < n for d, n in zip(sub_dims, dims))
    if not (some_nonzero and some_not_full):
        return Strength.TRIVIAL
    if all(0 < d < n for d, n in zip(sub_dims, dims)):
        return Strength.STRONGLY_REDUCIBLE
    if any(0 < d < n for d, n in zip(sub_dims, dims)):
        return Strength.PROPERLY_REDUCIBLE
    return Strength.REDUCIBLE


def verify_reducing(
    family: CoupledFamily,
    sub: SubspaceFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> Strength:
    """Strength of ``sub`` as a reducing family of ``family``.

    Mixed backends are compared in floating point; an exact family with an
    exact subspace family is decided exactly.
    """
    _check_family_subspaces(family, sub)
    fam = family
    bases = sub.bases
    if family.exact != sub.exact:
        fam = family.to_float()
        bases = tuple(to_float(b) for b in sub.bases)
    for i in range(fam.K):
        for j in range(fam.K):
            mapped = fam.blocks[i][j] @ bases[j]
            if not subspace_contains(bases[i], mapped, tol):
                return Strength.NOT_REDUCING
    sub_dims = SubspaceFamily(bases).dims_profile(tol)
    return _grade_strength(fam.dims, sub_dims)


def containment_table(
    family: CoupledFamily,
    sub: SubspaceFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> list[dict]:
    """Per-(i, j) containment residual diagnostics for certificates."""
    _check_family_subspaces(family, sub)
    rows = []
    for i in range(family.K):
        for j in range(family.K):
            mapped = to_float(family.blocks[i][j]) @ to_float(sub.bases[j])
            rows.append(
                {
                    "block": [i, j],
                    "residual": containment_residual(sub.bases[i], mapped),
                    "contained": subspace_contains(sub.bases[i], mapped, tol),
                }
            )
    return rows


def _grow_basis(basis: np.ndarray, cand: np.ndarray, tol: TolerancePolicy) -> np.ndarray | None:
    """Basis of span(basis + cand) if strictly larger, else None.

    Floating growth uses the same projection-leftover criterion as
    :func:`subspace_contains`, so a finished closure always verifies: a
    machine-epsilon rank cutoff here would promote roundoff leakage that
    the containment check happily tolerates.
    """
    if cand.shape[1] == 0:
        return None
    if is_exact(cand) and is_exact(basis):
        stacked = np.concatenate([basis, cand], axis=1)
        if matrix_rank(stacked, tol) <= matrix_rank(basis, tol):
            return None
        return stacked[:, pivot_columns(stacked)]
    basis, cand = to_float(basis), to_float(cand)
    cand = cand[:, np.linalg.norm(cand, axis=0) > tol.equality_atol]
    if cand.shape[1] == 0:
        return None
    q = orthonormal_columns(basis, tol)
    unit = cand / np.linalg.norm(cand, axis=0)
    leftover = unit - q @ (conj_t(q) @ unit)
    outside = np.max(np.abs(leftover), axis=0) > tol.equality_atol
    if not outside.any():
        return None
    return orthonormal_columns(np.concatenate([basis, cand[:, outside]], axis=1), tol)


def closure_from_seed(
    family: CoupledFamily,
    seeds: SubspaceFamily | dict[int, np.ndarray],
    tol: TolerancePolicy = DEFAULT_TOL,
) -> SubspaceFamily:
    """Smallest invariant subspace family containing the seed vectors.

    Repeatedly applies every block to the growing spans until stable; the
    result always satisfies the containment conditions by construction.
    """
    if isinstance(seeds, dict):
        seeds = SubspaceFamily.from_map(family.dims, seeds, exact=family.exact)
    _check_family_subspaces(family, seeds)
    fam = family
    if family.exact != seeds.exact:
        fam = family.to_float()
        seeds = seeds.to_float()
    bases = list(seeds.normalized(tol).bases)
    changed = True
    while changed:
        changed = False
        for j in range(fam.K):
            if bases[j].shape[1] == 0:
                continue
            for i in range(fam.K):
                grown = _grow_basis(bases[i], fam.blocks[i][j] @ bases[j], tol)
                if grown is not None:
                    bases[i] = grown
                    changed = True
    return SubspaceFamily(tuple(bases))


# ---------------------------------------------------------------------------
# Burnside span-growth certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BurnsideCertificate:
    irreducible: bool
    algebra_dim: int
    full_dim: int
    words_examined: int

    def to_json_dict(self) -> dict:
        return {
            "method": "burnside-span-growth",
            "irreducible": self.irreducible,
            "algebra_dim": self.algebra_dim,
            "full_dim": self.full_dim,
            "words_examined": self.words_examined,
        }


_BURNSIDE_GROWTH_RTOL = 1e-8


def coupled_irreducible_burnside(
    family: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    budget: int = 200_000,
) -> BurnsideCertificate:
    """Certify coupled irreducibility by algebra dimension (floating).

    Generators are the assembled family and the K coordinate projections;
    the span of all words is grown by right-multiplication.  Irreducible
    exactly when the algebra dimension reaches N^2.
    """
    fam = family.to_float()
    n_total = fam.total_dim
    full_dim = n_total * n_total
    assembled = fam.assemble()
    offs = [0]
    for n in fam.dims:
        offs.append(offs[-1] + n)
    gens = []
    for i in range(fam.K):
        p = np.zeros((n_total, n_total), dtype=complex)
        p[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = np.eye(fam.dims[i])
        gens.append(p)
    gens.append(assembled)

    ortho: list[np.ndarray] = []  # orthonormal flattened basis of the span
    words: list[np.ndarray] = []  # every independent word, for the final rank
    queue: list[np.ndarray] = [g for g in gens]
    examined = 0
    head = 0
    while head < len(queue):
        if examined >= budget:
            raise BudgetExceededError(
                f"span growth exceeded budget of {budget} words"
            )
        w = queue[head]
        head += 1
        examined += 1
        v = w.reshape(-1)
        nv = np.linalg.norm(v)
        if nv <= 1e-300:
            continue
        v = v / nv
        for q in ortho:  # two reorthogonalization passes
            v = v - q * np.vdot(q, v)
        r = np.linalg.norm(v)
        if r > _BURNSIDE_GROWTH_RTOL:
            v = v / r
            for q in ortho:
                v = v - q * np.vdot(q, v)
            v = v / max(np.linalg.norm(v), 1e-300)
            ortho.append(v)
            words.append(w / nv)
            if len(ortho) >= full_dim:
                break
            for g in gens:
                queue.append(w @ g)
    if words:
        stacked = np.stack([w.reshape(-1) for w in words], axis=0)
        algebra_dim = matrix_rank(stacked, tol)
    else:
        algebra_dim = 0
    return BurnsideCertificate(
        irreducible=(algebra_dim == full_dim),
        algebra_dim=algebra_dim,
        full_dim=full_dim,
        words_examined=examined,
    )


# ---------------------------------------------------------------------------
# witness search
# ---------------------------------------------------------------------------

def search_witness(
    family: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    budget: int = 200,
    seed: int = 0,
    target: Strength = Strength.REDUCIBLE,
) -> SubspaceFamily | None:
    """Probe for a reducing family of strength >= ``target``; None means
    inconclusive (never a proof of irreducibility).

    Deterministic probes first (standard basis vectors, diagonal-block
    kernels, and diagonal-block eigenvectors per space), then seeded random
    vectors, each run to closure.  Eigenvector probes are what find hidden
    zero-pattern structure: any invariant subspace of a diagonal block with
    distinct eigenvalues is spanned by its eigenvectors, and a closure
    seeded inside an invariant family stays inside it.
    """
    probes: list[dict[int, np.ndarray]] = []
    for i in range(family.K):
        for k in range(family.dims[i]):
            e = np.zeros((family.dims[i], 1), dtype=complex)
            e[k, 0] = 1.0
            probes.append({i: e})
    for i in range(family.K):
        ker = kernel_basis(to_float(family.blocks[i][i]), tol)
        if 0 < ker.shape[1] < family.dims[i]:
            probes.append({i: ker})
    for i in range(family.K):
        if family.dims[i] < 2:
            continue
        _, vecs = np.linalg.eig(to_float(family.blocks[i][i]))
        for k in range(vecs.shape[1]):
            probes.append({i: vecs[:, k:k + 1]})
    rng = np.random.default_rng(seed)
    fam_float = family.to_float()
    tried = 0
    while tried < budget:
        if tried < len(probes):
            seed_map = probes[tried]
        else:
            i = int(rng.integers(family.K))
            v = rng.standard_normal((family.dims[i], 1)) + 1j * rng.standard_normal(
                (family.dims[i], 1)
            )
            seed_map = {i: v}
        tried += 1
        closure = closure_from_seed(fam_float, SubspaceFamily.from_map(
            fam_float.dims, seed_map), tol)
        if verify_reducing(fam_float, closure, tol) >= target:
            return closure
    return None


# ---------------------------------------------------------------------------
# chain classification (exhaustive lattice enumeration)
# ---------------------------------------------------------------------------

def _nilpotent_chain_lattice(n: int, exact: bool) -> list[np.ndarray]:
    """Invariant-subspace lattice of the full nilpotent Jordan block:
    the chain 0 < span{e_1} < ... < span{e_1..e_{n-1}} < V."""
    from .linalg import eye_like_backend

    eye = eye_like_backend(n, exact)
    return [eye[:, :d] for d in range(n + 1)]


def _is_nilpotent_jordan(block: np.ndarray) -> bool:
    n = block.shape[0]
    if n < 2:
        return False
    if is_exact(block):
        for i in range(n):
            for j in range(n):
                want = 1 if j == i + 1 else 0
                if block[i, j] != want:
                    return False
        return True
    b = np.asarray(block, dtype=complex)
    want = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        want[i, i + 1] = 1.0
    return bool(np.array_equal(b, want))


def _is_real_rotationlike(block: np.ndarray) -> bool:
    """Real 2x2 with negative discriminant: no real eigenvector, so the
    real invariant-subspace lattice is {0, V}."""
    if block.shape != (2, 2):
        return False
    if is_exact(block):
        if any(v.im != 0 for v in block.flat):
            return False
        tr = block[0, 0].re + block[1, 1].re
        det = block[0, 0].re * block[1, 1].re - block[0, 1].re * block[1, 0].re
        return tr * tr - 4 * det < 0
    b = np.asarray(block, dtype=complex)
    if max_abs(np.imag(b)) != 0.0:
        return False
    br = np.real(b)
    disc = (br[0, 0] + br[1, 1]) ** 2 - 4 * (
        br[0, 0] * br[1, 1] - br[0, 1] * br[1, 0]
    )
    # demand a decisive margin; borderline floats are not certifiable
    return bool(disc < -1e-6 * max(1.0, float(np.max(np.abs(br))) ** 2))


def _diagonal_lattice(block: np.ndarray, exact: bool) -> tuple[list[np.ndarray], str]:
    """(lattice, field tag) for one diagonal block, or raise PreconditionError."""
    from .linalg import eye_like_backend

    n = block.shape[0]
    if n == 1:
        eye = eye_like_backend(1, exact)
        return [eye[:, :0], eye], "any"
    if _is_nilpotent_jordan(block):
        return _nilpotent_chain_lattice(n, exact), "any"
    if _is_real_rotationlike(block):
        eye = eye_like_backend(n, exact)
        return [eye[:, :0], eye], "real"
    raise PreconditionError(
        "chain_classify requires every diagonal block to be a full nilpotent "
        "Jordan block, 1 x 1, or a real 2 x 2 with negative discriminant; "
        f"block of shape {block.shape} is none of these"
    )


@dataclass(frozen=True)
class ReducibilityVerdict:
    """Classification outcome with certified yes/no flags.

    ``reducible`` / ``properly`` / ``strongly`` are tri-state: True with a
    witness, False when certified impossible, None when undetermined.
    """

    strength: Strength
    witness: SubspaceFamily | None
    reducible: bool | None
    properly: bool | None
    strongly: bool | None
    method: str
    detail: dict = field(default_factory=dict)

    def to_json_dict(self, tol: TolerancePolicy = DEFAULT_TOL) -> dict:
        return {
            "strength": self.strength.label,
            "witness": None if self.witness is None else self.witness.to_json(tol),
            "reducible": self.reducible,
            "properly_reducible": self.properly,
            "strongly_reducible": self.strongly,
            "method": self.method,
            "detail": dict(self.detail),
        }


def chain_classify(
    family: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    budget: int = 200_000,
) -> ReducibilityVerdict:
    """Exhaustively classify reducibility via diagonal-block lattices.

    Every invariant family must draw U_i from the invariant-subspace lattice
    of diagonal block (i, i); when those lattices are finite and known, the
    product enumeration decides reducible / properly / strongly exactly
    (over the reals when a rotation-like block restricts the field).
    """
    family.validate()
    lattices = []
    fields = set()
    for i in range(family.K):
        lat, f = _diagonal_lattice(family.blocks[i][i], family.exact)
        lattices.append(lat)
        fields.add(f)
    total = 1
    for lat in lattices:
        total *= len(lat)
        if total > budget:
            raise BudgetExceededError(
                f"lattice product exceeds budget ({total} > {budget})"
            )
    best = Strength.TRIVIAL
    best_witness: SubspaceFamily | None = None
    found = {Strength.REDUCIBLE: False, Strength.PROPERLY_REDUCIBLE: False,
             Strength.STRONGLY_REDUCIBLE: False}
    counters = [0] * family.K
    while True:
        sub = SubspaceFamily(tuple(lattices[i][counters[i]] for i in range(family.K)))
        strength = verify_reducing(family, sub, tol)
        if strength >= Strength.REDUCIBLE:
            for level in found:
                if strength >= level:
                    found[level] = True
            if strength > best:
                best = strength
                best_witness = sub
        # odometer
        k = 0
        while k < family.K:
            counters[k] += 1
            if counters[k] < len(lattices[k]):
                break
            counters[k] = 0
            k += 1
        if k == family.K:
            break
    field_tag = "real" if "real" in fields else "any"
    return ReducibilityVerdict(
        strength=best,
        witness=best_witness,
        reducible=found[Strength.REDUCIBLE],
        properly=found[Strength.PROPERLY_REDUCIBLE],
        strongly=found[Strength.STRONGLY_REDUCIBLE],
        method="chain-exhaustive",
        detail={
            "combinations": total,
            "lattice_sizes": [len(l) for l in lattices],
            "field": field_tag,
        },
    )


# ---------------------------------------------------------------------------
# block-form transforms
# ---------------------------------------------------------------------------

def complement_family(
    sub: SubspaceFamily, tol: TolerancePolicy = DEFAULT_TOL
) -> SubspaceFamily:
    """Orthogonal complement of each subspace (floating backend)."""
    bases = []
    for b in sub.bases:
        q = orthonormal_columns(to_float(b), tol)
        n = b.shape[0]
        if q.shape[1] == 0:
            bases.append(np.eye(n, dtype=complex))
        elif q.shape[1] == n:
            bases.append(np.zeros((n, 0), dtype=complex))
        else:
            bases.append(kernel_basis(conj_t(q), tol))
    return SubspaceFamily(tuple(bases))


@dataclass(frozen=True)
class BlockFormResult:
    witness: SimilarityWitness
    transformed: CoupledFamily
    sub_dims: tuple[int, ...]
    zero_region_residual: float
    full_form: bool

    def to_json_dict(self) -> dict:
        return {
            "sub_dims": list(self.sub_dims),
            "zero_region_residual": self.zero_region_residual,
            "full_form": self.full_form,
            "transformed": [
                [encode_matrix(self.transformed.blocks[i][j])
                 for j in range(self.transformed.K)]
                for i in range(self.transformed.K)
            ],
        }


def _zero_region_residual(
    transformed: CoupledFamily, sub_dims: tuple[int, ...], full_form: bool
) -> float:
    worst = 0.0
    for i in range(transformed.K):
        for j in range(transformed.K):
            b = to_float(transformed.blocks[i][j])
            d_i, d_j = sub_dims[i], sub_dims[j]
            lower_left = b[d_i:, :d_j]
            if lower_left.size:
                worst = max(worst, max_abs(lower_left))
            if full_form:
                upper_right = b[:d_i, d_j:]
                if upper_right.size:
                    worst = max(worst, max_abs(upper_right))
    return worst


def block_form_transform(
    family: CoupledFamily,
    sub: SubspaceFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    unitary: bool = False,
    full: bool = False,
    complements: SubspaceFamily | None = None,
) -> BlockFormResult:
    """Change basis so the reducing family occupies leading coordinates.

    The conjugated family has a zero lower-left region in every block
    (rows past d_i, leading d_j columns).  With ``full=True`` a second
    invariant family (given via ``complements``, or the orthogonal
    complements by default) fills the trailing coordinates and the
    upper-right region vanishes as well.  Raises PreconditionError when the
    input family is not reduced by ``sub`` (or its complement, for full
    form).
    """
    sub = sub.normalized(tol)
    if verify_reducing(family, sub, tol) == Strength.NOT_REDUCING:
        raise PreconditionError("block_form_transform: subspace family is not reducing")
    sub_dims = sub.dims_profile(tol)
    if full:
        if unitary:
            if complements is not None:
                raise PreconditionError(
                    "block_form_transform: unitary full form always uses the "
                    "orthogonal complements; do not pass complements"
                )
            sub = SubspaceFamily(tuple(orthonormal_columns(b, tol) for b in sub.bases))
            comp = complement_family(sub, tol)
        else:
            comp = (complements.normalized(tol) if complements is not None
                    else complement_family(sub, tol))
        comp_dims = comp.dims_profile(tol)
        if any(a + c != n for a, c, n in zip(sub_dims, comp_dims, family.dims)):
            raise PreconditionError(
                "block_form_transform: complements do not complete the dimensions"
            )
        if verify_reducing(family, comp, tol) == Strength.NOT_REDUCING:
            raise PreconditionError(
                "block_form_transform: complement family is not reducing; "
                "full form needs an invariant complement"
            )
        mats = []
        for b, c in zip(sub.bases, comp.bases):
            if is_exact(b) != is_exact(c):
                b, c = to_float(b), to_float(c)
            mats.append(np.concatenate([b, c], axis=1))
    else:
        mats = []
        for b in sub.bases:
            if unitary:
                mats.append(complete_to_basis(to_float(b), tol, unitary=True))
            else:
                mats.append(complete_to_basis(b, tol, unitary=False))
    if family.exact != is_exact(mats[0]):
        fam = family.to_float()
        mats = [to_float(m) for m in mats]
    else:
        fam = family
    witness = SimilarityWitness(tuple(mats)).validate(fam.dims, tol)
    transformed = apply_coupled_similarity(fam, witness, tol)
    residual = _zero_region_residual(transformed, sub_dims, full)
    return BlockFormResult(
        witness=witness,
        transformed=transformed,
        sub_dims=sub_dims,
        zero_region_residual=residual,
        full_form=full,
    )
