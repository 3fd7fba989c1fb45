"""Deterministic example families and seeded random pair generators.

The named constructors realize the standard counterexample families:
nilpotent-diagonal families that are properly but not strongly reducible,
families on four or more spaces that are reducible but not properly so,
plane-rotation families with the analogous gap over the reals, the
two-space family whose intertwining solution is singular but nonzero, the
three-space pair whose digraphs are disconnected while their linked graph
is connected, and the embedding that turns simultaneous intertwining of
matrix lists into a coupled system.

Free entries (spots the constructions leave unconstrained) default to
zero; pass ``free_blocks`` to fill them in.  Random generators use a
seeded PCG64 stream and record the seed so every artifact is
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .family import CoupledFamily, SimilarityWitness, apply_coupled_similarity
from .linalg import (
    DEFAULT_TOL,
    GaussianRational,
    conj_t,
    exact_eye,
    exact_matrix,
    exact_zeros,
    inverse,
    is_exact,
    is_nonsingular,
)
from .reduce import SubspaceFamily

__all__ = [
    "nilpotent_block",
    "jordan_nilpotent",
    "rotation_block",
    "example_51",
    "example_51_planted_solution",
    "proper_not_strong",
    "red_not_proper",
    "rotation_family",
    "figure1_pair",
    "classical_schur_embed",
    "FixtureSpec",
    "make_fixture",
    "RandomPairResult",
    "random_pair",
    "PRNG_NAME",
]

PRNG_NAME = "pcg64"


def _zeros(n: int, m: int, exact: bool) -> np.ndarray:
    if exact:
        return exact_zeros(n, m)
    return np.zeros((n, m), dtype=complex)


def _unit_column(n: int, row: int, exact: bool) -> np.ndarray:
    """n x 1 column with a single 1 at the given row."""
    col = _zeros(n, 1, exact)
    col[row, 0] = GaussianRational.from_value(1) if exact else 1.0
    return col


def nilpotent_block(n: int, exact: bool = True) -> np.ndarray:
    """n x n block with ones on the superdiagonal; (0) when n = 1."""
    if n < 1:
        raise ValueError("block size must be positive")
    m = _zeros(n, n, exact)
    one = GaussianRational.from_value(1) if exact else 1.0
    for k in range(n - 1):
        m[k, k + 1] = one
    return m


jordan_nilpotent = nilpotent_block


def rotation_block(theta: float, exact: bool = False) -> np.ndarray:
    """2 x 2 rotation by theta; exact backend requires rational cos/sin."""
    c, s = np.cos(theta), np.sin(theta)
    if not exact:
        return np.array([[c, -s], [s, c]], dtype=float)
    cq = Fraction(float(c)).limit_denominator(10**6)
    sq = Fraction(float(s)).limit_denominator(10**6)
    if abs(float(cq) - c) > 1e-12 or abs(float(sq) - s) > 1e-12:
        raise ValueError(
            "rotation angle has irrational cos/sin; use the floating backend"
        )
    return exact_matrix([[cq, -sq], [sq, cq]])


def _starred_block(n_i: int, n_j: int, exact: bool) -> np.ndarray:
    """Block whose first column is the last coordinate vector of the target
    space, remaining columns zero (the free default)."""
    m = _zeros(n_i, n_j, exact)
    m[n_i - 1, 0] = GaussianRational.from_value(1) if exact else 1.0
    return m


def _apply_free_blocks(
    grid: list[list[np.ndarray]],
    free_blocks: dict[tuple[int, int], np.ndarray] | None,
    constrained: dict[tuple[int, int], str],
    exact: bool,
) -> None:
    """Overlay user-provided free entries onto a fixture grid in place.

    ``constrained`` maps positions to "fixed" (untouchable) or "starred"
    (first column pinned, rest free); unlisted positions are fully free.
    """
    if not free_blocks:
        return
    for (i, j), block in free_blocks.items():
        kind = constrained.get((i, j), "free")
        if kind == "fixed":
            raise ValueError(f"block ({i}, {j}) is fixed by the construction")
        block = np.asarray(block, dtype=object if exact else complex)
        if block.shape != grid[i][j].shape:
            raise ValueError(
                f"override for ({i}, {j}) has shape {block.shape}, "
                f"expected {grid[i][j].shape}"
            )
        if exact:
            block = exact_matrix(block.tolist())
        if kind == "starred":
            merged = block.copy()
            merged[:, 0] = grid[i][j][:, 0]
            grid[i][j] = merged
        else:
            grid[i][j] = block


def example_51(
    a=0, b=0, c=1, d=0, require_not_strong: bool = True
) -> tuple[CoupledFamily, CoupledFamily]:
    """Two-space pair with nilpotent diagonals and one one-way coupling.

    The first family carries [[a, b], [c, d]] as its (1, 2) block with a
    zero (2, 1) block; the second mirrors it.  With c nonzero, neither
    family is strongly reducible, yet X = (N, 0) solves the coupled
    intertwining equations exactly, exhibiting a singular nonzero solution
    block.
    """
    vals = [a, b, c, d]
    exact = not any(isinstance(v, (float, complex)) and not isinstance(v, bool)
                    for v in vals)
    if require_not_strong:
        cv = GaussianRational.from_value(c) if exact else complex(c)
        if (exact and cv == GaussianRational.from_value(0)) or (
            not exact and abs(cv) == 0.0
        ):
            raise ValueError(
                "c must be nonzero for the not-strongly-reducible guarantee"
            )
    if exact:
        coupling = exact_matrix([[a, b], [c, d]])
    else:
        coupling = np.array([[a, b], [c, d]], dtype=complex)
    n2 = nilpotent_block(2, exact)
    z = _zeros(2, 2, exact)
    fam_a = CoupledFamily.from_blocks([[n2, coupling], [z, n2]])
    fam_b = CoupledFamily.from_blocks([[n2, z], [coupling, n2]])
    return fam_a, fam_b


def example_51_planted_solution(exact: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """The (N, 0) solution of the two-space singular-solution pair."""
    return nilpotent_block(2, exact), _zeros(2, 2, exact)


def proper_not_strong(
    dims: tuple[int, ...],
    p: int = 0,
    exact: bool = True,
    free_blocks: dict[tuple[int, int], np.ndarray] | None = None,
) -> tuple[CoupledFamily, SubspaceFamily]:
    """Family that is properly but not strongly reducible, with witness.

    Nilpotent diagonal blocks; row p is zero off the diagonal; every block
    in column p has the target's last coordinate vector as its first
    column.  The witness keeps only the first coordinate line at index p
    and the full space elsewhere.
    """
    k = len(dims)
    if k < 2:
        raise ValueError("need at least two spaces")
    if not (0 <= p < k):
        raise ValueError(f"p={p} out of range")
    if dims[p] < 2:
        raise ValueError("space p must have dimension at least 2")
    constrained: dict[tuple[int, int], str] = {}
    grid: list[list[np.ndarray]] = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(nilpotent_block(dims[i], exact))
                constrained[(i, j)] = "fixed"
            elif i == p:
                row.append(_zeros(dims[i], dims[j], exact))
                constrained[(i, j)] = "fixed"
            elif j == p:
                row.append(_starred_block(dims[i], dims[j], exact))
                constrained[(i, j)] = "starred"
            else:
                row.append(_zeros(dims[i], dims[j], exact))
        grid.append(row)
    _apply_free_blocks(grid, free_blocks, constrained, exact)
    family = CoupledFamily.from_blocks(grid)
    bases = [
        _unit_column(dims[i], 0, exact) if i == p
        else (exact_eye(dims[i]) if exact else np.eye(dims[i], dtype=complex))
        for i in range(k)
    ]
    return family, SubspaceFamily(tuple(bases))


def red_not_proper(
    dims: tuple[int, ...],
    p: int = 0,
    q: int = 1,
    exact: bool = True,
    free_blocks: dict[tuple[int, int], np.ndarray] | None = None,
) -> tuple[CoupledFamily, SubspaceFamily]:
    """Family reducible in the coupled sense but not properly reducible.

    Needs at least four spaces.  Nilpotent diagonals; blocks into rows
    outside {p, q} from columns p and q are zero; all other off-diagonal
    blocks carry the target's last coordinate vector in their first
    column.  The witness takes the full space at p and q and zero
    elsewhere, so no single subspace is nonzero and proper.
    """
    k = len(dims)
    if k < 4:
        raise ValueError("need at least four spaces")
    if p == q or not (0 <= p < k and 0 <= q < k):
        raise ValueError(f"bad distinguished indices p={p}, q={q}")
    constrained: dict[tuple[int, int], str] = {}
    grid: list[list[np.ndarray]] = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(nilpotent_block(dims[i], exact))
                constrained[(i, j)] = "fixed"
            elif i not in (p, q) and j in (p, q):
                row.append(_zeros(dims[i], dims[j], exact))
                constrained[(i, j)] = "fixed"
            else:
                row.append(_starred_block(dims[i], dims[j], exact))
                constrained[(i, j)] = "starred"
        grid.append(row)
    _apply_free_blocks(grid, free_blocks, constrained, exact)
    family = CoupledFamily.from_blocks(grid)
    bases = [
        (exact_eye(dims[i]) if exact else np.eye(dims[i], dtype=complex))
        if i in (p, q)
        else _zeros(dims[i], 0, exact)
        for i in range(k)
    ]
    return family, SubspaceFamily(tuple(bases))


def rotation_family(
    k: int = 2,
    theta: float = np.pi / 2,
    s: int = 1,
    exact: bool | None = None,
    free_blocks: dict[tuple[int, int], np.ndarray] | None = None,
) -> tuple[CoupledFamily, SubspaceFamily]:
    """Real family of plane rotations, reducible but not properly so.

    Every diagonal block is the rotation by theta (no real invariant
    lines for theta strictly between 0 and pi); blocks mapping the first
    s spaces into the later ones are zero; the rest are free.  The
    witness is full on the first s spaces and zero after.
    """
    if not (0 < theta < np.pi):
        raise ValueError("theta must lie strictly between 0 and pi")
    if not (1 <= s < k):
        raise ValueError("s must satisfy 1 <= s < k")
    if exact is None:
        try:
            rotation_block(theta, exact=True)
            exact = True
        except ValueError:
            exact = False
    rot = rotation_block(theta, exact)
    constrained: dict[tuple[int, int], str] = {}
    grid: list[list[np.ndarray]] = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(rot.copy())
                constrained[(i, j)] = "fixed"
            elif i >= s and j < s:
                row.append(_zeros(2, 2, exact))
                constrained[(i, j)] = "fixed"
            else:
                row.append(_zeros(2, 2, exact))
        grid.append(row)
    _apply_free_blocks(grid, free_blocks, constrained, exact)
    family = CoupledFamily.from_blocks(grid)
    eye2 = exact_eye(2) if exact else np.eye(2, dtype=complex)
    bases = [eye2.copy() if i < s else _zeros(2, 0, exact) for i in range(k)]
    return family, SubspaceFamily(tuple(bases))


def figure1_pair(exact: bool = True) -> tuple[CoupledFamily, CoupledFamily]:
    """Three scalar spaces: the first family couples spaces 1 and 2, the
    second couples spaces 1 and 3.  Neither digraph is strongly connected
    but the linked graph is connected."""
    one = GaussianRational.from_value(1) if exact else 1.0
    z = _zeros(1, 1, exact)

    def scalar(v):
        m = _zeros(1, 1, exact)
        m[0, 0] = v
        return m

    fam_a = CoupledFamily.from_blocks(
        [[z, scalar(one), z], [scalar(one), z, z], [z, z, z]]
    )
    fam_b = CoupledFamily.from_blocks(
        [[z, z, scalar(one)], [z, z, z], [scalar(one), z, z]]
    )
    return fam_a, fam_b


def classical_schur_embed(
    a_list: list[np.ndarray], b_list: list[np.ndarray]
) -> tuple[CoupledFamily, CoupledFamily]:
    """Encode simultaneous intertwining of two matrix lists as one
    coupled system.

    Index t copies of each space; put the t-th generators on the
    diagonals and identities off the diagonal.  The off-diagonal
    identities force every solution to use one constant block P, so the
    coupled solutions are exactly the simultaneous solutions of
    a_k P = P b_k.
    """
    if len(a_list) != len(b_list) or not a_list:
        raise ValueError("need equally many (and at least one) generators per side")
    t = len(a_list)
    a_arrs = [np.asarray(m) for m in a_list]
    b_arrs = [np.asarray(m) for m in b_list]
    n = a_arrs[0].shape[0]
    m = b_arrs[0].shape[0]
    if any(x.shape != (n, n) for x in a_arrs) or any(
        x.shape != (m, m) for x in b_arrs
    ):
        raise ValueError("generators must be square and uniformly sized per side")
    exact = is_exact(a_arrs[0])

    def eye(sz: int) -> np.ndarray:
        return exact_eye(sz) if exact else np.eye(sz, dtype=complex)

    grid_a = [[a_arrs[i] if i == j else eye(n) for j in range(t)] for i in range(t)]
    grid_b = [[b_arrs[i] if i == j else eye(m) for j in range(t)] for i in range(t)]
    return CoupledFamily.from_blocks(grid_a), CoupledFamily.from_blocks(grid_b)


# ---------------------------------------------------------------------------
# spec-driven dispatch
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None


_FIXTURE_KINDS: dict[str, Callable] = {
    "jordan_nilpotent": lambda p: jordan_nilpotent(int(p.get("n", 2)),
                                                   p.get("exact", True)),
    "example_51": lambda p: example_51(
        p.get("a", 0), p.get("b", 0), p.get("c", 1), p.get("d", 0),
        p.get("require_not_strong", True),
    ),
    "proper_not_strong": lambda p: proper_not_strong(
        tuple(p.get("dims", (2, 2))), int(p.get("p", 0)), p.get("exact", True)
    )[0],
    "red_not_proper": lambda p: red_not_proper(
        tuple(p.get("dims", (2, 2, 2, 2))), int(p.get("p", 0)),
        int(p.get("q", 1)), p.get("exact", True),
    )[0],
    "rotation_family": lambda p: rotation_family(
        int(p.get("k", 2)), float(p.get("theta", np.pi / 2)),
        int(p.get("s", 1)), p.get("exact"),
    )[0],
    "figure1_pair": lambda p: figure1_pair(p.get("exact", True)),
    "classical_schur_embed": lambda p: classical_schur_embed(
        p["a_list"], p["b_list"]
    ),
}


def make_fixture(spec: FixtureSpec):
    """Build the named fixture; pairs come back as a 2-tuple of families.

    ``jordan_nilpotent`` returns a bare block (it is a building brick, not
    a family); witness-carrying constructions return the family only --
    call the named constructor directly when the witness is needed.
    """
    if spec.kind not in _FIXTURE_KINDS:
        raise ValueError(
            f"unknown fixture kind {spec.kind!r}; "
            f"expected one of {sorted(_FIXTURE_KINDS)}"
        )
    return _FIXTURE_KINDS[spec.kind](dict(spec.params))


# ---------------------------------------------------------------------------
# seeded random generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomPairResult:
    kind: str
    seed: int
    generator: str
    a: CoupledFamily
    b: CoupledFamily | None
    planted_solution: tuple[np.ndarray, ...] | None = None
    planted_witness: SubspaceFamily | None = None


def _random_complex(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def _random_nonsingular(rng: np.random.Generator, n: int) -> np.ndarray:
    for _ in range(32):
        t = _random_complex(rng, n, n)
        if is_nonsingular(t, DEFAULT_TOL):
            return t
    raise RuntimeError("could not draw a nonsingular matrix")  # pragma: no cover


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(_random_complex(rng, n, n))
    # fix the phase so the factorization is unique and well-spread
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_dense_family(rng: np.random.Generator, dims) -> CoupledFamily:
    grid = [[_random_complex(rng, dims[i], dims[j]) for j in range(len(dims))]
            for i in range(len(dims))]
    return CoupledFamily.from_blocks(grid)


def _random_hermitian_family(rng: np.random.Generator, dims) -> CoupledFamily:
    k = len(dims)
    grid: list[list[np.ndarray | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        h = _random_complex(rng, dims[i], dims[i])
        grid[i][i] = (h + conj_t(h)) / 2
        for j in range(i + 1, k):
            grid[i][j] = _random_complex(rng, dims[i], dims[j])
            grid[j][i] = conj_t(grid[i][j])
    return CoupledFamily.from_blocks(grid)


def _split_profile(
    rng: np.random.Generator, dims, strength: str
) -> tuple[int, ...]:
    k = len(dims)
    if strength == "strongly-reducible":
        if any(n < 2 for n in dims):
            raise ValueError("strong planting needs every dimension >= 2")
        return tuple(int(rng.integers(1, n)) for n in dims)
    if strength == "properly-reducible":
        candidates = [i for i, n in enumerate(dims) if n >= 2]
        if not candidates:
            raise ValueError("proper planting needs some dimension >= 2")
        special = int(rng.choice(candidates))
        profile = []
        for i, n in enumerate(dims):
            if i == special:
                profile.append(int(rng.integers(1, n)))
            else:
                profile.append(int(rng.choice([0, n])))
        return tuple(profile)
    if strength == "reducible":
        while True:
            profile = [int(rng.choice([0, n])) for n in dims]
            if any(profile) and any(profile[i] < dims[i] for i in range(k)):
                return tuple(profile)
    raise ValueError(f"unknown planting strength {strength!r}")


def _template_block(
    rng: np.random.Generator, n_i: int, n_j: int, d_i: int, d_j: int, normal: bool
) -> np.ndarray:
    blk = np.zeros((n_i, n_j), dtype=complex)
    blk[:d_i, :d_j] = _random_complex(rng, d_i, d_j)
    blk[d_i:, d_j:] = _random_complex(rng, n_i - d_i, n_j - d_j)
    if not normal:
        # lower-left must vanish; upper-right is unconstrained
        blk[:d_i, d_j:] = _random_complex(rng, d_i, n_j - d_j)
    return blk


def random_pair(
    kind: str,
    dims,
    seed: int,
    strength: str = "strongly-reducible",
    normal: bool = False,
) -> RandomPairResult:
    """Seeded random families with planted structure.

    - ``coupled_similar``: dense random family, second family its image
      under a random nonsingular blockwise similarity; the similarity
      blocks solve the coupled equations by construction.
    - ``coupled_normal_similar``: Hermitian-assembled family (hence
      coupled normal) and a blockwise unitary conjugate.
    - ``planted_reducible``: zero-pattern template realizing the chosen
      strength, hidden behind a random similarity (unitary, with a
      Hermitian-assembled template, when ``normal`` is set); returns the
      conjugated witness.
    """
    dims = tuple(int(n) for n in dims)
    rng = np.random.default_rng(seed)
    if kind == "coupled_similar":
        fam_a = _random_dense_family(rng, dims)
        t = SimilarityWitness(tuple(_random_nonsingular(rng, n) for n in dims))
        fam_b = apply_coupled_similarity(fam_a, t)
        return RandomPairResult(
            kind=kind, seed=seed, generator=PRNG_NAME,
            a=fam_a, b=fam_b, planted_solution=t.matrices,
        )
    if kind == "coupled_normal_similar":
        fam_a = _random_hermitian_family(rng, dims)
        t = SimilarityWitness(tuple(_random_unitary(rng, n) for n in dims))
        fam_b = apply_coupled_similarity(fam_a, t)
        return RandomPairResult(
            kind=kind, seed=seed, generator=PRNG_NAME,
            a=fam_a, b=fam_b, planted_solution=t.matrices,
        )
    if kind == "planted_reducible":
        profile = _split_profile(rng, dims, strength)
        k = len(dims)
        if normal:
            grid: list[list[np.ndarray | None]] = [[None] * k for _ in range(k)]
            for i in range(k):
                blk = _template_block(rng, dims[i], dims[i], profile[i],
                                      profile[i], normal=True)
                grid[i][i] = (blk + conj_t(blk)) / 2
                for j in range(i + 1, k):
                    blk = _template_block(rng, dims[i], dims[j], profile[i],
                                          profile[j], normal=True)
                    grid[i][j] = blk
                    grid[j][i] = conj_t(blk)
            template = CoupledFamily.from_blocks(grid)
            t_blocks = tuple(_random_unitary(rng, n) for n in dims)
        else:
            template = CoupledFamily.from_blocks(
                [
                    [
                        _template_block(rng, dims[i], dims[j], profile[i],
                                        profile[j], normal=False)
                        for j in range(k)
                    ]
                    for i in range(k)
                ]
            )
            t_blocks = tuple(_random_nonsingular(rng, n) for n in dims)
        witness = SimilarityWitness(t_blocks)
        fam = apply_coupled_similarity(template, witness)
        bases = tuple(
            inverse(t_blocks[i], DEFAULT_TOL)[:, : profile[i]] for i in range(k)
        )
        return RandomPairResult(
            kind=kind, seed=seed, generator=PRNG_NAME,
            a=fam, b=None, planted_witness=SubspaceFamily(bases),
        )
    raise ValueError(
        f"unknown random pair kind {kind!r}; expected coupled_similar, "
        "coupled_normal_similar, or planted_reducible"
    )
