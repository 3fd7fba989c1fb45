"""Coupled Sylvester systems and dichotomy classification of solutions.

For families a (blocks n_i x n_j) and b (blocks m_i x m_j) on the same index
set, the unknowns are matrices X_i (n_i x m_i) satisfying

    a_ij X_j = X_i b_ij   for all i, j.

Stacking column-major vectorizations of the X_i turns the equations into one
homogeneous linear system: the row block for the pair (i, j) carries
``kron(I_{m_j}, a_ij)`` against the unknown block j and ``-kron(b_ij^T,
I_{n_i})`` against the unknown block i (plain transpose, no conjugation).
The solution space is the kernel of that operator.

Classification compares each solution against the zero-or-nonsingular
dichotomies that hold under the audited hypotheses (irreducibility of both
families, no proper reducibility, or the graph-based variants), reports
scalar structure for same-family systems, and checks the kernel/range
propagation facts every solution must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .family import CoupledFamily
from .graphs import (
    family_digraph,
    is_strongly_connected,
    linked_graph,
)
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    containment_residual,
    eye_like_backend,
    is_exact,
    is_nonsingular,
    kernel_basis,
    matrix_rank,
    max_abs,
    range_basis,
    rank_and_kernel,
    subspace_contains,
    to_float,
    zeros_like_backend,
)
from .reduce import (
    PreconditionError,
    Strength,
    chain_classify,
    coupled_irreducible_burnside,
    search_witness,
)

__all__ = [
    "SylvesterSystem",
    "build_system",
    "SolutionSpace",
    "solve",
    "solution_residual",
    "exact_solution_holds",
    "SchurClassification",
    "classify_solution",
    "FamilyReducibilityAudit",
    "HypothesisAudit",
    "audit_family",
    "audit_hypotheses",
    "PropagationReport",
    "propagation_checks",
    "DichotomyReport",
    "dichotomy_report",
]


@dataclass(frozen=True)
class SylvesterSystem:
    """Assembled intertwining operator plus the index bookkeeping."""

    a: CoupledFamily
    b: CoupledFamily
    operator: np.ndarray
    row_pairs: tuple[tuple[int, int], ...]
    row_offsets: tuple[int, ...]
    col_offsets: tuple[int, ...]

    @property
    def unknown_shapes(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.a.dims[i], self.b.dims[i]) for i in range(self.a.K))

    def unstack(self, vec: np.ndarray) -> tuple[np.ndarray, ...]:
        """Split a stacked unknown vector into the X_i blocks (column-major)."""
        xs = []
        for p, (n, m) in enumerate(self.unknown_shapes):
            seg = vec[self.col_offsets[p]:self.col_offsets[p + 1]]
            xs.append(seg.reshape((n, m), order="F"))
        return tuple(xs)


def build_system(a: CoupledFamily, b: CoupledFamily) -> SylvesterSystem:
    """Assemble the homogeneous operator for the coupled intertwining
    equations; backends must match (convert one side first otherwise)."""
    a.validate()
    b.validate()
    if a.K != b.K:
        raise ValueError("families couple different numbers of spaces")
    if a.exact != b.exact:
        raise ValueError("families use different backends; convert one first")
    exact = a.exact
    k = a.K
    n, m = a.dims, b.dims
    col_offsets = [0]
    for p in range(k):
        col_offsets.append(col_offsets[-1] + n[p] * m[p])
    row_pairs = [(i, j) for i in range(k) for j in range(k)]
    row_offsets = [0]
    for (i, j) in row_pairs:
        row_offsets.append(row_offsets[-1] + n[i] * m[j])
    op = zeros_like_backend(row_offsets[-1], col_offsets[-1], exact)
    for idx, (i, j) in enumerate(row_pairs):
        r0, r1 = row_offsets[idx], row_offsets[idx + 1]
        left = np.kron(eye_like_backend(m[j], exact), a.blocks[i][j])
        op[r0:r1, col_offsets[j]:col_offsets[j + 1]] = (
            op[r0:r1, col_offsets[j]:col_offsets[j + 1]] + left
        )
        right = np.kron(b.blocks[i][j].T, eye_like_backend(n[i], exact))
        op[r0:r1, col_offsets[i]:col_offsets[i + 1]] = (
            op[r0:r1, col_offsets[i]:col_offsets[i + 1]] - right
        )
    return SylvesterSystem(
        a=a,
        b=b,
        operator=op,
        row_pairs=tuple(row_pairs),
        row_offsets=tuple(row_offsets),
        col_offsets=tuple(col_offsets),
    )


@dataclass(frozen=True)
class SolutionSpace:
    """Kernel of the intertwining operator, unstacked into matrix tuples."""

    shapes: tuple[tuple[int, int], ...]
    basis: tuple[tuple[np.ndarray, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def combination(self, coeffs) -> tuple[np.ndarray, ...]:
        """Floating linear combination of the basis solutions."""
        xs = [np.zeros(s, dtype=complex) for s in self.shapes]
        for c, sol in zip(coeffs, self.basis):
            for p in range(len(xs)):
                xs[p] = xs[p] + complex(c) * to_float(sol[p])
        return tuple(xs)


def solve(system: SylvesterSystem, tol: TolerancePolicy = DEFAULT_TOL) -> SolutionSpace:
    """Solution space of the coupled equations, in the system's backend."""
    _, kernel = rank_and_kernel(system.operator, tol)
    basis = tuple(system.unstack(kernel[:, c]) for c in range(kernel.shape[1]))
    return SolutionSpace(shapes=system.unknown_shapes, basis=basis)


def solution_residual(
    a: CoupledFamily, b: CoupledFamily, xs: tuple[np.ndarray, ...]
) -> float:
    """Largest entry of a_ij X_j - X_i b_ij over all pairs (direct check)."""
    worst = 0.0
    for i in range(a.K):
        for j in range(a.K):
            res = to_float(a.blocks[i][j]) @ to_float(xs[j]) - to_float(
                xs[i]
            ) @ to_float(b.blocks[i][j])
            worst = max(worst, max_abs(res))
    return worst


def exact_solution_holds(
    a: CoupledFamily, b: CoupledFamily, xs: tuple[np.ndarray, ...]
) -> bool:
    """Exact-backend check that the intertwining equations hold identically."""
    for i in range(a.K):
        for j in range(a.K):
            res = a.blocks[i][j] @ xs[j] - xs[i] @ b.blocks[i][j]
            if any(v for v in res.flat):
                return False
    return True


# ---------------------------------------------------------------------------
# per-solution classification
# ---------------------------------------------------------------------------

def _scalar_value(x: np.ndarray, tol: TolerancePolicy) -> complex | None:
    """alpha when x is (close to) alpha * I, else None; square input only."""
    n = x.shape[0]
    if x.shape[0] != x.shape[1] or n == 0:
        return None
    f = to_float(x)
    alpha = complex(np.trace(f) / n)
    scale = max(1.0, max_abs(f))
    if max_abs(f - alpha * np.eye(n)) <= tol.equality_atol * scale:
        return alpha
    return None


def _status(x: np.ndarray, tol: TolerancePolicy) -> str:
    if is_exact(x):
        # exact solutions admit exact zero / rank decisions
        if not any(v for v in x.flat):
            return "zero"
        if x.shape[0] == x.shape[1] and matrix_rank(x, tol) == x.shape[0]:
            return "nonsingular"
        return "singular-nonzero"
    if max_abs(x) <= tol.equality_atol:
        return "zero"
    if x.shape[0] == x.shape[1] and is_nonsingular(to_float(x), tol):
        return "nonsingular"
    return "singular-nonzero"


@dataclass(frozen=True)
class SchurClassification:
    """Dichotomy bookkeeping for one solution tuple."""

    statuses: tuple[str, ...]
    per_index_scalar: tuple[complex | None, ...]
    common_scalar: complex | None
    all_zero: bool
    all_nonsingular: bool
    per_index_dichotomy: bool
    same_family: bool
    zero_pattern: dict | None
    theorems: tuple[dict, ...]
    violations: tuple[str, ...]
    unitary_alpha: float | None = None
    per_index_unitary_alpha: tuple[float | None, ...] | None = None

    def to_json_dict(self) -> dict:
        enc = lambda z: None if z is None else [z.real, z.imag]
        return {
            "statuses": list(self.statuses),
            "per_index_scalar": [enc(z) for z in self.per_index_scalar],
            "common_scalar": enc(self.common_scalar),
            "all_zero": self.all_zero,
            "all_nonsingular": self.all_nonsingular,
            "per_index_dichotomy": self.per_index_dichotomy,
            "same_family": self.same_family,
            "zero_pattern": self.zero_pattern,
            "theorems": [dict(t) for t in self.theorems],
            "violations": list(self.violations),
            "unitary_alpha": self.unitary_alpha,
            "per_index_unitary_alpha": (
                None
                if self.per_index_unitary_alpha is None
                else list(self.per_index_unitary_alpha)
            ),
        }


def _zero_pattern_check(
    a: CoupledFamily,
    b: CoupledFamily,
    statuses: tuple[str, ...],
    tol: TolerancePolicy,
) -> dict | None:
    """When indices split into zero / nonsingular, the couplings from
    nonsingular to zero indices must vanish: a_ij = 0 and b_ji = 0 for
    i zero, j nonsingular."""
    if any(s == "singular-nonzero" for s in statuses):
        return None
    i0 = [i for i, s in enumerate(statuses) if s == "zero"]
    inon = [i for i, s in enumerate(statuses) if s == "nonsingular"]
    if not i0 or not inon:
        return None
    bad = []
    for i in i0:
        for j in inon:
            a_norm = max_abs(a.blocks[i][j])
            b_norm = max_abs(b.blocks[j][i])
            if a_norm > tol.equality_atol:
                bad.append({"block": "a", "position": [i, j], "max_abs": a_norm})
            if b_norm > tol.equality_atol:
                bad.append({"block": "b", "position": [j, i], "max_abs": b_norm})
    return {"zero_indices": i0, "nonsingular_indices": inon,
            "violations": bad, "ok": not bad}


def classify_solution(
    a: CoupledFamily,
    b: CoupledFamily,
    xs: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
    audit: "HypothesisAudit | None" = None,
    check_residual: bool = True,
) -> SchurClassification:
    """Dichotomy / scalar classification of one solution tuple.

    When ``audit`` is supplied, each applicable theorem's conclusion is
    checked and failures are recorded as violations (hypotheses verified
    but conclusion false -- which a correct solver should never produce).
    Inputs that are not solutions of the coupled equations are rejected
    unless ``check_residual`` is disabled.
    """
    if len(xs) != a.K:
        raise ValueError("solution tuple has wrong length")
    if check_residual:
        scale = max(1.0, max(max_abs(x) for x in xs)) * max(
            1.0, max_abs(a.assemble()), max_abs(b.assemble())
        )
        res = solution_residual(a, b, xs)
        if res > tol.equality_atol ** 0.5 * scale:
            raise ValueError(
                f"residual {res:.3e} too large: not a solution of the system"
            )
    statuses = tuple(_status(x, tol) for x in xs)
    scalars = tuple(_scalar_value(x, tol) for x in xs)
    same_family = a is b or (a.dims == b.dims and a.allclose(b, atol=1e-12))
    all_zero = all(s == "zero" for s in statuses)
    all_nonsingular = all(s == "nonsingular" for s in statuses)
    per_index = all(s in ("zero", "nonsingular") for s in statuses)
    common = None
    if all(z is not None for z in scalars) and scalars:
        vals = [complex(z) for z in scalars]
        ref = vals[0]
        if all(abs(v - ref) <= tol.equality_atol * max(1.0, abs(ref)) for v in vals):
            common = ref
    zero_pattern = _zero_pattern_check(a, b, statuses, tol)
    theorems: list[dict] = []
    violations: list[str] = []
    if audit is not None:
        for name, hyp in audit.theorem_hypotheses().items():
            entry: dict = {"name": name, "hypotheses": hyp}
            if hyp is True:
                if name in ("irreducible-pair", "strong-digraphs", "strong-linked"):
                    ok = all_zero or all_nonsingular
                    if ok and same_family and not all_zero:
                        ok = common is not None
                elif name == "not-properly-reducible-pair":
                    ok = per_index
                    if ok and same_family:
                        ok = all(
                            statuses[i] == "zero" or scalars[i] is not None
                            for i in range(len(xs))
                        )
                else:
                    ok = True
                entry["conclusion_holds"] = ok
                if not ok:
                    violations.append(
                        f"{name}: hypotheses verified but conclusion failed "
                        f"(statuses {list(statuses)})"
                    )
            else:
                entry["conclusion_holds"] = None
            theorems.append(entry)
        if zero_pattern is not None and not zero_pattern["ok"] and audit.exactly_solved:
            violations.append("zero-pattern: couplings between zero and "
                              "nonsingular indices do not vanish")
    return SchurClassification(
        statuses=statuses,
        per_index_scalar=scalars,
        common_scalar=common,
        all_zero=all_zero,
        all_nonsingular=all_nonsingular,
        per_index_dichotomy=per_index,
        same_family=same_family,
        zero_pattern=zero_pattern,
        theorems=tuple(theorems),
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# hypothesis audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyReducibilityAudit:
    """Tri-state reducibility knowledge about one family."""

    irreducible: bool | None
    properly: bool | None
    strongly: bool | None
    method: str

    def to_json_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "properly_reducible": self.properly,
            "strongly_reducible": self.strongly,
            "method": self.method,
        }


@dataclass(frozen=True)
class HypothesisAudit:
    """Everything the dichotomy theorems need to know about a pair."""

    a_audit: FamilyReducibilityAudit
    b_audit: FamilyReducibilityAudit
    da_strongly_connected: bool
    db_strongly_connected: bool
    linked_connected: bool
    a_dims_equal: bool
    b_dims_equal: bool
    same_family: bool
    exactly_solved: bool = False

    def theorem_hypotheses(self) -> dict[str, bool | None]:
        """Tri-state hypothesis evaluation per dichotomy theorem."""

        def both(x: bool | None, y: bool | None) -> bool | None:
            if x is False or y is False:
                return False
            if x is True and y is True:
                return True
            return None

        def not_properly() -> bool | None:
            ap, bp = self.a_audit.properly, self.b_audit.properly
            if ap is True or bp is True:
                return False
            if ap is False and bp is False:
                return True
            return None

        def not_strongly() -> bool | None:
            as_, bs = self.a_audit.strongly, self.b_audit.strongly
            if as_ is True or bs is True:
                return False
            if as_ is False and bs is False:
                return True
            return None

        irr = both(self.a_audit.irreducible, self.b_audit.irreducible)
        ns = not_strongly()
        out = {
            "irreducible-pair": irr,
            "not-properly-reducible-pair": not_properly(),
            "strong-digraphs": both(
                ns, True if (self.da_strongly_connected and self.db_strongly_connected) else False
            ),
            "strong-linked": both(
                ns,
                True
                if (self.a_dims_equal and self.b_dims_equal and self.linked_connected)
                else False,
            ),
        }
        return out

    def to_json_dict(self) -> dict:
        return {
            "a": self.a_audit.to_json_dict(),
            "b": self.b_audit.to_json_dict(),
            "digraph_a_strongly_connected": self.da_strongly_connected,
            "digraph_b_strongly_connected": self.db_strongly_connected,
            "linked_graph_connected": self.linked_connected,
            "a_dims_equal": self.a_dims_equal,
            "b_dims_equal": self.b_dims_equal,
            "same_family": self.same_family,
            "theorem_hypotheses": self.theorem_hypotheses(),
        }


def _audit_one_family(
    family: CoupledFamily,
    tol: TolerancePolicy,
    allow_float: bool,
    search_budget: int,
    seed: int,
) -> FamilyReducibilityAudit:
    try:
        verdict = chain_classify(family, tol)
        return FamilyReducibilityAudit(
            irreducible=not verdict.reducible,
            properly=verdict.properly,
            strongly=verdict.strongly,
            method="chain-exhaustive",
        )
    except PreconditionError:
        pass
    if not allow_float:
        return FamilyReducibilityAudit(None, None, None, "skipped-exact-mode")
    cert = coupled_irreducible_burnside(family, tol)
    if cert.irreducible:
        return FamilyReducibilityAudit(
            irreducible=True, properly=False, strongly=False,
            method="burnside-span-growth",
        )
    properly: bool | None = None
    strongly: bool | None = None
    witness = search_witness(family, tol, budget=search_budget, seed=seed,
                             target=Strength.PROPERLY_REDUCIBLE)
    if witness is not None:
        properly = True
        from .reduce import verify_reducing

        if verify_reducing(family, witness, tol) >= Strength.STRONGLY_REDUCIBLE:
            strongly = True
    return FamilyReducibilityAudit(
        irreducible=False, properly=properly, strongly=strongly,
        method="burnside-span-growth+witness-search",
    )


def audit_family(
    family: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    allow_float: bool = True,
    search_budget: int = 60,
    seed: int = 0,
) -> FamilyReducibilityAudit:
    """Reducibility audit of one family: exhaustive chain enumeration when
    the diagonal blocks allow it, otherwise the algebra-dimension test plus
    a budgeted witness search (or a skip marker in exact-only mode)."""
    return _audit_one_family(family, tol, allow_float, search_budget, seed)


def audit_hypotheses(
    a: CoupledFamily,
    b: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    allow_float: bool = True,
    search_budget: int = 60,
    seed: int = 0,
) -> HypothesisAudit:
    """Certify (or mark unknown) every hypothesis the dichotomies use."""
    da = family_digraph(a, tol)
    db = family_digraph(b, tol)
    return HypothesisAudit(
        a_audit=_audit_one_family(a, tol, allow_float, search_budget, seed),
        b_audit=_audit_one_family(b, tol, allow_float, search_budget, seed + 1),
        da_strongly_connected=is_strongly_connected(da),
        db_strongly_connected=is_strongly_connected(db),
        linked_connected=linked_graph(da, db).connected,
        a_dims_equal=len(set(a.dims)) == 1,
        b_dims_equal=len(set(b.dims)) == 1,
        same_family=a is b or (a.dims == b.dims and a.allclose(b, atol=1e-12)),
        exactly_solved=a.exact and b.exact,
    )


# ---------------------------------------------------------------------------
# kernel / range / eigenspace propagation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropagationReport:
    rows: tuple[dict, ...]
    worst_residual: float

    @property
    def ok(self) -> bool:
        return all(r["contained"] for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "rows": [dict(r) for r in self.rows],
            "worst_residual": self.worst_residual,
            "ok": self.ok,
        }


def propagation_checks(
    a: CoupledFamily,
    b: CoupledFamily,
    xs: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
    eigen_alphas: tuple[complex, ...] = (),
) -> PropagationReport:
    """Containments every solution must satisfy.

    For all pairs (i, j): b_ij maps ker(X_j) into ker(X_i), and a_ij maps
    range(X_j) into range(X_i).  For same-family systems with square
    solution blocks, eigenspaces ker(X_j - alpha I) propagate through a_ij
    for each candidate alpha supplied.
    """
    rows: list[dict] = []
    worst = 0.0
    kers = [kernel_basis(to_float(x), tol) for x in xs]
    rngs = [range_basis(to_float(x), tol) for x in xs]
    for i in range(a.K):
        for j in range(a.K):
            mapped = to_float(b.blocks[i][j]) @ kers[j]
            res = containment_residual(kers[i], mapped)
            rows.append({"check": "kernel", "pair": [i, j], "residual": res,
                         "contained": subspace_contains(kers[i], mapped, tol)})
            worst = max(worst, res)
            mapped = to_float(a.blocks[i][j]) @ rngs[j]
            res = containment_residual(rngs[i], mapped)
            rows.append({"check": "range", "pair": [i, j], "residual": res,
                         "contained": subspace_contains(rngs[i], mapped, tol)})
            worst = max(worst, res)
    square = all(x.shape[0] == x.shape[1] for x in xs)
    if square and eigen_alphas:
        eigs = {}
        for alpha in eigen_alphas:
            eigs[alpha] = [
                kernel_basis(to_float(x) - complex(alpha) * np.eye(x.shape[0]), tol)
                for x in xs
            ]
        for alpha, spaces in eigs.items():
            for i in range(a.K):
                for j in range(a.K):
                    mapped = to_float(a.blocks[i][j]) @ spaces[j]
                    res = containment_residual(spaces[i], mapped)
                    rows.append(
                        {"check": "eigenspace", "alpha": [complex(alpha).real,
                                                          complex(alpha).imag],
                         "pair": [i, j], "residual": res,
                         "contained": subspace_contains(spaces[i], mapped, tol)}
                    )
                    worst = max(worst, res)
    return PropagationReport(rows=tuple(rows), worst_residual=worst)


# ---------------------------------------------------------------------------
# dichotomy report over the whole solution space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DichotomyReport:
    solution_dimension: int
    audit: HypothesisAudit
    sample_count: int
    seed: int
    status_patterns: tuple[tuple[tuple[str, ...], int], ...]
    zero_pattern_tables: tuple[dict, ...]
    violations: tuple[str, ...]
    worst_solution_residual: float
    worst_propagation_residual: float
    classifications: tuple[SchurClassification, ...] = field(repr=False, default=())

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def to_json_dict(self) -> dict:
        return {
            "solution_dimension": self.solution_dimension,
            "audit": self.audit.to_json_dict(),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "status_patterns": [
                {"statuses": list(p), "count": c} for (p, c) in self.status_patterns
            ],
            "zero_pattern_tables": [dict(t) for t in self.zero_pattern_tables],
            "violations": list(self.violations),
            "worst_solution_residual": self.worst_solution_residual,
            "worst_propagation_residual": self.worst_propagation_residual,
            "ok": self.ok,
        }


def dichotomy_report(
    a: CoupledFamily,
    b: CoupledFamily,
    tol: TolerancePolicy = DEFAULT_TOL,
    seed: int = 0,
    samples: int = 100,
    allow_float: bool = True,
) -> DichotomyReport:
    """Solve, audit hypotheses, and classify sampled solutions.

    Alongside the kernel basis itself, ``samples`` random linear
    combinations of the basis (seeded, complex Gaussian coefficients) are
    classified; any theorem whose hypotheses are certified but whose
    conclusion fails on a sample is reported as a violation.
    """
    system = build_system(a, b)
    space = solve(system, tol)
    audit = audit_hypotheses(a, b, tol, allow_float=allow_float, seed=seed)
    rng = np.random.default_rng(seed)
    candidates: list[tuple[np.ndarray, ...]] = list(space.basis)
    if space.dimension > 0:
        for _ in range(samples):
            coeffs = rng.standard_normal(space.dimension) + 1j * rng.standard_normal(
                space.dimension
            )
            candidates.append(space.combination(coeffs))
    violations: list[str] = []
    patterns: dict[tuple[str, ...], int] = {}
    tables: dict[tuple, dict] = {}
    classifications = []
    worst_res = 0.0
    worst_prop = 0.0
    for xs in candidates:
        worst_res = max(worst_res, solution_residual(a, b, xs))
        cls = classify_solution(a, b, xs, tol, audit)
        classifications.append(cls)
        patterns[cls.statuses] = patterns.get(cls.statuses, 0) + 1
        violations.extend(cls.violations)
        if cls.zero_pattern is not None:
            key = (tuple(cls.zero_pattern["zero_indices"]),
                   tuple(cls.zero_pattern["nonsingular_indices"]))
            tables.setdefault(key, cls.zero_pattern)
        alphas: tuple[complex, ...] = ()
        if cls.same_family:
            vals = [z for z in cls.per_index_scalar if z is not None]
            alphas = tuple({0j, *map(complex, vals)})
        prop = propagation_checks(a, b, xs, tol, eigen_alphas=alphas)
        worst_prop = max(worst_prop, prop.worst_residual)
        if not prop.ok:
            violations.append(
                "propagation: kernel/range containment failed on a sample"
            )
    return DichotomyReport(
        solution_dimension=space.dimension,
        audit=audit,
        sample_count=len(candidates),
        seed=seed,
        status_patterns=tuple(sorted(patterns.items(), key=lambda kv: kv[0])),
        zero_pattern_tables=tuple(
            tables[k] for k in sorted(tables.keys())
        ),
        violations=tuple(dict.fromkeys(violations)),
        worst_solution_residual=worst_res,
        worst_propagation_residual=worst_prop,
        classifications=tuple(classifications),
    )
