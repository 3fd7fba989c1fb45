"""Coupled normality: equivalences, embeddings, and unitary Schur structure.

A family is normal in the coupled sense when conj(A_ij)' A_ij equals
A_ji conj(A_ji)' for every pair, which is the same as every two-space
embedding [[0, A_ij], [A_ji, 0]] being a normal matrix.  For such families
the solutions of the coupled intertwining equations inherit unitary
structure: each nonzero block is a scalar multiple of a unitary matrix,
with the scalar shared across blocks under the irreducibility or
graph-connectivity hypotheses.

Everything here runs on the floating backend; exact inputs are converted
on entry (the eigenvalue machinery is tolerance-based by nature).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .family import CoupledFamily, coupled_normality_violations
from .graphs import (
    family_digraph,
    linked_graph,
    strongly_connected_components,
)
from .linalg import (
    DEFAULT_TOL,
    SingularMatrixError,
    TolerancePolicy,
    conj_t,
    containment_residual,
    hermitian_eigen,
    inverse,
    is_nonsingular,
    kernel_basis,
    max_abs,
    subspace_contains,
    to_float,
    unitary_multiple_test,
)
from .reduce import PreconditionError
from .sylvester import (
    HypothesisAudit,
    SchurClassification,
    classify_solution,
    solution_residual,
)

__all__ = [
    "NormalityEquivalenceReport",
    "normal_equivalence_suite",
    "EmbeddedPair",
    "embed_pair",
    "PerpInvarianceResult",
    "perp_invariance_check",
    "CoupledCommuteReport",
    "coupled_commute_checks",
    "unitary_schur_classify",
]


def _rel(residual_matrix: np.ndarray, *factors: np.ndarray) -> float:
    scale = 1.0
    for f in factors:
        scale = max(scale, max_abs(f))
    return max_abs(residual_matrix) / scale


def _normality_residual(m: np.ndarray) -> float:
    return _rel(m @ conj_t(m) - conj_t(m) @ m, m @ conj_t(m))


# ---------------------------------------------------------------------------
# six-way equivalence for a single similarity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityEquivalenceReport:
    """Truth values and residuals of the six equivalent statements about
    a normal matrix, a nonsingular similarity, and its image."""

    b_normal: bool
    adjoint_intertwined: bool
    gram_commutes_a: bool
    gram_commutes_a_star: bool
    cogram_commutes_b: bool
    cogram_commutes_b_star: bool
    residuals: tuple[float, float, float, float, float, float]

    @property
    def flags(self) -> tuple[bool, ...]:
        return (
            self.b_normal,
            self.adjoint_intertwined,
            self.gram_commutes_a,
            self.gram_commutes_a_star,
            self.cogram_commutes_b,
            self.cogram_commutes_b_star,
        )

    @property
    def all_equal(self) -> bool:
        return len(set(self.flags)) == 1

    def to_json_dict(self) -> dict:
        names = (
            "b_normal",
            "adjoint_intertwined",
            "gram_commutes_a",
            "gram_commutes_a_star",
            "cogram_commutes_b",
            "cogram_commutes_b_star",
        )
        return {
            "conditions": [
                {"name": n, "holds": f, "residual": r}
                for n, f, r in zip(names, self.flags, self.residuals)
            ],
            "all_equal": self.all_equal,
        }


def normal_equivalence_suite(
    a: np.ndarray, s: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL
) -> NormalityEquivalenceReport:
    """Evaluate the six equivalent conditions for b = s^-1 a s.

    With ``a`` normal and ``s`` nonsingular these are all true or all
    false together: b normal; s^-1 a* s = b*; s s* commutes with a;
    s s* commutes with a*; s* s commutes with b; s* s commutes with b*.
    """
    a = to_float(a)
    s = to_float(s)
    if a.shape[0] != a.shape[1] or a.shape != s.shape:
        raise ValueError("expected square matrices of equal size")
    if _normality_residual(a) > tol.equality_atol:
        raise PreconditionError("input matrix is not normal within tolerance")
    if not is_nonsingular(s, tol):
        raise SingularMatrixError("similarity matrix is singular")
    s_inv = inverse(s, tol)
    b = s_inv @ a @ s
    gram = s @ conj_t(s)
    cogram = conj_t(s) @ s
    res = (
        _rel(b @ conj_t(b) - conj_t(b) @ b, b @ conj_t(b)),
        _rel(s_inv @ conj_t(a) @ s - conj_t(b), conj_t(b)),
        _rel(gram @ a - a @ gram, gram, a),
        _rel(gram @ conj_t(a) - conj_t(a) @ gram, gram, a),
        _rel(cogram @ b - b @ cogram, cogram, b),
        _rel(cogram @ conj_t(b) - conj_t(b) @ cogram, cogram, b),
    )
    flags = tuple(r <= tol.equality_atol for r in res)
    return NormalityEquivalenceReport(*flags, residuals=res)


# ---------------------------------------------------------------------------
# two-space embedding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddedPair:
    matrix: np.ndarray
    normal: bool
    residual: float


def embed_pair(
    family: CoupledFamily, i: int, j: int, tol: TolerancePolicy = DEFAULT_TOL
) -> EmbeddedPair:
    """Square embedding [[0, block(i,j)], [block(j,i), 0]] with its
    normality verdict; the family is coupled normal iff every embedding
    is normal."""
    if not (0 <= i < family.K and 0 <= j < family.K):
        raise IndexError(f"indices ({i}, {j}) out of range for K={family.K}")
    n_i, n_j = family.dims[i], family.dims[j]
    aij = to_float(family.blocks[i][j])
    aji = to_float(family.blocks[j][i])
    m = np.zeros((n_i + n_j, n_i + n_j), dtype=complex)
    m[:n_i, n_i:] = aij
    m[n_i:, :n_i] = aji
    res = _normality_residual(m)
    return EmbeddedPair(matrix=m, normal=res <= tol.equality_atol, residual=res)


# ---------------------------------------------------------------------------
# orthogonal-complement invariance
# ---------------------------------------------------------------------------

def _perp(basis: np.ndarray, ambient: int, tol: TolerancePolicy) -> np.ndarray:
    if basis.shape[1] == 0:
        return np.eye(ambient, dtype=complex)
    return kernel_basis(conj_t(to_float(basis)), tol)


@dataclass(frozen=True)
class PerpInvarianceResult:
    holds: bool
    forward_residual: float
    backward_residual: float

    def to_json_dict(self) -> dict:
        return {
            "holds": self.holds,
            "forward_residual": self.forward_residual,
            "backward_residual": self.backward_residual,
        }


def perp_invariance_check(
    c: np.ndarray,
    d: np.ndarray,
    u: np.ndarray,
    w: np.ndarray,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> PerpInvarianceResult:
    """Orthogonal complements inherit invariance for balanced pairs.

    Preconditions (verified, failures raised): conj(c)' c = d conj(d)',
    conj(d)' d = c conj(c)', plus c(span u) inside span w and d(span w)
    inside span u.  Then c maps the orthogonal complement of u into the
    complement of w, and d maps the complement of w into the complement
    of u.
    """
    c = to_float(c)
    d = to_float(d)
    u = to_float(u)
    w = to_float(w)
    if _rel(conj_t(c) @ c - d @ conj_t(d), c, d) > tol.equality_atol:
        raise PreconditionError("gram balance conj(c)' c = d conj(d)' fails")
    if _rel(conj_t(d) @ d - c @ conj_t(c), c, d) > tol.equality_atol:
        raise PreconditionError("gram balance conj(d)' d = c conj(c)' fails")
    if not subspace_contains(w, c @ u, tol):
        raise PreconditionError("c does not map span(u) into span(w)")
    if not subspace_contains(u, d @ w, tol):
        raise PreconditionError("d does not map span(w) into span(u)")
    u_perp = _perp(u, c.shape[1], tol)
    w_perp = _perp(w, d.shape[1], tol)
    fwd = containment_residual(w_perp, c @ u_perp)
    bwd = containment_residual(u_perp, d @ w_perp)
    holds = subspace_contains(w_perp, c @ u_perp, tol) and subspace_contains(
        u_perp, d @ w_perp, tol
    )
    return PerpInvarianceResult(
        holds=holds, forward_residual=fwd, backward_residual=bwd
    )


# ---------------------------------------------------------------------------
# commutation and eigenspace checks along a solution
# ---------------------------------------------------------------------------

def _require_coupled_normal(family: CoupledFamily, tol: TolerancePolicy, name: str):
    bad = coupled_normality_violations(family, tol)
    if bad:
        raise PreconditionError(
            f"family {name} is not coupled normal (first violation at {bad[0]})"
        )


def _eigenspace(
    evals: np.ndarray, basis: np.ndarray, alpha: float, atol: float
) -> np.ndarray:
    cols = [k for k, lam in enumerate(evals) if abs(lam - alpha) <= atol]
    if not cols:
        return np.zeros((basis.shape[0], 0), dtype=complex)
    return basis[:, cols]


@dataclass(frozen=True)
class CoupledCommuteReport:
    """Per-part results of the product-commutation / eigenspace checks."""

    alphas: tuple[float, ...]
    spectrum_index: int | None
    parts: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return all(
            row.get("ok", True)
            for part in self.parts
            for row in part["rows"]
            if not row.get("skipped", False)
        )

    def to_json_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "spectrum_index": self.spectrum_index,
            "parts": [dict(p) for p in self.parts],
            "ok": self.ok,
        }


def coupled_commute_checks(
    a: CoupledFamily,
    b: CoupledFamily,
    s: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
    alpha_atol: float | None = None,
) -> CoupledCommuteReport:
    """Verify the structural identities a coupled-normal solution obeys.

    Parts (rows are skipped, not failed, when their gate is unmet):
      1. nonsingular S_i: S_i conj(S_i)' commutes with a_ii, and
         conj(S_i)' S_i commutes with b_ii;
      2. nonsingular S_i, S_j: S_i conj(S_i)' a_ij = a_ij S_j conj(S_j)'
         and the mirrored identity for b;
      3. for each eigenvalue alpha of the reference product S_p conj(S_p)'
         (smallest p with nonzero S_p): a_ij maps the alpha-eigenspace of
         S_j conj(S_j)' into that of S_i conj(S_i)' (nonsingular pairs),
         with dimension equality when a_ij is nonsingular; likewise for b
         with the conj(S)' S products;
      4. all S_i nonsingular: eigenspace dimensions constant on strong
         components of the digraphs;
      5. alpha != 0: the two eigenspace families have equal dimensions
         at each index;
      6. all S_i nonsingular, alpha != 0: dimensions constant on linked
         components.
    """
    _require_coupled_normal(a, tol, "a")
    _require_coupled_normal(b, tol, "b")
    s = tuple(to_float(x) for x in s)
    res = solution_residual(a, b, s)
    scale = max(1.0, max(max_abs(x) for x in s)) * max(
        1.0, max_abs(a.assemble()), max_abs(b.assemble())
    )
    if res > tol.equality_atol ** 0.5 * scale:
        raise PreconditionError(
            f"blocks do not solve the coupled equations (residual {res:.3e})"
        )
    k = a.K
    af = a.to_float()
    bf = b.to_float()
    nonsing = [
        s[i].shape[0] == s[i].shape[1] and is_nonsingular(s[i], tol) for i in range(k)
    ]
    gram = [x @ conj_t(x) for x in s]
    cogram = [conj_t(x) @ x for x in s]

    part1_rows = []
    for i in range(k):
        if not nonsing[i]:
            part1_rows.append({"space": i, "skipped": True, "reason": "singular"})
            continue
        r1 = _rel(gram[i] @ af.blocks[i][i] - af.blocks[i][i] @ gram[i],
                  gram[i], af.blocks[i][i])
        r2 = _rel(cogram[i] @ bf.blocks[i][i] - bf.blocks[i][i] @ cogram[i],
                  cogram[i], bf.blocks[i][i])
        part1_rows.append(
            {"space": i, "residuals": [r1, r2],
             "ok": max(r1, r2) <= tol.equality_atol}
        )

    part2_rows = []
    for i in range(k):
        for j in range(k):
            if not (nonsing[i] and nonsing[j]):
                part2_rows.append({"pair": [i, j], "skipped": True,
                                   "reason": "singular"})
                continue
            r1 = _rel(gram[i] @ af.blocks[i][j] - af.blocks[i][j] @ gram[j],
                      gram[i], af.blocks[i][j])
            r2 = _rel(cogram[i] @ bf.blocks[i][j] - bf.blocks[i][j] @ cogram[j],
                      cogram[i], bf.blocks[i][j])
            part2_rows.append(
                {"pair": [i, j], "residuals": [r1, r2],
                 "ok": max(r1, r2) <= tol.equality_atol}
            )

    # reference spectrum: smallest index with a nonzero block
    p = next((i for i in range(k) if max_abs(s[i]) > tol.equality_atol), None)
    alphas: tuple[float, ...] = ()
    if p is not None:
        evals_p, _ = hermitian_eigen(gram[p], tol)
        if alpha_atol is None:
            alpha_atol = 1e-7 * max(1.0, float(evals_p[0]) if len(evals_p) else 1.0)
        dedup: list[float] = []
        for lam in evals_p:
            if not any(abs(lam - mu) <= alpha_atol for mu in dedup):
                dedup.append(float(lam))
        alphas = tuple(dedup)
    eig_u = [hermitian_eigen(gram[i], tol) for i in range(k)]
    eig_y = [hermitian_eigen(cogram[i], tol) for i in range(k)]

    part3_rows = []
    part4_rows = []
    part5_rows = []
    part6_rows = []
    da = family_digraph(af, tol)
    db = family_digraph(bf, tol)
    g = linked_graph(da, db)
    all_nonsing = all(nonsing)
    for alpha in alphas:
        u_spaces = [
            _eigenspace(eig_u[i][0], eig_u[i][1], alpha, alpha_atol) for i in range(k)
        ]
        y_spaces = [
            _eigenspace(eig_y[i][0], eig_y[i][1], alpha, alpha_atol) for i in range(k)
        ]
        for i in range(k):
            for j in range(k):
                if not (nonsing[i] and nonsing[j]):
                    part3_rows.append({"alpha": alpha, "pair": [i, j],
                                       "skipped": True, "reason": "singular"})
                    continue
                ok_u = subspace_contains(u_spaces[i], af.blocks[i][j] @ u_spaces[j], tol)
                ok_y = subspace_contains(y_spaces[i], bf.blocks[i][j] @ y_spaces[j], tol)
                row = {"alpha": alpha, "pair": [i, j], "ok": ok_u and ok_y}
                if af.blocks[i][j].shape[0] == af.blocks[i][j].shape[1] and \
                        is_nonsingular(af.blocks[i][j], tol):
                    row["dim_u_equal"] = u_spaces[i].shape[1] == u_spaces[j].shape[1]
                    row["ok"] = row["ok"] and row["dim_u_equal"]
                if bf.blocks[i][j].shape[0] == bf.blocks[i][j].shape[1] and \
                        is_nonsingular(bf.blocks[i][j], tol):
                    row["dim_y_equal"] = y_spaces[i].shape[1] == y_spaces[j].shape[1]
                    row["ok"] = row["ok"] and row["dim_y_equal"]
                part3_rows.append(row)
        if all_nonsing:
            for comp in strongly_connected_components(da):
                dims_here = [u_spaces[i].shape[1] for i in comp]
                part4_rows.append({"alpha": alpha, "graph": "a", "component": comp,
                                   "dims": dims_here, "ok": len(set(dims_here)) == 1})
            for comp in strongly_connected_components(db):
                dims_here = [y_spaces[i].shape[1] for i in comp]
                part4_rows.append({"alpha": alpha, "graph": "b", "component": comp,
                                   "dims": dims_here, "ok": len(set(dims_here)) == 1})
        else:
            part4_rows.append({"alpha": alpha, "skipped": True,
                               "reason": "some block singular"})
        if abs(alpha) > alpha_atol:
            for i in range(k):
                part5_rows.append(
                    {"alpha": alpha, "space": i,
                     "dims": [u_spaces[i].shape[1], y_spaces[i].shape[1]],
                     "ok": u_spaces[i].shape[1] == y_spaces[i].shape[1]}
                )
            if all_nonsing:
                for comp in g.connected_components():
                    dims_here = [u_spaces[i].shape[1] for i in comp]
                    part6_rows.append({"alpha": alpha, "component": comp,
                                       "dims": dims_here,
                                       "ok": len(set(dims_here)) == 1})
            else:
                part6_rows.append({"alpha": alpha, "skipped": True,
                                   "reason": "some block singular"})
        else:
            part5_rows.append({"alpha": alpha, "skipped": True,
                               "reason": "alpha = 0"})
            part6_rows.append({"alpha": alpha, "skipped": True,
                               "reason": "alpha = 0"})

    parts = (
        {"part": 1, "rows": part1_rows},
        {"part": 2, "rows": part2_rows},
        {"part": 3, "rows": part3_rows},
        {"part": 4, "rows": part4_rows},
        {"part": 5, "rows": part5_rows},
        {"part": 6, "rows": part6_rows},
    )
    return CoupledCommuteReport(alphas=alphas, spectrum_index=p, parts=parts)


# ---------------------------------------------------------------------------
# scalar-times-unitary classification
# ---------------------------------------------------------------------------

def unitary_schur_classify(
    a: CoupledFamily,
    b: CoupledFamily,
    s: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
    audit: HypothesisAudit | None = None,
) -> SchurClassification:
    """Classify a solution of a coupled-normal system as scalar-times-unitary.

    Extends the plain dichotomy classification with per-block unitary
    factorization tests.  Under the audited hypotheses: with both families
    irreducible (or the linked-graph variant), all nonzero blocks share a
    single nonnegative alpha with S_i = alpha U_i, and a same-family system
    forces S_i = beta I; with the weaker not-properly-reducible hypothesis
    the scalars may differ per index.
    """
    _require_coupled_normal(a, tol, "a")
    _require_coupled_normal(b, tol, "b")
    s = tuple(to_float(x) for x in s)
    base = classify_solution(a, b, s, tol, audit)
    per_alpha: list[float | None] = []
    for i, x in enumerate(s):
        if base.statuses[i] == "zero":
            per_alpha.append(0.0)
            continue
        hit = unitary_multiple_test(x, tol) if x.shape[0] == x.shape[1] else None
        per_alpha.append(None if hit is None else float(hit[0]))
    nonzero_alphas = [
        per_alpha[i] for i in range(a.K) if base.statuses[i] != "zero"
    ]
    common_alpha: float | None = None
    if nonzero_alphas and all(v is not None for v in nonzero_alphas):
        ref = nonzero_alphas[0]
        if all(abs(v - ref) <= tol.equality_atol * max(1.0, ref)
               for v in nonzero_alphas):
            common_alpha = float(ref)
    if base.all_zero:
        common_alpha = 0.0
    theorems = list(base.theorems)
    violations = list(base.violations)
    if audit is not None:
        hyps = audit.theorem_hypotheses()
        regimes = {
            "normal-irreducible-pair": hyps["irreducible-pair"],
            "normal-not-properly-reducible-pair": hyps["not-properly-reducible-pair"],
            "normal-strong-linked": hyps["strong-linked"],
        }
        for name, hyp in regimes.items():
            entry: dict = {"name": name, "hypotheses": hyp}
            if hyp is True:
                if name == "normal-not-properly-reducible-pair":
                    ok = all(
                        base.statuses[i] == "zero" or per_alpha[i] is not None
                        for i in range(a.K)
                    )
                    if ok and base.same_family:
                        ok = all(
                            base.statuses[i] == "zero"
                            or base.per_index_scalar[i] is not None
                            for i in range(a.K)
                        )
                else:
                    ok = base.all_zero or (
                        base.all_nonsingular and common_alpha is not None
                    )
                    if ok and base.same_family and not base.all_zero:
                        ok = base.common_scalar is not None
                entry["conclusion_holds"] = ok
                if not ok:
                    violations.append(
                        f"{name}: hypotheses verified but unitary conclusion failed"
                    )
            else:
                entry["conclusion_holds"] = None
            theorems.append(entry)
    return replace(
        base,
        theorems=tuple(theorems),
        violations=tuple(dict.fromkeys(violations)),
        unitary_alpha=common_alpha,
        per_index_unitary_alpha=tuple(per_alpha),
    )
