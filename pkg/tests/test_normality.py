import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledfam.family import CoupledFamily, is_coupled_normal
from coupledfam.fixtures import random_pair
from coupledfam.linalg import (
    DEFAULT_TOL,
    SingularMatrixError,
    conj_t,
    exact_matrix,
)
from coupledfam.normality import (
    coupled_commute_checks,
    embed_pair,
    normal_equivalence_suite,
    perp_invariance_check,
    unitary_schur_classify,
)
from coupledfam.reduce import PreconditionError
from coupledfam.sylvester import audit_hypotheses

CONDITION_NAMES = (
    "b_normal",
    "adjoint_intertwined",
    "gram_commutes_a",
    "gram_commutes_a_star",
    "cogram_commutes_b",
    "cogram_commutes_b_star",
)


def random_normal_matrix(n, rng):
    d = np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q @ d @ conj_t(q)


def random_unitary(n, rng):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q


NORMAL_PAIR = random_pair("coupled_normal_similar", dims=(2, 2, 2), seed=3)
PLANTED = NORMAL_PAIR.planted_solution


# ---------------------------------------------------------------------------
# six-way equivalence suite
# ---------------------------------------------------------------------------

def test_unitary_similarity_makes_all_six_hold():
    rng = np.random.default_rng(5)
    a = random_normal_matrix(4, rng)
    s = random_unitary(4, rng)
    rep = normal_equivalence_suite(a, s)
    assert rep.flags == (True,) * 6
    assert rep.all_equal
    assert max(rep.residuals) < 1e-12


def test_generic_similarity_makes_all_six_fail():
    rng = np.random.default_rng(5)
    a = random_normal_matrix(4, rng)
    s = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rep = normal_equivalence_suite(a, s)
    assert rep.flags == (False,) * 6
    assert rep.all_equal
    assert min(rep.residuals) > 1e-3


def test_identity_input_holds_for_any_similarity():
    # gram products always commute with the identity
    rng = np.random.default_rng(7)
    s = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rep = normal_equivalence_suite(np.eye(4), s)
    assert rep.flags == (True,) * 6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), unitary=st.booleans(), n=st.integers(2, 5))
def test_six_conditions_always_agree(seed, unitary, n):
    rng = np.random.default_rng(seed)
    a = random_normal_matrix(n, rng)
    if unitary:
        s = random_unitary(n, rng)
    else:
        s = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        s += 3.0 * np.eye(n)
    rep = normal_equivalence_suite(a, s)
    assert rep.all_equal


def test_suite_json_condition_order():
    rng = np.random.default_rng(5)
    rep = normal_equivalence_suite(random_normal_matrix(3, rng), random_unitary(3, rng))
    payload = rep.to_json_dict()
    assert sorted(payload) == ["all_equal", "conditions"]
    assert tuple(c["name"] for c in payload["conditions"]) == CONDITION_NAMES
    assert all(set(c) == {"name", "holds", "residual"} for c in payload["conditions"])


def test_suite_rejects_non_normal_input():
    rng = np.random.default_rng(0)
    with pytest.raises(PreconditionError, match="not normal"):
        normal_equivalence_suite(rng.standard_normal((3, 3)), np.eye(3))


def test_suite_rejects_singular_similarity():
    with pytest.raises(SingularMatrixError):
        normal_equivalence_suite(np.eye(3), np.zeros((3, 3)))


def test_suite_rejects_shape_mismatch():
    with pytest.raises(ValueError, match="equal size"):
        normal_equivalence_suite(np.eye(3), np.eye(4))


def test_suite_converts_exact_inputs():
    rep = normal_equivalence_suite(exact_matrix(np.eye(3)), exact_matrix(2 * np.eye(3)))
    assert rep.flags == (True,) * 6


# ---------------------------------------------------------------------------
# two-space embeddings
# ---------------------------------------------------------------------------

def test_embedding_places_blocks_off_diagonal():
    ep = embed_pair(NORMAL_PAIR.a, 0, 1)
    n0, n1 = NORMAL_PAIR.a.dims[0], NORMAL_PAIR.a.dims[1]
    assert ep.matrix.shape == (n0 + n1, n0 + n1)
    assert np.max(np.abs(ep.matrix[:n0, :n0])) == 0.0
    assert np.max(np.abs(ep.matrix[n0:, n0:])) == 0.0
    assert np.allclose(ep.matrix[:n0, n0:], np.asarray(NORMAL_PAIR.a.blocks[0][1], dtype=complex))
    assert np.allclose(ep.matrix[n0:, :n0], np.asarray(NORMAL_PAIR.a.blocks[1][0], dtype=complex))


def test_all_embeddings_normal_for_coupled_normal_family():
    ok, _ = is_coupled_normal(NORMAL_PAIR.a, DEFAULT_TOL)
    assert ok
    for i in range(NORMAL_PAIR.a.K):
        for j in range(NORMAL_PAIR.a.K):
            assert embed_pair(NORMAL_PAIR.a, i, j).normal


def test_perturbed_block_breaks_exactly_its_embedding():
    blocks = [
        [np.array(np.asarray(b, dtype=complex)) for b in row]
        for row in NORMAL_PAIR.a.blocks
    ]
    blocks[0][1] = blocks[0][1] + 0.5
    bad = CoupledFamily(dims=NORMAL_PAIR.a.dims, blocks=tuple(tuple(r) for r in blocks))
    ok, badpairs = is_coupled_normal(bad, DEFAULT_TOL)
    assert not ok
    assert badpairs[0] == (0, 1)
    assert not embed_pair(bad, 0, 1).normal
    assert embed_pair(bad, 0, 1).residual > 0.1
    assert embed_pair(bad, 1, 2).normal


def test_embedding_rejects_out_of_range_indices():
    with pytest.raises(IndexError, match="out of range"):
        embed_pair(NORMAL_PAIR.a, 0, 5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_first_normality_violation_shows_in_its_embedding(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 3, 2)
    fam = CoupledFamily.from_blocks(
        [
            [rng.standard_normal((dims[i], dims[j])) for j in range(3)]
            for i in range(3)
        ]
    )
    ok, badpairs = is_coupled_normal(fam, DEFAULT_TOL)
    if ok:
        for i in range(3):
            for j in range(3):
                assert embed_pair(fam, i, j).normal
    else:
        i, j = badpairs[0]
        assert not embed_pair(fam, i, j).normal


# ---------------------------------------------------------------------------
# orthogonal-complement invariance
# ---------------------------------------------------------------------------

def adjoint_balanced_pair(seed, shape=(5, 4), split=2):
    # singular-vector splits of (c, conj(c)') satisfy both gram balances
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    left, _, right_h = np.linalg.svd(c, full_matrices=True)
    u = conj_t(right_h)[:, :split]
    w = left[:, :split]
    return c, conj_t(c), u, w


def test_perp_invariance_holds_for_singular_vector_split():
    c, d, u, w = adjoint_balanced_pair(11)
    res = perp_invariance_check(c, d, u, w)
    assert res.holds
    assert res.forward_residual < 1e-12
    assert res.backward_residual < 1e-12


def test_perp_invariance_json_fields():
    c, d, u, w = adjoint_balanced_pair(11)
    payload = perp_invariance_check(c, d, u, w).to_json_dict()
    assert sorted(payload) == ["backward_residual", "forward_residual", "holds"]
    assert payload["holds"] is True


def test_perp_rejects_gram_imbalance():
    rng = np.random.default_rng(1)
    c, _, u, w = adjoint_balanced_pair(11)
    with pytest.raises(PreconditionError, match="gram balance"):
        perp_invariance_check(c, rng.standard_normal((4, 5)), u, w)


def test_perp_rejects_non_invariant_subspaces():
    rng = np.random.default_rng(2)
    c, d, _, _ = adjoint_balanced_pair(11)
    u = np.linalg.qr(rng.standard_normal((4, 2)))[0]
    w = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    with pytest.raises(PreconditionError, match="does not map span"):
        perp_invariance_check(c, d, u, w)


def test_perp_rejects_backward_non_invariance():
    c, d, _, _ = adjoint_balanced_pair(11)
    full_w = np.eye(5, dtype=complex)
    with pytest.raises(PreconditionError, match="d does not map"):
        perp_invariance_check(c, d, np.zeros((4, 0)), full_w)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), split=st.integers(0, 4))
def test_perp_invariance_holds_at_every_split(seed, split):
    c, d, u, w = adjoint_balanced_pair(seed, split=split)
    res = perp_invariance_check(c, d, u, w)
    assert res.holds


# ---------------------------------------------------------------------------
# commutation and eigenspace checks along a solution
# ---------------------------------------------------------------------------

def test_commute_checks_pass_on_planted_unitary_solution():
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED)
    assert rep.ok
    assert rep.spectrum_index == 0
    assert len(rep.alphas) == 1
    assert abs(rep.alphas[0] - 1.0) < 1e-9
    assert tuple(len(p["rows"]) for p in rep.parts) == (3, 9, 9, 2, 3, 1)
    assert not any(r.get("skipped") for p in rep.parts for r in p["rows"])


def test_commute_checks_alpha_scales_quadratically():
    scaled = tuple(3.0 * np.asarray(x, dtype=complex) for x in PLANTED)
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, scaled)
    assert abs(rep.alphas[0] - 9.0) < 1e-8
    assert rep.ok


def test_commute_checks_zero_solution_is_vacuous():
    zeros = tuple(np.zeros_like(np.asarray(x, dtype=complex)) for x in PLANTED)
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, zeros)
    assert rep.alphas == ()
    assert rep.spectrum_index is None
    assert rep.ok
    assert all(r["skipped"] for r in rep.parts[0]["rows"])
    assert rep.parts[2]["rows"] == []


def test_commute_checks_dimension_equality_rows():
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED)
    row = rep.parts[2]["rows"][1]
    assert sorted(row) == ["alpha", "dim_u_equal", "dim_y_equal", "ok", "pair"]
    assert row["dim_u_equal"] and row["dim_y_equal"]


def test_commute_checks_component_rows():
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED)
    graphs = sorted(r["graph"] for r in rep.parts[3]["rows"])
    assert graphs == ["a", "b"]
    for row in rep.parts[3]["rows"]:
        assert row["component"] == [0, 1, 2]
        assert row["dims"] == [2, 2, 2]
        assert row["ok"]
    linked_row = rep.parts[5]["rows"][0]
    assert linked_row["component"] == [0, 1, 2]
    assert linked_row["ok"]


def test_commute_checks_reject_non_normal_family():
    gen = random_pair("coupled_similar", dims=(2, 2, 2), seed=1)
    with pytest.raises(PreconditionError, match="not coupled normal"):
        coupled_commute_checks(gen.a, gen.b, gen.planted_solution)


def test_commute_checks_reject_non_solution():
    bad = tuple(np.asarray(x, dtype=complex) + 0.7 for x in PLANTED)
    with pytest.raises(PreconditionError, match="do not solve"):
        coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, bad)


def test_commute_report_serializes():
    rep = coupled_commute_checks(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED)
    payload = json.loads(json.dumps(rep.to_json_dict()))
    assert sorted(payload) == ["alphas", "ok", "parts", "spectrum_index"]
    assert payload["ok"] is True
    assert [p["part"] for p in payload["parts"]] == [1, 2, 3, 4, 5, 6]


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_commute_checks_pass_on_random_normal_pairs(seed):
    pair = random_pair("coupled_normal_similar", dims=(2, 3), seed=seed)
    rep = coupled_commute_checks(pair.a, pair.b, pair.planted_solution)
    assert rep.ok
    assert abs(rep.alphas[0] - 1.0) < 1e-8


# ---------------------------------------------------------------------------
# scalar-times-unitary classification
# ---------------------------------------------------------------------------

def test_classify_without_audit_has_no_theorem_entries():
    rep = unitary_schur_classify(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED)
    assert rep.theorems == ()
    assert rep.statuses == ("nonsingular",) * 3
    assert abs(rep.unitary_alpha - 1.0) < 1e-9
    assert all(abs(v - 1.0) < 1e-9 for v in rep.per_index_unitary_alpha)
    assert rep.violations == ()


def test_classify_with_audit_adds_normal_theorems():
    aud = audit_hypotheses(NORMAL_PAIR.a, NORMAL_PAIR.b, DEFAULT_TOL)
    rep = unitary_schur_classify(NORMAL_PAIR.a, NORMAL_PAIR.b, PLANTED, DEFAULT_TOL, aud)
    names = [t["name"] for t in rep.theorems]
    assert names == [
        "irreducible-pair",
        "not-properly-reducible-pair",
        "strong-digraphs",
        "strong-linked",
        "normal-irreducible-pair",
        "normal-not-properly-reducible-pair",
        "normal-strong-linked",
    ]
    assert all(t["hypotheses"] is True for t in rep.theorems)
    assert all(t["conclusion_holds"] is True for t in rep.theorems)
    assert rep.violations == ()


def test_classify_scaled_solution_reports_scaled_alpha():
    scaled = tuple(2.0 * np.asarray(x, dtype=complex) for x in PLANTED)
    rep = unitary_schur_classify(NORMAL_PAIR.a, NORMAL_PAIR.b, scaled)
    assert abs(rep.unitary_alpha - 2.0) < 1e-9
    assert all(abs(v - 2.0) < 1e-9 for v in rep.per_index_unitary_alpha)


def test_classify_zero_solution():
    zeros = tuple(np.zeros_like(np.asarray(x, dtype=complex)) for x in PLANTED)
    rep = unitary_schur_classify(NORMAL_PAIR.a, NORMAL_PAIR.b, zeros)
    assert rep.all_zero
    assert rep.unitary_alpha == 0.0
    assert rep.per_index_unitary_alpha == (0.0, 0.0, 0.0)


def test_classify_same_family_identity_solution():
    ident = tuple(np.eye(n, dtype=complex) for n in NORMAL_PAIR.a.dims)
    rep = unitary_schur_classify(NORMAL_PAIR.a, NORMAL_PAIR.a, ident)
    assert rep.same_family
    assert rep.common_scalar is not None
    assert abs(rep.common_scalar - 1.0) < 1e-12
    assert abs(rep.unitary_alpha - 1.0) < 1e-12


def test_classify_rejects_non_normal_family():
    gen = random_pair("coupled_similar", dims=(2, 2, 2), seed=1)
    with pytest.raises(PreconditionError, match="not coupled normal"):
        unitary_schur_classify(gen.a, gen.b, gen.planted_solution)
