import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledfam.family import CoupledFamily
from coupledfam.fixtures import (
    FixtureSpec,
    example_51,
    figure1_pair,
    jordan_nilpotent,
    make_fixture,
    random_pair,
)
from coupledfam.linalg import DEFAULT_TOL, conj_t, exact_matrix, max_abs, orthonormal_columns
from coupledfam.reduce import (
    BudgetExceededError,
    PreconditionError,
    Strength,
    SubspaceFamily,
    block_form_transform,
    chain_classify,
    closure_from_seed,
    complement_family,
    containment_table,
    coupled_irreducible_burnside,
    search_witness,
    verify_reducing,
)

E1 = np.array([[1.0], [0.0]])
E2 = np.array([[0.0], [1.0]])


def proper_not_strong():
    return make_fixture(FixtureSpec("proper_not_strong", {"dims": (2, 2)}))


def generic_family(dims, seed=0):
    rng = np.random.default_rng(seed)
    return CoupledFamily.from_blocks(
        [[rng.standard_normal((ni, nj)) for nj in dims] for ni in dims]
    )


def test_strength_ordering_and_labels():
    assert (Strength.NOT_REDUCING < Strength.TRIVIAL < Strength.REDUCIBLE
            < Strength.PROPERLY_REDUCIBLE < Strength.STRONGLY_REDUCIBLE)
    assert Strength.NOT_REDUCING.label == "not-reducing"
    assert Strength.TRIVIAL.label == "trivial"
    assert Strength.REDUCIBLE.label == "reducible"
    assert Strength.PROPERLY_REDUCIBLE.label == "properly-reducible"
    assert Strength.STRONGLY_REDUCIBLE.label == "strongly-reducible"


# --- verify_reducing ---------------------------------------------------------


def test_zero_and_full_families_are_trivial():
    fam = generic_family((2, 3))
    assert verify_reducing(fam, SubspaceFamily.zero((2, 3))) == Strength.TRIVIAL
    assert verify_reducing(fam, SubspaceFamily.full((2, 3))) == Strength.TRIVIAL


def test_strict_everywhere_grades_strongly():
    fam = CoupledFamily.from_blocks([[jordan_nilpotent(2, exact=False)]])
    sub = SubspaceFamily.from_map((2,), {0: E1})
    assert verify_reducing(fam, sub) == Strength.STRONGLY_REDUCIBLE


def test_strict_somewhere_grades_properly():
    fam = proper_not_strong()
    sub = closure_from_seed(fam, {0: E1})
    assert sub.dims_profile() == (1, 2)
    assert verify_reducing(fam, sub) == Strength.PROPERLY_REDUCIBLE


def test_zero_full_mix_grades_reducible():
    a, _ = figure1_pair()
    sub = SubspaceFamily.from_map((1, 1, 1), {2: np.eye(1)})
    assert verify_reducing(a.to_float(), sub) == Strength.REDUCIBLE


def test_non_invariant_subspace_is_not_reducing():
    fam = CoupledFamily.from_blocks([[jordan_nilpotent(2, exact=False)]])
    sub = SubspaceFamily.from_map((2,), {0: E2})  # N e2 = e1 leaves span{e2}
    assert verify_reducing(fam, sub) == Strength.NOT_REDUCING


def test_verify_rejects_mismatched_subspaces():
    fam = generic_family((2, 2))
    with pytest.raises(PreconditionError):
        verify_reducing(fam, SubspaceFamily.zero((2, 2, 2)))
    with pytest.raises(PreconditionError):
        verify_reducing(fam, SubspaceFamily.zero((2, 3)))


def test_containment_table_lists_every_pair():
    fam = proper_not_strong().to_float()
    sub = closure_from_seed(fam, {0: E1})
    rows = containment_table(fam, sub)
    assert len(rows) == 4
    assert all(set(r) == {"block", "contained", "residual"} for r in rows)
    assert all(r["contained"] for r in rows)
    assert max(r["residual"] for r in rows) <= 1e-9


# --- closures ----------------------------------------------------------------


def test_closure_profiles_on_layered_fixture():
    fam = proper_not_strong()
    assert closure_from_seed(fam, {0: E1}).dims_profile() == (1, 2)
    assert closure_from_seed(fam, {0: E2}).dims_profile() == (2, 2)
    assert closure_from_seed(fam, {1: E1}).dims_profile() == (0, 1)


def test_closure_accepts_float_seed_on_exact_family():
    fam = proper_not_strong()
    assert fam.exact
    c = closure_from_seed(fam, {0: np.array([[1.0], [0.0]])})
    assert c.exact
    assert c.dims_profile() == (1, 2)


def test_closure_accepts_exact_seed_on_float_family():
    fam = proper_not_strong().to_float()
    c = closure_from_seed(fam, {0: exact_matrix([[1], [0]])})
    assert not c.exact
    assert c.dims_profile() == (1, 2)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), space=st.integers(0, 2))
def test_closure_is_always_invariant(seed, space):
    fam = random_pair("planted_reducible", dims=(2, 3, 2), seed=seed).a
    rng = np.random.default_rng(seed ^ 0x5EED)
    v = rng.standard_normal((fam.dims[space], 1)) + 1j * rng.standard_normal(
        (fam.dims[space], 1)
    )
    c = closure_from_seed(fam, {space: v})
    assert verify_reducing(fam, c) != Strength.NOT_REDUCING


def test_closure_contains_its_seed():
    fam = generic_family((3, 2), seed=5)
    v = np.array([[1.0], [2.0], [3.0]])
    c = closure_from_seed(fam, {0: v})
    q = orthonormal_columns(c.bases[0], DEFAULT_TOL)
    u = v / np.linalg.norm(v)
    assert max_abs(u - q @ (conj_t(q) @ u)) <= 1e-9


# --- algebra-dimension certificates -------------------------------------------


def test_single_nilpotent_block_is_not_irreducible():
    fam = CoupledFamily.from_blocks([[jordan_nilpotent(2, exact=False)]])
    cert = coupled_irreducible_burnside(fam)
    assert not cert.irreducible
    assert (cert.algebra_dim, cert.full_dim) == (2, 4)


def test_generic_dense_family_is_irreducible():
    cert = coupled_irreducible_burnside(generic_family((2, 2)))
    assert cert.irreducible
    assert (cert.algebra_dim, cert.full_dim) == (16, 16)


def test_layered_fixtures_have_deficient_algebras():
    cert = coupled_irreducible_burnside(proper_not_strong().to_float())
    assert (cert.irreducible, cert.algebra_dim, cert.full_dim) == (False, 8, 16)
    a3 = make_fixture(FixtureSpec("red_not_proper", {"dims": (2, 2, 2, 2)}))
    cert = coupled_irreducible_burnside(a3.to_float())
    assert (cert.irreducible, cert.algebra_dim, cert.full_dim) == (False, 48, 64)


def test_burnside_budget_is_enforced():
    with pytest.raises(BudgetExceededError):
        coupled_irreducible_burnside(generic_family((3, 3)), budget=3)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_planted_families_never_certify_irreducible(seed):
    fam = random_pair("planted_reducible", dims=(2, 2), seed=seed).a
    assert not coupled_irreducible_burnside(fam).irreducible


# --- witness search -----------------------------------------------------------


def test_search_finds_layered_witness_at_target():
    fam = proper_not_strong().to_float()
    w = search_witness(fam, target=Strength.PROPERLY_REDUCIBLE)
    assert w is not None
    assert verify_reducing(fam, w) >= Strength.PROPERLY_REDUCIBLE


def test_search_returns_none_on_generic_family():
    assert search_witness(generic_family((2, 2)), budget=60) is None


@pytest.mark.parametrize("strength,want", [
    ("reducible", Strength.REDUCIBLE),
    ("properly-reducible", Strength.PROPERLY_REDUCIBLE),
    ("strongly-reducible", Strength.STRONGLY_REDUCIBLE),
])
def test_search_recovers_planted_structure(strength, want):
    for seed in range(6):
        pr = random_pair("planted_reducible", dims=(3, 3), seed=seed, strength=strength)
        assert verify_reducing(pr.a, pr.planted_witness) >= want
        w = search_witness(pr.a, budget=80)
        assert w is not None
        assert verify_reducing(pr.a, w) >= Strength.REDUCIBLE


def test_search_respects_budget():
    fam = generic_family((2, 2), seed=1)
    assert search_witness(fam, budget=1) is None


# --- chain classification ------------------------------------------------------


def test_chain_on_single_nilpotent_block():
    fam = CoupledFamily.from_blocks([[jordan_nilpotent(2)]])
    v = chain_classify(fam)
    assert v.strength == Strength.STRONGLY_REDUCIBLE
    assert (v.reducible, v.properly, v.strongly) == (True, True, True)
    assert v.method == "chain-exhaustive"
    assert verify_reducing(fam, v.witness) == v.strength


def test_chain_on_layered_fixture():
    v = chain_classify(proper_not_strong())
    assert v.strength == Strength.PROPERLY_REDUCIBLE
    assert (v.reducible, v.properly, v.strongly) == (True, True, False)
    assert verify_reducing(proper_not_strong(), v.witness) == v.strength


def test_chain_separates_reducible_from_properly():
    a3 = make_fixture(FixtureSpec("red_not_proper", {"dims": (2, 2, 2, 2)}))
    v = chain_classify(a3)
    assert v.strength == Strength.REDUCIBLE
    assert (v.reducible, v.properly, v.strongly) == (True, False, False)
    assert v.detail["lattice_sizes"] == [3, 3, 3, 3]
    assert v.detail["combinations"] == 81


def test_chain_on_coupled_nilpotent_pair():
    a, b = example_51()
    for fam in (a, b):
        v = chain_classify(fam)
        assert v.strength == Strength.PROPERLY_REDUCIBLE
        assert (v.reducible, v.properly, v.strongly) == (True, True, False)


def test_chain_restricts_to_real_field_for_rotation_blocks():
    rot = make_fixture(FixtureSpec("rotation_family", {}))
    v = chain_classify(rot)
    assert v.strength == Strength.REDUCIBLE
    assert (v.reducible, v.properly, v.strongly) == (True, False, False)
    assert v.detail == {"combinations": 4, "lattice_sizes": [2, 2], "field": "real"}


def test_chain_rejects_generic_diagonal_blocks():
    with pytest.raises(PreconditionError):
        chain_classify(generic_family((2, 2)))


def test_chain_budget_is_enforced():
    fam = make_fixture(FixtureSpec("red_not_proper", {"dims": (2, 2, 2, 2)}))
    with pytest.raises(BudgetExceededError):
        chain_classify(fam, budget=10)


def test_verdict_json_round_trip_keys():
    v = chain_classify(proper_not_strong())
    j = v.to_json_dict()
    assert j["strength"] == "properly-reducible"
    assert j["properly_reducible"] is True and j["strongly_reducible"] is False
    assert set(j) == {"strength", "witness", "reducible", "properly_reducible",
                      "strongly_reducible", "method", "detail"}


# --- block forms ----------------------------------------------------------------


def test_block_form_zeroes_lower_left_region():
    fam = proper_not_strong().to_float()
    sub = closure_from_seed(fam, {0: E1})
    res = block_form_transform(fam, sub)
    assert res.sub_dims == (1, 2)
    assert not res.full_form
    assert res.zero_region_residual <= 1e-12
    for i in range(2):
        for j in range(2):
            b = res.transformed.block(i, j)
            d_i, d_j = res.sub_dims[i], res.sub_dims[j]
            assert max_abs(b[d_i:, :d_j]) <= 1e-12 if b[d_i:, :d_j].size else True


def test_block_form_transform_is_a_similarity():
    fam = proper_not_strong().to_float()
    sub = closure_from_seed(fam, {0: E1})
    res = block_form_transform(fam, sub)
    s = res.witness.assemble()
    want = np.linalg.solve(s, fam.assemble() @ s)
    assert max_abs(res.transformed.assemble() - want) <= 1e-9


def test_full_unitary_block_form_on_balanced_family():
    pr = random_pair("planted_reducible", dims=(3, 3), seed=11, normal=True)
    res = block_form_transform(pr.a, pr.planted_witness, unitary=True, full=True)
    assert res.full_form
    assert res.witness.is_unitary()
    assert res.zero_region_residual <= 1e-10


def test_block_form_rejects_non_reducing_subspace():
    fam = CoupledFamily.from_blocks([[jordan_nilpotent(2, exact=False)]])
    with pytest.raises(PreconditionError):
        block_form_transform(fam, SubspaceFamily.from_map((2,), {0: E2}))


def test_unitary_full_form_rejects_explicit_complements():
    fam = proper_not_strong().to_float()
    sub = closure_from_seed(fam, {0: E1})
    with pytest.raises(PreconditionError):
        block_form_transform(fam, sub, unitary=True, full=True,
                             complements=complement_family(sub))


def test_complement_family_dimensions_and_orthogonality():
    fam = proper_not_strong().to_float()
    sub = closure_from_seed(fam, {0: E1})
    comp = complement_family(sub)
    for b, c in zip(sub.bases, comp.bases):
        assert b.shape[1] + c.shape[1] == b.shape[0]
        if b.shape[1] and c.shape[1]:
            q = orthonormal_columns(b, DEFAULT_TOL)
            assert max_abs(conj_t(q) @ c) <= 1e-12
