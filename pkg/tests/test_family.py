import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledfam.family import (
    CoupledFamily,
    InvalidFamilyError,
    SimilarityWitness,
    apply_coupled_similarity,
    block_offsets,
    coupled_normality_violations,
    is_coupled_normal,
    split_blocks,
)
from coupledfam.linalg import conj_t, exact_matrix, exact_eye, max_abs, to_float

N2 = np.array([[0.0, 1.0], [0.0, 0.0]])


def random_family(dims, seed):
    rng = np.random.default_rng(seed)
    blocks = [
        [
            rng.standard_normal((ni, nj)) + 1j * rng.standard_normal((ni, nj))
            for nj in dims
        ]
        for ni in dims
    ]
    return CoupledFamily.from_blocks(blocks)


dims_strategy = st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=4)


def test_from_blocks_reads_dims_off_diagonal():
    fam = random_family((2, 3), seed=0)
    assert fam.dims == (2, 3)
    assert fam.K == 2
    assert fam.total_dim == 5
    assert fam.block(0, 1).shape == (2, 3)
    assert fam.block(1, 0).shape == (3, 2)


def test_from_blocks_rejects_ragged_grid():
    with pytest.raises(InvalidFamilyError):
        CoupledFamily.from_blocks([[np.eye(2), np.eye(2)], [np.eye(2)]])


def test_validate_reports_offending_position():
    blocks = [[np.eye(2), np.zeros((2, 3))], [np.zeros((2, 2)), np.eye(2)]]
    fam = CoupledFamily((2, 2), tuple(tuple(np.asarray(b, dtype=complex) for b in r) for r in blocks))
    with pytest.raises(InvalidFamilyError) as exc:
        fam.validate()
    assert exc.value.position == (0, 1)


def test_validate_rejects_empty_and_nonpositive_dims():
    with pytest.raises(InvalidFamilyError):
        CoupledFamily((), ()).validate()
    with pytest.raises(InvalidFamilyError):
        CoupledFamily((0,), ((np.zeros((0, 0), dtype=complex),),)).validate()


def test_validate_rejects_mixed_backends():
    fam = CoupledFamily(
        (1, 1),
        (
            (exact_eye(1), exact_matrix([[0]])),
            (np.zeros((1, 1), dtype=complex), np.eye(1, dtype=complex)),
        ),
    )
    with pytest.raises(InvalidFamilyError):
        fam.validate()


def test_from_block_map_fills_zeros():
    fam = CoupledFamily.from_block_map((2, 3), {(0, 1): np.ones((2, 3))})
    assert max_abs(fam.block(1, 0)) == 0.0
    assert max_abs(fam.block(0, 0)) == 0.0
    assert fam.block(1, 1).shape == (3, 3)
    fam.validate()


def test_from_block_map_exact_backend():
    fam = CoupledFamily.from_block_map((1, 2), {(0, 0): exact_matrix([[3]])}, exact=True)
    assert fam.exact
    fam.validate()


@settings(max_examples=40, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**31 - 1))
def test_assemble_split_round_trip(dims, seed):
    dims = tuple(dims)
    fam = random_family(dims, seed)
    back = split_blocks(fam.assemble(), dims)
    assert back.dims == fam.dims
    for i in range(fam.K):
        for j in range(fam.K):
            assert max_abs(back.block(i, j) - fam.block(i, j)) == 0.0


def test_block_offsets():
    assert block_offsets((2, 3, 1)) == [0, 2, 5, 6]


def test_split_blocks_rejects_wrong_shape():
    with pytest.raises(ValueError):
        split_blocks(np.eye(4), (2, 3))


def test_assemble_places_block_at_offsets():
    fam = CoupledFamily.from_block_map((2, 1), {(1, 0): np.array([[5.0, 6.0]])})
    m = fam.assemble()
    assert m[2, 0] == 5.0 and m[2, 1] == 6.0
    assert max_abs(m) == 6.0


def test_conj_transpose_matches_assembled_adjoint():
    fam = random_family((2, 3, 1), seed=7)
    assert max_abs(fam.conj_transpose().assemble() - conj_t(fam.assemble())) == 0.0


def test_to_float_is_identity_on_float_families():
    fam = random_family((2, 2), seed=1)
    assert fam.to_float() is fam


def test_exact_family_to_float_preserves_values():
    fam = CoupledFamily.from_block_map(
        (1, 1), {(0, 1): exact_matrix([[7]]), (1, 0): exact_matrix([[2]])}, exact=True
    )
    f = fam.to_float()
    assert not f.exact
    assert f.block(0, 1)[0, 0] == 7.0 + 0.0j


# --- block-diagonal similarity -------------------------------------------


def random_witness(dims, seed):
    rng = np.random.default_rng(seed)
    mats = []
    for n in dims:
        while True:
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            if abs(np.linalg.det(m)) > 1e-3:
                mats.append(m)
                break
    return SimilarityWitness(tuple(mats))


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**31 - 1))
def test_similarity_matches_assembled_conjugation(dims, seed):
    dims = tuple(dims)
    fam = random_family(dims, seed)
    wit = random_witness(dims, seed + 1)
    got = apply_coupled_similarity(fam, wit).assemble()
    s = wit.assemble()
    want = np.linalg.solve(s, fam.assemble() @ s)
    assert max_abs(got - want) < 1e-8


def test_identity_witness_is_a_no_op():
    fam = random_family((2, 3), seed=3)
    wit = SimilarityWitness.identity((2, 3))
    assert apply_coupled_similarity(fam, wit).allclose(fam)


def test_exact_similarity_stays_exact():
    fam = CoupledFamily.from_block_map(
        (1, 1), {(0, 1): exact_matrix([[1]]), (1, 0): exact_matrix([[1]])}, exact=True
    )
    wit = SimilarityWitness((exact_matrix([[2]]), exact_matrix([[1]])))
    out = apply_coupled_similarity(fam, wit)
    assert out.exact
    # T_0^{-1} A_01 T_1 = (1/2) * 1 * 1
    assert complex(out.block(0, 1)[0, 0]) == 0.5 + 0.0j


def test_similarity_rejects_singular_witness():
    fam = random_family((2, 2), seed=4)
    wit = SimilarityWitness((np.zeros((2, 2), dtype=complex), np.eye(2, dtype=complex)))
    with pytest.raises(InvalidFamilyError) as exc:
        apply_coupled_similarity(fam, wit)
    assert exc.value.position == (0, 0)


def test_similarity_rejects_backend_mismatch():
    fam = random_family((1, 1), seed=5)
    wit = SimilarityWitness((exact_eye(1), exact_eye(1)))
    with pytest.raises(InvalidFamilyError):
        apply_coupled_similarity(fam, wit)


def test_similarity_rejects_wrong_dims():
    fam = random_family((2, 2), seed=6)
    with pytest.raises(InvalidFamilyError):
        apply_coupled_similarity(fam, random_witness((2, 3), seed=0))
    with pytest.raises(InvalidFamilyError):
        apply_coupled_similarity(fam, random_witness((2,), seed=0))


def test_witness_is_unitary():
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))
    assert SimilarityWitness((q.astype(complex),)).is_unitary()
    assert not SimilarityWitness((2.0 * q.astype(complex),)).is_unitary()


# --- coupled normality -----------------------------------------------------


def test_hermitian_assembly_is_coupled_normal():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    fam = split_blocks(m + conj_t(m), (2, 3))
    ok, bad = is_coupled_normal(fam)
    assert ok and bad == []


def test_nilpotent_diagonal_block_breaks_normality():
    fam = CoupledFamily.from_block_map((2, 2), {(0, 0): N2, (1, 1): np.eye(2)})
    ok, bad = is_coupled_normal(fam)
    assert not ok
    assert (0, 0) in bad


def test_normality_violations_name_the_unbalanced_pair():
    # block (0,1)* (0,1) has rank 1 but (1,0) is zero
    fam = CoupledFamily.from_block_map((2, 2), {(0, 1): np.eye(2)})
    bad = coupled_normality_violations(fam)
    assert (0, 1) in bad and (1, 0) in bad


def test_exact_normality_check_is_exact():
    fam = CoupledFamily.from_block_map(
        (1, 1), {(0, 1): exact_matrix([[3]]), (1, 0): exact_matrix([[3]])}, exact=True
    )
    ok, bad = is_coupled_normal(fam)
    assert ok and bad == []


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_unitary_similarity_preserves_coupled_normality(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    fam = split_blocks(m + conj_t(m), (2, 2))
    qs = []
    for n in (2, 2):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        qs.append(q)
    out = apply_coupled_similarity(fam, SimilarityWitness(tuple(qs)))
    ok, _ = is_coupled_normal(out)
    assert ok


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_coupled_normal_blocks_have_balanced_ranks(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    fam = split_blocks(m + conj_t(m), (1, 2, 3))
    for i in range(fam.K):
        for j in range(fam.K):
            ri = np.linalg.matrix_rank(to_float(fam.block(i, j)))
            rj = np.linalg.matrix_rank(to_float(fam.block(j, i)))
            assert ri == rj
