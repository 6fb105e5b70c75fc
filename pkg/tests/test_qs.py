import random

import pytest

from conftest import KINDS, generated_instance, ring_of
from oreqs.idemgen import GenSpec, generate_idempotent
from oreqs.matrix import ConjugationState, OreMatrix, StepLimitExceeded, Transvection, mat_mul, replay
from oreqs.qs import (
    InvariantError,
    NotIdempotentError,
    clear_col_entries,
    clear_row_entries,
    diagonalize_idempotent,
    entry_relations,
    extract_basis,
    final_permutation,
    order_reduction1,
    order_reduction2,
    step_case_dispatch,
    verify_result,
)
from oreqs.textio import parse_matrix

DDT = ring_of("ddt")
CONJ = ring_of("conj")


def M(text, ring):
    lines = [r.strip() for r in text.strip().splitlines()]
    return parse_matrix(f"matrix {len(lines)} x {len(lines[0].split(';'))}\n" + "\n".join(lines), ring)


def rank_one(col, row, ring):
    """``col * row``; idempotent whenever ``row * col = 1``."""
    return OreMatrix(ring, [[c * r for r in row] for c in col])


# -- whole-algorithm examples -----------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 4])
def test_zero_and_identity(n):
    res = diagonalize_idempotent(OreMatrix.zeros(CONJ, n))
    assert res.r == 0 and res.basis == [] and res.U == OreMatrix.identity(CONJ, n)
    res = diagonalize_idempotent(OreMatrix.identity(CONJ, n))
    assert res.r == n and res.U == OreMatrix.identity(CONJ, n)
    assert res.basis == [OreMatrix.identity(CONJ, n).row(i) for i in range(n)]


@pytest.mark.parametrize("kind", ("commutative",) + KINDS)
def test_two_by_two_rank_one(kind):
    ring = ring_of(kind)
    F = M("0 ; x\n0 ; 1", ring)
    res = diagonalize_idempotent(F)
    assert res.r == 1 and res.D == OreMatrix.diagonal(ring, [0, 1])
    (b,) = res.basis
    B = OreMatrix(ring, [list(b)])
    assert mat_mul(B, F) == B
    # both rows of F are left multiples of b
    C = OreMatrix(ring, [[row[-1]] for row in res.Uinv.rows])
    assert mat_mul(C, B) == F
    assert verify_result(F, res).ok


def test_not_idempotent():
    F = M("1 ; 1\n0 ; 1", CONJ)
    with pytest.raises(NotIdempotentError) as err:
        diagonalize_idempotent(F)
    assert (err.value.i, err.value.j) == (0, 1)
    assert "[1,2]" in str(err.value)


def test_input_errors():
    with pytest.raises(ValueError):
        diagonalize_idempotent(OreMatrix.zeros(CONJ, 2, 3))
    with pytest.raises(TypeError):
        diagonalize_idempotent(OreMatrix.zeros(CONJ, 2), DDT)


def test_input_is_not_modified(fixtures):
    F = fixtures["ex33"].matrix
    before = F.copy()
    diagonalize_idempotent(F)
    assert F == before


# -- case dispatch ----------------------------------------------------------


def test_dispatch_cases():
    st = ConjugationState(OreMatrix.diagonal(DDT, [0, 1, 1]))
    assert step_case_dispatch(st, 0).kind == "shrink"
    assert step_case_dispatch(st, 2).kind == "base"
    st = ConjugationState(M("0 ; x\n0 ; 1", DDT))
    action = step_case_dispatch(st, 0)
    assert action.kind == "make-pivot"
    assert action.transvection == Transvection(1, 0, -DDT.one)
    st.conjugate_transvection(action.transvection)
    assert st.F.rows[0][0] == DDT.x
    st = ConjugationState(M("0 ; 0\nx ; 1", DDT))
    action = step_case_dispatch(st, 0)
    assert action.transvection == Transvection(0, 1, -DDT.one)
    st = ConjugationState(M("5 ; x\n0 ; 1", DDT))
    assert step_case_dispatch(st, 0).kind == "reduction1"
    st = ConjugationState(M("x ; 1\n0 ; 1", DDT))
    assert step_case_dispatch(st, 0).kind == "reduction2"


# -- scalar pivot -----------------------------------------------------------


def test_order_reduction1_example():
    F = M("1 ; 0\nx ; 0", DDT)
    st = order_reduction1(ConjugationState(F), 0)
    assert st.F == OreMatrix.diagonal(DDT, [1, 0])
    _, block, block_inv = st.trace[-1].operands
    assert block == M("1 ; 0\n-x ; 1", DDT)
    assert mat_mul(block, block_inv) == OreMatrix.identity(DDT, 2)


def test_order_reduction1_needs_scalar_pivot():
    with pytest.raises(InvariantError):
        order_reduction1(ConjugationState(M("x ; 0\n0 ; 0", DDT)), 0)


@pytest.mark.parametrize("kind", KINDS)
def test_order_reduction1_leaves_idempotent_remainder(kind):
    ring = ring_of(kind)
    for seed in range(5):
        F, _ = generate_idempotent(GenSpec(3, 2, 2, 1, seed=seed), ring)
        st = ConjugationState(F)
        if st.F.rows[0][0].deg != 0:
            continue
        order_reduction1(st, 0)
        assert st.check_invariants(F) == []


# -- polynomial pivot -------------------------------------------------------


def test_order_reduction2_row_side_step():
    x = DDT.x
    # rows (x, x - x^2) and (1, 1 - x) : column (x, 1) times row (1, 1 - x)
    F = rank_one([x, DDT.one], [DDT.one, 1 - x], DDT)
    assert F == M("x ; x - x^2\n1 ; 1 - x", DDT)
    st = ConjugationState(F)
    assert order_reduction2(st, 0) == 1
    first = next(s for s in st.trace if s.kind == "transvection")
    assert first.annotation.startswith("T step: n=1, p=0")
    assert st.F.rows[0][0] == DDT.one and st.check_invariants(F) == []


def test_order_reduction2_column_side_step():
    x = DDT.x
    # transpose-like shape: f12 has low degree, f21 high
    F = rank_one([DDT.one, 1 - x], [x, DDT.one], DDT)
    st = ConjugationState(F)
    order_reduction2(st, 0)
    assert any(s.annotation.startswith("L step") for s in st.trace)
    assert st.check_invariants(F) == []


def test_zero_pivot_endgame():
    # pivot 0 with g12 != 0 forces g22 = 1 and a swap
    F = M("0 ; x\n0 ; 1", DDT)
    st = ConjugationState(F)
    assert order_reduction2(st, 0) == 1
    assert any(s.kind == "permutation" for s in st.trace)
    assert st.F == OreMatrix.diagonal(DDT, [1, 0])


# -- row and column clearing ------------------------------------------------


def test_clear_row_keeps_min_degree_entry():
    x = DDT.x
    F = rank_one([DDT.one, DDT.zero, DDT.zero], [DDT.one, x * x, x], DDT)
    st = ConjugationState(F)
    assert clear_row_entries(st, 0)
    assert st.F.row(0) == (DDT.one, x, DDT.zero)
    assert replay(F, st.trace)[2] == st.F


def test_clear_row_already_clear():
    F = M("1 ; x ; 0\n0 ; 0 ; 0\n0 ; 0 ; 0", DDT)
    st = ConjugationState(F)
    assert clear_row_entries(st, 0) and st.trace == []
    st = ConjugationState(OreMatrix.diagonal(DDT, [1, 0]))
    assert not clear_row_entries(st, 0)


def test_clear_col_entries():
    x = DDT.x
    F = rank_one([DDT.one, x * x, x], [DDT.one, DDT.zero, DDT.zero], DDT)
    st = ConjugationState(F)
    assert clear_col_entries(st, 0)
    assert st.F.column(0) == (DDT.one, x, DDT.zero)


def test_clear_row_never_touches_pivot():
    ring = CONJ
    checked = 0
    for seed in range(100):
        s, _ = generated_instance(seed)
        s = max(s, 3)
        F, _ = generate_idempotent(GenSpec(s, random.Random(seed).randint(1, s - 1), 3, 2, seed=seed), ring)
        st = ConjugationState(F)
        pivot = st.F.rows[0][0]
        if clear_row_entries(st, 0):
            assert sum(1 for e in st.F.row(0)[1:] if e) == 1 and st.F.rows[0][1]
        assert st.F.rows[0][0] == pivot and st.check_invariants(F) == []
        checked += 1
    assert checked == 100


# -- final permutation and basis --------------------------------------------


def test_final_permutation():
    st = final_permutation(ConjugationState(OreMatrix.diagonal(DDT, [1, 0, 1])))
    assert st.F == OreMatrix.diagonal(DDT, [0, 1, 1])
    assert all(s.kind == "final-permutation" for s in st.trace)
    st = final_permutation(ConjugationState(OreMatrix.diagonal(DDT, [0, 0])))
    assert st.trace == []
    with pytest.raises(InvariantError):
        final_permutation(ConjugationState(OreMatrix.diagonal(DDT, [1, 2])))


def test_final_permutation_of_fixture_diagonal():
    st = final_permutation(ConjugationState(OreMatrix.diagonal(CONJ, [1, 1, 1, 0])))
    assert st.F == OreMatrix.diagonal(CONJ, [0, 1, 1, 1])


def test_extract_basis():
    I = OreMatrix.identity(DDT, 2)
    assert extract_basis(I, 2) == [I.row(0), I.row(1)]
    assert extract_basis(I, 0) == []


# -- verification -----------------------------------------------------------


def test_verify_detects_tampering(fixtures):
    F = fixtures["ex33"].matrix
    res = diagonalize_idempotent(F)
    assert verify_result(F, res, replay_trace=True).ok
    res.U.rows[0], res.U.rows[1] = res.U.rows[1], res.U.rows[0]
    report = verify_result(F, res)
    assert not report.ok
    assert "D = U*F*Uinv" in report.failed()


def test_verify_detects_wrong_rank(fixtures):
    F = fixtures["ex33"].matrix
    res = diagonalize_idempotent(F)
    res.r = 1
    failed = verify_result(F, res).failed()
    assert "D = diag(0, I_r)" in failed and "basis = last r rows of U" in failed


@pytest.mark.parametrize("kind", KINDS)
def test_debug_mode_and_replay(kind):
    ring = ring_of(kind)
    for seed in range(4):
        F, _ = generate_idempotent(GenSpec(3, 1 + seed % 3, 3, 2, seed=seed), ring)
        res = diagonalize_idempotent(F, debug=True, snapshots=True)
        assert verify_result(F, res, replay_trace=True).ok
        assert all(s.snapshot is not None for s in res.trace)


def test_entry_relations(fixtures):
    for problem in fixtures.values():
        assert entry_relations(problem.matrix) == (True, True)
    # f11^2 + f12 f21 = 1 holds, f11 f12 + f12 f22 = 2 != 1 does not
    assert entry_relations(M("1 ; 1\n0 ; 1", CONJ)) == (True, False)


def test_step_limit_guard():
    st = ConjugationState(OreMatrix.identity(DDT, 2))
    st.step_limit = 1
    st.mark("recurse")
    with pytest.raises(StepLimitExceeded):
        st.mark("recurse")
