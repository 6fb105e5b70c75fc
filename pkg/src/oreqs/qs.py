"""Diagonalization of idempotent matrices over ``K[x; sigma, delta]``.

Given an idempotent ``F`` of size ``s``, :func:`diagonalize_idempotent`
builds an invertible ``U`` (together with ``U^-1``) such that
``U F U^-1 = diag(0, ..., 0, 1, ..., 1)``.  The number ``r`` of ones is the
rank of the row module of ``F`` and the last ``r`` rows of ``U`` form a free
basis of it.

The work proceeds block by block down the diagonal.  At block ``k`` the
leading entry (the *pivot*) is driven to 0 or 1 with the rest of row ``k``
and column ``k`` cleared, then the next block is processed:

* zero border: nothing to do, the diagonal entry is 0;
* pivot zero, border not: a transvection ``I - E_jk`` (or ``I - E_kj``)
  moves a nonzero border entry onto the pivot;
* pivot a nonzero scalar: the closed-form block ``U`` with
  first row ``(1, f11^-1 f12, ...)`` splits off ``diag(1, F1)``;
* pivot of positive degree: row clearing and one-sided transvections lower
  the pivot degree until it is a scalar or zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .matrix import (
    ConjugationState,
    OreMatrix,
    Permutation,
    StepLimitExceeded,
    TraceStep,
    Transvection,
    mat_mul,
    replay,
)
from .ore import OrePoly, RingSpec, left_reduce_step, right_reduce_step

__all__ = [
    "NotIdempotentError",
    "NonTerminationError",
    "InvariantError",
    "DiagResult",
    "Action",
    "diagonalize_idempotent",
    "step_case_dispatch",
    "order_reduction1",
    "order_reduction2",
    "clear_row_entries",
    "clear_col_entries",
    "final_permutation",
    "extract_basis",
    "entry_relations",
    "VerificationReport",
    "verify_result",
]

log = logging.getLogger(__name__)


class NotIdempotentError(ValueError):
    """The input matrix does not satisfy ``F^2 = F``."""

    def __init__(self, i: int, j: int, residue: OrePoly):
        self.i, self.j, self.residue = i, j, residue
        super().__init__(f"F is not idempotent: (F^2 - F)[{i + 1},{j + 1}] = {residue}")


class NonTerminationError(RuntimeError):
    """The iteration cap was hit; this indicates a bug, not a property of F."""


class InvariantError(RuntimeError):
    """An internal invariant of the algorithm failed."""


@dataclass
class DiagResult:
    U: OreMatrix
    Uinv: OreMatrix
    D: OreMatrix
    r: int
    basis: list[tuple[OrePoly, ...]]
    trace: list[TraceStep] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.r

    @property
    def ring(self) -> RingSpec:
        return self.U.ring


@dataclass(frozen=True)
class Action:
    """Next move at the current block, as chosen by :func:`step_case_dispatch`.

    ``kind`` is ``base`` (1x1 block), ``shrink`` (zero border),
    ``make-pivot`` (``transvection`` brings a border entry onto the pivot),
    ``reduction1`` (scalar pivot) or ``reduction2`` (pivot of degree >= 1).
    """

    kind: str
    transvection: Transvection | None = None


def _first_nonidempotent_entry(F: OreMatrix):
    F2 = mat_mul(F, F)
    for i in range(F.nrows):
        for j in range(F.ncols):
            if F2.rows[i][j] != F.rows[i][j]:
                return i, j, F2.rows[i][j] - F.rows[i][j]
    return None


def _border_zero(F: OreMatrix, k: int) -> bool:
    rows = F.rows
    return all(not rows[k][j] for j in range(k, F.nrows)) and all(
        not rows[i][k] for i in range(k + 1, F.nrows)
    )


def step_case_dispatch(state: ConjugationState, k: int) -> Action:
    """Decide what to do with the trailing block starting at index ``k``."""
    F, n = state.F.rows, state.n
    if k == n - 1:
        return Action("base")
    if _border_zero(state.F, k):
        return Action("shrink")
    pivot = F[k][k]
    if not pivot:
        ring = state.ring
        for j in range(k + 1, n):
            if F[k][j]:
                # I - E_jk: row_j -= row_k, col_k += col_j, so the pivot becomes f_kj
                return Action("make-pivot", Transvection(j, k, -ring.one))
        for i in range(k + 1, n):
            if F[i][k]:
                # I - E_ki: row_k -= row_i, so the pivot becomes -f_ik
                return Action("make-pivot", Transvection(k, i, -ring.one))
    if pivot.deg == 0:
        return Action("reduction1")
    return Action("reduction2")


def order_reduction1(state: ConjugationState, k: int) -> ConjugationState:
    """Split off ``diag(1, F1)`` at block ``k`` when the pivot is a nonzero scalar.

    Uses the closed-form block

        U    = [[1, a f12, ..., a f1m], [-f21 a, 1, 0, ...], ..., [-fm1 a, 0, ..., 1]]
        U^-1 = [[f11, -f12, ...], [f21, 1 - f21 a f12, -f21 a f13, ...], ...]

    with ``a = f11^-1``.  ``U^-1`` is only an inverse because ``F`` is
    idempotent, so the product is checked before it is applied.
    """
    F, n, ring = state.F.rows, state.n, state.ring
    pivot = F[k][k]
    if not pivot or pivot.deg != 0:
        raise InvariantError(f"order_reduction1 needs a nonzero scalar pivot, got {pivot}")
    m = n - k
    a = ring(1 / pivot.constant())
    row = [F[k][k + j] for j in range(m)]
    col = [F[k + i][k] for i in range(m)]
    left = [c * a for c in col]  # f_i1 * f11^-1
    right = [a * r for r in row]  # f11^-1 * f_1j
    one, zero = ring.one, ring.zero
    B = [[zero] * m for _ in range(m)]
    Binv = [[zero] * m for _ in range(m)]
    B[0][0] = one
    Binv[0][0] = pivot
    for j in range(1, m):
        B[0][j] = right[j]
        Binv[0][j] = -row[j]
    for i in range(1, m):
        B[i][0] = -left[i]
        B[i][i] = one
        Binv[i][0] = col[i]
        for j in range(1, m):
            e = -(left[i] * row[j])
            Binv[i][j] = e + one if i == j else e
    block = OreMatrix._wrap(ring, B)
    block_inv = OreMatrix._wrap(ring, Binv)
    if mat_mul(block, block_inv) != OreMatrix.identity(ring, m):
        raise InvariantError("closed-form U*U^-1 != I in order_reduction1")
    state.conjugate_block(k, block, block_inv, annotation=f"scalar pivot {pivot} at ({k + 1},{k + 1})")
    F = state.F.rows
    if F[k][k] != one or any(F[k][j] for j in range(k + 1, n)) or any(F[i][k] for i in range(k + 1, n)):
        raise InvariantError("order_reduction1 did not produce diag(1, F1)")
    return state


def clear_row_entries(state: ConjugationState, k: int) -> bool:
    """Reduce row ``k`` right of the pivot to a single nonzero entry at ``k+1``.

    Only transvections and permutations among indices ``> k`` are used, so
    the pivot never changes.  Returns ``False`` when the row was already all
    zero (nothing to keep).
    """
    F, n = state.F.rows, state.n
    while True:
        nz = [j for j in range(k + 1, n) if F[k][j]]
        if not nz:
            return False
        keep = min(nz, key=lambda j: (F[k][j].deg, j))
        others = [j for j in nz if j != keep]
        if not others:
            if keep != k + 1:
                state.conjugate_permutation(Permutation(k + 1, keep), annotation="move kept row entry")
            return True
        for j in others:
            g = F[k][keep]
            while F[k][j] and F[k][j].deg >= g.deg:
                m, _ = right_reduce_step(F[k][j], g)
                # col_j -= col_keep * m
                state.conjugate_transvection(
                    Transvection(keep, j, m), annotation=f"reduce f[{k + 1},{j + 1}]"
                )
                g = F[k][keep]


def clear_col_entries(state: ConjugationState, k: int) -> bool:
    """Column analogue of :func:`clear_row_entries`.

    The accompanying column operations add multiples of column ``i`` to other
    columns, so row ``k`` is only left untouched when it is zero beyond the
    pivot, which is how the algorithm calls it.
    """
    F, n = state.F.rows, state.n
    while True:
        nz = [i for i in range(k + 1, n) if F[i][k]]
        if not nz:
            return False
        keep = min(nz, key=lambda i: (F[i][k].deg, i))
        others = [i for i in nz if i != keep]
        if not others:
            if keep != k + 1:
                state.conjugate_permutation(Permutation(k + 1, keep), annotation="move kept column entry")
            return True
        for i in others:
            g = F[keep][k]
            while F[i][k] and F[i][k].deg >= g.deg:
                m, _ = left_reduce_step(F[i][k], g)
                # row_i -= m * row_keep
                state.conjugate_transvection(
                    Transvection(i, keep, -m), annotation=f"reduce f[{i + 1},{k + 1}]"
                )
                g = F[keep][k]


def _unit_endgame(state: ConjugationState, k: int) -> None:
    # pivot is 0 and the border is not: after clearing, f[k+1][k+1] must be 1
    F = state.F.rows
    if any(F[k][j] for j in range(k + 1, state.n)):
        clear_row_entries(state, k)
    else:
        clear_col_entries(state, k)
    if F[k + 1][k + 1] != state.ring.one:
        raise InvariantError(
            f"expected f[{k + 2},{k + 2}] = 1 after clearing, got {F[k + 1][k + 1]}"
        )
    state.conjugate_permutation(Permutation(k, k + 1), annotation="unit moves onto the pivot")
    order_reduction1(state, k)


def order_reduction2(state: ConjugationState, k: int) -> int:
    """Lower the degree of a polynomial pivot, then finish the block.

    Each round clears row ``k`` to the shape ``(f11, f12, 0, ..., 0)``.  With
    ``n = deg f11``, ``p = deg f21``, ``q = deg f12`` the relation
    ``f11^2 + f12 f21 = f11`` forces ``p <= n`` or ``q <= n``; the first case
    conjugates by ``I - a_n sigma^(n-p)(c_p^-1) x^(n-p) E_12`` (a row-side
    step), the second by ``I + sigma^-q(b_q^-1 a_n) x^(n-q) E_21`` (a
    column-side step), and either way the pivot degree drops.

    Returns the diagonal value (0 or 1) settled at position ``k``.
    """
    F = state.F.rows
    ring = state.ring
    while F[k][k] and F[k][k].deg >= 1:
        if not clear_row_entries(state, k):
            raise InvariantError(f"row {k + 1} vanished beside a pivot of positive degree")
        f11, f12, f21 = F[k][k], F[k][k + 1], F[k + 1][k]
        if not f21:
            raise InvariantError(f"f[{k + 2},{k + 1}] = 0 beside a pivot of positive degree")
        n, p, q = f11.deg, f21.deg, f12.deg
        if p <= n:
            m, _ = left_reduce_step(f11, f21)
            tv = Transvection(k, k + 1, -m)
            note = f"T step: n={n}, p={p}"
        elif q <= n:
            m, _ = right_reduce_step(f11, f12)
            tv = Transvection(k + 1, k, m)
            note = f"L step: n={n}, q={q}"
        else:
            raise InvariantError(f"neither p={p} nor q={q} is <= n={n}")
        state.conjugate_transvection(tv, annotation=note)
        if F[k][k].deg >= n:
            raise InvariantError("pivot degree did not drop")
    if F[k][k]:
        order_reduction1(state, k)
        return 1
    if _border_zero(state.F, k):
        return 0
    _unit_endgame(state, k)
    return 1


def final_permutation(state: ConjugationState) -> ConjugationState:
    """Sort a 0/1 diagonal so the zeros come first (stable adjacent swaps)."""
    F, n, ring = state.F.rows, state.n, state.ring
    diag = []
    for k in range(n):
        d = F[k][k]
        if d != ring.zero and d != ring.one:
            raise InvariantError(f"diagonal entry {d} is not 0 or 1")
        diag.append(1 if d else 0)
    for pos in range(n):
        # bubble each zero left past the ones before it
        if diag[pos] == 0:
            j = pos
            while j > 0 and diag[j - 1] == 1:
                state.conjugate_permutation(Permutation(j - 1, j), kind="final-permutation")
                diag[j - 1], diag[j] = diag[j], diag[j - 1]
                j -= 1
    return state


def extract_basis(U: OreMatrix, r: int) -> list[tuple[OrePoly, ...]]:
    """The last ``r`` rows of ``U``."""
    n = U.nrows
    return [U.row(i) for i in range(n - r, n)]


def diagonalize_idempotent(
    F: OreMatrix,
    ring: RingSpec | None = None,
    *,
    check: bool = True,
    debug: bool = False,
    snapshots: bool = False,
) -> DiagResult:
    """Conjugate an idempotent ``F`` into ``diag(0_{s-r}, I_r)``.

    Args:
        F: square idempotent matrix.
        ring: optional; must agree with ``F.ring``.
        check: test ``F^2 = F`` first and raise :class:`NotIdempotentError`.
        debug: re-check every state invariant after each block (slow).
        snapshots: store a copy of ``F`` with every trace step.
    """
    if ring is not None:
        ring._check(F.ring)
    if not F.is_square():
        raise ValueError("F must be square")
    if check:
        bad = _first_nonidempotent_entry(F)
        if bad is not None:
            raise NotIdempotentError(*bad)
    s = F.nrows
    state = ConjugationState(F, keep_snapshots=snapshots)
    state.step_limit = 50 * s * (1 + F.max_degree()) ** 2

    try:
        _run_blocks(state, F, debug)
    except StepLimitExceeded as exc:
        raise NonTerminationError(str(exc)) from exc
    D = state.F
    r = sum(1 for k in range(s) if D.rows[k][k])
    return DiagResult(
        U=state.U,
        Uinv=state.Uinv,
        D=D,
        r=r,
        basis=extract_basis(state.U, r),
        trace=state.trace,
    )


def _run_blocks(state: ConjugationState, F: OreMatrix, debug: bool) -> None:
    s = F.nrows
    I = OreMatrix.identity(F.ring, s)
    Z = OreMatrix.zeros(F.ring, s)
    if F == Z or F == I:
        state.mark("recurse", "zero matrix" if F == Z else "identity matrix")
    else:
        for k in range(s):
            action = step_case_dispatch(state, k)
            log.debug("block %d: %s", k + 1, action.kind)
            if action.kind == "base":
                d = state.F.rows[k][k]
                if d != F.ring.zero and d != F.ring.one:
                    raise InvariantError(f"1x1 idempotent block {d} is not 0 or 1")
            elif action.kind == "shrink":
                pass
            else:
                if action.kind == "make-pivot":
                    state.conjugate_transvection(action.transvection, annotation="bring a nonzero entry onto the pivot")
                    action = step_case_dispatch(state, k)
                if action.kind == "reduction1":
                    order_reduction1(state, k)
                else:
                    order_reduction2(state, k)
            if k < s - 1:
                state.mark("recurse", f"block {k + 1} done, diagonal entry {state.F.rows[k][k]}")
            if debug:
                bad = state.check_invariants(F)
                if bad:
                    raise InvariantError(f"after block {k + 1}: {', '.join(bad)}")
    final_permutation(state)


def entry_relations(F: OreMatrix) -> tuple[bool, bool]:
    """The first-row relations implied by ``F^2 = F``.

    ``f11^2 + f12 f21 + ... + f1s fs1 = f11`` and
    ``f11 f12 + f12 f22 + ... + f1s fs2 = f12``.
    """
    s = F.nrows
    rows = F.rows
    first = sum((rows[0][j] * rows[j][0] for j in range(s)), F.ring.zero) == rows[0][0]
    if s < 2:
        return first, True
    second = sum((rows[0][j] * rows[j][1] for j in range(s)), F.ring.zero) == rows[0][1]
    return first, second


@dataclass
class VerificationReport:
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, good in self.checks.items() if not good]

    def lines(self) -> list[str]:
        return [f"{'PASS' if good else 'FAIL'}  {name}" for name, good in self.checks.items()]


def _target_diagonal(ring: RingSpec, s: int, r: int) -> OreMatrix:
    return OreMatrix.diagonal(ring, [0] * (s - r) + [1] * r)


def verify_result(F: OreMatrix, result: DiagResult, replay_trace: bool = False) -> VerificationReport:
    """Re-check a result from scratch with plain matrix products."""
    ring, s = F.ring, F.nrows
    U, Uinv, r = result.U, result.Uinv, result.r
    I = OreMatrix.identity(ring, s)
    checks: dict[str, bool] = {}
    checks["0 <= r <= s"] = 0 <= r <= s
    checks["U*Uinv = I"] = mat_mul(U, Uinv) == I
    checks["Uinv*U = I"] = mat_mul(Uinv, U) == I
    D = mat_mul(mat_mul(U, F), Uinv)
    checks["D = U*F*Uinv"] = D == result.D
    checks["D = diag(0, I_r)"] = 0 <= r <= s and D == _target_diagonal(ring, s, r)
    basis_ok = len(result.basis) == r and all(
        tuple(b) == U.row(s - r + k) for k, b in enumerate(result.basis)
    )
    checks["basis = last r rows of U"] = basis_ok
    if not basis_ok:
        checks["b*F = b for each basis row"] = False
        checks["F = C*B"] = False
    elif r:
        B = OreMatrix(ring, [list(b) for b in result.basis])
        checks["b*F = b for each basis row"] = mat_mul(B, F) == B
        C = OreMatrix._wrap(ring, [list(row[s - r :]) for row in Uinv.rows])
        checks["F = C*B"] = mat_mul(C, B) == F
    else:
        checks["b*F = b for each basis row"] = True
        checks["F = C*B"] = F == OreMatrix.zeros(ring, s)
    if replay_trace:
        U2, Uinv2, D2 = replay(F, result.trace)
        checks["trace replay"] = (U2, Uinv2, D2) == (U, Uinv, result.D)
    return VerificationReport(checks)


def rank(F: OreMatrix) -> int:
    """Rank of the row module of an idempotent matrix."""
    return diagonalize_idempotent(F).r


def is_diag_shape(D: OreMatrix, r: int) -> bool:
    return D == _target_diagonal(D.ring, D.nrows, r)

