"""Dense matrices over a skew polynomial ring and the conjugation engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .ore import OrePoly, RingSpec

__all__ = [
    "OreMatrix",
    "Transvection",
    "Permutation",
    "TraceStep",
    "ConjugationState",
    "mat_mul",
    "is_idempotent",
    "submatrix",
    "embed",
    "replay",
    "StepLimitExceeded",
]


class StepLimitExceeded(RuntimeError):
    """More elementary steps were recorded than the state allows."""


class OreMatrix:
    """An ``s x t`` matrix of :class:`OrePoly` entries, all in one ring.

    Treat instances as immutable; the arithmetic returns new matrices.
    """

    __slots__ = ("ring", "rows")

    def __init__(self, ring: RingSpec, rows: Iterable[Iterable[Any]]):
        rows = [[ring(e) for e in row] for row in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix rows")
        self.ring = ring
        self.rows = rows

    @classmethod
    def _wrap(cls, ring, rows) -> OreMatrix:
        obj = object.__new__(cls)
        obj.ring = ring
        obj.rows = rows
        return obj

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> OreMatrix:
        zero, one = ring.zero, ring.one
        return cls._wrap(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ring: RingSpec, s: int, t: int | None = None) -> OreMatrix:
        t = s if t is None else t
        return cls._wrap(ring, [[ring.zero] * t for _ in range(s)])

    @classmethod
    def diagonal(cls, ring: RingSpec, diag: Sequence[Any]) -> OreMatrix:
        n = len(diag)
        m = cls.zeros(ring, n)
        for k, d in enumerate(diag):
            m.rows[k][k] = ring(d)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> OrePoly:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[OrePoly, ...]:
        return tuple(self.rows[i])

    def column(self, j: int) -> tuple[OrePoly, ...]:
        return tuple(r[j] for r in self.rows)

    def copy(self) -> OreMatrix:
        return OreMatrix._wrap(self.ring, [list(r) for r in self.rows])

    def max_degree(self) -> int:
        return max((e.deg for r in self.rows for e in r if e), default=0)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __eq__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def __add__(self, other: OreMatrix) -> OreMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return OreMatrix._wrap(
            self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: OreMatrix) -> OreMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return OreMatrix._wrap(
            self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __matmul__(self, other: OreMatrix) -> OreMatrix:
        return mat_mul(self, other)

    def __str__(self):
        from .textio import render_matrix

        return render_matrix(self)

    def __repr__(self):
        s, t = self.shape
        return f"OreMatrix({s}x{t} over {self.ring})"


def mat_mul(a: OreMatrix, b: OreMatrix) -> OreMatrix:
    """Matrix product; each dot product multiplies row entries on the left."""
    a.ring._check(b.ring)
    if a.ncols != b.nrows:
        raise ValueError(f"cannot multiply {a.nrows}x{a.ncols} by {b.nrows}x{b.ncols}")
    zero = a.ring.zero
    cols = list(zip(*b.rows))
    out = []
    for r in a.rows:
        new_row = []
        for c in cols:
            acc = zero
            for x, y in zip(r, c):
                if x and y:
                    acc = acc + x * y
            new_row.append(acc)
        out.append(new_row)
    return OreMatrix._wrap(a.ring, out)


def is_idempotent(F: OreMatrix) -> bool:
    if not F.is_square():
        raise ValueError("idempotency needs a square matrix")
    return mat_mul(F, F) == F


def submatrix(F: OreMatrix, drop_first_k: int) -> OreMatrix:
    """Lower-right block obtained by dropping the first ``k`` rows and columns."""
    s, t = F.shape
    if not 0 <= drop_first_k < min(s, t):
        raise ValueError(f"cannot drop {drop_first_k} rows/cols from a {s}x{t} matrix")
    k = drop_first_k
    return OreMatrix._wrap(F.ring, [list(r[k:]) for r in F.rows[k:]])


def embed(small: OreMatrix, into_size: int, offset: int) -> OreMatrix:
    """Block diagonal ``diag(I_offset, small)`` of size ``into_size``."""
    n = small.nrows
    if not small.is_square() or offset + n != into_size:
        raise ValueError(f"cannot embed a {small.shape} block at offset {offset} into size {into_size}")
    big = OreMatrix.identity(small.ring, into_size)
    for i in range(n):
        for j in range(n):
            big.rows[offset + i][offset + j] = small.rows[i][j]
    return big


# ---------------------------------------------------------------------------
# elementary operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transvection:
    """``I + m*E_ij`` with ``i != j``; its inverse is ``I - m*E_ij``."""

    i: int
    j: int
    m: OrePoly

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("a transvection needs i != j")

    def matrix(self, n: int) -> OreMatrix:
        T = OreMatrix.identity(self.m.ring, n)
        T.rows[self.i][self.j] = self.m
        return T

    def inverse(self) -> Transvection:
        return Transvection(self.i, self.j, -self.m)

    def text(self) -> str:
        return f"I + ({self.m})*E[{self.i + 1},{self.j + 1}]"


@dataclass(frozen=True)
class Permutation:
    """The transposition matrix ``P_ij``, its own inverse."""

    i: int
    j: int

    def matrix(self, ring: RingSpec, n: int) -> OreMatrix:
        P = OreMatrix.identity(ring, n)
        one, zero = ring.one, ring.zero
        P.rows[self.i][self.i] = zero
        P.rows[self.j][self.j] = zero
        P.rows[self.i][self.j] = one
        P.rows[self.j][self.i] = one
        return P

    def text(self) -> str:
        return f"P[{self.i + 1},{self.j + 1}]"


@dataclass
class TraceStep:
    """One recorded step of a diagonalization.

    ``kind`` is one of ``transvection``, ``permutation``, ``b1-block``,
    ``recurse`` and ``final-permutation``.  ``operands`` holds what replay
    needs: a :class:`Transvection`, a :class:`Permutation`, or for a
    ``b1-block`` the tuple ``(offset, block, block_inverse)``.
    """

    kind: str
    operands: Any = None
    annotation: str = ""
    snapshot: OreMatrix | None = None

    def text(self) -> str:
        if self.kind == "transvection":
            body = f"T = {self.operands.text()}"
        elif self.kind in ("permutation", "final-permutation"):
            body = self.operands.text()
        elif self.kind == "b1-block":
            offset, block, _ = self.operands
            body = f"block U at offset {offset + 1}, size {block.nrows}"
        else:
            body = ""
        parts = [self.kind]
        if body:
            parts.append(body)
        if self.annotation:
            parts.append(f"[{self.annotation}]")
        return "  ".join(parts)


class ConjugationState:
    """Working state ``(F, U, Uinv, trace)`` with ``F = U * F0 * Uinv``.

    Every update conjugates ``F`` by an invertible matrix ``E`` and keeps the
    bookkeeping in step: ``U <- E*U`` and ``Uinv <- Uinv*E^-1``.  The
    elementary updates are fused row/column operations; nothing is inverted.
    """

    def __init__(self, F: OreMatrix, keep_snapshots: bool = False):
        if not F.is_square():
            raise ValueError("conjugation needs a square matrix")
        self.ring = F.ring
        self.n = F.nrows
        self.F = F.copy()
        self.U = OreMatrix.identity(F.ring, self.n)
        self.Uinv = OreMatrix.identity(F.ring, self.n)
        self.trace: list[TraceStep] = []
        self.keep_snapshots = keep_snapshots
        self.step_limit: int | None = None

    def _record(self, kind, operands, annotation=""):
        if self.step_limit is not None and len(self.trace) >= self.step_limit:
            raise StepLimitExceeded(f"more than {self.step_limit} elementary steps")
        snap = self.F.copy() if self.keep_snapshots else None
        self.trace.append(TraceStep(kind, operands, annotation, snap))

    def _check_index(self, *idx):
        for k in idx:
            if not 0 <= k < self.n:
                raise IndexError(f"index {k} out of range for size {self.n}")

    def conjugate_transvection(self, tv: Transvection, annotation: str = "") -> ConjugationState:
        """``F <- T F T^-1``, ``U <- T U``, ``Uinv <- Uinv T^-1`` for ``T = I + m E_ij``."""
        i, j, m = tv.i, tv.j, tv.m
        self._check_index(i, j)
        if m:
            F, U, Ui = self.F.rows, self.U.rows, self.Uinv.rows
            # row_i += m * row_j
            for M in (F, U):
                ri, rj = M[i], M[j]
                for c in range(self.n):
                    if rj[c]:
                        ri[c] = ri[c] + m * rj[c]
            # col_j -= col_i * m
            for M in (F, Ui):
                for r in M:
                    if r[i]:
                        r[j] = r[j] - r[i] * m
        self._record("transvection", tv, annotation)
        return self

    def conjugate_permutation(self, p: Permutation, kind: str = "permutation", annotation: str = "") -> ConjugationState:
        """Swap rows and columns ``i, j`` of F, rows of U and columns of Uinv."""
        i, j = p.i, p.j
        self._check_index(i, j)
        if i != j:
            F, U, Ui = self.F.rows, self.U.rows, self.Uinv.rows
            F[i], F[j] = F[j], F[i]
            U[i], U[j] = U[j], U[i]
            for M in (F, Ui):
                for r in M:
                    r[i], r[j] = r[j], r[i]
        self._record(kind, p, annotation)
        return self

    def conjugate_block(self, offset: int, block: OreMatrix, block_inv: OreMatrix, annotation: str = "") -> ConjugationState:
        """Conjugate by ``diag(I_offset, block)`` whose inverse is ``diag(I_offset, block_inv)``."""
        n = self.n
        E = embed(block, n, offset)
        Einv = embed(block_inv, n, offset)
        # update in place: callers may hold references to the row lists
        self.F.rows[:] = mat_mul(mat_mul(E, self.F), Einv).rows
        self.U.rows[:] = mat_mul(E, self.U).rows
        self.Uinv.rows[:] = mat_mul(self.Uinv, Einv).rows
        self._record("b1-block", (offset, block, block_inv), annotation)
        return self

    def mark(self, kind: str, annotation: str = ""):
        self._record(kind, None, annotation)

    def check_invariants(self, F0: OreMatrix) -> list[str]:
        """Names of the state invariants that fail (empty when all hold)."""
        bad = []
        I = OreMatrix.identity(self.ring, self.n)
        if mat_mul(self.U, self.Uinv) != I:
            bad.append("U*Uinv = I")
        if mat_mul(self.Uinv, self.U) != I:
            bad.append("Uinv*U = I")
        if mat_mul(mat_mul(self.U, F0), self.Uinv) != self.F:
            bad.append("F = U*F0*Uinv")
        if not is_idempotent(self.F):
            bad.append("F idempotent")
        return bad


def replay(F0: OreMatrix, trace: Sequence[TraceStep]) -> tuple[OreMatrix, OreMatrix, OreMatrix]:
    """Rebuild ``(U, Uinv, D)`` from a trace with explicit matrix products.

    This is an independent path from the fused updates of
    :class:`ConjugationState`: every step multiplies by the full elementary
    matrix and its inverse.
    """
    ring, n = F0.ring, F0.nrows
    U = OreMatrix.identity(ring, n)
    Uinv = OreMatrix.identity(ring, n)
    for step in trace:
        if step.kind == "transvection":
            E, Einv = step.operands.matrix(n), step.operands.inverse().matrix(n)
        elif step.kind in ("permutation", "final-permutation"):
            E = Einv = step.operands.matrix(ring, n)
        elif step.kind == "b1-block":
            offset, block, block_inv = step.operands
            E, Einv = embed(block, n, offset), embed(block_inv, n, offset)
        else:
            continue
        U = mat_mul(E, U)
        Uinv = mat_mul(Uinv, Einv)
    D = mat_mul(mat_mul(U, F0), Uinv)
    return U, Uinv, D
