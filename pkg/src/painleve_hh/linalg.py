"""Small dense exact/big-float linear algebra.

Everything here targets the tiny systems of the series recurrences and the
subequation fitter: a few rows to a few dozen rows.  Two code paths share
one interface; matrices whose entries are all exact rationals are solved
exactly with Fraction arithmetic, anything else is solved in complex
big-floats with a relative pivot threshold of 2**(-precision/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import ContractViolation
from .scalars import Scalar, as_scalar


class DenseMatrix:
    """Immutable row-major matrix of Scalars."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(as_scalar(e) for e in entries)
        if rows <= 0 or cols <= 0:
            raise ContractViolation("matrix dimensions must be positive")
        if len(entries) != rows * cols:
            raise ContractViolation(
                f"expected {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows) -> "DenseMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ContractViolation("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ContractViolation("ragged rows")
        flat = [e for r in rows for e in r]
        return cls(len(rows), ncols, flat)

    def __getitem__(self, key):
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def is_exact(self) -> bool:
        return all(e.is_exact for e in self.entries)

    def precision(self) -> int:
        return max(e.precision for e in self.entries)

    def __repr__(self):
        body = "; ".join(
            ", ".join(repr(self[i, j]) for j in range(self.cols))
            for i in range(self.rows)
        )
        return f"DenseMatrix({self.rows}x{self.cols}: {body})"


@dataclass
class LinearSolution:
    """Classification plus data for a linear system A x = b.

    kind is one of "unique", "parametrized", "inconsistent".  For
    "unique" the solution is in ``solution``; for "parametrized" a
    particular solution is in ``solution`` and ``nullspace`` holds a basis
    of the homogeneous solutions.
    """

    kind: str
    solution: list | None = None
    nullspace: list = field(default_factory=list)
    rank: int = 0

    @property
    def nullspace_dim(self) -> int:
        return len(self.nullspace)


def _exact_rref(a, b):
    """Row-reduce [a | b] in place over Fractions; return pivot columns."""
    nrows, ncols = len(a), len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        b[r], b[pr] = b[pr], b[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        b[r] = b[r] * inv
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [v - f * w for v, w in zip(a[i], a[r])]
                b[i] = b[i] - f * b[r]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _float_rref(a, b, thresh):
    """Same reduction in mpc arithmetic with magnitude pivoting."""
    nrows, ncols = len(a), len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr, best = None, thresh
        for i in range(r, nrows):
            m = abs(a[i][c])
            if m > best:
                pr, best = i, m
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        b[r], b[pr] = b[pr], b[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        b[r] = b[r] * inv
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [v - f * w for v, w in zip(a[i], a[r])]
                b[i] = b[i] - f * b[r]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _assemble(pivots, a, b, ncols, zero, is_zero):
    """Particular solution and nullspace basis from an RREF."""
    rank = len(pivots)
    for i in range(rank, len(a)):
        if not is_zero(b[i]):
            return LinearSolution(kind="inconsistent", rank=rank)
    particular = [zero] * ncols
    for r, c in enumerate(pivots):
        particular[c] = b[r]
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [zero] * ncols
        vec[fc] = zero + 1
        for r, c in enumerate(pivots):
            vec[c] = -a[r][fc]
        basis.append(vec)
    if not free_cols:
        return LinearSolution(kind="unique", solution=particular, rank=rank)
    return LinearSolution(
        kind="parametrized", solution=particular, nullspace=basis, rank=rank
    )


def solve_linear(A: DenseMatrix, b) -> LinearSolution:
    """Solve A x = b, classifying the system exactly or to tolerance.

    Exact-rational inputs are classified exactly.  Otherwise all rank
    decisions use the relative pivot threshold 2**(-precision/2), with
    precision the maximum bits across the entries.
    """
    b = [as_scalar(v) for v in b]
    if len(b) != A.rows:
        raise ContractViolation(
            f"rhs length {len(b)} does not match {A.rows} rows"
        )
    exact = A.is_exact() and all(v.is_exact for v in b)
    if exact:
        rows = [[e.fraction() for e in A.row(i)] for i in range(A.rows)]
        rhs = [v.fraction() for v in b]
        pivots = _exact_rref(rows, rhs)
        sol = _assemble(pivots, rows, rhs, A.cols, Fraction(0), lambda v: v == 0)
        return _wrap(sol)

    bits = max(A.precision(), max((v.precision for v in b), default=64))
    with mp.workprec(bits + 20):
        rows = [[e.mpc(bits) for e in A.row(i)] for i in range(A.rows)]
        rhs = [v.mpc(bits) for v in b]
        scale = max([abs(e) for r in rows for e in r] + [mpmath.mpf(1)])
        bscale = max([abs(v) for v in rhs] + [scale])
        thresh = mpmath.mpf(2) ** (-(bits // 2)) * scale
        bthresh = mpmath.mpf(2) ** (-(bits // 2)) * bscale
        pivots = _float_rref(rows, rhs, thresh)
        sol = _assemble(
            pivots, rows, rhs, A.cols, mpmath.mpc(0), lambda v: abs(v) <= bthresh
        )
    return _wrap(sol, bits)


def _wrap(sol: LinearSolution, bits: int | None = None) -> LinearSolution:
    def conv(vec):
        if vec is None:
            return None
        if bits is None:
            return [Scalar.exact(v) for v in vec]
        return [Scalar.from_mpc(v, bits) for v in vec]

    return LinearSolution(
        kind=sol.kind,
        solution=conv(sol.solution),
        nullspace=[conv(v) for v in sol.nullspace],
        rank=sol.rank,
    )


def determinant(A: DenseMatrix) -> Scalar:
    """Determinant; exact for exact-rational entries."""
    if A.rows != A.cols:
        raise ContractViolation("determinant of a non-square matrix")
    n = A.rows
    if A.is_exact():
        rows = [[e.fraction() for e in A.row(i)] for i in range(n)]
        det = Fraction(1)
        for c in range(n):
            pr = next((i for i in range(c, n) if rows[i][c] != 0), None)
            if pr is None:
                return Scalar.exact(0)
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                det = -det
            det *= rows[c][c]
            inv = 1 / rows[c][c]
            for i in range(c + 1, n):
                if rows[i][c] != 0:
                    f = rows[i][c] * inv
                    rows[i] = [v - f * w for v, w in zip(rows[i], rows[c])]
        return Scalar.exact(det)

    bits = A.precision()
    with mp.workprec(bits + 20):
        rows = [[e.mpc(bits) for e in A.row(i)] for i in range(n)]
        det = mpmath.mpc(1)
        for c in range(n):
            pr = max(range(c, n), key=lambda i: abs(rows[i][c]))
            if rows[pr][c] == 0:
                return Scalar.from_mpc(mpmath.mpc(0), bits)
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                det = -det
            det *= rows[c][c]
            inv = 1 / rows[c][c]
            for i in range(c + 1, n):
                if rows[i][c] != 0:
                    f = rows[i][c] * inv
                    rows[i] = [v - f * w for v, w in zip(rows[i], rows[c])]
    return Scalar.from_mpc(det, bits)


def matmul_vector(A: DenseMatrix, x) -> list:
    if len(x) != A.cols:
        raise ContractViolation("vector length does not match matrix columns")
    out = []
    for i in range(A.rows):
        acc = Scalar.exact(0)
        for j in range(A.cols):
            acc = acc + A[i, j] * x[j]
        out.append(acc)
    return out


def residual_inf_norm(A: DenseMatrix, x, b):
    """max_i |(A x - b)_i| as an mpf."""
    ax = matmul_vector(A, x)
    return max((ax[i] - as_scalar(b[i])).mag() for i in range(A.rows))
