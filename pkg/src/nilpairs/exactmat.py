"""Dense matrices over an exact field.

Entries are raw field values (see :mod:`nilpairs.field`).  Matrices are
immutable; every operation builds a new one.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from .field import Field, FieldMismatchError, Scalar


class ShapeError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


class NotNilpotentError(ValueError):
    pass


class DenseMatrix:
    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field: Field, data: Iterable[Iterable[Any]], *, _raw: bool = False):
        if _raw:
            rows = tuple(tuple(r) for r in data)
        else:
            rows = tuple(tuple(field(x) for x in r) for r in data)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ShapeError("ragged matrix")
        self.field = field
        self.rows = len(rows)
        self.cols = widths.pop() if widths else 0
        self._data = rows

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int | None = None) -> DenseMatrix:
        cols = rows if cols is None else cols
        z = field.zero
        return cls(field, [[z] * cols for _ in range(rows)], _raw=True)

    @classmethod
    def identity(cls, field: Field, n: int) -> DenseMatrix:
        z, o = field.zero, field.one
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)], _raw=True)

    @classmethod
    def jordan_block(cls, field: Field, n: int) -> DenseMatrix:
        z, o = field.zero, field.one
        return cls(field, [[o if j == i + 1 else z for j in range(n)] for i in range(n)], _raw=True)

    @classmethod
    def jordan(cls, field: Field, sizes: Sequence[int]) -> DenseMatrix:
        """``J_{sizes[0]} ⊕ J_{sizes[1]} ⊕ ...``"""
        return direct_sum(*(cls.jordan_block(field, k) for k in sizes)) if sizes else cls.zeros(field, 0)

    # access -------------------------------------------------------------
    def __getitem__(self, idx: tuple[int, int]):
        i, j = idx
        return self._data[i][j]

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.field, self._data[i][j])

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._data]

    def to_strings(self) -> list[list[str]]:
        fmt = self.field.format
        return [[fmt(x) for x in r] for r in self._data]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(x for r in self._data for x in r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.field == other.field and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.field, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(r) for r in self.to_strings())
        return f"DenseMatrix({self.field!r}, [{body}])"

    # arithmetic -----------------------------------------------------------
    def _same(self, other: DenseMatrix) -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: DenseMatrix) -> DenseMatrix:
        self._same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        add = self.field.add
        return DenseMatrix(
            self.field,
            [[add(x, y) for x, y in zip(r, s)] for r, s in zip(self._data, other._data)],
            _raw=True,
        )

    def __sub__(self, other: DenseMatrix) -> DenseMatrix:
        self._same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {self.shape} and {other.shape}")
        sub = self.field.sub
        return DenseMatrix(
            self.field,
            [[sub(x, y) for x, y in zip(r, s)] for r, s in zip(self._data, other._data)],
            _raw=True,
        )

    def scale(self, c) -> DenseMatrix:
        c = self.field(c)
        mul = self.field.mul
        return DenseMatrix(self.field, [[mul(c, x) for x in r] for r in self._data], _raw=True)

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        return mat_mul(self, other)

    def __pow__(self, k: int) -> DenseMatrix:
        return mat_power(self, k)

    def transpose(self) -> DenseMatrix:
        return DenseMatrix(self.field, zip(*self._data), _raw=True) if self.rows else self

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def inverse(self) -> DenseMatrix:
        return mat_inverse(self)

    def rank(self) -> int:
        return mat_rank(self)

    def is_nilpotent(self) -> bool:
        if not self.is_square:
            return False
        return mat_power(self, self.rows).is_zero()


def mat_mul(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    if A.field != B.field:
        raise FieldMismatchError(f"{A.field} vs {B.field}")
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    F = A.field
    zero = F.zero
    bdata = B._data
    out = []
    if F.modulus is None:
        for row in A._data:
            acc = [zero] * B.cols
            for k, a in enumerate(row):
                if a:
                    brow = bdata[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] = acc[j] + a * b
            out.append(acc)
    else:
        p = F.modulus
        for row in A._data:
            acc = [0] * B.cols
            for k, a in enumerate(row):
                if a:
                    brow = bdata[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
            out.append([x % p for x in acc])
    return DenseMatrix(F, out, _raw=True)


def mat_power(A: DenseMatrix, k: int) -> DenseMatrix:
    if not A.is_square:
        raise ShapeError("power of a non-square matrix")
    if k < 0:
        return mat_power(mat_inverse(A), -k)
    result = DenseMatrix.identity(A.field, A.rows)
    base = A
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def direct_sum(*mats: DenseMatrix) -> DenseMatrix:
    F = mats[0].field
    n = sum(M.rows for M in mats)
    ncols = sum(M.cols for M in mats)
    out = [[F.zero] * ncols for _ in range(n)]
    r0 = c0 = 0
    for M in mats:
        if M.field != F:
            raise FieldMismatchError(f"{M.field} vs {F}")
        for i, row in enumerate(M._data):
            out[r0 + i][c0 : c0 + M.cols] = row
        r0 += M.rows
        c0 += M.cols
    return DenseMatrix(F, out, _raw=True)


def _rref(F: Field, rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of a mutable copy; returns (rows, pivot columns)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    sub, mul, inv = F.sub, F.mul, F.inv
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        s = inv(pr[c])
        if s != F.one:
            pr = rows[r] = [mul(s, x) for x in pr]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [sub(x, mul(f, y)) if y else x for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows, pivots


def mat_rank(A: DenseMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return len(_rref(A.field, A.tolist())[1])


def mat_inverse(A: DenseMatrix) -> DenseMatrix:
    if not A.is_square:
        raise ShapeError(f"cannot invert a {A.shape} matrix")
    n = A.rows
    F = A.field
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(A._data)]
    red, pivots = _rref(F, aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return DenseMatrix(F, [r[n:] for r in red], _raw=True)


def nullspace(A: DenseMatrix) -> list[list]:
    """Basis (as raw column vectors) of ``{v : A v = 0}``."""
    F = A.field
    red, pivots = _rref(F, A.tolist())
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [F.zero] * A.cols
        v[f] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(red[i][f])
        basis.append(v)
    return basis


def mat_vec(A: DenseMatrix, v: Sequence) -> list:
    F = A.field
    add, mul = F.add, F.mul
    out = []
    for row in A._data:
        acc = F.zero
        for a, x in zip(row, v):
            if a and x:
                acc = add(acc, mul(a, x))
        out.append(acc)
    return out


def conjugate(X: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    """``X⁻¹ B X``."""
    if not (X.is_square and B.is_square and X.rows == B.rows):
        raise ShapeError(f"cannot conjugate {B.shape} by {X.shape}")
    return mat_inverse(X) @ B @ X


def jordan_type(A: DenseMatrix) -> list[int]:
    """Jordan block sizes of a nilpotent matrix, largest first."""
    if not A.is_square:
        raise ShapeError("jordan_type needs a square matrix")
    n = A.rows
    if n == 0:
        return []
    ranks = [n]
    P = DenseMatrix.identity(A.field, n)
    while ranks[-1] > 0:
        if len(ranks) > n:
            raise NotNilpotentError("matrix is not nilpotent")
        P = P @ A
        r = mat_rank(P)
        if r == ranks[-1]:
            raise NotNilpotentError("matrix is not nilpotent")
        ranks.append(r)
    # at_least[k] = number of blocks of size >= k
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(at_least), 0, -1):
        count = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * count)
    return sizes


class _SpanTracker:
    """Incrementally maintained echelon basis of a subspace."""

    def __init__(self, F: Field, dim: int):
        self.F = F
        self.rows: list[tuple[int, list]] = []  # (pivot column, normalized row)

    def reduce(self, v: Sequence) -> list:
        F = self.F
        v = list(v)
        for pc, r in self.rows:
            f = v[pc]
            if f:
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, r)]
        return v

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        F = self.F
        w = self.reduce(v)
        pc = next((i for i, x in enumerate(w) if x), None)
        if pc is None:
            return False
        s = F.inv(w[pc])
        w = [F.mul(s, x) for x in w]
        # keep existing rows reduced at the new pivot
        self.rows = [
            (q, [F.sub(x, F.mul(r[pc], y)) for x, y in zip(r, w)] if r[pc] else r)
            for q, r in self.rows
        ]
        self.rows.append((pc, w))
        return True


def jordan_basis(A: DenseMatrix) -> DenseMatrix:
    """Invertible ``P`` with ``P⁻¹ A P = J_{λ1} ⊕ J_{λ2} ⊕ ...`` (λ non-increasing).

    Chain tops at level ``k`` are picked from ``ker A^k`` independently of
    ``ker A^{k-1}`` plus the level-``k`` vectors of the longer chains.
    """
    sizes = jordan_type(A)
    F = A.field
    n = A.rows
    if n == 0:
        return A
    height = sizes[0] if sizes else 0
    kernels = [[]]  # kernels[k] = basis of ker A^k
    Ak = DenseMatrix.identity(F, n)
    for _ in range(height):
        Ak = Ak @ A
        kernels.append(nullspace(Ak))

    chains: list[list[list]] = []  # each chain: [top, A top, A^2 top, ...]
    for k in range(height, 0, -1):
        tracker = _SpanTracker(F, n)
        for v in kernels[k - 1]:
            tracker.add(v)
        for ch in chains:
            # longer chains contribute their vector sitting at height k
            tracker.add(ch[len(ch) - k])
        for v in kernels[k]:
            if tracker.add(v):
                chain = [v]
                for _ in range(k - 1):
                    chain.append(mat_vec(A, chain[-1]))
                chains.append(chain)

    columns = []
    for ch in chains:
        columns.extend(reversed(ch))
    P = DenseMatrix(F, columns, _raw=True).transpose()
    return P
