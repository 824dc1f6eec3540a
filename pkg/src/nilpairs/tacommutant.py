"""Turnbull–Aitken structure of the commutant of a nilpotent Jordan matrix.

For ``A = J_m ⊕ J_n`` (``m > n``) every matrix commuting with ``A`` is fixed by
two of its rows, row 0 and row ``m`` (0-based).  :class:`ShortForm` stores
those rows as the coefficient sequences ``a`` (length m), ``b``, ``c``, ``d``
(length n each); :class:`StabShort` is the same layout for stabilizer
elements, with ``x``, ``y``, ``z``, ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .exactmat import DenseMatrix, ShapeError, mat_inverse
from .field import Field


class NotInCommutantError(ValueError):
    pass


def arm_length(i: int, j: int, rows: int, cols: int) -> int:
    """Arm length of entry ``(i, j)`` (1-based) of a ``rows × cols`` block."""
    if not (1 <= i <= rows and 1 <= j <= cols):
        raise IndexError(f"entry ({i}, {j}) outside a {rows}x{cols} block")
    if rows >= cols:
        return j - i
    return j - i - (cols - rows)


def _block_is_ta(M: DenseMatrix, r0: int, c0: int, rows: int, cols: int) -> bool:
    seen: dict[int, Any] = {}
    for i in range(rows):
        for j in range(cols):
            x = M[r0 + i, c0 + j]
            arm = arm_length(i + 1, j + 1, rows, cols)
            if arm < 0:
                if x:
                    return False
            elif arm in seen:
                if seen[arm] != x:
                    return False
            else:
                seen[arm] = x
    return True


def is_ta_matrix(M: DenseMatrix) -> bool:
    if M.rows == 0 or M.cols == 0:
        return True
    return _block_is_ta(M, 0, 0, M.rows, M.cols)


def commutant_check(A: DenseMatrix, B: DenseMatrix, lam: Sequence[int]) -> bool:
    """Whether ``B`` commutes with ``A = J_{λ1} ⊕ ... ⊕ J_{λs}``, read off its blocks."""
    lam = list(lam)
    if A != DenseMatrix.jordan(A.field, lam):
        raise ShapeError(f"A is not the Jordan matrix of type {lam}")
    if B.shape != A.shape:
        raise ShapeError(f"B has shape {B.shape}, expected {A.shape}")
    offsets = [0]
    for k in lam:
        offsets.append(offsets[-1] + k)
    for bi, li in enumerate(lam):
        for bj, lj in enumerate(lam):
            if not _block_is_ta(B, offsets[bi], offsets[bj], li, lj):
                return False
    return True


def _check_dims(m: int, n: int) -> None:
    if not (m > n >= 1):
        raise ValueError(f"need m > n >= 1, got m={m}, n={n}")


def _expand_rows(F: Field, m: int, n: int, top, right, left, bottom) -> DenseMatrix:
    s = m - n
    N = m + n
    z = F.zero
    out = [[z] * N for _ in range(N)]
    for i in range(m):
        row = out[i]
        for j in range(i, m):
            row[j] = top[j - i]
        for j in range(i, n):
            row[m + j] = right[j - i]
    for i in range(n):
        row = out[m + i]
        for j in range(s + i, m):
            row[j] = left[j - i - s]
        for j in range(i, n):
            row[m + j] = bottom[j - i]
    return DenseMatrix(F, out, _raw=True)


@dataclass(frozen=True)
class ShortForm:
    """Compressed commutant element of ``J_m ⊕ J_n`` (raw field values)."""

    field: Field
    m: int
    n: int
    a: tuple
    b: tuple
    c: tuple
    d: tuple

    def __post_init__(self) -> None:
        _check_dims(self.m, self.n)
        for name, want in (("a", self.m), ("b", self.n), ("c", self.n), ("d", self.n)):
            seq = tuple(self.field(x) for x in getattr(self, name))
            if len(seq) != want:
                raise ValueError(f"row {name} has length {len(seq)}, expected {want}")
            object.__setattr__(self, name, seq)

    @classmethod
    def zero(cls, field: Field, m: int, n: int) -> ShortForm:
        z = field.zero
        return cls(field, m, n, (z,) * m, (z,) * n, (z,) * n, (z,) * n)

    @property
    def s(self) -> int:
        return self.m - self.n

    def is_nilpotent(self) -> bool:
        return not self.a[0] and not self.d[0]

    def replace(self, **rows: Sequence) -> ShortForm:
        kw = {k: getattr(self, k) for k in "abcd"}
        kw.update(rows)
        return ShortForm(self.field, self.m, self.n, **kw)

    def key(self) -> tuple:
        """Row-major tuple ``a + b + c + d``; orders short forms deterministically."""
        sk = self.field.sort_key
        return tuple(sk(x) for x in self.a + self.b + self.c + self.d)

    def to_strings(self) -> dict[str, list[str]]:
        fmt = self.field.format
        return {k: [fmt(x) for x in getattr(self, k)] for k in "abcd"}

    def __str__(self) -> str:
        st = self.to_strings()
        return "[{} | {} / {} | {}]".format(*(" ".join(st[k]) for k in "abcd"))


def is_nilpotent_short(sf: ShortForm) -> bool:
    return sf.is_nilpotent()


@dataclass(frozen=True)
class StabShort:
    """Compressed invertible commutant element; needs ``x_0 ≠ 0`` and ``w_0 ≠ 0``."""

    field: Field
    m: int
    n: int
    x: tuple
    y: tuple
    z: tuple
    w: tuple

    def __post_init__(self) -> None:
        _check_dims(self.m, self.n)
        for name, want in (("x", self.m), ("y", self.n), ("z", self.n), ("w", self.n)):
            seq = tuple(self.field(v) for v in getattr(self, name))
            if len(seq) != want:
                raise ValueError(f"row {name} has length {len(seq)}, expected {want}")
            object.__setattr__(self, name, seq)
        if not self.x[0] or not self.w[0]:
            raise ValueError("stabilizer needs x_0 != 0 and w_0 != 0")

    @classmethod
    def identity(cls, field: Field, m: int, n: int) -> StabShort:
        z, o = field.zero, field.one
        return cls(field, m, n, (o,) + (z,) * (m - 1), (z,) * n, (z,) * n, (o,) + (z,) * (n - 1))

    def key(self) -> tuple:
        sk = self.field.sort_key
        return tuple(sk(v) for v in self.x + self.y + self.z + self.w)


def expand(sf: ShortForm) -> DenseMatrix:
    return _expand_rows(sf.field, sf.m, sf.n, sf.a, sf.b, sf.c, sf.d)


def stab_expand(xs: StabShort) -> DenseMatrix:
    return _expand_rows(xs.field, xs.m, xs.n, xs.x, xs.y, xs.z, xs.w)


def _read_rows(M: DenseMatrix, m: int, n: int) -> tuple[tuple, tuple, tuple, tuple]:
    _check_dims(m, n)
    if M.shape != (m + n, m + n):
        raise ShapeError(f"expected a {m + n}x{m + n} matrix, got {M.shape}")
    top = M.row(0)
    mid = M.row(m)
    return top[:m], top[m:], mid[m - n : m], mid[m:]


def compress(B: DenseMatrix, m: int, n: int) -> ShortForm:
    """Short form of a matrix commuting with ``J_m ⊕ J_n``."""
    a, b, c, d = _read_rows(B, m, n)
    sf = ShortForm(B.field, m, n, a, b, c, d)
    if expand(sf) != B:
        raise NotInCommutantError("matrix does not commute with J_m + J_n")
    return sf


def stab_compress(X: DenseMatrix, m: int, n: int) -> StabShort:
    x, y, z, w = _read_rows(X, m, n)
    xs = StabShort(X.field, m, n, x, y, z, w)
    if stab_expand(xs) != X:
        raise NotInCommutantError("matrix does not commute with J_m + J_n")
    return xs


def stab_compose(first: StabShort, second: StabShort) -> StabShort:
    """Short form of ``X_first · X_second``; acting by it equals acting by first, then second."""
    return stab_compress(stab_expand(first) @ stab_expand(second), first.m, first.n)


def apply_stab(xs: StabShort, sf: ShortForm) -> ShortForm:
    """``X⁻¹ B X`` in short-form coordinates."""
    if (xs.m, xs.n, xs.field) != (sf.m, sf.n, sf.field):
        raise ValueError("stabilizer and short form disagree on dimensions or field")
    X = stab_expand(xs)
    return compress(mat_inverse(X) @ expand(sf) @ X, sf.m, sf.n)
