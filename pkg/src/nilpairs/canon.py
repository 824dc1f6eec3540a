"""Canonical forms of commuting nilpotent pairs ``(J_m ⊕ J_n, B)`` with ``m > n``.

Pipeline for a short form ``B``:

1. Find the leading pair index ``k`` (first ``(b_k, c_k) ≠ (0, 0)``).
2. While some ``j ≤ k`` has ``d_j ≠ a_j``, conjugate the leading pair away
   (:func:`try_eliminate`).  If every pair vanishes the pair is decomposable
   and its canonical rank is 0; otherwise the rank is ``n - k``.
3. Normalize with one explicit stabilizer: scale ``c_k`` (or ``b_k`` when
   ``c_k = 0``) to 1 and clear ``a_{m-r}, ..., a_{m-1}``.

Every result is checked against its template and its witness before it is
returned.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence

from .exactmat import (
    DenseMatrix,
    NotNilpotentError,
    ShapeError,
    jordan_basis,
    jordan_type,
    mat_inverse,
)
from .field import Field
from .tacommutant import (
    ShortForm,
    StabShort,
    apply_stab,
    compress,
    expand,
    stab_compose,
    stab_expand,
)


class PreconditionError(ValueError):
    """Input outside the classified family (reported, never silently handled)."""


class NotCommutingError(PreconditionError):
    pass


class UnsupportedJordanTypeError(PreconditionError):
    pass


class DecomposableError(PreconditionError):
    pass


class NoEliminationError(ValueError):
    """``try_eliminate`` called where no eliminating conjugation exists."""


class VerificationError(RuntimeError):
    """A computed canonical form failed its own post-check."""


class Form(str, enum.Enum):
    TYPE_B = "TypeB"
    TYPE_B_PRIME = "TypeBPrime"
    DECOMPOSABLE = "Decomposable"


@dataclass(frozen=True)
class CanonResult:
    rank: int
    form: Form
    input: ShortForm
    canonical: ShortForm | None = None
    # X with X⁻¹ · expand(input) · X = expand(canonical); commutes with J_m ⊕ J_n
    witness: DenseMatrix | None = None
    # P with P⁻¹ A P = J_m ⊕ J_n (identity when A was already in Jordan form)
    jordanizer: DenseMatrix | None = None

    @property
    def total_witness(self) -> DenseMatrix | None:
        """``P · X``: conjugates the original pair to the canonical pair."""
        if self.witness is None:
            return None
        if self.jordanizer is None:
            return self.witness
        return self.jordanizer @ self.witness


def _require_nilpotent(sf: ShortForm) -> None:
    if not sf.is_nilpotent():
        raise NotNilpotentError("short form is not nilpotent (a_0 or d_0 nonzero)")


def leading_pair_index(sf: ShortForm) -> int | None:
    _require_nilpotent(sf)
    for k in range(sf.n):
        if sf.b[k] or sf.c[k]:
            return k
    return None


def first_mismatch(sf: ShortForm) -> int | None:
    """Smallest ``j ≥ 1`` with ``d_j ≠ a_j``."""
    for j in range(1, sf.n):
        if sf.a[j] != sf.d[j]:
            return j
    return None


def _can_eliminate(sf: ShortForm) -> bool:
    k = leading_pair_index(sf)
    j = first_mismatch(sf)
    return k is not None and j is not None and j <= k


def _elementary(F: Field, m: int, n: int, row: str, index: int, t) -> StabShort:
    """``I + t·E`` where ``E`` has a single 1 at ``row[index]`` of the short form."""
    base = StabShort.identity(F, m, n)
    seq = list(getattr(base, row))
    seq[index] = F.add(seq[index], t)
    kw = {r: getattr(base, r) for r in "xyzw"}
    kw[row] = seq
    return StabShort(F, m, n, **kw)


def _kill_entry(sf: ShortForm, target: str, k: int, gen_row: str, gen_index: int):
    """Zero ``target[k]`` by conjugations ``I + tE``; each stage solves a linear equation in t.

    The entry depends affinely on ``t`` (the quadratic term of the conjugation
    only lands at later positions), so one stage normally suffices.
    """
    F = sf.field
    acc = StabShort.identity(F, sf.m, sf.n)
    for _ in range(sf.m + sf.n):
        v0 = getattr(sf, target)[k]
        if not v0:
            return sf, acc
        v1 = getattr(apply_stab(_elementary(F, sf.m, sf.n, gen_row, gen_index, F.one), sf), target)[k]
        slope = F.sub(v1, v0)
        if not slope:
            raise NoEliminationError(f"{target}_{k} does not move under {gen_row}_{gen_index}")
        xs = _elementary(F, sf.m, sf.n, gen_row, gen_index, F.neg(F.div(v0, slope)))
        sf = apply_stab(xs, sf)
        acc = stab_compose(acc, xs)
    raise VerificationError(f"could not clear {target}_{k}")


def eliminate_step(sf: ShortForm) -> tuple[ShortForm, StabShort]:
    """One elimination move, returning the new short form and the stabilizer used."""
    k = leading_pair_index(sf)
    if k is None:
        raise NoEliminationError("b = c = 0: no leading pair to eliminate")
    j = first_mismatch(sf)
    if j is None or j > k:
        raise NoEliminationError(f"d_j = a_j for all 1 <= j <= {k}: leading pair cannot be removed")
    shift = k - j
    sf, xs_b = _kill_entry(sf, "b", k, "y", shift)
    sf, xs_c = _kill_entry(sf, "c", k, "z", shift)
    k2 = leading_pair_index(sf)
    if k2 is not None and k2 <= k:
        raise VerificationError("elimination did not advance the leading pair")
    return sf, stab_compose(xs_b, xs_c)


def try_eliminate(sf: ShortForm) -> ShortForm:
    return eliminate_step(sf)[0]


def reduce(sf: ShortForm) -> tuple[ShortForm, StabShort, int]:
    """Run eliminations to a fixed point: returns (reduced form, stabilizer, canonical rank)."""
    _require_nilpotent(sf)
    acc = StabShort.identity(sf.field, sf.m, sf.n)
    while _can_eliminate(sf):
        sf, xs = eliminate_step(sf)
        acc = stab_compose(acc, xs)
    k = leading_pair_index(sf)
    rank = 0 if k is None else sf.n - k
    return sf, acc, rank


def canonical_rank(sf: ShortForm) -> int:
    return reduce(sf)[2]


# --- templates ------------------------------------------------------------


def _shape_ok(sf: ShortForm, r: int) -> bool:
    """Common part of both templates for rank ``r``."""
    if not sf.is_nilpotent() or not 1 <= r <= sf.n:
        return False
    k = sf.n - r
    if any(sf.b[:k]) or any(sf.c[:k]):
        return False
    if any(sf.a[sf.m - r :]):
        return False
    return all(sf.d[i] == sf.a[i] for i in range(1, k + 1))


def matches_type_b(sf: ShortForm, r: int) -> bool:
    k = sf.n - r
    F = sf.field
    return _shape_ok(sf, r) and sf.c[k] == F.one and not any(sf.c[k + 1 :])


def matches_type_b_prime(sf: ShortForm, r: int) -> bool:
    k = sf.n - r
    F = sf.field
    return (
        _shape_ok(sf, r)
        and sf.b[k] == F.one
        and not any(sf.b[k + 1 :])
        and not sf.c[k]
    )


def template_of(sf: ShortForm) -> tuple[Form, int] | None:
    """Which canonical template (if any) ``sf`` is an instance of."""
    if not sf.is_nilpotent():
        return None
    k = leading_pair_index(sf)
    if k is None:
        return None
    r = sf.n - k
    if matches_type_b(sf, r):
        return Form.TYPE_B, r
    if matches_type_b_prime(sf, r):
        return Form.TYPE_B_PRIME, r
    return None


# --- normalization ----------------------------------------------------------


def normalizing_stabilizer(sf: ShortForm, r: int) -> tuple[Form, StabShort]:
    """The explicit transformation for a reduced form of rank ``r``.

    TypeB (``c_k ≠ 0``): y = (a_{m-r}, ..., a_{m-1}, 0, ...), w = (c_k, ..., c_{n-1}, 0, ...);
    the canonical form is ``X⁻¹ B X``.
    TypeBPrime (``c_k = 0``): z = (a_{m-r}, ..., a_{m-1}, 0, ...), w = (b_k, ..., b_{n-1}, 0, ...);
    the canonical form is ``X B X⁻¹``.
    """
    F = sf.field
    m, n = sf.m, sf.n
    k = n - r
    z0 = F.zero
    x = (F.one,) + (z0,) * (m - 1)
    tail_a = tuple(sf.a[m - r :]) + (z0,) * k
    zeros = (z0,) * n
    if sf.c[k]:
        w = tuple(sf.c[k:]) + (z0,) * k
        return Form.TYPE_B, StabShort(F, m, n, x, tail_a, zeros, w)
    if sf.b[k]:
        w = tuple(sf.b[k:]) + (z0,) * k
        return Form.TYPE_B_PRIME, StabShort(F, m, n, x, zeros, tail_a, w)
    raise PreconditionError(f"(b_{k}, c_{k}) = (0, 0): not a rank-{r} reduced form")


def _verify(result: CanonResult) -> None:
    sf, canon, W = result.input, result.canonical, result.witness
    m, n = sf.m, sf.n
    expected = matches_type_b if result.form is Form.TYPE_B else matches_type_b_prime
    if not expected(canon, result.rank):
        raise VerificationError(f"{canon} does not match the {result.form.value} template (r={result.rank})")
    # W⁻¹ B W = C  <=>  B W = W C for invertible W
    if expand(sf) @ W != W @ expand(canon):
        raise VerificationError("witness does not conjugate the input to the canonical form")
    J = DenseMatrix.jordan(sf.field, [m, n])
    if J @ W != W @ J:
        raise VerificationError("witness does not commute with J_m + J_n")


def canonical_form(sf: ShortForm) -> CanonResult:
    _require_nilpotent(sf)
    reduced, red_xs, r = reduce(sf)
    if r == 0:
        return CanonResult(rank=0, form=Form.DECOMPOSABLE, input=sf)
    form, xs = normalizing_stabilizer(reduced, r)
    X = stab_expand(xs)
    Xinv = mat_inverse(X)
    B = expand(reduced)
    if form is Form.TYPE_B:
        canon, step = Xinv @ B @ X, X
    else:
        canon, step = X @ B @ Xinv, Xinv
    witness = stab_expand(red_xs) @ step
    result = CanonResult(
        rank=r, form=form, input=sf, canonical=compress(canon, sf.m, sf.n), witness=witness
    )
    _verify(result)
    return result


# --- closed forms for m = 6, n = 4 -----------------------------------------------


def appendix_oracle_m6n4(sf: ShortForm) -> ShortForm:
    """Canonical form of a reduced ``m = 6, n = 4`` short form by direct substitution."""
    if (sf.m, sf.n) != (6, 4):
        raise ShapeError(f"closed forms exist for m=6, n=4 only, got m={sf.m}, n={sf.n}")
    F = sf.field
    k = leading_pair_index(sf)
    if k is None or _can_eliminate(sf):
        raise PreconditionError("short form is not in reduced shape")
    r = 4 - k
    S = F.scalar
    a = [S(v) for v in sf.a]
    b = [S(v) for v in sf.b]
    c = [S(v) for v in sf.c]
    d = [S(v) for v in sf.d]
    zero, one = S(0), S(1)
    A = list(a[: 6 - r]) + [zero] * r

    if r == 1:
        if c[3]:
            B = [zero, zero, zero, b[3] * c[3]]
            C = [zero, zero, zero, one]
        else:
            B = [zero, zero, zero, one]
            C = [zero] * 4
        D = [zero, a[1], a[2], a[3]]
    elif r == 2:
        if c[2]:
            B = [zero, zero, b[2] * c[2], b[2] * c[3] + b[3] * c[2] + (a[3] - d[3]) * a[4]]
            C = [zero, zero, one, zero]
        else:
            B = [zero, zero, one, zero]
            C = [zero, zero, zero, b[2] * c[3] + (a[3] - d[3]) * a[4]]
        D = [zero, a[1], a[2], d[3]]
    elif r == 3:
        if c[1]:
            B = [
                zero,
                b[1] * c[1],
                b[1] * c[2] + b[2] * c[1] + (a[2] - d[2]) * a[3],
                b[1] * c[3] + b[2] * c[2] + b[3] * c[1] + (a[2] - d[2]) * a[4] - a[3] * d[3],
            ]
            C = [zero, one, zero, zero]
        else:
            B = [zero, one, zero, zero]
            C = [
                zero,
                zero,
                b[1] * c[2] + (a[2] - d[2]) * a[3],
                b[1] * c[3] + b[2] * c[2] + (a[2] - d[2]) * a[4] - a[3] * d[3],
            ]
        D = [zero, a[1], d[2], a[3] + d[3]]
    else:
        if c[0]:
            B = [
                b[0] * c[0],
                b[0] * c[1] + b[1] * c[0] + (a[1] - d[1]) * a[2],
                b[0] * c[2] + b[1] * c[1] + b[2] * c[0] + (a[1] - d[1]) * a[3] - a[2] * d[2],
                b[0] * c[3] + b[1] * c[2] + b[2] * c[1] + b[3] * c[0]
                + (a[1] - d[1]) * a[4] - a[2] * d[3] - a[3] * d[2],
            ]
            C = [one, zero, zero, zero]
        else:
            B = [one, zero, zero, zero]
            C = [
                zero,
                b[0] * c[1] + (a[1] - d[1]) * a[2],
                b[0] * c[2] + b[1] * c[1] + (a[1] - d[1]) * a[3] - a[2] * d[2],
                b[0] * c[3] + b[1] * c[2] + b[2] * c[1] + (a[1] - d[1]) * a[4] - a[2] * d[3] - a[3] * d[2],
            ]
        D = [zero, d[1], a[2] + d[2], a[3] + d[3]]

    return ShortForm(F, 6, 4, A, B, C, D)


# --- sampling -----------------------------------------------------------------


def random_reduced(
    field: Field, m: int, n: int, r: int, branch: Form, rng: random.Random, **kw
) -> ShortForm:
    """Random short form already in reduced shape for rank ``r``.

    ``branch`` picks ``c_k ≠ 0`` (TYPE_B) or ``c_k = 0, b_k ≠ 0`` (TYPE_B_PRIME).
    """
    k = n - r
    rnd = lambda: field.random(rng, **kw)  # noqa: E731

    def nonzero():
        while True:
            v = rnd()
            if v:
                return v

    z = field.zero
    a = [z] + [rnd() for _ in range(m - 1)]
    b = [z] * k + [rnd() for _ in range(r)]
    c = [z] * k + [rnd() for _ in range(r)]
    if branch is Form.TYPE_B:
        c[k] = nonzero()
    else:
        c[k] = z
        b[k] = nonzero()
    d = [z] + a[1 : k + 1] + [rnd() for _ in range(n - k - 1)]
    return ShortForm(field, m, n, a, b, c, d)


def random_stab(field: Field, m: int, n: int, rng: random.Random, **kw) -> StabShort:
    rnd = lambda: field.random(rng, **kw)  # noqa: E731

    def nonzero():
        while True:
            v = rnd()
            if v:
                return v

    return StabShort(
        field,
        m,
        n,
        [nonzero()] + [rnd() for _ in range(m - 1)],
        [rnd() for _ in range(n)],
        [rnd() for _ in range(n)],
        [nonzero()] + [rnd() for _ in range(n - 1)],
    )


def random_short(field: Field, m: int, n: int, rng: random.Random, **kw) -> ShortForm:
    """Uniformly random nilpotent short form (entries from ``field.random``)."""
    rnd = lambda: field.random(rng, **kw)  # noqa: E731
    z = field.zero
    return ShortForm(
        field,
        m,
        n,
        [z] + [rnd() for _ in range(m - 1)],
        [rnd() for _ in range(n)],
        [rnd() for _ in range(n)],
        [z] + [rnd() for _ in range(n - 1)],
    )


# --- pairs of matrices ------------------------------------------------------------


def _check_pair(A: DenseMatrix, B: DenseMatrix) -> tuple[int, int]:
    if A.field != B.field:
        raise PreconditionError(f"A is over {A.field} but B is over {B.field}")
    if not (A.is_square and B.is_square and A.shape == B.shape):
        raise PreconditionError(f"A {A.shape} and B {B.shape} must be square of equal order")
    if A @ B != B @ A:
        raise NotCommutingError("A and B do not commute")
    try:
        lam = jordan_type(A)
    except NotNilpotentError:
        raise PreconditionError("A is not nilpotent") from None
    if not B.is_nilpotent():
        raise PreconditionError("B is not nilpotent")
    if len(lam) != 2:
        raise UnsupportedJordanTypeError(
            f"A has Jordan type {lam}; only two Jordan blocks of distinct sizes are supported"
        )
    m, n = lam
    if m == n:
        raise UnsupportedJordanTypeError(
            f"A has Jordan type {lam}: equal block sizes are not supported (need m > n)"
        )
    return m, n


def canonicalize_pair(A: DenseMatrix, B: DenseMatrix) -> CanonResult:
    m, n = _check_pair(A, B)
    F = A.field
    J = DenseMatrix.jordan(F, [m, n])
    P = DenseMatrix.identity(F, m + n) if A == J else jordan_basis(A)
    Pinv = mat_inverse(P)
    if Pinv @ A @ P != J:
        raise VerificationError("Jordan basis does not bring A to J_m + J_n")
    sf = compress(Pinv @ B @ P, m, n)
    res = canonical_form(sf)
    res = CanonResult(
        rank=res.rank,
        form=res.form,
        input=res.input,
        canonical=res.canonical,
        witness=res.witness,
        jordanizer=P,
    )
    if res.canonical is not None:
        T = res.total_witness
        if A @ T != T @ J or B @ T != T @ expand(res.canonical):
            raise VerificationError("total witness does not conjugate (A, B) to the canonical pair")
    return res


def pairs_similar(
    A1: DenseMatrix, B1: DenseMatrix, A2: DenseMatrix, B2: DenseMatrix
) -> DenseMatrix | None:
    """``Y`` with ``Y⁻¹A₁Y = A₂`` and ``Y⁻¹B₁Y = B₂``, or None when the pairs are not similar."""
    r1 = canonicalize_pair(A1, B1)
    r2 = canonicalize_pair(A2, B2)
    for res in (r1, r2):
        if res.form is Form.DECOMPOSABLE:
            raise DecomposableError("similarity of decomposable pairs is not supported")
    if r1.input.field != r2.input.field or (r1.input.m, r1.input.n) != (r2.input.m, r2.input.n):
        return None
    if r1.canonical != r2.canonical:
        return None
    T1, T2 = r1.total_witness, r2.total_witness
    Y = T1 @ mat_inverse(T2)
    if A1 @ Y != Y @ A2 or B1 @ Y != Y @ B2:
        raise VerificationError("composed witness fails")
    return Y


