"""Exhaustive orbit enumeration over GF(p): the ground truth for the classification.

All nilpotent short forms for ``J_m ⊕ J_n`` are indexed in lexicographic
order, partitioned into stabilizer orbits by union-find, and every orbit is
checked against the canonical-form machinery in :mod:`nilpairs.canon`.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator

from .canon import Form, canonical_form, canonical_rank, template_of
from .exactmat import mat_inverse
from .field import PrimeField
from .tacommutant import ShortForm, StabShort, stab_expand

DEFAULT_BUDGET = 2**24


class BudgetExceededError(RuntimeError):
    pass


def nilc_size(m: int, n: int, p: int) -> int:
    return p ** (m + 3 * n - 2)


def stab_size(m: int, n: int, p: int) -> int:
    return (p - 1) ** 2 * p ** (m + 3 * n - 2)


def template_count(m: int, n: int, p: int) -> int:
    """Number of canonical templates: Σ_r (p^(m+r-2) + p^(m+r-3)).

    TypeB at rank r has free a_1..a_{m-r-1}, b_{n-r}..b_{n-1}, d_{n-r+1}..d_{n-1};
    TypeBPrime swaps the r free b's for r-1 free c's.
    """
    return sum(p ** (m + r - 2) + p ** (m + r - 3) for r in range(1, n + 1))


def _check_budget(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetExceededError(f"{what}: {count} exceeds budget {budget}")


def enumerate_nilc(m: int, n: int, p: int, budget: int = DEFAULT_BUDGET) -> Iterator[ShortForm]:
    """All nilpotent short forms in lexicographic order of ``a + b + c + d``."""
    _check_budget(nilc_size(m, n, p), budget, f"NilC(J_{m}+J_{n}) over GF({p})")
    F = PrimeField(p)
    for coords in itertools.product(range(p), repeat=m + 3 * n - 2):
        a = (0,) + coords[: m - 1]
        b = coords[m - 1 : m - 1 + n]
        c = coords[m - 1 + n : m - 1 + 2 * n]
        d = (0,) + coords[m - 1 + 2 * n :]
        yield ShortForm(F, m, n, a, b, c, d)


def enumerate_stab(m: int, n: int, p: int, budget: int = DEFAULT_BUDGET) -> Iterator[StabShort]:
    _check_budget(stab_size(m, n, p), budget, f"Stab(J_{m}+J_{n}) over GF({p})")
    F = PrimeField(p)
    units = range(1, p)
    for x0, w0 in itertools.product(units, units):
        for coords in itertools.product(range(p), repeat=m + 3 * n - 2):
            x = (x0,) + coords[: m - 1]
            y = coords[m - 1 : m - 1 + n]
            z = coords[m - 1 + n : m - 1 + 2 * n]
            w = (w0,) + coords[m - 1 + 2 * n :]
            yield StabShort(F, m, n, x, y, z, w)


def _primitive_root(p: int) -> int:
    for g in range(1, p):
        if len({pow(g, k, p) for k in range(1, p)}) == p - 1:
            return g
    raise ValueError(p)  # pragma: no cover


def stab_generators(m: int, n: int, p: int) -> list[StabShort]:
    """Scalings of x_0 and w_0 by a primitive root plus ``I + E`` for every other coordinate."""
    F = PrimeField(p)
    ident = StabShort.identity(F, m, n)
    gens = []
    g = _primitive_root(p)
    if g != 1:
        gens.append(StabShort(F, m, n, (g,) + ident.x[1:], ident.y, ident.z, ident.w))
        gens.append(StabShort(F, m, n, ident.x, ident.y, ident.z, (g,) + ident.w[1:]))
    for row, length, start in (("x", m, 1), ("y", n, 0), ("z", n, 0), ("w", n, 1)):
        for i in range(start, length):
            kw = {r: list(getattr(ident, r)) for r in "xyzw"}
            kw[row][i] = (kw[row][i] + 1) % p
            gens.append(StabShort(F, m, n, **kw))
    return gens


# --- fast index <-> conjugation machinery (integers mod p) -------------------------


class _Conjugator:
    """Conjugates index-encoded short forms by a fixed list of stabilizers."""

    def __init__(self, m: int, n: int, p: int, stabs: list[StabShort]):
        self.m, self.n, self.p = m, n, p
        self.N = m + n
        self.mats = []
        for xs in stabs:
            X = stab_expand(xs)
            Xi = mat_inverse(X)
            # only rows 0 and m of X⁻¹ B X are needed to read off the short form
            self.mats.append(((Xi.row(0), Xi.row(m)), X.tolist()))

    def decode(self, idx: int) -> list[list[int]]:
        m, n, p = self.m, self.n, self.p
        L = m + 3 * n - 2
        coords = [0] * L
        for pos in range(L - 1, -1, -1):
            idx, coords[pos] = divmod(idx, p)
        a = [0] + coords[: m - 1]
        b = coords[m - 1 : m - 1 + n]
        c = coords[m - 1 + n : m - 1 + 2 * n]
        d = [0] + coords[m - 1 + 2 * n :]
        return _expand_int(m, n, a, b, c, d)

    def encode(self, row0: list[int], rowm: list[int]) -> int:
        m, n, p = self.m, self.n, self.p
        coords = row0[1:m] + row0[m:] + rowm[m - n : m] + rowm[m + 1 :]
        idx = 0
        for v in coords:
            idx = idx * p + v
        return idx

    def images(self, idx: int) -> list[int]:
        p, N, m = self.p, self.N, self.m
        B = self.decode(idx)
        out = []
        for (r0, rm), X in self.mats:
            res = []
            for r in (r0, rm):
                # (r · B) · X
                v = [0] * N
                for k, coef in enumerate(r):
                    if coef:
                        Bk = B[k]
                        for j in range(N):
                            if Bk[j]:
                                v[j] += coef * Bk[j]
                u = [0] * N
                for k in range(N):
                    vk = v[k] % p
                    if vk:
                        Xk = X[k]
                        for j in range(N):
                            if Xk[j]:
                                u[j] += vk * Xk[j]
                res.append([x % p for x in u])
            out.append(self.encode(res[0], res[1]))
        return out


def _expand_int(m, n, a, b, c, d):
    s, N = m - n, m + n
    out = [[0] * N for _ in range(N)]
    for i in range(m):
        for j in range(i, m):
            out[i][j] = a[j - i]
        for j in range(i, n):
            out[i][m + j] = b[j - i]
    for i in range(n):
        for j in range(s + i, m):
            out[m + i][j] = c[j - i - s]
        for j in range(i, n):
            out[m + i][m + j] = d[j - i]
    return out


def _images_chunk(args) -> list[list[int]]:
    m, n, p, audit, lo, hi = args
    stabs = list(enumerate_stab(m, n, p, budget=10**18)) if audit else stab_generators(m, n, p)
    conj = _Conjugator(m, n, p, stabs)
    return [conj.images(i) for i in range(lo, hi)]


def _member_chunk(args) -> list[tuple]:
    """(rank, template, canonical key, has b=c=0) for each index in the chunk."""
    m, n, p, lo, hi = args
    F = PrimeField(p)
    L = m + 3 * n - 2
    out = []
    for idx in range(lo, hi):
        coords = [0] * L
        t = idx
        for pos in range(L - 1, -1, -1):
            t, coords[pos] = divmod(t, p)
        sf = ShortForm(
            F, m, n,
            [0] + coords[: m - 1],
            coords[m - 1 : m - 1 + n],
            coords[m - 1 + n : m - 1 + 2 * n],
            [0] + coords[m - 1 + 2 * n :],
        )
        r = canonical_rank(sf)
        tmpl = template_of(sf)
        res = canonical_form(sf)
        ckey = None if res.canonical is None else _index_of(res.canonical, p)
        zero_bc = not any(sf.b) and not any(sf.c)
        out.append((r, None if tmpl is None else (tmpl[0].value, tmpl[1]), ckey, zero_bc))
    return out


def _index_of(sf: ShortForm, p: int) -> int:
    idx = 0
    for v in sf.a[1:] + sf.b + sf.c + sf.d[1:]:
        idx = idx * p + int(v)
    return idx


def _decode_short(m: int, n: int, p: int, idx: int) -> ShortForm:
    L = m + 3 * n - 2
    coords = [0] * L
    for pos in range(L - 1, -1, -1):
        idx, coords[pos] = divmod(idx, p)
    return ShortForm(
        PrimeField(p), m, n,
        [0] + coords[: m - 1],
        coords[m - 1 : m - 1 + n],
        coords[m - 1 + n : m - 1 + 2 * n],
        [0] + coords[m - 1 + 2 * n :],
    )


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, -(-total // max(1, workers * 4)))
    return [(lo, min(total, lo + size)) for lo in range(0, total, size)]


def _run(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


class UnionFind:
    """Union-find whose representatives are always the minimal element."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            lo, hi = (rx, ry) if rx < ry else (ry, rx)
            self.parent[hi] = lo


@dataclass
class OrbitReport:
    m: int
    n: int
    p: int
    mode: str
    total_nilc: int
    stab_order: int
    orbit_count: int = 0
    indecomposable_orbits: int = 0
    decomposable_orbits: int = 0
    template_count: int = 0
    template_members: int = 0
    orbit_sizes: dict[str, int] = field(default_factory=dict)
    canonical_hits: dict[str, list[str]] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def compute_partition(
    m: int, n: int, p: int, *, budget: int = DEFAULT_BUDGET, workers: int = 1, audit: bool = False
) -> list[int]:
    """Orbit id (minimal member index) of every nilpotent short form, by index."""
    total = nilc_size(m, n, p)
    _check_budget(total, budget, f"NilC(J_{m}+J_{n}) over GF({p})")
    if audit:
        _check_budget(total * stab_size(m, n, p), budget * 64, "full-group audit")
    PrimeField(p)
    tasks = [(m, n, p, audit, lo, hi) for lo, hi in _chunks(total, workers)]
    uf = UnionFind(total)
    idx = 0
    for chunk in _run(_images_chunk, tasks, workers):
        for imgs in chunk:
            for j in imgs:
                uf.union(idx, j)
            idx += 1
    return [uf.find(i) for i in range(total)]


def compute_orbits(
    m: int, n: int, p: int, *, budget: int = DEFAULT_BUDGET, workers: int = 1, audit: bool = False
) -> OrbitReport:
    report, _ = _orbits(m, n, p, budget=budget, workers=workers, audit=audit, certify=False)
    return report


def certify_classification(
    m: int, n: int, p: int, *, budget: int = DEFAULT_BUDGET, workers: int = 1, audit: bool = False
) -> OrbitReport:
    return _orbits(m, n, p, budget=budget, workers=workers, audit=audit, certify=True)[0]


def _orbits(m, n, p, *, budget, workers, audit, certify):
    ids = compute_partition(m, n, p, budget=budget, workers=workers, audit=audit)
    total = len(ids)
    order = stab_size(m, n, p)
    members: dict[int, list[int]] = defaultdict(list)
    for i, root in enumerate(ids):
        members[root].append(i)
    report = OrbitReport(
        m=m, n=n, p=p,
        mode="full-group" if audit else "generators",
        total_nilc=total,
        stab_order=order,
        orbit_count=len(members),
        template_count=template_count(m, n, p),
    )
    fmt = lambda i: str(_decode_short(m, n, p, i))  # noqa: E731
    sizes: dict[int, int] = defaultdict(int)
    for root, mem in members.items():
        sizes[len(mem)] += 1
        if order % len(mem):
            report.violations.append(f"orbit {fmt(root)} has size {len(mem)} not dividing |Stab| = {order}")
    report.orbit_sizes = {str(k): v for k, v in sorted(sizes.items())}

    tasks = [(m, n, p, lo, hi) for lo, hi in _chunks(total, workers)]
    info = [row for chunk in _run(_member_chunk, tasks, workers) for row in chunk]
    report.template_members = sum(1 for row in info if row[1] is not None)

    for root in sorted(members):
        mem = members[root]
        ranks = {info[i][0] for i in mem}
        has_zero_bc = any(info[i][3] for i in mem)
        hits = [i for i in mem if info[i][1] is not None]
        name = fmt(root)
        if len(ranks) != 1:
            report.violations.append(f"orbit {name}: canonical rank not constant {sorted(ranks)}")
        if has_zero_bc != (ranks == {0}):
            report.violations.append(
                f"orbit {name}: ranks {sorted(ranks)} but b=c=0 member present={has_zero_bc}"
            )
        if ranks == {0} and has_zero_bc:
            report.decomposable_orbits += 1
            if hits:
                report.violations.append(f"decomposable orbit {name} contains template members")
            continue
        report.indecomposable_orbits += 1
        report.canonical_hits[name] = [fmt(i) for i in hits]
        if len(hits) != 1:
            report.violations.append(f"orbit {name}: {len(hits)} canonical template members")
            continue
        if not certify:
            continue
        (rank,) = ranks if len(ranks) == 1 else (None,)
        if info[hits[0]][1][1] != rank:
            report.violations.append(f"orbit {name}: template rank differs from orbit rank {rank}")
        wrong = [i for i in mem if info[i][2] != hits[0]]
        if wrong:
            report.violations.append(
                f"orbit {name}: canonical_form sends {fmt(wrong[0])} away from {fmt(hits[0])}"
                f" ({len(wrong)} members)"
            )
    if report.template_members != report.template_count:
        report.violations.append(
            f"{report.template_members} template members enumerated, formula gives {report.template_count}"
        )
    return report, ids
