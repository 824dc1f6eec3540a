import pytest

from nilpairs.canon import canonical_form, template_of
from nilpairs.field import GF
from nilpairs.orbit import (
    BudgetExceededError,
    UnionFind,
    _decode_short,
    _index_of,
    certify_classification,
    compute_orbits,
    compute_partition,
    enumerate_nilc,
    enumerate_stab,
    nilc_size,
    stab_generators,
    stab_size,
    template_count,
)
from nilpairs.tacommutant import ShortForm, apply_stab, stab_compose


@pytest.mark.parametrize(
    "m,n,p,want", [(3, 2, 2, 128), (2, 1, 2, 8), (3, 1, 3, 81), (6, 4, 2, 2**16)]
)
def test_nilc_size(m, n, p, want):
    assert nilc_size(m, n, p) == want


def test_enumeration_counts():
    assert len(set(enumerate_nilc(3, 2, 2))) == 128
    assert len(set(enumerate_nilc(2, 1, 2))) == 8
    assert len(set(enumerate_nilc(3, 1, 3))) == 81
    assert len({xs.key() for xs in enumerate_stab(3, 2, 2)}) == stab_size(3, 2, 2) == 128
    assert len({xs.key() for xs in enumerate_stab(2, 1, 3)}) == stab_size(2, 1, 3) == 108


def test_enumeration_is_nilpotent_and_indexed():
    for i, sf in enumerate(enumerate_nilc(3, 2, 3)):
        assert sf.is_nilpotent()
        assert _index_of(sf, 3) == i
        assert _decode_short(3, 2, 3, i) == sf


def test_budget_errors():
    with pytest.raises(BudgetExceededError):
        list(enumerate_nilc(6, 4, 2, budget=1000))
    with pytest.raises(BudgetExceededError):
        list(enumerate_stab(3, 2, 2, budget=100))
    with pytest.raises(BudgetExceededError):
        compute_orbits(6, 4, 3)
    # the audit multiplies by |Stab|
    with pytest.raises(BudgetExceededError):
        compute_partition(3, 2, 3, budget=2000, audit=True)


def test_template_count_formula():
    assert template_count(3, 2, 2) == 18
    assert template_count(3, 1, 2) == 6
    assert template_count(2, 1, 3) == 4
    for m, n, p in [(3, 2, 2), (3, 1, 3), (4, 2, 2)]:
        hits = sum(1 for sf in enumerate_nilc(m, n, p) if template_of(sf) is not None)
        assert hits == template_count(m, n, p)


def test_union_find_minimal_root():
    uf = UnionFind(6)
    uf.union(4, 2)
    uf.union(5, 4)
    uf.union(3, 1)
    assert [uf.find(i) for i in range(6)] == [0, 1, 2, 1, 2, 2]


def _naive_orbits(m, n, p):
    """Close each orbit by brute force with the full stabilizer group."""
    stabs = list(enumerate_stab(m, n, p))
    seen: dict[ShortForm, int] = {}
    orbits = []
    for sf in enumerate_nilc(m, n, p):
        if sf in seen:
            continue
        orbit = {apply_stab(xs, sf) for xs in stabs}
        for member in orbit:
            seen[member] = len(orbits)
        orbits.append(orbit)
    return orbits


@pytest.mark.parametrize("m,n,p", [(2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 2, 2)])
def test_partition_matches_naive_closure(m, n, p):
    ids = compute_partition(m, n, p)
    forms = list(enumerate_nilc(m, n, p))
    ours = {}
    for sf, root in zip(forms, ids):
        ours.setdefault(root, set()).add(sf)
    naive = _naive_orbits(m, n, p)
    assert sorted(map(frozenset, ours.values()), key=min_key) == sorted(map(frozenset, naive), key=min_key)


def min_key(orbit):
    return min(sf.key() for sf in orbit)


def test_generators_generate():
    # closing the identity under the generators gives the whole group
    m, n, p = 3, 2, 2
    gens = stab_generators(m, n, p)
    frontier = [gens[0]]
    seen = {gens[0].key(): gens[0]}
    while frontier:
        g = frontier.pop()
        for h in gens:
            k = stab_compose(g, h)
            if k.key() not in seen:
                seen[k.key()] = k
                frontier.append(k)
    assert len(seen) == stab_size(m, n, p)


def test_regression_3_2_2():
    rep = certify_classification(3, 2, 2)
    assert rep.certified, rep.violations
    assert rep.orbit_count == 26
    assert rep.indecomposable_orbits == 18
    assert rep.decomposable_orbits == 8
    assert sum(int(k) * v for k, v in rep.orbit_sizes.items()) == 128


@pytest.mark.parametrize(
    "m,n,p,orbits,indec",
    [(2, 1, 2, 5, 3), (2, 1, 3, 7, 4), (3, 1, 2, 10, 6), (3, 1, 3, 21, 12)],
)
def test_certified_small_sizes(m, n, p, orbits, indec):
    rep = certify_classification(m, n, p)
    assert rep.certified, rep.violations
    assert (rep.orbit_count, rep.indecomposable_orbits) == (orbits, indec)
    assert rep.indecomposable_orbits == rep.template_count


def test_audit_agrees_with_generators():
    assert compute_partition(3, 2, 2, audit=True) == compute_partition(3, 2, 2)
    assert compute_partition(2, 1, 3, audit=True) == compute_partition(2, 1, 3)


def test_zero_form_is_singleton():
    ids = compute_partition(3, 2, 2)
    assert ids[0] == 0
    assert ids.count(0) == 1


def test_worker_independence():
    serial = certify_classification(3, 1, 3, workers=1)
    parallel = certify_classification(3, 1, 3, workers=3)
    assert serial.to_json() == parallel.to_json()
    assert compute_partition(3, 2, 2, workers=2) == compute_partition(3, 2, 2)


def test_canonical_form_constant_on_orbits():
    F = GF(2)
    forms = list(enumerate_nilc(3, 2, 2))
    ids = compute_partition(3, 2, 2)
    by_orbit: dict[int, set] = {}
    for sf, root in zip(forms, ids):
        by_orbit.setdefault(root, set()).add(canonical_form(sf).canonical)
    assert all(len(v) == 1 for v in by_orbit.values())
    assert forms[0].field == F


def test_report_json_is_stable():
    a = compute_orbits(2, 1, 3).to_json()
    b = compute_orbits(2, 1, 3).to_json()
    assert a == b and a.endswith("\n")
