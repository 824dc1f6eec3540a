"""Acceptance gate: one test per criterion, summarized as PASS/FAIL lines.

The summary is printed in the ``acceptance criteria`` section of the pytest
terminal report.
"""

import itertools
import random

import pytest

from nilpairs.canon import Form, appendix_oracle_m6n4, canonical_form, canonicalize_pair, random_reduced, random_short
from nilpairs.cli import cmd_certify, cmd_selftest
from nilpairs.exactmat import DenseMatrix, conjugate, mat_rank
from nilpairs.field import GF, Q
from nilpairs.orbit import certify_classification, enumerate_nilc, template_count
from nilpairs.tacommutant import ShortForm, _expand_rows, compress, expand

from conftest import random_invertible

SAMPLES = 1000
FIELDS = (Q, GF(7))
BRANCHES = (Form.TYPE_B, Form.TYPE_B_PRIME)
CERTIFIED = [(2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 1, 3), (3, 2, 2)]


@pytest.fixture(scope="module")
def closed_form_runs():
    """Criterion 1 sample: (input, CanonResult, oracle output) triples."""
    runs = []
    for F in FIELDS:
        for r in (1, 2, 3, 4):
            for branch in BRANCHES:
                rng = random.Random(f"acceptance:{F!r}:{r}:{branch.value}")
                for _ in range(SAMPLES):
                    sf = random_reduced(F, 6, 4, r, branch, rng, den_bound=3)
                    runs.append((sf, branch, canonical_form(sf), appendix_oracle_m6n4(sf)))
    return runs


@pytest.mark.criterion(1, "closed-form agreement at m=6, n=4 (16000 forms, exact)")
def test_c1_closed_form_agreement(closed_form_runs):
    assert len(closed_form_runs) == 16 * SAMPLES
    bad = [(sf, res.canonical, want) for sf, branch, res, want in closed_form_runs
           if res.form is not branch or res.canonical != want]
    assert not bad, bad[:3]


@pytest.mark.criterion(2, "witness conjugates input to canonical and commutes with J6+J4")
def test_c2_witness_soundness(closed_form_runs):
    for F in FIELDS:
        J = DenseMatrix.jordan(F, [6, 4])
        for sf, _, res, _ in closed_form_runs:
            if sf.field != F:
                continue
            X = res.total_witness
            assert expand(sf) @ X == X @ expand(res.canonical)
            assert J @ X == X @ J
            assert mat_rank(X) == 10


@pytest.mark.criterion(3, "exhaustive orbit certification at the five small sizes")
def test_c3_exhaustive_certification():
    for m, n, p in CERTIFIED:
        rep = certify_classification(m, n, p)
        assert rep.certified, ((m, n, p), rep.violations[:5])
        assert rep.indecomposable_orbits == rep.template_members == template_count(m, n, p)


@pytest.mark.criterion(4, "stabilizer invertible iff x0 != 0 and w0 != 0 (exhaustive)")
def test_c4_invertibility():
    for p in (2, 3):
        F = GF(p)
        for m, n in [(2, 1), (3, 1), (3, 2)]:
            for coords in itertools.product(range(p), repeat=m + 3 * n):
                x, y = coords[:m], coords[m : m + n]
                z, w = coords[m + n : m + 2 * n], coords[m + 2 * n :]
                M = _expand_rows(F, m, n, x, y, z, w)
                assert (mat_rank(M) == m + n) == (x[0] != 0 and w[0] != 0)


@pytest.mark.criterion(5, "compress/expand round trips, commutation, nilpotency")
def test_c5_round_trips():
    rng = random.Random("acceptance:round-trip")
    sizes = [(2, 1), (3, 1), (3, 2), (6, 4)]
    fields = (Q, GF(2), GF(3), GF(7))
    done = 0
    for i in range(10**4):
        m, n = sizes[i % len(sizes)]
        F = fields[(i // len(sizes)) % len(fields)]
        sf = random_short(F, m, n, rng)
        sf = sf.replace(a=[F.random(rng)] + list(sf.a[1:]), d=[F.random(rng)] + list(sf.d[1:]))
        B = expand(sf)
        assert compress(B, m, n) == sf
        J = DenseMatrix.jordan(F, [m, n])
        assert J @ B == B @ J
        done += 1
    assert done == 10**4
    F = GF(2)
    for coords in itertools.product(range(2), repeat=3 + 3 * 2):
        sf = ShortForm(F, 3, 2, coords[:3], coords[3:5], coords[5:7], coords[7:])
        assert expand(sf).is_nilpotent() == (not sf.a[0] and not sf.d[0])


@pytest.mark.criterion(6, "canonical form unchanged by 200 random conjugations over GF(7)")
def test_c6_conjugation_invariance():
    F = GF(7)
    rng = random.Random("acceptance:conjugation")
    J = DenseMatrix.jordan(F, [6, 4])
    for i in range(200):
        if i % 4 == 0:
            sf = random_short(F, 6, 4, rng)
        else:
            sf = random_reduced(F, 6, 4, 1 + i % 4, BRANCHES[i % 2], rng)
        B = expand(sf)
        base = canonicalize_pair(J, B)
        X = random_invertible(F, 10, rng)
        res = canonicalize_pair(conjugate(X, J), conjugate(X, B))
        assert (res.form, res.rank, res.canonical) == (base.form, base.rank, base.canonical)


@pytest.mark.criterion(7, "indecomposable orbit count equals template count at (3,2,2), (3,1,2)")
def test_c7_orbit_count():
    for (m, n, p), want in [((3, 2, 2), 18), ((3, 1, 2), 6)]:
        rep = certify_classification(m, n, p)
        formula = sum(p ** (m + r - 2) + p ** (m + r - 3) for r in range(1, n + 1))
        assert formula == template_count(m, n, p) == want
        assert rep.indecomposable_orbits == formula


@pytest.mark.criterion(8, "selftest and certify reports are byte-identical across runs and workers")
def test_c8_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"selftest{k}.txt"
        assert cmd_selftest(samples=50, seed=42, out_path=str(path)) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    reports = []
    for workers in (1, 1, 2, 4):
        path = tmp_path / f"certify{len(reports)}.json"
        assert cmd_certify(3, 2, 2, workers=workers, out_path=str(path)) == 0
        reports.append(path.read_bytes())
    assert len(set(reports)) == 1
