"""Command line front end.

Exit codes: 0 success, 1 verification found violations/disagreements,
2 malformed input or arguments, 3 precondition violated, 4 internal
verification failure, 5 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any

from . import canon, orbit
from .canon import Form, PreconditionError, VerificationError
from .exactmat import DenseMatrix, ShapeError
from .field import Field, FieldError, Q, GF, parse_field
from .tacommutant import expand

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_MALFORMED = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4
EXIT_BUDGET = 5


class MalformedInputError(ValueError):
    pass


def _matrix_from_json(field: Field, rows: Any, name: str) -> DenseMatrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInputError(f"{name} must be an array of arrays")
    for r in rows:
        for x in r:
            if not isinstance(x, (str, int)) or isinstance(x, bool):
                raise MalformedInputError(f"{name}: entries must be strings, got {x!r}")
    try:
        M = DenseMatrix(field, [[str(x) for x in r] for r in rows])
    except (FieldError, ShapeError) as exc:
        raise MalformedInputError(f"{name}: {exc}") from None
    if not M.is_square or M.rows == 0:
        raise MalformedInputError(f"{name} must be a non-empty square matrix, got {M.shape}")
    return M


def load_pair(path: str | Path) -> tuple[Field, DenseMatrix, DenseMatrix]:
    """Read a pair file: ``{"field": "Q" | "GF(p)", "A": [[...]], "B": [[...]]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or not {"field", "A", "B"} <= data.keys():
        raise MalformedInputError(f"{path}: expected keys 'field', 'A', 'B'")
    try:
        field = parse_field(str(data["field"]))
    except FieldError as exc:
        raise MalformedInputError(str(exc)) from None
    A = _matrix_from_json(field, data["A"], "A")
    B = _matrix_from_json(field, data["B"], "B")
    if A.shape != B.shape:
        raise MalformedInputError(f"A is {A.shape} but B is {B.shape}")
    return field, A, B


def result_to_json(res: canon.CanonResult) -> dict[str, Any]:
    sf = res.input
    F = sf.field
    out: dict[str, Any] = {
        "field": repr(F),
        "m": sf.m,
        "n": sf.n,
        "rank": res.rank,
        "form": res.form.value,
        "input_short_form": sf.to_strings(),
        "canonical": None,
        "canonical_A": None,
        "canonical_B": None,
        "witness": None,
        "stabilizer_witness": None,
        "jordanizer": res.jordanizer.to_strings() if res.jordanizer is not None else None,
    }
    if res.canonical is not None:
        out["canonical"] = res.canonical.to_strings()
        out["canonical_A"] = DenseMatrix.jordan(F, [sf.m, sf.n]).to_strings()
        out["canonical_B"] = expand(res.canonical).to_strings()
        out["witness"] = res.total_witness.to_strings()
        out["stabilizer_witness"] = res.witness.to_strings()
    return out


def _dump(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_canon(pair_path: str, out_path: str | None = None) -> int:
    try:
        _, A, B = load_pair(pair_path)
        res = canon.canonicalize_pair(A, B)
    except MalformedInputError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except VerificationError as exc:
        print(f"error: internal verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(_dump(result_to_json(res)), out_path)
    return EXIT_OK


def cmd_similar(pair1_path: str, pair2_path: str) -> int:
    try:
        f1, A1, B1 = load_pair(pair1_path)
        f2, A2, B2 = load_pair(pair2_path)
        if f1 != f2:
            raise MalformedInputError(f"pairs are over different fields ({f1} vs {f2})")
        if A1.shape != A2.shape:
            print("NOT-SIMILAR")
            return EXIT_OK
        Y = canon.pairs_similar(A1, B1, A2, B2)
    except MalformedInputError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except VerificationError as exc:
        print(f"error: internal verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if Y is None:
        print("NOT-SIMILAR")
    else:
        print("SIMILAR")
        print(json.dumps({"field": repr(f1), "witness": Y.to_strings()}, sort_keys=True))
    return EXIT_OK


def cmd_certify(
    m: int,
    n: int,
    p: int,
    budget: int = orbit.DEFAULT_BUDGET,
    workers: int = 1,
    audit: bool = False,
    out_path: str | None = None,
) -> int:
    try:
        GF(p)
    except FieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    if not m > n >= 1 or budget < 1 or workers < 1:
        print(f"error: need m > n >= 1, budget >= 1, workers >= 1 (got m={m}, n={n})", file=sys.stderr)
        return EXIT_MALFORMED
    count = orbit.nilc_size(m, n, p)
    print(
        f"NilC size {p}^({m}+3*{n}-2) = {count}; |Stab| = {orbit.stab_size(m, n, p)}; budget {budget}",
        file=sys.stderr,
    )
    try:
        report = orbit.certify_classification(m, n, p, budget=budget, workers=workers, audit=audit)
    except orbit.BudgetExceededError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except VerificationError as exc:
        print(f"error: internal verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(report.to_json(), out_path)
    status = "certified" if report.certified else f"{len(report.violations)} violations"
    print(
        f"(m,n,p)=({m},{n},{p}): {report.orbit_count} orbits, "
        f"{report.indecomposable_orbits} indecomposable; {status}",
        file=sys.stderr,
    )
    return EXIT_OK if report.certified else EXIT_FAIL


SELFTEST_FIELDS: tuple[Field, ...] = (Q, GF(7))


def selftest_report(samples: int, seed: int) -> tuple[list[str], list[str]]:
    """Returns (report lines, counterexample descriptions)."""
    lines: list[str] = []
    failures: list[str] = []
    total = 0
    for F in SELFTEST_FIELDS:
        for r in (1, 2, 3, 4):
            for branch in (Form.TYPE_B, Form.TYPE_B_PRIME):
                rng = random.Random(f"{seed}:{F!r}:{r}:{branch.value}")
                bad = 0
                for _ in range(samples):
                    sf = canon.random_reduced(F, 6, 4, r, branch, rng, den_bound=3)
                    try:
                        res = canon.canonical_form(sf)
                        want = canon.appendix_oracle_m6n4(sf)
                        ok = res.form is branch and res.canonical == want
                    except VerificationError as exc:
                        ok, want = False, exc
                    if not ok:
                        bad += 1
                        failures.append(f"{F!r} r={r} {branch.value}: input {sf}, oracle {want}")
                total += samples
                lines.append(f"{F!r} r={r} {branch.value}: {samples} checked, {bad} disagreements")
    lines.append(f"selftest: {total} checked, {len(failures)} disagreements")
    return lines, failures


def cmd_selftest(samples: int = 1000, seed: int = 42, out_path: str | None = None) -> int:
    if samples < 0:
        print("error: samples must be >= 0", file=sys.stderr)
        return EXIT_MALFORMED
    lines, failures = selftest_report(samples, seed)
    text = "\n".join(lines) + "\n"
    if failures:
        text += "".join(f"counterexample: {f}\n" for f in failures)
    _emit(text, out_path)
    return EXIT_FAIL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilpairs",
        description="Canonical forms for commuting nilpotent pairs (J_m + J_n, B), m > n.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canon", help="canonicalize a pair file")
    p.add_argument("--pair", required=True)
    p.add_argument("--out")

    p = sub.add_parser("similar", help="decide simultaneous similarity of two pairs")
    p.add_argument("--pair1", required=True)
    p.add_argument("--pair2", required=True)

    p = sub.add_parser("certify", help="exhaustive orbit certification over GF(p)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--budget", type=int, default=orbit.DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--audit", action="store_true", help="close orbits under the full stabilizer group")
    p.add_argument("--out")

    p = sub.add_parser("selftest", help="compare against the m=6, n=4 closed forms")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    if args.command == "canon":
        return cmd_canon(args.pair, args.out)
    if args.command == "similar":
        return cmd_similar(args.pair1, args.pair2)
    if args.command == "certify":
        return cmd_certify(args.m, args.n, args.p, args.budget, args.workers, args.audit, args.out)
    return cmd_selftest(args.samples, args.seed, args.out)


if __name__ == "__main__":
    sys.exit(main())
