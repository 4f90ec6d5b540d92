"""Command-line interface.

Exit codes: 0 success (or VALID / all axioms PASS), 1 negative verdict
(NO-INSTANCE, a FAIL line, or a reported violation), 2 malformed input,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import files, flow, gda, graph
from .baseline import sequential_baseline
from .bench import bench_payload, run_bench
from .generator import QUOTA_STYLES, generate_instance
from .model import matching_signature
from .solve import BACKENDS, solve
from .verify import verify_balanced_and_jef

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def cmd_solve(args: argparse.Namespace) -> int:
    instance = files.load_instance(args.instance)
    result = solve(instance, args.backend)
    payload = files.choice_result_payload(instance, result, args.backend)
    files.write_text(files.dump_json(payload), args.out)
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    instance = files.load_instance(args.instance)
    result = sequential_baseline(instance)
    payload = files.baseline_result_payload(instance, result)
    files.write_text(files.dump_json(payload), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    instance = files.load_instance(args.instance)
    targets = files.load_targets(args.targets, instance)
    witnesses = {}
    if args.cross_check or args.backend == "flow":
        witnesses["flow"] = flow.check_validity_flow(instance, targets)
    if args.cross_check or args.backend == "graph":
        witnesses["graph"] = graph.check_validity_graph(instance, targets)
    verdicts = {name: w is not None for name, w in witnesses.items()}
    if len(set(verdicts.values())) > 1:
        raise AssertionError(f"backends disagree on validity: {verdicts}")
    witness = witnesses[args.backend]
    if witness is None:
        print("NO-INSTANCE")
        return EXIT_NEGATIVE
    if args.backend == "flow":
        matching = flow.flow_to_matching(instance, witness)
    else:
        matching = witness
    print("VALID")
    print(f"signature: {list(matching_signature(instance, matching))}")
    counts = files.choice_counts_by_label(instance, matching)
    for label in sorted(counts):
        print(f"  {label}: {counts[label]}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    instance = files.load_instance(args.instance)
    selected = files.load_selected(args.result)
    report = verify_balanced_and_jef(instance, selected)
    print(f"mode: {report.mode}")
    lines = [
        ("non-wastefulness", report.non_wasteful),
        ("maximal diversity", report.maximal_diversity),
        ("balanced representation", report.balanced),
        ("justified envy-freeness", report.justified_envy_free),
    ]
    for label, verdict in lines:
        print(f"{label}: {'PASS' if verdict else 'FAIL'}")
    if report.envy_witness is not None:
        envious, envied = report.envy_witness
        print(f"justified envy: {envious} over {envied}")
    return EXIT_OK if report.all_hold() else EXIT_NEGATIVE


def cmd_gen(args: argparse.Namespace) -> int:
    instance = generate_instance(
        args.students, args.types, args.ranks, args.seed, args.quota_style
    )
    payload = files.instance_to_payload(instance)
    files.write_text(files.dump_json(payload), args.out)
    return EXIT_OK


def cmd_gda(args: argparse.Namespace) -> int:
    multi = files.load_multi(args.instance)
    if args.probe is not None:
        return _run_probe(multi, args.probe)
    result = gda.run_gda(multi)
    payload = files.gda_result_payload(result)
    files.write_text(files.dump_json(payload), args.out)
    return EXIT_OK


def _run_probe(multi: gda.MultiInstance, spec: str) -> int:
    parts = spec.split(":")
    if len(parts) != 3:
        raise files.InstanceFormatError(
            f"--probe expects SCHOOL:S1:S2, got {spec!r}"
        )
    school_id, s1, s2 = parts
    everyone = [s.id for s in multi.students]
    try:
        instance = gda.induced_instance(multi, school_id, everyone)
        base = set(everyone) - {s1, s2}
        violation = gda.substitutability_probe(instance, base, s1, s2)
    except (KeyError, ValueError) as err:
        raise files.InstanceFormatError(str(err)) from err
    if violation is None:
        print("no substitutability violation")
        return EXIT_OK
    print(f"substitutability violation at school {school_id}:")
    print(f"  without {s1}: {s2} rejected "
          f"(selected: {sorted(violation.without_s1)})")
    print(f"  with {s1}: {s2} selected "
          f"(selected: {sorted(violation.with_s1)})")
    return EXIT_NEGATIVE


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.students)
    rows = run_bench(sizes, args.types, args.ranks, args.seed, args.repeats)
    payload = bench_payload(rows)
    if args.groups is not None:
        payload["groups_expected"] = args.groups
    files.write_text(files.dump_json(payload), args.out)
    return EXIT_OK


def _parse_sizes(raw: str) -> list[int]:
    try:
        sizes = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as err:
        raise files.InstanceFormatError(f"bad --students list {raw!r}") from err
    if not sizes or any(n < 0 for n in sizes):
        raise files.InstanceFormatError(f"bad --students list {raw!r}")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reserve-match",
        description="Student selection under ranked diversity quotas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the balanced choice function")
    p_solve.add_argument("instance", help="instance file (JSON)")
    p_solve.add_argument("--backend", choices=BACKENDS, default="flow")
    p_solve.add_argument("--out", default=None, help="write result here")
    p_solve.set_defaults(func=cmd_solve)

    p_base = sub.add_parser("baseline", help="run the sequential baseline")
    p_base.add_argument("instance")
    p_base.add_argument("--out", default=None)
    p_base.set_defaults(func=cmd_baseline)

    p_val = sub.add_parser("validate", help="check a target vector")
    p_val.add_argument("instance")
    p_val.add_argument("--targets", required=True, help="targets file (JSON)")
    p_val.add_argument("--backend", choices=BACKENDS, default="flow")
    p_val.add_argument(
        "--cross-check", action="store_true", help="insist both backends agree"
    )
    p_val.set_defaults(func=cmd_validate)

    p_ver = sub.add_parser("verify", help="verify a result against the axioms")
    p_ver.add_argument("instance")
    p_ver.add_argument("result", help="result file with a selected array")
    p_ver.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--students", type=int, required=True)
    p_gen.add_argument("--types", type=int, default=2)
    p_gen.add_argument("--ranks", type=int, default=2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--quota-style", choices=QUOTA_STYLES, default="uniform")
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_gda = sub.add_parser("gda", help="multi-school deferred acceptance")
    p_gda.add_argument("instance", help="multi-school file (JSON)")
    p_gda.add_argument(
        "--probe",
        default=None,
        metavar="SCHOOL:S1:S2",
        help="probe substitutability instead of running rounds",
    )
    p_gda.add_argument("--out", default=None)
    p_gda.set_defaults(func=cmd_gda)

    p_bench = sub.add_parser("bench", help="time both backends across sizes")
    p_bench.add_argument(
        "--students", default="10000,100000", help="comma-separated sizes"
    )
    p_bench.add_argument("--groups", type=int, default=None)
    p_bench.add_argument("--types", type=int, default=3)
    p_bench.add_argument("--ranks", type=int, default=2)
    p_bench.add_argument("--seed", type=int, default=2024)
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except files.InstanceFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as err:
        print(f"internal invariant failure: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
