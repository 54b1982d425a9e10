"""
The ``hda`` command line.

Exit codes: 0 success or property holds; 1 property fails, step refused,
certification inconclusive or refuted, report does not replay; 2 usage,
argument, load and parse errors; 3 a budget was exceeded.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence
import argparse
import random
import sys

import numpy as np

from ._logger import logger, set_console_level
from .compose import ComposeOptions, compose
from .config import load_settings, set_settings
from .dipath import trace_category
from .errors import (
    ArgumentError,
    CubeAbsError,
    IntegrityError,
    LoadError,
    PreconditionError,
    RefusalError,
    ResourceError,
)
from .fixtures import abstraction_by_names
from .formats import (
    load_model,
    read_property,
    read_report,
    write_hda,
    write_report,
)
from .hda import accessibility, validate_hda
from .homology import homology, homology_graph, profile_frame
from .precubical import is_weakly_regular, reachability
from .program_graph import load_program_graph
from .properties import has_property, is_trace_closed_relative, local_independence
from .reduce import (
    CertifyOptions,
    ReduceOptions,
    Verdict,
    certify,
    reduce,
)

logger.debug(f"Loading module {__name__}.")

__all__ = ["build_parser", "main", "run"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _ids(ids) -> str:
    return " ".join(str(v) for v in sorted(ids)) or "-"


def _max_len(text: str):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'auto' or an integer, got {text!r}"
        ) from None


# subcommands


def cmd_validate(args) -> int:
    A = load_model(args.input)
    report = validate_hda(A, args.max_degree)
    if report:
        print("valid")
        return EXIT_OK
    for v in report.violations:
        print(f"violation {v.identity} cube {v.cube} {v.indices}")
    return EXIT_FAIL


def cmd_info(args) -> int:
    A = load_model(args.input)
    P = A.pcs
    reach = reachability(P)
    weak, witness = is_weakly_regular(P)
    acc = accessibility(A)
    print("counts " + " ".join(str(c) for c in P.counts()))
    print(f"init {_ids(A.init)}")
    print(f"final {_ids(A.final)}")
    print(f"m0 {_ids(reach.m0)}")
    print(f"m1 {_ids(reach.m1)}")
    print(
        "weakly-regular yes" if weak else f"weakly-regular no (square {witness})"
    )
    print(f"accessible {'yes' if acc.accessible else 'no'}")
    print(f"coaccessible {'yes' if acc.coaccessible else 'no'}")
    print("letters " + (" ".join(sorted(A.letters)) or "-"))
    return EXIT_OK


def cmd_compose(args) -> int:
    pgs = [load_program_graph(path) for path in args.programs]
    options = ComposeOptions(
        shared=args.shared.split(",") if args.shared else None,
        finals=[f.split(",") for f in args.final] if args.final else None,
        max_degree=args.max_degree,
    )
    A = compose(pgs, options)
    if args.out:
        write_hda(A, args.out)
    print("counts " + " ".join(str(c) for c in A.pcs.counts()))
    return EXIT_OK


def cmd_reduce(args) -> int:
    A = load_model(args.input)
    options = ReduceOptions(
        enable_elementary=not args.no_elementary,
        enable_vertex_star=not args.no_vertex_star,
        enable_manual=args.enable_manual,
        enable_merge=not args.no_merge,
        max_steps=args.max_steps,
    )
    B, report = reduce(A, options)
    if args.out:
        write_hda(B, args.out)
    if args.report:
        write_report(report, args.report)
    print(f"steps {len(report.steps)}")
    print("counts " + " ".join(str(c) for c in report.counts_after))
    return EXIT_OK


def cmd_certify(args) -> int:
    A = load_model(args.original)
    B = load_model(args.abstraction)
    report = read_report(args.report) if args.report else None
    amap = abstraction_by_names(A, B) if args.by_names else None
    options = CertifyOptions(
        max_len=args.max_len,
        graph_mode=args.graph_mode,
        recheck=not args.no_recheck,
    )
    result = certify(A, B, report, amap, options)
    for line in result.lines():
        print(line)
    ok = result.verdict in (Verdict.CERTIFIED, Verdict.CERTIFIED_BOUNDED)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_homology(args) -> int:
    A = load_model(args.input)
    profile = homology(A.pcs, args.coeff)
    print(f"ring {profile.ring}")
    print("betti " + ",".join(str(b) for b in profile.betti))
    if args.table:
        print(profile_frame(profile).to_string(index=False))
    else:
        print(str(profile))
    return EXIT_OK


def cmd_hgraph(args) -> int:
    A = load_model(args.input)
    graph = homology_graph(A.pcs, args.mode, args.coeff)
    for line in graph.lines():
        print(line)
    return EXIT_OK


def cmd_trace(args) -> int:
    A = load_model(args.input)
    tc = trace_category(A, args.max_len, args.weight)
    print(f"objects {_ids(tc.objects)}")
    print(f"bound {tc.bound}")
    for v in tc.objects:
        for w in tc.objects:
            n = tc.size(v, w)
            if n:
                flag = "complete" if tc.complete[(v, w)] else "bounded"
                print(f"hom {v} {w} {n} {flag}")
    return EXIT_OK


def cmd_check(args) -> int:
    A = load_model(args.model)
    spec = read_property(args.property)
    L = spec.build(A.letters)
    holds, counterexample = has_property(A, L)
    if args.trace_closed:
        closed = is_trace_closed_relative(L, A)
        print(f"trace-closed {'yes' if closed else 'no'}")
    if args.independence:
        for line in local_independence(A).lines():
            print(line)
    if holds:
        print("holds")
        return EXIT_OK
    print("fails counterexample " + ";".join(counterexample or ()))
    return EXIT_FAIL


# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hda",
        description="Reduce and verify higher-dimensional automata",
    )
    parser.add_argument("--config", type=str, help="YAML settings file")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Console log level",
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="Seed for randomized helpers"
    )
    parser.add_argument("--budget-paths", type=int, help="Paths per enumeration")
    parser.add_argument("--budget-states", type=int, help="Composed states")
    parser.add_argument("--oracle-bound", type=int, help="Cells for the oracle")
    parser.add_argument("--progress", action="store_true", help="Progress bars")
    parser.add_argument(
        "--export-csv", action="store_true", help="Write CSV tables of results"
    )
    parser.add_argument("--output-dir", type=str, help="Directory for CSV exports")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Check precubical identities and labels")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-degree", type=int, default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="Cube counts and distinguished vertices")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("compose", help="Compose program graphs into an HDA")
    p.add_argument("programs", nargs="+")
    p.add_argument("--shared", type=str, help="Comma separated shared variables")
    p.add_argument(
        "--final",
        action="append",
        help="Comma separated final location tuple, repeatable",
    )
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--out", type=str)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("reduce", help="Greedy certified reduction")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", type=str)
    p.add_argument("--report", type=str)
    p.add_argument("--enable-manual", action="store_true")
    p.add_argument("--no-elementary", action="store_true")
    p.add_argument("--no-vertex-star", action="store_true")
    p.add_argument("--no-merge", action="store_true")
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify", help="Check an abstraction against its original")
    p.add_argument("--original", required=True)
    p.add_argument("--abstraction", required=True)
    p.add_argument("--report", type=str)
    p.add_argument(
        "--by-names",
        action="store_true",
        help="Declare the map by vertex names and edge label paths",
    )
    p.add_argument("--max-len", type=_max_len, default="auto")
    p.add_argument(
        "--graph-mode", choices=["auto", "search", "bruteforce"], default="auto"
    )
    p.add_argument("--no-recheck", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("homology", help="Betti numbers and torsion")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--coeff", type=str, default="z")
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("hgraph", help="Homology graph")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument(
        "--mode", choices=["auto", "search", "bruteforce"], default="search"
    )
    p.add_argument("--coeff", type=str, default="z")
    p.set_defaults(func=cmd_hgraph)

    p = sub.add_parser("trace", help="Hom-set sizes of the trace category")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-len", type=_max_len, default="auto")
    p.add_argument("--weight", choices=["edges", "letters"], default="edges")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("check", help="Check a property file on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--trace-closed", action="store_true")
    p.add_argument("--independence", action="store_true")
    p.set_defaults(func=cmd_check)

    return parser


def _configure(args) -> None:
    if args.log_level:
        set_console_level(args.log_level)
    if args.seed is not None:
        random.seed(args.seed)
        np.random.seed(args.seed)
    settings = load_settings(
        args.config,
        budget_paths=args.budget_paths,
        budget_states=args.budget_states,
        oracle_bound=args.oracle_bound,
        progress=args.progress or None,
        export_csv=args.export_csv or None,
        output_dir=args.output_dir,
    )
    set_settings(settings)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one invocation and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    func: Callable = args.func
    try:
        _configure(args)
        return func(args)
    except ResourceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (RefusalError, IntegrityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (ArgumentError, PreconditionError, LoadError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CubeAbsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
