"""Command-line interface: ``parametrix VERB SOURCE [options]``.

SOURCE is either a path to an ``.lps`` file or ``gallery:NAME``.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import report
from .analysis import compatibility_conditions, parametrize, torsion_free_test
from .diffop import OperatorMatrix, adjoint
from .dsl import lower_to_operator, parse_system
from .errors import ParametrixError
from .gallery import gallery_build, gallery_listing
from .janet import default_degree_cap, involutive_completion
from .poly import MonomialOrder

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TORSION = 2


def _param(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name.strip() or not value.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=RATIONAL, got {text!r}")
    return name.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a report-v1 JSON document")
    common.add_argument("--order", choices=["degrevlex", "deglex", "lex"], default="degrevlex")
    common.add_argument("--degree-cap", type=int, default=None, help="involutive completion order cap")
    common.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=RATIONAL")
    common.add_argument("--n", type=int, default=None, help="dimension for gallery entries")
    common.add_argument("--seed", type=int, default=0, help="seed for random coordinate changes")

    parser = argparse.ArgumentParser(prog="parametrix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for verb, text in (
        ("test", "run the five-step torsion-free test"),
        ("adjoint", "formal adjoint of the operator"),
        ("cc", "compatibility conditions (left syzygies)"),
        ("parametrize", "candidate parametrization from the adjoint chain"),
        ("involution", "involutive completion with classes and multiplicative variables"),
    ):
        p = sub.add_parser(verb, parents=[common], help=text)
        p.add_argument("source", help="path to an .lps file or gallery:NAME")
    g = sub.add_parser("gallery", parents=[common], help="list the built-in systems")
    g.add_argument("--filter", choices=["torsion", "torsion-free"], default=None)
    return parser


def load_source(source: str, params: dict, n=None) -> OperatorMatrix:
    if source.startswith("gallery:"):
        return gallery_build(source[len("gallery:"):], n, params).operator
    with open(source, encoding="utf-8") as fh:
        src = parse_system(fh.read())
    return lower_to_operator(src, params)


def _gallery_doc(args, order) -> dict:
    doc = report.new_document("gallery", "gallery", order)
    entries = gallery_listing()
    if args.filter is not None:
        want = args.filter == "torsion-free"
        filtered = []
        for e in entries:
            rows = [v for v in e["expected"] if v["torsion_free"] is want]
            if rows:
                filtered.append(dict(e, expected=rows))
        entries = filtered
    doc["gallery"] = entries
    doc["counts"] = {"entries": len(entries)}
    return doc


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors must not collide with the torsion status
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    order = MonomialOrder(args.order)
    try:
        if args.command == "gallery":
            doc = _gallery_doc(args, order)
            status = EXIT_OK
        else:
            A = load_source(args.source, dict(args.param), args.n)
            doc, status = _dispatch(args, A, order)
    except ParametrixError as exc:
        err.write(f"error [{exc.code}]: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        err.write(f"error [E600]: {exc}\n")
        return EXIT_ERROR
    out.write(report.dumps(doc) + "\n" if args.json else report.render_text(doc))
    return status


def _dispatch(args, A: OperatorMatrix, order: MonomialOrder):
    src = args.source
    if args.command == "test":
        r = torsion_free_test(A, order)
        return report.five_step_document(r, src, order), (EXIT_OK if r.torsion_free else EXIT_TORSION)
    doc = report.new_document(args.command, src, order)
    t0 = time.perf_counter()
    if args.command == "adjoint":
        ad = adjoint(A)
        doc["operators"] = {"input": report.operator_doc(A, order), "adjoint": report.operator_doc(ad, order)}
        doc["counts"] = {"self_adjoint": ad.same_entries(A)}
    elif args.command == "cc":
        C = compatibility_conditions(A, order)
        doc["operators"] = {"input": report.operator_doc(A, order), "cc": report.operator_doc(C, order)}
        doc["counts"] = {"cc_rows": C.nrows, "cc_order": C.order}
    elif args.command == "parametrize":
        P = parametrize(A, order)
        doc["operators"] = {
            "input": report.operator_doc(A, order),
            "parametrization": report.operator_doc(P.operator, order),
        }
        doc["parametrization"] = report.parametrization_doc(P, order)
        doc["counts"] = {"potentials": P.count, "order": P.order}
    elif args.command == "involution":
        cap = args.degree_cap if args.degree_cap is not None else default_degree_cap()
        S = involutive_completion(A, degree_cap=cap, seed=args.seed)
        doc = report.involution_document(S, src, order)
    doc["timing"] = {args.command: round(time.perf_counter() - t0, 6)}
    return doc, EXIT_OK


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
