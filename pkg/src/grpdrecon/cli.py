"""Command-line front end.

Subcommands: groupoid validate|reconstruct, graph invariants|compare,
lpa eval|bridge-check.  Reports are JSON (default) or TSV; identical inputs,
flags and seeds produce byte-identical output.  Exit codes: 0 all requested
checks pass, 1 a check failed, 2 input or usage error.
"""

import argparse
import json
import sys
import time

from .groupoid import GroupoidFormatError, load_groupoid, validate
from .limits import EnumerationCapExceeded
from .lpa import (GraphCycleError, GraphFormatError, alpha_bridge_check, det_sign,
                  format_lpa, graph_predicates, load_graph, lpa_graded_component,
                  lpa_grades)
from .lpa_parser import LpaParseError, UnknownIdError, parse_lpa
from .normalisers import HypothesisViolation
from .reconstruction import PresentationError, verify_roundtrip
from .rings import ring_from_tag


def _build_parser():
    top = argparse.ArgumentParser(prog="grpd-recon",
                                  description="exact groupoid algebra toolkit")
    top.add_argument("--format", choices=("json", "tsv"), default="json")
    top.add_argument("--ring", default="z", help="coefficient ring: z | q | fp:<p>")
    top.add_argument("--cap", type=int, default=None,
                     help="enumeration cap (default from GRPD_RECON_CAP or 2^24)")
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--timings", action="store_true",
                     help="include wall-clock timings (breaks byte-determinism)")
    sub = top.add_subparsers(dest="group", required=True)

    gp = sub.add_parser("groupoid").add_subparsers(dest="command", required=True)
    v = gp.add_parser("validate")
    v.add_argument("path")
    r = gp.add_parser("reconstruct")
    r.add_argument("path")
    r.add_argument("--mode", choices=("black-box", "white-box"), default=None,
                   help="normaliser search mode (default: black-box when small)")

    gr = sub.add_parser("graph").add_subparsers(dest="command", required=True)
    inv = gr.add_parser("invariants")
    inv.add_argument("path")
    cmp_ = gr.add_parser("compare")
    cmp_.add_argument("path_a")
    cmp_.add_argument("path_b")

    lp = sub.add_parser("lpa").add_subparsers(dest="command", required=True)
    ev = lp.add_parser("eval")
    ev.add_argument("path")
    ev.add_argument("expression")
    bc = lp.add_parser("bridge-check")
    bc.add_argument("path")
    bc.add_argument("--samples", type=int, default=200)

    return top


def _emit(report, fmt):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_to_tsv(report), end="")


def _to_tsv(report, prefix=""):
    lines = []
    for key in sorted(report):
        value = report[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.append(_to_tsv(value, prefix=name + "."))
        elif isinstance(value, list):
            if all(isinstance(x, dict) for x in value):
                for i, x in enumerate(value):
                    lines.append(_to_tsv(x, prefix=f"{name}[{i}]."))
            else:
                lines.append(f"{name}\t{','.join(str(x) for x in value)}\n")
        else:
            lines.append(f"{name}\t{value}\n")
    return "".join(lines)


def _fail_usage(message):
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_groupoid_validate(args):
    g = load_groupoid(args.path)
    violations = validate(g)
    report = {
        "command": "groupoid validate",
        "input": args.path,
        "valid": not violations,
        "violations": [{"axiom": v.axiom, "witnesses": list(v.witnesses),
                        "message": v.message} for v in violations],
    }
    _emit(report, args.format)
    return 0 if not violations else 1


def cmd_reconstruct(args):
    g = load_groupoid(args.path)
    ring = ring_from_tag(args.ring)
    started = time.perf_counter()
    result = verify_roundtrip(g, ring, mode=args.mode or "auto", cap=args.cap)
    report = {"command": "groupoid reconstruct", "input": args.path,
              "ring": ring.tag, **result.to_dict()}
    if args.timings:
        report["timing_seconds"] = round(time.perf_counter() - started, 6)
    _emit(report, args.format)
    return 0 if result.ok else 1


def _invariants_block(path):
    graph = load_graph(path)
    preds = graph_predicates(graph)
    sign, det = det_sign(graph)
    return {"input": path, "vertices": len(graph.vertices),
            "edges": len(graph.edges), "predicates": preds.to_dict(),
            "det_of_I_minus_A": det, "det_sign": sign}


def cmd_graph_invariants(args):
    block = _invariants_block(args.path)
    report = {"command": "graph invariants", **block}
    _emit(report, args.format)
    return 0


def cmd_compare(args):
    a = _invariants_block(args.path_a)
    b = _invariants_block(args.path_b)

    def eligible(block):
        p = block["predicates"]
        return (p["essential"] and p["strongly_connected"] and not p["trivial"])

    obstructed = eligible(a) and eligible(b) and a["det_sign"] != b["det_sign"]
    report = {
        "command": "graph compare",
        "left": a,
        "right": b,
        "verdict": "OBSTRUCTED" if obstructed else "NO OBSTRUCTION FOUND",
        "meaning": ("no diagonal-preserving ring isomorphism of the path algebras exists"
                    if obstructed else
                    "no obstruction detected (this does not assert an isomorphism)"),
    }
    _emit(report, args.format)
    return 0


def cmd_lpa_eval(args):
    graph = load_graph(args.path)
    ring = ring_from_tag(args.ring)
    element = parse_lpa(args.expression, graph, ring)
    report = {
        "command": "lpa eval",
        "input": args.path,
        "ring": ring.tag,
        "expression": args.expression,
        "normal_form": format_lpa(element),
        "grades": {str(n): format_lpa(lpa_graded_component(element, n))
                   for n in lpa_grades(element)},
    }
    _emit(report, args.format)
    return 0


def cmd_bridge_check(args):
    graph = load_graph(args.path)
    ring = ring_from_tag(args.ring)
    result = alpha_bridge_check(graph, ring, samples=args.samples, seed=args.seed)
    report = {"command": "lpa bridge-check", "input": args.path, "ring": ring.tag,
              "seed": args.seed, **result.to_dict()}
    _emit(report, args.format)
    return 0 if result.ok else 1


_HANDLERS = {
    ("groupoid", "validate"): cmd_groupoid_validate,
    ("groupoid", "reconstruct"): cmd_reconstruct,
    ("graph", "invariants"): cmd_graph_invariants,
    ("graph", "compare"): cmd_compare,
    ("lpa", "eval"): cmd_lpa_eval,
    ("lpa", "bridge-check"): cmd_bridge_check,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    handler = _HANDLERS[(args.group, args.command)]
    try:
        return handler(args)
    except FileNotFoundError as exc:
        return _fail_usage(f"cannot read {exc.filename}")
    except (GroupoidFormatError, GraphFormatError) as exc:
        return _fail_usage(str(exc))
    except (LpaParseError, UnknownIdError) as exc:
        return _fail_usage(str(exc))
    except GraphCycleError as exc:
        return _fail_usage(str(exc))
    except ValueError as exc:
        return _fail_usage(str(exc))
    except (HypothesisViolation, PresentationError, EnumerationCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
