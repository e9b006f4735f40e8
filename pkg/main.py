"""
Command-line entry point for heavy/light Hassett space computations.

Examples:
    python main.py classify --weights 1,1,1/10,1/10,1/10
    python main.py present --weights 1,1,1/10,1/10,1/10 --json
    python main.py hilbert --weights 1,1,1,1,1
    python main.py multiply --weights 1,1,1/10,1/10,1/10 --factors 2,3 2,3
    python main.py verify --level fast

Labels always refer to the canonical form, where heavy points come first.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from hassettcore.chow import (
    GradedBasis,
    dual_graph,
    heavy_light_presentation,
    hilbert_function,
    multiply,
    split_to_label,
)
from hassettcore.common import DEFAULT_ELIMINATED_PAIR, HassettError, format_label
from hassettcore.fan import build_fan, chain_of_flats_fan
from hassettcore.keel import keel_presentation, pullback
from hassettcore.matroid import one_connected_flats, reduced_weight_graph
from hassettcore.weights import WeightInstance, canonical_form, canonical_profile, classify, parse_weights
from verify import LEVELS, VerificationSuite, build_checks, format_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_VERIFY_FAILED = 3

COMMANDS = (
    "classify", "graph", "flats", "fan", "present", "hilbert",
    "multiply", "pullback", "dualgraph", "verify", "keel",
)


def _parse_label(text: str):
    return tuple(int(x) for x in text.strip("{}[] ").split(",") if x.strip())


def _pair(text: str):
    label = _parse_label(text)
    if len(label) != 2:
        raise argparse.ArgumentTypeError(f"expected a pair like 2,3, got {text!r}")
    return label


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--weights", type=str, default=None, help="comma-separated rationals, e.g. 1,1,1/10,1/10,1/10")
    parser.add_argument("--instance", type=str, default=None, help="instance JSON file (alternative to --weights)")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    parser.add_argument("--eliminate", type=_pair, default=DEFAULT_ELIMINATED_PAIR,
                        help="pair coordinate removed from the lineality quotient (default 2,3)")
    parser.add_argument("--max-degree", type=int, default=None, help="highest degree to report")
    parser.add_argument("--factors", nargs="+", default=None, help="generator labels to multiply, e.g. 2,3 2,3,4")
    parser.add_argument("--label", type=str, default=None, help="flat label S for dualgraph")
    parser.add_argument("--split", type=str, default=None, help="one side T of a split, for dualgraph")
    parser.add_argument("--chains", action="store_true", help="fan: print the chain-of-flats subdivision")
    parser.add_argument("--n", type=int, default=None, help="number of marked points for keel")
    parser.add_argument("--level", choices=LEVELS, default="fast", help="verify: size of the exhaustive sweeps")
    parser.add_argument("--method", choices=("auto", "standard", "parallel"), default="standard",
                        help="execution strategy for verify and hilbert")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    return parser


def _load_weights(args, parser, required=True):
    if args.weights is not None:
        return parse_weights(args.weights), None
    if args.instance is not None:
        instance = WeightInstance.from_json(args.instance)
        return instance.weights, instance
    if required:
        parser.error(f"{args.command} needs --weights or --instance")
    return None, None


def _emit(args, data, lines: List[str]):
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print("\n".join(lines))


def cmd_classify(args, parser):
    w, _ = _load_weights(args, parser)
    p = classify(w)
    canonical = canonical_form(p)
    relabeling = p.relabeling()
    data = {
        "weights": w.to_text(),
        "heavy": list(p.heavy),
        "light": list(p.light),
        "m": p.m,
        "n": p.n,
        "canonical": canonical.to_text(),
        "relabeling": {str(old): new for old, new in sorted(relabeling.items())},
    }
    lines = [
        f"heavy: {' '.join(map(str, p.heavy))}",
        f"light: {' '.join(map(str, p.light))}",
        f"m={p.m} n={p.n}",
        f"canonical: {canonical.to_text()}",
        "relabeling: " + " ".join(f"{old}->{new}" for old, new in sorted(relabeling.items())),
    ]
    _emit(args, data, lines)


def _profile(args, parser):
    w, _ = _load_weights(args, parser)
    return canonical_profile(classify(w))


def cmd_graph(args, parser):
    g = reduced_weight_graph(_profile(args, parser))
    lines = [
        "vertices: " + " ".join(f"{v}({g.profile.kind(v).name.lower()})" for v in g.vertices),
        "edges: " + " ".join(f"{i}-{j}" for i, j in g.edges),
    ]
    _emit(args, g.to_dict(), lines)


def cmd_flats(args, parser):
    labels = one_connected_flats(reduced_weight_graph(_profile(args, parser)))
    lines = ["{" + ",".join(map(str, s)) + "}" for s in labels]
    _emit(args, {"flats": [list(s) for s in labels]}, lines)


def cmd_fan(args, parser):
    p = _profile(args, parser)
    fan = chain_of_flats_fan(p, args.eliminate) if args.chains else build_fan(p, args.eliminate)
    data = fan.to_dict()
    lines = ["basis: " + " ".join(f"v_{{{i},{j}}}" for i, j in fan.coordinates.basis)]
    for ray in data["rays"]:
        lines.append(f"ray {ray['flat']}: {tuple(ray['coords'])}")
    for k, cones in data["cones"].items():
        lines.append(f"{k}-cones: {len(cones)}")
        lines += [f"  {cone}" for cone in cones]
    lines.append(f"f-vector: {' '.join(map(str, data['f_vector']))}")
    _emit(args, data, lines)


def _hilbert(args, parser, pres):
    if args.max_degree is not None and args.max_degree < 0:
        parser.error(f"--max-degree must be nonnegative, got {args.max_degree}")
    h = hilbert_function(pres, method=args.method)
    if args.max_degree is not None:
        h = h[: args.max_degree + 1]
    return h


def cmd_present(args, parser):
    pres = heavy_light_presentation(_profile(args, parser), args.eliminate)
    h = _hilbert(args, parser, pres)
    lines = pres.describe() + ["hilbert: " + " ".join(map(str, h))]
    _emit(args, pres.to_dict(hilbert=h), lines)


def cmd_hilbert(args, parser):
    pres = heavy_light_presentation(_profile(args, parser), args.eliminate)
    h = _hilbert(args, parser, pres)
    _emit(args, {"hilbert": h}, [" ".join(map(str, h))])


def cmd_multiply(args, parser):
    if not args.factors:
        parser.error("multiply needs --factors")
    basis = GradedBasis(heavy_light_presentation(_profile(args, parser), args.eliminate))
    product = basis.unit()
    for factor in args.factors:
        product = multiply(product, basis.generator(_parse_label(factor)))
    data = product.to_dict()
    data["coordinates"] = [str(c) for c in product.coordinates]
    lines = [
        "basis: " + " ".join(
            "*".join(format_label(basis.presentation.generators[g]) for g in m) or "1"
            for m in basis.piece(product.degree).basis_monomials
        ),
        "coordinates: " + " ".join(str(c) for c in product.coordinates),
        "class: " + product.to_text(),
    ]
    _emit(args, data, lines)


def cmd_pullback(args, parser):
    result = pullback(_profile(args, parser))
    data = result.to_dict()
    data["crushed"] = [list(label) for label in result.missing_generators()]
    lines = [f"{format_label(s)} -> {format_label(t)}" for s, t in result.generator_map.items()]
    lines += [
        "not in the image: " + " ".join(format_label(s) for s in result.missing_generators()),
        "hilbert: " + " ".join(map(str, result.hilbert)),
        "image ranks: " + " ".join(map(str, result.image_ranks)),
        "subring ranks: " + " ".join(map(str, result.subring_ranks)),
        f"injective: {str(result.is_injective).lower()}",
    ]
    _emit(args, data, lines)


def cmd_dualgraph(args, parser):
    p = _profile(args, parser)
    if args.split is not None:
        label = split_to_label(_parse_label(args.split), p.n)
    elif args.label is not None:
        label = _parse_label(args.label)
    else:
        parser.error("dualgraph needs --label or --split")
    graph = dual_graph(p, label)
    _emit(args, graph.to_dict(), [graph.to_text(), f"stable: {str(graph.is_stable).lower()}"])


def cmd_keel(args, parser):
    if args.n is None:
        parser.error("keel needs --n")
    pres = keel_presentation(args.n)
    h = _hilbert(args, parser, pres)
    _emit(args, pres.to_dict(hilbert=h), pres.describe() + ["hilbert: " + " ".join(map(str, h))])


def cmd_verify(args, parser) -> int:
    w, instance = _load_weights(args, parser, required=False)
    profile = canonical_profile(classify(w)) if w is not None else None
    checks = build_checks(profile=profile, level=args.level, instance=instance)
    results = VerificationSuite(checks, show_progress=not args.json).run(method=args.method)
    data = {
        "level": args.level,
        "results": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results],
        "passed": all(r.passed for r in results),
    }
    _emit(args, data, format_report(results))
    return EXIT_OK if data["passed"] else EXIT_VERIFY_FAILED


HANDLERS = {
    "classify": cmd_classify,
    "graph": cmd_graph,
    "flats": cmd_flats,
    "fan": cmd_fan,
    "present": cmd_present,
    "hilbert": cmd_hilbert,
    "multiply": cmd_multiply,
    "pullback": cmd_pullback,
    "dualgraph": cmd_dualgraph,
    "verify": cmd_verify,
    "keel": cmd_keel,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        int: 0 on success, 1 on invalid input, 2 on usage errors, 3 when
        verification fails
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        code = HANDLERS[args.command](args, parser)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    except (HassettError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    return code if code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
