"""``otree`` command line.

Inputs are concrete terms (``'a cat fg('b)``), equation systems
(``let x = ...; root x;``) or JSON documents (forests, schemes,
structures); the kind is detected from the text.  Payloads go to stdout,
diagnostics to stderr.  Exit status: 0 success, 1 domain error, 2 usage.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys

from .arrangement import ArrangementError
from .mso import MSOError, RelStructure, encode_S, encode_term, eval_mso
from .oforest import OForest, OForestError
from .schemes import (
    DescriptionScheme, SchemeError, extract_scheme, extract_scheme_regular, find_labelling,
    labelling_failures, scheme_equiv, unfold_scheme,
)
from .structuring import (
    SOAForest, StructuringError, build_structuring, cuts, def_nodes, tail_nodes, u_plus,
)
from .terms import (
    SOA_SIGNATURE, EquationSystem, Term, TermError, TermSyntaxError, parse_system, parse_term, print_system,
    print_term,
)
from .values import approx_val, soa_iso, val_algebraic, val_direct

DOMAIN_ERRORS = (TermError, OForestError, StructuringError, SchemeError, MSOError, ArrangementError)


class UsageError(Exception):
    pass


def _read_source(args, name="input") -> str:
    e, f = getattr(args, "expr", None), getattr(args, "file", None)
    if (e is None) == (f is None):
        raise UsageError(f"give the {name} with exactly one of -e TEXT or -f FILE")
    if e is not None:
        return e
    return _read_file(f)


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def load(text: str):
    """A Term, an EquationSystem or a parsed JSON object."""
    s = text.strip()
    if s.startswith("{"):
        try:
            return json.loads(s)
        except json.JSONDecodeError as err:
            raise UsageError(f"invalid JSON: {err}") from None
    if re.search(r"^\s*(let|root)\b", s, re.M):
        return parse_system(s, SOA_SIGNATURE)
    return parse_term(s, SOA_SIGNATURE)


def _as_forest(obj, depth: int) -> SOAForest:
    if isinstance(obj, Term):
        return val_direct(obj)
    if isinstance(obj, EquationSystem):
        if obj.is_finite():
            return val_direct(obj.to_term())
        return approx_val(obj, depth)
    if isinstance(obj, dict) and "nodes" in obj:
        if "classes" in obj:
            return SOAForest.from_json(obj)
        return build_structuring(OForest.from_json(obj))
    raise UsageError("expected a term, an equation system or a forest JSON document")


def _as_scheme(obj) -> DescriptionScheme:
    if isinstance(obj, dict) and "D" in obj:
        return DescriptionScheme.from_json(obj)
    if isinstance(obj, Term):
        return extract_scheme(obj)[0]
    if isinstance(obj, EquationSystem):
        return extract_scheme_regular(obj)
    raise UsageError("expected a term, an equation system or a scheme JSON document")


def _emit(data) -> None:
    if isinstance(data, str):
        print(data)
    else:
        print(json.dumps(data, indent=2, ensure_ascii=False))


def _forest_out(J: SOAForest, fmt: str) -> None:
    _emit(J.to_dot() if fmt == "dot" else J.to_json())


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    obj = load(_read_source(args))
    if isinstance(obj, Term):
        _emit({"kind": "term", "text": print_term(obj), "size": obj.size, "height": obj.height})
    elif isinstance(obj, EquationSystem):
        _emit({"kind": "system", "text": print_system(obj), "finite": obj.is_finite(),
               "unknowns": len(obj.equations)})
    else:
        raise UsageError("parse expects a term or an equation system")
    return 0


def cmd_eval(args) -> int:
    obj = load(_read_source(args))
    if isinstance(obj, EquationSystem) and obj.is_finite():
        obj = obj.to_term()
    if isinstance(obj, Term):
        J = val_direct(obj)
        if args.check:
            K = val_algebraic(obj)
            if J != K:
                print("eval --check: the two evaluators disagree", file=sys.stderr)
                return 1
    elif isinstance(obj, EquationSystem):
        J = approx_val(obj, args.depth)
    else:
        raise UsageError("eval expects a term or an equation system")
    _forest_out(J, args.format)
    return 0


def cmd_validate(args) -> int:
    data = load(_read_source(args))
    if not isinstance(data, dict):
        raise UsageError("validate expects an O-forest or SOA-forest JSON document")
    try:
        if "D" in data:
            DescriptionScheme.from_json(data)
            kind = "scheme"
        elif "classes" in data:
            SOAForest.from_json(data)
            kind = "soa-forest"
        else:
            OForest.from_json(data)
            kind = "o-forest"
    except (OForestError, StructuringError) as err:
        _emit({"valid": False, "kind": err.kind, "witness": [str(w) for w in err.witness], "message": str(err)})
        return 1
    _emit({"valid": True, "kind": kind})
    return 0


def cmd_structure(args) -> int:
    data = load(_read_source(args))
    if not isinstance(data, dict) or "nodes" not in data:
        raise UsageError("structure expects an O-forest JSON document")
    F = OForest.from_json(data)
    order = list(F.nodes)
    if args.seed is not None:
        random.Random(args.seed).shuffle(order)
    _forest_out(build_structuring(F, order), args.format)
    return 0


def cmd_cuts(args) -> int:
    J = _as_forest(load(_read_source(args)), args.depth)
    out = []
    for U in J.classes:
        out.append({
            "line": [str(x) for x in U],
            "depth": J.line_depth(U),
            "u_plus": str(u_plus(J, U)),
            "tail": sorted(str(x) for x in tail_nodes(J, U)),
            "cuts": [{"left": [str(x) for x in k.left], "right": [str(x) for x in k.right],
                      "defined_by": sorted(str(x) for x in def_nodes(J, k))} for k in cuts(J, U)],
        })
    _emit(out)
    return 0


def cmd_scheme(args) -> int:
    if args.action == "extract":
        obj = load(_read_source(args))
        if isinstance(obj, Term):
            delta = extract_scheme(obj)[0]
        elif isinstance(obj, EquationSystem):
            delta = extract_scheme_regular(obj)
        else:
            raise UsageError("scheme extract expects a term or an equation system")
        _emit(delta.to_json())
        return 0
    if args.action == "unfold":
        delta = _as_scheme(load(_read_source(args, "scheme")))
        _forest_out(unfold_scheme(delta, args.depth, args.window), args.format)
        return 0
    # check
    if args.against is None:
        raise UsageError("scheme check needs --against FILE")
    delta = _as_scheme(load(_read_source(args, "scheme")))
    J = _as_forest(load(_read_file(args.against)), args.depth)
    bounded = args.bounded
    lab = find_labelling(J, delta, args.depth if bounded else None, args.window if bounded else None)
    if lab is None:
        _emit({"describes": False})
        return 1
    problems = labelling_failures(J, delta, lab, args.depth if bounded else None, args.window if bounded else None)
    _emit({"describes": not problems,
           "lines": {" ".join(map(str, U)): str(d) for U, d in lab.r.items()}})
    return 0 if not problems else 1


def cmd_iso(args) -> int:
    a, b = (load(_read_file(p)) for p in (args.first, args.second))

    def finite(o):
        return isinstance(o, Term) or (isinstance(o, EquationSystem) and o.is_finite()) or (
            isinstance(o, dict) and "nodes" in o)

    if finite(a) and finite(b):
        same = soa_iso(_as_forest(a, args.depth), _as_forest(b, args.depth))
        _emit({"result": "iso" if same else "noniso", "reason": "exact comparison of finite values"})
        return 0
    result, reason = scheme_equiv(_as_scheme(a), _as_scheme(b))
    _emit({"result": result, "reason": reason})
    return 0


def _parse_binding(text: str):
    if "=" not in text:
        raise UsageError(f"binding {text!r} must look like NAME=value or NAME={{a,b}}")
    name, value = text.split("=", 1)
    value = value.strip()
    if value.startswith("{") and value.endswith("}"):
        return name.strip(), frozenset(v.strip() for v in value[1:-1].split(",") if v.strip())
    return name.strip(), value


def cmd_mso(args) -> int:
    obj = load(_read_source(args, "structure"))
    if isinstance(obj, Term):
        S = encode_term(obj)
    elif isinstance(obj, dict) and "relations" in obj:
        S = RelStructure.from_json(obj)
    else:
        S = encode_S(_as_forest(obj, args.depth))
    env = dict(_parse_binding(b) for b in args.bind)
    _emit({"value": eval_mso(S, args.formula, env)})
    return 0


def cmd_dot(args) -> int:
    J = _as_forest(load(_read_source(args)), args.depth)
    _emit(J.to_dot())
    return 0


# ---------------------------------------------------------------------------


def _source(p: argparse.ArgumentParser) -> None:
    p.add_argument("-e", "--expr", help="inline input text")
    p.add_argument("-f", "--file", help="input file")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=4, help="truncation / unfolding depth (default 4)")
    common.add_argument("--window", type=int, default=4, help="per-line window bound (default 4)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomised choices")
    common.add_argument("--format", choices=("json", "dot"), default="json")
    ap = argparse.ArgumentParser(prog="otree", description="Regular O-trees: terms, structurings, schemes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("parse", help="parse a term or an equation system")
    _source(p)
    p.set_defaults(run=cmd_parse)

    p = add("eval", help="value of a term (or truncated value of a system)")
    _source(p)
    p.add_argument("--check", action="store_true", help="also run the algebraic evaluator and compare")
    p.set_defaults(run=cmd_eval)

    p = add("validate", help="validate an O-forest, SOA-forest or scheme JSON document")
    _source(p)
    p.set_defaults(run=cmd_validate)

    p = add("structure", help="build a structuring of an O-forest")
    _source(p)
    p.set_defaults(run=cmd_structure)

    p = add("cuts", help="lines with their cuts, tails and U+ words")
    _source(p)
    p.set_defaults(run=cmd_cuts)

    p = add("scheme", help="description schemes")
    p.add_argument("action", choices=("extract", "unfold", "check"))
    _source(p)
    p.add_argument("--against", help="forest or term checked by 'scheme check'")
    p.add_argument("--bounded", action="store_true",
                   help="'scheme check' compares up to --depth and --window truncation")
    p.set_defaults(run=cmd_scheme)

    p = add("iso", help="compare two terms, systems, forests or schemes")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(run=cmd_iso)

    p = add("mso", help="MSO evaluation")
    p.add_argument("action", choices=("eval",))
    p.add_argument("formula", help="s-expression formula")
    _source(p)
    p.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE",
                   help="free variable: x=a, or X={a,b} for a set")
    p.set_defaults(run=cmd_mso)

    p = add("dot", help="Graphviz rendering of a value or forest")
    _source(p)
    p.set_defaults(run=cmd_dot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.run(args)
    except (UsageError, TermSyntaxError) as err:
        print(f"otree: {err}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as err:
        print(f"otree: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
