"""Monadic second-order logic over finite relational structures.

Formulas are s-expressions::

    (exists-set X (forall x (implies (in x X) (leq x x))))

Connectives: ``not and or implies iff``; quantifiers ``exists forall``
(first-order) and ``exists-set forall-set``; atoms ``(in x X)``,
``(= x y)``, ``(fin X)``, ``true``, ``false`` and ``(R x1 ... xn)`` for a
relation ``R`` of the structure.  ``fin`` holds on every finite set.
"""
from __future__ import annotations

import re
from functools import lru_cache
from dataclasses import dataclass, field
from itertools import chain as _chain, combinations
from typing import Iterable, Mapping

from .oforest import OForest, OForestError, validate_oforest
from .structuring import SOAForest, StructuringError, covers, validate_structuring
from .terms import Term


class MSOError(ValueError):
    pass


@dataclass
class RelStructure:
    domain: tuple
    relations: dict = field(default_factory=dict)
    arities: dict = field(default_factory=dict)
    # truth values of subformulas under assignments to their free variables, shared across calls
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.domain = tuple(self.domain)
        known = set(self.domain)
        rels = {}
        for name, tuples in self.relations.items():
            ts = frozenset(tuple(t) if isinstance(t, (tuple, list)) else (t,) for t in tuples)
            n = self.arities.get(name)
            for t in ts:
                if n is None:
                    n = len(t)
                if len(t) != n:
                    raise MSOError(f"relation {name!r} has tuples of width {len(t)} and {n}")
                if not set(t) <= known:
                    raise MSOError(f"relation {name!r} mentions elements outside the domain")
            rels[name] = ts
            self.arities[name] = n if n is not None else self.arities.get(name, 1)
        self.relations = rels

    def holds(self, name, *args) -> bool:
        return tuple(args) in self.relations[name]

    def unary(self, name) -> frozenset:
        return frozenset(t[0] for t in self.relations.get(name, ()))

    def to_json(self) -> dict:
        return {
            "domain": [str(x) for x in self.domain],
            "relations": [
                {"rel": name, "arity": self.arities[name], "tuples": sorted([list(map(str, t)) for t in ts])}
                for name, ts in sorted(self.relations.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RelStructure":
        try:
            rels = {r["rel"]: [tuple(t) for t in r["tuples"]] for r in data["relations"]}
            ar = {r["rel"]: r["arity"] for r in data["relations"] if "arity" in r}
            return cls(data["domain"], rels, ar)
        except (KeyError, TypeError) as e:
            raise MSOError(f"malformed structure JSON: {e}") from None


# ---------------------------------------------------------------------------
# syntax

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_CONNECTIVES = {"not": 1, "implies": 2, "iff": 2}
_QUANT = {"exists": "fo", "forall": "fo", "exists-set": "so", "forall-set": "so"}


class Formula:
    """Syntax tree node; ``free`` lists free variables in a fixed order."""

    __slots__ = ("op", "args", "free")

    def __init__(self, op: str, args: tuple):
        self.op = op
        self.args = args
        if op in _QUANT:
            free = set(args[1].free) - {args[0]}
        elif op in ("in", "=", "rel", "fin"):
            free = {a for a in (args[1:] if op == "rel" else args)}
        else:
            free = set(_chain.from_iterable(a.free for a in args))
        self.free = tuple(sorted(free))

    def __str__(self):
        if self.op in ("true", "false"):
            return self.op
        if self.op == "rel":
            return "(" + " ".join(self.args) + ")"
        if self.op in _QUANT:
            return f"({self.op} {self.args[0]} {self.args[1]})"
        return "(" + " ".join([self.op] + [str(a) for a in self.args]) + ")"

    __repr__ = __str__


def _read(text: str):
    pos, stack = 0, [[]]
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise MSOError(f"cannot read formula at {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise MSOError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(3):
            stack[-1].append(m.group(3))
    if len(stack) != 1:
        raise MSOError("unbalanced '('")
    if len(stack[0]) != 1:
        raise MSOError("expected exactly one formula")
    return stack[0][0]


def _build(sx) -> Formula:
    if isinstance(sx, str):
        if sx in ("true", "false"):
            return Formula(sx, ())
        raise MSOError(f"unexpected atom {sx!r}")
    if not sx or not isinstance(sx[0], str):
        raise MSOError("empty or headless form")
    head, rest = sx[0], sx[1:]
    if head in _QUANT:
        if len(rest) != 2 or not isinstance(rest[0], str):
            raise MSOError(f"({head} VAR BODY) expected")
        return Formula(head, (rest[0], _build(rest[1])))
    if head in ("and", "or"):
        return Formula(head, tuple(_build(a) for a in rest))
    if head in _CONNECTIVES:
        if len(rest) != _CONNECTIVES[head]:
            raise MSOError(f"{head} takes {_CONNECTIVES[head]} arguments")
        return Formula(head, tuple(_build(a) for a in rest))
    if not all(isinstance(a, str) for a in rest):
        raise MSOError(f"arguments of {head!r} must be variables")
    if head == "in":
        if len(rest) != 2:
            raise MSOError("(in x X) expected")
        return Formula("in", tuple(rest))
    if head == "=":
        if len(rest) != 2:
            raise MSOError("(= x y) expected")
        return Formula("=", tuple(rest))
    if head == "fin":
        if len(rest) != 1:
            raise MSOError("(fin X) expected")
        return Formula("fin", tuple(rest))
    return Formula("rel", (head,) + tuple(rest))


def parse_formula(text: str) -> Formula:
    return _build(_read(text))


_parsed = lru_cache(maxsize=256)(parse_formula)


def check_formula(phi: Formula, S: RelStructure, fo: Iterable = (), so: Iterable = ()) -> None:
    """Raise :class:`MSOError` on unscoped variables, wrong sorts or arity mismatches."""
    fo, so = set(fo), set(so)

    def go(f: Formula, fo: set, so: set):
        op, args = f.op, f.args
        if op in _QUANT:
            if _QUANT[op] == "fo":
                go(args[1], fo | {args[0]}, so - {args[0]})
            else:
                go(args[1], fo - {args[0]}, so | {args[0]})
        elif op == "in":
            need(args[0], fo, "first-order")
            need(args[1], so, "set")
        elif op == "=":
            need(args[0], fo, "first-order")
            need(args[1], fo, "first-order")
        elif op == "fin":
            need(args[0], so, "set")
        elif op == "rel":
            name = args[0]
            if name not in S.arities:
                raise MSOError(f"unknown relation {name!r}")
            if S.arities[name] != len(args) - 1:
                raise MSOError(f"relation {name!r} has arity {S.arities[name]}, used with {len(args) - 1}")
            for a in args[1:]:
                need(a, fo, "first-order")
        else:
            for a in args:
                go(a, fo, so)

    def need(v, scope, sort):
        if v not in scope:
            raise MSOError(f"variable {v!r} is not bound as a {sort} variable")

    go(phi, fo, so)


def _subsets(domain: tuple):
    for n in range(len(domain) + 1):
        for c in combinations(domain, n):
            yield frozenset(c)


def _guard(op: str, v, body: Formula, env: Mapping):
    """Elements of X when the body reads (forall v (implies (in v X) ..)) or (exists v (and (in v X) ..))."""
    want = "implies" if op == "forall" else "and"
    if body.op != want:
        return None
    g = body.args[0]
    if g.op == "and" and g.args:
        g = g.args[0]
    if g.op == "in" and g.args[0] == v and g.args[1] in env:
        return tuple(env[g.args[1]])
    return None


def eval_mso(S: RelStructure, phi, env: Mapping | None = None) -> bool:
    """Truth of ``phi`` in ``S`` under ``env`` (elements for first-order, sets for set variables)."""
    if isinstance(phi, str):
        phi = _parsed(phi)
    env = dict(env or {})
    fo = {v for v, a in env.items() if not isinstance(a, (set, frozenset))}
    so = set(env) - fo
    check_formula(phi, S, fo, so)
    env = {v: frozenset(a) if v in so else a for v, a in env.items()}
    subsets = None
    memo = S._memo

    def ev(f: Formula, env: dict) -> bool:
        op, args = f.op, f.args
        if op == "rel":
            return tuple([env[a] for a in args[1:]]) in S.relations[args[0]]
        if op == "in":
            return env[args[0]] in env[args[1]]
        if op == "=":
            return env[args[0]] == env[args[1]]
        if op == "and":
            return all(ev(a, env) for a in args)
        if op == "or":
            return any(ev(a, env) for a in args)
        if op == "implies":
            return (not ev(args[0], env)) or ev(args[1], env)
        if op == "not":
            return not ev(args[0], env)
        if op == "iff":
            return ev(args[0], env) == ev(args[1], env)
        if op in ("true", "fin"):
            return True
        if op == "false":
            return False
        # quantifiers are the only memoised nodes
        key = (f, tuple([env[v] for v in f.free]))
        if key in memo:
            return memo[key]
        v, body = args
        nonlocal subsets
        if _QUANT[op] == "so":
            if subsets is None:
                subsets = list(_subsets(S.domain))
            rng = subsets
        else:
            rng = _guard(op, v, body, env)
            if rng is None:
                rng = S.domain
        test = any if op.startswith("exists") else all
        r = memo[key] = test(ev(body, {**env, v: a}) for a in rng)
        return r

    return ev(phi, env)


# ---------------------------------------------------------------------------
# encodings


def encode_S(J: SOAForest) -> RelStructure:
    """``(N, <=, N0, N1)`` with N0 the nodes of even depth."""
    leq = [(x, y) for x in J.nodes for y in (x, *J.forest.above[x])]
    even = [x for x in J.nodes if J.depth(x) % 2 == 0]
    odd = [x for x in J.nodes if J.depth(x) % 2 == 1]
    return RelStructure(J.nodes, {"leq": leq, "N0": even, "N1": odd}, {"leq": 2, "N0": 1, "N1": 1})


def encode_term(t: Term) -> RelStructure:
    """``(positions, son1, son2, lab_f ...)``; the root is the empty string."""
    dom, son1, son2, labs = [], [], [], {}
    for p, u in t.positions():
        dom.append(p)
        labs.setdefault(f"lab_{u.symbol}", []).append(p)
        if p:
            (son1 if p[-1] == "1" else son2).append((p[:-1], p))
    rels = {"son1": son1, "son2": son2, **labs}
    return RelStructure(dom, rels, {name: (2 if name.startswith("son") else 1) for name in rels})


def _require(S: RelStructure, *names):
    missing = [n for n in names if n not in S.relations]
    if missing:
        raise MSOError(f"structure lacks relations {missing}")


def _leq(S: RelStructure, x, y) -> bool:
    return (x, y) in S.relations["leq"]


def same_line(S: RelStructure, x, y) -> bool:
    """Comparable, and the interval between them stays in one colour."""
    _require(S, "leq", "N0")
    if _leq(S, y, x):
        x, y = y, x
    elif not _leq(S, x, y):
        return False
    n0 = S.unary("N0")
    colour = x in n0
    return all((z in n0) == colour for z in S.domain if _leq(S, x, z) and _leq(S, z, y))


def decode(S: RelStructure) -> list[list]:
    """Classes of :func:`same_line`, listed in domain order."""
    seen, out = set(), []
    for x in S.domain:
        if x in seen:
            continue
        c = [y for y in S.domain if same_line(S, x, y)]
        seen.update(c)
        out.append(c)
    return out


def _as_forest(S: RelStructure) -> OForest | None:
    try:
        F = validate_oforest(S.domain, pairs=[p for p in S.relations["leq"] if p[0] != p[1]])
    except OForestError:
        return None
    for x in S.domain:
        if not _leq(S, x, x):
            return None
    if {(x, y) for x in F.nodes for y in F.above[x]} | {(x, x) for x in F.nodes} != set(S.relations["leq"]):
        return None
    return F


def check_structuring_encoding(S: RelStructure) -> bool:
    """``S`` is ``S(J)`` for some structured O-forest ``J``."""
    _require(S, "leq", "N0", "N1")
    F = _as_forest(S)
    if F is None:
        return False
    n0, n1 = S.unary("N0"), S.unary("N1")
    if n0 & n1 or n0 | n1 != set(S.domain):
        return False
    classes = decode(S)
    for c in classes:
        if any(not same_line(S, x, y) for x in c for y in c):
            return False
    try:
        J = validate_structuring(F, classes)
    except StructuringError:
        return False
    return all((J.depth(x) % 2 == 0) == (x in n0) for x in S.domain)


def check_line(S: RelStructure, U) -> bool:
    """``U`` is a whole class of :func:`same_line`."""
    U = set(U)
    if not U:
        return False
    return all({y for y in S.domain if same_line(S, x, y)} == U for x in U)


def check_covers(S: RelStructure, U, W) -> bool:
    """``U`` and ``W`` are lines and ``U`` is covered by ``W``."""
    if not (check_line(S, U) and check_line(S, W)):
        return False
    U, W = list(U), list(W)
    if check_structuring_encoding(S):
        J = SOAForest(validate_oforest(S.domain, pairs=[p for p in S.relations["leq"] if p[0] != p[1]]),
                      decode(S))
        return covers(J, U, W)
    lt = lambda a, b: a != b and _leq(S, a, b)
    under = lambda x: all(lt(u, x) for u in U)
    if not any(under(w) for w in W):
        return False
    return not any(x not in W and under(x) and any(lt(x, w) for w in W) for x in S.domain)


# ---------------------------------------------------------------------------
# the defining formulas


def _lt(x, y):
    return f"(and (leq {x} {y}) (not (= {x} {y})))"


def _comp(x, y):
    return f"(or (leq {x} {y}) (leq {y} {x}))"


def _same(x, y, z):
    between = f"(or (and (leq {x} {z}) (leq {z} {y})) (and (leq {y} {z}) (leq {z} {x})))"
    return f"(and {_comp(x, y)} (forall {z} (implies {between} (iff (N0 {z}) (N0 {x})))))"


PHI = " ".join(f"""
(and
  (forall x (leq x x))
  (forall x (forall y (implies (and (leq x y) (leq y x)) (= x y))))
  (forall x (forall y (forall z (implies (and (leq x y) (leq y z)) (leq x z)))))
  (forall x (forall y (forall z (implies (and (leq x y) (leq x z)) {_comp('y', 'z')}))))
  (forall x (iff (N0 x) (not (N1 x))))
  (forall x (forall y (forall z
    (implies (and {_same('x', 'y', 'u')} {_same('y', 'z', 'u')}) {_same('x', 'z', 'u')}))))
  (forall y (implies (forall z (implies (leq y z) (iff (N0 z) (N0 y)))) (N0 y))))
""".split())

THETA1 = " ".join(f"""
(and
  (exists x (in x U))
  (forall x (implies (in x U) (forall y (implies (in y U) {_same('x', 'y', 'z')}))))
  (forall x (implies (in x U) (forall y (implies {_same('x', 'y', 'z')} (in y U))))))
""".split())

_THETA1_W = THETA1.replace("in x U", "in x W").replace("in y U", "in y W")

_UNDER = "(forall u (implies (in u U) {}))"

THETA2 = " ".join(f"""
(and {THETA1} {_THETA1_W}
  (exists w (and (in w W) {_UNDER.format(_lt('u', 'w'))}))
  (forall x (implies
    (and {_UNDER.format(_lt('u', 'x'))} (exists w (and (in w W) {_lt('x', 'w')})))
    (in x W))))
""".split())


def phi_holds(S: RelStructure) -> bool:
    return eval_mso(S, PHI)


def theta1_holds(S: RelStructure, U) -> bool:
    return eval_mso(S, THETA1, {"U": frozenset(U)})


def theta2_holds(S: RelStructure, U, W) -> bool:
    return eval_mso(S, THETA2, {"U": frozenset(U), "W": frozenset(W)})


__all__ = [
    "Formula", "MSOError", "PHI", "RelStructure", "THETA1", "THETA2", "check_covers", "check_formula",
    "check_line", "check_structuring_encoding", "decode", "encode_S", "encode_term", "eval_mso",
    "parse_formula", "phi_holds", "same_line", "theta1_holds", "theta2_holds",
]
