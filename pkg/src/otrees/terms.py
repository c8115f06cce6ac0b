"""Finite terms, regular equation systems and top-down deterministic automata.

Terms are over a binary signature: every symbol has arity 0, 1 or 2.  A
position is a Dewey word over ``"1"`` and ``"2"``, stored as a plain string;
the empty string is the root.  Plain string comparison on such words is
exactly the lexicographic order (a prefix comes first), which is why
:func:`lex_compare` is a one-liner.

Regular (possibly infinite) terms are stored as :class:`EquationSystem`
values.  :class:`Automaton` is the derived top-down view used for runs,
occurrence languages and canonical forms.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping

import networkx as nx

ROOT = ""
OMEGA = math.inf

CAT, FG, OM, STAR = "cat", "fg", "om", "star"


class TermError(ValueError):
    """Invalid term, system or automaton."""


class TermSyntaxError(TermError):
    def __init__(self, message, line=None, col=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.col = col


class ArityError(TermError):
    pass


class UnknownSymbolError(TermError):
    pass


# ---------------------------------------------------------------------------
# positions


def lex_compare(p: str, q: str) -> int:
    """-1, 0 or 1 as ``p`` is below, equal to or above ``q`` for <=lex."""
    return (p > q) - (p < q)


def in_key(p: str) -> str:
    """Sort key realising the inorder: left subtree, node, right subtree."""
    return p.replace("1", "0") + "1"


def in_compare(p: str, q: str) -> int:
    """-1, 0 or 1 comparing ``p`` and ``q`` in the inorder <in."""
    a, b = in_key(p), in_key(q)
    return (a > b) - (a < b)


def join(p: str, q: str) -> str:
    """Longest common prefix, the join of two positions in the ancestor order."""
    n = 0
    for x, y in zip(p, q):
        if x != y:
            break
        n += 1
    return p[:n]


def is_ancestor(p: str, q: str) -> bool:
    """True when ``p`` is an ancestor of ``q`` or equal to it."""
    return q.startswith(p)


def position_label(p: str) -> str:
    return p if p else "ε"


# ---------------------------------------------------------------------------
# signatures and finite terms


class Signature:
    """Symbols with arities in {0, 1, 2}.

    With ``node_constants`` set, any symbol written ``'name`` is accepted
    as an extra nullary symbol.
    """

    def __init__(self, arities: Mapping[Hashable, int], node_constants=False):
        for sym, ar in arities.items():
            if ar not in (0, 1, 2):
                raise ArityError(f"symbol {sym!r} has arity {ar}, expected 0, 1 or 2")
        self.arities = dict(arities)
        self.node_constants = node_constants

    def arity(self, symbol) -> int:
        if symbol in self.arities:
            return self.arities[symbol]
        if self.node_constants and is_node_constant(symbol):
            return 0
        raise UnknownSymbolError(f"unknown symbol {symbol!r}")

    def __contains__(self, symbol):
        try:
            self.arity(symbol)
        except UnknownSymbolError:
            return False
        return True

    def symbols(self):
        return list(self.arities)

    def __repr__(self):
        return f"Signature({self.arities!r}, node_constants={self.node_constants})"


SOA_SIGNATURE = Signature({CAT: 2, FG: 1, OM: 0, STAR: 0}, node_constants=True)


def is_node_constant(symbol) -> bool:
    return isinstance(symbol, str) and len(symbol) > 1 and symbol[0] == "'"


def node_constant(name: str) -> str:
    return "'" + name


class Term:
    """An immutable finite term: a symbol applied to zero, one or two terms."""

    __slots__ = ("symbol", "args", "_hash", "_size")

    def __init__(self, symbol, args: Iterable["Term"] = ()):
        args = tuple(args)
        if len(args) > 2:
            raise ArityError(f"{symbol!r} applied to {len(args)} arguments")
        self.symbol = symbol
        self.args = args
        self._hash = hash((symbol, args))
        self._size = 1 + sum(a._size for a in args)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return self.symbol == other.symbol and self.args == other.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Term({print_term(self)!r})"

    def __str__(self):
        return print_term(self)

    @property
    def size(self) -> int:
        return self._size

    @property
    def height(self) -> int:
        return 1 + max((a.height for a in self.args), default=-1)

    def positions(self) -> Iterator[tuple[str, "Term"]]:
        """Preorder walk yielding ``(position, subterm)``."""
        stack = [(ROOT, self)]
        while stack:
            pos, t = stack.pop()
            yield pos, t
            for i in range(len(t.args), 0, -1):
                stack.append((pos + str(i), t.args[i - 1]))

    def labels(self) -> dict[str, object]:
        return {p: t.symbol for p, t in self.positions()}

    def domain(self) -> frozenset:
        return frozenset(p for p, _ in self.positions())

    def at(self, pos: str) -> "Term":
        t = self
        for c in pos:
            i = int(c) - 1
            if i >= len(t.args):
                raise KeyError(pos)
            t = t.args[i]
        return t

    def replace(self, fn: Callable[["Term"], "Term | None"]) -> "Term":
        """Bottom-up rewrite; ``fn`` returns a replacement or None."""
        new = Term(self.symbol, [a.replace(fn) for a in self.args])
        out = fn(new)
        return new if out is None else out

    def relabel(self, mapping: Callable[[object], object]) -> "Term":
        return Term(mapping(self.symbol), [a.relabel(mapping) for a in self.args])

    @classmethod
    def from_labels(cls, labels: Mapping[str, object], sig: Signature | None = None) -> "Term":
        """Build a term from a domain/label map, checking tree-domain rules."""
        if ROOT not in labels:
            raise TermError("domain lacks the root position")
        for p in labels:
            if not set(p) <= {"1", "2"}:
                raise TermError(f"bad position {p!r}")
            if p and p[:-1] not in labels:
                raise TermError(f"domain not prefix-closed at {p!r}")
            if p.endswith("2") and p[:-1] + "1" not in labels:
                raise TermError(f"{p!r} present without its left sibling")

        def build(p):
            kids = [p + c for c in "12" if p + c in labels]
            sym = labels[p]
            if sig is not None and sig.arity(sym) != len(kids):
                raise ArityError(f"{sym!r} at {position_label(p)} has {len(kids)} sons")
            return cls(sym, [build(k) for k in kids])

        return build(ROOT)


def check_term(t: Term, sig: Signature) -> Term:
    for pos, sub in t.positions():
        if sig.arity(sub.symbol) != len(sub.args):
            raise ArityError(
                f"{sub.symbol!r} at {position_label(pos)} expects {sig.arity(sub.symbol)} "
                f"arguments, got {len(sub.args)}"
            )
    return t


def print_term(t: Term) -> str:
    parts = []

    def go(u):
        parts.append(str(u.symbol))
        if u.args:
            parts.append("(")
            for i, a in enumerate(u.args):
                if i:
                    parts.append(", ")
                go(a)
            parts.append(")")

    go(t)
    return "".join(parts)


# ---------------------------------------------------------------------------
# surface syntax

_TOKEN = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<node>'[A-Za-z0-9_]+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
      | (?P<punct>[()\[\],;=])
    """,
    re.VERBOSE,
)

_CLOSE = {"(": ")", "[": "]"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out, i, line, col = [], 0, 1, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), line, col))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = m.end()
    out.append(_Tok("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text, sig, unknowns=frozenset()):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.unknowns = unknowns

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise TermSyntaxError(msg, tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def expr(self):
        left = self.primary()
        if self.tok.kind == "name" and self.tok.text == CAT:
            self.i += 1
            right = self.expr()
            return ("app", CAT, [left, right], self.toks[self.i - 1])
        return left

    def primary(self):
        tok = self.tok
        if tok.text in _CLOSE:
            self.i += 1
            inner = self.expr()
            self.expect(_CLOSE[tok.text])
            return inner
        if tok.kind not in ("name", "node"):
            self.error(f"expected a term, found {tok.text or 'end of input'!r}")
        self.i += 1
        if self.tok.text == "(":
            self.i += 1
            args = [self.expr()]
            while self.tok.text == ",":
                self.i += 1
                args.append(self.expr())
            self.expect(")")
            return ("app", tok.text, args, tok)
        if tok.text in self.unknowns:
            return ("ref", tok.text, tok)
        return ("app", tok.text, [], tok)


def _check_arity(node, sig):
    _, sym, args, tok = node
    try:
        ar = sig.arity(sym)
    except UnknownSymbolError as e:
        raise UnknownSymbolError(f"{e} at line {tok.line}, column {tok.col}") from None
    if ar != len(args):
        raise ArityError(
            f"{sym!r} expects {ar} argument(s), got {len(args)} at line {tok.line}, column {tok.col}"
        )


def _to_term(node, sig) -> Term:
    if node[0] == "ref":
        raise TermSyntaxError(f"unexpected unknown {node[1]!r}", node[2].line, node[2].col)
    _check_arity(node, sig)
    return Term(node[1], [_to_term(a, sig) for a in node[2]])


def parse_term(text: str, sig: Signature = SOA_SIGNATURE) -> Term:
    """Parse the term surface syntax.

    Prefix application ``f(t1, t2)`` is the core form.  For the O-forest
    algebra, ``t1 cat t2`` is accepted as a right-associative infix form and
    square brackets group like parentheses.
    """
    p = _Parser(text, sig)
    node = p.expr()
    if p.tok.kind != "eof":
        p.error(f"trailing input {p.tok.text!r}")
    return _to_term(node, sig)


# ---------------------------------------------------------------------------
# equation systems


class EquationSystem:
    """A regular equation system ``x = f(y, z) | f(y) | f`` with a root unknown.

    ``equations`` maps each unknown to ``(symbol, children)`` where
    ``children`` is a tuple of unknowns.  ``order`` fixes the declaration
    order used for printing and canonical naming.
    """

    def __init__(self, equations: Mapping[str, tuple], root: str, order: Iterable[str] | None = None):
        self.equations = {x: (sym, tuple(kids)) for x, (sym, kids) in equations.items()}
        self.root = root
        self.order = tuple(order) if order is not None else tuple(self.equations)
        if set(self.order) != set(self.equations):
            raise TermError("declaration order does not match the unknowns")
        if root not in self.equations:
            raise TermError(f"root {root!r} is not declared")
        for x, (sym, kids) in self.equations.items():
            for k in kids:
                if k not in self.equations:
                    raise TermError(f"equation for {x!r} references undeclared {k!r}")
            if len(kids) > 2:
                raise ArityError(f"equation for {x!r} has {len(kids)} children")

    def __eq__(self, other):
        return (
            isinstance(other, EquationSystem)
            and self.root == other.root
            and self.equations == other.equations
        )

    def __hash__(self):
        return hash((self.root, tuple(sorted(self.equations.items(), key=lambda kv: str(kv[0])))))

    def __repr__(self):
        return f"EquationSystem(root={self.root!r}, {len(self.equations)} equations)"

    def __str__(self):
        return print_system(self)

    def rhs(self, x):
        return self.equations[x]

    def check(self, sig: Signature) -> "EquationSystem":
        for x, (sym, kids) in self.equations.items():
            if sig.arity(sym) != len(kids):
                raise ArityError(f"equation for {x!r}: {sym!r} expects {sig.arity(sym)} arguments")
        return self

    def reachable(self, start=None) -> list[str]:
        start = self.root if start is None else start
        seen, out, stack = {start}, [], [start]
        while stack:
            x = stack.pop()
            out.append(x)
            for k in reversed(self.equations[x][1]):
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        order = {x: i for i, x in enumerate(self.order)}
        return sorted(out, key=order.__getitem__)

    def pruned(self) -> "EquationSystem":
        keep = self.reachable()
        return EquationSystem({x: self.equations[x] for x in keep}, self.root, keep)

    def is_finite(self, start=None) -> bool:
        """True when the defined term has finitely many positions."""
        start = self.root if start is None else start
        g = nx.DiGraph()
        for x in self.reachable(start):
            g.add_node(x)
            for k in self.equations[x][1]:
                g.add_edge(x, k)
        return nx.is_directed_acyclic_graph(g)

    def to_term(self, start=None) -> Term:
        start = self.root if start is None else start
        if not self.is_finite(start):
            raise TermError("the system defines an infinite term")
        memo = {}

        def build(x):
            if x not in memo:
                sym, kids = self.equations[x]
                memo[x] = Term(sym, [build(k) for k in kids])
            return memo[x]

        return build(start)

    def state_at(self, pos: str):
        x = self.root
        for c in pos:
            kids = self.equations[x][1]
            i = int(c) - 1
            if i >= len(kids):
                return None
            x = kids[i]
        return x

    def symbol_at(self, pos: str):
        x = self.state_at(pos)
        return None if x is None else self.equations[x][0]

    def relabel(self, fn: Callable[[object], object]) -> "EquationSystem":
        return EquationSystem(
            {x: (fn(sym), kids) for x, (sym, kids) in self.equations.items()}, self.root, self.order
        )

    def renamed(self, fn: Callable[[str], str]) -> "EquationSystem":
        return EquationSystem(
            {fn(x): (sym, tuple(fn(k) for k in kids)) for x, (sym, kids) in self.equations.items()},
            fn(self.root),
            [fn(x) for x in self.order],
        )

    @classmethod
    def from_term(cls, t: Term, share=False, prefix="p") -> "EquationSystem":
        """Equation system of a finite term.

        Without ``share`` every position gets its own unknown ``p<position>``,
        which makes the run of the derived automaton the identity on
        positions.  With ``share`` equal subterms share one unknown.
        """
        eqs, order = {}, []
        if share:
            names: dict[Term, str] = {}

            def visit(u, pos):
                if u in names:
                    return names[u]
                kids = tuple(visit(a, pos + str(i + 1)) for i, a in enumerate(u.args))
                name = prefix + pos
                names[u] = name
                eqs[name] = (u.symbol, kids)
                order.append(name)
                return name

            root = visit(t, ROOT)
            order.reverse()
            return cls(eqs, root, order)
        for pos, u in t.positions():
            eqs[prefix + pos] = (u.symbol, tuple(prefix + pos + str(i + 1) for i in range(len(u.args))))
            order.append(prefix + pos)
        return cls(eqs, prefix, order)


def print_system(sys: EquationSystem) -> str:
    lines = []
    for x in sys.order:
        sym, kids = sys.equations[x]
        rhs = f"{sym}({', '.join(kids)})" if kids else str(sym)
        lines.append(f"let {x} = {rhs};")
    lines.append(f"root {sys.root};")
    return "\n".join(lines)


def parse_system(text: str, sig: Signature = SOA_SIGNATURE) -> EquationSystem:
    """Parse ``let x = rhs; ... root x;``.

    A bare name on a right-hand side refers to an unknown when one of that
    name is declared, and to a nullary symbol otherwise.  Nested right-hand
    sides are flattened with auxiliary unknowns ``x.<position>``; an alias
    ``let x = y;`` is resolved.
    """
    toks = _tokenize(text)
    declared = []
    for i, tok in enumerate(toks):
        if tok.kind == "name" and tok.text == "let" and toks[i + 1].kind == "name":
            declared.append(toks[i + 1].text)
    if len(set(declared)) != len(declared):
        raise TermSyntaxError("an unknown is declared twice")
    for x in declared:
        if x in sig.arities:
            raise TermSyntaxError(f"unknown {x!r} shadows a symbol of the signature")
    p = _Parser(text, sig, frozenset(declared))
    raw, root = {}, None
    while p.tok.kind != "eof":
        if p.tok.text == "let":
            p.i += 1
            name = p.tok.text
            p.i += 1
            p.expect("=")
            raw[name] = p.expr()
            p.expect(";")
        elif p.tok.text == "root":
            p.i += 1
            if p.tok.kind != "name":
                p.error("expected the root unknown")
            root = p.tok.text
            p.i += 1
            p.expect(";")
        else:
            p.error(f"expected 'let' or 'root', found {p.tok.text!r}")
    if root is None:
        raise TermSyntaxError("missing 'root' declaration")
    if root not in raw:
        raise TermSyntaxError(f"root {root!r} is not declared")

    alias = {x: node[1] for x, node in raw.items() if node[0] == "ref"}

    def resolve(x):
        seen = []
        while x in alias:
            if x in seen:
                raise TermError(f"unguarded recursion through {' -> '.join(seen + [x])}")
            seen.append(x)
            x = alias[x]
        return x

    eqs, order = {}, []

    def flatten(name, node):
        if node[0] == "ref":
            return resolve(node[1])
        _check_arity(node, sig)
        kids = []
        for i, a in enumerate(node[2]):
            if a[0] == "ref":
                kids.append(resolve(a[1]))
            else:
                kids.append(flatten(f"{name}.{i + 1}", a))
        if name in eqs:
            raise TermError(f"auxiliary unknown {name!r} clashes with a declared one")
        eqs[name] = (node[1], tuple(kids))
        order.append(name)
        return name

    for x in declared:
        if x not in alias:
            flatten(x, raw[x])
    for x in declared:
        if x in alias:
            eqs[x] = eqs[resolve(x)]
            order.append(x)
    order.sort(key=lambda n: (declared.index(n.split(".")[0]), n.count("."), n))
    return EquationSystem(eqs, resolve(root), order)


# ---------------------------------------------------------------------------
# automata


class Automaton:
    """Top-down deterministic automaton accepting a single regular term.

    ``delta[s] = (symbol, children)``; the run is ``run(root) = initial`` and
    ``run(p i) = children[i-1]`` of the state at ``p``.
    """

    def __init__(self, states: Iterable, initial, delta: Mapping):
        self.states = tuple(states)
        self.initial = initial
        self.delta = {s: (sym, tuple(kids)) for s, (sym, kids) in delta.items()}
        if initial not in self.delta:
            raise TermError("initial state has no transition")
        for s in self.states:
            if s not in self.delta:
                raise TermError(f"transition function is not total: no entry for {s!r}")
        for s, (_, kids) in self.delta.items():
            for k in kids:
                if k not in self.delta:
                    raise TermError(f"transition of {s!r} targets unknown state {k!r}")

    def __repr__(self):
        return f"Automaton({len(self.states)} states, initial={self.initial!r})"

    def symbol(self, s):
        return self.delta[s][0]

    def children(self, s):
        return self.delta[s][1]

    def reachable(self) -> list:
        seen, out, stack = {self.initial}, [], [self.initial]
        while stack:
            s = stack.pop()
            out.append(s)
            for k in reversed(self.delta[s][1]):
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        return out

    def normalized(self) -> "Automaton":
        keep = set(self.reachable())
        return Automaton([s for s in self.states if s in keep], self.initial,
                         {s: self.delta[s] for s in keep})

    def canonical(self) -> tuple:
        """Canonical form of the minimal automaton (bisimulation quotient).

        Two automata accept the same term exactly when their canonical forms
        are equal.
        """
        states = self.reachable()
        block = {s: (repr(self.delta[s][0]), len(self.delta[s][1])) for s in states}
        while True:
            sig = {s: (block[s], tuple(block[k] for k in self.delta[s][1])) for s in states}
            ids = {v: i for i, v in enumerate(sorted(set(sig.values()), key=repr))}
            new = {s: ids[sig[s]] for s in states}
            if len(set(new.values())) == len(set(block.values())):
                block = new
                break
            block = new
        number, out, queue = {}, [], [self.initial]
        number[block[self.initial]] = 0
        while queue:
            s = queue.pop(0)
            sym, kids = self.delta[s]
            row = []
            for k in kids:
                b = block[k]
                if b not in number:
                    number[b] = len(number)
                    queue.append(k)
                row.append(number[b])
            out.append((sym, tuple(row)))
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "states": [str(s) for s in self.states],
            "initial": str(self.initial),
            "delta": {str(s): [str(sym), *map(str, kids)] for s, (sym, kids) in self.delta.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Automaton":
        try:
            delta = {s: (row[0], tuple(row[1:])) for s, row in data["delta"].items()}
            return cls(data["states"], data["initial"], delta)
        except (KeyError, IndexError, TypeError) as e:
            raise TermError(f"malformed automaton JSON: {e}") from None


def system_to_automaton(sys: EquationSystem) -> Automaton:
    return Automaton(sys.order, sys.root, sys.equations)


def automaton_to_system(aut: Automaton) -> EquationSystem:
    names = {s: str(s) for s in aut.states}
    if len(set(names.values())) != len(names):
        raise TermError("state names collide once converted to strings")
    return EquationSystem(
        {names[s]: (sym, tuple(names[k] for k in kids)) for s, (sym, kids) in aut.delta.items()},
        names[aut.initial],
        [names[s] for s in aut.states],
    )


def bisimilar(a: Automaton, b: Automaton) -> bool:
    return a.canonical() == b.canonical()


def _as_automaton(source) -> Automaton:
    if isinstance(source, Automaton):
        return source
    if isinstance(source, EquationSystem):
        return system_to_automaton(source)
    if isinstance(source, Term):
        return system_to_automaton(EquationSystem.from_term(source))
    raise TypeError(f"expected a term, system or automaton, got {type(source).__name__}")


def state_at(aut, p: str):
    """State reached at position ``p``, or None when ``p`` is outside the term."""
    aut = _as_automaton(aut)
    s = aut.initial
    for c in p:
        kids = aut.delta[s][1]
        i = int(c) - 1
        if i >= len(kids):
            return None
        s = kids[i]
    return s


def truncate(source, L: int, filler) -> Term:
    """Finite approximation of a (possibly infinite) term.

    Positions of length below ``L`` keep their labels; every position of
    length exactly ``L`` is replaced by the nullary ``filler``.
    """
    aut = _as_automaton(source)

    def build(s, depth):
        if depth == L:
            return Term(filler)
        sym, kids = aut.delta[s]
        return Term(sym, [build(k, depth + 1) for k in kids])

    return build(aut.initial, 0)


def annotate_run(sys: EquationSystem) -> EquationSystem:
    """The system of t_B: each symbol f at a position becomes ``(f, state)``."""
    return EquationSystem(
        {x: ((sym, x), kids) for x, (sym, kids) in sys.equations.items()}, sys.root, sys.order
    )


# ---------------------------------------------------------------------------
# path census


def count_paths(succ: Mapping, weight: Mapping) -> dict:
    """Sum of ``weight`` over all finite paths leaving each vertex.

    ``succ[v]`` lists successors (a successor listed twice counts twice) and
    ``weight[v]`` is a non-negative integer.  A vertex gets ``OMEGA`` when
    some path from it runs through a cycle and later reaches positive weight.
    """
    g = nx.DiGraph()
    mult = {}
    for v in set(succ) | set(weight):
        g.add_node(v)
    for v, ws in succ.items():
        for w in ws:
            g.add_edge(v, w)
            mult[v, w] = mult.get((v, w), 0) + 1
    cond = nx.condensation(g)
    cyclic = {
        c for c in cond.nodes
        if len(cond.nodes[c]["members"]) > 1
        or any(g.has_edge(v, v) for v in cond.nodes[c]["members"])
    }
    order = list(reversed(list(nx.topological_sort(cond))))
    productive, pumping = {}, {}
    for c in order:
        mem = cond.nodes[c]["members"]
        prod = any(weight.get(v, 0) > 0 for v in mem) or any(productive[d] for d in cond.successors(c))
        productive[c] = prod
        pumping[c] = (c in cyclic and prod) or any(pumping[d] for d in cond.successors(c))
    out = {}
    for c in order:
        mem = cond.nodes[c]["members"]
        if pumping[c]:
            out.update((v, OMEGA) for v in mem)
        elif not productive[c]:
            out.update((v, 0) for v in mem)
        else:
            (v,) = mem
            out[v] = weight.get(v, 0) + sum(mult[v, w] * out[w] for w in g.successors(v))
    return out


# ---------------------------------------------------------------------------
# DFAs over the position alphabet


class DFA:
    """Complete DFA over {"1", "2"} (missing transitions go to a dead sink)."""

    ALPHABET = ("1", "2")

    def __init__(self, states, start, delta: Mapping, accepting):
        self.states = tuple(states)
        self.start = start
        self.delta = dict(delta)
        self.accepting = frozenset(accepting)

    def __repr__(self):
        return f"DFA({len(self.states)} states, {len(self.accepting)} accepting)"

    def step(self, s, letter):
        return self.delta.get((s, letter))

    def accepts(self, word: str) -> bool:
        s = self.start
        for c in word:
            s = self.step(s, c)
            if s is None:
                return False
        return s in self.accepting

    def _succ(self):
        return {s: [t for a in self.ALPHABET if (t := self.step(s, a)) is not None] for s in self.states}

    def count(self):
        """Number of accepted words, ``OMEGA`` when infinite."""
        return count_paths(self._succ(), {s: int(s in self.accepting) for s in self.states})[self.start]

    def is_infinite(self) -> bool:
        return self.count() == OMEGA

    def words(self, max_len: int) -> list[str]:
        out, frontier = [], [("", self.start)]
        for _ in range(max_len + 1):
            nxt = []
            for w, s in frontier:
                if s in self.accepting:
                    out.append(w)
                for a in self.ALPHABET:
                    t = self.step(s, a)
                    if t is not None:
                        nxt.append((w + a, t))
            frontier = nxt
        return out


def _position_dfa(aut: Automaton, accept: Callable[[object], bool]) -> DFA:
    states = aut.reachable()
    delta = {}
    for s in states:
        for i, k in enumerate(aut.delta[s][1]):
            delta[s, str(i + 1)] = k
    return DFA(states, aut.initial, delta, [s for s in states if accept(s)])


def occurrences_language(source, f) -> DFA:
    """DFA accepting exactly the positions labelled ``f``."""
    aut = _as_automaton(source)
    return _position_dfa(aut, lambda s: aut.delta[s][0] == f)


def domain_language(source) -> DFA:
    """DFA accepting exactly the positions of the term."""
    aut = _as_automaton(source)
    return _position_dfa(aut, lambda s: True)


def positions_upto(source, max_len: int) -> dict[str, object]:
    """Positions of length at most ``max_len`` with their labels."""
    aut = _as_automaton(source)
    out, frontier = {}, [(ROOT, aut.initial)]
    for _ in range(max_len + 1):
        nxt = []
        for p, s in frontier:
            sym, kids = aut.delta[s]
            out[p] = sym
            nxt.extend((p + str(i + 1), k) for i, k in enumerate(kids))
        frontier = nxt
    return out
