"""Values of concrete terms over ``{cat, fg, om}`` and node constants.

Two independent evaluators are provided: :func:`val_direct` reads the order,
lines and axis off term positions, :func:`val_algebraic` folds the term
through the SOA-forest operations.  Star leaves are named by their
position so that truncations of regular terms evaluate to explicit forests.
"""
from __future__ import annotations

from typing import Iterable

from .oforest import OForest
from .structuring import (
    SOAForest, StructCut, TailMark, line_tree, u_plus,
)
from .terms import (
    CAT, FG, OM, ROOT, STAR, EquationSystem, Term, TermError, is_node_constant, join,
    node_constant, position_label, truncate,
)


def node_name(symbol, pos: str):
    """Node named by a leaf: the constant's name, or the position of a star."""
    if symbol == STAR:
        return position_label(pos)
    if is_node_constant(symbol):
        return symbol[1:]
    return None


class Regions:
    """Positions of a finite term grouped into fg-free regions.

    ``top[p]`` is the region top of a non-fg position: the root or the son
    of an fg occurrence.  ``nodes`` maps node names to positions.
    """

    def __init__(self, t: Term):
        self.term = t
        self.labels = {}
        self.top = {}
        self.nodes = {}
        for p, u in t.positions():
            self.labels[p] = u.symbol
            if u.symbol == FG:
                continue
            parent = p[:-1]
            if p == ROOT or self.labels[parent] == FG:
                self.top[p] = p
            else:
                self.top[p] = self.top[parent]
            name = node_name(u.symbol, p)
            if name is not None:
                if name in self.nodes:
                    raise TermError(f"node {name!r} occurs twice")
                self.nodes[name] = p

    def less(self, p: str, q: str) -> bool:
        """Order between two node positions."""
        return p < q and self.top[q] == self.top.get(join(p, q))


def equivalent_positions(t: Term, p: str, q: str) -> bool:
    """``p ≈ q``: no fg strictly inside the tree path between them (the ends may be fg)."""
    j = join(p, q)
    inner = {p[:i] for i in range(len(j), len(p))} | {q[:i] for i in range(len(j), len(q))}
    inner -= {p, q}
    labels = t.labels()
    return all(labels[r] != FG for r in inner)


def val_direct(t: Term) -> SOAForest:
    """Value read off the positions of ``t``."""
    R = Regions(t)
    names = sorted(R.nodes, key=R.nodes.__getitem__)
    pos = [R.nodes[n] for n in names]
    above = {}
    for i, n in enumerate(names):
        p = pos[i]
        above[n] = [names[j] for j in range(i + 1, len(names)) if R.less(p, pos[j])]
    groups: dict = {}
    for n, p in zip(names, pos):
        groups.setdefault(R.top[p], []).append(n)
    axis = None
    if R.labels[ROOT] != FG and ROOT in groups:
        axis = groups[ROOT]
    return SOAForest(OForest(names, above), list(groups.values()), axis)


# ---------------------------------------------------------------------------
# the algebra


EMPTY = SOAForest(OForest((), {}), ())


def soa_omega() -> SOAForest:
    return EMPTY


def soa_node(u) -> SOAForest:
    return SOAForest(OForest([u], {u: ()}), [[u]], [u])


def soa_fg(J: SOAForest) -> SOAForest:
    return J.forget_axis() if J.axis else J


def _rename_apart(J: SOAForest, taken: set) -> SOAForest:
    clash = set(J.nodes) & taken
    if not clash:
        return J
    used = taken | set(J.nodes)
    ren = {}
    for x in J.nodes:
        if x in clash:
            y = f"{x}'"
            while y in used:
                y += "'"
            used.add(y)
            ren[x] = y
        else:
            ren[x] = x
    forest = OForest([ren[x] for x in J.nodes], {ren[x]: [ren[y] for y in J.forest.above[x]] for x in J.nodes})
    classes = [[ren[x] for x in c] for c in J.classes]
    axis = [ren[x] for x in J.axis] if J.axis else None
    return SOAForest(forest, classes, axis)


def soa_concat(J: SOAForest, K: SOAForest) -> SOAForest:
    """Concatenation along the axes; K is renamed apart (suffix ``'``) on collision."""
    K = _rename_apart(K, set(J.nodes))
    A, B = list(J.axis or ()), list(K.axis or ())
    above = {x: set(J.forest.above[x]) | set(B) for x in J.nodes}
    above.update({x: set(K.forest.above[x]) for x in K.nodes})
    classes = [c for c in J.classes if c is not J.axis] + [c for c in K.classes if c is not K.axis]
    if A or B:
        classes.append(A + B)
    return SOAForest(OForest(J.nodes + K.nodes, above), classes, (A + B) or None)


def val_algebraic(t: Term) -> SOAForest:
    """Bottom-up evaluation through :func:`soa_concat`, :func:`soa_fg` and friends."""

    def go(u: Term, p: str) -> SOAForest:
        if u.symbol == CAT:
            return soa_concat(go(u.args[0], p + "1"), go(u.args[1], p + "2"))
        if u.symbol == FG:
            return soa_fg(go(u.args[0], p + "1"))
        if u.symbol == OM:
            return soa_omega()
        name = node_name(u.symbol, p)
        if name is None:
            raise TermError(f"{u.symbol!r} is not an SOA-forest operation")
        return soa_node(name)

    return go(t, ROOT)


def approx_val(sys, L: int) -> SOAForest:
    """Value of the depth-``L`` truncation, with ``om`` as filler."""
    return val_direct(truncate(sys, L, OM))


def erase_nodes(t: Term, X: Iterable) -> Term:
    """Replace every node leaf outside ``X`` by ``om``."""
    keep = set(X)
    labels = {}
    for p, u in t.positions():
        name = node_name(u.symbol, p)
        labels[p] = OM if name is not None and name not in keep else u.symbol
    return Term.from_labels(labels)


# ---------------------------------------------------------------------------
# representative positions


def rep_line(t: Term, U, regions: Regions | None = None) -> str:
    """Representative position of a line: the top of its fg-free region."""
    R = regions or Regions(t)
    u = next(iter(U))
    return R.top[R.nodes[u]]


def rep_cut(t: Term, kappa: StructCut, regions: Regions | None = None) -> str:
    """Lowest join of a left-part and a right-part position."""
    R = regions or Regions(t)
    joins = {join(R.nodes[u], R.nodes[v]) for u in kappa.left for v in kappa.right}
    return max(joins, key=len)


# ---------------------------------------------------------------------------
# from forests back to terms


def _comb(parts: list[Term]) -> Term:
    if not parts:
        return Term(OM)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Term(CAT, [p, out])
    return out


def term_of(J: SOAForest) -> Term:
    """A concrete term whose value is exactly ``J``."""
    tree = line_tree(J)

    def line_term(U) -> Term:
        plus, hung = tree[U]
        parts = []
        for e in plus.elements:
            if isinstance(e, (StructCut, TailMark)):
                parts.append(forest_term(hung.get(e, [])))
            else:
                parts.append(Term(node_constant(str(e))))
        return _comb(parts)

    def forest_term(axes) -> Term:
        return _comb([Term(FG, [line_term(W)]) for W in axes])

    tops = J.axes()
    if J.axis:
        rest = [W for W in tops if W is not J.axis]
        main = line_term(J.axis)
        return Term(CAT, [main, forest_term(rest)]) if rest else main
    return forest_term(tops)


# ---------------------------------------------------------------------------
# isomorphism


def soa_canon(J: SOAForest):
    """Canonical form: each line is its ``U+`` word with slots replaced by sorted child forms."""
    tree = line_tree(J)
    memo: dict = {}

    def line_form(U):
        if U not in memo:
            plus, hung = tree[U]
            word = []
            for e in plus.elements:
                if isinstance(e, StructCut):
                    word.append(("cut", forest_form(hung.get(e, []))))
                elif isinstance(e, TailMark):
                    word.append(("tail", forest_form(hung.get(e, []))))
                else:
                    word.append("*")
            memo[U] = tuple(word)
        return memo[U]

    def forest_form(lines):
        return tuple(sorted((line_form(W) for W in lines), key=repr))

    tops = J.axes()
    if J.axis:
        return ("axis", line_form(J.axis), forest_form([W for W in tops if W is not J.axis]))
    return ("forest", forest_form(tops))


def soa_iso(J: SOAForest, K: SOAForest) -> bool:
    return len(J) == len(K) and soa_canon(J) == soa_canon(K)


def otree_canon(F: OForest):
    sons: dict = {x: [] for x in F.nodes}
    for x, p in F.cover_pairs():
        sons[p].append(x)
    memo: dict = {}

    def form(x):
        if x not in memo:
            memo[x] = "(" + "".join(sorted(form(y) for y in sons[x])) + ")"
        return memo[x]

    return "".join(sorted(form(r) for r in F.maximal()))


def otree_iso(J: OForest, K: OForest) -> bool:
    return len(J) == len(K) and otree_canon(J) == otree_canon(K)


__all__ = [
    "EMPTY", "Regions", "approx_val", "equivalent_positions", "erase_nodes", "node_name", "otree_canon", "otree_iso",
    "rep_cut", "rep_line", "soa_canon", "soa_concat", "soa_fg", "soa_iso", "soa_node", "soa_omega",
    "term_of", "u_plus", "val_algebraic", "val_direct",
]
