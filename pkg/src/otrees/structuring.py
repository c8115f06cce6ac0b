"""Structurings of finite O-forests.

An :class:`SOAForest` is an O-forest with a partition of its nodes into
lines (convex chains) and an optional axis.  This module validates and
builds structurings and computes depths, coverings, cuts, their defining
forests, tails, the ``U+`` arrangements and substitutions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .arrangement import Arrangement, CutTag
from .oforest import OForest, OForestError, validate_oforest

STAR_LABEL = "*"
TAIL_LABEL = "τ"


class StructuringError(ValueError):
    """Invalid structuring; ``kind`` names the failed condition."""

    def __init__(self, kind: str, witness: tuple, message: str):
        self.kind = kind
        self.witness = tuple(witness)
        super().__init__(message)


@dataclass(frozen=True)
class StructCut:
    """A cut ``(left, right)`` of a line, both parts listed bottom-up."""

    line: tuple
    left: tuple
    right: tuple

    @property
    def size(self) -> int:
        return len(self.left)

    def __str__(self):
        return "({" + ",".join(map(str, self.left)) + "},{" + ",".join(map(str, self.right)) + "})"


@dataclass(frozen=True)
class TailMark:
    """Stand-in element for the tail of ``line`` inside ``U+``."""

    line: tuple

    def __str__(self):
        return TAIL_LABEL


_INHERIT = object()


class SOAForest:
    """Finite structured O-forest with an optional axis.

    ``classes`` is stored as a tuple of lines, each a tuple listed bottom-up,
    ordered by first node in the forest's enumeration.  ``axis`` is one of
    the lines or None.  Equality is structural: same nodes, order, classes
    and axis.
    """

    def __init__(self, forest: OForest, classes: Iterable[Iterable], axis: Iterable | None = None):
        self.forest = forest
        pos = {x: i for i, x in enumerate(forest.nodes)}
        lines = []
        for c in classes:
            c = list(c)
            if c:
                lines.append(tuple(sorted(c, key=lambda y: (-len(forest.above[y]), pos[y]))))
        lines.sort(key=lambda c: min(pos[y] for y in c))
        self.classes = tuple(lines)
        self._class_of = {x: c for c in self.classes for x in c}
        if axis is not None:
            axis = frozenset(axis)
            if not axis:
                axis = None
            else:
                match = [c for c in self.classes if frozenset(c) == axis]
                if not match:
                    raise StructuringError("axis-not-a-class", tuple(axis), "axis is not one of the lines")
                axis = match[0]
        self.axis = axis
        self._decomp: dict = {}

    # basic access

    @property
    def nodes(self) -> tuple:
        return self.forest.nodes

    def leq(self, x, y) -> bool:
        return self.forest.leq(x, y)

    def lt(self, x, y) -> bool:
        return self.forest.lt(x, y)

    def line_of(self, x) -> tuple:
        return self._class_of[x]

    def class_index(self, U) -> int:
        key = frozenset(U)
        for i, c in enumerate(self.classes):
            if frozenset(c) == key:
                return i
        raise StructuringError("unknown-class", tuple(U), f"{set(U)} is not a line of the structuring")

    def line(self, U) -> tuple:
        """Normalize a class given as any iterable of its nodes."""
        return self.classes[self.class_index(U)]

    def __len__(self):
        return len(self.forest)

    def __eq__(self, other):
        return (
            isinstance(other, SOAForest)
            and self.forest == other.forest
            and {frozenset(c) for c in self.classes} == {frozenset(c) for c in other.classes}
            and (frozenset(self.axis) if self.axis else None) == (frozenset(other.axis) if other.axis else None)
        )

    def __hash__(self):
        return hash((self.forest, frozenset(frozenset(c) for c in self.classes)))

    def __repr__(self):
        cls = ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.classes)
        ax = "{" + ",".join(map(str, self.axis)) + "}" if self.axis else "none"
        return f"SOAForest(classes=[{cls}], axis={ax})"

    # depth and decomposition

    def decomposition(self, x) -> list[tuple]:
        """Intervals ``I_k, ..., I_0`` of ``[x, +inf[`` bottom-up."""
        if x not in self._decomp:
            runs: list[list] = []
            for y in self.forest.upset(x):
                if runs and self._class_of[runs[-1][-1]] is self._class_of[y]:
                    runs[-1].append(y)
                else:
                    runs.append([y])
            self._decomp[x] = [tuple(r) for r in runs]
        return self._decomp[x]

    def depth(self, x) -> int:
        return len(self.decomposition(x)) - 1

    def line_depth(self, U) -> int:
        return self.depth(self.line(U)[0])

    def beta(self, x) -> frozenset:
        return self.forest.above[x] - frozenset(self._class_of[x])

    def is_below(self, x, U) -> bool:
        """``x < U``: below every node of the line."""
        return all(self.forest.lt(x, u) for u in U)

    def is_under(self, U, y) -> bool:
        """``U < y``: every node of ``U`` is below ``y``."""
        return all(self.forest.lt(u, y) for u in U)

    # sub-structures

    def induced(self, X: Iterable, axis=_INHERIT) -> "SOAForest":
        """Induced sub-forest; by default the axis is the old axis restricted to ``X``."""
        X = set(X)
        sub = self.forest.induced(X)
        classes = [[y for y in c if y in X] for c in self.classes]
        if axis is _INHERIT:
            axis = [y for y in self.axis if y in X] if self.axis else None
        return SOAForest(sub, classes, axis or None)

    def forget_axis(self) -> "SOAForest":
        return SOAForest(self.forest, self.classes, None)

    def components(self) -> list["SOAForest"]:
        return [self.induced(f.nodes, axis=None) for f in self.forest.components()]

    def axes(self) -> list[tuple]:
        """Axes of the composing SO-trees: the line of each component's top node."""
        return [self._class_of[r] for r in self.forest.maximal()]

    # serialization

    def to_json(self) -> dict:
        data = self.forest.to_json()
        data["classes"] = [[str(y) for y in c] for c in self.classes]
        data["axis"] = self.classes.index(self.axis) if self.axis else None
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "SOAForest":
        forest = OForest.from_json(data)
        classes = data.get("classes")
        if classes is None:
            return build_structuring(forest)
        ax = data.get("axis")
        axis = classes[ax] if ax is not None else None
        return validate_structuring(forest, classes, axis)

    def to_dot(self, name="J") -> str:
        palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
        color = {x: palette[i % len(palette)] for i, c in enumerate(self.classes) for x in c}
        axis = set(self.axis or ())
        out = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
        for x in self.nodes:
            extra = ", penwidth=3" if x in axis else ""
            out.append(f"  {json.dumps(str(x))} [color={json.dumps(color[x])}{extra}];")
        for x, y in self.forest.cover_pairs():
            style = "penwidth=3" if x in axis and y in axis else "penwidth=1"
            same = self._class_of[x] is self._class_of[y]
            col = color[x] if same else "black"
            out.append(f"  {json.dumps(str(x))} -> {json.dumps(str(y))} "
                       f"[arrowhead=none, {style}, color={json.dumps(col)}];")
        out.append("}")
        return "\n".join(out)


# ---------------------------------------------------------------------------
# validation and construction


def validate_structuring(J: OForest, lines: Iterable[Iterable], axis: Iterable | None = None) -> SOAForest:
    """Check that ``lines`` structure ``J`` and that ``axis`` is an upwards closed line."""
    lines = [list(c) for c in lines]
    seen: dict = {}
    for i, c in enumerate(lines):
        if not c:
            raise StructuringError("not-a-partition", (), "empty class")
        for x in c:
            if x not in J:
                raise StructuringError("not-a-partition", (x,), f"{x!r} is not a node")
            if x in seen:
                raise StructuringError("not-a-partition", (x,), f"{x!r} lies in two classes")
            seen[x] = i
    missing = [x for x in J.nodes if x not in seen]
    if missing:
        raise StructuringError("not-a-partition", tuple(missing[:1]), f"{missing[0]!r} lies in no class")
    for c in lines:
        for i, x in enumerate(c):
            for y in c[i + 1:]:
                if not J.comparable(x, y):
                    raise StructuringError("not-a-chain", (x, y), f"class contains incomparable {x!r}, {y!r}")
        members = set(c)
        for x in c:
            for z in J.above[x]:
                if z in members:
                    continue
                for y in J.above[z]:
                    if y in members:
                        raise StructuringError(
                            "not-convex", (x, z, y), f"{z!r} lies between {x!r} and {y!r} but not in their class"
                        )
    S = SOAForest(J, lines, None)
    for x in J.nodes:
        runs = S.decomposition(x)
        used = set()
        for r in runs:
            U = S.line_of(r[0])
            if id(U) in used:
                raise StructuringError(
                    "interval-condition", (x, U[0]), f"line of {U[0]!r} meets the up-set of {x!r} twice"
                )
            used.add(id(U))
            low = r[0]
            closed = {u for u in U if J.leq(low, u)}
            if not closed <= set(r):
                raise StructuringError(
                    "interval-condition", (x, low), f"interval at {low!r} is not upwards closed in its line"
                )
    if axis is not None:
        axis = list(axis)
        if axis:
            key = frozenset(axis)
            if key not in {frozenset(c) for c in lines}:
                raise StructuringError("axis-not-a-class", tuple(axis), "axis is not one of the lines")
            for a in axis:
                out = J.above[a] - key
                if out:
                    y = next(iter(out))
                    raise StructuringError("axis-not-upwards-closed", (a, y), f"{y!r} above axis node {a!r}")
    return SOAForest(J, lines, axis)


def build_structuring(J: OForest, enumeration: Iterable | None = None) -> SOAForest:
    """Greedy structuring: repeatedly take a maximal line through the first uncovered node.

    The maximal line through ``x`` is ``[x, +inf[`` extended downwards by
    always stepping to the first son in the enumeration.  A single O-tree
    gets its top line as axis.
    """
    order = list(enumeration) if enumeration is not None else list(J.nodes)
    if set(order) != set(J.nodes) or len(order) != len(J.nodes):
        raise StructuringError("bad-enumeration", (), "enumeration must list every node once")
    rank = {x: i for i, x in enumerate(order)}
    sons: dict = {x: [] for x in J.nodes}
    for x, p in J.cover_pairs():
        sons[p].append(x)
    for p in sons:
        sons[p].sort(key=rank.__getitem__)
    covered: set = set()
    classes = []
    for x in order:
        if x in covered:
            continue
        line = list(J.upset(x))
        y = x
        while sons[y]:
            y = sons[y][0]
            line.append(y)
        U = [z for z in line if z not in covered]
        covered.update(U)
        classes.append(U)
    S = SOAForest(J, classes, None)
    if J.is_otree() and J.nodes:
        S = SOAForest(J, classes, S.line_of(J.maximal()[0]))
    return S


def trivial_structuring(J: OForest) -> SOAForest:
    """All-singletons partition."""
    return validate_structuring(J, [[x] for x in J.nodes])


# ---------------------------------------------------------------------------
# covering, cuts, tails


def covers(S: SOAForest, U, W) -> bool:
    """``U ≺ W``: some node of W is above all of U and nothing between U and W lies outside W."""
    U, W = S.line(U), S.line(W)
    Wset = set(W)
    if not any(S.is_under(U, w) for w in W):
        return False
    for x in S.nodes:
        if x not in Wset and S.is_under(U, x) and any(S.lt(x, w) for w in W):
            return False
    return True


def cut_defined_by(S: SOAForest, U, x) -> StructCut | None:
    """``kappa(U, x)`` when ``x`` defines a cut of ``U``, else None."""
    U = S.line(U)
    if x in U:
        return None
    right = tuple(u for u in U if S.lt(x, u))
    left = tuple(u for u in U if not S.lt(x, u))
    if not right or not left:
        return None
    if any(S.forest.comparable(x, u) for u in left):
        return None
    return StructCut(U, left, right)


def cuts(S: SOAForest, U) -> list[StructCut]:
    """Distinct cuts of ``U``, ordered by the size of their left part."""
    U = S.line(U)
    found = {}
    for x in S.nodes:
        k = cut_defined_by(S, U, x)
        if k is not None:
            found.setdefault(k.size, k)
    return [found[n] for n in sorted(found)]


def all_cuts(S: SOAForest) -> list[StructCut]:
    return [k for U in S.classes for k in cuts(S, U)]


def def_nodes(S: SOAForest, kappa: StructCut) -> list:
    return [x for x in S.nodes if cut_defined_by(S, kappa.line, x) == kappa]


def def_of(S: SOAForest, kappa: StructCut) -> SOAForest:
    """The SO-forest (no axis) of the nodes defining ``kappa``."""
    X = def_nodes(S, kappa)
    if not X:
        raise StructuringError("not-a-cut", (), f"{kappa} is not defined by any node")
    return S.induced(X)


def tail_nodes(S: SOAForest, U) -> list:
    U = S.line(U)
    return [x for x in S.nodes if x not in U and S.is_below(x, U)]


def tail(S: SOAForest, U) -> SOAForest:
    return S.induced(tail_nodes(S, U))


def down(S: SOAForest, U) -> SOAForest:
    """``J`` restricted to everything below some node of ``U``, with axis ``U``."""
    U = S.line(U)
    W = set(U)
    for u in U:
        W |= S.forest.below(u)
    return S.induced(W, axis=U)


# ---------------------------------------------------------------------------
# U+ and substitution


def u_plus(S: SOAForest, U) -> Arrangement:
    """``U`` with its cuts in place, prefixed by the tail marker when the tail is nonempty.

    Elements are the nodes of ``U``, :class:`StructCut` values and possibly
    one :class:`TailMark`; labels are ``"*"``, :class:`CutTag` and ``"τ"``.
    """
    U = S.line(U)
    at = {k.size: k for k in cuts(S, U)}
    items = []
    if tail_nodes(S, U):
        items.append((TailMark(U), TAIL_LABEL))
    for i, u in enumerate(U):
        if i in at:
            items.append((at[i], CutTag(i)))
        items.append((u, STAR_LABEL))
    return Arrangement(items)


def labelled_u_plus(S: SOAForest, U, s: Mapping) -> Arrangement:
    """``s ▷ U+``: cuts and the tail marker relabelled by ``s``.

    ``s`` is keyed by :class:`StructCut` and :class:`TailMark` values.
    """
    return Arrangement((e, s[e] if isinstance(e, (StructCut, TailMark)) else lab) for e, lab in u_plus(S, U))


def substitute(H: Arrangement, X: Iterable, F: Mapping) -> SOAForest:
    """``H[x <- F_x ; x in X]``: the forests replace their slots below the later elements."""
    X = list(X)
    Xset = set(X)
    carrier = H.elements
    for x in X:
        if x not in set(carrier):
            raise StructuringError("not-in-carrier", (x,), f"{x!r} is not an element of the linear order")
    seen = set()
    for x in X:
        ns = set(F[x].nodes)
        clash = ns & seen or ns & (set(carrier) - Xset)
        if clash:
            raise StructuringError("overlap", tuple(clash)[:1], "substituted forests are not disjoint")
        seen |= ns
    nodes, above, classes = [], {}, []
    axis = [e for e in carrier if e not in Xset]
    for i, e in enumerate(carrier):
        later = [v for v in carrier[i + 1:] if v not in Xset]
        if e in Xset:
            f = F[e]
            for y in f.nodes:
                nodes.append(y)
                above[y] = set(f.forest.above[y]) | set(later)
            classes.extend(f.classes)
        else:
            nodes.append(e)
            above[e] = set(later)
    if axis:
        classes.append(axis)
    return SOAForest(OForest(nodes, above), classes, axis or None)


def recompose(S: SOAForest, U) -> SOAForest:
    """Right-hand side of the recomposition identity for ``U``."""
    U = S.line(U)
    H = u_plus(S, U)
    F = {}
    for e in H.elements:
        if isinstance(e, StructCut):
            F[e] = def_of(S, e)
        elif isinstance(e, TailMark):
            F[e] = tail(S, U)
    return substitute(H, list(F), F)


def forest_union(*forests: SOAForest) -> SOAForest:
    """Disjoint union without axis."""
    nodes, above, classes = [], {}, []
    for f in forests:
        if set(f.nodes) & set(nodes):
            raise StructuringError("overlap", (), "forests share nodes")
        nodes.extend(f.nodes)
        above.update(f.forest.above)
        classes.extend(f.classes)
    return SOAForest(OForest(nodes, above), classes, None)


# ---------------------------------------------------------------------------
# defining nodes


def defines_tail(S: SOAForest, x, W) -> bool:
    Ux, W = S.line_of(x), S.line(W)
    return Ux is not W and all(S.is_below(y, W) for y in Ux) and covers(S, Ux, W)


def defines_cut(S: SOAForest, x, kappa: StructCut) -> bool:
    Ux = S.line_of(x)
    if Ux == kappa.line:
        return False
    if not all(S.lt(y, w) for y in Ux for w in kappa.right):
        return False
    if any(S.forest.comparable(y, w) for y in Ux for w in kappa.left):
        return False
    return covers(S, Ux, kappa.line)


def well_defining_triple(S: SOAForest) -> tuple[list, list, list]:
    """One defining node per line, per nonempty tail and per cut.

    Ties go to the node that comes first in the forest's enumeration.
    """
    NU = [U[0] if len(U) == 1 else min(U, key=S.nodes.index) for U in S.classes]
    NT, NK = [], []
    for W in S.classes:
        if tail_nodes(S, W):
            NT.append(next(x for x in S.nodes if defines_tail(S, x, W)))
        for k in cuts(S, W):
            NK.append(next(x for x in S.nodes if defines_cut(S, x, k)))
    return NU, NT, NK


__all__ = [
    "SOAForest", "STAR_LABEL", "StructCut", "StructuringError", "TAIL_LABEL", "TailMark", "all_cuts",
    "build_structuring", "covers", "cut_defined_by", "cuts", "def_nodes", "def_of", "defines_cut",
    "defines_tail", "down", "forest_union", "labelled_u_plus", "recompose", "substitute", "tail",
    "line_tree", "tail_nodes", "trivial_structuring", "u_plus", "validate_structuring", "well_defining_triple",
    "OForestError", "validate_oforest",
]


def line_tree(S: SOAForest) -> dict:
    """Tree of lines: for each line, its ``U+`` slots and the lines hung in each slot.

    A line ``W`` of depth ``k+1`` hangs from the line ``P`` of the next
    interval above it: in the tail slot of ``P`` when ``W < P``, otherwise
    in the slot of the cut ``W`` defines.  Returns ``{U: (u_plus, {slot: [W, ...]})}``.
    """
    out = {U: (u_plus(S, U), {}) for U in S.classes}
    for W in S.classes:
        runs = S.decomposition(W[0])
        if len(runs) < 2:
            continue
        P = S.line_of(runs[1][0])
        if S.is_below(W[-1], P):
            slot = TailMark(P)
        else:
            slot = cut_defined_by(S, P, W[0])
        out[P][1].setdefault(slot, []).append(W)
    return out
