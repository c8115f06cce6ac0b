"""Arrangements: labelled countable linear orders.

A finite arrangement is an explicit sequence of ``(element, label)`` pairs.
A regular arrangement is an equation system over a binary concatenation
symbol, a nullary empty symbol and nullary letters; its value is the set of
letter occurrences ordered lexicographically.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .terms import (
    CAT, OM, OMEGA, EquationSystem, Term, TermError, occurrences_language,
    system_to_automaton,
)


class ArrangementError(ValueError):
    pass


class Arrangement:
    """Finite arrangement: elements in order, each with a label."""

    __slots__ = ("items",)

    def __init__(self, items: Iterable[tuple[Hashable, object]] = ()):
        self.items = tuple((e, lab) for e, lab in items)
        if len({e for e, _ in self.items}) != len(self.items):
            raise ArrangementError("repeated element in an arrangement")

    @classmethod
    def from_word(cls, labels: Iterable[object]) -> "Arrangement":
        return cls(enumerate(labels))

    @property
    def elements(self) -> tuple:
        return tuple(e for e, _ in self.items)

    @property
    def labels(self) -> tuple:
        return tuple(lab for _, lab in self.items)

    def label_of(self, e):
        for x, lab in self.items:
            if x == e:
                return lab
        raise KeyError(e)

    def index(self) -> dict:
        return {e: i for i, (e, _) in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __eq__(self, other):
        return isinstance(other, Arrangement) and self.items == other.items

    def __hash__(self):
        return hash(self.items)

    def __repr__(self):
        return f"Arrangement({self})"

    def __str__(self):
        return " ".join(str(lab) for lab in self.labels)

    def relabel(self, fn) -> "Arrangement":
        return Arrangement((e, fn(lab)) for e, lab in self.items)

    def restrict(self, keep) -> "Arrangement":
        return Arrangement((e, lab) for e, lab in self.items if e in keep)


EMPTY = Arrangement()


def arr_value(t: Term, cat=CAT, om=OM) -> Arrangement:
    """Letter occurrences of a finite term, ordered by <=lex."""
    occ = [(p, u.symbol) for p, u in t.positions() if not u.args and u.symbol != om]
    for p, u in t.positions():
        if u.args and u.symbol != cat:
            raise ArrangementError(f"{u.symbol!r} is not an arrangement operator")
    return Arrangement(sorted(occ))


def arr_concat(u: Arrangement, v: Arrangement) -> Arrangement:
    """Concatenation; elements are renumbered when the operands share names."""
    if set(u.elements) & set(v.elements):
        return Arrangement.from_word(u.labels + v.labels)
    return Arrangement(u.items + v.items)


def finite_arr_iso(u: Arrangement, v: Arrangement) -> bool:
    return u.labels == v.labels


# ---------------------------------------------------------------------------
# regular arrangements


class RegularArrangement:
    """An arrangement given by an equation system.

    ``cat`` and ``om`` name the concatenation and empty symbols; every other
    nullary symbol is a letter.
    """

    def __init__(self, system: EquationSystem, cat=CAT, om=OM):
        for x, (sym, kids) in system.equations.items():
            if sym == cat:
                if len(kids) != 2:
                    raise ArrangementError(f"{x!r}: concatenation needs two arguments")
            elif kids:
                raise ArrangementError(f"{x!r}: letter {sym!r} must be nullary")
        self.system = system
        self.cat = cat
        self.om = om

    def __repr__(self):
        kind = "finite" if self.is_finite() else "infinite"
        return f"RegularArrangement({kind}, {len(self.system.equations)} equations)"

    def __eq__(self, other):
        return (
            isinstance(other, RegularArrangement)
            and (self.cat, self.om) == (other.cat, other.om)
            and self.system == other.system
        )

    def __hash__(self):
        return hash(self.system)

    @classmethod
    def from_word(cls, labels: Iterable[object], cat=CAT, om=OM) -> "RegularArrangement":
        """Right comb ``a1 • (a2 • (... • an))``, or the empty symbol."""
        labels = list(labels)
        if not labels:
            return cls(EquationSystem({"w": (om, ())}, "w"), cat, om)
        eqs, order = {}, []
        for i, lab in enumerate(labels):
            eqs[f"a{i}"] = (lab, ())
        names = [f"a{i}" for i in range(len(labels))]
        cur = names[-1]
        for i in range(len(labels) - 2, -1, -1):
            eqs[f"w{i}"] = (cat, (names[i], cur))
            cur = f"w{i}"
        order = sorted(eqs, key=lambda n: (n[0] != "w", int(n[1:])))
        return cls(EquationSystem(eqs, cur, order), cat, om)

    @classmethod
    def from_arrangement(cls, arr: Arrangement, cat=CAT, om=OM) -> "RegularArrangement":
        return cls.from_word(arr.labels, cat, om)

    def letters(self) -> set:
        return {
            sym for x in self.system.reachable()
            if (sym := self.system.equations[x][0]) not in (self.cat, self.om)
        }

    def is_finite(self) -> bool:
        return self.system.is_finite()

    def value(self) -> Arrangement:
        if not self.is_finite():
            raise ArrangementError("infinite arrangement has no explicit value")
        return arr_value(self.system.to_term(), self.cat, self.om)

    def normalized(self):
        return system_to_automaton(self.system).canonical()


def bounded_window(w: RegularArrangement, B: int) -> Arrangement:
    """Letters at positions of length at most ``B``, in the arrangement order."""
    sys = w.system
    out = []
    stack = [("", sys.root)]
    while stack:
        p, x = stack.pop()
        sym, kids = sys.equations[x]
        if not kids:
            if sym != w.om:
                out.append((p, sym))
            continue
        if len(p) < B:
            stack.extend((p + str(i + 1), k) for i, k in enumerate(kids))
    out.sort()
    return Arrangement(out)


def arrangement_of(w, B: int | None = None) -> Arrangement:
    """Explicit value of a finite arrangement, or its window when infinite."""
    if isinstance(w, Arrangement):
        return w
    if w.is_finite():
        return w.value()
    if B is None:
        raise ArrangementError("an infinite arrangement needs a window bound")
    return bounded_window(w, B)


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def term_to_arrangement(sys: EquationSystem) -> RegularArrangement:
    """Arrangement of the positions of a term in the inorder, labelled by symbol.

    Each equation ``x = f(y, z)`` becomes ``x = (y • f) • z``, ``x = f(y)``
    becomes ``x = y • f`` and ``x = f`` stays a letter.
    """
    symbols = {sym for sym, _ in sys.equations.values()}
    cat = _fresh(CAT, symbols)
    om = _fresh(OM, symbols | {cat})
    eqs, order = {}, []
    taken = set(sys.equations)

    def aux(base):
        name = _fresh(base, taken)
        taken.add(name)
        return name

    for x in sys.order:
        sym, kids = sys.equations[x]
        if not kids:
            eqs[x] = (sym, ())
            order.append(x)
            continue
        letter = aux(f"{x}.f")
        eqs[letter] = (sym, ())
        if len(kids) == 1:
            eqs[x] = (cat, (kids[0], letter))
            order += [x, letter]
        else:
            left = aux(f"{x}.l")
            eqs[left] = (cat, (kids[0], letter))
            eqs[x] = (cat, (left, kids[1]))
            order += [x, left, letter]
    return RegularArrangement(EquationSystem(eqs, sys.root, order), cat, om)


def erase_relabel(w: RegularArrangement, r: Mapping) -> RegularArrangement:
    """Apply a partial letter map; letters outside its domain are erased."""
    eqs = {}
    for x, (sym, kids) in w.system.equations.items():
        if kids or sym == w.om:
            eqs[x] = (sym, kids)
        elif sym in r:
            eqs[x] = (r[sym], ())
        else:
            eqs[x] = (w.om, ())
    return RegularArrangement(EquationSystem(eqs, w.system.root, w.system.order), w.cat, w.om)


# ---------------------------------------------------------------------------
# labelled sets


def set_of(w) -> dict:
    """Letter counts, in the naturals or ``OMEGA``."""
    if isinstance(w, Arrangement):
        return dict(Counter(w.labels))
    aut = system_to_automaton(w.system)
    out = {}
    for a in w.letters():
        n = occurrences_language(aut, a).count()
        if n:
            out[a] = n
    return out


def multiset_add(*parts: Mapping) -> dict:
    out: dict = {}
    for m in parts:
        for k, n in m.items():
            out[k] = out.get(k, 0) + n
    return {k: n for k, n in out.items() if n}


def multiset_str(m: Mapping) -> str:
    return "{" + ", ".join(f"{k}:{'ω' if n == OMEGA else n}" for k, n in sorted(m.items(), key=str)) + "}"


# ---------------------------------------------------------------------------
# cuts of linear orders


@dataclass(frozen=True)
class LinearCut:
    left: tuple
    right: tuple

    def __post_init__(self):
        if not self.left or not self.right:
            raise ArrangementError("both parts of a cut must be nonempty")


@dataclass(frozen=True)
class CutTag:
    """Synthetic label for an inserted cut, carrying its left-part size."""

    size: int

    def __str__(self):
        return f"κ{self.size}"


def cuts_extend(U: Arrangement, K, labels: Mapping | None = None) -> Arrangement:
    """Insert the cuts ``K`` of ``U`` at their places.

    A cut sits after every element of its left part and before every element
    of its right part; two cuts are ordered by inclusion of left parts.
    The inserted element is the cut itself, labelled by ``labels[cut]`` or a
    :class:`CutTag`.
    """
    order = U.elements
    at = {}
    for cut in K:
        n = len(cut.left)
        if tuple(order[:n]) != tuple(cut.left) or tuple(order[n:]) != tuple(cut.right):
            if set(cut.left) | set(cut.right) != set(order):
                raise ArrangementError(f"cut {cut} does not partition the arrangement")
            raise ArrangementError(f"cut {cut} parts are not an initial and a final interval")
        if n in at:
            raise ArrangementError(f"two distinct cuts with left part of size {n}")
        at[n] = cut
    out = []
    for i, item in enumerate(U.items):
        if i in at:
            cut = at[i]
            out.append((cut, labels[cut] if labels else CutTag(i)))
        out.append(item)
    return Arrangement(out)


def cut_of_position(U: Arrangement, n: int) -> LinearCut:
    els = U.elements
    return LinearCut(tuple(els[:n]), tuple(els[n:]))


__all__ = [
    "Arrangement", "ArrangementError", "CutTag", "EMPTY", "LinearCut", "RegularArrangement",
    "arr_concat", "arr_value", "arrangement_of", "bounded_window", "cut_of_position", "cuts_extend",
    "erase_relabel", "finite_arr_iso", "multiset_add", "multiset_str", "set_of", "term_to_arrangement",
    "TermError",
]
