"""Description schemes: finite presentations of structured O-trees.

A scheme ``(D, Q, d_ax, m, w)`` names line types ``D`` and forest types
``Q = Q_cut + Q_tail``; ``w[d]`` is the arrangement of a line of type ``d``
over ``{"*"} + Q`` and ``m[q]`` is the multiset of line types of the axes of
a forest of type ``q``.

Counts are non-negative integers or ``OMEGA``.  Arrangements ``w[d]`` are
:class:`~otrees.arrangement.Arrangement` (finite, explicit) or
:class:`~otrees.arrangement.RegularArrangement`.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import networkx as nx

from .arrangement import (
    Arrangement, RegularArrangement, arrangement_of, bounded_window, set_of,
)
from .structuring import (
    STAR_LABEL, SOAForest, StructCut, TailMark, forest_union, labelled_u_plus, line_tree,
    substitute,
)
from .terms import (
    CAT, FG, OM, OMEGA, STAR, Automaton, EquationSystem, count_paths, is_node_constant,
    occurrences_language, position_label, system_to_automaton,
)
from .values import Regions, rep_cut, rep_line, soa_iso, val_direct


class SchemeError(ValueError):
    pass


def _count_str(n):
    return "omega" if n == OMEGA else n


@dataclass
class DescriptionScheme:
    D: tuple
    Q_cut: tuple
    Q_tail: tuple
    d_ax: object
    m: dict
    w: dict

    def __post_init__(self):
        self.D = tuple(self.D)
        self.Q_cut = tuple(self.Q_cut)
        self.Q_tail = tuple(self.Q_tail)
        self.m = {q: {d: n for d, n in ms.items() if n} for q, ms in self.m.items()}
        self.w = dict(self.w)

    @property
    def Q(self) -> tuple:
        return self.Q_cut + self.Q_tail

    def validate(self) -> "DescriptionScheme":
        D, Q = set(self.D), set(self.Q)
        if len(D) != len(self.D) or len(Q) != len(self.Q):
            raise SchemeError("repeated label")
        if D & Q:
            raise SchemeError(f"labels in both D and Q: {sorted(map(str, D & Q))}")
        if STAR_LABEL in D | Q:
            raise SchemeError("'*' is reserved for nodes")
        if self.d_ax not in D:
            raise SchemeError(f"axis label {self.d_ax!r} not in D")
        if set(self.m) != Q:
            raise SchemeError("m must give one multiset per label of Q")
        for q, ms in self.m.items():
            for d, n in ms.items():
                if d not in D:
                    raise SchemeError(f"m[{q!r}] counts {d!r}, which is not in D")
                if n != OMEGA and (not isinstance(n, int) or n < 0):
                    raise SchemeError(f"m[{q!r}][{d!r}] = {n!r} is not a count")
        if set(self.w) != D:
            raise SchemeError("w must give one arrangement per label of D")
        for d, w in self.w.items():
            letters = set(w.labels) if isinstance(w, Arrangement) else w.letters()
            bad = letters - Q - {STAR_LABEL}
            if bad:
                raise SchemeError(f"w[{d!r}] uses letters outside * and Q: {sorted(map(str, bad))}")
            _check_tail_first(d, w, set(self.Q_tail))
        return self

    def relabel(self, fd: Mapping, fq: Mapping) -> "DescriptionScheme":
        def lw(w):
            f = lambda a: fq.get(a, a)
            if isinstance(w, Arrangement):
                return w.relabel(f)
            return RegularArrangement(w.system.relabel(lambda s: s if s in (w.cat, w.om) else f(s)), w.cat, w.om)

        return DescriptionScheme(
            [fd[d] for d in self.D], [fq[q] for q in self.Q_cut], [fq[q] for q in self.Q_tail],
            fd[self.d_ax],
            {fq[q]: {fd[d]: n for d, n in ms.items()} for q, ms in self.m.items()},
            {fd[d]: lw(w) for d, w in self.w.items()},
        )

    def to_json(self) -> dict:
        def wj(w):
            if isinstance(w, Arrangement):
                return [str(a) for a in w.labels]
            aut = system_to_automaton(w.system)
            data = aut.to_json()
            data.update(cat=w.cat, om=w.om)
            return data

        return {
            "D": [str(d) for d in self.D],
            "Q_cut": [str(q) for q in self.Q_cut],
            "Q_tail": [str(q) for q in self.Q_tail],
            "d_ax": str(self.d_ax),
            "m": {str(q): {str(d): _count_str(n) for d, n in ms.items()} for q, ms in self.m.items()},
            "w": {str(d): wj(w) for d, w in self.w.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DescriptionScheme":
        try:
            w = {}
            for d, v in data["w"].items():
                if isinstance(v, list):
                    w[d] = Arrangement.from_word(v)
                else:
                    aut = Automaton.from_json(v)
                    sysm = EquationSystem(aut.delta, aut.initial, aut.states)
                    w[d] = RegularArrangement(sysm, v.get("cat", CAT), v.get("om", OM))
            m = {q: {d: OMEGA if n == "omega" else int(n) for d, n in ms.items()}
                 for q, ms in data["m"].items()}
            return cls(data["D"], data.get("Q_cut", []), data.get("Q_tail", []), data["d_ax"], m, w).validate()
        except (KeyError, TypeError, AttributeError) as e:
            raise SchemeError(f"malformed scheme JSON: {e}") from None


def _check_tail_first(d, w, tails: set):
    if isinstance(w, Arrangement):
        for i, lab in enumerate(w.labels):
            if lab in tails and i != 0:
                raise SchemeError(f"tail label {lab!r} of w[{d!r}] is not its least element")
        return
    aut = system_to_automaton(w.system)
    occ = []
    for lab in w.letters() & tails:
        dfa = occurrences_language(aut, lab)
        if dfa.count() == OMEGA:
            raise SchemeError(f"w[{d!r}] has more than one tail label")
        occ += [(p, lab) for p in dfa.words(len(w.system.equations) + 1)]
    if not occ:
        return
    if len(occ) > 1:
        raise SchemeError(f"w[{d!r}] has more than one tail label")
    p, lab = occ[0]
    has = _has_letter(w)
    x = w.system.root
    for c in p:
        kids = w.system.equations[x][1]
        if c == "2" and has[kids[0]]:
            raise SchemeError(f"tail label {lab!r} of w[{d!r}] is not its least element")
        x = kids[int(c) - 1]


def _has_letter(w: RegularArrangement) -> dict:
    eqs = w.system.equations
    has = {x: False for x in eqs}
    changed = True
    while changed:
        changed = False
        for x, (sym, kids) in eqs.items():
            v = any(has[k] for k in kids) if kids else sym != w.om
            if v and not has[x]:
                has[x] = changed = True
    return has


# ---------------------------------------------------------------------------
# labellings


@dataclass
class GoodLabelling:
    """``r`` maps lines to D; ``s`` maps :class:`StructCut` / :class:`TailMark` slots to Q."""

    r: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)


def _multiset(labels) -> dict:
    return dict(Counter(labels))


def _norm_counts(ms: Mapping, omega) -> dict | None:
    out = {}
    for d, n in ms.items():
        if n == OMEGA:
            if omega is None:
                return None
            n = omega
        if n:
            out[d] = n
    return out


def _target_word(delta: DescriptionScheme, d, depth: int, drop_depth, omega) -> tuple | None:
    w = delta.w[d]
    if isinstance(w, RegularArrangement) and not w.is_finite():
        if omega is None:
            return None
        word = bounded_window(w, omega).labels
    else:
        word = arrangement_of(w).labels
    if drop_depth is not None and depth >= drop_depth:
        word = tuple(a for a in word if a == STAR_LABEL)
    return tuple(word)


def _drop_depth(depth_bound):
    return None if depth_bound is None else max(depth_bound - 1, 0)


def labelling_failures(J: SOAForest, delta: DescriptionScheme, lab: GoodLabelling,
                       depth: int | None = None, omega: int | None = None) -> list[str]:
    """Reasons why ``lab`` does not witness that ``delta`` describes ``J``; empty on success.

    ``depth`` and ``omega`` relax the check for finite approximations: lines
    at depth ``depth - 1`` may omit the Q letters of their arrangement, an
    ``OMEGA`` count matches exactly ``omega`` components and an infinite
    arrangement is compared through its window of bound ``omega``.
    """
    out = []
    if J.axis is None:
        return ["the forest has no axis"]
    if not J.forest.is_otree():
        return ["the forest has several components"]
    tree = line_tree(J)
    for U in J.classes:
        if U not in lab.r:
            out.append(f"line {set(U)} is not labelled")
        elif lab.r[U] not in delta.D:
            out.append(f"label {lab.r[U]!r} of line {set(U)} is not in D")
    for U, (plus, hung) in tree.items():
        for e in plus.elements:
            if isinstance(e, StructCut):
                if lab.s.get(e) not in delta.Q_cut:
                    out.append(f"cut {e} has label {lab.s.get(e)!r}, not in Q_cut")
            elif isinstance(e, TailMark):
                if lab.s.get(e) not in delta.Q_tail:
                    out.append(f"tail of {set(U)} has label {lab.s.get(e)!r}, not in Q_tail")
    if out:
        return out
    if lab.r[J.axis] != delta.d_ax:
        out.append(f"axis labelled {lab.r[J.axis]!r}, scheme axis is {delta.d_ax!r}")
    drop = _drop_depth(depth)
    for U, (plus, hung) in tree.items():
        word = tuple(labelled_u_plus(J, U, lab.s).labels)
        target = _target_word(delta, lab.r[U], J.line_depth(U), drop, omega)
        if target is None:
            out.append(f"w[{lab.r[U]!r}] is infinite but the line {set(U)} is finite")
        elif word != target:
            out.append(f"line {set(U)}: s▷U+ = {' '.join(map(str, word))}, "
                       f"w[{lab.r[U]!r}] = {' '.join(map(str, target))}")
        for e in plus.elements:
            if isinstance(e, (StructCut, TailMark)):
                q = lab.s[e]
                got = _multiset(lab.r[W] for W in hung.get(e, []))
                want = _norm_counts(delta.m[q], omega)
                if want != got:
                    out.append(f"slot {e} labelled {q!r}: axes {got}, m[{q!r}] = {delta.m[q]}")
    if depth is None and omega is None:
        out.extend(good_labelling_failures(J, lab))
    return out


def good_labelling_failures(J: SOAForest, lab: GoodLabelling) -> list[str]:
    """The two laws: equal line labels give equal ``s▷U+``; equal slot labels give equal axis multisets."""
    out = []
    tree = line_tree(J)
    words: dict = {}
    for U in J.classes:
        wd = tuple(labelled_u_plus(J, U, lab.s).labels)
        d = lab.r[U]
        if d in words and words[d] != wd:
            out.append(f"lines labelled {d!r} have different s▷U+")
        words.setdefault(d, wd)
    multis: dict = {}
    for U, (plus, hung) in tree.items():
        for e in plus.elements:
            if isinstance(e, (StructCut, TailMark)):
                ms = _multiset(lab.r[W] for W in hung.get(e, []))
                q = lab.s[e]
                if q in multis and multis[q] != ms:
                    out.append(f"forests labelled {q!r} have different axis multisets")
                multis.setdefault(q, ms)
    return out


def describes(J: SOAForest, delta: DescriptionScheme, lab: GoodLabelling,
              depth: int | None = None, omega: int | None = None) -> bool:
    return not labelling_failures(J, delta, lab, depth, omega)


def _match(children: list, feasible: Mapping, ms: Mapping) -> dict | None:
    """Assign to each child line a label from ``ms`` so that counts agree."""
    slots = [(d, i) for d, n in sorted(ms.items(), key=lambda kv: str(kv[0])) for i in range(n)]
    if len(slots) != len(children):
        return None
    if not children:
        return {}
    g = nx.Graph()
    left = [("W", i) for i in range(len(children))]
    g.add_nodes_from(left)
    g.add_nodes_from(("S",) + s for s in slots)
    for i, W in enumerate(children):
        for s in slots:
            if s[0] in feasible[W]:
                g.add_edge(("W", i), ("S",) + s)
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    if any(v not in matching for v in left):
        return None
    return {children[i]: matching[("W", i)][1] for i in range(len(children))}


def find_labelling(J: SOAForest, delta: DescriptionScheme,
                   depth: int | None = None, omega: int | None = None) -> GoodLabelling | None:
    """A labelling under which ``delta`` describes ``J``, or None.

    The search is exact: lines form a tree, so feasible labels are computed
    bottom-up and a witness is assigned top-down by bipartite matching.
    """
    if J.axis is None or not J.forest.is_otree():
        return None
    tree = line_tree(J)
    drop = _drop_depth(depth)
    order = sorted(J.classes, key=J.line_depth, reverse=True)
    feasible: dict = {}
    choice: dict = {}
    targets = {}
    for U in order:
        plus, hung = tree[U]
        ok = set()
        for d in delta.D:
            key = (d, J.line_depth(U) >= drop if drop is not None else False)
            if key not in targets:
                targets[key] = _target_word(delta, d, J.line_depth(U), drop, omega)
            target = targets[key]
            if target is None or len(target) != len(plus):
                continue
            good = True
            for e, letter in zip(plus.elements, target):
                if isinstance(e, StructCut):
                    pool = delta.Q_cut
                elif isinstance(e, TailMark):
                    pool = delta.Q_tail
                else:
                    if letter != STAR_LABEL:
                        good = False
                        break
                    continue
                if letter not in pool:
                    good = False
                    break
                ms = _norm_counts(delta.m[letter], omega)
                if ms is None or _match(hung.get(e, []), feasible, ms) is None:
                    good = False
                    break
            if good:
                ok.add(d)
                choice[U, d] = target
        feasible[U] = ok
    if delta.d_ax not in feasible[J.axis]:
        return None
    lab = GoodLabelling()
    stack = [(J.axis, delta.d_ax)]
    while stack:
        U, d = stack.pop()
        lab.r[U] = d
        plus, hung = tree[U]
        for e, letter in zip(plus.elements, choice[U, d]):
            if isinstance(e, (StructCut, TailMark)):
                lab.s[e] = letter
                assign = _match(hung.get(e, []), feasible, _norm_counts(delta.m[letter], omega))
                stack.extend(assign.items())
    for W in J.classes:
        if W not in lab.r:
            return None
    return lab


# ---------------------------------------------------------------------------
# unfolding


def _expand_count(n, B: int) -> int:
    return B if n == OMEGA else n


def unfold_scheme(delta: DescriptionScheme, k: int, B: int) -> SOAForest:
    """Finite approximation of the SOA-tree described by ``delta``.

    Lines of depth ``j`` are built when ``j == 0`` or ``j < k``; each line
    is ``w[d]`` exactly when finite and its window of bound ``B`` when
    infinite; an ``OMEGA`` count yields ``B`` components.  Node names are
    ``<path><index>`` where the path lists ``<letter index>.<component>/``
    steps from the axis.
    """
    cache: dict = {}

    def word(d):
        if d not in cache:
            w = delta.w[d]
            if isinstance(w, RegularArrangement) and not w.is_finite():
                cache[d] = bounded_window(w, B).labels
            else:
                cache[d] = arrangement_of(w).labels
        return cache[d]

    def line(d, depth, path) -> SOAForest:
        items, F = [], {}
        for i, a in enumerate(word(d)):
            if a == STAR_LABEL:
                items.append((f"{path}{i}", a))
                continue
            if depth + 1 >= k:
                continue
            slot = ("slot", path, i)
            parts = []
            j = 0
            for d2, n in sorted(delta.m[a].items(), key=lambda kv: str(kv[0])):
                for _ in range(_expand_count(n, B)):
                    parts.append(line(d2, depth + 1, f"{path}{i}.{j}/").forget_axis())
                    j += 1
            items.append((slot, a))
            F[slot] = forest_union(*parts)
        return substitute(Arrangement(items), list(F), F)

    return line(delta.d_ax, 0, "")


# ---------------------------------------------------------------------------
# extraction from finite terms


def state_name(pos: str, prefix="p") -> str:
    return prefix + pos


def tail_label(state) -> str:
    return f"{state}:1"


def cut_label(state) -> str:
    return f"{state}:2"


def extract_scheme(t) -> tuple[DescriptionScheme, GoodLabelling]:
    """Scheme and labelling of ``val(t)`` where every position is its own state ``p<pos>``."""
    J = val_direct(t)
    if J.axis is None:
        raise SchemeError("the value has no axis (the root is fg or carries no node)")
    if not J.forest.is_otree():
        raise SchemeError("the value is not an O-tree: some nodes follow the whole axis")
    R = Regions(t)
    tree = line_tree(J)
    lab = GoodLabelling()
    for U in J.classes:
        lab.r[U] = state_name(rep_line(t, U, R))
    for U, (plus, hung) in tree.items():
        for e in plus.elements:
            if isinstance(e, TailMark):
                lab.s[e] = tail_label(lab.r[U])
            elif isinstance(e, StructCut):
                lab.s[e] = cut_label(state_name(rep_cut(t, e, R)))
    D = sorted(set(lab.r.values()), key=lambda s: (len(s), s))
    Q_tail = sorted({q for e, q in lab.s.items() if isinstance(e, TailMark)}, key=lambda s: (len(s), s))
    Q_cut = sorted({q for e, q in lab.s.items() if isinstance(e, StructCut)}, key=lambda s: (len(s), s))
    m, w = {}, {}
    for U, (plus, hung) in tree.items():
        w[lab.r[U]] = Arrangement.from_word(labelled_u_plus(J, U, lab.s).labels)
        for e in plus.elements:
            if isinstance(e, (StructCut, TailMark)):
                m[lab.s[e]] = _multiset(lab.r[W] for W in hung.get(e, []))
    delta = DescriptionScheme(D, Q_cut, Q_tail, state_name(""), m, w).validate()
    return delta, lab


# ---------------------------------------------------------------------------
# extraction from regular systems


def _is_node(sym) -> bool:
    return sym == STAR or is_node_constant(sym)


class RegionAnalysis:
    """Least fixpoints over the automaton graph of an SOA term system.

    ``hs[s]``: the fg-free region below ``s`` holds a node.
    ``counts(start, d)``: number of hung components of type ``d`` reached
    from a vertex ``("Ax" | "T" | "L", state)``.
    """

    def __init__(self, sys: EquationSystem):
        sys = sys.pruned()
        self.sys = sys
        eqs = sys.equations
        for x, (sym, kids) in eqs.items():
            want = {CAT: 2, FG: 1}.get(sym, 0)
            if len(kids) != want or not (sym in (CAT, FG, OM) or _is_node(sym)):
                raise SchemeError(f"equation for {x!r}: {sym!r} is not an SOA-forest operation")
        self.eqs = eqs
        hs = {x: False for x in eqs}
        changed = True
        while changed:
            changed = False
            for x, (sym, kids) in eqs.items():
                v = _is_node(sym) or (sym == CAT and (hs[kids[0]] or hs[kids[1]]))
                if v and not hs[x]:
                    hs[x] = changed = True
        self.hs = hs
        succ: dict = {}
        for x, (sym, kids) in eqs.items():
            if sym == FG:
                succ[("Ax", x)] = [("Ax", kids[0])]
                succ[("T", x)] = [("Ax", kids[0])]
                succ[("L", x)] = [("Ax", kids[0])]
            else:
                succ[("Ax", x)] = [("T", x)]
                if sym == CAT:
                    l, r = kids
                    succ[("T", x)] = [("T", r)] + ([("T", l)] if not hs[r] else [])
                    succ[("L", x)] = [("L", l)] + ([("L", r)] if not hs[l] else [])
                else:
                    succ[("T", x)] = []
                    succ[("L", x)] = []
        self.succ = succ
        self.emitters = [x for x, (sym, _) in eqs.items() if sym != FG and hs[x]]
        self._counts = {}
        anyw = {("Ax", x): 1 for x in self.emitters}
        self.nonempty = {v: n > 0 for v, n in count_paths(succ, anyw).items()}

    def counts(self, d) -> dict:
        if d not in self._counts:
            self._counts[d] = count_paths(self.succ, {("Ax", d): 1})
        return self._counts[d]

    def multiset(self, starts) -> dict:
        out = {}
        for d in self.emitters:
            c = self.counts(d)
            n = 0
            for v in starts:
                n += c[v]
            if n:
                out[d] = n
        return out

    def lead(self, x) -> bool:
        return self.nonempty[("L", x)]

    def trail(self, x) -> bool:
        return self.nonempty[("T", x)]

    def is_cut_rep(self, x) -> bool:
        sym, kids = self.eqs[x]
        if sym != CAT:
            return False
        l, r = kids
        return self.hs[l] and self.hs[r] and (self.trail(l) or self.lead(r))

    def region(self, d) -> list:
        """States of the fg-free region below ``d``."""
        seen, stack = {d}, [d]
        while stack:
            x = stack.pop()
            sym, kids = self.eqs[x]
            if sym == CAT:
                for k in kids:
                    if self.eqs[k][0] != FG and k not in seen:
                        seen.add(k)
                        stack.append(k)
        return [x for x in self.sys.order if x in seen]

    def region_tops(self) -> list:
        tops = []
        if self.eqs[self.sys.root][0] != FG:
            tops.append(self.sys.root)
        for x, (sym, kids) in self.eqs.items():
            if sym == FG and self.eqs[kids[0]][0] != FG:
                tops.append(kids[0])
        order = {x: i for i, x in enumerate(self.sys.order)}
        return sorted(set(tops), key=order.__getitem__)


def _line_arrangement(ra: RegionAnalysis, d) -> RegularArrangement:
    eqs, order = {}, []

    def name(x):
        return f"w.{x}"

    for x in ra.region(d):
        sym, kids = ra.eqs[x]
        n = name(x)
        if _is_node(sym):
            eqs[n] = (STAR_LABEL, ())
            order.append(n)
        elif sym == CAT:
            l, r = (name(k) if ra.eqs[k][0] != FG else None for k in kids)
            for k, nm in zip(kids, (l, r)):
                if nm is None:
                    fgn = f"{n}.o{kids.index(k) + 1}"
                    eqs[fgn] = (OM, ())
                    order.append(fgn)
            l = l or f"{n}.o1"
            r = r or f"{n}.o2"
            if ra.is_cut_rep(x):
                eqs[n + ".k"] = (cut_label(x), ())
                eqs[n + ".l"] = (CAT, (l, n + ".k"))
                eqs[n] = (CAT, (n + ".l", r))
                order += [n, n + ".l", n + ".k"]
            else:
                eqs[n] = (CAT, (l, r))
                order.append(n)
        else:
            eqs[n] = (OM, ())
            order.append(n)
    root = name(d)
    if ra.lead(d):
        eqs["w.tail"] = (tail_label(d), ())
        eqs["w.top"] = (CAT, ("w.tail", root))
        order = ["w.top", "w.tail"] + order
        root = "w.top"
    order.sort(key=lambda x: x != root)
    return RegularArrangement(EquationSystem(eqs, root, order))


def extract_scheme_regular(sys: EquationSystem) -> DescriptionScheme:
    """Scheme of the value of a regular term, computed on its automaton graph."""
    ra = RegionAnalysis(sys)
    root = ra.sys.root
    if ra.eqs[root][0] == FG:
        raise SchemeError("the root is fg, so the value has no axis")
    if not ra.hs[root]:
        raise SchemeError("the axis is empty")
    if ra.trail(root):
        raise SchemeError("the value is not an O-tree: some nodes follow the whole axis")
    D = [x for x in ra.region_tops() if ra.hs[x]]
    Q_tail = [tail_label(d) for d in D if ra.lead(d)]
    cut_states = [x for x in ra.sys.order if ra.is_cut_rep(x)]
    Q_cut = [cut_label(x) for x in cut_states]
    m = {}
    for d in D:
        if ra.lead(d):
            m[tail_label(d)] = ra.multiset([("L", d)])
    for x in cut_states:
        l, r = ra.eqs[x][1]
        m[cut_label(x)] = ra.multiset([("T", l), ("L", r)])
    w = {d: _line_arrangement(ra, d) for d in D}
    return DescriptionScheme(D, Q_cut, Q_tail, root, m, w).validate()


def traced_unfold(sys: EquationSystem, k: int, B: int) -> SOAForest:
    """Unfolding that follows the term instead of the scheme.

    Mirrors :func:`unfold_scheme` on :func:`extract_scheme_regular` (same
    depth and window bounds, same component counts) but names every node
    by its absolute term position, so the result can be compared with
    :func:`~otrees.values.approx_val` node by node.
    """
    ra = RegionAnalysis(sys)
    eqs = ra.eqs

    def letters(d, P):
        """Window of the line rooted at position ``P`` (state ``d``) in order."""
        out = []
        base = 1 if ra.lead(d) else 0
        if ra.lead(d) and base <= B:
            out.append(("tail", P, d))

        def walk(x, p, alen):
            sym, kids = eqs[x]
            if _is_node(sym):
                if alen <= B:
                    out.append(("node", p, x))
                return
            if sym != CAT or alen >= B:
                return
            l, r = kids
            rep = ra.is_cut_rep(x)
            if eqs[l][0] != FG:
                walk(l, p + "1", alen + (2 if rep else 1))
            if rep and alen + 2 <= B:
                out.append(("cut", p, x))
            if eqs[r][0] != FG:
                walk(r, p + "2", alen + 1)

        walk(d, P, base)
        return out

    def hung(starts):
        """Component tops ``(position, state)`` reached from ``("T"|"L", state, position)`` vertices."""
        need = {}
        for e in ra.emitters:
            n = sum(ra.counts(e)[(mode, x)] for mode, x, _ in starts)
            if n:
                need[e] = _expand_count(n, B)
        found: dict = {e: [] for e in need}
        frontier = list(starts)
        while frontier and any(len(found[e]) < need[e] for e in need):
            nxt = []
            for mode, x, p in frontier:
                sym, kids = eqs[x]
                if mode == "Ax":
                    if sym == FG:
                        nxt.append(("Ax", kids[0], p + "1"))
                        continue
                    if ra.hs[x] and x in found and len(found[x]) < need[x]:
                        found[x].append(p)
                    nxt.append(("T", x, p))
                    continue
                if sym == FG:
                    nxt.append(("Ax", kids[0], p + "1"))
                elif sym == CAT:
                    l, r = kids
                    if mode == "T":
                        nxt.append(("T", r, p + "2"))
                        if not ra.hs[r]:
                            nxt.append(("T", l, p + "1"))
                    else:
                        nxt.append(("L", l, p + "1"))
                        if not ra.hs[l]:
                            nxt.append(("L", r, p + "2"))
            frontier = [v for v in nxt if ra.nonempty[(v[0], v[1])]]
        return [(p, e) for e in sorted(found, key=str) for p in found[e]]

    def line(d, P, depth) -> SOAForest:
        items, F = [], {}
        for kind, p, x in letters(d, P):
            if kind == "node":
                items.append((position_label(p), STAR_LABEL))
                continue
            if depth + 1 >= k:
                continue
            if kind == "tail":
                starts = [("L", d, P)]
            else:
                l, r = eqs[x][1]
                starts = [("T", l, p + "1"), ("L", r, p + "2")]
            slot = (kind, p)
            F[slot] = forest_union(*(line(e, q, depth + 1).forget_axis() for q, e in hung(starts)))
            items.append((slot, kind))
        return substitute(Arrangement(items), list(F), F)

    sysp = ra.sys
    if eqs[sysp.root][0] == FG or not ra.hs[sysp.root]:
        raise SchemeError("the value has no axis")
    return line(sysp.root, "", 0)


def same_scheme(d1: DescriptionScheme, d2: DescriptionScheme) -> bool:
    """Literal equality; finite arrangements are compared by their words."""
    if (set(d1.D), set(d1.Q_cut), set(d1.Q_tail), d1.d_ax) != (set(d2.D), set(d2.Q_cut), set(d2.Q_tail), d2.d_ax):
        return False
    if d1.m != d2.m:
        return False
    for d in d1.D:
        w1, w2 = d1.w[d], d2.w[d]
        fin1 = isinstance(w1, Arrangement) or w1.is_finite()
        fin2 = isinstance(w2, Arrangement) or w2.is_finite()
        if fin1 != fin2:
            return False
        if fin1:
            if arrangement_of(w1).labels != arrangement_of(w2).labels:
                return False
        elif w1.normalized() != w2.normalized():
            return False
    return True


# ---------------------------------------------------------------------------
# comparing schemes


def _word_canon(w, color: Mapping):
    f = lambda a: color.get(a, a)
    if isinstance(w, Arrangement):
        return ("word", tuple(f(a) for a in w.labels))
    if w.is_finite():
        return ("word", tuple(f(a) for a in w.value().labels))
    relab = w.system.relabel(lambda s: s if s in (w.cat, w.om) else ("L", f(s)))
    return ("system", system_to_automaton(relab).canonical())


def _refine(schemes: list[DescriptionScheme]) -> list[dict]:
    """Joint bisimulation colouring of the labels of several schemes."""
    colors = []
    for i, dl in enumerate(schemes):
        c = {("D", i, d): 0 for d in dl.D}
        c.update({("Q", i, q): ("cut",) for q in dl.Q_cut})
        c.update({("Q", i, q): ("tail",) for q in dl.Q_tail})
        colors.append(c)
    merged = {k: v for c in colors for k, v in c.items()}
    nclasses = len(set(map(repr, merged.values())))
    while True:
        new = {}
        for i, dl in enumerate(schemes):
            qcol = {q: merged[("Q", i, q)] for q in dl.Q}
            for d in dl.D:
                new[("D", i, d)] = (merged[("D", i, d)], _word_canon(dl.w[d], qcol))
            for q in dl.Q:
                agg: dict = {}
                for d, n in dl.m[q].items():
                    key = repr(merged[("D", i, d)])
                    agg[key] = OMEGA if OMEGA in (n, agg.get(key, 0)) else agg.get(key, 0) + n
                new[("Q", i, q)] = (merged[("Q", i, q)], tuple(sorted(agg.items())))
        ids = {v: j for j, v in enumerate(sorted(set(map(repr, new.values()))))}
        merged = {k: ids[repr(v)] for k, v in new.items()}
        if len(ids) == nclasses:
            break
        nclasses = len(ids)
    return [merged]


def _node_total(delta: DescriptionScheme):
    """Number of nodes of the described tree, in the naturals or ``OMEGA``."""
    succ: dict = {}
    weight: dict = {}
    for d in delta.D:
        letters = set_of(delta.w[d])
        succ[("d", d)] = []
        stars = letters.get(STAR_LABEL, 0)
        if stars == OMEGA:
            succ[("d", d)].append(("pump", d, STAR_LABEL))
            succ[("pump", d, STAR_LABEL)] = [("pump", d, STAR_LABEL), ("one",)]
        else:
            weight[("d", d)] = stars
        for q in delta.Q:
            n = letters.get(q, 0)
            if n == OMEGA:
                succ[("d", d)].append(("pump", d, q))
                succ[("pump", d, q)] = [("pump", d, q), ("q", q)]
            else:
                succ[("d", d)].extend([("q", q)] * n)
    for q in delta.Q:
        succ[("q", q)] = []
        for d, n in delta.m[q].items():
            if n == OMEGA:
                succ[("q", q)].append(("pumpq", q, d))
                succ[("pumpq", q, d)] = [("pumpq", q, d), ("d", d)]
            else:
                succ[("q", q)].extend([("d", d)] * n)
    succ[("one",)] = []
    weight[("one",)] = 1
    return count_paths(succ, weight)[("d", delta.d_ax)]


def _exact_bounds(delta: DescriptionScheme) -> tuple[int, int]:
    B = 1
    for w in delta.w.values():
        if isinstance(w, RegularArrangement):
            B = max(B, len(w.system.equations) + 1)
        else:
            B = max(B, len(w))
    return len(delta.D) + len(delta.Q) + 2, B


def scheme_equiv(d1: DescriptionScheme, d2: DescriptionScheme) -> tuple[str, str]:
    """``("iso" | "noniso" | "unknown", reason)``; only sound answers are definite.

    ``iso`` comes from a joint bisimulation colouring of the labels that
    identifies the two axis labels.  ``noniso`` comes from invariants of
    the described trees: total node count, axis size and, when both trees
    are finite, an exact comparison of their complete unfoldings.
    """
    (col,) = _refine([d1, d2])
    if col[("D", 0, d1.d_ax)] == col[("D", 1, d2.d_ax)]:
        return "iso", "bisimilar labels"
    n1, n2 = _node_total(d1), _node_total(d2)
    if n1 != n2:
        return "noniso", f"node counts differ ({_count_str(n1)} vs {_count_str(n2)})"
    a1 = set_of(d1.w[d1.d_ax]).get(STAR_LABEL, 0)
    a2 = set_of(d2.w[d2.d_ax]).get(STAR_LABEL, 0)
    if a1 != a2:
        return "noniso", f"axis sizes differ ({_count_str(a1)} vs {_count_str(a2)})"
    if n1 != OMEGA:
        k1, B1 = _exact_bounds(d1)
        k2, B2 = _exact_bounds(d2)
        k, B = max(k1, k2), max(B1, B2)
        same = soa_iso(unfold_scheme(d1, k, B), unfold_scheme(d2, k, B))
        return ("iso" if same else "noniso"), f"complete unfoldings compared (k={k}, B={B})"
    return "unknown", "infinite trees with equal invariants"


__all__ = [
    "DescriptionScheme", "GoodLabelling", "RegionAnalysis", "SchemeError", "cut_label", "describes",
    "extract_scheme", "extract_scheme_regular", "find_labelling", "good_labelling_failures",
    "labelling_failures", "same_scheme", "scheme_equiv", "state_name", "tail_label", "traced_unfold", "unfold_scheme",
]
