"""Finite explicit O-forests: partial orders whose up-sets are chains."""
from __future__ import annotations

import json
from itertools import combinations
from typing import Hashable, Iterable, Mapping

import networkx as nx


class OForestError(ValueError):
    """Validation failure with a small certificate.

    ``kind`` is one of ``"unknown-node"``, ``"not-a-partial-order"`` or
    ``"up-set-not-chain"``; ``witness`` is a tuple of nodes.
    """

    def __init__(self, kind: str, witness: tuple, message: str | None = None):
        self.kind = kind
        self.witness = tuple(witness)
        super().__init__(message or f"{kind}: {', '.join(map(str, self.witness))}")


class OForest:
    """Nodes with a strict up-set map ``above[x] = {y | x < y}``.

    Build instances with :func:`validate_oforest`; the constructor trusts
    its input.  ``nodes`` keeps the caller's enumeration order, which fixes
    every deterministic tie-break downstream.
    """

    __slots__ = ("nodes", "above", "_below")

    def __init__(self, nodes: Iterable[Hashable], above: Mapping[Hashable, Iterable]):
        self.nodes = tuple(nodes)
        self.above = {x: frozenset(above.get(x, ())) for x in self.nodes}
        self._below = None

    # order queries

    def lt(self, x, y) -> bool:
        return y in self.above[x]

    def leq(self, x, y) -> bool:
        return x == y or y in self.above[x]

    def comparable(self, x, y) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def below(self, x) -> frozenset:
        if self._below is None:
            b = {x: set() for x in self.nodes}
            for y in self.nodes:
                for z in self.above[y]:
                    b[z].add(y)
            self._below = {x: frozenset(s) for x, s in b.items()}
        return self._below[x]

    def upset(self, x) -> list:
        """``[x, +inf[`` listed bottom-up."""
        return [x] + sorted(self.above[x], key=lambda y: len(self.above[y]), reverse=True)

    def pairs(self) -> set:
        return {(x, y) for x in self.nodes for y in self.above[x]}

    def cover_pairs(self) -> list:
        """Hasse edges ``(x, parent)``: the least strict upper bound of x."""
        out = []
        for x in self.nodes:
            if self.above[x]:
                parent = max(self.above[x], key=lambda y: len(self.above[y]))
                out.append((x, parent))
        return out

    def parent(self, x):
        if not self.above[x]:
            return None
        return max(self.above[x], key=lambda y: len(self.above[y]))

    def maximal(self) -> list:
        return [x for x in self.nodes if not self.above[x]]

    def join(self, x, y):
        """Least upper bound or None."""
        if self.leq(x, y):
            return y
        if self.leq(y, x):
            return x
        common = self.above[x] & self.above[y]
        if not common:
            return None
        return max(common, key=lambda z: len(self.above[z]))

    # structure

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, x):
        return x in self.above

    def __eq__(self, other):
        return (
            isinstance(other, OForest)
            and set(self.nodes) == set(other.nodes)
            and self.above == other.above
        )

    def __hash__(self):
        return hash(frozenset(self.above.items()))

    def __repr__(self):
        return f"OForest({len(self.nodes)} nodes, {len(self.cover_pairs())} cover edges)"

    def induced(self, X: Iterable) -> "OForest":
        X = list(X) if not isinstance(X, (set, frozenset)) else X
        keep = set(X)
        missing = keep - set(self.nodes)
        if missing:
            raise OForestError("unknown-node", tuple(sorted(missing, key=str)),
                               f"not nodes of the forest: {sorted(missing, key=str)}")
        return OForest([x for x in self.nodes if x in keep],
                       {x: self.above[x] & keep for x in self.nodes if x in keep})

    def components(self) -> list["OForest"]:
        """Component O-trees, ordered by their first node in the enumeration."""
        top = {}
        for x in self.nodes:
            ups = self.above[x]
            top[x] = x if not ups else next(y for y in ups if not self.above[y])
        groups: dict = {}
        for x in self.nodes:
            groups.setdefault(top[x], []).append(x)
        order = sorted(groups.values(), key=lambda g: self.nodes.index(g[0]))
        return [self.induced(g) for g in order]

    def is_otree(self) -> bool:
        return len(self.maximal()) <= 1

    def is_jointree(self) -> bool:
        """Every pair with an upper bound has a least one."""
        for x, y in combinations(self.nodes, 2):
            common = (self.above[x] | {x}) & (self.above[y] | {y})
            if common and not any(all(self.leq(j, z) for z in common) for j in common):
                return False
        return True

    # serialization

    def to_json(self) -> dict:
        return {"nodes": [str(x) for x in self.nodes],
                "cover": [[str(x), str(y)] for x, y in self.cover_pairs()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "OForest":
        try:
            nodes = data["nodes"]
            cover = data.get("cover", [])
        except (KeyError, TypeError, AttributeError) as e:
            raise OForestError("malformed", (), f"malformed O-forest JSON: {e}") from None
        return validate_oforest(nodes, cover=[tuple(p) for p in cover])

    def to_dot(self, name="J") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
        for x in self.nodes:
            lines.append(f"  {json.dumps(str(x))};")
        for x, y in self.cover_pairs():
            lines.append(f"  {json.dumps(str(x))} -> {json.dumps(str(y))} [arrowhead=none];")
        lines.append("}")
        return "\n".join(lines)


def validate_oforest(nodes: Iterable, pairs: Iterable = (), cover: Iterable = ()) -> OForest:
    """Check the O-forest axioms and return the validated forest.

    ``pairs`` and ``cover`` both list strict relations ``(x, y)`` meaning
    ``x < y``; the order is their transitive closure.
    """
    nodes = list(dict.fromkeys(nodes))
    known = set(nodes)
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    for x, y in list(pairs) + list(cover):
        for z in (x, y):
            if z not in known:
                raise OForestError("unknown-node", (z,), f"relation mentions unknown node {z!r}")
        if x == y:
            continue
        g.add_edge(x, y)
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle is not None:
        witness = tuple(e[0] for e in cycle)
        raise OForestError("not-a-partial-order", witness,
                           "not a partial order: cycle " + " < ".join(map(str, witness + witness[:1])))
    above = {x: nx.descendants(g, x) for x in nodes}
    for x in nodes:
        ups = sorted(above[x], key=nodes.index)
        for i, y in enumerate(ups):
            for z in ups[i + 1:]:
                if z not in above[y] and y not in above[z]:
                    raise OForestError(
                        "up-set-not-chain", (x, y, z),
                        f"up-set of {x!r} is not a chain: {y!r} and {z!r} are incomparable",
                    )
    return OForest(nodes, above)


def chain(names: Iterable) -> OForest:
    """``names[0] < names[1] < ...``."""
    names = list(names)
    return validate_oforest(names, cover=list(zip(names, names[1:])))


def antichain(names: Iterable) -> OForest:
    return validate_oforest(list(names))


def disjoint_union(*forests: OForest) -> OForest:
    nodes, above = [], {}
    for f in forests:
        if set(f.nodes) & set(nodes):
            raise OForestError("overlap", tuple(set(f.nodes) & set(nodes)), "forests share nodes")
        nodes.extend(f.nodes)
        above.update(f.above)
    return OForest(nodes, above)


__all__ = ["OForest", "OForestError", "antichain", "chain", "disjoint_union", "validate_oforest"]
