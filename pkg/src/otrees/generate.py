"""Generators for tests, demos and the CLI: random and exhaustive terms, random O-forests."""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import product
from typing import Iterator

from .oforest import OForest
from .terms import CAT, FG, OM, Term, node_constant

_NAMES = "abcdefghijklmnopqrstuvwxyz"


def node_names(n: int) -> list[str]:
    """``a, b, ..., z, a1, b1, ...``."""
    return [_NAMES[i % 26] + (str(i // 26) if i >= 26 else "") for i in range(n)]


def _name_nodes(t: Term) -> Term:
    """Replace leaf placeholders ``'?`` by constants named in preorder."""
    names = iter(node_names(t.size))
    labels = {}
    for p, u in t.positions():
        labels[p] = node_constant(next(names)) if u.symbol == "'?" else u.symbol
    return Term.from_labels(labels)


def random_term(rng: random.Random, size: int, p_fg: float = 0.25, p_node: float = 0.7) -> Term:
    """A random concrete term with exactly ``size`` positions and distinct node names."""

    def go(n: int) -> Term:
        if n == 1:
            return Term("'?") if rng.random() < p_node else Term(OM)
        if n == 2 or rng.random() < p_fg:
            return Term(FG, [go(n - 1)])
        k = rng.randint(1, n - 2)
        return Term(CAT, [go(k), go(n - 1 - k)])

    return _name_nodes(go(max(1, size)))


@lru_cache(maxsize=None)
def _shapes(n: int) -> tuple:
    if n == 1:
        return (Term("'?"), Term(OM))
    out = [Term(FG, [s]) for s in _shapes(n - 1)]
    for k in range(1, n - 1):
        out += [Term(CAT, [a, b]) for a, b in product(_shapes(k), _shapes(n - 1 - k))]
    return tuple(out)


def all_terms(max_size: int) -> Iterator[Term]:
    """Every concrete term with at most ``max_size`` positions, nodes named in preorder."""
    for n in range(1, max_size + 1):
        for s in _shapes(n):
            yield _name_nodes(s)


def random_oforest(rng: random.Random, n: int, p_root: float = 0.2) -> OForest:
    """Random finite O-forest on ``a, b, ...``: each node picks an earlier parent or none."""
    names = node_names(n)
    above: dict = {}
    for i, x in enumerate(names):
        if i == 0 or rng.random() < p_root:
            above[x] = frozenset()
        else:
            p = names[rng.randrange(i)]
            above[x] = above[p] | {p}
    return OForest(names, above)


def random_subset(rng: random.Random, items, p: float = 0.5) -> set:
    return {x for x in items if rng.random() < p}


__all__ = ["all_terms", "node_names", "random_oforest", "random_subset", "random_term"]
