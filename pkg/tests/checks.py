"""Clause-by-clause checks that combine library values with the oracles."""
from otrees.arrangement import Arrangement, cuts_extend, LinearCut
from otrees.structuring import cuts
from otrees.values import Regions, rep_cut, val_direct

from oracles import in_lt


def _join(p: str, q: str) -> str:
    n = 0
    while n < min(len(p), len(q)) and p[n] == q[n]:
        n += 1
    return p[:n]


def _kind(e) -> str:
    return "cut" if isinstance(e, LinearCut) else "node"


def order_correspondence_violations(t) -> list:
    """Pairs breaking the match between ``U`` with its cuts and the positions of ``U`` and ``Rep(cuts)``.

    Four clauses: node/node, node/cut, cut/node and cut/cut.
    """
    J = val_direct(t)
    R = Regions(t)
    bad = []
    for U in J.classes:
        ks = cuts(J, U)
        base = Arrangement((u, "*") for u in U)
        ext = cuts_extend(base, [LinearCut(k.left, k.right) for k in ks])
        where = {LinearCut(k.left, k.right): rep_cut(t, k, R) for k in ks}
        where.update({u: R.nodes[u] for u in U})
        els = ext.elements
        rank = {e: i for i, e in enumerate(els)}
        for e in els:
            for f in els:
                if e == f:
                    continue
                clause = (_kind(e), _kind(f))
                if (rank[e] < rank[f]) != in_lt(where[e], where[f]):
                    bad.append((clause, U, e, f))
        for k in ks:
            rep = where[LinearCut(k.left, k.right)]
            joins = {_join(R.nodes[u], R.nodes[v]) for u in k.left for v in k.right}
            if rep not in joins or not all(rep.startswith(j) for j in joins):
                bad.append(("least-join", U, k, rep))
        if len(set(where.values())) != len(where):
            bad.append(("injective", U, None, None))
    return bad


def random_formula(rng, qdepth: int = 3, fo=(), so=(), size: int = 8) -> str:
    """Random well-scoped formula over ``leq``, ``N0``, ``N1`` with at most ``qdepth`` nested quantifiers."""
    fo, so = list(fo), list(so)
    atoms = ["true", "false"] + [f"(fin {X})" for X in so]
    for x in fo:
        atoms += [f"(N0 {x})", f"(N1 {x})"]
        atoms += [f"(leq {x} {y})" for y in fo] + [f"(= {x} {y})" for y in fo]
        atoms += [f"(in {x} {X})" for X in so]
    roll = rng.random()
    if qdepth > 0 and size > 1 and (roll < .45 or not fo):
        if rng.random() < .3:
            v = f"X{len(so)}"
            q = rng.choice(["exists-set", "forall-set"])
            return f"({q} {v} {random_formula(rng, qdepth - 1, fo, so + [v], size - 1)})"
        v = f"x{len(fo)}"
        q = rng.choice(["exists", "forall"])
        return f"({q} {v} {random_formula(rng, qdepth - 1, fo + [v], so, size - 1)})"
    if size > 2 and roll < .8:
        op = rng.choice(["and", "or", "implies", "iff", "not"])
        if op == "not":
            return f"(not {random_formula(rng, qdepth, fo, so, size - 1)})"
        left = rng.randint(1, size - 2)
        a = random_formula(rng, qdepth, fo, so, left)
        b = random_formula(rng, qdepth, fo, so, size - 1 - left)
        return f"({op} {a} {b})"
    return rng.choice(atoms)
