"""Independent brute-force oracles used by the test suite.

None of these reuse the library's algorithms: they recompute definitions
from scratch on small inputs.
"""
from __future__ import annotations

import re
from functools import cmp_to_key
from itertools import combinations, permutations, product


# --- positions -------------------------------------------------------------


def all_words(max_len: int):
    for n in range(max_len + 1):
        for w in product("12", repeat=n):
            yield "".join(w)


def lex_le(p: str, q: str) -> bool:
    """Prefix first, then first differing letter."""
    if q.startswith(p):
        return True
    for a, b in zip(p, q):
        if a != b:
            return a < b
    return False


def in_lt(x: str, y: str) -> bool:
    """The three clauses of the inorder, literally."""
    if x == y:
        return False
    if x.startswith(y + "1"):
        return True
    if y.startswith(x + "2"):
        return True
    for i in range(min(len(x), len(y))):
        if x[i] != y[i]:
            return x[i] == "1" and y[i] == "2"
    return False


def inorder(positions):
    return sorted(positions, key=cmp_to_key(lambda a, b: -1 if in_lt(a, b) else (1 if in_lt(b, a) else 0)))


T2_ALL = re.compile(r"(1|22)*(|2|21)")
T2_A = re.compile(r"(1|22)*21")


# --- orders and structurings ------------------------------------------------


def lt_of(J):
    """Strict order of an SOA-forest as a set of pairs."""
    return {(x, y) for x in J.nodes for y in J.nodes if x != y and J.leq(x, y)}


def brute_structuring(nodes, lt: set, classes):
    """Check a structuring from the definition; return per-node depth or None."""
    cls = {}
    for i, c in enumerate(classes):
        for x in c:
            if x in cls:
                return None
            cls[x] = i
    if set(cls) != set(nodes):
        return None
    leq = lambda a, b: a == b or (a, b) in lt
    for c in classes:
        for a, b in combinations(c, 2):
            if not (leq(a, b) or leq(b, a)):
                return None
        for a, b in product(c, c):
            for z in nodes:
                if (a, z) in lt and (z, b) in lt and cls[z] != cls[a]:
                    return None
    depth = {}
    for x in nodes:
        ups = [y for y in nodes if leq(x, y)]
        up = sorted(ups, key=lambda y: sum(1 for z in ups if leq(y, z)), reverse=True)
        runs = []
        for y in up:
            if runs and cls[runs[-1][-1]] == cls[y]:
                runs[-1].append(y)
            else:
                runs.append([y])
        lines = [cls[r[0]] for r in runs]
        if len(set(lines)) != len(lines):
            return None
        for r in runs:
            U = classes[cls[r[0]]]
            low = r[0]
            if {u for u in U if leq(low, u)} != set(r):
                return None
        depth[x] = len(runs) - 1
    return depth


def brute_cut(nodes, lt, U, x):
    """``(U1, U2)`` defined by ``x`` on ``U``, or None."""
    if x in U:
        return None
    U2 = frozenset(u for u in U if (x, u) in lt)
    U1 = frozenset(U) - U2
    if not U1 or not U2:
        return None
    if any((x, u) in lt or (u, x) in lt for u in U1):
        return None
    return U1, U2


def brute_soa_iso(J, K) -> bool:
    """Bijection search respecting order, classes and axis."""
    if len(J) != len(K):
        return False
    jn, kn = list(J.nodes), list(K.nodes)
    jl, kl = lt_of(J), lt_of(K)
    jc = {x: frozenset(J.line_of(x)) for x in jn}
    kc = {x: frozenset(K.line_of(x)) for x in kn}
    ja, ka = set(J.axis or ()), set(K.axis or ())
    sig = lambda n, lt, a: (sum(1 for p in lt if p[0] == n), sum(1 for p in lt if p[1] == n), n in a)
    for perm in permutations(kn):
        f = dict(zip(jn, perm))
        if any(sig(x, jl, ja) != sig(f[x], kl, ka) for x in jn):
            continue
        if {(f[a], f[b]) for a, b in jl} != kl:
            continue
        if {frozenset(f[y] for y in c) for c in jc.values()} != set(kc.values()):
            continue
        if {f[x] for x in ja} != ka:
            continue
        return True
    return False


# --- MSO ---------------------------------------------------------------------


def _sexpr(text: str):
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def read():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok == "(":
            out = []
            while toks[pos] != ")":
                out.append(read())
            pos += 1
            return out
        return tok

    return read()


def naive_eval(S, text: str, env=None) -> bool:
    """Plain recursion over the s-expression, no memoization."""
    dom = list(S.domain)
    subsets = [frozenset(c) for n in range(len(dom) + 1) for c in combinations(dom, n)]

    def ev(f, env):
        if f == "true":
            return True
        if f == "false":
            return False
        head, args = f[0], f[1:]
        if head == "not":
            return not ev(args[0], env)
        if head == "and":
            return all(ev(a, env) for a in args)
        if head == "or":
            return any(ev(a, env) for a in args)
        if head == "implies":
            return not ev(args[0], env) or ev(args[1], env)
        if head == "iff":
            return ev(args[0], env) == ev(args[1], env)
        if head == "exists":
            return any(ev(args[1], {**env, args[0]: a}) for a in dom)
        if head == "forall":
            return all(ev(args[1], {**env, args[0]: a}) for a in dom)
        if head == "exists-set":
            return any(ev(args[1], {**env, args[0]: X}) for X in subsets)
        if head == "forall-set":
            return all(ev(args[1], {**env, args[0]: X}) for X in subsets)
        if head == "in":
            return env[args[0]] in env[args[1]]
        if head == "=":
            return env[args[0]] == env[args[1]]
        if head == "fin":
            return True
        return tuple(env[a] for a in args) in S.relations[head]

    return ev(_sexpr(text), dict(env or {}))
