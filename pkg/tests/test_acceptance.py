"""Acceptance suite: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section at the end of the run.
"""
import random
import time
from itertools import combinations

import pytest

from otrees.arrangement import Arrangement
from otrees.generate import all_terms, random_subset, random_term
from otrees.mso import (
    RelStructure, check_covers, check_line, check_structuring_encoding, encode_S, eval_mso,
    phi_holds, theta1_holds, theta2_holds,
)
from otrees.oforest import antichain, chain
from otrees.schemes import (
    DescriptionScheme, describes, extract_scheme, extract_scheme_regular, scheme_equiv, traced_unfold,
    unfold_scheme,
)
from otrees.structuring import (
    StructuringError, covers, cut_defined_by, cuts, def_nodes, down, recompose, tail_nodes, u_plus,
    validate_structuring,
)
from otrees.terms import Signature, domain_language, occurrences_language, parse_system, parse_term, print_term
from otrees.values import (
    approx_val, erase_nodes, rep_cut, rep_line, soa_iso, term_of, val_algebraic, val_direct,
)

from checks import order_correspondence_violations, random_formula
from golden import T0, T1, T2, T412, q_system, t1_system
from oracles import T2_A, T2_ALL, all_words, brute_cut, brute_soa_iso, brute_structuring, lt_of, naive_eval
from samples import small_values, structured_forests

REPORT = {}
TITLES = {
    1: "val_direct equals val_algebraic on 10000 random terms",
    2: "golden orders, classes, axes, tails, cuts and representatives",
    3: "recomposition equals down() on 1000 structured forests",
    4: "line and cut order matches representative positions",
    5: "depths, cuts and validation against brute force, exhaustive",
    6: "scheme round trip on 1000 terms and two regular systems",
    7: "single-label chain scheme unfolds to the reversed 5-chain",
    8: "t2 domain and a-occurrence DFAs against regular expressions",
    9: "MSO formulas against direct checks and the naive evaluator",
    10: "erasure commutes with induced; truncations are monotone",
    11: "isomorphism and scheme equivalence decisions",
}


def _record(n, ok, note=""):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {TITLES[n]}"
    REPORT[n] = line + (f" ({note})" if note else "")


def criterion(n):
    """Record PASS unless the test body raises."""
    def wrap(fn):
        def test():
            try:
                fn()
            except BaseException as e:
                if n not in REPORT or "PASS" in REPORT[n]:
                    _record(n, False, f"{type(e).__name__}: {str(e)[:80]}")
                raise
            REPORT.setdefault(n, None)
            if REPORT[n] is None:
                _record(n, True)
        test.__name__ = fn.__name__
        test.__doc__ = fn.__doc__
        return test
    return wrap


_SMALL = []


def small():
    if not _SMALL:
        _SMALL.extend(small_values(7))
    return _SMALL


# --- 1 ----------------------------------------------------------------------


@criterion(1)
def test_c01_value_oracles():
    rng = random.Random(1001)
    start = time.perf_counter()
    for _ in range(10_000):
        t = random_term(rng, rng.randint(1, 25))
        assert val_direct(t) == val_algebraic(t), print_term(t)
    spent = time.perf_counter() - start
    assert spent <= 60, f"took {spent:.1f}s"


# --- 2 ----------------------------------------------------------------------


def _facts(text):
    t = parse_term(text)
    J = val_direct(t)
    lines = {frozenset(U): U for U in J.classes}
    return t, J, lines


@criterion(2)
def test_c02_golden_values():
    # t0: axis {u,v} represented at the root, tail {w} represented below the fg
    t, J, lines = _facts(T0)
    assert set(lines) == {frozenset("w"), frozenset("uv")}
    assert set(J.axis) == {"u", "v"}
    assert lt_of(J) == {("w", "u"), ("w", "v"), ("u", "v")}
    assert tail_nodes(J, J.axis) == ["w"] and cuts(J, J.axis) == []
    assert str(u_plus(J, J.axis)) == "τ * *"
    assert rep_line(t, J.axis) == "" and rep_line(t, ("w",)) == "11"

    # t1: one line, no axis, represented at the first cat
    t, J, lines = _facts(T1)
    assert J.classes == (("a", "b"),) and J.axis is None
    assert lt_of(J) == {("a", "b")}
    assert rep_line(t, ("a", "b")) == "1"
    assert t.at("").symbol == "fg" and t.at("1").symbol == "cat"

    # t2: lines and axis as expected; {c,d} is represented by the marked cat at 211
    t, J, lines = _facts(T2)
    assert set(lines) == {frozenset("ab"), frozenset("cd"), frozenset("e"), frozenset("f")}
    assert set(J.axis) == {"a", "b"}
    assert {("a", "b"), ("d", "c"), ("c", "b")} <= lt_of(J)
    cd = lines[frozenset("cd")]
    assert rep_line(t, cd) == "211" and t.at("211").symbol == "cat"
    assert rep_line(t, J.axis) == ""
    assert val_direct(erase_nodes(t, {"e", "f"})).forest == antichain("ef")
    assert print_term(t.at("21112")) == "cat(fg('e), fg('f))"

    # the cut example: axis a<b<c<d<e, x defines ({a,b},{c,d,e}) represented at 12
    t, J, lines = _facts(T412)
    assert J.axis == ("a", "b", "c", "d", "e")
    assert {(x, y) for x, y in combinations("abcde", 2)} <= lt_of(J)
    k = cut_defined_by(J, J.axis, "x")
    assert (k.left, k.right) == (("a", "b"), ("c", "d", "e"))
    assert def_nodes(J, k) == ["x"] and tail_nodes(J, J.axis) == []
    assert rep_cut(t, k) == "12" and t.at("12").symbol == "cat"
    assert [(c.left, rep_cut(t, c)) for c in cuts(J, J.axis)] == [
        (("a",), "1"), (("a", "b"), "12"), (("a", "b", "c"), "1222")]
    assert str(u_plus(J, J.axis)) == "* κ1 * κ2 * κ3 * *"


T2_EXPECTED_LT = {("a", "b"), ("e", "d"), ("d", "c"), ("c", "b"), ("f", "d"),
                  ("e", "c"), ("e", "b"), ("d", "b"), ("f", "c"), ("f", "b")}


@pytest.mark.xfail(strict=True, reason="the T2 term puts e and f beside d, not below it; see the decisions ledger")
def test_c02_golden_t2_order():
    t, J, lines = _facts(T2)
    try:
        assert lt_of(J) == T2_EXPECTED_LT
        assert sorted(tail_nodes(J, lines[frozenset("cd")])) == ["e", "f"]
    except AssertionError:
        _record(2, False, "T2 gives e,f incomparable to d: a cut of {c,d}, not the expected tail {e,f}")
        raise


# --- 3 ----------------------------------------------------------------------


@criterion(3)
def test_c03_recomposition():
    count = 0
    for seed in range(4):
        for S in structured_forests(3000 + seed, 260, max_nodes=40):
            for U in S.classes:
                assert recompose(S, U) == down(S, U)
            count += 1
    assert count >= 1000


# --- 4 ----------------------------------------------------------------------


@criterion(4)
def test_c04_order_correspondence():
    rng = random.Random(404)
    bad = []
    for t in all_terms(7):
        bad += order_correspondence_violations(t)
    for _ in range(1500):
        bad += order_correspondence_violations(random_term(rng, rng.randint(1, 25)))
    assert bad == [], bad[:5]


# --- 5 ----------------------------------------------------------------------


def _perturbations(S):
    cls = [list(U) for U in S.classes]
    for i, U in enumerate(cls):
        if len(U) > 1:
            for j in range(1, len(U)):
                yield cls[:i] + [U[:j], U[j:]] + cls[i + 1:]
    for i, j in combinations(range(len(cls)), 2):
        yield [U for k, U in enumerate(cls) if k not in (i, j)] + [cls[i] + cls[j]]
    for i, U in enumerate(cls):
        for x in U:
            for j in range(len(cls)):
                if j != i:
                    moved = [[y for y in V if y != x] for V in cls]
                    moved[j].append(x)
                    yield [V for V in moved if V]


def _sorted_line(S, U):
    return sorted(U, key=lambda x: len(S.forest.above[x]), reverse=True)


@criterion(5)
def test_c05_exhaustive_structurings():
    seen = {}
    for t in all_terms(9):
        J = val_direct(t)
        if len(J) <= 12:
            seen.setdefault(repr(J.to_json()), J)
    assert len(seen) > 50
    for S in seen.values():
        lt = lt_of(S)
        depth = brute_structuring(S.nodes, lt, S.classes)
        assert depth == {x: S.depth(x) for x in S.nodes}
        by_depth = {}
        for U in S.classes:
            by_depth.setdefault(S.depth(U[0]), []).append(U)
        for U in S.classes:
            for x in S.nodes:
                k = cut_defined_by(S, U, x)
                b = brute_cut(S.nodes, lt, U, x)
                assert (k is None) == (b is None)
                if k is not None:
                    assert (frozenset(k.left), frozenset(k.right)) == b
        # every node below depth 0 defines a cut of, or hangs in the tail of, a line one level up
        for x in S.nodes:
            d = S.depth(x)
            if d > 0:
                assert any(brute_cut(S.nodes, lt, U, x) is not None
                           or all((x, u) in lt for u in U) for U in by_depth[d - 1])
        # every cut of a depth-k line is defined by some node of depth k+1
        for U in S.classes:
            for k in cuts(S, U):
                assert any(S.depth(x) == S.depth(U[0]) + 1 and brute_cut(S.nodes, lt, U, x) is not None
                           for x in def_nodes(S, k))
        for cand in _perturbations(S):
            lines = [_sorted_line(S, U) for U in cand]
            expect = brute_structuring(S.nodes, lt, lines) is not None
            try:
                validate_structuring(S.forest, lines)
                got = True
            except StructuringError:
                got = False
            assert got == expect, cand


# --- 6 ----------------------------------------------------------------------


@criterion(6)
def test_c06_scheme_round_trip():
    rng = random.Random(606)
    done = 0
    while done < 1000:
        t = random_term(rng, rng.randint(1, 25))
        J = val_direct(t)
        if J.axis is None or not J.forest.is_otree():
            continue
        delta, lab = extract_scheme(t)
        assert describes(J, delta, lab)
        assert soa_iso(unfold_scheme(delta, len(J) + 1, len(J) + 1), J)
        done += 1
    start = time.perf_counter()
    k = B = 4
    for sysm in (q_system(), t1_system()):
        delta = extract_scheme_regular(sysm)
        traced = traced_unfold(sysm, k, B)
        assert soa_iso(traced, unfold_scheme(delta, k, B))
        assert traced == approx_val(sysm, B + 2 * k + 2).induced(traced.nodes)
    spent = time.perf_counter() - start
    assert spent <= 10, f"regular part took {spent:.1f}s"


# --- 7 ----------------------------------------------------------------------


@criterion(7)
def test_c07_chain_scheme():
    delta = DescriptionScheme(["d"], [], ["q"], "d", {"q": {"d": 1}},
                              {"d": Arrangement.from_word(["q", "*"])}).validate()
    J = unfold_scheme(delta, 5, 1)
    assert len(J) == 5 and all(len(U) == 1 for U in J.classes)
    order = sorted(J.nodes, key=lambda x: len(J.forest.above[x]))
    assert all(J.lt(order[j], order[i]) for i, j in combinations(range(5), 2))
    assert J.axis == (order[0],)
    names = [str(i) for i in range(5)]
    expected = validate_structuring(chain(names[::-1]), [[x] for x in names], ["0"])
    assert soa_iso(J, expected)


# --- 8 ----------------------------------------------------------------------


@criterion(8)
def test_c08_t2_languages():
    sysm = parse_system("let t = cat(t, u); let u = cat(a, t); root t;",
                        Signature({"cat": 2, "om": 0, "a": 0}))
    dom, occ = domain_language(sysm), occurrences_language(sysm, "a")
    words = list(all_words(8))
    assert len(words) == 511
    for w in words:
        assert dom.accepts(w) == bool(T2_ALL.fullmatch(w)), w
        assert occ.accepts(w) == bool(T2_A.fullmatch(w)), w


# --- 9 ----------------------------------------------------------------------


@criterion(9)
def test_c09_mso():
    structures = small()
    assert max(len(J) for _, J in structures) == 7
    for _, J in structures:
        S = encode_S(J)
        assert phi_holds(S) == check_structuring_encoding(S) is True
        for U in J.classes:
            assert theta1_holds(S, U) == check_line(S, U) is True
            for W in J.classes:
                assert theta2_holds(S, U, W) == check_covers(S, U, W) == covers(J, U, W)
        if len(J) <= 4:
            for x in S.domain:
                flip = RelStructure(S.domain, {"leq": S.relations["leq"],
                                               "N0": S.unary("N0") ^ {x}, "N1": S.unary("N1") ^ {x}})
                assert phi_holds(flip) == check_structuring_encoding(flip)
            for n in range(1, len(J) + 1):
                for X in combinations(S.domain, n):
                    assert theta1_holds(S, X) == check_line(S, X)
    rng = random.Random(909)
    pool = [encode_S(J) for _, J in structures if 2 <= len(J) <= 4]
    formulas = [random_formula(rng) for _ in range(50)]
    corpus = [pool[i] for i in sorted(rng.sample(range(len(pool)), 30))]
    for phi in formulas:
        for S in corpus:
            assert eval_mso(S, phi) == naive_eval(S, phi), phi


# --- 10 ---------------------------------------------------------------------


@criterion(10)
def test_c10_erasure_and_truncation():
    rng = random.Random(1010)
    for _ in range(5000):
        t = random_term(rng, rng.randint(1, 25))
        J = val_direct(t)
        X = random_subset(rng, J.nodes, rng.choice([0.2, 0.5, 0.8]))
        K = val_direct(erase_nodes(t, X))
        assert K == J.induced(X)
        assert soa_iso(K, J.induced(X))
    for sysm in (q_system(), t1_system()):
        for L in range(1, 6):
            small_v, big = approx_val(sysm, L), approx_val(sysm, L + 1)
            assert set(small_v.nodes) <= set(big.nodes)
            assert small_v == big.induced(small_v.nodes)


# --- 11 ---------------------------------------------------------------------


def _unfolds_differ(d1, d2, bounds):
    return any(not soa_iso(unfold_scheme(d1, k, B), unfold_scheme(d2, k, B)) for k, B in bounds)


SMALL_BOUNDS = [(k, B) for k in range(5) for B in range(1, 5)]


@criterion(11)
def test_c11_isomorphism():
    rng = random.Random(1111)
    pairs = 0
    by_size = {}
    for _, J in small():
        by_size.setdefault(len(J), []).append(J)
    for n in range(1, 8):
        group = by_size.get(n, [])
        for _ in range(40 if n < 7 else 15):
            J, K = rng.choice(group), rng.choice(group)
            assert soa_iso(J, K) == brute_soa_iso(J, K)
            renamed = val_direct(parse_term(print_term(term_of(J)).replace("'", "'_")))
            assert soa_iso(J, renamed) and brute_soa_iso(J, renamed)
            pairs += 1
    for _ in range(60):
        J = val_direct(random_term(rng, 17))
        K = val_direct(random_term(rng, 17))
        if len(J) == len(K) == 8:
            assert soa_iso(J, K) == brute_soa_iso(J, K)
            pairs += 1
    assert pairs > 200

    chain_d = DescriptionScheme(["d"], [], ["q"], "d", {"q": {"d": 1}},
                                {"d": Arrangement.from_word(["q", "*"])})
    single = DescriptionScheme(["d"], [], [], "d", {}, {"d": Arrangement.from_word("*")})
    assert scheme_equiv(chain_d, chain_d.relabel({"d": "e"}, {"q": "r"}))[0] == "iso"
    assert scheme_equiv(chain_d, single)[0] == "noniso"

    corpus = [(chain_d, None), (single, None),
              (extract_scheme_regular(q_system()), None), (extract_scheme_regular(t1_system()), None)]
    while len(corpus) < 70:
        t = random_term(rng, rng.randint(1, 13))
        J = val_direct(t)
        if J.axis is not None and J.forest.is_otree():
            corpus.append((extract_scheme(t)[0], J))
    for (d1, J1), (d2, J2) in combinations(corpus, 2):
        verdict, _ = scheme_equiv(d1, d2)
        if verdict == "iso":
            assert not _unfolds_differ(d1, d2, SMALL_BOUNDS)
        elif verdict == "noniso":
            n = max(len(J1 or ()), len(J2 or ())) + 1
            assert _unfolds_differ(d1, d2, [(n, n)] + SMALL_BOUNDS)
        if J1 is not None and J2 is not None:
            assert verdict == ("iso" if soa_iso(J1, J2) else "noniso")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
