import json
import random

import pytest

from otrees.arrangement import Arrangement, bounded_window
from otrees.generate import random_term
from otrees.oforest import antichain, chain
from otrees.structuring import labelled_u_plus, validate_structuring
from otrees.terms import OMEGA, EquationSystem, parse_system, parse_term
from otrees.schemes import (
    DescriptionScheme, GoodLabelling, SchemeError, cut_label, describes, extract_scheme,
    extract_scheme_regular, find_labelling, good_labelling_failures, labelling_failures, same_scheme,
    scheme_equiv, state_name, traced_unfold, unfold_scheme,
)
from otrees.values import approx_val, soa_iso, val_direct

from golden import T0, T412, q_system, t1_system


def chain_scheme():
    """One line label d whose arrangement is a tail slot followed by a node."""
    return DescriptionScheme(["d"], [], ["q"], "d", {"q": {"d": 1}}, {"d": Arrangement.from_word(["q", "*"])})


def branching_scheme():
    w_a = Arrangement.from_word(["z", "*", "p", "*", "q", "*", "p", "*", "q", "*"])
    return DescriptionScheme(
        ["α", "β", "γ"], ["p", "q"], ["z"], "α",
        {"p": {"β": 2, "γ": 1}, "q": {"β": 1, "γ": OMEGA}, "z": {"β": 1, "γ": 2}},
        {"α": w_a, "β": Arrangement.from_word("*"), "γ": Arrangement.from_word("**")},
    )


def sequence(n):
    """``n`` singleton lines, each hung below the next one up."""
    names = [str(i) for i in range(n)]
    F = chain(names[::-1])
    return validate_structuring(F, [[x] for x in names], ["0"])


def test_chain_scheme_unfolds_to_reversed_chain():
    J = unfold_scheme(chain_scheme(), 5, 1)
    assert len(J) == 5 and all(len(c) == 1 for c in J.classes)
    assert all(J.forest.comparable(x, y) for x in J.nodes for y in J.nodes)
    top = J.forest.maximal()
    assert len(top) == 1 and J.axis == (top[0],)
    assert J.axis == ("1",)
    assert soa_iso(J, sequence(5))
    assert len(unfold_scheme(chain_scheme(), 0, 3)) == 1


def test_find_labelling_bounded():
    lab = find_labelling(sequence(3), chain_scheme(), depth=3, omega=1)
    assert lab is not None and set(lab.r.values()) == {"d"}
    assert describes(sequence(3), chain_scheme(), lab, depth=3, omega=1)
    assert not describes(sequence(3), chain_scheme(), lab)
    two = validate_structuring(antichain("ab"), [["a"], ["b"]])
    assert find_labelling(two, chain_scheme(), depth=3, omega=1) is None


def test_branching_scheme():
    delta = branching_scheme().validate()
    J = unfold_scheme(delta, 2, 2)
    lab = find_labelling(J, delta, depth=2, omega=2)
    assert lab is not None
    assert str(labelled_u_plus(J, J.axis, lab.s)) == "z * p * q * p * q *"
    assert len(J) == 5 + (1 + 4) + 2 * (2 + 2) + 2 * (1 + 4)
    wrong = DescriptionScheme(delta.D, delta.Q_cut, delta.Q_tail, "β", delta.m, delta.w)
    assert not describes(J, wrong, lab, depth=2, omega=2)


def test_scheme_validation():
    d = chain_scheme()
    with pytest.raises(SchemeError):
        DescriptionScheme(["d"], ["d"], [], "d", {"d": {}}, {"d": Arrangement.from_word("*")}).validate()
    with pytest.raises(SchemeError):
        DescriptionScheme(["d"], ["q"], [], "x", d.m, d.w).validate()
    with pytest.raises(SchemeError):
        DescriptionScheme(["d"], [], ["z"], "d", {"z": {}}, {"d": Arrangement.from_word(["*", "z"])}).validate()
    with pytest.raises(SchemeError):
        DescriptionScheme(["d"], ["q"], [], "d", {"q": {"e": 1}}, d.w).validate()
    DescriptionScheme(["d"], [], ["z"], "d", {"z": {}}, {"d": Arrangement.from_word(["z", "*"])}).validate()


def test_json_roundtrip():
    for delta in (chain_scheme(), branching_scheme(), extract_scheme_regular(t1_system())):
        data = json.loads(json.dumps(delta.to_json()))
        back = DescriptionScheme.from_json(data)
        assert scheme_equiv(delta, back)[0] == "iso"
    with pytest.raises(SchemeError):
        DescriptionScheme.from_json({"D": ["d"]})


def test_extract_small_examples():
    delta, lab = extract_scheme(parse_term("'u cat 'v"))
    assert delta.D == ("p",) and delta.Q == () and str(delta.w["p"]) == "* *"
    delta, lab = extract_scheme(parse_term(T0))
    assert delta.Q_tail == ("p:1",) and delta.Q_cut == ()
    assert delta.w["p"].labels == ("p:1", "*", "*")
    assert delta.m["p:1"] == {"p11": 1}
    delta, lab = extract_scheme(parse_term(T412))
    assert cut_label(state_name("12")) in delta.Q_cut
    assert delta.w["p"].labels[:4] == ("*", "p1:2", "*", "p12:2")
    assert describes(val_direct(parse_term(T412)), delta, lab)
    with pytest.raises(SchemeError):
        extract_scheme(parse_term("fg('a cat 'b)"))
    with pytest.raises(SchemeError):
        extract_scheme(parse_term("'a cat fg('b)"))


def test_extract_labelling_laws():
    rng = random.Random(9)
    seen = 0
    while seen < 150:
        t = random_term(rng, rng.randint(1, 25))
        J = val_direct(t)
        if J.axis is None or not J.forest.is_otree():
            continue
        seen += 1
        delta, lab = extract_scheme(t)
        assert labelling_failures(J, delta, lab) == []
        assert good_labelling_failures(J, lab) == []
        assert soa_iso(unfold_scheme(delta, len(J) + 1, 1), J)
        found = find_labelling(J, delta)
        assert found is not None and describes(J, delta, found)
        assert same_scheme(extract_scheme_regular(EquationSystem.from_term(t)), delta)


def test_regular_extraction():
    delta = extract_scheme_regular(q_system())
    assert delta.D == ("q",) and delta.Q == ()
    assert not delta.w["q"].is_finite()
    assert set(bounded_window(delta.w["q"], 6).labels) == {"*"}
    delta = extract_scheme_regular(t1_system())
    assert delta.D == ("t", "s") and delta.Q_cut == ("t:2",) and delta.m == {"t:2": {"s": 1}}
    assert bounded_window(delta.w["t"], 4).labels == ("t:2", "t:2", "*")
    assert delta.w["s"].value().labels == ("*",)
    with pytest.raises(SchemeError):
        extract_scheme_regular(parse_system("let t = fg(s); let s = star; root t;"))


@pytest.mark.parametrize("sysm", [q_system(), t1_system()], ids=["dense", "hung"])
def test_regular_unfold_matches_truncation(sysm):
    delta = extract_scheme_regular(sysm)
    for k in range(1, 5):
        for B in range(1, 5):
            traced = traced_unfold(sysm, k, B)
            assert soa_iso(traced, unfold_scheme(delta, k, B))
            assert traced == approx_val(sysm, B + 2 * k + 2).induced(traced.nodes)


def test_scheme_equiv():
    d = chain_scheme()
    assert scheme_equiv(d, d.relabel({"d": "e"}, {"q": "r"}))[0] == "iso"
    single = DescriptionScheme(["d"], [], [], "d", {}, {"d": Arrangement.from_word("*")})
    assert scheme_equiv(d, single)[0] == "noniso"
    a = extract_scheme(parse_term("'a cat (fg('b) cat 'c)"))[0]
    b = extract_scheme(parse_term("'x cat (fg('y cat 'z) cat 'w)"))[0]
    assert scheme_equiv(a, b)[0] == "noniso"
    q2 = parse_system("let t = cat(u, r); let u = cat(r, s); let r = cat(r, v); let v = cat(s, r); "
                      "let s = star; root t;")
    assert scheme_equiv(extract_scheme_regular(q_system()), extract_scheme_regular(q2))[0] == "unknown"


def test_labelling_failure_messages():
    J = sequence(2)
    lab = GoodLabelling()
    assert labelling_failures(J, chain_scheme(), lab)
    assert labelling_failures(J.forget_axis(), chain_scheme(), lab) == ["the forest has no axis"]
