"""Published example terms, transcribed into the term syntax."""
from otrees.terms import EquationSystem

T0 = "fg('w) cat ('u cat 'v)"
T1 = "fg(om cat ('a cat ('b cat fg(om))))"
# brackets follow the marked occurrence of cat, which is the top of the {c, d} region
T2 = "'a cat [fg(('d cat [fg('e) cat fg('f)]) cat 'c) cat 'b]"
T412 = "['a cat ((fg('y) cat 'b) cat [fg('x) cat ('c cat (fg('z) cat 'd))])] cat 'e"
FIG5 = "[fg('a cat 'b) cat 'c] cat [(fg('e) cat 'd) cat (fg('g cat 'h) cat 'f)]"
FIG1 = "'x cat ([fg('b1 cat (fg('y) cat 'b2)) cat fg('d1 cat (fg('z) cat 'd2))] cat ('a2 cat 'a3))"


def q_system() -> EquationSystem:
    """q = q cat (star cat q)."""
    return EquationSystem({"q": ("cat", ("q", "r")), "r": ("cat", ("s", "q")), "s": ("star", ())}, "q")


def t1_system() -> EquationSystem:
    """t = t cat (fg(star) cat q) with q as above."""
    return EquationSystem({
        "t": ("cat", ("t", "u")), "u": ("cat", ("f", "q")), "f": ("fg", ("s",)),
        "q": ("cat", ("q", "r")), "r": ("cat", ("s", "q")), "s": ("star", ()),
    }, "t")
