# %% [markdown]
# # Description schemes
#
# A scheme gives each line a label, lists its arrangement with slots for
# cuts and tails, and says which labelled lines fill each slot.

# %%
from otrees.arrangement import Arrangement
from otrees.schemes import (DescriptionScheme, unfold_scheme, extract_scheme, extract_scheme_regular,
                            describes, scheme_equiv)
from otrees.terms import parse_term, parse_system
from otrees.values import val_direct, soa_iso

# one line label d with a tail slot q filled by another d: an infinite descending sequence
chain = DescriptionScheme(["d"], [], ["q"], "d", {"q": {"d": 1}}, {"d": Arrangement.from_word(["q", "*"])})
J = unfold_scheme(chain, 5, 1)
print(len(J), "nodes, axis", J.axis)
print(sorted(J.nodes, key=len))

# %% [markdown]
# Extracting a scheme from a term and unfolding it again gives the value back.

# %%
t = parse_term("['a cat ((fg('y) cat 'b) cat [fg('x) cat ('c cat (fg('z) cat 'd))])] cat 'e")
delta, lab = extract_scheme(t)
print(delta.to_json()["w"])
V = val_direct(t)
print("describes:", describes(V, delta, lab))
print("round trip:", soa_iso(unfold_scheme(delta, len(V) + 1, 2), V))

# %%
q = parse_system("let q = cat(q, r); let r = cat(s, q); let s = star; root q;")
dq = extract_scheme_regular(q)
print(dq.D, dq.Q)
print(scheme_equiv(chain, chain.relabel({"d": "e"}, {"q": "r"})))
single = DescriptionScheme(["d"], [], [], "d", {}, {"d": Arrangement.from_word("*")})
print(scheme_equiv(chain, single))
