# %% [markdown]
# # Regular terms
#
# Infinite terms with finitely many subterms are written as equation systems.
# We look at their positions through automata and at finite truncations of
# their values.

# %%
from otrees.terms import Signature, parse_system, domain_language, occurrences_language, truncate, print_term
from otrees.values import approx_val
from otrees.arrangement import RegularArrangement, term_to_arrangement, bounded_window

sig = Signature({"cat": 2, "om": 0, "a": 0})
t2 = parse_system("let t = cat(t, u); let u = cat(a, t); root t;", sig)
dom = domain_language(t2)
occ = occurrences_language(t2, "a")
print([w or "ε" for w in ["", "1", "2", "21", "22", "221", "2221"] if dom.accepts(w)])
print("a at:", [w for w in ["21", "121", "2221", "11121", "221"] if occ.accepts(w)])
print("how many a's:", occ.count())

# %%
print(print_term(truncate(t2, 3, "om")))

# %% [markdown]
# The dense line: q = q cat (star cat q).  Truncations grow monotonically.

# %%
q = parse_system("let q = cat(q, r); let r = cat(s, q); let s = star; root q;")
for L in range(1, 6):
    J = approx_val(q, L)
    print(L, len(J), "nodes, one line:", len(J.classes) == 1)

# %% [markdown]
# Read as a word, the same term is a dense arrangement of stars; a window of
# depth B shows a finite piece of it.  Listing all positions in inorder
# instead gives the arrangement of the term itself.

# %%
print(bounded_window(RegularArrangement(q), 3))
print(bounded_window(term_to_arrangement(q), 3))
