# %% [markdown]
# # Terms and their values
#
# A concrete term is built from `cat`, `fg`, `om` and node constants `'x`.
# Its value is a finite structured forest: a partial order, a partition
# into lines, and possibly an axis.

# %%
from otrees.terms import parse_term, print_term
from otrees.values import val_direct, val_algebraic, rep_line, rep_cut
from otrees.structuring import cuts, def_nodes, tail_nodes, u_plus

t = parse_term("fg('w) cat ('u cat 'v)")
J = val_direct(t)
print(print_term(t))
print("lines:", J.classes, "axis:", J.axis)

# %% [markdown]
# `w` sits under the whole axis, so it is the tail of `{u, v}`.
# The arrangement U+ shows it as a leading `τ`.

# %%
print("tail of axis:", tail_nodes(J, J.axis))
print("U+ :", u_plus(J, J.axis))
print("Rep(axis) =", repr(rep_line(t, J.axis)), " Rep({w}) =", repr(rep_line(t, ("w",))))

# %% [markdown]
# Two evaluators compute the same value, one by reading positions and
# one by folding the algebra bottom-up.

# %%
assert val_direct(t) == val_algebraic(t)

# %% [markdown]
# ## Cuts
# A node hung beside a line, below its upper part, cuts the line.

# %%
t = parse_term("['a cat ((fg('y) cat 'b) cat [fg('x) cat ('c cat (fg('z) cat 'd))])] cat 'e")
J = val_direct(t)
for k in cuts(J, J.axis):
    print(k.left, "|", k.right, "defined by", def_nodes(J, k), "at position", repr(rep_cut(t, k)))
print("U+ :", u_plus(J, J.axis))

# %%
print(J.to_dot())
