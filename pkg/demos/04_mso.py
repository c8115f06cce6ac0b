# %% [markdown]
# # Structurings in monadic second-order logic
#
# A structured forest is encoded as (nodes, leq, N0, N1) with N0 the nodes
# at even depth.  Formulas are s-expressions.

# %%
from otrees.mso import encode_S, eval_mso, phi_holds, theta1_holds, theta2_holds, decode, RelStructure
from otrees.terms import parse_term
from otrees.values import val_direct

J = val_direct(parse_term("'x cat ([fg('b1 cat (fg('y) cat 'b2)) cat fg('d1 cat (fg('z) cat 'd2))] cat ('a2 cat 'a3))"))
S = encode_S(J)
print("depth parity:", sorted(S.unary("N0")), sorted(S.unary("N1")))
print("encodes a structuring:", phi_holds(S))
print("lines read back:", decode(S))

# %%
B, A = ("b1", "b2"), J.axis
print("B is a line:", theta1_holds(S, B), " B under A:", theta2_holds(S, B, A))

# %% [markdown]
# Swap the two colours and the encoding breaks.

# %%
bad = RelStructure(S.domain, {"leq": S.relations["leq"], "N0": S.unary("N1"), "N1": S.unary("N0")})
print(phi_holds(bad))

# %%
print(eval_mso(S, "(exists-set X (and (in x X) (forall y (implies (in y X) (N1 y)))))", {"x": "b1"}))
