"""Why gap 1 with equal nonzero N-eigenvalues gives a single class.

For the extended Schrodinger-Virasoro algebra with beta = bbar = 1 and
delta = dbar + 1, both f = l^2 (the L component) and k = l (the N component)
are cocycles that are not coboundaries.  It is tempting to count two classes.
The change of splitting by phi(d) = d produces the coboundary
(f, k) = (dbar*l^2, beta*l), so the two are proportional modulo coboundaries.
"""
from confext.ext import ExtProblem, _coboundary_images, solve_ext
from confext.lca import builtin_algebra
from confext.modules import rank1
from confext.poly import L

esv = builtin_algebra("esv")
beta = dbar = 1
P = ExtProblem(esv, rank1(esv, 0, dbar, beta), rank1(esv, 0, dbar + 1, beta))
r = solve_ext(P)

print("ext_dim =", r.ext_dim)
print("f = l^2 alone nontrivial:", r.is_nontrivial({"f": L ** 2}))
print("k = l   alone nontrivial:", r.is_nontrivial({"k": L}))

image = _coboundary_images(P)[1]  # phi(d) = d
print("coboundary of phi = d:", {k: str(v) for k, v in image.items() if v})

both = {"f": dbar * L ** 2, "k": beta * L}
print("dbar*l^2 + beta*l is a coboundary:", not r.is_nontrivial(both))

# the same happens for every dbar; at dbar = 0 the k class is already trivial
for d in (-2, 0, 3):
    q = solve_ext(ExtProblem(esv, rank1(esv, 0, d, beta), rank1(esv, 0, d + 1, beta)))
    print(f"dbar = {d}: ext_dim = {q.ext_dim}")
