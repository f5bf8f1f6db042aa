"""The degree-7 Virasoro class that only exists over Q(sqrt 19).

With a weight gap of 6 the extension space is zero at every rational weight,
but at dbar = -5/2 +- sqrt(19)/2 a single class appears.  The two conjugate
points give conjugate representatives.
"""
from fractions import Fraction

from confext.ext import ExtProblem, solve_ext
from confext.lca import builtin_algebra
from confext.modules import rank1
from confext.scalar import make

vir = builtin_algebra("vir")
root = make(0, 1, 19)

for dbar in (Fraction(-5, 2) + root / 2, Fraction(-5, 2) - root / 2):
    r = solve_ext(ExtProblem(vir, rank1(vir, 0, dbar), rank1(vir, 0, dbar + 6)))
    print(f"dbar = {dbar}: ext_dim = {r.ext_dim}")
    for rep in r.nontrivial_reps:
        print("   f =", rep["f"])

zeros = [d for d in (Fraction(x, 2) for x in range(-12, 13)) if d and d + 6
         and solve_ext(ExtProblem(vir, rank1(vir, 0, d), rank1(vir, 0, d + 6))).ext_dim]
print("rational dbar in [-6, 6] with a gap-6 class:", zeros or "none")
