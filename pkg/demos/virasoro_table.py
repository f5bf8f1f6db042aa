"""Print the dimension of Ext between rank-one Virasoro modules on a grid.

Rows are the weight gap delta - dbar, columns the submodule weight dbar.
Run with ``python demos/virasoro_table.py``; it takes a few seconds.
"""
from fractions import Fraction

from confext.classifier import SweepGrid, run_sweep
from confext.lca import builtin_algebra
from confext.scalar import render_scalar

vir = builtin_algebra("vir")
dbars = [Fraction(x) for x in range(-5, 6) if x]
gaps = range(-1, 7)

grid = SweepGrid()
grid.add_block({"alpha": [0], "abar": [0], "dbar": dbars, "gap": list(gaps)})
grid.lets.append(("delta", {"dbar": 1, "gap": 1}))
results = {(e.point["dbar"], e.point["gap"]): e.ext_dim for e in run_sweep(vir, 3, grid)}

print("gap \\ dbar " + "".join(f"{render_scalar(d):>4}" for d in dbars))
for g in gaps:
    cells = []
    for d in dbars:
        dim = results.get((d, g))
        cells.append(f"{'.' if dim is None else dim:>4}")
    print(f"{g:>10} " + "".join(cells))

# a '.' marks delta = 0, where the quotient is reducible and nothing is solved.
# Besides the regular rows (gap 0, 2, 3, 4) there is one isolated point:
print("isolated:", [(render_scalar(d), g) for (d, g), dim in results.items() if dim and g not in (0, 2, 3, 4)])
