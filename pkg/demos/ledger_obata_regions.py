"""
Region map for the Ledger-Obata space
=====================================

Scans the disk of positive-definite T with T1 + T2 = 1, colors each cell by
the verdict of the global-maximum criterion and writes CSV and SVG files.

    python demos/ledger_obata_regions.py [outdir] [cells]
"""

import sys
from pathlib import Path

from ricciscope import svg
from ricciscope.fibration import GLOBAL_MAX
from ricciscope.scan import grid_cells, ledger_obata_pipeline, region_scan, rows_to_csv
from ricciscope.spaces import ledger_obata as lo

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
n = int(sys.argv[2]) if len(sys.argv) > 2 else 60
out.mkdir(parents=True, exist_ok=True)

# %%
# One verdict per cell; cells outside x^2 + y^2 < 1/4 come back with an error.
cells = grid_cells((-0.5, 0.5), (-0.5, 0.5), n)
rows = region_scan(ledger_obata_pipeline(), cells)

# %%
# Compare with the closed-form region: three triangles related by R.
agree = sum((r.verdict == GLOBAL_MAX) == lo.guaranteed_condition(lo.from_xy(r.u, r.v)) for r in rows if not r.error)
print(f"{agree} of {sum(not r.error for r in rows)} cells agree with the closed-form region")

(out / "ledger_obata.csv").write_text(rows_to_csv(rows), newline="")
(out / "ledger_obata.svg").write_text(
    svg.render(rows, key=lambda r: "error" if r.error else r.verdict, cell=(1 / n, 1 / n),
               title="Ledger-Obata verdicts", xlabel="x", ylabel="y")
)

# %%
# A few points with critical points found and classified.
for cell in [(0.0, 0.0), (0.1, 0.05), (0.25, 0.0)]:
    row = ledger_obata_pipeline(solve=True)(cell)
    found = f"{row.classification} S={row.S:.10g}" if row.S is not None else "no critical point found"
    print(cell, row.verdict, found)
