"""
Diagonal Ricci tensors of non-diagonal metrics
==============================================

Samples Stiefel metrics whose Ricci tensor is diagonal although the metric
is not, and plots the normalized Ricci tensors in the (T1, T2) plane.  The
region they fill is where non-diagonal critical points exist.

    python demos/ricci_image.py [outdir] [samples]
"""

import sys
from pathlib import Path

import numpy as np

from ricciscope import svg
from ricciscope.scan import SamplerConfig, ricci_image_scan, rows_to_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
n = int(sys.argv[2]) if len(sys.argv) > 2 else 20000
out.mkdir(parents=True, exist_ok=True)

rows = ricci_image_scan(config=SamplerConfig(n=n, seed=7), threads=4)
P = np.array([r.params for r in rows])
print(f"{len(rows)} positive-definite Ricci tensors from {n} samples")

# %%
# The curve where the circles shrink to the diagonal critical point.
t = np.linspace(0.26, 1.0, 7)
curve = np.column_stack([4 * t**2 * (1 - t), t * (4 * t - 1)]) / (16 * t**4 + 1)[:, None]
d = np.min(np.hypot(P[:, :1] - curve[:, 0], P[:, 1:] - curve[:, 1]), axis=0)
print("distance from the transition curve to the cloud:", np.round(d, 4))

(out / "ricci_image.csv").write_text(rows_to_csv(rows), newline="")
(out / "ricci_image.svg").write_text(svg.render(rows, key=lambda r: "sample", title="Ricci image", xlabel="T1", ylabel="T2"))
