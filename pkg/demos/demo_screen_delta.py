"""Open unit-square screen with alpha = -15 restricted to the screen.

The screen supports exactly four bound states; their published reference
values (computed at h = 0.0125) are -43.02, -23.93, -23.88 and -5.59.
The default subdivision 57 (h = 0.0248) takes a few minutes; use a
smaller value for a quick preview.
"""
import argparse

import numpy as np

from surfspec import Contour, NonlinearMatrixFunction, beyn_solve, make_screen

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--subdivision", type=int, default=57)
args = parser.parse_args()

mesh = make_screen(args.subdivision)
print(f"screen: {mesh.n_panels} panels, h = {mesh.mesh_size:.4f}")

f = NonlinearMatrixFunction("delta", mesh, -15.0)
contour = Contour(-25.0, 24.99, 0.01, 16)
res = beyn_solve(f, contour, probe_count=8, seed=0)

refs = sorted([-43.02, -23.93, -23.88, -5.59])
vals = np.sort(res.eigenvalues.real)
print(f"{len(vals)} eigenvalues inside the contour:")
for v in vals:
    nearest = min(refs, key=lambda r: abs(r - v))
    print(f"  {v:+.4f}   (reference {nearest:+.2f}, "
          f"rel diff {abs(v - nearest) / abs(nearest):.2%})")
