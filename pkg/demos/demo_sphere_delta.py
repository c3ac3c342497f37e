"""Unit ball with a constant delta coupling alpha = -6.

Computes all discrete eigenvalues inside an ellipse around [-9.5, -0.5]
on a sequence of icosphere meshes and prints the relative errors of the
cluster means against the closed-form Bessel references, together with
the experimental convergence order (expected: quadratic).
"""
import argparse

from surfspec import (Contour, NonlinearMatrixFunction, beyn_solve,
                      cluster_eigenvalues, delta_sphere_eigs, eoc, icosphere)

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--subdivisions", default="3,6,12",
                    help="comma-separated icosphere subdivisions")
parser.add_argument("--alpha", type=float, default=-6.0)
args = parser.parse_args()

alpha = args.alpha
refs = delta_sphere_eigs(alpha)
print(f"analytic references for alpha = {alpha}:")
for e in refs:
    print(f"  l={e.l}  lambda = {e.lam:.6f}  multiplicity {e.multiplicity}")

contour = Contour(-5.0, 4.5, 0.01, 16)
hs, errs = [], {e.l: [] for e in refs}
for m in [int(s) for s in args.subdivisions.split(",")]:
    mesh = icosphere(m)
    f = NonlinearMatrixFunction("delta", mesh, alpha)
    res = beyn_solve(f, contour, probe_count=12, seed=0)
    clusters = cluster_eigenvalues(res.eigenvalues)
    means = [res.eigenvalues[c].real.mean() for c in clusters]
    hs.append(mesh.mesh_size)
    print(f"\nm={m}: {mesh.n_panels} panels, h = {mesh.mesh_size:.4f}, "
          f"{len(res.eigenvalues)} eigenvalues in {len(clusters)} clusters")
    for e, mu, c in zip(refs, means, clusters):
        rel = abs(mu - e.lam) / abs(e.lam)
        errs[e.l].append(rel)
        print(f"  l={e.l}: mean {mu:+.5f}  (x{len(c)})  rel err {rel:.3e}")

if len(hs) > 1:
    print("\nexperimental convergence orders:")
    for e in refs:
        rates = ", ".join(f"{r:.2f}" for r in eoc(errs[e.l], hs))
        print(f"  l={e.l}: {rates}")
