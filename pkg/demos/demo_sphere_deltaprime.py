"""Unit ball with a constant delta-prime coupling, beta^{-1} = -1.5.

Same study as the delta demo but for the hypersingular formulation with
piecewise-linear densities.  References come from the radial-matching
condition pi/(2 kappa^2) = beta kappa i_l'(kappa) k_l'(kappa), validated
by its determinant residual.
"""
import argparse

from surfspec import (Contour, NonlinearMatrixFunction, beyn_solve,
                      cluster_eigenvalues, deltaprime_sphere_eigs, eoc, icosphere)

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--subdivisions", default="4,7,13")
parser.add_argument("--beta-inv", dest="beta_inv", type=float, default=-1.5)
args = parser.parse_args()

refs = deltaprime_sphere_eigs(args.beta_inv)
print(f"derived references for beta^-1 = {args.beta_inv} "
      f"(determinant residuals {max(e.residual for e in refs):.1e}):")
for e in refs:
    print(f"  l={e.l}  lambda = {e.lam:.6f}  multiplicity {e.multiplicity}")

contour = Contour(-6.0, 5.99, 0.01, 16)
hs, errs = [], {e.l: [] for e in refs}
for m in [int(s) for s in args.subdivisions.split(",")]:
    mesh = icosphere(m)
    f = NonlinearMatrixFunction("delta_prime", mesh, args.beta_inv)
    res = beyn_solve(f, contour, probe_count=12, seed=0)
    clusters = cluster_eigenvalues(res.eigenvalues)
    means = [res.eigenvalues[c].real.mean() for c in clusters]
    hs.append(mesh.mesh_size)
    print(f"\nm={m}: h = {mesh.mesh_size:.4f}, {f.size} dofs")
    for e, mu, c in zip(refs, means, clusters):
        rel = abs(mu - e.lam) / abs(e.lam)
        errs[e.l].append(rel)
        print(f"  l={e.l}: mean {mu:+.5f}  (x{len(c)})  rel err {rel:.3e}")

if len(hs) > 1:
    print("\nexperimental convergence orders:")
    for e in refs:
        rates = ", ".join(f"{r:.2f}" for r in eoc(errs[e.l], hs))
        print(f"  l={e.l}: {rates}")
