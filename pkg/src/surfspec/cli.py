"""Command-line driver: mesh generation, eigenvalue solves, convergence
studies, analytic reference tables, eigenfunction exports, self test.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.

The four benchmark experiments are available as presets
(sphere-delta, screen-delta, sphere-deltaprime, lshape-deltaprime) that
select the published coefficients and contours; mesh resolution and solver
knobs remain overridable.
"""
import argparse
import json
import re
import sys
import time
import warnings

import numpy as np

from . import analytic, geometry
from .errors import (CapacityError, ContourError, MeshValidationError,
                     NumericError, RootNotFoundError, SingularMatrixError,
                     SurfspecError)
from .fields import PlanarGrid, eval_double_layer, eval_single_layer, export_grid
from .geometry import (icosphere, make_cube, make_lshape, make_screen,
                       make_sphere, mesh_io_read, mesh_io_write, refine)
from .nlevp import Contour, beyn_solve, cluster_eigenvalues, eoc
from .operators import AssemblySettings, NonlinearMatrixFunction

CLUSTER_REL_GAP = 1e-3

PRESETS = {
    "sphere-delta": {
        "problem": "delta", "shape": "sphere", "subdivision": 12,
        "alpha": -6.0, "contour": [-5.0, 4.5, 0.01], "nq": 16, "probes": 12,
    },
    # the published run quotes the contour (-15.0, 14.99, 0.01), which cannot
    # contain the lowest reported eigenvalue -43.02; the preset widens the
    # ellipse (same style, hugging the essential spectrum at -0.01) so that
    # all four screen bound states lie inside
    "screen-delta": {
        "problem": "delta", "shape": "screen", "subdivision": 57,
        "alpha": -15.0, "contour": [-25.0, 24.99, 0.01], "nq": 16, "probes": 8,
    },
    "sphere-deltaprime": {
        "problem": "delta_prime", "shape": "sphere", "subdivision": 13,
        "beta_inv": -1.5, "contour": [-6.0, 5.99, 0.01], "nq": 16, "probes": 12,
    },
    "lshape-deltaprime": {
        "problem": "delta_prime", "shape": "lshape", "level": 1,
        "beta_inv": -0.75, "contour": [-4.0, 3.99, 0.01], "nq": 16, "probes": 8,
    },
}

_CONFIG_DEFAULTS = {
    "problem": "delta",
    "shape": "sphere",
    "level": None,
    "subdivision": None,
    "mesh": None,
    "alpha": None,
    "beta_inv": None,
    "coefficient_file": None,
    "contour": None,
    "nq": 32,
    "probes": 16,
    "rank_tol": 1e-8,
    "residual_tol": 1e-6,
    "seed": 0,
    "far_order": 4,
    "near_order": 6,
    "singular_order": 8,
    "threads": None,
}


class SolveConfig:
    """Validated solve configuration (flags override file and preset)."""

    def __init__(self, data):
        self.data = dict(_CONFIG_DEFAULTS)
        unknown = set(data) - set(_CONFIG_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        self.data.update({k: v for k, v in data.items() if v is not None})
        if self.data["problem"] not in ("delta", "delta_prime"):
            raise ValueError(f"unknown problem {self.data['problem']!r}")
        if self.data["contour"] is None:
            raise ValueError("a contour (c, a, b) is required")
        c, a, b = self.data["contour"]
        if a <= 0 or b <= 0:
            raise ValueError("contour semi-axes must be positive")
        coeff = self.coefficient_value()
        if coeff is not None and np.any(np.asarray(coeff) > 0):
            warnings.warn("coupling coefficient has positive entries; bound "
                          "states conventionally require a negative coefficient")

    def __getitem__(self, key):
        return self.data[key]

    def coefficient_value(self):
        if self.data["coefficient_file"]:
            path = self.data["coefficient_file"]
            if path.endswith(".json"):
                with open(path) as fh:
                    return np.asarray(json.load(fh), dtype=float)
            return np.loadtxt(path, dtype=float)
        key = "alpha" if self.data["problem"] == "delta" else "beta_inv"
        val = self.data[key]
        if val is None:
            raise ValueError(f"missing coefficient --{key.replace('_', '-')}")
        return float(val)

    def build_mesh(self):
        d = self.data
        if d["mesh"]:
            return mesh_io_read(d["mesh"])
        level = d["level"] or 0
        shape = d["shape"]
        if shape == "sphere":
            mesh = icosphere(d["subdivision"]) if d["subdivision"] \
                else make_sphere(level)
            return mesh
        if shape == "cube":
            mesh = make_cube()
        elif shape == "lshape":
            mesh = make_lshape()
        elif shape == "screen":
            mesh = make_screen(d["subdivision"] or 8)
        else:
            raise ValueError(f"unknown shape {shape!r}")
        for _ in range(level):
            mesh = refine(mesh)
        return mesh

    def contour(self):
        c, a, b = self.data["contour"]
        return Contour(c, a, b, self.data["nq"])

    def settings(self):
        return AssemblySettings(self.data["far_order"], self.data["near_order"],
                                self.data["singular_order"])

    def echo(self):
        out = {k: v for k, v in self.data.items() if v is not None}
        return out


def _apply_threads(config):
    if config["threads"]:
        import numba
        numba.set_num_threads(int(config["threads"]))


def run_solve(config):
    """Full pipeline mesh -> builder -> contour solve -> clustered record."""
    _apply_threads(config)
    t_start = time.perf_counter()
    mesh = config.build_mesh()
    coeff = config.coefficient_value()
    settings = config.settings()
    problem = config["problem"]
    if problem == "delta_prime" and not mesh.is_closed:
        raise MeshValidationError("delta-prime problems require a closed surface")
    f = NonlinearMatrixFunction(problem, mesh, coeff, settings)

    assembly_ms = 0.0

    class _Timed:
        size = f.size
        real_symmetric = f.real_symmetric

        def __call__(self, z):
            nonlocal assembly_ms
            t0 = time.perf_counter()
            m = f(z)
            assembly_ms += 1e3 * (time.perf_counter() - t0)
            return m

    res = beyn_solve(_Timed(), config.contour(),
                     probe_count=config["probes"], rank_tol=config["rank_tol"],
                     residual_tol=config["residual_tol"], seed=config["seed"])
    total_ms = 1e3 * (time.perf_counter() - t_start)

    clusters = cluster_eigenvalues(res.eigenvalues, CLUSTER_REL_GAP)
    cluster_of = {}
    for ci, idxs in enumerate(clusters):
        for idx in idxs:
            cluster_of[int(idx)] = ci
    eig_rows = []
    for i, lam in enumerate(res.eigenvalues):
        eig_rows.append({
            "re": float(lam.real),
            "im": float(lam.imag),
            "residual": float(res.residuals[i]),
            "cluster": cluster_of[i],
        })
    record = {
        "config": config.echo(),
        "eigenvalues": eig_rows,
        "mesh": {"panels": int(mesh.n_panels), "h": float(mesh.mesh_size)},
        "timing_ms": {"assembly": round(assembly_ms, 3),
                      "solve": round(total_ms - assembly_ms, 3),
                      "total": round(total_ms, 3)},
    }
    if res.warnings:
        record["warnings"] = list(res.warnings)
    return record, res, mesh, f


def validate_record(record):
    """Structural check of a results record against the documented schema."""
    if not isinstance(record, dict):
        return False
    if not {"config", "eigenvalues", "mesh", "timing_ms"} <= set(record):
        return False
    if not isinstance(record["eigenvalues"], list):
        return False
    for row in record["eigenvalues"]:
        if not {"re", "im", "residual", "cluster"} <= set(row):
            return False
    return {"panels", "h"} <= set(record["mesh"])


# ----------------------------------------------------------------------
# subcommands

def cmd_mesh(args):
    level = args.level or 0
    if args.shape == "sphere":
        mesh = icosphere(args.subdivision) if args.subdivision else make_sphere(level)
    elif args.shape == "cube":
        mesh = make_cube()
    elif args.shape == "lshape":
        mesh = make_lshape()
    elif args.shape == "screen":
        mesh = make_screen(args.subdivision or 8)
    else:
        raise ValueError(f"unknown shape {args.shape!r}")
    if args.shape != "sphere":
        for _ in range(level):
            mesh = refine(mesh)
    if args.out:
        mesh_io_write(mesh, args.out)
    print(f"{mesh.n_panels} panels, h = {mesh.mesh_size:.6g}")
    return 0


def _config_from_args(args):
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        # accept a previous results record: its config echo reproduces the run
        if "config" in loaded and "eigenvalues" in loaded:
            loaded = loaded["config"]
        data.update(loaded)
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise ValueError(f"unknown preset {args.preset!r}; "
                             f"options: {sorted(PRESETS)}")
        data.update(PRESETS[args.preset])
    for key in _CONFIG_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    return SolveConfig(data)


def cmd_solve(args):
    config = _config_from_args(args)
    record, res, _, f = run_solve(config)
    if getattr(args, "dump_matrix", None):
        from .operators import dump_matrix
        dump_matrix(f(config.contour().center), args.dump_matrix)
    text = json.dumps(record, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(f"{len(res.eigenvalues)} eigenvalue(s) inside the contour "
          f"(rank {res.detected_rank}):")
    for row in record["eigenvalues"]:
        print(f"  {row['re']:+.6f} {row['im']:+.3e}j  residual {row['residual']:.2e}"
              f"  cluster {row['cluster']}")
    return 0


def cmd_convergence(args):
    if args.shape not in (None, "sphere"):
        raise ValueError("analytic convergence references exist only for the sphere")
    levels = [int(x) for x in args.levels.split(",")]
    if len(levels) < 2:
        raise ValueError("need >= 2 levels for a convergence study")
    config = _config_from_args(args)
    if config["shape"] != "sphere":
        raise ValueError("analytic convergence references exist only for the sphere")
    problem = config["problem"]
    coeff = config.coefficient_value()
    if problem == "delta":
        refs = analytic.delta_sphere_eigs(float(coeff))
    else:
        refs = analytic.deltaprime_sphere_eigs(float(coeff))
    hs = []
    errors = {e.l: [] for e in refs}
    for m in levels:
        data = dict(config.data)
        data["subdivision"] = m
        sub = SolveConfig(data)
        record, res, mesh, _ = run_solve(sub)
        hs.append(mesh.mesh_size)
        clusters = cluster_eigenvalues(res.eigenvalues, CLUSTER_REL_GAP)
        means = [res.eigenvalues[c].real.mean() for c in clusters]
        for e in refs:
            if not means:
                raise NumericError(f"no eigenvalue cluster found near {e.lam:.4f}")
            nearest = min(means, key=lambda v: abs(v - e.lam))
            errors[e.l].append(abs(nearest - e.lam) / abs(e.lam))
    lines = []
    header = ["h"]
    for e in refs:
        header += [f"err{e.l}", f"eoc{e.l}"]
    lines.append(",".join(header))
    rates = {e.l: eoc(errors[e.l], hs) for e in refs}
    for row, h in enumerate(hs):
        cells = [f"{h:.6g}"]
        for e in refs:
            cells.append(f"{errors[e.l][row]:.6e}")
            cells.append("" if row == 0 else f"{rates[e.l][row - 1]:.2f}")
        lines.append(",".join(cells))
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_analytic(args):
    if args.problem == "delta":
        if args.alpha is None:
            raise ValueError("--alpha required for the delta problem")
        eigs = analytic.delta_sphere_eigs(args.alpha, args.l_max)
        note = ""
    else:
        if args.beta_inv is None:
            raise ValueError("--beta-inv required for the delta-prime problem")
        eigs = analytic.deltaprime_sphere_eigs(args.beta_inv, args.l_max)
        note = " (derived condition)"
    lines = ["l,lambda,multiplicity,residual"]
    for e in eigs:
        lines.append(f"{e.l},{e.lam:.12g},{e.multiplicity},{e.residual:.3e}")
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(f"unit-ball reference eigenvalues{note}:")
    print(text)
    return 0


def cmd_eigenfunction(args):
    config = _config_from_args(args)
    record, res, mesh, f = run_solve(config)
    if not 0 <= args.index < len(res.eigenvalues):
        raise ValueError(f"eigenvalue index {args.index} out of range "
                         f"(found {len(res.eigenvalues)})")
    lam = res.eigenvalues[args.index]
    density = res.eigenvectors[:, args.index]
    axis, offset = _parse_plane(args.plane)
    bounds = tuple(float(x) for x in args.bounds.split(","))
    grid = PlanarGrid(axis, offset, bounds, args.resolution, mesh=mesh)
    if config["problem"] == "delta":
        values, _ = eval_single_layer(mesh, lam, density, grid.points)
    else:
        values, _ = eval_double_layer(mesh, lam, density, grid.points,
                                      s1_space=f.s1_space)
    values = np.where(grid.retained, values, np.nan + 0j)
    export_grid(values, grid, args.out)
    print(f"eigenvalue {lam.real:.6f}{lam.imag:+.2e}j -> {args.out} "
          f"({grid.retained.sum()} of {grid.n_points} points retained)")
    return 0


def _parse_plane(spec):
    axis, _, val = spec.partition("=")
    axis = axis.strip().lower()
    if axis not in ("x", "y", "z"):
        raise ValueError(f"plane must look like 'z=0', got {spec!r}")
    return axis, float(val or "0")


def cmd_selftest(args):
    corrupt = getattr(args, "corrupt", None)
    checks = []

    def run(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # noqa: BLE001 - report any failure
            checks.append((name, False, str(exc)))

    run("kernel", _selftest_kernel)
    run("quadrature", lambda: _selftest_quadrature(corrupt == "quadrature"))
    run("bessel", _selftest_bessel)
    run("beyn", _selftest_beyn)
    ok = True
    for name, passed, msg in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {msg}" if msg else ""))
        ok = ok and passed
    return 0 if ok else 3


def _selftest_kernel():
    from .kernel import SpectralPoint, green, sqrt_branch
    assert abs(sqrt_branch(-1.0) - 1j) < 1e-15
    assert abs(sqrt_branch(4.0) - 2.0) < 1e-15
    sp = SpectralPoint(-2.3)
    x = np.array([0.3, -0.2, 0.9])
    y = np.array([-0.5, 0.4, 0.1])
    assert abs(green(sp, x, y) - green(sp, y, x)) < 1e-16
    # 7-point finite-difference Laplacian residual
    h = 1e-3
    lap = -6.0 * green(sp, x, y)
    for d in range(3):
        for s in (-1.0, 1.0):
            xs = x.copy()
            xs[d] += s * h
            lap += green(sp, xs, y)
    lap /= h * h
    resid = abs(-lap - sp.lam * green(sp, x, y))
    assert resid < 1e-4, f"kernel PDE residual {resid:.2e}"


def _selftest_quadrature(corrupted=False):
    from .geometry import IDENTICAL
    from .quadrature import gauss_triangle, sauter_schwab_rule
    tri = gauss_triangle(4)
    assert abs(tri.weights.sum() - 0.5) < 1e-15
    got = np.sum(tri.weights * tri.points[:, 0] ** 2 * tri.points[:, 1] ** 2)
    assert abs(got - 1.0 / 180.0) < 1e-15, "monomial x^2 y^2"
    rule = sauter_schwab_rule(IDENTICAL, 4)
    wts = rule.weights * (1.001 if corrupted else 1.0)
    total = wts.sum()
    assert abs(total - 0.25) < 1e-12, f"identical-class measure {total:.6f} != 1/4"


def _selftest_bessel():
    for l in range(0, 6):
        for x in (0.5, 1.0, 2.0, 5.0):
            il, kl, ilp, klp = analytic.spherical_ik(l, x)
            w = il * klp - ilp * kl
            ref = -np.pi / (2.0 * x * x)
            assert abs(w - ref) < 1e-12 * abs(ref), f"Wronskian l={l} x={x}"


def _selftest_beyn():
    def f(z):
        return np.diag([z - 2.0, z - 3.0, z + 1.0]).astype(complex)

    f.size = 3
    f.real_symmetric = True
    res = beyn_solve(f, Contour(2.5, 1.4, 0.01, 32), probe_count=5, seed=0)
    vals = np.sort(res.eigenvalues.real)
    assert len(vals) == 2 and abs(vals[0] - 2) < 1e-8 and abs(vals[1] - 3) < 1e-8
    assert res.residuals.max() < 1e-8


# ----------------------------------------------------------------------

def _add_solve_flags(p):
    p.add_argument("--config", help="JSON config file (or a previous results record)")
    p.add_argument("--preset", help=f"named experiment: {', '.join(sorted(PRESETS))}")
    p.add_argument("--problem", choices=["delta", "delta_prime"])
    p.add_argument("--shape", choices=["sphere", "cube", "lshape", "screen"])
    p.add_argument("--level", type=int, help="refinement level")
    p.add_argument("--subdivision", type=int,
                   help="sphere: icosahedron edge subdivision; screen: grid size")
    p.add_argument("--mesh", help="mesh JSON file (overrides --shape)")
    p.add_argument("--alpha", type=float, help="delta coupling strength")
    p.add_argument("--beta-inv", dest="beta_inv", type=float,
                   help="delta-prime inverse coupling")
    p.add_argument("--coefficient-file", dest="coefficient_file",
                   help="per-panel coefficient values (json list or one per line)")
    p.add_argument("--contour", type=_parse_contour, metavar="c,a,b",
                   help="ellipse center and semi-axes")
    p.add_argument("--nq", type=int, help="contour quadrature nodes")
    p.add_argument("--probes", type=int, help="random probe columns")
    p.add_argument("--rank-tol", dest="rank_tol", type=float)
    p.add_argument("--residual-tol", dest="residual_tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--far-order", dest="far_order", type=int)
    p.add_argument("--near-order", dest="near_order", type=int)
    p.add_argument("--singular-order", dest="singular_order", type=int)
    p.add_argument("--threads", type=int, help="cap worker thread count")


def _parse_contour(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("contour must be c,a,b")
    return parts


def _allow_negative_values(parser):
    # tokens like "-15.0,14.99,0.01" must parse as option values
    parser._negative_number_matcher = re.compile(r"^-\d")
    return parser


def build_parser():
    ap = _allow_negative_values(argparse.ArgumentParser(
        prog="surfspec",
        description="Boundary-element eigenvalues of Schrodinger operators "
                    "with surface delta interactions"))
    sub = ap.add_subparsers(dest="command", required=True)

    p = _allow_negative_values(sub.add_parser("mesh", help="generate a benchmark mesh"))
    p.add_argument("--shape", required=True,
                   choices=["sphere", "cube", "lshape", "screen"])
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--subdivision", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mesh)

    p = _allow_negative_values(sub.add_parser("solve", help="compute eigenvalues inside a contour"))
    _add_solve_flags(p)
    p.add_argument("--out", help="results JSON path")
    p.add_argument("--dump-matrix", dest="dump_matrix",
                   help="debug: dump F(contour center) to this path "
                        "(.csv for re,im text, otherwise raw complex128)")
    p.set_defaults(func=cmd_solve)

    p = _allow_negative_values(sub.add_parser("convergence", help="sphere convergence study vs analytic"))
    _add_solve_flags(p)
    p.add_argument("--levels", required=True,
                   help="comma-separated sphere subdivisions, e.g. 6,12")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_convergence)

    p = _allow_negative_values(sub.add_parser("analytic", help="unit-ball reference eigenvalue table"))
    p.add_argument("--problem", choices=["delta", "delta_prime"], required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta-inv", dest="beta_inv", type=float)
    p.add_argument("--l-max", dest="l_max", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic)

    p = _allow_negative_values(sub.add_parser("eigenfunction", help="export an eigenfunction slice as CSV"))
    _add_solve_flags(p)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--plane", default="z=0")
    p.add_argument("--bounds", default="-2,2,-2,2")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("selftest", help="fast invariant suite")
    p.add_argument("--corrupt", help=argparse.SUPPRESS)  # test hook
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ContourError, NumericError, SingularMatrixError,
            RootNotFoundError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, MeshValidationError, json.JSONDecodeError) as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    except SurfspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
