"""Boundary element computation of discrete eigenvalues of 3-D Schrodinger
operators with delta and delta-prime interactions on compact surfaces."""

from .analytic import (bessel_half, delta_sphere_eigs, deltaprime_sphere_eigs,
                       hypersingular_sphere_symbol, single_layer_sphere_symbol,
                       spherical_ik)
from .fields import (PlanarGrid, eval_double_layer, eval_single_layer,
                     eval_single_layer_gradient, export_grid)
from .geometry import (DofSpace, PanelPairClass, SurfaceMesh, classify_pair,
                       icosphere, make_cube, make_lshape, make_screen,
                       make_sphere, mesh_io_read, mesh_io_write, refine)
from .kernel import SpectralPoint, green, green_grad_x, green_grad_y, sqrt_branch
from .nlevp import Contour, EigenResult, beyn_solve, cluster_eigenvalues, contour_nodes, eoc
from .operators import (AssemblySettings, NonlinearMatrixFunction, OperatorMatrix,
                        assemble_D, assemble_K, assemble_Kp, assemble_V,
                        assemble_mass, bs_delta, bs_deltaprime, calderon_block,
                        dump_matrix)
from .quadrature import (PairRule, TriangleRule, gauss_triangle, integrate_pair,
                         sauter_schwab_rule, tensor_pair_rule)

__version__ = "0.1.0"

__all__ = [
    "AssemblySettings", "Contour", "DofSpace", "EigenResult",
    "NonlinearMatrixFunction", "OperatorMatrix", "PairRule", "PanelPairClass",
    "PlanarGrid", "SpectralPoint", "SurfaceMesh", "TriangleRule",
    "assemble_D", "assemble_K", "assemble_Kp", "assemble_V", "assemble_mass",
    "bessel_half", "beyn_solve", "bs_delta", "bs_deltaprime", "calderon_block",
    "classify_pair", "cluster_eigenvalues", "contour_nodes",
    "delta_sphere_eigs", "deltaprime_sphere_eigs", "dump_matrix", "eoc",
    "eval_double_layer",
    "eval_single_layer", "eval_single_layer_gradient", "export_grid",
    "gauss_triangle", "green", "green_grad_x", "green_grad_y",
    "hypersingular_sphere_symbol", "icosphere", "integrate_pair", "make_cube",
    "make_lshape", "make_screen", "make_sphere", "mesh_io_read",
    "mesh_io_write", "refine", "sauter_schwab_rule", "single_layer_sphere_symbol",
    "spherical_ik", "sqrt_branch", "tensor_pair_rule",
]
