"""Gauss rules on the reference triangle and regularizing panel-pair rules.

Two reference conventions are used:

* TriangleRule points are (u, v) with barycentric coordinates
  (1-u-v, u, v) on the standard simplex; weights sum to 1/2.
* PairRule points are (x1, x2, y1, y2) on the Sauter-Schwab element
  T^ = {0 <= x2 <= x1 <= 1} for both panels, to be composed with the panel
  map chi(u, v) = A + u*(B-A) + v*(C-B) (Jacobian 2*area).  Weights are
  normalized so that sum(w * k(x, y)) approximates the integral of k over
  T^ x T^; physical pair integrals carry the extra factor 4*area_i*area_j.

For the three singular classes the rules are composite Duffy-type
transformations that cancel 1/r singularities: 6 subdomains for identical
panels, 5 for a common edge, 2 for a common vertex.  The transformed
integrand of a weakly singular kernel is bounded, so plain tensor Gauss
applies in the parameter cube.
"""
import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import QuadratureError
from .geometry import COMMON_EDGE, COMMON_VERTEX, DISJOINT, IDENTICAL

_MAX_TRIANGLE_ORDER = 20


class TriangleRule:
    """Quadrature rule on the standard simplex, exact to `order`."""

    __slots__ = ("order", "points", "weights")

    def __init__(self, order, points, weights):
        self.order = order
        self.points = points
        self.weights = weights

    @property
    def n_points(self):
        return len(self.weights)


class PairRule:
    """4-D rule for a panel-pair integral, tied to an adjacency class."""

    __slots__ = ("kind", "points", "weights")

    def __init__(self, kind, points, weights):
        self.kind = kind
        self.points = points
        self.weights = weights

    @property
    def n_points(self):
        return len(self.weights)


def _gauss01(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


# classical fully symmetric rules with positive interior points, given as
# (centroid weight or None, [(a, w3)...] for permutations of (1-2a, a, a),
#  [(b, c, w6)...] for the 6 permutations of (1-b-c, b, c)); weights are
# normalized to sum to 1 and scaled by the reference area 1/2 on build
_SYMMETRIC_RULES = {
    1: (1.0, [], []),
    2: (None, [(1.0 / 6.0, 1.0 / 3.0)], []),
    4: (None, [(0.445948490915965, 0.223381589678011),
               (0.091576213509771, 0.109951743655322)], []),
    5: (0.225, [(0.470142064105115, 0.132394152788506),
                (0.101286507323456, 0.125939180544827)], []),
    6: (None, [(0.249286745170910, 0.116786275726379),
               (0.063089014491502, 0.050844906370207)],
        [(0.310352451033785, 0.636502499121399, 0.082851075618374)]),
}


def _symmetric_rule(order):
    w0, three_groups, six_groups = _SYMMETRIC_RULES[order]
    pts = []
    wts = []
    if w0 is not None:
        pts.append((1.0 / 3.0, 1.0 / 3.0))
        wts.append(w0)
    for a, w in three_groups:
        c = 1.0 - 2.0 * a
        for (u, v) in ((a, a), (c, a), (a, c)):
            pts.append((u, v))
            wts.append(w)
    for b, c, w in six_groups:
        a = 1.0 - b - c
        for (u, v) in ((b, c), (c, b), (a, c), (c, a), (a, b), (b, a)):
            pts.append((u, v))
            wts.append(w)
    return np.array(pts), 0.5 * np.array(wts)


def gauss_triangle(order):
    """Symmetric Gauss rule on the standard simplex, exact to `order`.

    Classical fully symmetric positive rules where available; otherwise a
    conical product (Gauss-Jacobi with weight 1-x times Gauss-Legendre)
    rule, which is exact to the requested degree and positive for any
    order.  Weights sum to the reference area 1/2.
    """
    if not 1 <= order <= _MAX_TRIANGLE_ORDER:
        raise QuadratureError(
            f"unsupported order {order}; supported orders are 1..{_MAX_TRIANGLE_ORDER}")
    if order in _SYMMETRIC_RULES:
        pts, wts = _symmetric_rule(order)
        return TriangleRule(order, pts, wts)
    n = (order + 2) // 2
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    xj = 0.5 * (xj + 1.0)
    wj = wj / 4.0  # map [-1,1]->[0,1] (1/2) and Jacobi weight scaling (1/2)
    xl, wl = _gauss01(n)
    pts = np.empty((n * n, 2))
    wts = np.empty(n * n)
    idx = 0
    for a, wa in zip(xj, wj):
        for b, wb in zip(xl, wl):
            pts[idx] = (a, b * (1.0 - a))
            wts[idx] = wa * wb
            idx += 1
    return TriangleRule(order, pts, wts)


# ----------------------------------------------------------------------
# Sauter-Schwab subdomain maps.  Each map sends (e1, e2, e3, xi) in [0,1]^4
# to ((x1, x2), (y1, y2)) in T^ x T^ with the singularity-cancelling
# Jacobian folded into the weight.

def _maps_identical(e1, e2, e3, xi):
    j = xi**3 * e1**2 * e2
    return [
        (xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), j),
        (xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), j),
        (xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), j),
        (xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), j),
        (xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), j),
        (xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), j),
    ]


def _maps_edge(e1, e2, e3, xi):
    # shared edge is the image of {v = 0}; derived by scaling toward the
    # shared vertex (xi = max(x1, y1)) and corner Duffy in the transverse
    # variables, with one region split to keep the x2/y2 ordering explicit
    j1 = xi**3 * e1**2
    jo = xi**3 * e1**2 * e2
    return [
        (xi, xi * e1 * e3, xi * (1 - e1 * (1 - e2)), xi * e1 * e2, j1),
        (xi, xi * e1, xi * (1 - e1 * e2 * (1 - e3)), xi * e1 * e2 * e3, jo),
        (xi * (1 - e1 * e2 * (1 - e3)), xi * e1 * e2 * e3, xi, xi * e1, jo),
        (xi * (1 - e1 * (1 - e2)), xi * e1 * e2, xi, xi * e1 * e2 * e3, jo),
        (xi * (1 - e1 * (1 - e2 * e3)), xi * e1 * e2 * e3, xi, xi * e1 * e2, jo),
    ]


def _maps_vertex(e1, e2, e3, xi):
    # shared vertex is the image of (0, 0) on both panels
    j = xi**3 * e2
    return [
        (xi, xi * e1, xi * e2, xi * e2 * e3, j),
        (xi * e2, xi * e2 * e3, xi, xi * e1, j),
    ]


_SINGULAR_MAPS = {
    IDENTICAL: _maps_identical,
    COMMON_EDGE: _maps_edge,
    COMMON_VERTEX: _maps_vertex,
}


def sauter_schwab_rule(kind, gauss_order):
    """Panel-pair rule for the given adjacency class.

    For the singular classes `gauss_order` is the number of 1-D Gauss points
    per parameter direction of the regularizing transform (points scale as
    gauss_order^4 per subdomain).  For Disjoint it is the polynomial order
    of the underlying TriangleRule and the rule is its tensor square.
    """
    if kind == DISJOINT:
        tri = gauss_triangle(gauss_order)
        return tensor_pair_rule(tri, tri)
    if kind not in _SINGULAR_MAPS:
        raise QuadratureError(f"unknown panel-pair class {kind}")
    maps = _SINGULAR_MAPS[kind]
    x, w = _gauss01(gauss_order)
    pts = []
    wts = []
    for a, wa in zip(x, w):
        for b, wb in zip(x, w):
            for c, wc in zip(x, w):
                for d, wd in zip(x, w):
                    base = wa * wb * wc * wd
                    for (x1, x2, y1, y2, j) in maps(a, b, c, d):
                        pts.append((x1, x2, y1, y2))
                        wts.append(base * j)
    return PairRule(kind, np.array(pts), np.array(wts))


def _tri_to_ss(points):
    """Map simplex coordinates (u, v) [barycentric (1-u-v, u, v)] to the
    Sauter-Schwab element: (u', v') = (u+v, v)."""
    out = np.empty_like(points)
    out[:, 0] = points[:, 0] + points[:, 1]
    out[:, 1] = points[:, 1]
    return out


def tensor_pair_rule(rule_x, rule_y):
    """Tensor product of two TriangleRules as a Disjoint-class PairRule."""
    px = _tri_to_ss(rule_x.points)
    py = _tri_to_ss(rule_y.points)
    nx, ny = len(px), len(py)
    pts = np.empty((nx * ny, 4))
    pts[:, :2] = np.repeat(px, ny, axis=0)
    pts[:, 2:] = np.tile(py, (nx, 1))
    wts = (rule_x.weights[:, None] * rule_y.weights[None, :]).ravel()
    return PairRule(DISJOINT, pts, wts)


def panel_map(mesh, i, perm=(0, 1, 2)):
    """Affine map data (origin A, edge vectors B-A and C-B) for panel i with
    local vertices permuted."""
    tri = mesh.vertices[mesh.panels[i][list(perm)]]
    return tri[0], tri[1] - tri[0], tri[2] - tri[1]


def integrate_pair(mesh, i, j, kernel, rule, perm_i=(0, 1, 2), perm_j=(0, 1, 2),
                   density_i=None, density_j=None):
    """Quadrature approximation of the panel-pair integral

        int_{tau_i} int_{tau_j} kernel(x, y) d_i(x) d_j(y) dsigma(y) dsigma(x)

    kernel takes (x_block, y_block) arrays of shape (n, 3) and returns (n,)
    values; densities (optional) take point arrays likewise.
    """
    a_i, e1_i, e2_i = panel_map(mesh, i, perm_i)
    a_j, e1_j, e2_j = panel_map(mesh, j, perm_j)
    p = rule.points
    x = a_i + np.outer(p[:, 0], e1_i) + np.outer(p[:, 1], e2_i)
    y = a_j + np.outer(p[:, 2], e1_j) + np.outer(p[:, 3], e2_j)
    vals = kernel(x, y)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"non-finite kernel value on panel pair ({i}, {j})")
    if density_i is not None:
        vals = vals * density_i(x)
    if density_j is not None:
        vals = vals * density_j(y)
    scale = 4.0 * mesh.panel_areas[i] * mesh.panel_areas[j]
    return scale * np.dot(rule.weights, vals)
