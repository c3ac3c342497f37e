"""Numba kernels for Galerkin assembly of the boundary operators.

Layout conventions shared by all kernels:

* regular (disjoint-pair) quadrature uses per-panel physical points with
  the 2*area Jacobian folded into the per-panel weights; a pair integral
  is then sum_pq w_p w_q kernel(x_p, y_q);
* singular pairs are listed explicitly (ordered, with matched local vertex
  permutations) and integrated with Sauter-Schwab rules given in reference
  coordinates of the element {0 <= x2 <= x1 <= 1};
* accumulation order is deterministic: every output entry is written by
  exactly one thread, with sequential inner loops.
"""
import numpy as np
from numba import njit, prange

FOUR_PI = 4.0 * np.pi


@njit(cache=True)
def _pair_far(ci, cj, di, dj, factor):
    dx = ci[0] - cj[0]
    dy = ci[1] - cj[1]
    dz = ci[2] - cj[2]
    dist = np.sqrt(dx * dx + dy * dy + dz * dz)
    dmax = di if di > dj else dj
    return dist > factor * dmax


@njit(cache=True, parallel=True, fastmath=True)
def v_regular_upper(pts_f, wts_f, pts_n, wts_n, cent, diam, noff, nids,
                    k, far_factor, out):
    """Single layer, disjoint pairs, upper triangle only (kernel symmetric)."""
    n = pts_f.shape[0]
    for i in prange(n):
        ptr = noff[i]
        while ptr < noff[i + 1] and nids[ptr] <= i:
            ptr += 1
        for j in range(i + 1, n):
            if ptr < noff[i + 1] and nids[ptr] == j:
                ptr += 1
                continue
            far = _pair_far(cent[i], cent[j], diam[i], diam[j], far_factor)
            if far:
                xi, wi = pts_f[i], wts_f[i]
                yj, wj = pts_f[j], wts_f[j]
            else:
                xi, wi = pts_n[i], wts_n[i]
                yj, wj = pts_n[j], wts_n[j]
            acc = 0.0 + 0.0j
            for p in range(xi.shape[0]):
                xp = xi[p]
                sub = 0.0 + 0.0j
                for q in range(yj.shape[0]):
                    dx = xp[0] - yj[q, 0]
                    dy = xp[1] - yj[q, 1]
                    dz = xp[2] - yj[q, 2]
                    r = np.sqrt(dx * dx + dy * dy + dz * dz)
                    sub += wj[q] * np.exp(1j * k * r) / r
                acc += wi[p] * sub
            out[i, j] = acc / FOUR_PI


@njit(cache=True, parallel=True, fastmath=True)
def v_singular(verts, panels, areas, si, sj, scls, sperm_i, sperm_j,
               pts_by_class, wts_by_class, cls_off, k, out):
    """Single layer on the listed singular pairs.

    The kernel is symmetric, so only pairs with i <= j are integrated and
    the value is assigned to both orientations; this keeps the assembled
    matrix symmetric to round-off.
    """
    for t in prange(si.shape[0]):
        i = si[t]
        j = sj[t]
        if i > j:
            continue
        c = scls[t]
        a0 = verts[panels[i, sperm_i[t, 0]]]
        a1 = verts[panels[i, sperm_i[t, 1]]]
        a2 = verts[panels[i, sperm_i[t, 2]]]
        b0 = verts[panels[j, sperm_j[t, 0]]]
        b1 = verts[panels[j, sperm_j[t, 1]]]
        b2 = verts[panels[j, sperm_j[t, 2]]]
        acc = 0.0 + 0.0j
        for q in range(cls_off[c], cls_off[c + 1]):
            x1 = pts_by_class[q, 0]
            x2 = pts_by_class[q, 1]
            y1 = pts_by_class[q, 2]
            y2 = pts_by_class[q, 3]
            w = wts_by_class[q]
            xx = a0[0] + x1 * (a1[0] - a0[0]) + x2 * (a2[0] - a1[0])
            xy = a0[1] + x1 * (a1[1] - a0[1]) + x2 * (a2[1] - a1[1])
            xz = a0[2] + x1 * (a1[2] - a0[2]) + x2 * (a2[2] - a1[2])
            yx = b0[0] + y1 * (b1[0] - b0[0]) + y2 * (b2[0] - b1[0])
            yy = b0[1] + y1 * (b1[1] - b0[1]) + y2 * (b2[1] - b1[1])
            yz = b0[2] + y1 * (b1[2] - b0[2]) + y2 * (b2[2] - b1[2])
            dx = xx - yx
            dy = xy - yy
            dz = xz - yz
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            acc += w * np.exp(1j * k * r) / r
        val = acc * 4.0 * areas[i] * areas[j] / FOUR_PI
        out[i, j] = val
        out[j, i] = val


@njit(cache=True, parallel=True, fastmath=True)
def d_regular_upper(pts_f, wts_f, hats_f, pts_n, wts_n, hats_n, cent, diam,
                    normals, panels, v2d, curls, noff, nids, k, lam, far_factor,
                    n_chunks, out_private):
    """Hypersingular (Maue form), disjoint pairs.

    Bilinear form is symmetric: pairs (i, j) with j > i are integrated once
    and scattered to both orientations.  Each of the n_chunks strided panel
    subsets accumulates into its own private matrix (summed by the caller),
    so the vertex scatter is race-free and deterministic.
    """
    n = pts_f.shape[0]
    for c in prange(n_chunks):
        out = out_private[c]
        for i in range(c, n, n_chunks):
            ptr = noff[i]
            while ptr < noff[i + 1] and nids[ptr] <= i:
                ptr += 1
            for j in range(i + 1, n):
                if ptr < noff[i + 1] and nids[ptr] == j:
                    ptr += 1
                    continue
                far = _pair_far(cent[i], cent[j], diam[i], diam[j], far_factor)
                if far:
                    xi, wi, hi = pts_f[i], wts_f[i], hats_f
                    yj, wj, hj = pts_f[j], wts_f[j], hats_f
                else:
                    xi, wi, hi = pts_n[i], wts_n[i], hats_n
                    yj, wj, hj = pts_n[j], wts_n[j], hats_n
                npi = xi.shape[0]
                npj = yj.shape[0]
                s0 = 0.0 + 0.0j
                s1 = np.zeros((3, 3), dtype=np.complex128)
                for p in range(npi):
                    xp = xi[p]
                    gq0 = 0.0 + 0.0j
                    gh0 = 0.0 + 0.0j
                    gh1 = 0.0 + 0.0j
                    gh2 = 0.0 + 0.0j
                    for q in range(npj):
                        dx = xp[0] - yj[q, 0]
                        dy = xp[1] - yj[q, 1]
                        dz = xp[2] - yj[q, 2]
                        r = np.sqrt(dx * dx + dy * dy + dz * dz)
                        g = wj[q] * np.exp(1j * k * r) / r
                        gq0 += g
                        gh0 += g * hj[q, 0]
                        gh1 += g * hj[q, 1]
                        gh2 += g * hj[q, 2]
                    wp = wi[p]
                    s0 += wp * gq0
                    for a in range(3):
                        wh = wp * hi[p, a]
                        s1[a, 0] += wh * gh0
                        s1[a, 1] += wh * gh1
                        s1[a, 2] += wh * gh2
                s0 /= FOUR_PI
                nunu = (normals[i, 0] * normals[j, 0] + normals[i, 1] * normals[j, 1]
                        + normals[i, 2] * normals[j, 2])
                for a in range(3):
                    ra = v2d[panels[i, a]]
                    if ra < 0:
                        continue
                    for b in range(3):
                        cb = v2d[panels[j, b]]
                        if cb < 0:
                            continue
                        cc = (curls[i, a, 0] * curls[j, b, 0]
                              + curls[i, a, 1] * curls[j, b, 1]
                              + curls[i, a, 2] * curls[j, b, 2])
                        val = cc * s0 - lam * nunu * s1[a, b] / FOUR_PI
                        out[ra, cb] += val
                        out[cb, ra] += val


@njit(cache=True, fastmath=True)
def d_singular(verts, panels, areas, normals, v2d, curls, si, sj, scls,
               sperm_i, sperm_j, pts_by_class, wts_by_class, cls_off, k, lam, out):
    """Hypersingular contributions of the listed singular pairs (sequential:
    scatters into shared rows).  The bilinear form is symmetric, so pairs
    with i < j are integrated once and scattered to both orientations."""
    for t in range(si.shape[0]):
        i = si[t]
        j = sj[t]
        if i > j:
            continue
        c = scls[t]
        a0 = verts[panels[i, sperm_i[t, 0]]]
        a1 = verts[panels[i, sperm_i[t, 1]]]
        a2 = verts[panels[i, sperm_i[t, 2]]]
        b0 = verts[panels[j, sperm_j[t, 0]]]
        b1 = verts[panels[j, sperm_j[t, 1]]]
        b2 = verts[panels[j, sperm_j[t, 2]]]
        s0 = 0.0 + 0.0j
        s1 = np.zeros((3, 3), dtype=np.complex128)
        for q in range(cls_off[c], cls_off[c + 1]):
            x1 = pts_by_class[q, 0]
            x2 = pts_by_class[q, 1]
            y1 = pts_by_class[q, 2]
            y2 = pts_by_class[q, 3]
            w = wts_by_class[q]
            xx = a0[0] + x1 * (a1[0] - a0[0]) + x2 * (a2[0] - a1[0])
            xy = a0[1] + x1 * (a1[1] - a0[1]) + x2 * (a2[1] - a1[1])
            xz = a0[2] + x1 * (a1[2] - a0[2]) + x2 * (a2[2] - a1[2])
            yx = b0[0] + y1 * (b1[0] - b0[0]) + y2 * (b2[0] - b1[0])
            yy = b0[1] + y1 * (b1[1] - b0[1]) + y2 * (b2[1] - b1[1])
            yz = b0[2] + y1 * (b1[2] - b0[2]) + y2 * (b2[2] - b1[2])
            dx = xx - yx
            dy = xy - yy
            dz = xz - yz
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            g = w * np.exp(1j * k * r) / r
            s0 += g
            # hats on the Sauter-Schwab element: (1-x1, x1-x2, x2)
            hx0 = 1.0 - x1
            hx1 = x1 - x2
            hx2 = x2
            hy0 = 1.0 - y1
            hy1 = y1 - y2
            hy2 = y2
            s1[0, 0] += g * hx0 * hy0
            s1[0, 1] += g * hx0 * hy1
            s1[0, 2] += g * hx0 * hy2
            s1[1, 0] += g * hx1 * hy0
            s1[1, 1] += g * hx1 * hy1
            s1[1, 2] += g * hx1 * hy2
            s1[2, 0] += g * hx2 * hy0
            s1[2, 1] += g * hx2 * hy1
            s1[2, 2] += g * hx2 * hy2
        scale = 4.0 * areas[i] * areas[j] / FOUR_PI
        nunu = (normals[i, 0] * normals[j, 0] + normals[i, 1] * normals[j, 1]
                + normals[i, 2] * normals[j, 2])
        for a in range(3):
            ra = v2d[panels[i, sperm_i[t, a]]]
            if ra < 0:
                continue
            for b in range(3):
                cb = v2d[panels[j, sperm_j[t, b]]]
                if cb < 0:
                    continue
                cc = (curls[i, sperm_i[t, a], 0] * curls[j, sperm_j[t, b], 0]
                      + curls[i, sperm_i[t, a], 1] * curls[j, sperm_j[t, b], 1]
                      + curls[i, sperm_i[t, a], 2] * curls[j, sperm_j[t, b], 2])
                val = (cc * s0 - lam * nunu * s1[a, b]) * scale
                out[ra, cb] += val
                if i != j:
                    out[cb, ra] += val


@njit(cache=True, parallel=True, fastmath=True)
def k_regular(pts_f, wts_f, hats_f, pts_n, wts_n, hats_n, cent, diam,
              normals, panels, v2d, noff, nids, k, far_factor, out):
    """Double layer K (test S0 rows, trial S1 columns), disjoint pairs."""
    n = pts_f.shape[0]
    for i in prange(n):
        ptr = noff[i]
        for j in range(n):
            if j == i:
                continue
            if ptr < noff[i + 1] and nids[ptr] == j:
                ptr += 1
                continue
            far = _pair_far(cent[i], cent[j], diam[i], diam[j], far_factor)
            if far:
                xi, wi = pts_f[i], wts_f[i]
                yj, wj, hj = pts_f[j], wts_f[j], hats_f
            else:
                xi, wi = pts_n[i], wts_n[i]
                yj, wj, hj = pts_n[j], wts_n[j], hats_n
            sb0 = 0.0 + 0.0j
            sb1 = 0.0 + 0.0j
            sb2 = 0.0 + 0.0j
            for p in range(xi.shape[0]):
                xp = xi[p]
                a0 = 0.0 + 0.0j
                a1 = 0.0 + 0.0j
                a2 = 0.0 + 0.0j
                for q in range(yj.shape[0]):
                    dx = xp[0] - yj[q, 0]
                    dy = xp[1] - yj[q, 1]
                    dz = xp[2] - yj[q, 2]
                    r = np.sqrt(dx * dx + dy * dy + dz * dz)
                    dn = dx * normals[j, 0] + dy * normals[j, 1] + dz * normals[j, 2]
                    g = wj[q] * dn * np.exp(1j * k * r) / (r * r) * (1.0 / r - 1j * k)
                    a0 += g * hj[q, 0]
                    a1 += g * hj[q, 1]
                    a2 += g * hj[q, 2]
                sb0 += wi[p] * a0
                sb1 += wi[p] * a1
                sb2 += wi[p] * a2
            c0 = v2d[panels[j, 0]]
            c1 = v2d[panels[j, 1]]
            c2 = v2d[panels[j, 2]]
            if c0 >= 0:
                out[i, c0] += sb0 / FOUR_PI
            if c1 >= 0:
                out[i, c1] += sb1 / FOUR_PI
            if c2 >= 0:
                out[i, c2] += sb2 / FOUR_PI


@njit(cache=True, fastmath=True)
def k_singular(verts, panels, areas, normals, v2d, si, sj, scls,
               sperm_i, sperm_j, pts_by_class, wts_by_class, cls_off, k, out):
    """Double layer K on listed singular pairs (identical pairs are skipped
    by the caller: the kernel vanishes on flat panels)."""
    for t in range(si.shape[0]):
        i = si[t]
        j = sj[t]
        c = scls[t]
        a0 = verts[panels[i, sperm_i[t, 0]]]
        a1 = verts[panels[i, sperm_i[t, 1]]]
        a2 = verts[panels[i, sperm_i[t, 2]]]
        b0 = verts[panels[j, sperm_j[t, 0]]]
        b1 = verts[panels[j, sperm_j[t, 1]]]
        b2 = verts[panels[j, sperm_j[t, 2]]]
        s = np.zeros(3, dtype=np.complex128)
        for q in range(cls_off[c], cls_off[c + 1]):
            x1 = pts_by_class[q, 0]
            x2 = pts_by_class[q, 1]
            y1 = pts_by_class[q, 2]
            y2 = pts_by_class[q, 3]
            w = wts_by_class[q]
            xx = a0[0] + x1 * (a1[0] - a0[0]) + x2 * (a2[0] - a1[0])
            xy = a0[1] + x1 * (a1[1] - a0[1]) + x2 * (a2[1] - a1[1])
            xz = a0[2] + x1 * (a1[2] - a0[2]) + x2 * (a2[2] - a1[2])
            yx = b0[0] + y1 * (b1[0] - b0[0]) + y2 * (b2[0] - b1[0])
            yy = b0[1] + y1 * (b1[1] - b0[1]) + y2 * (b2[1] - b1[1])
            yz = b0[2] + y1 * (b1[2] - b0[2]) + y2 * (b2[2] - b1[2])
            dx = xx - yx
            dy = xy - yy
            dz = xz - yz
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            dn = dx * normals[j, 0] + dy * normals[j, 1] + dz * normals[j, 2]
            g = w * dn * np.exp(1j * k * r) / (r * r) * (1.0 / r - 1j * k)
            s[0] += g * (1.0 - y1)
            s[1] += g * (y1 - y2)
            s[2] += g * y2
        scale = 4.0 * areas[i] * areas[j] / FOUR_PI
        for b in range(3):
            cb = v2d[panels[j, sperm_j[t, b]]]
            if cb >= 0:
                out[i, cb] += s[b] * scale


@njit(cache=True, parallel=True, fastmath=True)
def kp_regular(pts_f, wts_f, hats_f, pts_n, wts_n, hats_n, cent, diam,
               normals, panels, v2d, noff, nids, k, far_factor, out):
    """Adjoint double layer K' (test S1 rows, trial S0 columns), disjoint
    pairs; parallel over trial panels (column owners)."""
    n = pts_f.shape[0]
    for j in prange(n):
        ptr = noff[j]
        for i in range(n):
            if i == j:
                continue
            if ptr < noff[j + 1] and nids[ptr] == i:
                ptr += 1
                continue
            far = _pair_far(cent[i], cent[j], diam[i], diam[j], far_factor)
            if far:
                xi, wi, hi = pts_f[i], wts_f[i], hats_f
                yj, wj = pts_f[j], wts_f[j]
            else:
                xi, wi, hi = pts_n[i], wts_n[i], hats_n
                yj, wj = pts_n[j], wts_n[j]
            sa0 = 0.0 + 0.0j
            sa1 = 0.0 + 0.0j
            sa2 = 0.0 + 0.0j
            for p in range(xi.shape[0]):
                xp = xi[p]
                acc = 0.0 + 0.0j
                for q in range(yj.shape[0]):
                    dx = xp[0] - yj[q, 0]
                    dy = xp[1] - yj[q, 1]
                    dz = xp[2] - yj[q, 2]
                    r = np.sqrt(dx * dx + dy * dy + dz * dz)
                    dn = dx * normals[i, 0] + dy * normals[i, 1] + dz * normals[i, 2]
                    # nu(x) . grad_x G = dn * e^{ikr} (ik - 1/r) / (4 pi r^2)
                    acc += wj[q] * dn * np.exp(1j * k * r) / (r * r) * (1j * k - 1.0 / r)
                wp = wi[p]
                sa0 += wp * acc * hi[p, 0]
                sa1 += wp * acc * hi[p, 1]
                sa2 += wp * acc * hi[p, 2]
            r0 = v2d[panels[i, 0]]
            r1 = v2d[panels[i, 1]]
            r2 = v2d[panels[i, 2]]
            if r0 >= 0:
                out[r0, j] += sa0 / FOUR_PI
            if r1 >= 0:
                out[r1, j] += sa1 / FOUR_PI
            if r2 >= 0:
                out[r2, j] += sa2 / FOUR_PI


@njit(cache=True, fastmath=True)
def kp_singular(verts, panels, areas, normals, v2d, si, sj, scls,
                sperm_i, sperm_j, pts_by_class, wts_by_class, cls_off, k, out):
    """Adjoint double layer on listed singular pairs."""
    for t in range(si.shape[0]):
        i = si[t]
        j = sj[t]
        c = scls[t]
        a0 = verts[panels[i, sperm_i[t, 0]]]
        a1 = verts[panels[i, sperm_i[t, 1]]]
        a2 = verts[panels[i, sperm_i[t, 2]]]
        b0 = verts[panels[j, sperm_j[t, 0]]]
        b1 = verts[panels[j, sperm_j[t, 1]]]
        b2 = verts[panels[j, sperm_j[t, 2]]]
        s = np.zeros(3, dtype=np.complex128)
        for q in range(cls_off[c], cls_off[c + 1]):
            x1 = pts_by_class[q, 0]
            x2 = pts_by_class[q, 1]
            y1 = pts_by_class[q, 2]
            y2 = pts_by_class[q, 3]
            w = wts_by_class[q]
            xx = a0[0] + x1 * (a1[0] - a0[0]) + x2 * (a2[0] - a1[0])
            xy = a0[1] + x1 * (a1[1] - a0[1]) + x2 * (a2[1] - a1[1])
            xz = a0[2] + x1 * (a1[2] - a0[2]) + x2 * (a2[2] - a1[2])
            yx = b0[0] + y1 * (b1[0] - b0[0]) + y2 * (b2[0] - b1[0])
            yy = b0[1] + y1 * (b1[1] - b0[1]) + y2 * (b2[1] - b1[1])
            yz = b0[2] + y1 * (b1[2] - b0[2]) + y2 * (b2[2] - b1[2])
            dx = xx - yx
            dy = xy - yy
            dz = xz - yz
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            dn = dx * normals[i, 0] + dy * normals[i, 1] + dz * normals[i, 2]
            g = w * dn * np.exp(1j * k * r) / (r * r) * (1j * k - 1.0 / r)
            s[0] += g * (1.0 - x1)
            s[1] += g * (x1 - x2)
            s[2] += g * x2
        scale = 4.0 * areas[i] * areas[j] / FOUR_PI
        for a in range(3):
            ra = v2d[panels[i, sperm_i[t, a]]]
            if ra >= 0:
                out[ra, j] += s[a] * scale
