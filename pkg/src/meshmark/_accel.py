"""Compiled kernels: BVH construction, ray traversal, Gaussian gathering.

Everything here is deliberately branch-simple so numba can compile it
once and cache the result. Kernels are IEEE-strict (no fastmath) except
the Gaussian pair loop, where reassociation is harmless because results
feed tolerance-based comparisons only.

Layout conventions:

* Triangle corner arrays ``tv0/tv1/tv2`` are reordered by the BVH's
  primitive permutation, so leaves reference contiguous rows; ``prim``
  maps a row back to the original face id.
* Nodes are flat parallel arrays. ``left < 0`` marks a leaf, in which
  case ``start``/``count`` give the primitive range.
"""

from __future__ import annotations

import numpy as np
from numba import njit

DET_EPS = 1e-12
T_TIE = 1e-9
LEAF_MAX = 8

# hit window capacity for the t-tie rule; more than this many faces
# within 1e-9 of the nearest t would degrade tie resolution
_WINDOW = 32


@njit(cache=True)
def _key_less(av, ai, bv, bi):
    # strict total order on (centroid value, face id); makes every
    # partition deterministic even with duplicated coordinates
    if av < bv:
        return True
    if av > bv:
        return False
    return ai < bi


@njit(cache=True)
def _nth_element(prim, cent, axis, lo, hi, k):
    # iterative Lomuto quickselect with median-of-three pivots
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        p0 = prim[lo]
        p1 = prim[mid]
        p2 = prim[hi - 1]
        v0 = cent[p0, axis]
        v1 = cent[p1, axis]
        v2 = cent[p2, axis]
        if _key_less(v0, p0, v1, p1):
            if _key_less(v1, p1, v2, p2):
                m = mid
            elif _key_less(v0, p0, v2, p2):
                m = hi - 1
            else:
                m = lo
        else:
            if _key_less(v0, p0, v2, p2):
                m = lo
            elif _key_less(v1, p1, v2, p2):
                m = hi - 1
            else:
                m = mid
        tmp = prim[m]
        prim[m] = prim[hi - 1]
        prim[hi - 1] = tmp

        pid = prim[hi - 1]
        pv = cent[pid, axis]
        store = lo
        for i in range(lo, hi - 1):
            q = prim[i]
            if _key_less(cent[q, axis], q, pv, pid):
                tmp = prim[i]
                prim[i] = prim[store]
                prim[store] = tmp
                store += 1
        tmp = prim[store]
        prim[store] = prim[hi - 1]
        prim[hi - 1] = tmp

        if store == k:
            return
        if k < store:
            hi = store
        else:
            lo = store + 1


@njit(cache=True)
def _build_kernel(tlo, thi, cent):
    F = tlo.shape[0]
    maxn = 2 * F
    nlo = np.empty((maxn, 3), np.float64)
    nhi = np.empty((maxn, 3), np.float64)
    left = np.full(maxn, -1, np.int64)
    right = np.full(maxn, -1, np.int64)
    start = np.full(maxn, -1, np.int64)
    count = np.zeros(maxn, np.int64)
    prim = np.arange(F)

    stack = np.empty((128, 3), np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = F
    nn = 1
    while top >= 0:
        node = stack[top, 0]
        lo = stack[top, 1]
        hi = stack[top, 2]
        top -= 1

        bl0 = bl1 = bl2 = np.inf
        bh0 = bh1 = bh2 = -np.inf
        cl0 = cl1 = cl2 = np.inf
        ch0 = ch1 = ch2 = -np.inf
        for i in range(lo, hi):
            p = prim[i]
            if tlo[p, 0] < bl0:
                bl0 = tlo[p, 0]
            if tlo[p, 1] < bl1:
                bl1 = tlo[p, 1]
            if tlo[p, 2] < bl2:
                bl2 = tlo[p, 2]
            if thi[p, 0] > bh0:
                bh0 = thi[p, 0]
            if thi[p, 1] > bh1:
                bh1 = thi[p, 1]
            if thi[p, 2] > bh2:
                bh2 = thi[p, 2]
            c0 = cent[p, 0]
            c1 = cent[p, 1]
            c2 = cent[p, 2]
            if c0 < cl0:
                cl0 = c0
            if c0 > ch0:
                ch0 = c0
            if c1 < cl1:
                cl1 = c1
            if c1 > ch1:
                ch1 = c1
            if c2 < cl2:
                cl2 = c2
            if c2 > ch2:
                ch2 = c2
        nlo[node, 0] = bl0
        nlo[node, 1] = bl1
        nlo[node, 2] = bl2
        nhi[node, 0] = bh0
        nhi[node, 1] = bh1
        nhi[node, 2] = bh2

        n = hi - lo
        if n <= LEAF_MAX:
            start[node] = lo
            count[node] = n
            continue

        e0 = ch0 - cl0
        e1 = ch1 - cl1
        e2 = ch2 - cl2
        axis = 0
        be = e0
        if e1 > be:
            axis = 1
            be = e1
        if e2 > be:
            axis = 2
        mid = (lo + hi) >> 1
        _nth_element(prim, cent, axis, lo, hi, mid)

        lchild = nn
        rchild = nn + 1
        nn += 2
        left[node] = lchild
        right[node] = rchild
        top += 1
        stack[top, 0] = rchild
        stack[top, 1] = mid
        stack[top, 2] = hi
        top += 1
        stack[top, 0] = lchild
        stack[top, 1] = lo
        stack[top, 2] = mid

    return (
        nlo[:nn].copy(),
        nhi[:nn].copy(),
        left[:nn].copy(),
        right[:nn].copy(),
        start[:nn].copy(),
        count[:nn].copy(),
        prim,
    )


@njit(cache=True)
def _mt(ax, ay, az, bx, by, bz, cx, cy, cz, ox, oy, oz, dx, dy, dz):
    # Moller-Trumbore; edge-inclusive, |det| < 1e-12 counts as parallel
    e1x = bx - ax
    e1y = by - ay
    e1z = bz - az
    e2x = cx - ax
    e2y = cy - ay
    e2z = cz - az
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    if -DET_EPS < det < DET_EPS:
        return False, 0.0, 0.0, 0.0
    inv = 1.0 / det
    sx = ox - ax
    sy = oy - ay
    sz = oz - az
    u = (sx * px + sy * py + sz * pz) * inv
    if u < 0.0:
        return False, 0.0, 0.0, 0.0
    qx = sy * e1z - sz * e1y
    qy = sz * e1x - sx * e1z
    qz = sx * e1y - sy * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < 0.0 or u + v > 1.0 + T_TIE:
        return False, 0.0, 0.0, 0.0
    t = (e2x * qx + e2y * qy + e2z * qz) * inv
    if t < 0.0:
        return False, 0.0, 0.0, 0.0
    return True, t, u, v


@njit(cache=True)
def _slab_entry(nlo, nhi, node, ox, oy, oz, dx, dy, dz):
    # entry parameter of the ray segment [0, inf) through the node box;
    # zero direction components degrade to a point-in-slab test
    tmin = 0.0
    tmax = np.inf

    if dx != 0.0:
        inv = 1.0 / dx
        t1 = (nlo[node, 0] - ox) * inv
        t2 = (nhi[node, 0] - ox) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    elif ox < nlo[node, 0] or ox > nhi[node, 0]:
        return False, 0.0

    if dy != 0.0:
        inv = 1.0 / dy
        t1 = (nlo[node, 1] - oy) * inv
        t2 = (nhi[node, 1] - oy) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    elif oy < nlo[node, 1] or oy > nhi[node, 1]:
        return False, 0.0

    if dz != 0.0:
        inv = 1.0 / dz
        t1 = (nlo[node, 2] - oz) * inv
        t2 = (nhi[node, 2] - oz) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    elif oz < nlo[node, 2] or oz > nhi[node, 2]:
        return False, 0.0

    if tmax < tmin:
        return False, 0.0
    return True, tmin


@njit(cache=True)
def _nearest_core(nlo, nhi, left, right, start, count, prim, tv0, tv1, tv2,
                  ox, oy, oz, dx, dy, dz):
    # Nearest hit under the tie rule: among hits with t within T_TIE of
    # the minimal t, the smallest face id wins. A small window of
    # near-minimal hits is kept so the outcome is traversal-order
    # independent.
    ok0, te = _slab_entry(nlo, nhi, 0, ox, oy, oz, dx, dy, dz)
    if not ok0:
        return -1, 0.0, 0.0, 0.0

    stack = np.empty(128, np.int64)
    tstk = np.empty(128, np.float64)
    sp = 0
    stack[0] = 0
    tstk[0] = te

    tmin = np.inf
    wn = 0
    wt = np.empty(_WINDOW, np.float64)
    wf = np.empty(_WINDOW, np.int64)
    wu = np.empty(_WINDOW, np.float64)
    wv = np.empty(_WINDOW, np.float64)

    while sp >= 0:
        node = stack[sp]
        te = tstk[sp]
        sp -= 1
        if te > tmin + T_TIE:
            continue
        l = left[node]
        if l < 0:
            s = start[node]
            for i in range(s, s + count[node]):
                hit, t, u, v = _mt(
                    tv0[i, 0], tv0[i, 1], tv0[i, 2],
                    tv1[i, 0], tv1[i, 1], tv1[i, 2],
                    tv2[i, 0], tv2[i, 1], tv2[i, 2],
                    ox, oy, oz, dx, dy, dz,
                )
                if not hit:
                    continue
                f = prim[i]
                if t < tmin:
                    tmin = t
                    k = 0
                    for w in range(wn):
                        if wt[w] <= tmin + T_TIE:
                            wt[k] = wt[w]
                            wf[k] = wf[w]
                            wu[k] = wu[w]
                            wv[k] = wv[w]
                            k += 1
                    wn = k
                if t <= tmin + T_TIE:
                    if wn < _WINDOW:
                        wt[wn] = t
                        wf[wn] = f
                        wu[wn] = u
                        wv[wn] = v
                        wn += 1
                    else:
                        mx = 0
                        for w in range(1, wn):
                            if wf[w] > wf[mx]:
                                mx = w
                        if f < wf[mx]:
                            wt[mx] = t
                            wf[mx] = f
                            wu[mx] = u
                            wv[mx] = v
        else:
            r = right[node]
            okl, tl = _slab_entry(nlo, nhi, l, ox, oy, oz, dx, dy, dz)
            okr, tr = _slab_entry(nlo, nhi, r, ox, oy, oz, dx, dy, dz)
            lim = tmin + T_TIE
            if okl and okr:
                # push the farther child first so the nearer is popped first
                if tl <= tr:
                    if tr <= lim:
                        sp += 1
                        stack[sp] = r
                        tstk[sp] = tr
                    if tl <= lim:
                        sp += 1
                        stack[sp] = l
                        tstk[sp] = tl
                else:
                    if tl <= lim:
                        sp += 1
                        stack[sp] = l
                        tstk[sp] = tl
                    if tr <= lim:
                        sp += 1
                        stack[sp] = r
                        tstk[sp] = tr
            elif okl:
                if tl <= lim:
                    sp += 1
                    stack[sp] = l
                    tstk[sp] = tl
            elif okr:
                if tr <= lim:
                    sp += 1
                    stack[sp] = r
                    tstk[sp] = tr

    if wn == 0:
        return -1, 0.0, 0.0, 0.0
    best = 0
    for w in range(1, wn):
        if wf[w] < wf[best]:
            best = w
    return wf[best], wt[best], wu[best], wv[best]


@njit(cache=True)
def _raycast_nearest_kernel(nlo, nhi, left, right, start, count, prim,
                            tv0, tv1, tv2, ox, oy, oz, dx, dy, dz):
    return _nearest_core(nlo, nhi, left, right, start, count, prim,
                         tv0, tv1, tv2, ox, oy, oz, dx, dy, dz)


@njit(cache=True)
def _raycast_nearest_batch_kernel(nlo, nhi, left, right, start, count, prim,
                                  tv0, tv1, tv2, org, dirs,
                                  out_f, out_t, out_u, out_v):
    for i in range(org.shape[0]):
        f, t, u, v = _nearest_core(
            nlo, nhi, left, right, start, count, prim, tv0, tv1, tv2,
            org[i, 0], org[i, 1], org[i, 2],
            dirs[i, 0], dirs[i, 1], dirs[i, 2],
        )
        out_f[i] = f
        out_t[i] = t
        out_u[i] = u
        out_v[i] = v


@njit(cache=True)
def _raycast_all_kernel(nlo, nhi, left, right, start, count, prim,
                        tv0, tv1, tv2, ox, oy, oz, dx, dy, dz,
                        out_f, out_t, out_u, out_v):
    # collects every hit; returns the total hit count, which may exceed
    # the buffer capacity (caller re-runs with a bigger buffer then)
    ok0, _ = _slab_entry(nlo, nhi, 0, ox, oy, oz, dx, dy, dz)
    if not ok0:
        return 0
    cap = out_f.shape[0]
    stack = np.empty(128, np.int64)
    sp = 0
    stack[0] = 0
    n = 0
    while sp >= 0:
        node = stack[sp]
        sp -= 1
        l = left[node]
        if l < 0:
            s = start[node]
            for i in range(s, s + count[node]):
                hit, t, u, v = _mt(
                    tv0[i, 0], tv0[i, 1], tv0[i, 2],
                    tv1[i, 0], tv1[i, 1], tv1[i, 2],
                    tv2[i, 0], tv2[i, 1], tv2[i, 2],
                    ox, oy, oz, dx, dy, dz,
                )
                if hit:
                    if n < cap:
                        out_f[n] = prim[i]
                        out_t[n] = t
                        out_u[n] = u
                        out_v[n] = v
                    n += 1
        else:
            okl, _ = _slab_entry(nlo, nhi, l, ox, oy, oz, dx, dy, dz)
            if okl:
                sp += 1
                stack[sp] = l
            r = right[node]
            okr, _ = _slab_entry(nlo, nhi, r, ox, oy, oz, dx, dy, dz)
            if okr:
                sp += 1
                stack[sp] = r
    return n


# forward neighbor offsets (dx, dy, dz) within a +-2 block,
# lexicographically positive by (dz, dy, dx); paired with in-cell pairs
# this covers each cell pair once. Cells are half the search cutoff, so
# a +-2 reach always spans the full neighborhood.
_OFFSETS = [(x, y, z)
            for z in range(-2, 3) for y in range(-2, 3) for x in range(-2, 3)
            if (z, y, x) > (0, 0, 0)]
_OFF_X = tuple(o[0] for o in _OFFSETS)
_OFF_Y = tuple(o[1] for o in _OFFSETS)
_OFF_Z = tuple(o[2] for o in _OFFSETS)


@njit(cache=True, fastmath=True)
def _gauss_pairs(px, py, pz, vals, order, cell_start, nx, ny, nz,
                 inv_two_sigma2, cutoff2, num, den):
    # symmetric accumulation over unique vertex pairs, one num/den row
    # per sigma; the self weight exp(0)=1 is added by the caller. Sigma
    # rows arrive sorted by decreasing cutoff so the scan can stop at
    # the first one a pair is too far for.
    ns = cutoff2.shape[0]
    cmax = cutoff2[0]
    for cz in range(nz):
        for cy in range(ny):
            for cx in range(nx):
                c = (cz * ny + cy) * nx + cx
                a0 = cell_start[c]
                a1 = cell_start[c + 1]
                if a0 == a1:
                    continue
                for a in range(a0, a1):
                    ia = order[a]
                    xa = px[ia]
                    ya = py[ia]
                    za = pz[ia]
                    va = vals[ia]
                    for b in range(a + 1, a1):
                        ib = order[b]
                        ddx = xa - px[ib]
                        ddy = ya - py[ib]
                        ddz = za - pz[ib]
                        d2 = ddx * ddx + ddy * ddy + ddz * ddz
                        if d2 <= cmax:
                            vb = vals[ib]
                            for s in range(ns):
                                if d2 > cutoff2[s]:
                                    break
                                w = np.exp(-d2 * inv_two_sigma2[s])
                                num[s, ia] += w * vb
                                num[s, ib] += w * va
                                den[s, ia] += w
                                den[s, ib] += w
                for t in range(62):
                    ox = cx + _OFF_X[t]
                    oy = cy + _OFF_Y[t]
                    oz = cz + _OFF_Z[t]
                    if ox < 0 or ox >= nx or oy < 0 or oy >= ny or oz < 0 or oz >= nz:
                        continue
                    o = (oz * ny + oy) * nx + ox
                    b0 = cell_start[o]
                    b1 = cell_start[o + 1]
                    if b0 == b1:
                        continue
                    for a in range(a0, a1):
                        ia = order[a]
                        xa = px[ia]
                        ya = py[ia]
                        za = pz[ia]
                        va = vals[ia]
                        for b in range(b0, b1):
                            ib = order[b]
                            ddx = xa - px[ib]
                            ddy = ya - py[ib]
                            ddz = za - pz[ib]
                            d2 = ddx * ddx + ddy * ddy + ddz * ddz
                            if d2 <= cmax:
                                vb = vals[ib]
                                for s in range(ns):
                                    if d2 > cutoff2[s]:
                                        break
                                    w = np.exp(-d2 * inv_two_sigma2[s])
                                    num[s, ia] += w * vb
                                    num[s, ib] += w * va
                                    den[s, ia] += w
                                    den[s, ib] += w
