"""Jitted scalar kernels for the 3x3 eigenproblem and the center/ratio pipeline.

Everything here operates on plain float64 arrays and returns status codes
instead of raising, so the hot path stays allocation-light; `concentric`
wraps these in the public API and maps statuses to exceptions.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Status codes shared with concentric.py.
OK = 0
SINGULAR_INNER = 1
COMPLEX_EIGENVALUES = 2
NOT_CONCENTRIC = 3
INVALID_RATIO = 4
CENTER_AT_INFINITY = 5
IDENTICAL_CONICS = 6


@njit(cache=True)
def _cubic_roots(c2, c1, c0):
    """Real roots of x^3 - c2 x^2 + c1 x - c0, with Newton polish.

    Returns (r0, r1, r2, max_imag): the roots sorted ascending (real parts
    for a conjugate pair) and the largest imaginary magnitude encountered.
    """
    s = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c1 * c2 / 3.0 - c0
    # depressed cubic y^3 + p y + q = 0 with x = y + s
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    max_imag = 0.0
    if disc > 0.0:
        rt = np.sqrt(disc)
        u = np.cbrt(-q / 2.0 + rt)
        v = np.cbrt(-q / 2.0 - rt)
        y0 = u + v
        re = -y0 / 2.0
        max_imag = abs(np.sqrt(3.0) / 2.0 * (u - v))
        roots = np.array([y0 + s, re + s, re + s])
    else:
        mp = -p / 3.0
        if mp <= 0.0:
            roots = np.array([s, s, s])
        else:
            m = 2.0 * np.sqrt(mp)
            arg = 3.0 * q / (p * m)
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            phi = np.arccos(arg)
            roots = np.empty(3)
            for k in range(3):
                roots[k] = m * np.cos((phi - 2.0 * np.pi * k) / 3.0) + s
    # one Newton step per root on the original cubic; near a double root the
    # step is noise-dominated, so keep it only when it reduces the residual
    for k in range(3):
        x = roots[k]
        f = ((x - c2) * x + c1) * x - c0
        df = (3.0 * x - 2.0 * c2) * x + c1
        if df != 0.0:
            xn = x - f / df
            fn = ((xn - c2) * xn + c1) * xn - c0
            if abs(fn) < abs(f):
                roots[k] = xn
    roots.sort()
    return roots[0], roots[1], roots[2], max_imag


@njit(cache=True)
def _solve3(B, v):
    """Solve B x = v for 3x3 B via the adjugate; returns (x, ok)."""
    a00, a01, a02 = B[0, 0], B[0, 1], B[0, 2]
    a10, a11, a12 = B[1, 0], B[1, 1], B[1, 2]
    a20, a21, a22 = B[2, 0], B[2, 1], B[2, 2]
    c00 = a11 * a22 - a12 * a21
    c01 = a12 * a20 - a10 * a22
    c02 = a10 * a21 - a11 * a20
    det = a00 * c00 + a01 * c01 + a02 * c02
    x = np.empty(3)
    if det == 0.0 or not np.isfinite(det):
        return x, False
    c10 = a02 * a21 - a01 * a22
    c11 = a00 * a22 - a02 * a20
    c12 = a01 * a20 - a00 * a21
    c20 = a01 * a12 - a02 * a11
    c21 = a02 * a10 - a00 * a12
    c22 = a00 * a11 - a01 * a10
    x[0] = (c00 * v[0] + c10 * v[1] + c20 * v[2]) / det
    x[1] = (c01 * v[0] + c11 * v[1] + c21 * v[2]) / det
    x[2] = (c02 * v[0] + c12 * v[1] + c22 * v[2]) / det
    return x, True


@njit(cache=True)
def _residual(m, lam, v):
    r0 = m[0, 0] * v[0] + m[0, 1] * v[1] + m[0, 2] * v[2] - lam * v[0]
    r1 = m[1, 0] * v[0] + m[1, 1] * v[1] + m[1, 2] * v[2] - lam * v[1]
    r2 = m[2, 0] * v[0] + m[2, 1] * v[1] + m[2, 2] * v[2] - lam * v[2]
    return np.sqrt(r0 * r0 + r1 * r1 + r2 * r2)


@njit(cache=True)
def _eigvec(m, lam, scale):
    """Unit eigenvector of m for eigenvalue lam.

    Dominant cross product of rows of (m - lam I); falls back to the
    orthogonal complement of the largest row when the rows are (nearly)
    parallel, i.e. for a two-dimensional eigenspace.
    """
    B = m - lam * np.eye(3)
    best = np.empty(3)
    best_n2 = -1.0
    for i in range(3):
        j = (i + 1) % 3
        cx = B[i, 1] * B[j, 2] - B[i, 2] * B[j, 1]
        cy = B[i, 2] * B[j, 0] - B[i, 0] * B[j, 2]
        cz = B[i, 0] * B[j, 1] - B[i, 1] * B[j, 0]
        n2 = cx * cx + cy * cy + cz * cz
        if n2 > best_n2:
            best_n2 = n2
            best[0], best[1], best[2] = cx, cy, cz
    row_n2 = 0.0
    wi = 0
    for i in range(3):
        n2 = B[i, 0] ** 2 + B[i, 1] ** 2 + B[i, 2] ** 2
        if n2 > row_n2:
            row_n2 = n2
            wi = i
    if best_n2 > (1e-12 * scale * scale) ** 2 and best_n2 > 1e-28 * row_n2:
        return best / np.sqrt(best_n2)
    if row_n2 == 0.0:
        # m == lam I: every vector is an eigenvector
        v = np.zeros(3)
        v[0] = 1.0
        return v
    # rank-one B: null space is the plane orthogonal to the dominant row
    w = B[wi] / np.sqrt(row_n2)
    k = 0
    if abs(w[1]) < abs(w[k]):
        k = 1
    if abs(w[2]) < abs(w[k]):
        k = 2
    v = -w[k] * w
    v[k] += 1.0
    return v / np.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)


@njit(cache=True)
def _refined_vector(m, lam, scale):
    """Cross-product eigenvector plus one inverse-iteration step; returns
    (vector, residual)."""
    v = _eigvec(m, lam, scale)
    r = _residual(m, lam, v)
    shift = lam + 1e-10 * scale + 1e-300
    x, ok = _solve3(m - shift * np.eye(3), v)
    if ok:
        nx = np.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)
        if nx > 0.0 and np.isfinite(nx):
            x = x / nx
            r2 = _residual(m, lam, x)
            if r2 < r:
                # keep the sign aligned with the unrefined vector
                if x[0] * v[0] + x[1] * v[1] + x[2] * v[2] < 0.0:
                    x = -x
                v = x
                r = r2
    return v, r


@njit(cache=True)
def eig3_kernel(m):
    """Eigen decomposition of a general real 3x3 matrix.

    Closed-form cubic roots locate the best-separated (simple) eigenvalue,
    which is Newton-polished; the remaining pair comes from Householder
    deflation to a 2x2 block, which resolves a near-double pair to full
    precision where the characteristic polynomial alone cannot.

    Returns (values, vectors, residuals, max_imag) with eigenvalues sorted
    ascending (real parts for a complex pair), unit-norm column eigenvectors
    refined by one inverse-iteration step, and per-pair residuals
    ||m u - lam u||.
    """
    c2 = m[0, 0] + m[1, 1] + m[2, 2]
    c1 = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
          + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
          + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
    c0 = (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
          - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
          + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
    r0, r1, r2_, cubic_imag = _cubic_roots(c2, c1, c0)
    roots = np.array([r0, r1, r2_])
    scale = np.sqrt(np.sum(m * m))

    # pivot on the best-separated root (for a complex pair this is the
    # unique real root: the pair shares one value)
    ip = 0
    best = -1.0
    for i in range(3):
        d = 1e308
        for j in range(3):
            if j != i:
                dj = abs(roots[i] - roots[j])
                if dj < d:
                    d = dj
        if d > best:
            best = d
            ip = i
    lam3 = roots[ip]
    for _ in range(2):
        f = ((lam3 - c2) * lam3 + c1) * lam3 - c0
        df = (3.0 * lam3 - 2.0 * c2) * lam3 + c1
        if df != 0.0:
            xn = lam3 - f / df
            fn = ((xn - c2) * xn + c1) * xn - c0
            if abs(fn) < abs(f):
                lam3 = xn
    u3, res3 = _refined_vector(m, lam3, scale)

    # Householder reflection sending u3 to -sigma e3; the similarity-
    # transformed matrix is block triangular and the 2x2 block carries the
    # remaining eigenvalue pair
    sigma = 1.0 if u3[2] >= 0.0 else -1.0
    w = u3.copy()
    w[2] += sigma
    wn2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    if wn2 > 1e-30:
        H = np.eye(3) - (2.0 / wn2) * np.outer(w, w)
        T = H @ m @ H
        b00, b01 = T[0, 0], T[0, 1]
        b10, b11 = T[1, 0], T[1, 1]
    else:
        b00, b01, b10, b11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    half_tr = 0.5 * (b00 + b11)
    disc = 0.25 * (b00 - b11) ** 2 + b01 * b10
    if disc >= 0.0:
        rt = np.sqrt(disc)
        lam1 = half_tr - rt
        lam2 = half_tr + rt
        max_imag = 0.0
    else:
        lam1 = half_tr
        lam2 = half_tr
        max_imag = np.sqrt(-disc)
    vals = np.array([lam1, lam2, lam3])
    vecs = np.empty((3, 3))
    resid = np.empty(3)
    v1, res1 = _refined_vector(m, lam1, scale)
    v2, res2 = _refined_vector(m, lam2, scale)
    vecs[:, 0] = v1
    vecs[:, 1] = v2
    vecs[:, 2] = u3
    resid[0], resid[1], resid[2] = res1, res2, res3
    # sort ascending, carrying vectors and residuals along
    for i in range(2):
        for j in range(i + 1, 3):
            if vals[j] < vals[i]:
                vals[i], vals[j] = vals[j], vals[i]
                resid[i], resid[j] = resid[j], resid[i]
                for k in range(3):
                    vecs[k, i], vecs[k, j] = vecs[k, j], vecs[k, i]
    return vals, vecs, resid, max_imag


@njit(cache=True)
def _normalize_inplace(q):
    """Unit Frobenius norm with the 2x2-trace sign convention. False if zero."""
    n = np.sqrt(np.sum(q * q))
    if n == 0.0:
        return False
    q /= n
    t = q[0, 0] + q[1, 1]
    sign = 0.0
    if abs(t) > 1e-12:
        sign = 1.0 if t > 0.0 else -1.0
    else:
        for v in q.ravel():
            if abs(v) > 1e-12:
                sign = 1.0 if v > 0.0 else -1.0
                break
        if sign == 0.0:
            sign = 1.0
    if sign < 0.0:
        q *= -1.0
    return True


@njit(cache=True)
def _conic_center_radius(q):
    """Centroid and rough radius of an ellipse conic, for conditioning only."""
    det2 = q[0, 0] * q[1, 1] - q[0, 1] * q[0, 1]
    if det2 <= 0.0:
        return 0.0, 0.0, 1.0
    cx = (-q[0, 2] * q[1, 1] + q[1, 2] * q[0, 1]) / det2
    cy = (-q[1, 2] * q[0, 0] + q[0, 2] * q[0, 1]) / det2
    k = q[0, 2] * cx + q[1, 2] * cy + q[2, 2]
    r2 = -k / np.sqrt(det2)
    rad = np.sqrt(r2) if r2 > 0.0 else 1.0
    return cx, cy, rad


@njit(cache=True)
def _similarity_pullback(q, s, tx, ty):
    """Conic in coordinates x' = (x - t)/s, i.e. N^-T Q N^-1 for that map."""
    out = np.empty((3, 3))
    a, b, d = q[0, 0], q[0, 1], q[0, 2]
    c, e, f = q[1, 1], q[1, 2], q[2, 2]
    out[0, 0] = s * s * a
    out[0, 1] = s * s * b
    out[1, 1] = s * s * c
    out[0, 2] = s * (a * tx + b * ty + d)
    out[1, 2] = s * (b * tx + c * ty + e)
    out[2, 2] = (a * tx * tx + 2.0 * b * tx * ty + c * ty * ty
                 + 2.0 * d * tx + 2.0 * e * ty + f)
    out[1, 0] = out[0, 1]
    out[2, 0] = out[0, 2]
    out[2, 1] = out[1, 2]
    return out


@njit(cache=True)
def center_ratio_kernel(q1_in, q2_in, tol):
    """Projected-center/radii-ratio pipeline on two ellipse conic matrices.

    Returns (status, cx, cy, ratio, concentricity, eigenvalues[3]) where the
    eigenvalues are the sorted spectrum of Q2 Q1^-1 after conditioning.
    """
    nanvals = np.full(3, np.nan)
    q1 = q1_in.copy()
    q2 = q2_in.copy()
    if not _normalize_inplace(q1) or not _normalize_inplace(q2):
        return SINGULAR_INNER, np.nan, np.nan, np.nan, np.nan, nanvals
    diff = np.sqrt(np.sum((q1 - q2) ** 2))
    if diff <= 1e-12:
        return IDENTICAL_CONICS, np.nan, np.nan, np.nan, 0.0, nanvals

    # condition the coordinates: both centroids into a unit box
    c1x, c1y, r1 = _conic_center_radius(q1)
    c2x, c2y, r2 = _conic_center_radius(q2)
    tx = 0.5 * (c1x + c2x)
    ty = 0.5 * (c1y + c2y)
    sep = 0.5 * np.sqrt((c1x - c2x) ** 2 + (c1y - c2y) ** 2)
    s = max(max(r1, r2), sep)
    if not (s > 1e-12) or not np.isfinite(s):
        s = 1.0
    q1 = _similarity_pullback(q1, s, tx, ty)
    q2 = _similarity_pullback(q2, s, tx, ty)
    _normalize_inplace(q1)
    _normalize_inplace(q2)

    det1 = (q1[0, 0] * (q1[1, 1] * q1[2, 2] - q1[1, 2] * q1[2, 1])
            - q1[0, 1] * (q1[1, 0] * q1[2, 2] - q1[1, 2] * q1[2, 0])
            + q1[0, 2] * (q1[1, 0] * q1[2, 1] - q1[1, 1] * q1[2, 0]))
    if abs(det1) <= 1e-10:
        return SINGULAR_INNER, np.nan, np.nan, np.nan, np.nan, nanvals

    q1inv = np.empty((3, 3))
    q1inv[0, 0] = (q1[1, 1] * q1[2, 2] - q1[1, 2] * q1[2, 1]) / det1
    q1inv[0, 1] = (q1[0, 2] * q1[2, 1] - q1[0, 1] * q1[2, 2]) / det1
    q1inv[0, 2] = (q1[0, 1] * q1[1, 2] - q1[0, 2] * q1[1, 1]) / det1
    q1inv[1, 0] = q1inv[0, 1]
    q1inv[1, 1] = (q1[0, 0] * q1[2, 2] - q1[0, 2] * q1[2, 0]) / det1
    q1inv[1, 2] = (q1[0, 2] * q1[1, 0] - q1[0, 0] * q1[1, 2]) / det1
    q1inv[2, 0] = q1inv[0, 2]
    q1inv[2, 1] = q1inv[1, 2]
    q1inv[2, 2] = (q1[0, 0] * q1[1, 1] - q1[0, 1] * q1[1, 0]) / det1
    A = q2 @ q1inv

    vals, vecs, resid, max_imag = eig3_kernel(A)
    normA = np.sqrt(np.sum(A * A))
    if max_imag > 1e-6 * normA:
        return COMPLEX_EIGENVALUES, np.nan, np.nan, np.nan, np.inf, vals

    # distinguished eigenvalue: maximal minimum log-distance to the others
    logs = np.empty(3)
    for i in range(3):
        logs[i] = np.log(abs(vals[i]) + 1e-300)
    i3 = 0
    best = -1.0
    for i in range(3):
        d = 1e308
        for j in range(3):
            if j != i:
                dj = abs(logs[i] - logs[j])
                if dj < d:
                    d = dj
        if d > best:
            best = d
            i3 = i
    ia = (i3 + 1) % 3
    ib = (i3 + 2) % 3
    lam3 = vals[i3]
    lam1 = vals[ia]
    lam2 = vals[ib]
    maxabs = max(abs(vals[0]), max(abs(vals[1]), abs(vals[2])))
    conc = abs(lam1 - lam2) / maxabs if maxabs > 0.0 else np.inf

    if conc > tol:
        return NOT_CONCENTRIC, np.nan, np.nan, np.nan, conc, vals
    # symmetric in the near-double pair; equals R/r since lam1:lam2:lam3
    # is 1:1:(R/r)^2 up to scale
    ratio4 = lam3 * lam3 / (lam1 * lam2)
    if not (ratio4 > 0.0) or not np.isfinite(ratio4):
        return INVALID_RATIO, np.nan, np.nan, np.nan, conc, vals
    ratio = ratio4 ** 0.25

    u3 = vecs[:, i3]
    p0 = q1inv[0, 0] * u3[0] + q1inv[0, 1] * u3[1] + q1inv[0, 2] * u3[2]
    p1 = q1inv[1, 0] * u3[0] + q1inv[1, 1] * u3[1] + q1inv[1, 2] * u3[2]
    p2 = q1inv[2, 0] * u3[0] + q1inv[2, 1] * u3[1] + q1inv[2, 2] * u3[2]
    np_ = np.sqrt(p0 * p0 + p1 * p1 + p2 * p2)
    if np_ == 0.0 or abs(p2) / np_ <= 1e-12:
        return CENTER_AT_INFINITY, np.nan, np.nan, ratio, conc, vals
    cx = s * (p0 / p2) + tx
    cy = s * (p1 / p2) + ty
    return OK, cx, cy, ratio, conc, vals
