# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled filter hot kernels, layout-compatible with the numpy backend.

Same (K, H, W) weight-volume contract as ``_numpy``; per-destination
accumulation order matches the numpy per-plane order, so the two backends
agree to within FMA/vectorization rounding. Inner loops run over raw
pointers so the compiler can vectorize them (including expf via libmvec).
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport expf

NAME = "cython"


def color_weights(const float[:, :, ::1] guide, int r, float sigma_c):
    cdef Py_ssize_t h = guide.shape[0], w = guide.shape[1]
    cdef int side = 2 * r + 1
    out = np.zeros((side * side, h, w), dtype=np.float32)
    cdef float[:, :, ::1] vol = out
    cdef const float* gp = &guide[0, 0, 0]
    cdef float* vp = &vol[0, 0, 0]
    cdef float inv = <float> (1.0 / (2.0 * sigma_c * sigma_c))
    cdef Py_ssize_t a, b, k, y, x, y0, y1, x0, x1
    cdef const float* srow
    cdef const float* nrow
    cdef float* wrow
    cdef float dr, dg, db
    with nogil:
        for a in range(-r, r + 1):
            for b in range(-r, r + 1):
                k = side * (r + a) + (r + b)
                y0 = -b if b < 0 else 0
                y1 = h - b if b > 0 else h
                x0 = -a if a < 0 else 0
                x1 = w - a if a > 0 else w
                for y in prange(y0, y1, schedule="static"):
                    srow = gp + y * w * 3
                    nrow = gp + ((y + b) * w + a) * 3
                    wrow = vp + (k * h + y) * w
                    for x in range(x0, x1):
                        dr = srow[3 * x] - nrow[3 * x]
                        dg = srow[3 * x + 1] - nrow[3 * x + 1]
                        db = srow[3 * x + 2] - nrow[3 * x + 2]
                        wrow[x] = -(dr * dr + dg * dg + db * db) * inv
                    for x in range(x0, x1):
                        wrow[x] = expf(wrow[x])
    return out


def apply_spatial(const float[:, :, ::1] vol, int r, float sigma_p):
    cdef Py_ssize_t kk = vol.shape[0], h = vol.shape[1], w = vol.shape[2]
    cdef int side = 2 * r + 1
    out = np.empty((kk, h, w), dtype=np.float32)
    cdef float[:, :, ::1] res = out
    sp_arr = np.empty(kk, dtype=np.float32)
    cdef float[::1] sp = sp_arr
    cdef const float* vp = &vol[0, 0, 0]
    cdef float* rp = &res[0, 0, 0]
    cdef float inv = <float> (1.0 / (2.0 * sigma_p * sigma_p))
    cdef Py_ssize_t a, b, k, y, x, plane
    cdef float mult
    cdef const float* vrow
    cdef float* rrow
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            sp[side * (r + a) + (r + b)] = expf(-(<float> (a * a + b * b)) * inv)
    with nogil:
        for k in range(kk):
            mult = sp[k]
            for y in prange(h, schedule="static"):
                vrow = vp + (k * h + y) * w
                rrow = rp + (k * h + y) * w
                for x in range(w):
                    rrow[x] = vrow[x] * mult
    return out


def scatter(
    const float[:, ::1] depth,
    const unsigned char[:, ::1] mask,
    const float[:, :, ::1] vol,
    int r,
):
    cdef Py_ssize_t h = depth.shape[0], w = depth.shape[1]
    cdef int side = 2 * r + 1
    dhat_arr = np.zeros((h, w), dtype=np.float32)
    wacc_arr = np.zeros((h, w), dtype=np.float32)
    dm_arr = np.where(np.asarray(mask) != 0, np.asarray(depth), np.float32(0.0))
    bm_arr = (np.asarray(mask) != 0).astype(np.float32)
    cdef float[:, ::1] dhat = dhat_arr
    cdef float[:, ::1] wacc = wacc_arr
    cdef const float[:, ::1] dm = dm_arr
    cdef const float[:, ::1] bm = bm_arr
    cdef const float* vp = &vol[0, 0, 0]
    cdef const float* dp = &dm[0, 0]
    cdef const float* bp = &bm[0, 0]
    cdef float* hp = &dhat[0, 0]
    cdef float* ap = &wacc[0, 0]
    cdef Py_ssize_t a, b, k, y, x, y0, y1, x0, x1
    cdef const float* wrow
    cdef const float* drow
    cdef const float* brow
    cdef float* hrow
    cdef float* arow
    cdef float wv
    with nogil:
        for a in range(-r, r + 1):
            for b in range(-r, r + 1):
                k = side * (r + a) + (r + b)
                y0 = -b if b < 0 else 0
                y1 = h - b if b > 0 else h
                x0 = -a if a < 0 else 0
                x1 = w - a if a > 0 else w
                # Rows write disjoint destinations within one plane, so the
                # parallel loop is deterministic for any thread count.
                for y in prange(y0, y1, schedule="static"):
                    wrow = vp + (k * h + y) * w
                    drow = dp + y * w
                    brow = bp + y * w
                    hrow = hp + (y + b) * w + a
                    arow = ap + (y + b) * w + a
                    for x in range(x0, x1):
                        wv = wrow[x]
                        hrow[x] += drow[x] * wv
                        arow[x] += brow[x] * wv
    return dhat_arr, wacc_arr
