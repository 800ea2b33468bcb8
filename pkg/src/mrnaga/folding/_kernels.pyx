# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled DP fills. Mirrors ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    INF = 10000000


def fill_nussinov(const signed char[:] codes, const signed char[:, :] ptype, int hairpin_min):
    cdef Py_ssize_t n = codes.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out = np.zeros((n + 1, n + 1), dtype=np.int32)
    cdef int[:, :] N = out
    cdef Py_ssize_t i, j, k
    cdef int best, v
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            best = N[i + 1, j]
            for k in range(i + hairpin_min + 1, j + 1):
                if ptype[codes[i], codes[k]]:
                    v = 1
                    if k - 1 > i:
                        v += N[i + 1, k - 1]
                    if k < j:
                        v += N[k + 1, j]
                    if v > best:
                        best = v
            N[i, j] = best
    return np.ascontiguousarray(out[:n, :n])


def fill_mfe(const signed char[:] codes, const signed char[:, :] ptype, const int[:, :] stack,
             const int[:] hairpin, const int[:] bulge, const int[:] interior,
             int ninio, int ninio_max, int ml_closing, int ml_branch, int ml_unpaired,
             int max_loop, int hairpin_min):
    cdef Py_ssize_t n = codes.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] V_arr = np.full((n, n), INF, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] WM_arr = np.full((n, n), INF, dtype=np.int32)
    # WMt[j, k] == WM[k, j]: column reads in the bifurcation loops become row reads
    cdef cnp.ndarray[cnp.int32_t, ndim=2] WMt_arr = np.full((n, n), INF, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] F_arr = np.zeros(n + 1, dtype=np.int32)
    cdef int[:, ::1] V = V_arr
    cdef int[:, ::1] WM = WM_arr
    cdef int[:, ::1] WMt = WMt_arr
    # Vt[j, k] == V[k, j]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] Vt_arr = np.full((n, n), INF, dtype=np.int32)
    cdef int[:, ::1] Vt = Vt_arr
    cdef int[::1] F = F_arr

    cdef int L = max_loop + 1
    cdef cnp.ndarray[cnp.int32_t, ndim=2] il_arr = np.full((L, L), INF, dtype=np.int32)
    cdef int[:, ::1] il = il_arr
    cdef int a, b, d
    for a in range(1, L):
        for b in range(1, L - a):
            d = ninio * (a - b if a > b else b - a)
            il[a, b] = interior[a + b] + (d if d < ninio_max else ninio_max)

    # ilr[l1, t] == il[l1, L - 1 - t], so the interior scan runs forward in memory
    cdef cnp.ndarray[cnp.int32_t, ndim=2] ilr_arr = np.ascontiguousarray(il_arr[:, ::-1])
    cdef int[:, ::1] ilr = ilr_arr

    cdef signed char pt[16]
    for a in range(4):
        for b in range(4):
            pt[a * 4 + b] = ptype[a, b]

    cdef Py_ssize_t i, j, p, q, k, pmax, qmin
    cdef int t1, t2, l1, l2, best, e, vq, ci4, cp4
    cdef int mlc = ml_closing + ml_branch
    cdef int *Vrow
    cdef int *ilrow
    cdef int *wrow
    cdef int *wcol
    cdef Py_ssize_t off
    cdef cnp.ndarray[cnp.int32_t, ndim=1] pre_arr = np.zeros(n + 1, dtype=np.int32)
    cdef int[::1] pre = pre_arr

    for i in range(n - 1, -1, -1):
        ci4 = codes[i] * 4
        for j in range(i + hairpin_min + 1, n):
            t1 = pt[ci4 + codes[j]]
            if t1 == 0:
                continue
            best = hairpin[j - i - 1]
            # p == i + 1: stack or bulge on the 3' side
            p = i + 1
            Vrow = &V[p, 0]
            cp4 = codes[p] * 4
            qmin = j - 1 - max_loop
            if qmin < p + hairpin_min + 1:
                qmin = p + hairpin_min + 1
            q = j - 1
            while q >= qmin:
                vq = Vrow[q]
                if vq < INF:
                    t2 = pt[cp4 + codes[q]]
                    l2 = j - q - 1
                    if l2 == 0:
                        e = stack[t1, t2]
                    else:
                        e = bulge[l2]
                        if l2 == 1:
                            e = e + stack[t1, t2]
                    e = e + vq
                    if e < best:
                        best = e
                q -= 1
            pmax = i + max_loop + 1
            if j - hairpin_min - 2 < pmax:
                pmax = j - hairpin_min - 2
            for p in range(i + 2, pmax + 1):
                l1 = p - i - 1
                Vrow = &V[p, 0]
                cp4 = codes[p] * 4
                # q == j - 1: bulge on the 5' side
                vq = Vrow[j - 1]
                if vq < INF and j - 1 > p + hairpin_min:
                    t2 = pt[cp4 + codes[j - 1]]
                    e = bulge[l1] + vq
                    if l1 == 1:
                        e = e + stack[t1, t2]
                    if e < best:
                        best = e
                # dense min over q; ilrow[q + off] == il[l1, j - q - 1]
                ilrow = &ilr[l1, 0]
                off = L - j
                qmin = j - 1 - (max_loop - l1)
                if qmin < p + hairpin_min + 1:
                    qmin = p + hairpin_min + 1
                for q in range(qmin, j - 1):
                    e = Vrow[q] + ilrow[q + off]
                    if e < best:
                        best = e
            wrow = &WM[i + 1, 0]
            wcol = &WMt[j - 1, 0]
            for k in range(i + 2, j):
                e = wrow[k - 1] + wcol[k] + mlc
                if e < best:
                    best = e
            if best >= INF:
                best = INF
            V[i, j] = best
            Vt[j, i] = best
        wrow = &WM[i, 0]
        # pre[k] = ml_branch + min(unpaired run i..k-1, WM(i, k-1)); filled as j advances
        pre[i] = ml_branch
        pre[i + 1] = ml_branch + ml_unpaired
        for j in range(i + 1, n):
            best = wrow[j - 1] + ml_unpaired
            Vrow = &Vt[j, 0]
            # last branch starts at k; pre[k] covers everything 5' of it
            for k in range(i, j - hairpin_min):
                e = pre[k] + Vrow[k]
                if e < best:
                    best = e
            if best >= INF:
                best = INF
            wrow[j] = best
            WMt[j, i] = best
            if j + 1 < n:
                e = ml_unpaired * (j + 1 - i)
                pre[j + 1] = (best if best < e else e) + ml_branch

    for i in range(n - 1, -1, -1):
        best = F[i + 1]
        Vrow = &V[i, 0]
        for k in range(i + hairpin_min + 1, n):
            e = Vrow[k] + F[k + 1]
            if e < best:
                best = e
        F[i] = best
    return V_arr, WM_arr, F_arr
