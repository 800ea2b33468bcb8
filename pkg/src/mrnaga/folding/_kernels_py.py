"""Pure-Python DP fills. Same signatures and results as the compiled ``_kernels``."""
import numpy as np

INF = 10_000_000


def fill_nussinov(codes, ptype, hairpin_min):
    n = len(codes)
    c = [int(x) for x in codes]
    ok = [[bool(ptype[a][b]) for b in range(4)] for a in range(4)]
    N = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        Ni1 = N[i + 1]
        row = N[i]
        oki = ok[c[i]]
        for j in range(i + 1, n):
            best = Ni1[j]
            for k in range(i + hairpin_min + 1, j + 1):
                if oki[c[k]]:
                    v = 1 + (Ni1[k - 1] if k - 1 > i else 0) + (N[k + 1][j] if k < j else 0)
                    if v > best:
                        best = v
            row[j] = best
    out = np.zeros((n, n), dtype=np.int32)
    for i in range(n):
        out[i, :] = N[i][:n]
    return out


def fill_mfe(codes, ptype, stack, hairpin, bulge, interior, ninio, ninio_max,
             ml_closing, ml_branch, ml_unpaired, max_loop, hairpin_min):
    n = len(codes)
    c = [int(x) for x in codes]
    pt = [[int(ptype[a][b]) for b in range(4)] for a in range(4)]
    st = [[int(x) for x in row] for row in stack]
    hp = [int(x) for x in hairpin]
    bl = [int(x) for x in bulge]
    il = [int(x) for x in interior]
    V = [[INF] * n for _ in range(n)]
    WM = [[INF] * n for _ in range(n)]
    F = [0] * (n + 1)

    for i in range(n - 1, -1, -1):
        Vi = V[i]
        WMi = WM[i]
        for j in range(i + hairpin_min + 1, n):
            t1 = pt[c[i]][c[j]]
            if not t1:
                continue
            best = hp[j - i - 1]
            pmax = min(i + max_loop + 1, j - hairpin_min - 2)
            for p in range(i + 1, pmax + 1):
                l1 = p - i - 1
                Vp = V[p]
                cp = c[p]
                for q in range(j - 1, p + hairpin_min, -1):
                    l2 = j - q - 1
                    if l1 + l2 > max_loop:
                        break
                    t2 = pt[cp][c[q]]
                    if not t2 or Vp[q] >= INF:
                        continue
                    if l1 == 0 and l2 == 0:
                        e = st[t1][t2]
                    elif l1 == 0 or l2 == 0:
                        e = bl[l1 + l2]
                        if l1 + l2 == 1:
                            e += st[t1][t2]
                    else:
                        e = il[l1 + l2] + min(ninio_max, ninio * abs(l1 - l2))
                    e += Vp[q]
                    if e < best:
                        best = e
            WMi1 = WM[i + 1]
            for k in range(i + 2, j):
                e = WMi1[k - 1] + WM[k][j - 1]
                if e + ml_closing + ml_branch < best:
                    best = e + ml_closing + ml_branch
            Vi[j] = best if best < INF else INF
        # WM(i, j): one or more branches in [i, j]; the last branch closes at k..j
        # or j is unpaired
        for j in range(i + 1, n):
            best = WMi[j - 1] + ml_unpaired
            for k in range(i, j - hairpin_min):
                v = V[k][j]
                if v >= INF:
                    continue
                pre = ml_unpaired * (k - i)
                if k > i and WMi[k - 1] < pre:
                    pre = WMi[k - 1]
                e = pre + v + ml_branch
                if e < best:
                    best = e
            WMi[j] = best if best < INF else INF

    for i in range(n - 1, -1, -1):
        best = F[i + 1]
        Vi = V[i]
        for k in range(i + hairpin_min + 1, n):
            e = Vi[k] + F[k + 1]
            if e < best:
                best = e
        F[i] = best
    return (np.array(V, dtype=np.int32).reshape(n, n),
            np.array(WM, dtype=np.int32).reshape(n, n),
            np.array(F, dtype=np.int32))
