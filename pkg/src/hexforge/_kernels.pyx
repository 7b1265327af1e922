# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: all-pairs BFS and the random-walk domesticity scan."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def bfs_distances(const int[::1] indptr, const int[::1] indices, int n):
    out = np.full((n, n), 255, dtype=np.uint8)
    cdef unsigned char[:, ::1] D = out
    cdef int[::1] queue = np.empty(n, dtype=np.int32)
    cdef int src, head, tail, v, w, k
    cdef unsigned char dv
    for src in range(n):
        D[src, src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = D[src, v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if D[src, w] == 255:
                    D[src, w] = dv + 1
                    queue[tail] = w
                    tail += 1
    return out


cdef inline bint _has_order4(int[::1] p, int n):
    # p^4 = 1 and p^2 != 1
    cdef int i, a, b, c
    cdef bint sq_id = True
    for i in range(n):
        a = p[i]
        b = p[a]
        c = p[p[b]]
        if c != i:
            return False
        if b != i:
            sq_id = False
    return not sq_id


cdef int _chamber_domestic(int[::1] p, int[::1] lp, int n_l,
                           const unsigned char[:, ::1] opp_pt,
                           const unsigned char[:, ::1] opp_ln,
                           const int[::1] lp1, const int[::1] lp2,
                           const int[:, ::1] line_of,
                           const int[::1] ch_pt, const int[::1] ch_ln, int n_ch):
    """0: opposes some chamber; 1: exceptional domestic; 2: point/line domestic."""
    cdef int i, L
    cdef bint pts = False, lns = False
    for L in range(n_l):
        lp[L] = line_of[p[lp1[L]], p[lp2[L]]]
    for i in range(n_ch):
        if opp_pt[ch_pt[i], p[ch_pt[i]]] and opp_ln[ch_ln[i], lp[ch_ln[i]]]:
            return 0
    for i in range(p.shape[0]):
        if opp_pt[i, p[i]]:
            pts = True
            break
    for L in range(n_l):
        if opp_ln[L, lp[L]]:
            lns = True
            break
    return 1 if (pts and lns) else 2


def walk_search(const int[:, ::1] gens, const int[::1] choices, start, int burn_in,
                bint filter_order4,
                const unsigned char[:, ::1] opp_pt, const unsigned char[:, ::1] opp_ln,
                const int[::1] lp1, const int[::1] lp2, const int[:, ::1] line_of,
                const int[::1] ch_pt, const int[::1] ch_ln):
    """Walk cur <- cur * gens[choices[k]]; stop at the first exceptional domestic element.

    Returns (step or -1, point permutation at stop, number of order-4 elements seen).
    """
    cdef int n = gens.shape[1]
    cdef int n_l = lp1.shape[0]
    cdef int n_ch = ch_pt.shape[0]
    cdef int steps = choices.shape[0]
    cur_a = np.array(start, dtype=np.int32)
    tmp_a = np.empty(n, dtype=np.int32)
    lp_a = np.empty(n_l, dtype=np.int32)
    cdef int[::1] cur = cur_a
    cdef int[::1] tmp = tmp_a
    cdef int[::1] swap
    cdef int[::1] lp = lp_a
    cdef int k, i, g, verdict
    cdef long n4 = 0
    for k in range(steps):
        g = choices[k]
        for i in range(n):
            tmp[i] = cur[gens[g, i]]
        swap = cur
        cur = tmp
        tmp = swap
        if k < burn_in:
            continue
        if filter_order4:
            if not _has_order4(cur, n):
                continue
            n4 += 1
        verdict = _chamber_domestic(cur, lp, n_l, opp_pt, opp_ln, lp1, lp2, line_of, ch_pt, ch_ln, n_ch)
        if verdict == 1:
            return k, np.asarray(cur).copy(), n4
    return -1, np.asarray(cur).copy(), n4
