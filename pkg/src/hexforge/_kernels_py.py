"""Pure numpy/scipy versions of the compiled kernels (same signatures, same results)."""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


def bfs_distances(indptr, indices, n):
    adj = csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(n, n))
    out = np.empty((n, n), dtype=np.uint8)
    chunk = 512
    for lo in range(0, n, chunk):
        d = shortest_path(adj, method="D", unweighted=True, indices=np.arange(lo, min(n, lo + chunk)))
        d[np.isinf(d)] = 255
        out[lo:lo + chunk] = d.astype(np.uint8)
    return out


def _verdict(p, opp_pt, opp_ln, lp1, lp2, line_of, ch_pt, ch_ln):
    lp = line_of[p[lp1], p[lp2]]
    if np.any(opp_pt[ch_pt, p[ch_pt]] & opp_ln[ch_ln, lp[ch_ln]]):
        return 0
    pts = bool(opp_pt[np.arange(len(p)), p].any())
    lns = bool(opp_ln[np.arange(len(lp)), lp].any())
    return 1 if (pts and lns) else 2


def walk_search(gens, choices, start, burn_in, filter_order4,
                opp_pt, opp_ln, lp1, lp2, line_of, ch_pt, ch_ln):
    gens = np.asarray(gens)
    cur = np.array(start, dtype=np.int32)
    ident = np.arange(gens.shape[1], dtype=np.int32)
    opp_pt = np.asarray(opp_pt, dtype=bool)
    opp_ln = np.asarray(opp_ln, dtype=bool)
    n4 = 0
    for k, g in enumerate(np.asarray(choices)):
        cur = cur[gens[g]]
        if k < burn_in:
            continue
        if filter_order4:
            sq = cur[cur]
            if np.array_equal(sq, ident) or not np.array_equal(sq[sq], ident):
                continue
            n4 += 1
        if _verdict(cur, opp_pt, opp_ln, lp1, lp2, line_of, ch_pt, ch_ln) == 1:
            return k, cur.copy(), n4
    return -1, cur.copy(), n4
