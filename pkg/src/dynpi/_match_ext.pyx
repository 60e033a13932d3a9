# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``dynpi._match_py.search`` (same contract, same results)."""

from libc.stdlib cimport malloc, free

cdef unsigned int ONE_BIT = 1u << 30
cdef unsigned int MANY_BIT = 1u << 31


cdef inline bint _pair_ok(unsigned int hv, unsigned int gv, unsigned int strict) nogil:
    if (hv ^ gv) & strict:
        return False
    if (hv & ONE_BIT) and not (strict & ONE_BIT) and not (gv & (ONE_BIT | MANY_BIT)):
        return False
    if (hv & MANY_BIT) and not (strict & MANY_BIT) and not (gv & MANY_BIT):
        return False
    return True


def search(int n_h, int n_g, const unsigned int[:] h_adj, const unsigned int[:] g_adj,
           const int[:] order, const int[:] cand, const int[:] cand_off,
           unsigned int strict):
    if n_h == 0:
        return []
    cdef int *assign = <int *> malloc(n_h * sizeof(int))
    cdef int *pos = <int *> malloc(n_h * sizeof(int))
    cdef char *used = <char *> malloc((n_g if n_g > 0 else 1) * sizeof(char))
    cdef int depth = 0, i, j, k, end, a, b, d
    cdef bint ok, placed, found = False
    try:
        for i in range(n_h):
            assign[i] = -1
            pos[i] = 0
        for i in range(n_g):
            used[i] = 0
        with nogil:
            while True:
                i = order[depth]
                k = cand_off[i] + pos[depth]
                end = cand_off[i + 1]
                placed = False
                while k < end:
                    a = cand[k]
                    k += 1
                    if used[a]:
                        continue
                    ok = True
                    for d in range(depth):
                        j = order[d]
                        b = assign[j]
                        if not _pair_ok(h_adj[i * n_h + j], g_adj[a * n_g + b], strict):
                            ok = False
                            break
                        if not _pair_ok(h_adj[j * n_h + i], g_adj[b * n_g + a], strict):
                            ok = False
                            break
                    if ok:
                        assign[i] = a
                        used[a] = 1
                        pos[depth] = k - cand_off[i]
                        placed = True
                        break
                if placed:
                    depth += 1
                    if depth == n_h:
                        found = True
                        break
                    pos[depth] = 0
                    continue
                pos[depth] = 0
                depth -= 1
                if depth < 0:
                    break
                j = order[depth]
                used[assign[j]] = 0
                assign[j] = -1
        if not found:
            return None
        return [assign[i] for i in range(n_h)]
    finally:
        free(assign)
        free(pos)
        free(used)
