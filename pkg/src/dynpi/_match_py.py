"""Pure-Python backtracking matcher; the reference for the compiled kernel.

Both backends share one calling convention (see ``dynpi._kernel``):

* ``h_adj``/``g_adj`` are row-major ``n*n`` arrays of edge-label bitmasks,
* ``order`` is the pattern-node visiting order,
* ``cand``/``cand_off`` hold, per pattern node, its candidate target nodes
  already sorted by preference (CSR layout),
* ``strict`` selects the label bits that must agree exactly between a pattern
  pair and its image (this is what makes the embedding induced).  The two
  multiplicity bits, when left out of ``strict``, are matched loosely: a
  pattern ``one`` accepts ``one`` or ``many``, a pattern ``many`` needs ``many``.
"""

ONE_BIT = 1 << 30
MANY_BIT = 1 << 31


def _pair_ok(hv, gv, strict):
    if (hv ^ gv) & strict:
        return False
    if hv & ONE_BIT and not strict & ONE_BIT and not gv & (ONE_BIT | MANY_BIT):
        return False
    if hv & MANY_BIT and not strict & MANY_BIT and not gv & MANY_BIT:
        return False
    return True


def search(n_h, n_g, h_adj, g_adj, order, cand, cand_off, strict):
    """Return a list ``assign`` (pattern node -> target node) or ``None``."""
    if n_h == 0:
        return []
    assign = [-1] * n_h
    used = [False] * n_g
    pos = [0] * n_h
    depth = 0
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
                used[a] = True
                pos[depth] = k - cand_off[i]
                placed = True
                break
        if placed:
            depth += 1
            if depth == n_h:
                return assign
            pos[depth] = 0
            continue
        pos[depth] = 0
        depth -= 1
        if depth < 0:
            return None
        j = order[depth]
        used[assign[j]] = False
        assign[j] = -1
