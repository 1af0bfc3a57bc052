"""Pure-Python versions of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Masks are Python ints, so this backend has no limit on the number of edges.
"""

REDUCIBLE = 0
COLLAPSIBLE = 1
BIREDUCIBLE = 2


def free_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == (x ^ 1):
            out.pop()
        else:
            out.append(x)
    return out


def scan_subsets(cell_masks, once_masks, forbidden, mode, cap):
    """Scan nonempty cell subsets in increasing bitmask order.

    Returns ``(first_failing_subset, explored, finished)``; the failing subset
    is -1 when none was found. ``finished`` is False when ``cap`` subsets were
    explored without covering all of them.
    """
    ncells = len(cell_masks)
    allowed = ~forbidden
    total = (1 << ncells) - 1
    explored = 0
    for subset in range(1, total + 1):
        if explored >= cap:
            return -1, explored, False
        explored += 1
        ones = 0
        twos = 0
        s = subset
        while s:
            low = s & -s
            c = low.bit_length() - 1
            m = cell_masks[c]
            twos |= ones & m
            ones |= m
            s ^= low
        unique = ones & ~twos & allowed
        if mode == REDUCIBLE:
            ok = unique != 0
        elif mode == COLLAPSIBLE:
            ok = False
            s = subset
            while s:
                low = s & -s
                c = low.bit_length() - 1
                if once_masks[c] & unique:
                    ok = True
                    break
                s ^= low
        else:
            if subset & (subset - 1) == 0:
                ok = True
            else:
                owners = 0
                s = subset
                while s:
                    low = s & -s
                    c = low.bit_length() - 1
                    if cell_masks[c] & unique:
                        owners += 1
                        if owners >= 2:
                            break
                    s ^= low
                ok = owners >= 2
        if not ok:
            return subset, explored, True
    return -1, explored, True


def lift_cycles(out_target, out_edge, nlab, nverts, labels):
    """Closed lifts of a labelled cycle into an immersed graph.

    ``out_target[v * nlab + l]`` is the endpoint of the edge leaving ``v`` with
    label ``l`` (or -1) and ``out_edge`` the matching half-edge. Nodes of the
    pullback are ``v * n + i`` for positions ``i`` on the cycle. Returns a list
    of ``(start_node, half_edges)`` for every closed component, each rotated to
    start at its smallest node, in increasing order of start node.
    """
    n = len(labels)
    total = nverts * n
    state = [0] * total
    cycles = []
    for start in range(total):
        if state[start]:
            continue
        path = []
        node = start
        while True:
            if node < 0 or state[node] == 2:
                break
            if state[node] == 1:
                k = path.index(node)
                cyc = path[k:]
                j = cyc.index(min(cyc))
                cyc = cyc[j:] + cyc[:j]
                edges = []
                for nd in cyc:
                    v, i = divmod(nd, n)
                    edges.append(out_edge[v * nlab + labels[i]])
                cycles.append((cyc[0], edges))
                break
            state[node] = 1
            path.append(node)
            v, i = divmod(node, n)
            t = out_target[v * nlab + labels[i]]
            node = -1 if t < 0 else t * n + (i + 1) % n
        for nd in path:
            state[nd] = 2
    cycles.sort(key=lambda c: c[0])
    return cycles
