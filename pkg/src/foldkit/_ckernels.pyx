# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the contract).

Masks must fit in 64 bits and at most 62 cells are supported; the dispatcher
in ``kernels`` falls back to the pure-Python backend otherwise.
"""
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free


def free_reduce(letters):
    cdef list out = []
    cdef Py_ssize_t top = 0
    cdef long x
    for item in letters:
        x = item
        if top and <long>out[top - 1] == (x ^ 1):
            out.pop()
            top -= 1
        else:
            out.append(x)
            top += 1
    return out


cdef inline int _lowbit(uint64_t s):
    cdef int c = 0
    while not (s & 1):
        s >>= 1
        c += 1
    return c


def scan_subsets(cell_masks, once_masks, forbidden, int mode, cap):
    cdef int ncells = len(cell_masks)
    if ncells > 62:
        raise OverflowError("too many cells for the compiled kernel")
    cdef uint64_t *masks = <uint64_t *> malloc(max(ncells, 1) * sizeof(uint64_t))
    cdef uint64_t *once = <uint64_t *> malloc(max(ncells, 1) * sizeof(uint64_t))
    cdef uint64_t allowed = ~(<uint64_t> forbidden)
    cdef uint64_t total = (<uint64_t> 1 << ncells) - 1
    cdef uint64_t ccap = cap if cap < total + 1 else total + 1
    cdef uint64_t subset, s, low, ones, twos, unique, m
    cdef uint64_t explored = 0
    cdef int c, owners, ok
    try:
        for c in range(ncells):
            masks[c] = cell_masks[c]
            once[c] = once_masks[c]
        subset = 1
        while subset <= total:
            if explored >= ccap:
                return -1, explored, False
            explored += 1
            ones = 0
            twos = 0
            s = subset
            while s:
                low = s & (~s + 1)
                c = _lowbit(low)
                m = masks[c]
                twos |= ones & m
                ones |= m
                s ^= low
            unique = ones & ~twos & allowed
            if mode == 0:
                ok = unique != 0
            elif mode == 1:
                ok = 0
                s = subset
                while s:
                    low = s & (~s + 1)
                    c = _lowbit(low)
                    if once[c] & unique:
                        ok = 1
                        break
                    s ^= low
            else:
                if subset & (subset - 1) == 0:
                    ok = 1
                else:
                    owners = 0
                    s = subset
                    while s:
                        low = s & (~s + 1)
                        c = _lowbit(low)
                        if masks[c] & unique:
                            owners += 1
                            if owners >= 2:
                                break
                        s ^= low
                    ok = owners >= 2
            if not ok:
                return int(subset), explored, True
            subset += 1
        return -1, explored, True
    finally:
        free(masks)
        free(once)


def lift_cycles(out_target, out_edge, int nlab, int nverts, labels):
    cdef int n = len(labels)
    cdef int total = nverts * n
    cdef int i, v, t, node, start, k, j
    cdef int *lab = <int *> malloc(max(n, 1) * sizeof(int))
    cdef int *tgt = <int *> malloc(max(nverts * nlab, 1) * sizeof(int))
    cdef int *state = <int *> malloc(max(total, 1) * sizeof(int))
    cdef int *path = <int *> malloc(max(total, 1) * sizeof(int))
    cdef int plen, best
    cdef list cycles = []
    try:
        for i in range(n):
            lab[i] = labels[i]
        for i in range(nverts * nlab):
            tgt[i] = out_target[i]
        for i in range(total):
            state[i] = 0
        for start in range(total):
            if state[start]:
                continue
            plen = 0
            node = start
            while True:
                if node < 0 or state[node] == 2:
                    break
                if state[node] == 1:
                    k = 0
                    while path[k] != node:
                        k += 1
                    best = k
                    for j in range(k, plen):
                        if path[j] < path[best]:
                            best = j
                    cyc = [path[j] for j in range(best, plen)] + [path[j] for j in range(k, best)]
                    edges = []
                    for nd in cyc:
                        v = nd // n
                        i = nd % n
                        edges.append(out_edge[v * nlab + lab[i]])
                    cycles.append((cyc[0], edges))
                    break
                state[node] = 1
                path[plen] = node
                plen += 1
                v = node // n
                i = node % n
                t = tgt[v * nlab + lab[i]]
                node = -1 if t < 0 else t * n + (i + 1) % n
            for j in range(plen):
                state[path[j]] = 2
    finally:
        free(lab)
        free(tgt)
        free(state)
        free(path)
    cycles.sort(key=lambda c: c[0])
    return cycles
