import random

import pytest

from foldkit import _pykernels, kernels


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.backends()


def test_free_reduce(backend):
    assert list(backend.free_reduce([0, 1, 2, 2, 3, 0])) == [2, 0]
    assert list(backend.free_reduce([])) == []


def _random_masks(rng, ncells, nedges):
    cells, once = [], []
    for _ in range(ncells):
        m = rng.getrandbits(nedges) or 1
        cells.append(m)
        once.append(m & rng.getrandbits(nedges))
    return cells, once


@pytest.mark.parametrize("mode", [_pykernels.REDUCIBLE, _pykernels.COLLAPSIBLE, _pykernels.BIREDUCIBLE])
def test_scan_agrees_with_python(backend, mode):
    rng = random.Random(7)
    for _ in range(200):
        cells, once = _random_masks(rng, rng.randint(1, 6), rng.randint(1, 8))
        forb = rng.getrandbits(8) if rng.random() < 0.3 else 0
        expect = _pykernels.scan_subsets(cells, once, forb, mode, 1 << 20)
        assert tuple(backend.scan_subsets(cells, once, forb, mode, 1 << 20)) == tuple(expect)


def test_scan_cap(backend):
    cells = [0b11, 0b11, 0b11]
    res = backend.scan_subsets(cells, [0, 0, 0], 0, _pykernels.REDUCIBLE, 2)
    assert res[2] is False or res[2] == 0


def test_lift_cycles_double_cover(backend):
    # 2-cycle covering the a-loop; the cell a^2 lifts to two closed cycles
    out_target = [1, 1, 0, 0]
    out_edge = [0, 3, 2, 1]
    res = backend.lift_cycles(out_target, out_edge, 2, 2, [0, 0])
    assert [(s, list(h)) for s, h in res] == [(0, [0, 2]), (1, [0, 2])]
    assert [(s, list(h)) for s, h in res] == [(s, list(h)) for s, h in _pykernels.lift_cycles(out_target, out_edge, 2, 2, [0, 0])]
