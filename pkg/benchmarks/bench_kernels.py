"""Compare the compiled and pure-Python kernels on synthetic workloads.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Each workload is first checked for identical output across backends, then
timed with ``timeit`` (best of ``--repeat``).
"""
from __future__ import annotations

import argparse
import random
import timeit

from foldkit import kernels


def scan_workload(rng: random.Random, ncells: int = 16, nshared: int = 24):
    """Every cell owns a private edge crossed once, so no subset fails and the scan is exhaustive."""
    cells, once = [], []
    for i in range(ncells):
        private = 1 << (nshared + i)
        shared = rng.getrandbits(nshared)
        cells.append(shared | private)
        once.append((shared & rng.getrandbits(nshared)) | private)
    return cells, once


def cover_workload(rng: random.Random, nverts: int = 2000, ngens: int = 2, length: int = 12):
    """A random ``nverts``-sheeted cover of the rose and a random cyclic word."""
    nlab = 2 * ngens
    out_target = [-1] * (nverts * nlab)
    out_edge = [-1] * (nverts * nlab)
    h = 0
    for g in range(ngens):
        perm = list(range(nverts))
        rng.shuffle(perm)
        for v, w in enumerate(perm):
            out_target[v * nlab + 2 * g], out_edge[v * nlab + 2 * g] = w, h
            out_target[w * nlab + 2 * g + 1], out_edge[w * nlab + 2 * g + 1] = v, h + 1
            h += 2
    word = [rng.randrange(nlab) for _ in range(length)]
    return out_target, out_edge, nlab, nverts, word


def normalize(result):
    """Backends may return lists, tuples or typed memoryviews; compare as nested tuples."""
    if isinstance(result, (str, bytes, int, bool)) or result is None:
        return result
    try:
        return tuple(normalize(x) for x in result)
    except TypeError:
        return result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    cells, once = scan_workload(rng)
    cover = cover_workload(rng)
    letters = [rng.randrange(6) for _ in range(20_000)]
    workloads = {
        "scan_subsets/reducible": lambda b: b.scan_subsets(cells, once, 0, kernels.REDUCIBLE, 1 << 30),
        "scan_subsets/bireducible": lambda b: b.scan_subsets(cells, once, 0, kernels.BIREDUCIBLE, 1 << 30),
        "lift_cycles": lambda b: b.lift_cycles(*cover),
        "free_reduce": lambda b: b.free_reduce(letters),
    }

    found = kernels.backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(sorted(found))}")
    if "cython" not in found:
        print("compiled extension not built; only the Python timings are shown")
    print(f"{'workload':28s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in workloads.items():
        outputs = {normalize(fn(b)) for b in found.values()}
        if len(outputs) != 1:
            raise SystemExit(f"{name}: backends disagree")
        times = {k: min(timeit.repeat(lambda b=b: fn(b), number=1, repeat=args.repeat)) for k, b in found.items()}
        cy_t = times.get("cython")
        cy_s = f"{cy_t * 1e3:9.2f}ms" if cy_t is not None else f"{'-':>10s}"
        speed = f"{times['python'] / cy_t:7.1f}x" if cy_t else f"{'-':>8s}"
        print(f"{name:28s} {times['python'] * 1e3:9.2f}ms {cy_s} {speed}")


if __name__ == "__main__":
    main()
