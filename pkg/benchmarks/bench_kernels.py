"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel with the best wall time of each backend and the
speedup.  Inputs are sized like a unit-square run at h = 1/64.
"""

import argparse
import timeit

import numpy as np

from maxshape import _kernels


def workloads(rng):
    pts = np.ascontiguousarray(rng.uniform(0, 1, (67 * 67, 2)))
    segs = np.ascontiguousarray(rng.uniform(0, 1, (60, 4)))
    poly = np.ascontiguousarray(np.column_stack([0.5 + 0.45 * np.cos(np.linspace(0, 2 * np.pi, 257)[:-1]),
                                                 0.5 + 0.45 * np.sin(np.linspace(0, 2 * np.pi, 257)[:-1])]))
    centers = np.ascontiguousarray(pts[:60])
    radii = np.geomspace(0.5, 0.125, 24)
    u = np.zeros((67, 67))
    u[2:-2, 2:-2] = rng.uniform(0, 1, (63, 63))
    return {
        "segment_distances": lambda k: k.segment_distances(pts, segs),
        "nearest_segment": lambda k: k.nearest_segment(pts, segs),
        "points_in_polygon": lambda k: k.points_in_polygon(pts, poly),
        "disk_lengths": lambda k: k.disk_lengths(segs, centers, radii),
        "plap_energy_grad": lambda k: k.plap_energy_grad(u, 1.5, 1e-10),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = _kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':<20}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    for kernel, fn in workloads(np.random.default_rng(0)).items():
        times = {}
        for name in names:
            mod = backends[name]
            number = 3
            times[name] = 1e3 * min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{kernel:<20}" + "".join(f"{times[n]:>16.3f}" for n in names) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
