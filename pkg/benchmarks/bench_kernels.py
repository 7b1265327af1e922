"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--steps 24000]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hexforge import kernels
from hexforge.geometry import Hexagon
from hexforge.groupaction import GroupAction, default_generators
from hexforge.hexsystem import make_system


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def walk_args(H, ga, steps, seed=1):
    gens = default_generators(ga)
    gp = np.ascontiguousarray(np.stack([g.point_perm for g in gens]).astype(np.int32))
    choices = np.random.default_rng(seed).integers(0, len(gens), size=steps + 50).astype(np.int32)
    return (gp, choices, np.arange(H.n_points, dtype=np.int32), 50, True,
            H.opp_points.view(np.uint8), H.opp_lines.view(np.uint8),
            ga._lp1.astype(np.int32), ga._lp2.astype(np.int32), H.line_of,
            H.chamber_points.astype(np.int32), H.chamber_lines.astype(np.int32))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=24_000, help="walk steps, at most 24000")
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    rows = []
    for label, sysargs in (("H1/GF(4)", ("OneF", 2, 2)), ("H2-3D4/GF(2)", ("ThreeF", 2, 1))):
        H = Hexagon(make_system(*sysargs))
        indptr, indices = H.csr()
        for name, mod in (("cython", kernels.compiled), ("python", kernels.fallback)):
            t = best_of(lambda: mod.bfs_distances(indptr, indices, H.n_vertices), args.repeat)
            rows.append(("bfs_distances", label, name, t))

    H = Hexagon(make_system("ThreeF", 2))
    ga = GroupAction(H)
    # seed 1 first hits at walk index 24680, so a shorter budget times a full miss on both backends
    wa = walk_args(H, ga, min(args.steps, 24_000), seed=1)
    for name, mod in (("cython", kernels.compiled), ("python", kernels.fallback)):
        t = best_of(lambda: mod.walk_search(*wa), args.repeat)
        rows.append((f"walk_search {len(wa[1])} steps", "H2-3D4/GF(2)", name, t))

    print(f"{'kernel':<28}{'system':<16}{'backend':<10}{'seconds':>10}")
    for k, s, b, t in rows:
        print(f"{k:<28}{s:<16}{b:<10}{t:>10.4f}")
    for k, s in dict.fromkeys((r[0], r[1]) for r in rows):
        c = next(r[3] for r in rows if r[:3] == (k, s, "cython"))
        p = next(r[3] for r in rows if r[:3] == (k, s, "python"))
        print(f"speed-up {k} on {s}: {p / c:.1f}x")


if __name__ == "__main__":
    main()
