"""Compare the compiled and numpy kernel backends on internal-force assembly.

Usage: python benchmarks/bench_kernels.py [--repeat 20]
"""

import argparse
import time

import numpy as np

from peristab import _backend, mesh
from peristab.material import Body, MaterialSpec

CASES = [
    ("1D  n=2000 N=3", 1, [1.0], 1 / 2000, 3),
    ("2D  60x60 N=3", 2, [1.0, 1.0], 1 / 60, 3),
    ("3D  24x6x6 N=3", 3, [4.0, 1.0, 1.0], 1 / 6, 3),
]
SPECS = [
    ("generalized m=1", MaterialSpec(m=1.0)),
    ("generalized m=0", MaterialSpec(m=0.0)),
    ("silling", MaterialSpec(family="silling", law="isotropic", lam=0.4, mu=0.4)),
]


def timed(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    backends = _backend.available()
    rng = np.random.default_rng(0)
    print(f"{'case':18s} {'model':16s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup  max|diff|")
    for label, dim, ext, dx, N in CASES:
        nodes = mesh.build_grid(dim, ext, dx)
        fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(N, dx))
        x = nodes.positions * 1.01 + 1e-3 * dx * rng.standard_normal(nodes.positions.shape)
        for mlabel, spec in SPECS:
            if spec.law == "isotropic" and dim == 1:
                continue
            times, forces = [], []
            for name in backends:
                body = Body(nodes, fam, spec, backend=name)
                times.append(timed(lambda: body.internal_force(x), args.repeat))
                forces.append(body.internal_force(x))
            cols = " ".join(f"{t * 1e3:8.2f}ms" for t in times)
            speed = times[-1] / times[0] if len(times) > 1 else 1.0
            diff = max(np.abs(f - forces[0]).max() for f in forces)
            print(f"{label:18s} {mlabel:16s} {cols}   {speed:6.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
