"""Compare the compiled kernels against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Both backends must agree
before timings are reported.
"""

import argparse
import timeit

import numpy as np

from hotelling import _kernels_py
from hotelling._backend import compiled
from hotelling.distributions import Exponential, Linear, Pareto, Uniform
from hotelling.quadrature import QUAD_MAX_DEPTH, QUAD_TOL

CASES = [Uniform(), Linear(-2.0), Pareto(0.8, 0.01), Exponential(3.0)]


def bench_quadrature(backends, repeat):
    print("family_integral (asymmetric M at x=0.7), microseconds per call")
    for dist in CASES:
        p0, p1 = dist.kernel_params
        args = (_kernels_py.KIND_MASS, dist.code, p0, p1, 0.7, 0.35, 0.7, QUAD_TOL, QUAD_MAX_DEPTH)
        vals = {name: mod.family_integral(*args) for name, mod in backends.items()}
        assert max(vals.values()) - min(vals.values()) < 1e-14, vals
        line = [f"  {dist!r:28}"]
        for name, mod in backends.items():
            t = min(timeit.repeat(lambda: mod.family_integral(*args), number=repeat, repeat=3)) / repeat
            line.append(f"{name}={t * 1e6:9.1f}")
        print(" ".join(line))


def bench_attribution(backends, clients):
    rng = np.random.default_rng(1)
    v, left, right = rng.random(clients), rng.exponential(1 / 3, clients), rng.exponential(1 / 3, clients)
    locs = np.array([0.2, 0.45, 0.8])
    counts = {name: mod.attribute_clients(v, left, right, locs) for name, mod in backends.items()}
    ref = next(iter(counts.values()))
    assert all(np.array_equal(ref, c) for c in counts.values())
    print(f"attribute_clients ({clients} clients), milliseconds per call")
    for name, mod in backends.items():
        t = min(timeit.repeat(lambda: mod.attribute_clients(v, left, right, locs), number=3, repeat=3)) / 3
        print(f"  {name:8} {t * 1e3:8.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--clients", type=int, default=1_000_000)
    args = ap.parse_args()
    backends = {"python": _kernels_py}
    if compiled is not None:
        backends["compiled"] = compiled
    else:
        print("compiled extension not built; timing the fallback only")
    bench_quadrature(backends, args.repeat)
    bench_attribution(backends, args.clients)


if __name__ == "__main__":
    main()
