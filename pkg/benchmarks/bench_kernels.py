"""Compare the compiled and NumPy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times sparse contraction ``A x^{m-1}``, ``A x^{m-2}`` and a full maximal
solve on random M-tensors, once per backend.
"""

import argparse
import timeit

import numpy as np

from mtsolve import kernels
from mtsolve.instances import random_m_tensor, two_solution_tensor
from mtsolve.solver import SolverOptions, maximal_solve

CASES = [(3, 20, 1.0), (3, 100, 0.02), (4, 30, 0.2), (6, 8, 1.0)]


def _use(name):
    kernels._impl = kernels.load_backend(name)
    kernels.BACKEND = name


def bench(repeat):
    try:
        kernels.load_backend("cython")
        names = ["python", "cython"]
    except ImportError:
        print("compiled kernels not built; timing the NumPy fallback only")
        names = ["python"]
    rng = np.random.default_rng(0)
    print(f"{'case':<22}{'kernel':<16}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for m, n, density in CASES:
        A = random_m_tensor(rng, m, n, density=density)
        x = rng.uniform(0.1, 1.0, n)
        label = f"m={m} n={n} nnz={A.nnz}"
        for kernel in ("contract", "contract_matrix"):
            times = []
            for name in names:
                mod = kernels.load_backend(name)
                f = getattr(mod, kernel)
                number = 200
                t = min(timeit.repeat(lambda: f(A.indices, A.values, x, n), number=number, repeat=repeat)) / number
                times.append(t)
            ratio = times[0] / times[-1]
            print(f"{label:<22}{kernel:<16}" + "".join(f"{t * 1e6:>10.1f}us" for t in times) + f"{ratio:>9.1f}x")
    A = two_solution_tensor(10)
    b = np.array([0.0, 1.0])
    opts = SolverOptions(x0=np.array([3.0, 1.0]))
    times = []
    for name in names:
        _use(name)
        times.append(min(timeit.repeat(lambda: maximal_solve(A, b, opts=opts), number=1, repeat=repeat)))
    print(f"{'m=10 n=2':<22}{'maximal_solve':<16}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + f"{times[0] / times[-1]:>9.1f}x")
    _use(names[-1])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    bench(ap.parse_args().repeat)
