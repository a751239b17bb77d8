"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--sizes 256 4096 65536] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from pospart import kernels


def _system(n, rng):
    off = -rng.uniform(0.5, 1.0, n - 1)
    diag = 2.0 + np.abs(np.concatenate([off, [0.0]])) + np.abs(np.concatenate([[0.0], off]))
    return diag, off


def _cases(backend, n, steps, rng):
    diag, off = _system(n, rng)
    rhs = rng.normal(size=n)
    d, l = backend.ldl_factor(diag, off)
    u0 = rng.normal(size=n)
    out = np.empty((steps + 1, n))
    return {
        "ldl_factor": lambda: backend.ldl_factor(diag, off),
        "ldl_solve": lambda: backend.ldl_solve(d, l, rhs),
        "heat_march(%d steps)" % steps: lambda: backend.heat_march(d, l, diag * 0.5, off * 0.5, u0, None, out),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 4096, 65536])
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    py = kernels.python_backend
    cy = kernels.compiled_backend
    if cy is None:
        print("compiled kernels not built; only the Python backend is available")
    print("%-22s %8s %12s %12s %8s" % ("kernel", "n", "python [s]", "cython [s]", "speedup"))
    for n in args.sizes:
        rng = np.random.default_rng(n)
        pcases = _cases(py, n, args.steps, rng)
        ccases = _cases(cy, n, args.steps, np.random.default_rng(n)) if cy else {}
        for name, fn in pcases.items():
            tp = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            if cy:
                tc = min(timeit.repeat(ccases[name], number=1, repeat=args.repeat))
                print("%-22s %8d %12.3e %12.3e %8.1f" % (name, n, tp, tc, tp / tc))
            else:
                print("%-22s %8d %12.3e %12s %8s" % (name, n, tp, "-", "-"))


if __name__ == "__main__":
    main()
