"""Compare the compiled and numpy prox kernels.

Times ``prox_batch`` over a range of batch sizes and a full proximal-gradient
solve, whose inner loop calls the kernel once per iteration on a small batch.

    python3 benchmarks/bench_prox.py [--sizes 127 8191 1000000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from besovreg import kernels
from besovreg.lab import DiagonalScaleOperator, MatrixOperator
from besovreg.solver import PenaltySpec, solve_general
from besovreg.spaces import BesovSpace, CoefField, field_size


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_batches(sizes, qs, repeat, backends):
    rng = np.random.default_rng(0)
    print(f"prox_batch, best of {repeat} (time per call)")
    print(f"{'n':>9} {'q':>5} " + " ".join(f"{b:>12}" for b in backends) + f" {'speedup':>8} {'max diff':>9}")
    for n in sizes:
        m = rng.uniform(0.05, 2, n)
        y = rng.standard_normal(n)
        c = 10 ** rng.uniform(-3, 1, n)
        # enough calls per timing that small batches are measurable
        calls = max(1, 200_000 // n)
        for q in qs:
            times, outs = [], []
            for b in backends:
                outs.append(kernels.prox_batch(m, y, c, q, backend=b))

                def run(b=b):
                    for _ in range(calls):
                        kernels.prox_batch(m, y, c, q, backend=b)

                times.append(best_of(run, repeat) / calls)
            diff = max(float(np.abs(o - outs[0]).max()) for o in outs)
            speed = max(times) / min(times)
            cells = " ".join(f"{_fmt(t):>12}" for t in times)
            print(f"{n:>9} {q:>5.2f} {cells} {speed:>7.1f}x {diff:>9.1e}")


def bench_solve(J, repeat, backends):
    rng = np.random.default_rng(1)
    op = MatrixOperator.from_diagonal(DiagonalScaleOperator(0.5, J))
    data = CoefField(J, rng.standard_normal(field_size(J)))
    pen = PenaltySpec(BesovSpace(0, 1.5), 0.1)
    print(f"\nsolve_general, J = {J} ({field_size(J)} coefficients), best of {repeat}")
    times = []
    for b in backends:
        rep = solve_general(op, data, pen, backend=b)
        times.append(best_of(lambda b=b: solve_general(op, data, pen, backend=b), repeat))
        print(f"{b:>9}: {_fmt(times[-1]):>10}  ({rep.iterations} iterations)")
    print(f"  speedup {max(times) / min(times):.1f}x")


def _fmt(t):
    return f"{t * 1e6:.1f} us" if t < 1e-3 else f"{t * 1e3:.2f} ms" if t < 1 else f"{t:.3f} s"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[127, 8191, 1_000_000])
    ap.add_argument("--q", type=float, nargs="+", default=[1.25, 1.5])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--solve-level", type=int, default=6)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})\n")
    bench_batches(args.sizes, args.q, args.repeat, backends)
    bench_solve(args.solve_level, args.repeat, backends)


if __name__ == "__main__":
    main()
