"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--size 200000]

Each kernel is run once per backend to warm up (numba compiles on first use),
then timed; outputs are compared so a mismatch shows up as an error.
"""

import argparse
import time

import numpy as np

from formsums import kernels
from formsums.arith import tau
from formsums.polys import BinaryForm
from formsums.sums import s_sum


def _time(fn, repeat):
    fn()
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    values = rng.integers(1, 1 << 40, size=args.size, dtype=np.int64)
    table = tau.exponent_table()
    F = BinaryForm([1, 0, 0, 2])
    cases = {
        "mult_values(tau)": lambda: kernels.mult_values(values, table),
        "count_roots_mod(x^3+2, 10^6)": lambda: kernels.count_roots_mod([2, 0, 0, 1], 10**6),
        "count_form_pairs_mod(F, 997)": lambda: kernels.count_form_pairs_mod(F.coeffs, 997),
        "s_sum(400, 400; tau, F)": lambda: s_sum(400, 400, tau, F).value,
    }
    backends = [b for b in ("numba", "numpy") if b in kernels.BACKENDS]
    print(f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in cases.items():
        times, outs = [], []
        for b in backends:
            with kernels.use_backend(b):
                t, out = _time(fn, args.repeat)
            times.append(t)
            outs.append(np.asarray(out).tolist() if isinstance(out, np.ndarray) else out)
        if any(o != outs[0] for o in outs[1:]):
            raise SystemExit(f"backends disagree on {name}")
        speed = times[-1] / times[0] if len(times) > 1 and times[0] > 0 else float("nan")
        print(f"{name:34s}" + "".join(f"{t:11.4f}s" for t in times) + f"{speed:9.2f}x")


if __name__ == "__main__":
    main()
