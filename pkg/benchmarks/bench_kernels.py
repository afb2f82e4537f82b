"""Compare the compiled kernels with the numpy/scipy fallback.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

The end-to-end line times one long Table 2 realization under each backend by
re-running this script in a subprocess with ``VMRIC_PURE_PYTHON=1``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from vmric import _kernels_py

try:
    from vmric import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def bench_kernels(n: int, repeat: int) -> None:
    rng = np.random.default_rng(0)
    innov = rng.standard_normal(n)
    x = rng.standard_normal(n)
    e = np.ascontiguousarray(rng.standard_normal((n, 2)))
    coef = np.array([0.4, -0.75])
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    print(f"{'kernel':<22}{'backend':<10}{'best of ' + str(repeat):>14}")
    for name, call in (
        ("ar_recursion", lambda k: k.ar_recursion(innov, coef)),
        ("lagged_cross_moment", lambda k: k.lagged_cross_moment(x, e, 1)),
    ):
        for label, mod in backends:
            t = min(timeit.repeat(lambda: call(mod), number=1, repeat=repeat))
            print(f"{name:<22}{label:<10}{t * 1e3:>11.2f} ms")


def bench_end_to_end(n: int) -> None:
    code = (
        "import time; from vmric import BACKEND; from vmric.example import TABLE1; "
        "from vmric.montecarlo import run_table2; t=time.perf_counter(); "
        f"run_table2(TABLE1[1].replace(n={n}), 0, 1); print(BACKEND, time.perf_counter()-t)"
    )
    for pure in ("0", "1"):
        env = dict(os.environ, VMRIC_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"{'table2 case 1':<22}{backend:<10}{float(secs) * 1e3:>11.2f} ms")


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    bench_kernels(args.n, args.repeat)
    bench_end_to_end(args.n)


if __name__ == "__main__":
    main()
