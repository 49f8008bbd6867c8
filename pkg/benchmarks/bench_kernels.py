"""Compare the compiled integer kernels against the pure-Python twins.

Run:  python3 benchmarks/bench_kernels.py

Times the raw matrix kernels on the entry sizes the exact layer
actually produces (word tables over a degree-32 space push numerators
well past machine words), then times one representative end-to-end
workload (the order-6 group-law check) under each backend.
"""

import os
import random
import statistics
import subprocess
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from umbra import _kernels_py as kpy

try:
    from umbra import _kernels_cy as kcy
except ImportError:
    kcy = None


def rand_mat(rng, n, bits):
    return [
        [rng.getrandbits(bits) - (1 << (bits - 1)) for _ in range(n)]
        for _ in range(n)
    ]


def bench(fn, *args, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def kernel_table():
    rng = random.Random(2024)
    print(f"{'kernel':<12}{'n':>5}{'bits':>6}{'python':>12}{'cython':>12}{'speedup':>9}")
    for n, bits in [(16, 16), (33, 64), (33, 256), (64, 512)]:
        a = rand_mat(rng, n, bits)
        b = rand_mat(rng, n, bits)
        rows = [("imat_mul", (a, b)), ("imat_comb", (a, b, 3, -7))]
        for name, args in rows:
            py_best, _ = bench(getattr(kpy, name), *args)
            if kcy is None:
                print(f"{name:<12}{n:>5}{bits:>6}{py_best:>12.6f}{'-':>12}{'-':>9}")
                continue
            cy_best, _ = bench(getattr(kcy, name), *args)
            ratio = py_best / cy_best if cy_best else float("inf")
            print(
                f"{name:<12}{n:>5}{bits:>6}{py_best:>12.6f}{cy_best:>12.6f}"
                f"{ratio:>8.2f}x"
            )


def end_to_end(env_value):
    sys.stdout.flush()
    env = dict(os.environ)
    env["UMBRA_PURE_KERNELS"] = env_value
    code = (
        "import time\n"
        "from umbra import kernels\n"
        "from umbra.models import build_model\n"
        "from umbra.heisenberg import group_law_check\n"
        "m = build_model('heat', 10)\n"
        "t0 = time.perf_counter()\n"
        "r = group_law_check(m, 6)\n"
        "dt = time.perf_counter() - t0\n"
        "assert r.status == 'pass'\n"
        "print(f'{kernels.BACKEND:>8}  group_law_check(heat, order=6): {dt:.3f}s')\n"
    )
    subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    if kcy is None:
        print("compiled backend unavailable; timing pure Python only\n")
    kernel_table()
    print()
    end_to_end("")
    end_to_end("1")


if __name__ == "__main__":
    main()
