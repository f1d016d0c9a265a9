"""Compare the compiled and pure-Python row kernels.

Runs a synthetic elimination and an end-to-end ring build under each
backend in a fresh interpreter and prints wall times.

    python3 benchmarks/bench_kernel.py [--ring d,chi,kind,Dmax]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys

SNIPPET = r"""
import random, time
from gmpy2 import mpq
from tautring import kernel
random.seed(7)
vecs = [{random.randrange(4000): mpq(random.randint(1, 9), random.randint(1, 4)) for _ in range(300)}
        for _ in range(50)]
t = time.perf_counter()
acc = {}
for i in range(3000):
    kernel.axpy(acc, mpq(random.randint(-5, 5) or 1, 3), vecs[i % 50])
a = {random.randrange(1 << 20): mpq(random.randint(1, 9)) for _ in range(300)}
b = {random.randrange(1 << 20): mpq(random.randint(1, 9), 7) for _ in range(300)}
for _ in range(5):
    kernel.poly_mul(a, b)
t_lin = time.perf_counter() - t
from tautring.descendent import ToppType
from tautring.pipeline import RingRegistry, ensure_ring
d, chi, kind, D = RING
t = time.perf_counter()
reg = RingRegistry()
ensure_ring(reg, ToppType(d, chi), kind, D)
t_ring = time.perf_counter() - t
print(f"{kernel.BACKEND:8s} axpy/mul {t_lin:8.3f}s   ring build {t_ring:8.3f}s")
"""


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--ring", default="3,1,space,None")
    args = ap.parse_args()
    d, chi, kind, D = args.ring.split(",")
    code = SNIPPET.replace("RING", repr((int(d), int(chi), kind, int(D) if D != "None" else None)))
    for pure in ("0", "1"):
        env = dict(os.environ, TAUTRING_PURE_PYTHON=pure)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    main()
