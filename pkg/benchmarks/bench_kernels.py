"""Compare the numba and pure-numpy kernel backends.

The backend is chosen at import time, so each one is timed in its own
subprocess::

    python3 benchmarks/bench_kernels.py            # both backends, summary table
    python3 benchmarks/bench_kernels.py --worker   # time whichever backend is active
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import numpy as np
from cliffdirac import _kernels, algebra as alg

rng = np.random.default_rng(0)
metrics = [alg.random_metric(rng) for _ in range(8)]
m = metrics[0]
T = m.table
a, b = rng.normal(size=16), rng.normal(size=16)
A, B = rng.normal(size=(2000, 16)), rng.normal(size=(2000, 16))
ginv = np.ascontiguousarray(m.ginv)

def table():
    for mm in metrics:
        _kernels.structure_tensor(mm.hodge_matrix, np.ascontiguousarray(mm.ginv), _kernels.GRADE_TABLE)

# warm up (numba compiles on first call)
table(); _kernels.gp(a, b, T); _kernels.gp_batch(A, B, T); _kernels.compound(ginv)
"""


def worker(repeat, number):
    import timeit as _t

    ns = {}
    exec(WORKER, ns)
    from cliffdirac import _kernels

    cases = {
        "structure_tensor x8": "table()",
        "gp (single product)": "_kernels.gp(a, b, T)",
        "gp_batch (2000 products)": "_kernels.gp_batch(A, B, T)",
        "compound (minors of g^-1)": "_kernels.compound(ginv)",
    }
    out = {"backend": _kernels.BACKEND, "timings": {}}
    for name, stmt in cases.items():
        best = min(_t.repeat(stmt, globals=ns, repeat=repeat, number=number)) / number
        out["timings"][name] = best
    return out


def run_backend(disable, repeat, number):
    env = dict(os.environ)
    if disable:
        env["CLIFFDIRAC_DISABLE_NUMBA"] = "1"
    else:
        env.pop("CLIFFDIRAC_DISABLE_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat), "--number", str(number)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat, args.number)))
        return
    nb = run_backend(False, args.repeat, args.number)
    np_ = run_backend(True, args.repeat, args.number)
    print(f"{'kernel':28s} {nb['backend']:>12s} {np_['backend']:>12s} {'speedup':>8s}")
    for name in np_["timings"]:
        t_nb, t_np = nb["timings"][name], np_["timings"][name]
        print(f"{name:28s} {t_nb * 1e6:10.2f}us {t_np * 1e6:10.2f}us {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
