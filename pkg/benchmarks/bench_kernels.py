"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from ``SPLITMOMENT_NO_NUMBA``. Usage::

    python3 benchmarks/bench_kernels.py [--n 2000] [--qmax 200000]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from splitmoment._accel import backend_name
from splitmoment.lcentral import central_values
from splitmoment.moment import enumerate_family
from splitmoment.quadfield import QuadraticField
from splitmoment.specfun import upper_gamma_array

n, qmax = int(sys.argv[1]), int(sys.argv[2])
fam = enumerate_family(QuadraticField(5), qmax).q[-n:]
x = np.linspace(0.0, 40.0, 200_000)

def best(fn, reps=3):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter(); out = fn(); times.append(time.perf_counter() - t0)
    return min(times), out

central_values(fam[:4]); upper_gamma_array(0.25, x[:10])  # warm-up / JIT
t_afe, vals = best(lambda: central_values(fam), reps=1 if backend_name() == "numpy" else 3)
t_gam, g = best(lambda: upper_gamma_array(0.25, x))
print(json.dumps({"backend": backend_name(), "n_q": int(fam.shape[0]), "afe_s": t_afe,
                  "gamma_s": t_gam, "checksum": float(np.sum(vals)), "gamma_sum": float(np.sum(g))}))
"""


def run_backend(no_numba: bool, n: int, qmax: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["SPLITMOMENT_NO_NUMBA"] = "1"
    else:
        env.pop("SPLITMOMENT_NO_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", CHILD, str(n), str(qmax)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="number of conductors")
    ap.add_argument("--qmax", type=int, default=200_000)
    args = ap.parse_args(argv)

    nb = run_backend(False, args.n, args.qmax)
    np_ = run_backend(True, args.n, args.qmax)
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for key, label in (("afe_s", f"AFE x{nb['n_q']} q"), ("gamma_s", "Q(1/4, x) x2e5")):
        print(f"{label:<22}{nb[key]:>12.4f}{np_[key]:>12.4f}{np_[key] / nb[key]:>10.1f}")
    rel = abs(nb["checksum"] - np_["checksum"]) / abs(nb["checksum"])
    print(f"checksum agreement (relative): {rel:.1e}")


if __name__ == "__main__":
    main()
