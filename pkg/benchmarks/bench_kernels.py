"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Prints per-call time for each kernel on both backends, and the wall time of a
100-channel soundness campaign under each backend (run in a subprocess so the
backend switch happens at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from gate_witness import _kernels_py
from gate_witness.channel import ideal_cnot, random_channel
from gate_witness.states import ALL_PRODUCT_BASES

try:
    from gate_witness import _kernels as compiled
except ImportError:
    compiled = None

CAMPAIGN = "from gate_witness.bounds import verify_ensemble; verify_ensemble(100, 7)"


def kernel_cases():
    ch = random_channel(4, 16, 1)
    kraus = np.ascontiguousarray(ch.kraus_ops)
    inputs = np.ascontiguousarray(ALL_PRODUCT_BASES[2].states())
    outs = (ideal_cnot() @ inputs.T).T
    bases = np.ascontiguousarray(np.broadcast_to(outs, (4, 4, 4)))
    rho = np.eye(4, dtype=complex) / 4
    u = np.ascontiguousarray(ideal_cnot(), dtype=complex)
    return {
        "outcome_probabilities": (kraus, inputs, bases),
        "apply_kraus": (kraus, rho),
        "unitary_overlap": (kraus, u),
    }


def time_call(fn, args, repeat):
    number = 2000
    best = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat))
    return best / number * 1e6


def campaign_seconds(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["GATE_WITNESS_PURE"] = "1"
    else:
        env.pop("GATE_WITNESS_PURE", None)
    code = f"import time; t=time.perf_counter(); {CAMPAIGN}; print(time.perf_counter()-t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"{'kernel':<24}{'python us':>12}{'compiled us':>14}{'speedup':>10}")
    for name, call_args in kernel_cases().items():
        py = time_call(getattr(_kernels_py, name), call_args, args.repeat)
        if compiled is None:
            print(f"{name:<24}{py:>12.2f}{'n/a':>14}{'':>10}")
            continue
        c = time_call(getattr(compiled, name), call_args, args.repeat)
        np.testing.assert_allclose(getattr(compiled, name)(*call_args), getattr(_kernels_py, name)(*call_args), atol=1e-12)
        print(f"{name:<24}{py:>12.2f}{c:>14.2f}{py / c:>9.1f}x")

    py_s = campaign_seconds(pure=True)
    c_s = campaign_seconds(pure=False)
    print(f"\n100-channel soundness campaign: python {py_s:.2f} s, default backend {c_s:.2f} s")


if __name__ == "__main__":
    main()
