"""Compare the jitted simulation/probability kernels against the pure
numpy/python fallbacks on one synthetic circuit.

Usage:
    python3 benchmarks/bench_kernels.py [--gates 20000] [--words 256] [--repeat 5]

Both paths are exercised in the same process (the fallback functions are
always importable), so no env juggling is needed; results also double as a
sanity check that the two implementations agree bit for bit.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from gatelock import kernels
from gatelock.program import compile_program
from util import layered_netlist


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gates", type=int, default=20000)
    ap.add_argument("--words", type=int, default=256,
                    help="64-bit words per wire (vectors = 64 * words)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    width = max(8, args.gates // 14)
    n = layered_netlist(1, width=width, depth=14, n_pis=64)
    p = compile_program(n)
    print(f"circuit: {len(n.gates)} gates, {p.n_wires} wires, "
          f"{64 * args.words} packed vectors")

    rng = np.random.default_rng(0)
    values = np.zeros((p.n_wires, args.words), dtype=np.uint64)
    for r in np.concatenate([p.pi_rows, p.key_rows, p.dff_q]):
        values[r] = rng.integers(0, 2**63, size=args.words, dtype=np.uint64)
    probs = np.full(p.n_wires, 0.5)
    reset = np.zeros(len(p.ops), dtype=np.bool_)

    sim_np = values.copy()
    kernels.sim_pass_numpy(p.ops, p.in_off, p.in_idx, p.out_idx, sim_np)
    t_sim_np = timeit(lambda: kernels.sim_pass_numpy(
        p.ops, p.in_off, p.in_idx, p.out_idx, values.copy()), args.repeat)
    prob_np = probs.copy()
    kernels.prob_pass_numpy(p.ops, p.in_off, p.in_idx, p.out_idx, reset, prob_np)
    t_prob_np = timeit(lambda: kernels.prob_pass_numpy(
        p.ops, p.in_off, p.in_idx, p.out_idx, reset, probs.copy()), args.repeat)
    print(f"numpy fallback : sim {t_sim_np * 1e3:8.2f} ms   "
          f"prob {t_prob_np * 1e3:8.2f} ms")

    if not kernels.USE_NUMBA:
        print("jitted path unavailable (GATELOCK_NO_NUMBA set or numba missing)")
        return

    sim_jit = values.copy()
    kernels._sim_pass_jit(p.ops, p.in_off, p.in_idx, p.out_idx, sim_jit)  # warm up
    t_sim_jit = timeit(lambda: kernels._sim_pass_jit(
        p.ops, p.in_off, p.in_idx, p.out_idx, values.copy()), args.repeat)
    prob_jit = probs.copy()
    kernels._prob_pass_jit(p.ops, p.in_off, p.in_idx, p.out_idx, reset, prob_jit)
    t_prob_jit = timeit(lambda: kernels._prob_pass_jit(
        p.ops, p.in_off, p.in_idx, p.out_idx, reset, probs.copy()), args.repeat)
    print(f"jitted kernels : sim {t_sim_jit * 1e3:8.2f} ms   "
          f"prob {t_prob_jit * 1e3:8.2f} ms")
    print(f"speedup        : sim {t_sim_np / t_sim_jit:7.1f}x   "
          f"prob {t_prob_np / t_prob_jit:7.1f}x")

    assert np.array_equal(sim_np, sim_jit), "sim kernels disagree"
    assert np.allclose(prob_np, prob_jit, atol=1e-15), "prob kernels disagree"
    print("agreement      : sim exact, prob within 1e-15")


if __name__ == "__main__":
    main()
