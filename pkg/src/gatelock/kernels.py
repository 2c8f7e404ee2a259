"""Hot inner loops: packed 64-way logic simulation and probability passes.

Netlists are compiled (see sim.py / probability.py) into flat gate programs:
    ops[i]     opcode of the i-th gate in topological order
    in_off[i]  start of its inputs in in_idx (in_off has n_gates+1 entries)
    in_idx[:]  wire indices of gate inputs, concatenated
    out_idx[i] wire index of the gate output

Simulation values live in a (n_wires, n_words) uint64 array, one bit per
vector. Probabilities live in a (n_wires,) float64 array.

The numba-jitted kernels are used by default; set GATELOCK_NO_NUMBA=1 to
select the pure numpy/python fallbacks (same semantics, used as the
cross-check in benchmarks/bench_kernels.py).
"""

import os

import numpy as np

OP_AND = 0
OP_NAND = 1
OP_OR = 2
OP_NOR = 3
OP_XOR = 4
OP_XNOR = 5
OP_BUF = 6
OP_NOT = 7

_INVERTING = (OP_NAND, OP_NOR, OP_XNOR, OP_NOT)


def _use_numba():
    if os.environ.get("GATELOCK_NO_NUMBA", "") in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _use_numba()


# ---------------------------------------------------------------- fallbacks

_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def sim_pass_numpy(ops, in_off, in_idx, out_idx, values):
    """Evaluate the gate program once over packed vector words."""
    for i in range(len(ops)):
        op = ops[i]
        lo, hi = in_off[i], in_off[i + 1]
        acc = values[in_idx[lo]].copy()
        if op in (OP_AND, OP_NAND):
            for j in range(lo + 1, hi):
                acc &= values[in_idx[j]]
        elif op in (OP_OR, OP_NOR):
            for j in range(lo + 1, hi):
                acc |= values[in_idx[j]]
        elif op in (OP_XOR, OP_XNOR):
            for j in range(lo + 1, hi):
                acc ^= values[in_idx[j]]
        if op in _INVERTING:
            acc = ~acc
        values[out_idx[i]] = acc


def prob_pass_numpy(ops, in_off, in_idx, out_idx, reset, values):
    """One signal-probability pass (independence assumption) over the program."""
    for i in range(len(ops)):
        op = ops[i]
        lo, hi = in_off[i], in_off[i + 1]
        if op in (OP_AND, OP_NAND):
            p = 1.0
            for j in range(lo, hi):
                p *= values[in_idx[j]]
            if op == OP_NAND:
                p = 1.0 - p
        elif op in (OP_OR, OP_NOR):
            p = 1.0
            for j in range(lo, hi):
                p *= 1.0 - values[in_idx[j]]
            if op == OP_NOR:
                pass
            else:
                p = 1.0 - p
        elif op in (OP_XOR, OP_XNOR):
            p = values[in_idx[lo]]
            for j in range(lo + 1, hi):
                q = values[in_idx[j]]
                p = p * (1.0 - q) + q * (1.0 - p)
            if op == OP_XNOR:
                p = 1.0 - p
        elif op == OP_BUF:
            p = values[in_idx[lo]]
        else:  # OP_NOT
            p = 1.0 - values[in_idx[lo]]
        if reset[i]:
            p = 0.5
        values[out_idx[i]] = p


# ------------------------------------------------------------ jitted kernels

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _sim_pass_jit(ops, in_off, in_idx, out_idx, values):  # pragma: no cover
        n_words = values.shape[1]
        for i in range(ops.shape[0]):
            op = ops[i]
            lo = in_off[i]
            hi = in_off[i + 1]
            out = out_idx[i]
            for w in range(n_words):
                acc = values[in_idx[lo], w]
                if op == OP_AND or op == OP_NAND:
                    for j in range(lo + 1, hi):
                        acc &= values[in_idx[j], w]
                elif op == OP_OR or op == OP_NOR:
                    for j in range(lo + 1, hi):
                        acc |= values[in_idx[j], w]
                elif op == OP_XOR or op == OP_XNOR:
                    for j in range(lo + 1, hi):
                        acc ^= values[in_idx[j], w]
                if op == OP_NAND or op == OP_NOR or op == OP_XNOR or op == OP_NOT:
                    acc = ~acc
                values[out, w] = acc

    @njit(cache=True)
    def _prob_pass_jit(ops, in_off, in_idx, out_idx, reset, values):  # pragma: no cover
        for i in range(ops.shape[0]):
            op = ops[i]
            lo = in_off[i]
            hi = in_off[i + 1]
            if op == OP_AND or op == OP_NAND:
                p = 1.0
                for j in range(lo, hi):
                    p *= values[in_idx[j]]
                if op == OP_NAND:
                    p = 1.0 - p
            elif op == OP_OR or op == OP_NOR:
                p = 1.0
                for j in range(lo, hi):
                    p *= 1.0 - values[in_idx[j]]
                if op == OP_OR:
                    p = 1.0 - p
            elif op == OP_XOR or op == OP_XNOR:
                p = values[in_idx[lo]]
                for j in range(lo + 1, hi):
                    q = values[in_idx[j]]
                    p = p * (1.0 - q) + q * (1.0 - p)
                if op == OP_XNOR:
                    p = 1.0 - p
            elif op == OP_BUF:
                p = values[in_idx[lo]]
            else:
                p = 1.0 - values[in_idx[lo]]
            if reset[i]:
                p = 0.5
            values[out_idx[i]] = p

    sim_pass = _sim_pass_jit
    prob_pass = _prob_pass_jit
else:
    sim_pass = sim_pass_numpy
    prob_pass = prob_pass_numpy
