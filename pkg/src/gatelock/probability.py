"""Signal-probability propagation and biased-node selection."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .program import compile_program


def read_input_probs(path):
    """PI-probability file: lines '<pi-name> <prob>'; missing PIs default 0.5."""
    probs = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected '<pi-name> <prob>'")
            p = float(parts[1])
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{path}:{lineno}: probability out of [0,1]")
            probs[parts[0]] = p
    return probs


def _run_prob(program, input_prob, dff_iters, reset_rows):
    values = np.full(program.n_wires, 0.5, dtype=np.float64)
    for w, p in input_prob.items():
        if w in program.wire_index:
            values[program.wire_index[w]] = p
    # key inputs stay 0.5 (unknown key) regardless of the PI file
    values[program.key_rows] = 0.5
    values[program.dff_q] = 0.5

    reset = np.zeros(len(program.ops), dtype=np.bool_)
    if reset_rows:
        rows = set(reset_rows)
        for i, out in enumerate(program.out_idx):
            if int(out) in rows:
                reset[i] = True

    iters = dff_iters if len(program.dff_q) else 1
    for _ in range(iters):
        kernels.prob_pass(program.ops, program.in_off, program.in_idx,
                          program.out_idx, reset, values)
        if len(program.dff_q):
            values[program.dff_q] = values[program.dff_d]
    return values


def propagate(netlist, input_prob=None, dff_iters=3, reset_wires=(), program=None):
    """Wire -> P(wire == 1) under the input-independence assumption.

    DFF outputs start at 0.5 and are refreshed from their D inputs after each
    of dff_iters full passes. Wires in reset_wires are clamped to exactly 0.5
    after evaluation (the effect of an inserted XOR/XNOR key gate).
    """
    if dff_iters < 1:
        raise ValueError("dff_iters must be >= 1")
    program = program or compile_program(netlist)
    reset_rows = [program.wire_index[w] for w in reset_wires]
    values = _run_prob(program, input_prob or {}, dff_iters, reset_rows)
    return {w: float(values[i]) for w, i in program.wire_index.items()}


@dataclass(frozen=True)
class BiasSelection:
    nodes: tuple
    bias_at_selection: tuple


def select_biased(netlist, candidates, n, input_prob=None, dff_iters=3):
    """Pick n candidates, most biased output first, re-propagating after each
    virtual key-gate insertion (selected outputs read as exactly 0.5
    downstream). Ties break toward file order."""
    candidates = list(candidates)
    if n > len(candidates):
        raise ValueError(f"requested {n} nodes from {len(candidates)} candidates")
    program = compile_program(netlist)
    file_order = {g.id: i for i, g in enumerate(netlist.gates)}
    remaining = sorted(candidates, key=file_order.__getitem__)
    input_prob = input_prob or {}

    chosen, biases = [], []
    reset_rows = []
    for _ in range(n):
        values = _run_prob(program, input_prob, dff_iters, reset_rows)
        best, best_bias = None, -1.0
        for gid in remaining:
            bias = abs(values[program.wire_index[gid]] - 0.5)
            if bias > best_bias + 1e-15:
                best, best_bias = gid, bias
        chosen.append(best)
        biases.append(float(best_bias))
        remaining.remove(best)
        reset_rows.append(program.wire_index[best])
    return BiasSelection(nodes=tuple(chosen), bias_at_selection=tuple(biases))
