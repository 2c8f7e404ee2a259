"""Compile a netlist into the flat gate-program form the kernels consume."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bench import GateType, topological_gates

_OPCODE = {
    GateType.AND: kernels.OP_AND,
    GateType.NAND: kernels.OP_NAND,
    GateType.OR: kernels.OP_OR,
    GateType.NOR: kernels.OP_NOR,
    GateType.XOR: kernels.OP_XOR,
    GateType.XNOR: kernels.OP_XNOR,
    GateType.BUF: kernels.OP_BUF,
    GateType.NOT: kernels.OP_NOT,
}


@dataclass
class GateProgram:
    wire_index: dict  # wire name -> row in the value array
    ops: np.ndarray
    in_off: np.ndarray
    in_idx: np.ndarray
    out_idx: np.ndarray
    gate_ids: tuple  # gate id per program slot (non-DFF, topo order)
    dff_q: np.ndarray  # DFF output wire rows
    dff_d: np.ndarray  # matching D-input wire rows
    dff_ids: tuple
    pi_rows: np.ndarray
    key_rows: np.ndarray
    po_rows: np.ndarray

    @property
    def n_wires(self):
        return len(self.wire_index)


def compile_program(netlist):
    wire_index = {}

    def row(w):
        if w not in wire_index:
            wire_index[w] = len(wire_index)
        return wire_index[w]

    for w in netlist.primary_inputs:
        row(w)
    for w in netlist.key_inputs:
        row(w)

    order = topological_gates(netlist)
    dff_gates = [g for g in order if g.gate_type is GateType.DFF]
    for g in dff_gates:
        row(g.output)

    ops, in_off, in_idx, out_idx, gate_ids = [], [0], [], [], []
    for g in order:
        if g.gate_type is GateType.DFF:
            continue
        ops.append(_OPCODE[g.gate_type])
        in_idx.extend(row(w) for w in g.inputs)
        in_off.append(len(in_idx))
        out_idx.append(row(g.output))
        gate_ids.append(g.id)

    return GateProgram(
        wire_index=wire_index,
        ops=np.asarray(ops, dtype=np.int8),
        in_off=np.asarray(in_off, dtype=np.int64),
        in_idx=np.asarray(in_idx, dtype=np.int64),
        out_idx=np.asarray(out_idx, dtype=np.int64),
        gate_ids=tuple(gate_ids),
        dff_q=np.asarray([wire_index[g.output] for g in dff_gates], dtype=np.int64),
        dff_d=np.asarray([row(g.inputs[0]) for g in dff_gates], dtype=np.int64),
        dff_ids=tuple(g.id for g in dff_gates),
        pi_rows=np.asarray([wire_index[w] for w in netlist.primary_inputs], dtype=np.int64),
        key_rows=np.asarray([wire_index[w] for w in netlist.key_inputs], dtype=np.int64),
        po_rows=np.asarray([row(w) for w in netlist.primary_outputs], dtype=np.int64),
    )
