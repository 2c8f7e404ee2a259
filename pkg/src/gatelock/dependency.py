"""FANCI-style control values: how strongly gate inputs steer the output."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bench import GateType

FANIN_CAP = 16


@dataclass(frozen=True)
class ControlProfile:
    wire: str
    per_input_cv: tuple
    mean_cv: float


def gate_truth_table(gate_type, n_inputs):
    """Output column of the gate's truth table, indexed by the input word."""
    n = n_inputs
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(n)) & 1
    if gate_type in (GateType.AND, GateType.NAND):
        out = bits.all(axis=1)
        inv = gate_type is GateType.NAND
    elif gate_type in (GateType.OR, GateType.NOR):
        out = bits.any(axis=1)
        inv = gate_type is GateType.NOR
    elif gate_type in (GateType.XOR, GateType.XNOR):
        out = (bits.sum(axis=1) & 1).astype(bool)
        inv = gate_type is GateType.XNOR
    elif gate_type in (GateType.BUF, GateType.DFF):
        out = bits[:, 0].astype(bool)
        inv = False
    elif gate_type is GateType.NOT:
        out = bits[:, 0].astype(bool)
        inv = True
    else:  # pragma: no cover
        raise ValueError(gate_type)
    return out ^ inv if inv else out


@lru_cache(maxsize=None)
def _control_values(gate_type, n_inputs):
    """cv per input: fraction of other-input assignments where toggling the
    input toggles the output, normalized by 2^(n-1)."""
    if n_inputs > FANIN_CAP:
        raise ValueError(f"fan-in {n_inputs} exceeds truth-table cap {FANIN_CAP}")
    out = gate_truth_table(gate_type, n_inputs)
    idx = np.arange(1 << n_inputs, dtype=np.uint32)
    cvs = []
    for i in range(n_inputs):
        bit = np.uint32(1 << i)
        low = (idx & bit) == 0
        toggles = out[idx[low]] != out[idx[low] | bit]
        cvs.append(float(toggles.sum()) / (1 << (n_inputs - 1)))
    return tuple(cvs)


def control_profile(gate):
    """Control values of one gate's output wire, from its type alone."""
    try:
        cvs = _control_values(gate.gate_type, len(gate.inputs))
    except ValueError as exc:
        raise ValueError(f"gate '{gate.id}': {exc}") from None
    return ControlProfile(
        wire=gate.output,
        per_input_cv=cvs,
        mean_cv=float(sum(cvs)) / len(cvs),
    )


def low_dependent_filter(subset, netlist, threshold=0.5):
    """Keep gates whose mean control value is strictly below threshold."""
    drivers = netlist.driver_map()
    kept = []
    for gid in subset:
        if control_profile(drivers[gid]).mean_cv < threshold:
            kept.append(gid)
    return kept
