"""Gate-level netlist core: ISCAS bench parsing, validation, and emission."""

import re
from dataclasses import dataclass, field, replace
from enum import Enum


class GateType(Enum):
    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"
    DFF = "DFF"


# NOT/BUF/DFF take exactly one input, everything else at least two.
_UNARY = {GateType.NOT, GateType.BUF, GateType.DFF}

RESERVED_WIRE_PREFIX = "__pl_"
KEY_INPUT_PATTERN = re.compile(r"keyinput\d+$")


class BenchError(Exception):
    """Base class for netlist parse/validation failures."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", col {column}"
            loc += ": "
        super().__init__(loc + message)


class BenchSyntaxError(BenchError):
    pass


class UnknownGateError(BenchError):
    pass


class ArityError(BenchError):
    pass


class DuplicateDriverError(BenchError):
    pass


class UndrivenWireError(BenchError):
    pass


class CombinationalCycleError(BenchError):
    pass


class ReservedNameError(BenchError):
    pass


@dataclass(frozen=True)
class Gate:
    id: str
    gate_type: GateType
    inputs: tuple
    output: str


@dataclass(frozen=True)
class KeyGateRecord:
    target_gate: str  # id of the gate whose output wire was tapped
    key_input: str
    polarity: str  # "XOR" or "XNOR"


@dataclass(frozen=True)
class KeyMetadata:
    key: str  # bitstring, bit i drives key input i
    gates: tuple  # KeyGateRecord per key bit


@dataclass
class Netlist:
    """Immutable-by-convention circuit IR; mutation helpers return new values."""

    name: str
    primary_inputs: tuple
    primary_outputs: tuple
    gates: tuple
    key_inputs: tuple = ()
    key_metadata: KeyMetadata | None = None
    _by_output: dict = field(default=None, repr=False, compare=False)

    def gate_by_id(self, gid):
        return self.driver_map()[gid]

    def driver_map(self):
        """Map output wire (== gate id) -> Gate."""
        if self._by_output is None:
            self._by_output = {g.output: g for g in self.gates}
        return self._by_output

    def sink_map(self):
        """Map wire -> list of gates reading it, in file order."""
        sinks = {}
        for g in self.gates:
            for w in g.inputs:
                sinks.setdefault(w, []).append(g)
        return sinks

    @property
    def dffs(self):
        return tuple(g for g in self.gates if g.gate_type is GateType.DFF)

    @property
    def is_sequential(self):
        return any(g.gate_type is GateType.DFF for g in self.gates)

    def replaced(self, **kw):
        kw.setdefault("_by_output", None)
        return replace(self, **kw)


def _check_arity(gate_type, n_inputs, line=None):
    if gate_type in _UNARY:
        if n_inputs != 1:
            raise ArityError(
                f"{gate_type.value} requires exactly 1 input, got {n_inputs}", line
            )
    elif n_inputs < 2:
        raise ArityError(
            f"{gate_type.value} requires >= 2 inputs, got {n_inputs}", line
        )


_IO_RE = re.compile(r"^(INPUT|OUTPUT)\s*\(\s*([^()\s,]+)\s*\)$", re.IGNORECASE)
_GATE_RE = re.compile(r"^([^()\s=]+)\s*=\s*([A-Za-z]+)\s*\(\s*(.*?)\s*\)$")


def parse_bench(text, name="netlist", allow_reserved=False):
    """Parse ISCAS89-style bench text into a validated Netlist.

    Key headers written by write_bench (# KEYINPUTS / # KEY / # KEYGATES) are
    honored: listed inputs are classified as key inputs rather than PIs.
    Reserved wire names (__pl_*, keyinputN) are rejected in hand-written
    files unless sanctioned by those headers or allow_reserved=True.
    """
    inputs = []
    outputs = []
    gates = []
    header_keyinputs = []
    header_key = None
    header_keygates = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.upper().startswith("KEYINPUTS:"):
                header_keyinputs = body[len("KEYINPUTS:"):].split()
            elif body.upper().startswith("KEY:"):
                header_key = body[len("KEY:"):].strip()
            elif body.upper().startswith("KEYGATES:"):
                header_keygates = body[len("KEYGATES:"):].split()
            continue
        m = _IO_RE.match(line)
        if m:
            kind, wire = m.group(1).upper(), m.group(2)
            (inputs if kind == "INPUT" else outputs).append(wire)
            continue
        m = _GATE_RE.match(line)
        if m:
            out, keyword, arglist = m.groups()
            try:
                gate_type = GateType[keyword.upper()]
            except KeyError:
                raise UnknownGateError(
                    f"unknown gate keyword '{keyword}'", lineno, line.index(keyword) + 1
                ) from None
            args = [a.strip() for a in arglist.split(",")] if arglist.strip() else []
            if any(not a for a in args):
                raise BenchSyntaxError("empty gate operand", lineno)
            _check_arity(gate_type, len(args), lineno)
            gates.append(Gate(id=out, gate_type=gate_type, inputs=tuple(args), output=out))
            continue
        raise BenchSyntaxError(f"unrecognized line: '{line}'", lineno, 1)

    sanctioned = set(header_keyinputs)
    if not allow_reserved:
        for wire in inputs + [g.output for g in gates]:
            if wire in sanctioned:
                continue
            if wire.startswith(RESERVED_WIRE_PREFIX) and not header_keyinputs:
                raise ReservedNameError(
                    f"wire '{wire}' uses the reserved prefix {RESERVED_WIRE_PREFIX}"
                )
            if KEY_INPUT_PATTERN.match(wire):
                raise ReservedNameError(
                    f"wire '{wire}' uses a reserved key-input name"
                )

    key_inputs = tuple(w for w in inputs if w in sanctioned)
    primary_inputs = tuple(w for w in inputs if w not in sanctioned)

    key_metadata = None
    if header_keyinputs:
        for item in header_keygates:
            gid, _, pol = item.rpartition(":")
            if pol not in ("XOR", "XNOR") or not gid:
                raise BenchSyntaxError(f"bad KEYGATES entry '{item}'")
        if header_key is None or len(header_key) != len(header_keyinputs):
            raise BenchSyntaxError("KEY header missing or length-mismatched")
        if len(header_keygates) != len(header_keyinputs):
            raise BenchSyntaxError("KEYGATES header length-mismatched")
        records = tuple(
            KeyGateRecord(target_gate=item.rpartition(":")[0],
                          key_input=ki,
                          polarity=item.rpartition(":")[2])
            for item, ki in zip(header_keygates, key_inputs)
        )
        key_metadata = KeyMetadata(key=header_key, gates=records)

    netlist = Netlist(
        name=name,
        primary_inputs=primary_inputs,
        primary_outputs=tuple(outputs),
        gates=tuple(gates),
        key_inputs=key_inputs,
        key_metadata=key_metadata,
    )
    validate(netlist)
    return netlist


def validate(netlist):
    """Check all structural Netlist invariants; raises a BenchError subclass."""
    driven = set()
    for w in netlist.primary_inputs:
        if w in driven:
            raise DuplicateDriverError(f"input '{w}' declared twice")
        driven.add(w)
    for w in netlist.key_inputs:
        if w in driven:
            raise DuplicateDriverError(f"key input '{w}' declared twice")
        driven.add(w)
    for g in netlist.gates:
        if g.output in driven:
            raise DuplicateDriverError(f"wire '{g.output}' has multiple drivers")
        driven.add(g.output)
        _check_arity(g.gate_type, len(g.inputs))
    for g in netlist.gates:
        for w in g.inputs:
            if w not in driven:
                raise UndrivenWireError(f"wire '{w}' (input of '{g.id}') is undriven")
    for w in netlist.primary_outputs:
        if w not in driven:
            raise UndrivenWireError(f"output '{w}' is undriven")

    # Kahn's algorithm over non-DFF dependencies; DFF inputs do not create
    # combinational edges, so any leftover gate is on a combinational cycle.
    drivers = netlist.driver_map()
    indeg = {}
    consumers = {}
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            indeg[g.id] = 0
            continue
        deg = 0
        for w in g.inputs:
            d = drivers.get(w)
            if d is not None and d.gate_type is not GateType.DFF:
                deg += 1
                consumers.setdefault(d.id, []).append(g.id)
        indeg[g.id] = deg
    ready = [gid for gid, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        gid = ready.pop()
        seen += 1
        for nxt in consumers.get(gid, ()):
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    if seen != len(netlist.gates):
        stuck = sorted(gid for gid, d in indeg.items() if d > 0)
        raise CombinationalCycleError(
            f"combinational cycle through: {', '.join(stuck[:8])}"
        )
    return netlist


def topological_gates(netlist):
    """Gates in evaluation order; DFFs first (their outputs act as sources)."""
    drivers = netlist.driver_map()
    order = [g for g in netlist.gates if g.gate_type is GateType.DFF]
    indeg = {}
    consumers = {}
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            continue
        deg = 0
        for w in g.inputs:
            d = drivers.get(w)
            if d is not None and d.gate_type is not GateType.DFF:
                deg += 1
                consumers.setdefault(d.id, []).append(g)
        indeg[g.id] = deg
    # file order among ready gates keeps the ordering deterministic
    from collections import deque

    ready = deque(g for g in netlist.gates
                  if g.gate_type is not GateType.DFF and indeg[g.id] == 0)
    while ready:
        g = ready.popleft()
        order.append(g)
        for nxt in consumers.get(g.id, ()):
            indeg[nxt.id] -= 1
            if indeg[nxt.id] == 0:
                ready.append(nxt)
    assert len(order) == len(netlist.gates)
    return order


def write_bench(netlist):
    """Emit bench text; locked netlists carry their key in header comments."""
    lines = [f"# {netlist.name}"]
    meta = netlist.key_metadata
    if meta is not None:
        lines.append("# KEYINPUTS: " + " ".join(netlist.key_inputs))
        lines.append("# KEY: " + meta.key)
        lines.append("# KEYGATES: " + " ".join(
            f"{r.target_gate}:{r.polarity}" for r in meta.gates))
    for w in netlist.primary_inputs:
        lines.append(f"INPUT({w})")
    for w in netlist.key_inputs:
        lines.append(f"INPUT({w})")
    for w in netlist.primary_outputs:
        lines.append(f"OUTPUT({w})")
    for g in netlist.gates:
        lines.append(f"{g.output} = {g.gate_type.value}({', '.join(g.inputs)})")
    return "\n".join(lines) + "\n"


def count_nodes(netlist):
    """Total node count: every gate including NOT/BUF and DFFs; PI/PO excluded."""
    return len(netlist.gates)
