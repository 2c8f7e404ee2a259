"""DAG view of a netlist, longest-path analysis, and one-shot unrolling."""

import warnings
from dataclasses import dataclass, field

from .bench import Gate, GateType, Netlist, topological_gates, validate

_NEG_INF = float("-inf")

FRAME0_PREFIX = "__pl_f0_"


@dataclass
class CircuitGraph:
    """Directed graph over gate nodes with DFF boundary edges cut.

    Node names coincide with wire names (gate id == output wire). Sources are
    primary inputs, key inputs, and DFF outputs; sinks are primary outputs and
    DFF D-inputs (recorded in dff_cut_edges as (driver, dff_id) pairs).
    """

    netlist: Netlist
    sources: frozenset
    gate_order: tuple  # non-DFF gate ids in topological order
    preds: dict  # gate id -> tuple of pred node names (with duplicates)
    succs: dict  # node -> tuple of non-DFF gate successors
    dff_cut_edges: frozenset  # (driver node, DFF gate id)
    _lp: dict = field(default=None, repr=False)

    @property
    def endpoint_drivers(self):
        """Nodes that terminate a path: PO drivers and DFF D-input drivers."""
        ends = list(self.netlist.primary_outputs)
        ends.extend(u for u, _ in sorted(self.dff_cut_edges))
        return ends


def build_graph(netlist):
    """DAG over the netlist with edges into DFFs cut for acyclicity."""
    drivers = netlist.driver_map()
    sources = set(netlist.primary_inputs) | set(netlist.key_inputs)
    preds = {}
    succs = {}
    cut = set()
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            sources.add(g.id)
            cut.add((g.inputs[0], g.id))
            continue
        preds[g.id] = tuple(g.inputs)
        for w in g.inputs:
            succs.setdefault(w, []).append(g.id)
    order = tuple(g.id for g in topological_gates(netlist)
                  if g.gate_type is not GateType.DFF)
    return CircuitGraph(
        netlist=netlist,
        sources=frozenset(sources),
        gate_order=order,
        preds=preds,
        succs={k: tuple(v) for k, v in succs.items()},
        dff_cut_edges=frozenset(cut),
    )


def _path_lengths(graph):
    """Per-gate longest gate-count to/from a source/endpoint.

    up[g]: gates on the longest source->g path, inclusive. down[g]: gates on
    the longest g->endpoint path, inclusive. L(g) = up + down - 1 is the gate
    count of the longest complete path through g; -inf when g reaches no
    endpoint. Cached on the graph.
    """
    if graph._lp is not None:
        return graph._lp
    up = {}
    for gid in graph.gate_order:
        best = 0
        for p in graph.preds[gid]:
            if p not in graph.sources:
                best = max(best, up[p])
        up[gid] = best + 1

    po_wires = set(graph.netlist.primary_outputs)
    dff_d_wires = {u for u, _ in graph.dff_cut_edges}
    down = {}
    for gid in reversed(graph.gate_order):
        best = 1 if (gid in po_wires or gid in dff_d_wires) else _NEG_INF
        for s in graph.succs.get(gid, ()):
            if down[s] != _NEG_INF:
                best = max(best, 1 + down[s])
        down[gid] = best
    graph._lp = (up, down)
    return graph._lp


def node_path_length(graph, gid):
    """Gate count of the longest complete path through gid (-inf if none)."""
    up, down = _path_lengths(graph)
    if down[gid] == _NEG_INF:
        return _NEG_INF
    return up[gid] + down[gid] - 1


def longest_path_length(graph):
    """Maximum number of gates on any source-to-endpoint path."""
    up, down = _path_lengths(graph)
    best = 0
    for gid in graph.gate_order:
        if down[gid] != _NEG_INF:
            best = max(best, up[gid] + down[gid] - 1)
    return best


@dataclass(frozen=True)
class LongestPathSubset:
    nodes: tuple
    max_path_length: int
    multiplier: int
    exhausted: bool = False  # every eligible node admitted


def longest_path_subset(graph, key_length, multiplier=3):
    """Nodes on the longest paths, admitted a whole length-class at a time.

    Admits gates in decreasing longest-path-through length until the subset
    exceeds multiplier * key_length (or all eligible gates are admitted).
    Equivalent to repeatedly collecting the nodes of the next-longest paths,
    without enumerating paths. File order breaks ties within a class.
    """
    if key_length < 1 or multiplier < 1:
        raise ValueError("key_length and multiplier must be >= 1")
    file_order = {g.id: i for i, g in enumerate(graph.netlist.gates)}
    eligible = [(gid, node_path_length(graph, gid)) for gid in graph.gate_order]
    eligible = [(gid, l) for gid, l in eligible if l != _NEG_INF]
    if not eligible:
        raise ValueError("graph has no source-to-endpoint path")
    classes = {}
    for gid, l in eligible:
        classes.setdefault(l, []).append(gid)
    nodes = []
    for l in sorted(classes, reverse=True):
        nodes.extend(sorted(classes[l], key=file_order.__getitem__))
        if len(nodes) > multiplier * key_length:
            break
    return LongestPathSubset(
        nodes=tuple(nodes),
        max_path_length=max(classes),
        multiplier=multiplier,
        exhausted=len(nodes) == len(eligible),
    )


def original_gate_id(gid):
    """Project an unrolled gate id back onto the source netlist's gate id."""
    if gid.startswith(FRAME0_PREFIX):
        return gid[len(FRAME0_PREFIX):]
    return gid


def unroll_once(netlist):
    """Expand a sequential netlist into two combinational time frames.

    Frame-0 wires carry the __pl_f0_ prefix; frame-1 keeps original names.
    DFF outputs in frame 0 become new primary inputs (initial state), and
    frame-1 DFF D-input wires become new primary outputs (next state). DFF
    gates themselves disappear, so the result has exactly twice the
    combinational gate count. Combinational input is returned unchanged with
    a warning.
    """
    if not netlist.is_sequential:
        warnings.warn(f"{netlist.name}: no DFFs, unroll is an identity", stacklevel=2)
        return netlist

    dff_by_q = {g.output: g for g in netlist.gates if g.gate_type is GateType.DFF}

    def f0(w):
        return FRAME0_PREFIX + w

    def f1(w):
        # frame-1 value of a DFF output is the frame-0 D-input wire
        if w in dff_by_q:
            return f0(dff_by_q[w].inputs[0])
        return w

    gates = []
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            continue
        gates.append(Gate(id=f0(g.output), gate_type=g.gate_type,
                          inputs=tuple(f0(w) for w in g.inputs), output=f0(g.output)))
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            continue
        gates.append(Gate(id=g.output, gate_type=g.gate_type,
                          inputs=tuple(f1(w) for w in g.inputs), output=g.output))

    pis = [f0(w) for w in netlist.primary_inputs]
    pis.extend(f0(q) for q in dff_by_q)  # initial state
    pis.extend(netlist.primary_inputs)

    pos = [f0(w) for w in netlist.primary_outputs]
    pos.extend(f1(w) for w in netlist.primary_outputs if f1(w) not in pos)
    for g in dff_by_q.values():
        nxt = f1(g.inputs[0])
        if nxt not in pos:
            pos.append(nxt)  # next state

    unrolled = Netlist(
        name=netlist.name + "_unrolled",
        primary_inputs=tuple(pis),
        primary_outputs=tuple(pos),
        gates=tuple(gates),
    )
    return validate(unrolled)
