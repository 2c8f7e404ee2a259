"""Shared helpers: random circuit generation and brute-force oracles.

The random generators stand in for real benchmark suites, which are not
redistributable here; scales and DFF density are chosen to resemble them.
"""

import random

from gatelock.bench import Gate, GateType, Netlist, validate

COMB_TYPES = (GateType.AND, GateType.NAND, GateType.OR, GateType.NOR,
              GateType.XOR, GateType.XNOR, GateType.NOT, GateType.BUF)


def random_netlist(seed, n_gates, n_pis, n_pos=None, dff_frac=0.0,
                   max_fanin=4, name=None):
    """Random valid netlist; cycles only ever pass through DFFs."""
    rng = random.Random(seed)
    name = name or f"rand{seed}_{n_gates}"
    pis = [f"i{k}" for k in range(n_pis)]
    wires = list(pis)
    gates = []
    dff_slots = []
    for k in range(n_gates):
        out = f"g{k}"
        if dff_frac and rng.random() < dff_frac and k > 0:
            # input fixed up later so feedback edges are possible
            gates.append(Gate(id=out, gate_type=GateType.DFF,
                              inputs=("__fix__",), output=out))
            dff_slots.append(k)
        else:
            gt = rng.choice(COMB_TYPES)
            fanin = 1 if gt in (GateType.NOT, GateType.BUF) else rng.randint(2, max_fanin)
            ins = tuple(rng.choice(wires) for _ in range(fanin))
            gates.append(Gate(id=out, gate_type=gt, inputs=ins, output=out))
        wires.append(out)
    for k in dff_slots:
        d = rng.choice([w for w in wires if w != gates[k].output] or wires)
        gates[k] = Gate(id=gates[k].id, gate_type=GateType.DFF,
                        inputs=(d,), output=gates[k].output)

    used = {w for g in gates for w in g.inputs}
    unused = [g.output for g in gates if g.output not in used]
    pos = unused or [gates[-1].output]
    if n_pos:
        pool = [g.output for g in gates if g.output not in pos]
        rng.shuffle(pool)
        pos = (pos + pool)[:n_pos]
    netlist = Netlist(name=name, primary_inputs=tuple(pis),
                      primary_outputs=tuple(pos), gates=tuple(gates))
    return validate(netlist)


def layered_netlist(seed, width, depth, n_pis, dff_frac=0.0, name=None):
    """Wide, shallow layered DAG in the shape of the classic benchmark suites:
    many parallel logic cones, fan-in mostly 2-3 drawn from the previous two
    layers, plenty of primary outputs. Path depths vary per cone, so slack is
    spread out instead of every gate sitting near one long chain."""
    rng = random.Random(seed)
    name = name or f"layer{seed}_{width}x{depth}"
    pis = [f"i{k}" for k in range(n_pis)]
    layers = [list(pis)]
    gates = []
    dff_slots = []
    k = 0
    for d in range(depth):
        # irregular widths: some layers thin out, some bulge
        w = max(2, int(width * rng.uniform(0.6, 1.4)))
        layer = []
        pool = layers[-1] + (layers[-2] if len(layers) > 1 else [])
        for _ in range(w):
            out = f"g{k}"
            k += 1
            if dff_frac and rng.random() < dff_frac:
                gates.append(Gate(id=out, gate_type=GateType.DFF,
                                  inputs=("__fix__",), output=out))
                dff_slots.append(len(gates) - 1)
            else:
                gt = rng.choice(COMB_TYPES)
                fanin = 1 if gt in (GateType.NOT, GateType.BUF) else rng.randint(2, 3)
                ins = tuple(rng.choice(pool) for _ in range(fanin))
                gates.append(Gate(id=out, gate_type=gt, inputs=ins, output=out))
            layer.append(out)
        layers.append(layer)
    all_wires = [g.output for g in gates]
    for idx in dff_slots:
        d = rng.choice([w for w in all_wires if w != gates[idx].output] or pis)
        gates[idx] = Gate(id=gates[idx].id, gate_type=GateType.DFF,
                          inputs=(d,), output=gates[idx].output)
    used = {w for g in gates for w in g.inputs}
    pos = [g.output for g in gates if g.output not in used]
    netlist = Netlist(name=name, primary_inputs=tuple(pis),
                      primary_outputs=tuple(pos), gates=tuple(gates))
    return validate(netlist)


def random_tree_netlist(seed, n_inputs, name=None):
    """Fanout-free circuit: every wire feeds exactly one gate (or the PO)."""
    rng = random.Random(seed)
    pis = [f"i{k}" for k in range(n_inputs)]
    avail = list(pis)
    gates = []
    k = 0
    while len(avail) > 1:
        gt = rng.choice(COMB_TYPES)
        if gt in (GateType.NOT, GateType.BUF):
            take = 1
        else:
            take = min(len(avail), rng.randint(2, 3))
            if take < 2:
                gt = GateType.NOT
                take = 1
        ins = [avail.pop(rng.randrange(len(avail))) for _ in range(take)]
        out = f"g{k}"
        k += 1
        gates.append(Gate(id=out, gate_type=gt, inputs=tuple(ins), output=out))
        avail.append(out)
    netlist = Netlist(name=name or f"tree{seed}", primary_inputs=tuple(pis),
                      primary_outputs=(avail[0],), gates=tuple(gates))
    return validate(netlist)


def enumerate_paths(graph):
    """All source-to-endpoint paths as gate-id tuples (duplicate input wires
    give distinct paths, matching the edge relation)."""
    po = set(graph.netlist.primary_outputs)
    dff_d = {u for u, _ in graph.dff_cut_edges}
    paths = []

    succ_edges = {}
    for gid in graph.gate_order:
        for p in graph.preds[gid]:
            succ_edges.setdefault(p, []).append(gid)

    def walk(node, acc):
        if node in po or node in dff_d:
            if acc:
                paths.append(tuple(acc))
        for nxt in succ_edges.get(node, ()):
            walk(nxt, acc + [nxt])

    for s in sorted(graph.sources):
        walk(s, [])
    return paths


def brute_force_arrival(graph, model, extra=None):
    """Max-delay source-to-node arrival by explicit path enumeration."""
    from gatelock.bench import GateType as GT
    extra = extra or {}
    drivers = graph.netlist.driver_map()

    def node_delay(gid):
        return model.delay(drivers[gid].gate_type) + extra.get(gid, 0.0)

    best = {s: (model.delay(GT.DFF) if s in drivers else 0.0)
            for s in graph.sources}

    succ = {}
    for gid in graph.gate_order:
        for p in graph.preds[gid]:
            succ.setdefault(p, []).append(gid)

    def dfs(node, t):
        for nxt in succ.get(node, ()):
            t2 = t + node_delay(nxt)
            if t2 > best.get(nxt, float("-inf")):
                best[nxt] = t2
            dfs(nxt, t2)

    for s in graph.sources:
        dfs(s, best[s])
    return best
