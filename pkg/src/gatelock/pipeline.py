"""Constraint-chain orchestration, key generation, and key-gate insertion."""

import random
from dataclasses import dataclass, field

from .bench import (
    Gate,
    GateType,
    KeyGateRecord,
    KeyMetadata,
    ReservedNameError,
    count_nodes,
    validate,
)
from .dependency import low_dependent_filter
from .graph import build_graph, longest_path_subset, original_gate_id, unroll_once
from .probability import select_biased
from .timing import DelayModel, analyze_timing, remove_critical

_EPS = 1e-9

# Benchmark-name -> key-size table from the corpus study; other circuits use
# the next-power-of-two(total/16) heuristic clamped to [8, 256].
KEY_SIZE_TABLE = {
    "c432": 16, "c499": 16, "c1355": 32, "c1908": 64, "c2670": 64,
    "c3540": 128, "c5315": 128, "c7552": 256,
    "s298": 8, "s344": 8, "s382": 8, "s386": 8, "s400": 8, "s444": 8,
    "s526": 8, "s641": 8, "s713": 8, "s838": 16, "s1238a": 32, "s1488": 32,
    "s5378a": 64, "s9234a": 128, "s13207a": 256, "s15850a": 256, "s38584": 256,
}


class PipelineError(Exception):
    pass


@dataclass(frozen=True)
class LockConfig:
    key_length: int | None = None
    lp_multiplier: int = 3
    cp_mode: str = "strict_paper"  # or "slack_aware"
    ld_threshold: float = 0.5
    dff_iters: int = 3
    rng_seed: int = 0
    cp_cap: int = 100

    def __post_init__(self):
        if self.key_length is not None and self.key_length < 1:
            raise ValueError("key_length must be >= 1")
        if self.lp_multiplier < 1 or self.dff_iters < 1 or self.cp_cap < 1:
            raise ValueError("lp_multiplier, dff_iters, cp_cap must be >= 1")
        if not 0.0 < self.ld_threshold <= 1.0:
            raise ValueError("ld_threshold must be in (0, 1]")
        if self.cp_mode not in ("strict_paper", "slack_aware"):
            raise ValueError(f"unknown cp_mode '{self.cp_mode}'")


@dataclass
class ConstraintChain:
    name: str
    key_length: int
    total_nodes: int
    lp: tuple
    ncp: tuple
    ld: tuple
    prob: tuple
    selected: tuple
    relaxations: tuple
    lp_length: int
    cp_count: int


@dataclass
class LockingResult:
    locked: object  # Netlist
    key: str
    gates: tuple  # KeyGateRecord per key bit
    chain: ConstraintChain | None = None


def default_key_length(total_nodes, name=None):
    """Key size: table lookup for known benchmark names, else
    next-power-of-two of total/16 clamped to [8, 256]."""
    if name in KEY_SIZE_TABLE:
        return KEY_SIZE_TABLE[name]
    if total_nodes < 1:
        raise ValueError("total_nodes must be >= 1")
    target = total_nodes / 16
    size = 8
    while size < target and size < 256:
        size *= 2
    return size


def _project(nodes, netlist):
    """Map unrolled gate ids back to original ids, deduped, order preserved."""
    valid = set(g.id for g in netlist.gates)
    seen = set()
    out = []
    for gid in nodes:
        orig = original_gate_id(gid)
        if orig in valid and orig not in seen:
            seen.add(orig)
            out.append(orig)
    return out


def _guarded_selection(ranked, t_graph, model, cp_cap, key_len):
    """Greedy accept in bias order, re-timing after each accepted insertion so
    the accumulated key-gate delays can never stretch the critical delay."""
    kgd = model.key_gate_delay
    extra = {}
    report = analyze_timing(t_graph, model, cp_cap)
    accepted = []
    for gid in ranked:
        if len(accepted) == key_len:
            break
        if report.slack.get(gid, 0.0) >= kgd - _EPS:
            accepted.append(gid)
            extra[gid] = extra.get(gid, 0.0) + kgd
            report = analyze_timing(t_graph, model, cp_cap, extra_node_delay=extra)
    return accepted


def run_chain(netlist, config=None, delay_model=None, input_prob=None):
    """Execute the nested filtering chain and pick the key-gate locations.

    Stage order: longest-path subset (on the once-unrolled netlist for
    sequential circuits, projected back), critical-node removal, low-dependency
    filter, then biased-probability selection of key_length nodes. If a stage
    starves the next one, relaxations are applied in a fixed, recorded order:
    grow the LP multiplier, raise the LD threshold in 0.1 steps, bypass the LD
    filter, and finally bypass the critical-path filter.
    """
    config = config or LockConfig()
    model = delay_model or DelayModel.unit()
    total = count_nodes(netlist)
    key_len = config.key_length or default_key_length(total, netlist.name)

    if netlist.is_sequential:
        lp_graph = build_graph(unroll_once(netlist))
    else:
        lp_graph = build_graph(netlist)
    t_graph = build_graph(netlist)
    timing = analyze_timing(t_graph, model, config.cp_cap)

    mult = config.lp_multiplier
    thr = config.ld_threshold
    bypass_ld = False
    bypass_ncp = False
    relaxations = []

    while True:
        lp_sub = longest_path_subset(lp_graph, key_len, mult)
        lp = _project(lp_sub.nodes, netlist)
        if bypass_ncp:
            ncp = list(lp)
        else:
            ncp = remove_critical(lp, timing, config.cp_mode, model.key_gate_delay)
        if bypass_ld:
            ld = list(ncp)
        else:
            ld = low_dependent_filter(ncp, netlist, thr)

        selected = prob = None
        if len(ld) >= key_len:
            if config.cp_mode == "slack_aware":
                ranked = select_biased(netlist, ld, len(ld),
                                       input_prob=input_prob,
                                       dff_iters=config.dff_iters).nodes
                accepted = _guarded_selection(ranked, t_graph, model,
                                              config.cp_cap, key_len)
                if len(accepted) == key_len:
                    selected = prob = tuple(accepted)
            else:
                sel = select_biased(netlist, ld, key_len,
                                    input_prob=input_prob,
                                    dff_iters=config.dff_iters)
                selected = prob = sel.nodes
        if selected is not None:
            return ConstraintChain(
                name=netlist.name,
                key_length=key_len,
                total_nodes=total,
                lp=tuple(lp),
                ncp=tuple(ncp),
                ld=tuple(ld),
                prob=prob,
                selected=selected,
                relaxations=tuple(relaxations),
                lp_length=lp_sub.max_path_length,
                cp_count=timing.critical_path_count,
            )

        # relaxation ladder, every step recorded
        if not lp_sub.exhausted:
            mult += 1
            relaxations.append(f"lp_multiplier={mult}")
        elif not bypass_ld and thr < 1.0 - _EPS:
            thr = min(1.0, thr + 0.1)
            relaxations.append(f"ld_threshold={thr:.1f}")
        elif not bypass_ld:
            bypass_ld = True
            relaxations.append("ld_bypassed")
        elif not bypass_ncp:
            bypass_ncp = True
            relaxations.append("ncp_bypassed")
        else:
            raise PipelineError(
                f"{netlist.name}: cannot supply {key_len} key-gate sites "
                f"({len(ld)} candidates after all relaxations)")


def insert_key_gates(netlist, selected, rng_seed=0):
    """Insert one XOR/XNOR key gate after each selected gate's output wire.

    Every sink of the tapped wire (and any PO binding) is rewired to the key
    gate's output; polarity is a fair coin from the seeded RNG, and the key
    bit is set so the gate is transparent (0 for XOR, 1 for XNOR).
    """
    drivers = netlist.driver_map()
    missing = [gid for gid in selected if gid not in drivers]
    if missing:
        raise PipelineError(f"selected gates not in netlist: {missing}")
    if len(set(selected)) != len(selected):
        raise PipelineError("a gate was selected twice")

    rng = random.Random(rng_seed)
    existing = set(w for g in netlist.gates for w in (g.output, *g.inputs))
    existing |= set(netlist.primary_inputs) | set(netlist.key_inputs)

    rewire = {}
    key_bits = []
    records = []
    key_gates = []
    key_inputs = []
    for i, gid in enumerate(selected):
        w = drivers[gid].output
        ki = f"keyinput{i}"
        nw = f"__pl_{w}_{i}"
        if ki in existing or nw in existing:
            raise ReservedNameError(f"reserved wire '{ki if ki in existing else nw}' "
                                    "already present (netlist already locked?)")
        polarity = "XNOR" if rng.getrandbits(1) else "XOR"
        bit = "1" if polarity == "XNOR" else "0"
        rewire[w] = nw
        key_bits.append(bit)
        key_inputs.append(ki)
        records.append(KeyGateRecord(target_gate=gid, key_input=ki, polarity=polarity))
        key_gates.append(Gate(id=nw, gate_type=GateType[polarity],
                              inputs=(w, ki), output=nw))

    gates = []
    for g in netlist.gates:
        if any(w in rewire for w in g.inputs):
            gates.append(Gate(id=g.id, gate_type=g.gate_type,
                              inputs=tuple(rewire.get(w, w) for w in g.inputs),
                              output=g.output))
        else:
            gates.append(g)
    gates.extend(key_gates)

    key = "".join(key_bits)
    meta = KeyMetadata(key=key, gates=tuple(records))
    locked = netlist.replaced(
        name=netlist.name + "_locked",
        primary_outputs=tuple(rewire.get(w, w) for w in netlist.primary_outputs),
        gates=tuple(gates),
        key_inputs=tuple(key_inputs),
        key_metadata=meta,
    )
    validate(locked)
    return LockingResult(locked=locked, key=key, gates=tuple(records))


def lock(netlist, config=None, delay_model=None, input_prob=None):
    """Full pipeline: run the chain, then insert key gates."""
    config = config or LockConfig()
    chain = run_chain(netlist, config, delay_model, input_prob)
    result = insert_key_gates(netlist, chain.selected, config.rng_seed)
    result.chain = chain
    return result


REPORT_COLUMNS = ("Name", "Key Size", "LP Length", "CP Count", "Total Nodes",
                  "LP Subset", "NCP Subset", "LD Subset", "Prob Subset")


def report_row(chain, timing=None, name=None, key_length=None):
    """One CSV row in the corpus-report column schema."""
    return [
        name or chain.name,
        key_length or chain.key_length,
        chain.lp_length,
        timing.critical_path_count if timing is not None else chain.cp_count,
        chain.total_nodes,
        len(chain.lp),
        len(chain.ncp),
        len(chain.ld),
        len(chain.prob),
    ]
