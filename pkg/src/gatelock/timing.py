"""Static timing: arrival/slack under a per-gate-type delay model."""

from dataclasses import dataclass, field

from .bench import GateType

_EPS = 1e-9


@dataclass(frozen=True)
class DelayModel:
    """Per-gate-type delay table. DFF delay is the clk-to-Q source offset."""

    delays: dict = field(default_factory=dict)

    def delay(self, gate_type):
        return self.delays.get(gate_type, 1.0 if gate_type is not GateType.DFF else 0.0)

    @property
    def key_gate_delay(self):
        # key gates are XOR/XNOR; use the slower of the two for guarantees
        return max(self.delay(GateType.XOR), self.delay(GateType.XNOR))

    @classmethod
    def unit(cls):
        return cls()

    @classmethod
    def from_file(cls, path):
        """Delay table file: lines 'GATETYPE <delay>', '#' comments."""
        delays = {}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'GATETYPE <delay>'")
                try:
                    gt = GateType[parts[0].upper()]
                except KeyError:
                    raise ValueError(f"{path}:{lineno}: unknown gate type {parts[0]}")
                d = float(parts[1])
                if d < 0:
                    raise ValueError(f"{path}:{lineno}: negative delay")
                delays[gt] = d
        return cls(delays=delays)


@dataclass
class TimingReport:
    arrival: dict  # node -> max delay from any source
    slack: dict  # node -> required - arrival (inf if node reaches no endpoint)
    critical_delay: float
    critical_nodes: frozenset  # slack == 0
    critical_path_count: int  # distinct zero-slack source->endpoint paths, capped
    cp_cap: int


def analyze_timing(graph, model=None, cp_cap=100, extra_node_delay=None):
    """Forward/backward pass over the DFF-cut DAG.

    Sources (PIs, key inputs, DFF outputs) launch at t=0 (DFFs at their
    clk-to-Q delay); endpoints are PO wires and DFF D-inputs. extra_node_delay
    maps gate id -> added delay, used to model already-inserted key gates.
    """
    model = model or DelayModel.unit()
    extra = extra_node_delay or {}
    nl = graph.netlist
    drivers = nl.driver_map()

    def node_delay(gid):
        return model.delay(drivers[gid].gate_type) + extra.get(gid, 0.0)

    arrival = {}
    dff_t = model.delay(GateType.DFF)
    for s in graph.sources:
        arrival[s] = dff_t if s in drivers else 0.0
    for gid in graph.gate_order:
        arrival[gid] = max(arrival[p] for p in graph.preds[gid]) + node_delay(gid)

    endpoints = list(nl.primary_outputs) + [u for u, _ in graph.dff_cut_edges]
    critical_delay = max((arrival[w] for w in endpoints), default=0.0)

    inf = float("inf")
    required = {n: inf for n in arrival}
    for w in endpoints:
        required[w] = min(required[w], critical_delay)
    for gid in reversed(graph.gate_order):
        r = required[gid] - node_delay(gid)
        for p in graph.preds[gid]:
            if r < required[p]:
                required[p] = r

    slack = {n: required[n] - arrival[n] for n in arrival}
    critical = frozenset(n for n, s in slack.items() if s <= _EPS)

    # distinct zero-slack paths, counted by DP over tight edges, saturating
    count = {}
    for s in graph.sources:
        count[s] = 1 if s in critical else 0
    for gid in graph.gate_order:
        c = 0
        if gid in critical:
            d = node_delay(gid)
            for p in graph.preds[gid]:
                if p in critical and abs(arrival[p] + d - arrival[gid]) <= _EPS:
                    c += count[p]
            c = min(c, cp_cap)
        count[gid] = c
    total = 0
    for w in endpoints:
        if abs(arrival[w] - critical_delay) <= _EPS:
            total += count[w]
    total = min(total, cp_cap)

    return TimingReport(
        arrival=arrival,
        slack=slack,
        critical_delay=critical_delay,
        critical_nodes=critical,
        critical_path_count=total,
        cp_cap=cp_cap,
    )


def remove_critical(subset, report, mode="strict_paper", key_gate_delay=1.0):
    """Drop timing-endangered nodes from a candidate subset, order preserved.

    strict_paper: remove exactly the zero-slack (critical) nodes.
    slack_aware: remove every node whose slack is below key_gate_delay, which
    guarantees a single key-gate insertion cannot stretch the critical delay.
    """
    if mode == "strict_paper":
        return [n for n in subset if n not in report.critical_nodes]
    if mode == "slack_aware":
        return [n for n in subset
                if report.slack.get(n, float("inf")) >= key_gate_delay - _EPS]
    raise ValueError(f"unknown mode '{mode}'")
