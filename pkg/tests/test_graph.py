import pytest

from gatelock.bench import parse_bench
from gatelock.graph import (
    build_graph,
    longest_path_length,
    longest_path_subset,
    node_path_length,
    original_gate_id,
    unroll_once,
)
from gatelock.sim import SimVector, simulate

from util import enumerate_paths, random_netlist

# three gates between A and Y; B joins mid-chain so the second-longest path
# is also length 3
CHAIN3 = """\
INPUT(A)
INPUT(B)
OUTPUT(Y)
n1 = NOT(A)
n2 = OR(n1, B)
Y = NAND(n2, n1)
"""


def test_single_gate_graph():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)")
    g = build_graph(n)
    assert g.preds["y"] == ("a", "b")
    assert longest_path_length(g) == 1


def test_three_gate_chain_length():
    g = build_graph(parse_bench(CHAIN3))
    assert longest_path_length(g) == 3


def test_dff_edge_is_cut():
    n = parse_bench("INPUT(x)\nOUTPUT(w2)\nw1 = AND(x, w2)\nw2 = DFF(w1)")
    g = build_graph(n)
    assert ("w1", "w2") in g.dff_cut_edges
    assert "w2" in g.sources  # DFF output drives like a source
    assert g.preds["w1"] == ("x", "w2")


def test_subset_all_nodes_on_longest_paths():
    g = build_graph(parse_bench(CHAIN3))
    sub = longest_path_subset(g, key_length=1, multiplier=3)
    # both length-3 paths (via A and via B) cover all three gates
    assert set(sub.nodes) == {"n1", "n2", "Y"}
    assert sub.max_path_length == 3


def test_subset_buffer_chain():
    text = "INPUT(a)\nOUTPUT(b5)\n" + "\n".join(
        f"b{k} = BUF({'a' if k == 1 else f'b{k-1}'})" for k in range(1, 6))
    g = build_graph(parse_bench(text))
    sub = longest_path_subset(g, key_length=1, multiplier=3)
    assert sub.nodes == ("b1", "b2", "b3", "b4", "b5")
    assert sub.exhausted


def test_subset_insertion_order_and_threshold():
    n = random_netlist(3, n_gates=40, n_pis=6)
    g = build_graph(n)
    sub = longest_path_subset(g, key_length=3, multiplier=3)
    lengths = [node_path_length(g, gid) for gid in sub.nodes]
    assert lengths == sorted(lengths, reverse=True)
    if not sub.exhausted:
        assert len(sub.nodes) > 9
        # dropping the last whole length-class goes to or below the threshold
        shortest = lengths[-1]
        assert len([l for l in lengths if l > shortest]) <= 9


@pytest.mark.parametrize("seed", range(12))
def test_lengths_match_exhaustive_enumeration(seed):
    n = random_netlist(100 + seed, n_gates=16, n_pis=4, max_fanin=3,
                       dff_frac=0.2 if seed % 3 == 0 else 0.0)
    g = build_graph(n)
    paths = enumerate_paths(g)
    if not paths:
        with pytest.raises(ValueError):
            longest_path_subset(g, 1, 3)
        return
    assert longest_path_length(g) == max(len(p) for p in paths)
    best = {}
    for p in paths:
        for gid in p:
            best[gid] = max(best.get(gid, 0), len(p))
    for gid in g.gate_order:
        l = node_path_length(g, gid)
        if gid in best:
            assert l == best[gid]
        else:
            assert l == float("-inf")


def test_subset_monotone_in_multiplier():
    n = random_netlist(55, n_gates=80, n_pis=8)
    g = build_graph(n)
    prev = set()
    for m in range(1, 6):
        cur = set(longest_path_subset(g, key_length=4, multiplier=m).nodes)
        assert prev <= cur
        prev = cur


def test_no_path_errors():
    # the only gate dangles; no source-to-endpoint path exists
    n = parse_bench("INPUT(a)\nOUTPUT(a)\nw = NOT(a)")
    with pytest.raises(ValueError):
        longest_path_subset(build_graph(n), 1, 3)


def test_unroll_not_loop():
    n = parse_bench("OUTPUT(w1)\nw2 = DFF(w1)\nw1 = NOT(w2)")
    u = unroll_once(n)
    assert len(u.gates) == 2
    assert all(g.gate_type.value == "NOT" for g in u.gates)
    # frame-1 NOT reads the frame-0 NOT's output: two NOTs in series
    f0, f1 = u.gates
    assert f1.inputs == (f0.output,)
    assert "__pl_f0_w2" in u.primary_inputs  # initial state
    assert "w1" in u.primary_outputs  # next state wire


def test_unroll_combinational_identity_warns():
    n = parse_bench(CHAIN3)
    with pytest.warns(UserWarning):
        assert unroll_once(n) is n


def test_unroll_gate_count_doubles():
    n = random_netlist(9, n_gates=120, n_pis=10, dff_frac=0.2)
    u = unroll_once(n)
    comb = len(n.gates) - len(n.dffs)
    assert len(u.gates) == 2 * comb
    assert not u.is_sequential


def test_original_id_projection():
    assert original_gate_id("__pl_f0_g7") == "g7"
    assert original_gate_id("g7") == "g7"


@pytest.mark.parametrize("seed", range(5))
def test_unroll_matches_two_cycle_simulation(seed):
    import random
    n = random_netlist(200 + seed, n_gates=40, n_pis=5, dff_frac=0.25)
    if not n.is_sequential:
        pytest.skip("generator produced no DFFs")
    u = unroll_once(n)
    rng = random.Random(seed)
    for _ in range(10):
        x0 = {w: rng.getrandbits(1) for w in n.primary_inputs}
        x1 = {w: rng.getrandbits(1) for w in n.primary_inputs}
        s0 = {g.id: rng.getrandbits(1) for g in n.dffs}
        po1, s1 = simulate(n, SimVector(x0, state=s0))
        po2, s2 = simulate(n, SimVector(x1, state=s1))
        uassign = {f"__pl_f0_{w}": v for w, v in x0.items()}
        uassign.update({f"__pl_f0_{q}": v for q, v in s0.items()})
        uassign.update(x1)
        upo, _ = simulate(u, SimVector(uassign))
        for w in n.primary_outputs:
            assert upo[f"__pl_f0_{w}"] == po1[w]
        dff_by_q = {g.id: g for g in n.dffs}
        def f1(w):
            return f"__pl_f0_{dff_by_q[w].inputs[0]}" if w in dff_by_q else w
        for w in n.primary_outputs:
            assert upo[f1(w)] == po2[w]
        for q, g in dff_by_q.items():
            assert upo[f1(g.inputs[0]) if g.inputs[0] in dff_by_q else g.inputs[0]] == s2[q]
