import random
from itertools import product

import pytest

from gatelock.bench import parse_bench
from gatelock.pipeline import insert_key_gates
from gatelock.sim import (
    SimVector,
    brute_force_key,
    check_equivalence,
    naive_simulate,
    simulate,
)

from util import random_netlist

TINY = "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)"


def test_nand_truth():
    n = parse_bench(TINY)
    assert simulate(n, SimVector({"a": 1, "b": 1}))[0] == {"y": 0}
    assert simulate(n, SimVector({"a": 0, "b": 1}))[0] == {"y": 1}


def test_missing_assignment_errors():
    n = parse_bench(TINY)
    with pytest.raises(ValueError, match="missing assignment"):
        simulate(n, SimVector({"a": 1}))


@pytest.mark.parametrize("seed", range(40))
def test_matches_naive_evaluator(seed):
    n = random_netlist(1000 + seed, n_gates=30, n_pis=6,
                       dff_frac=0.2 if seed % 2 else 0.0)
    rng = random.Random(seed)
    for _ in range(25):
        vec = SimVector(
            assignment={w: rng.getrandbits(1) for w in n.primary_inputs},
            state={g.id: rng.getrandbits(1) for g in n.dffs},
        )
        assert simulate(n, vec) == naive_simulate(n, vec)


def test_locked_transparent_with_correct_key():
    n = parse_bench(TINY)
    res = insert_key_gates(n, ["y"], rng_seed=0)
    ki = res.locked.key_inputs[0]
    for a, b in product((0, 1), repeat=2):
        ref, _ = simulate(n, SimVector({"a": a, "b": b}))
        got, _ = simulate(res.locked,
                          SimVector({"a": a, "b": b}, {ki: int(res.key[0])}))
        assert got[res.locked.primary_outputs[0]] == ref["y"]


def test_locked_inverts_with_wrong_key():
    n = parse_bench(TINY)
    res = insert_key_gates(n, ["y"], rng_seed=0)
    ki = res.locked.key_inputs[0]
    wrong = 1 - int(res.key[0])
    for a, b in product((0, 1), repeat=2):
        ref, _ = simulate(n, SimVector({"a": a, "b": b}))
        got, _ = simulate(res.locked, SimVector({"a": a, "b": b}, {ki: wrong}))
        assert got[res.locked.primary_outputs[0]] == 1 - ref["y"]


def test_check_equivalence_exhaustive_small():
    n = random_netlist(2000, n_gates=40, n_pis=8)
    res = insert_key_gates(n, [n.gates[10].id, n.gates[30].id], rng_seed=4)
    rep = check_equivalence(n, res)
    assert rep.equivalent
    assert rep.regime == "exhaustive"
    assert rep.vectors_tested == 256
    assert rep.overhead_pct == pytest.approx(100 * 2 / 40)


def test_check_equivalence_random_regime_for_wide_circuits():
    n = random_netlist(2001, n_gates=80, n_pis=20)
    res = insert_key_gates(n, [n.gates[50].id], rng_seed=4)
    rep = check_equivalence(n, res, budget=3000)
    assert rep.equivalent
    assert rep.regime == "random"
    assert rep.vectors_tested == 3000


def test_check_equivalence_detects_wrong_function():
    n = parse_bench(TINY)
    broken = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)")
    rep = check_equivalence(n, broken, key="")
    assert not rep.equivalent


def test_check_equivalence_interface_mismatch():
    n = parse_bench(TINY)
    other = parse_bench("INPUT(a)\nINPUT(c)\nOUTPUT(y)\ny = NAND(a, c)")
    with pytest.raises(ValueError):
        check_equivalence(n, other, key="")


def test_sequential_lockstep_equivalence():
    n = random_netlist(2002, n_gates=60, n_pis=5, dff_frac=0.25)
    assert n.is_sequential
    comb = [g.id for g in n.gates if g.gate_type.value != "DFF"]
    res = insert_key_gates(n, comb[5:8], rng_seed=9)
    rep = check_equivalence(n, res, budget=2000)
    assert rep.equivalent and rep.regime == "random"


def test_brute_force_single_key_gate():
    n = parse_bench(TINY)
    res = insert_key_gates(n, ["y"], rng_seed=0)
    assert brute_force_key(n, res.locked) == [res.key]


def test_brute_force_two_independent_key_gates():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(u)\nOUTPUT(v)\n"
                    "u = NOT(a)\nv = BUF(b)")
    res = insert_key_gates(n, ["u", "v"], rng_seed=2)
    keys = brute_force_key(n, res.locked)
    assert keys == [res.key]  # exactly 1 correct key among 4


def test_brute_force_respects_key_cap():
    n = random_netlist(2003, n_gates=40, n_pis=6)
    res = insert_key_gates(n, [g.id for g in n.gates[:21]], rng_seed=1)
    with pytest.raises(ValueError, match="exceeds"):
        brute_force_key(n, res.locked, max_key_bits=20)


def test_single_bit_flips_all_detected_exhaustively():
    n = random_netlist(2004, n_gates=35, n_pis=8)
    # tap primary-output drivers: always observable
    targets = list(n.primary_outputs[:3])
    res = insert_key_gates(n, targets, rng_seed=7)
    rep = check_equivalence(n, res)
    assert rep.regime == "exhaustive"
    assert rep.single_bit_flip_rate == 1.0
