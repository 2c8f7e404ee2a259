"""Levelized logic simulation, equivalence checking, and key brute-forcing.

All batch work runs 64 vectors per machine word through the kernels module;
single-vector simulate() is a one-word special case of the same path.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bench import GateType
from .graph import build_graph
from .program import compile_program
from .timing import DelayModel, analyze_timing

_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass
class SimVector:
    assignment: dict  # PI name -> 0/1
    key_assignment: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)  # DFF id -> 0/1


@dataclass
class VerificationReport:
    equivalent: bool
    vectors_tested: int
    regime: str  # "exhaustive" or "random"
    wrong_key_mismatch_rate: float
    overhead_pct: float
    critical_delay_delta: float
    wrong_keys_tested: int = 0
    single_bit_flip_rate: float = 0.0


def _pack_bits(bits):
    """Bool/0-1 array -> little-bit-order uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits)
    n_words = max(1, -(-n // 64))
    padded = np.zeros(n_words * 64, dtype=np.uint8)
    padded[:n] = bits
    return np.packbits(padded, bitorder="little").view("<u8")


def _tail_mask(n_vectors, n_words):
    mask = np.full(n_words, _ONES, dtype=np.uint64)
    rem = n_vectors % 64
    if rem:
        mask[-1] = np.uint64((1 << rem) - 1)
    return mask


def _exhaustive_pi_words(n_pi):
    n_vec = 1 << n_pi
    n_words = max(1, n_vec // 64)
    rows = np.empty((n_pi, n_words), dtype=np.uint64)
    v = np.arange(n_vec, dtype=np.uint64)
    for j in range(n_pi):
        rows[j] = _pack_bits((v >> np.uint64(j)) & np.uint64(1))
    return rows, n_vec, n_words


def _random_words(rng, shape):
    return rng.integers(0, 1 << 64, size=shape, dtype=np.uint64)


def _run(program, values):
    kernels.sim_pass(program.ops, program.in_off, program.in_idx,
                     program.out_idx, values)


def _key_rows_from_bits(program, key_bits, n_words):
    rows = np.zeros((len(key_bits), n_words), dtype=np.uint64)
    for i, b in enumerate(key_bits):
        if int(b):
            rows[i] = _ONES
    return rows


def simulate(netlist, vector, program=None):
    """Evaluate one vector; returns (po_map, next_state_map)."""
    program = program or compile_program(netlist)
    values = np.zeros((program.n_wires, 1), dtype=np.uint64)
    try:
        for i, w in enumerate(netlist.primary_inputs):
            values[program.pi_rows[i], 0] = _ONES * np.uint64(vector.assignment[w])
        for i, w in enumerate(netlist.key_inputs):
            values[program.key_rows[i], 0] = _ONES * np.uint64(vector.key_assignment[w])
        for i, gid in enumerate(program.dff_ids):
            values[program.dff_q[i], 0] = _ONES * np.uint64(vector.state[gid])
    except KeyError as exc:
        raise ValueError(f"missing assignment for {exc.args[0]!r}") from None
    _run(program, values)
    pos = {w: int(values[program.po_rows[i], 0] & np.uint64(1))
           for i, w in enumerate(netlist.primary_outputs)}
    nxt = {gid: int(values[program.dff_d[i], 0] & np.uint64(1))
           for i, gid in enumerate(program.dff_ids)}
    return pos, nxt


def naive_simulate(netlist, vector):
    """Independent recursive evaluator used as the oracle for the fast path."""
    drivers = netlist.driver_map()
    memo = {}
    for w in netlist.primary_inputs:
        memo[w] = int(vector.assignment[w])
    for w in netlist.key_inputs:
        memo[w] = int(vector.key_assignment[w])
    for g in netlist.gates:
        if g.gate_type is GateType.DFF:
            memo[g.output] = int(vector.state[g.id])

    def ev(w):
        if w in memo:
            return memo[w]
        g = drivers[w]
        vals = [ev(x) for x in g.inputs]
        t = g.gate_type
        if t in (GateType.AND, GateType.NAND):
            r = int(all(vals))
            r = 1 - r if t is GateType.NAND else r
        elif t in (GateType.OR, GateType.NOR):
            r = int(any(vals))
            r = 1 - r if t is GateType.NOR else r
        elif t in (GateType.XOR, GateType.XNOR):
            r = sum(vals) & 1
            r = 1 - r if t is GateType.XNOR else r
        elif t is GateType.BUF:
            r = vals[0]
        else:
            r = 1 - vals[0]
        memo[w] = r
        return r

    pos = {w: ev(w) for w in netlist.primary_outputs}
    nxt = {g.id: ev(g.inputs[0]) for g in netlist.gates if g.gate_type is GateType.DFF}
    return pos, nxt


def _comb_po_words(netlist, program, pi_words, key_bits, n_words):
    values = np.zeros((program.n_wires, n_words), dtype=np.uint64)
    values[program.pi_rows] = pi_words
    if len(program.key_rows):
        values[program.key_rows] = _key_rows_from_bits(program, key_bits, n_words)
    _run(program, values)
    return values[program.po_rows].copy()


def _seq_po_trace(netlist, program, pi_cycles, state0, key_bits, n_words):
    """Lockstep stepping: pi_cycles is (cycles, n_pi, n_words); returns the
    concatenated PO words per cycle."""
    values = np.zeros((program.n_wires, n_words), dtype=np.uint64)
    if len(program.key_rows):
        values[program.key_rows] = _key_rows_from_bits(program, key_bits, n_words)
    state = state0
    trace = []
    for pi_words in pi_cycles:
        values[program.pi_rows] = pi_words
        if len(program.dff_q):
            values[program.dff_q] = state
        _run(program, values)
        trace.append(values[program.po_rows].copy())
        if len(program.dff_q):
            state = values[program.dff_d].copy()
    return trace


def _differs(a_trace, b_trace, mask):
    for a, b in zip(a_trace, b_trace):
        if np.any((a ^ b) & mask):
            return True
    return False


def _wrong_keys(correct_bits, n_random, rng):
    """All single-bit flips, then random wrong keys; bitstrings, deduped."""
    k = len(correct_bits)
    flips = []
    for i in range(k):
        b = list(correct_bits)
        b[i] = "1" if b[i] == "0" else "0"
        flips.append("".join(b))
    seen = set(flips) | {correct_bits}
    randoms = []
    limit = (1 << k) - 1 if k < 30 else None
    while len(randoms) < n_random:
        if limit is not None and len(seen) > limit:
            break
        cand = "".join(rng.choice(("0", "1")) for _ in range(k))
        if cand in seen:
            continue
        seen.add(cand)
        randoms.append(cand)
    return flips, randoms


def check_equivalence(original, locked, key=None, budget=10000, seed=0,
                      delay_model=None, sequence_length=20, cp_cap=100):
    """Compare original vs locked-with-correct-key, then sample wrong keys.

    Combinational circuits with <= 16 PIs are checked exhaustively; larger or
    sequential ones with seeded random vectors (depth-`sequence_length`
    lockstep episodes for sequential). Also reports gate overhead and the
    critical-delay delta under the given delay model.
    """
    if hasattr(locked, "locked"):  # a LockingResult
        key = locked.key
        locked = locked.locked
    if key is None:
        if locked.key_metadata is None:
            raise ValueError("no key: pass key= or a locked netlist with metadata")
        key = locked.key_metadata.key
    if set(original.primary_inputs) != set(locked.primary_inputs):
        raise ValueError("primary input interfaces differ")
    if len(original.primary_outputs) != len(locked.primary_outputs):
        raise ValueError("primary output counts differ")
    if len(key) != len(locked.key_inputs):
        raise ValueError("key length does not match key inputs")

    rng = np.random.default_rng(seed)
    import random as _random
    pyrng = _random.Random(seed)

    p_orig = compile_program(original)
    p_lock = compile_program(locked)
    n_pi = len(original.primary_inputs)
    sequential = original.is_sequential or locked.is_sequential

    # locked PIs may be ordered differently; index locked rows by name
    lock_pi_rows = np.asarray(
        [p_lock.wire_index[w] for w in original.primary_inputs], dtype=np.int64)
    p_lock_view = p_lock
    # re-point pi_rows so both programs take the same (n_pi, n_words) block
    p_lock_view.pi_rows = lock_pi_rows

    flips, randoms = _wrong_keys(key, budget // 10, pyrng)

    if not sequential:
        if n_pi <= 16:
            pi_words, n_vec, n_words = _exhaustive_pi_words(n_pi)
            regime = "exhaustive"
        else:
            n_vec = budget
            n_words = -(-n_vec // 64)
            pi_words = _random_words(rng, (n_pi, n_words))
            regime = "random"
        mask = _tail_mask(n_vec, n_words)
        ref = _comb_po_words(original, p_orig, pi_words, "", n_words)
        got = _comb_po_words(locked, p_lock, pi_words, key, n_words)
        equivalent = not _differs([ref], [got], mask)

        def wrong_hits(keys):
            return sum(
                _differs([ref], [_comb_po_words(locked, p_lock, pi_words, kb, n_words)],
                         mask)
                for kb in keys)
    else:
        episodes = max(64, budget // sequence_length)
        n_words = -(-episodes // 64)
        n_vec = episodes * sequence_length
        mask = _tail_mask(episodes, n_words)
        regime = "random"
        pi_cycles = [_random_words(rng, (n_pi, n_words))
                     for _ in range(sequence_length)]
        state_by_id = {gid: _random_words(rng, (n_words,))
                       for gid in set(p_orig.dff_ids) | set(p_lock.dff_ids)}

        def run_one(netlist, program, key_bits):
            state0 = (np.stack([state_by_id[g] for g in program.dff_ids])
                      if program.dff_ids else np.zeros((0, n_words), dtype=np.uint64))
            return _seq_po_trace(netlist, program, pi_cycles, state0, key_bits, n_words)

        ref = run_one(original, p_orig, "")
        got = run_one(locked, p_lock, key)
        equivalent = not _differs(ref, got, mask)

        def wrong_hits(keys):
            return sum(_differs(ref, run_one(locked, p_lock, kb), mask) for kb in keys)

    flip_hits = wrong_hits(flips)
    rand_hits = wrong_hits(randoms)
    tested = len(flips) + len(randoms)
    rate = (flip_hits + rand_hits) / tested if tested else 0.0

    model = delay_model or DelayModel.unit()
    t_orig = analyze_timing(build_graph(original), model, cp_cap)
    t_lock = analyze_timing(build_graph(locked), model, cp_cap)

    return VerificationReport(
        equivalent=bool(equivalent),
        vectors_tested=int(n_vec),
        regime=regime,
        wrong_key_mismatch_rate=float(rate),
        overhead_pct=100.0 * len(locked.key_inputs) / max(1, len(original.gates)),
        critical_delay_delta=float(t_lock.critical_delay - t_orig.critical_delay),
        wrong_keys_tested=tested,
        single_bit_flip_rate=(flip_hits / len(flips)) if flips else 0.0,
    )


def brute_force_key(original, locked, max_key_bits=20, seed=0, budget=1024,
                    sequence_length=20):
    """Enumerate all keys; return those matching the oracle on the input set.

    Exhaustive over inputs when the original has <= 16 PIs, sampled otherwise.
    Desk-scale by design: refuses keys longer than max_key_bits.
    """
    k = len(locked.key_inputs)
    if k > max_key_bits:
        raise ValueError(f"key of {k} bits exceeds brute-force cap {max_key_bits}")
    if set(original.primary_inputs) != set(locked.primary_inputs):
        raise ValueError("primary input interfaces differ")

    rng = np.random.default_rng(seed)
    p_orig = compile_program(original)
    p_lock = compile_program(locked)
    p_lock.pi_rows = np.asarray(
        [p_lock.wire_index[w] for w in original.primary_inputs], dtype=np.int64)
    n_pi = len(original.primary_inputs)
    sequential = original.is_sequential or locked.is_sequential

    keys = []
    if not sequential:
        if n_pi <= 16:
            pi_words, n_vec, n_words = _exhaustive_pi_words(n_pi)
        else:
            n_vec = budget
            n_words = -(-n_vec // 64)
            pi_words = _random_words(rng, (n_pi, n_words))
        mask = _tail_mask(n_vec, n_words)
        ref = _comb_po_words(original, p_orig, pi_words, "", n_words)
        for key_int in range(1 << k):
            kb = "".join("1" if (key_int >> i) & 1 else "0" for i in range(k))
            got = _comb_po_words(locked, p_lock, pi_words, kb, n_words)
            if not _differs([ref], [got], mask):
                keys.append(kb)
    else:
        episodes = max(64, budget // sequence_length)
        n_words = -(-episodes // 64)
        mask = _tail_mask(episodes, n_words)
        pi_cycles = [_random_words(rng, (n_pi, n_words))
                     for _ in range(sequence_length)]
        state_by_id = {gid: _random_words(rng, (n_words,))
                       for gid in set(p_orig.dff_ids) | set(p_lock.dff_ids)}

        def run_one(netlist, program, key_bits):
            state0 = (np.stack([state_by_id[g] for g in program.dff_ids])
                      if program.dff_ids else np.zeros((0, n_words), dtype=np.uint64))
            return _seq_po_trace(netlist, program, pi_cycles, state0, key_bits, n_words)

        ref = run_one(original, p_orig, "")
        for key_int in range(1 << k):
            kb = "".join("1" if (key_int >> i) & 1 else "0" for i in range(k))
            if not _differs(ref, run_one(locked, p_lock, kb), mask):
                keys.append(kb)
    return keys
