"""Command-line driver: lock / analyze / verify / attack / report."""

import argparse
import csv
import os
import sys
import tempfile
from pathlib import Path

from .bench import BenchError, count_nodes, parse_bench, write_bench
from .graph import build_graph, longest_path_length
from .pipeline import (
    LockConfig,
    PipelineError,
    REPORT_COLUMNS,
    lock,
    report_row,
)
from .probability import read_input_probs
from .sim import brute_force_key, check_equivalence
from .timing import DelayModel, analyze_timing

ATTACK_KEY_CAP = 20


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _bench_files(paths):
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.bench")))
        else:
            files.append(p)
    return files


def _load(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    return parse_bench(path.read_text(), name=path.stem.removesuffix("_locked"))


def _config_from(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("GATELOCK_SEED", "0"))
    return LockConfig(
        key_length=args.key_length,
        lp_multiplier=args.lp_multiplier,
        cp_mode=args.cp_mode,
        ld_threshold=args.ld_threshold,
        dff_iters=args.dff_iters,
        rng_seed=seed,
        cp_cap=args.cp_cap,
    )


def _model_from(args):
    if args.delay_table:
        return DelayModel.from_file(args.delay_table)
    return DelayModel.unit()


def _input_prob_from(args):
    if args.input_prob_file:
        return read_input_probs(args.input_prob_file)
    return None


def _add_lock_flags(p):
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $GATELOCK_SEED or 0)")
    p.add_argument("--key-length", type=int, default=None)
    p.add_argument("--lp-multiplier", type=int, default=3)
    p.add_argument("--cp-mode", choices=("strict_paper", "slack_aware"),
                   default="strict_paper")
    p.add_argument("--ld-threshold", type=float, default=0.5)
    p.add_argument("--dff-iters", type=int, default=3)
    p.add_argument("--cp-cap", type=int, default=100)
    p.add_argument("--delay-table", default=None,
                   help="file of 'GATETYPE <delay>' lines")
    p.add_argument("--input-prob-file", default=None,
                   help="file of '<pi-name> <prob>' lines")


def cmd_lock(args):
    config = _config_from(args)
    model = _model_from(args)
    input_prob = _input_prob_from(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = []
    for path in _bench_files(args.inputs):
        try:
            netlist = _load(path)
            result = lock(netlist, config, model, input_prob)
            _atomic_write(out_dir / f"{netlist.name}_locked.bench",
                          write_bench(result.locked))
            timing = analyze_timing(build_graph(netlist), model, config.cp_cap)
            row = report_row(result.chain, timing)
            import io
            buf = io.StringIO()
            w = csv.writer(buf)
            w.writerow(REPORT_COLUMNS)
            w.writerow(row)
            _atomic_write(out_dir / f"{netlist.name}_chain.csv", buf.getvalue())
            print(f"{path}: locked with {len(result.key)} key bits "
                  f"-> {netlist.name}_locked.bench")
        except (BenchError, PipelineError, FileNotFoundError, OSError,
                ValueError) as exc:
            failures.append((path, exc))
            print(f"{path}: FAILED: {exc}", file=sys.stderr)
    if failures:
        print(f"{len(failures)} file(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_analyze(args):
    config = _config_from(args)
    model = _model_from(args)
    input_prob = _input_prob_from(args)
    failures = []
    for path in _bench_files(args.inputs):
        try:
            netlist = _load(path)
            from .pipeline import run_chain
            chain = run_chain(netlist, config, model, input_prob)
            graph = build_graph(netlist)
            timing = analyze_timing(graph, model, config.cp_cap)
            print(f"{netlist.name}: nodes={count_nodes(netlist)} "
                  f"key={chain.key_length} lp_len={chain.lp_length} "
                  f"critical_delay={timing.critical_delay:g} "
                  f"cp_count={timing.critical_path_count}")
            print(f"  chain: LP={len(chain.lp)} NCP={len(chain.ncp)} "
                  f"LD={len(chain.ld)} Prob={len(chain.prob)} "
                  f"selected={len(chain.selected)}")
            if chain.relaxations:
                print("  relaxations: " + ", ".join(chain.relaxations))
            print("  selected: " + " ".join(chain.selected))
        except (BenchError, PipelineError, FileNotFoundError, OSError,
                ValueError) as exc:
            failures.append((path, exc))
            print(f"{path}: FAILED: {exc}", file=sys.stderr)
    return 1 if failures else 0


def cmd_verify(args):
    try:
        original = _load(args.original)
        locked = _load(args.locked)
        report = check_equivalence(original, locked, budget=args.budget,
                                   seed=args.seed or 0,
                                   delay_model=_model_from(args))
    except (BenchError, FileNotFoundError, ValueError) as exc:
        print(f"verify FAILED: {exc}", file=sys.stderr)
        return 1
    print(f"equivalent={str(report.equivalent).lower()} "
          f"regime={report.regime} vectors={report.vectors_tested}")
    print(f"wrong_key_mismatch_rate={report.wrong_key_mismatch_rate:.4f} "
          f"(single-bit flips: {report.single_bit_flip_rate:.4f}, "
          f"{report.wrong_keys_tested} wrong keys)")
    print(f"overhead_pct={report.overhead_pct:.2f} "
          f"critical_delay_delta={report.critical_delay_delta:g}")
    return 0 if report.equivalent else 1


def cmd_attack(args):
    try:
        original = _load(args.original)
        locked = _load(args.locked)
        n_keys = len(locked.key_inputs)
        if n_keys > args.max_key_bits:
            print(f"attack refused: {n_keys}-bit key exceeds the brute-force "
                  f"cap of {args.max_key_bits} bits; this tool only supports "
                  "desk-scale key recovery", file=sys.stderr)
            return 1
        keys = brute_force_key(original, locked, max_key_bits=args.max_key_bits,
                               seed=args.seed or 0, budget=args.budget)
    except (BenchError, FileNotFoundError, ValueError) as exc:
        print(f"attack FAILED: {exc}", file=sys.stderr)
        return 1
    print(f"correct keys found: {len(keys)}")
    for k in keys:
        print(k)
    return 0


def cmd_report(args):
    rows = []
    for path in sorted(Path(args.directory).glob("*_chain.csv")):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(REPORT_COLUMNS):
                print(f"{path}: unexpected columns, skipped", file=sys.stderr)
                continue
            rows.extend(reader)
    import io
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(REPORT_COLUMNS)
    w.writerows(rows)
    if args.output:
        _atomic_write(args.output, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gatelock",
        description="Probability-guided key-gate insertion for bench netlists")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lock", help="lock bench files (or directories of them)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out-dir", default=".")
    _add_lock_flags(p)
    p.set_defaults(fn=cmd_lock)

    p = sub.add_parser("analyze", help="print the constraint chain, no locking")
    p.add_argument("inputs", nargs="+")
    _add_lock_flags(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("verify", help="check a locked netlist against its original")
    p.add_argument("original")
    p.add_argument("locked")
    p.add_argument("--budget", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--delay-table", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("attack", help="desk-scale brute-force key recovery")
    p.add_argument("original")
    p.add_argument("locked")
    p.add_argument("--budget", type=int, default=1024)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-key-bits", type=int, default=ATTACK_KEY_CAP)
    p.set_defaults(fn=cmd_attack)

    p = sub.add_parser("report", help="aggregate *_chain.csv rows into one table")
    p.add_argument("directory")
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
