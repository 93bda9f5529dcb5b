"""``interbench`` command line: run experiments, generate scenario data, check gradients."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import simgen
from .bench import load_config, render_report, run_experiment
from .errors import InterbenchError
from .gradcheck import run_suite
from .interval import save_csv

GRADCHECK_TOLERANCE = 1e-5


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interbench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a replicated experiment from a config file")
    run.add_argument("--config", required=True, help="key = value experiment config")
    run.add_argument("--out", help="write the report here instead of the config's output_path / stdout")
    run.add_argument("--format", choices=("csv", "markdown"), help="override output_format")
    run.add_argument("--seed", type=_u64, help="override master_seed")

    gen = sub.add_parser("gen", help="write a synthetic scenario dataset as CSV")
    gen.add_argument("--scenario", type=int, choices=(1, 2), required=True)
    gen.add_argument("--n", type=int, default=300)
    gen.add_argument("--seed", type=_u64, default=0)
    gen.add_argument("--out", required=True)

    gc = sub.add_parser("gradcheck", help="finite-difference check of the network gradients")
    gc.add_argument("--cases", type=int, default=27)
    gc.add_argument("--seed", type=_u64, default=0)
    gc.add_argument("--eps", type=float, default=1e-5)
    return parser


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.format:
        overrides["output_format"] = args.format
    if args.out:
        overrides["output_path"] = args.out
    cfg = replace(cfg, **overrides)
    report = run_experiment(cfg)
    text = render_report(report, cfg.output_format)
    if cfg.output_path:
        out = Path(cfg.output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logging.info("wrote %s (%.1fs)", out, report.wall_time)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    data = simgen.generate(args.scenario, args.n, args.seed)
    save_csv(data, args.out)
    logging.info("wrote %d rows to %s", data.n_samples, args.out)
    return 0


def cmd_gradcheck(args) -> int:
    start = time.perf_counter()
    cases = run_suite(args.cases, args.seed, args.eps)
    for c in cases:
        print(f"p={c.p} J={c.hidden_units} N={c.n_rows} lambda={c.lam:g} crossing={c.crossing:<5} "
              f"crossed={c.crossed_rows} max_rel_error={c.max_rel_error:.3e}")
    worst = max(c.max_rel_error for c in cases)
    ok = worst < GRADCHECK_TOLERANCE
    print(f"max relative error over {len(cases)} cases: {worst:.3e} "
          f"({'ok' if ok else 'FAIL'}, tolerance {GRADCHECK_TOLERANCE:g}, {time.perf_counter() - start:.2f}s)")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"run": cmd_run, "gen": cmd_gen, "gradcheck": cmd_gradcheck}[args.command]
    try:
        return handler(args)
    except (InterbenchError, OSError, ValueError) as exc:
        print(f"interbench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
