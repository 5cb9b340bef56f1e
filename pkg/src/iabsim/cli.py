"""Command-line front end: config loading and validation, scenario presets,
multi-seed orchestration (optionally across worker processes) and output
management.

Precedence: built-in defaults < --config file < scenario preset < explicit
flags. One output subdirectory per (sweep point, algorithm, seed); a merged
summary per sweep point and algorithm is written at the end.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from concurrent.futures import ProcessPoolExecutor

from .config import ALGOS, ConfigError, RunConfig, scenario_runs, validate
from .engine import run_simulation
from .metrics import merge_summaries, write_outputs

THREADS_ENV = "SAFEHAUL_SIM_THREADS"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="iabsim",
        description="Slot-level simulator for risk-averse mmWave self-backhaul link selection",
    )
    parser.add_argument("--config", help="JSON config file mirroring RunConfig")
    parser.add_argument(
        "--scenario",
        choices=["1", "2", "3", "4", "full"],
        help="preset experiment (1 convergence, 2 network size, 3 donor count, 4 risk level)",
    )
    parser.add_argument("--algo", choices=list(ALGOS) + ["all"], help="algorithm to run")
    parser.add_argument("--seeds", type=int, help="run seeds 0..n-1")
    parser.add_argument("--slots", type=int, help="slots per run")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--validate-only", action="store_true", help="report config violations and exit"
    )
    return parser


def _worker(spec):
    """Execute one run and write its outputs; must stay picklable."""
    config_dict, seed, algo, out_dir = spec
    config = RunConfig.from_dict(config_dict)
    result = run_simulation(config, seed, algo=algo)
    write_outputs(result.summary, result.rows, Path(out_dir))
    if result.events is not None:
        with open(Path(out_dir) / "events.jsonl", "w") as fh:
            for event in result.events:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
    return out_dir, len(result.violations), result.summary


def expand_runs(args, base_config):
    """(config, seed, algo, subdir) for every requested run."""
    base = base_config.to_dict()
    if args.slots is not None:
        base["slots"] = args.slots
    seeds = list(base_config.seeds)
    if args.seeds is not None:
        seeds = list(range(args.seeds))
    base["seeds"] = seeds

    if args.scenario is not None:
        scenario = args.scenario if args.scenario == "full" else int(args.scenario)
        points = scenario_runs(scenario, base)
    else:
        points = [("run", base, [base["algo"]])]

    runs = []
    for label, overrides, preset_algos in points:
        algos = preset_algos
        if args.algo and args.algo != "all":
            algos = [args.algo]
        elif args.algo == "all":
            algos = list(ALGOS)
        for algo in algos:
            for seed in seeds:
                cfg = dict(overrides)
                cfg["algo"] = algo
                runs.append((label, cfg, algo, seed))
    return runs


def main(argv=None):
    args = build_parser().parse_args(argv)

    try:
        base_config = RunConfig.from_file(args.config) if args.config else RunConfig()
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 2

    violations = validate(base_config)
    if args.validate_only:
        if violations:
            for v in violations:
                print(f"violation: {v}")
            return 2
        print("config ok")
        return 0
    if violations:
        for v in violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2

    runs = expand_runs(args, base_config)
    out_root = Path(args.out)
    specs = []
    for label, cfg_dict, algo, seed in runs:
        sub = out_root / f"{label}_{algo}_seed{seed}"
        specs.append((cfg_dict, seed, algo, str(sub)))

    # every run config must validate before anything executes
    bad = []
    for cfg_dict, seed, algo, sub in specs:
        errs = validate(RunConfig.from_dict(cfg_dict))
        bad.extend(f"{sub}: {e}" for e in errs)
    if bad:
        for b in bad:
            print(f"config error: {b}", file=sys.stderr)
        return 2

    workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    failures = 0
    summaries = {}
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_worker, specs))
    else:
        outcomes = [_worker(s) for s in specs]
    for (cfg_dict, seed, algo, sub), (out_dir, n_viol, summary) in zip(specs, outcomes):
        label = Path(out_dir).name.rsplit("_seed", 1)[0]
        summaries.setdefault(label, []).append(summary)
        status = "ok" if n_viol == 0 else f"{n_viol} invariant violations"
        print(f"{out_dir}: {status}")
        if n_viol:
            failures += 1

    for label, group in sorted(summaries.items()):
        merged = merge_summaries(group)
        path = out_root / f"merged_{label}.json"
        with open(path, "w") as fh:
            json.dump(merged, fh, indent=2, sort_keys=True)
            fh.write("\n")

    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
