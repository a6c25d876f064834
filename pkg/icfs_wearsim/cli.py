import argparse
import logging
import os
import sys

import yaml

from .exceptions import ConfigurationError, ResultsError, TraceError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_IO = 3

logger = logging.getLogger(__name__)


def _split(value, cast, key):
    if value is None:
        return None
    try:
        return [cast(v.strip()) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"Could not parse --{key} value {value!r}", key=key)


def _single(value, cast, key):
    values = _split(value, cast, key)
    if values is None:
        return None
    if len(values) != 1:
        raise ConfigurationError(f"'run' takes exactly one value for --{key}, got {value!r}", key=key)
    return values[0]


def _read_config(path, fallback):
    from .api import load_config_from_yaml
    if path:
        return load_config_from_yaml(path)
    if os.path.exists(fallback):
        return load_config_from_yaml(fallback)
    return {}


def cmd_run(args) -> int:
    from .api import build_config, run_simulation
    raw = _read_config(args.config, "sim.yml")
    overrides = {
        "pfr": _single(args.pfr, float, "pfr"),
        "cf": _single(args.cf, int, "cf"),
        "policy": _single(args.policy, str, "policy"),
        "seed": args.seed,
        "op_budget": args.op_budget,
        "force_buffer_active": True if args.force_buffer_active else None,
        "record_events": True if args.record_events else None,
    }
    config = build_config(raw, overrides)
    run_simulation(
        config,
        out_dir=args.out or raw.get("output_dir"),
        replay=args.replay,
        record_trace=args.record_trace,
        silent=bool(raw.get("silent")),
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .api import build_sweep_spec, default_output_dir, run_sweep
    raw = _read_config(args.config, "sweep.yml")
    base = dict(raw.get("base") or {})
    if args.op_budget is not None:
        base["op_budget"] = args.op_budget
    if args.force_buffer_active:
        base["force_buffer_active"] = True
    overrides = {
        "pfr_list": _split(args.pfr, float, "pfr"),
        "cf_list": _split(args.cf, int, "cf"),
        "policies": _split(args.policy, str, "policy"),
        "replicates": args.replicates,
        "base_seed": args.seed,
        "jobs": args.jobs,
        "base": base,
    }
    spec = build_sweep_spec(raw, overrides)
    spec.output_dir = default_output_dir(args.out, raw.get("output_dir"))
    run_sweep(spec, order_seed=args.shuffle_order, silent=bool(raw.get("silent")))
    return EXIT_OK


def cmd_report(args) -> int:
    from .api import build_report, default_output_dir
    results_dir = args.results_dir or default_output_dir()
    build_report(results_dir, args.out)
    return EXIT_OK


def cmd_init(args) -> int:
    from .scaffold import init_project
    init_project(args.project_name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icfs-wearsim",
        description="icfs-wearsim: NVM wear under high-frequency power failure in intermittent file systems",
    )
    parser.add_argument("--verbose", action="store_true", help="Log engine internals (DEBUG)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run one experiment")
    run_parser.add_argument("--config", help="YAML/JSON experiment file (default: sim.yml if present)")
    run_parser.add_argument("--seed", type=int, help="Run seed (unsigned 64-bit)")
    run_parser.add_argument("--out", help="Output directory (default: $ICFS_WEARSIM_OUT or results)")
    run_parser.add_argument("--pfr", help="Power failure rate per append")
    run_parser.add_argument("--cf", help="Appends per checkpoint")
    run_parser.add_argument("--policy", help="Allocation policy: bl, tp, tm or bf")
    run_parser.add_argument("--op-budget", type=int, help="Appends before a run times out")
    run_parser.add_argument("--replay", help="Replay failure outcomes from a trace file")
    run_parser.add_argument("--record-trace", help="Write the failure outcomes of this run to a trace file")
    run_parser.add_argument("--record-events", action="store_true", help="Also write events.csv")
    run_parser.add_argument("--force-buffer-active", action="store_true", help="Keep BF buffer mode on throughout")

    sweep_parser = subparsers.add_parser("sweep", help="Run a PFR x CF x policy grid with replicates")
    sweep_parser.add_argument("--config", help="YAML/JSON sweep file (default: sweep.yml if present)")
    sweep_parser.add_argument("--seed", type=int, help="Base seed of the sweep")
    sweep_parser.add_argument("--out", help="Output directory (default: $ICFS_WEARSIM_OUT or results)")
    sweep_parser.add_argument("--pfr", help="Comma-separated power failure rates")
    sweep_parser.add_argument("--cf", help="Comma-separated checkpoint frequencies")
    sweep_parser.add_argument("--policy", help="Comma-separated policies")
    sweep_parser.add_argument("--replicates", type=int, help="Runs per cell (default: 30)")
    sweep_parser.add_argument("--jobs", type=int, help="Worker processes (default: 1)")
    sweep_parser.add_argument("--op-budget", type=int, help="Appends before a run times out")
    sweep_parser.add_argument("--force-buffer-active", action="store_true", help="Keep BF buffer mode on throughout")
    sweep_parser.add_argument("--shuffle-order", type=int, metavar="SEED",
                              help="Execute cells in a seeded random order (outputs are unchanged)")

    report_parser = subparsers.add_parser("report", help="Build plot data from run or sweep results")
    report_parser.add_argument("results_dir", nargs="?", help="Results directory (default: $ICFS_WEARSIM_OUT or results)")
    report_parser.add_argument("--out", help="Directory for report files (default: the results directory)")

    init_parser = subparsers.add_parser("init", help="Create starter experiment files")
    init_parser.add_argument("project_name", nargs="?", default=".", help="Directory to initialize (default: current directory)")
    return parser


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "report": cmd_report, "init": cmd_init}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    # Format: HH:MM:SS  Message
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s  %(message)s',
        datefmt='%H:%M:%S'
    )

    try:
        code = COMMANDS[args.command](args)
    except (ConfigurationError, yaml.YAMLError) as e:
        logger.error(f"Configuration error: {e}")
        code = EXIT_CONFIG
    except (ResultsError, TraceError, OSError) as e:
        logger.error(f"I/O error: {e}")
        code = EXIT_IO
    except Exception as e:
        logger.error(f"Error: {e}")
        code = EXIT_ERROR
    if code:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
