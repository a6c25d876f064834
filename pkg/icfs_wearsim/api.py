import logging
import os
from dataclasses import fields
from typing import Any, Dict, Optional

import pandas as pd
import yaml

from .engine import run
from .exceptions import ConfigurationError
from .failure import FailureProcess, load_trace
from .metrics import summary_row
from .models import SimConfig, SimResult, SweepSpec
from .nvm import NvmGeometry
from .policies import PolicyKind
from .sinks import CsvSink, ResultSink
from .sinks.csv_files import write_frame

logger = logging.getLogger(__name__)

OUT_ENV = "ICFS_WEARSIM_OUT"
REQUIRED_KEYS = ("pfr", "cf", "policy")
RUN_KEYS = {"silent", "output_dir"}
SWEEP_KEYS = {"pfr_list", "cf_list", "policies", "replicates", "base_seed", "jobs", "output_dir", "silent", "base"}
GEOMETRY_KEYS = {f.name for f in fields(NvmGeometry)}
SIM_DEFAULTS = {f.name: f.default for f in fields(SimConfig) if f.name != "geometry"}
INTERVAL_COLUMNS = ["policy", "pfr", "cf", "replicate", "interval", "appends"]


def load_config_from_yaml(path):
    with open(path, 'r') as f:
        content = f.read()

    # Expand environment variables ${VAR}
    expanded_content = os.path.expandvars(content)
    raw = yaml.safe_load(expanded_content)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: expected a mapping at the top level")

    # helper to resolve profile
    if "target" in raw and "outputs" in raw:
        target = raw["target"]
        outputs = raw.get("outputs", {}) or {}
        if target not in outputs:
            raise ConfigurationError(f"Target experiment '{target}' not found in 'outputs'", key=target)
        return dict(outputs[target] or {})
    return raw


def default_output_dir(explicit: Optional[str] = None, configured: Optional[str] = None) -> str:
    return explicit or configured or os.environ.get(OUT_ENV) or "results"


def _coerce(key: str, value: Any, default: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigurationError(f"Key '{key}' must be true or false, got {value!r}", key=key)
        return value
    if isinstance(default, (int, float)) and not isinstance(default, bool):
        try:
            number = type(default)(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"Key '{key}' must be a number, got {value!r}", key=key)
        if isinstance(default, int) and number != float(value):
            raise ConfigurationError(f"Key '{key}' must be an integer, got {value!r}", key=key)
        return number
    return value


def _geometry(raw: Any) -> NvmGeometry:
    if raw is None:
        return NvmGeometry()
    if not isinstance(raw, dict):
        raise ConfigurationError("Key 'geometry' must be a mapping", key="geometry")
    unknown = sorted(set(raw) - GEOMETRY_KEYS)
    if unknown:
        raise ConfigurationError(f"Unknown key 'geometry.{unknown[0]}'", key=f"geometry.{unknown[0]}")
    return NvmGeometry(**{k: _coerce(f"geometry.{k}", v, 0) for k, v in raw.items()})


def build_config(raw: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None,
                 required=REQUIRED_KEYS, extra_keys=RUN_KEYS) -> SimConfig:
    """
    Build a validated SimConfig from a config mapping and CLI overrides.

    Overrides set to None are ignored. Any unknown, missing or out-of-range key raises
    ConfigurationError naming the key.
    """
    merged = dict(raw or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = set(SIM_DEFAULTS) | {"geometry"} | set(extra_keys)
    for key in merged:
        if key not in known:
            raise ConfigurationError(f"Unknown configuration key '{key}'", key=key)
    for key in required:
        if key not in merged:
            raise ConfigurationError(f"Missing required configuration key '{key}'", key=key)

    values = {k: _coerce(k, v, SIM_DEFAULTS[k]) for k, v in merged.items() if k in SIM_DEFAULTS}
    if "policy" in values:
        policy = str(values["policy"]).lower()
        if policy not in {kind.value for kind in PolicyKind}:
            raise ConfigurationError(f"Key 'policy' must be one of bl, tp, tm, bf, got {values['policy']!r}",
                                     key="policy")
        values["policy"] = policy
    return SimConfig(geometry=_geometry(merged.get("geometry")), **values).validate()


def build_sweep_spec(raw: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> SweepSpec:
    merged = dict(raw or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    for key in merged:
        if key not in SWEEP_KEYS:
            raise ConfigurationError(f"Unknown sweep key '{key}'", key=key)
    base = dict(merged.get("base") or {})
    # Validate the shared settings once up front with a representative cell.
    build_config(base, {"pfr": 0.0, "cf": 1, "policy": "bl"}, required=(), extra_keys=())
    try:
        spec = SweepSpec(
            pfr_list=[float(p) for p in merged.get("pfr_list", [0.2, 0.3, 0.4])],
            cf_list=[int(c) for c in merged.get("cf_list", [5, 10, 15, 20])],
            policies=[str(p).lower() for p in merged.get("policies", ["bl", "tp", "tm", "bf"])],
            replicates=int(merged.get("replicates", 30)),
            base_seed=int(merged.get("base_seed", 0)),
            base=base,
            output_dir=default_output_dir(configured=merged.get("output_dir")),
            jobs=int(merged.get("jobs", 1)),
        ).validate()
    except ValueError as e:
        raise ConfigurationError(f"Invalid sweep value: {e}")
    for pfr in spec.pfr_list:
        if not 0.0 <= pfr <= 1.0:
            raise ConfigurationError(f"Sweep key 'pfr_list' holds {pfr} outside [0, 1]", key="pfr_list")
    for cf in spec.cf_list:
        if cf < 1:
            raise ConfigurationError(f"Sweep key 'cf_list' holds {cf} below 1", key="cf_list")
    return spec


def interval_rows(result: SimResult, replicate: int = 0):
    cfg = result.config
    return [
        {"policy": cfg.policy.value, "pfr": cfg.pfr, "cf": cfg.cf, "replicate": replicate,
         "interval": i, "appends": n}
        for i, n in enumerate(result.interval_append_counts)
    ]


def export_result(result: SimResult, sink: ResultSink, trace_path: Optional[str] = None) -> None:
    sink.write_summary([summary_row(result)])
    sink.write_wear(result.blocks)
    sink.write_buffer_timeline(result.buffer_timeline)
    sink.write_detector_timeline(result.detector_timeline)
    if result.config.record_events:
        sink.write_events(result.events)
    if trace_path and result.trace is not None:
        sink.write_trace(result.trace, trace_path)


def run_simulation(config: SimConfig, out_dir: Optional[str] = None, replay: Optional[str] = None,
                   record_trace: Optional[str] = None, sink: Optional[ResultSink] = None,
                   silent: bool = False) -> SimResult:
    failures: Optional[FailureProcess] = None
    if replay:
        failures = load_trace(replay)
        # The trace header decides pfr and seed so policy choices match the recording run.
        if failures.pfr != config.pfr or failures.seed != config.seed:
            logger.debug(f"Replaying {replay} with its recorded pfr={failures.pfr} seed={failures.seed}")
            config.pfr = failures.pfr
            config.seed = failures.seed
    if record_trace:
        config.record_trace = True
    out_dir = default_output_dir(out_dir)
    if not silent:
        logger.info(
            f"ICFS WEARSIM | policy={config.policy.value} pfr={config.pfr} cf={config.cf} seed={config.seed}"
            + (f" replay={replay}" if replay else "")
        )
    result = run(config, failures=failures)
    sink = sink or CsvSink(out_dir)
    export_result(result, sink, trace_path=record_trace)
    if isinstance(sink, CsvSink):
        write_frame(pd.DataFrame(interval_rows(result), columns=INTERVAL_COLUMNS), sink.path("intervals.csv"))
    if not silent:
        logger.info(
            f"Done. status={result.status.value} mu={result.mu:.2f} sigma={result.sigma:.2f} "
            f"frag={result.frag:.2f} appends={result.total_appends} out={out_dir}"
        )
    return result


def run_sweep(spec: SweepSpec, order_seed: Optional[int] = None, silent: bool = False):
    from .sweep import SweepRunner
    return SweepRunner(spec, order_seed=order_seed, silent=silent).run()


def build_report(results_dir: str, out_dir: Optional[str] = None):
    from .report import ReportBuilder
    return ReportBuilder(results_dir, out_dir or results_dir).build()
