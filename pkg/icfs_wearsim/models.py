from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Dict, List, Optional

from .exceptions import ConfigurationError
from .nvm import NvmGeometry
from .policies import PolicyKind


class RunStatus(str, Enum):
    COMPLETED = "Completed"
    EXHAUSTED = "Exhausted"
    TIMEOUT = "Timeout"
    ERROR = "Error"


@dataclass
class SimConfig:
    geometry: NvmGeometry = field(default_factory=NvmGeometry)
    preload_bytes: int = 51200
    workload_bytes: int = 4096
    append_unit: int = 16
    cf: int = 10
    pfr: float = 0.2
    policy: PolicyKind = PolicyKind.BL
    swap_threshold: int = 30
    fail_threshold: int = 3
    success_threshold: int = 3
    sram_budget: int = 8192
    log_capacity: int = 256
    op_budget: int = 300_000
    seed: int = 0
    count_preload_wear: bool = False
    count_migration_wear: bool = False
    force_buffer_active: bool = False
    mu_denominator: str = "all"
    record_events: bool = False
    record_trace: bool = False

    def __post_init__(self):
        self.policy = PolicyKind(self.policy)

    def validate(self) -> "SimConfig":
        bs = self.geometry.block_size
        checks = [
            ("pfr", 0.0 <= self.pfr <= 1.0, "must lie in [0, 1]"),
            ("cf", self.cf >= 1, "must be at least 1"),
            ("append_unit", self.append_unit > 0 and bs % self.append_unit == 0,
             f"must be positive and divide block_size ({bs})"),
            ("workload_bytes", self.workload_bytes > 0 and self.workload_bytes % self.append_unit == 0,
             f"must be a positive multiple of append_unit ({self.append_unit})"),
            ("preload_bytes", 0 <= self.preload_bytes <= self.geometry.data_region_bytes,
             "must lie within the data region"),
            ("preload_bytes", self.preload_bytes % self.append_unit == 0,
             f"must be a multiple of append_unit ({self.append_unit}) so appends stay inside one block"),
            ("op_budget", self.op_budget >= self.workload_bytes // self.append_unit,
             "must cover at least one pass over the workload"),
            ("sram_budget", self.sram_budget > 0, "must be positive"),
            ("log_capacity", self.log_capacity >= 1, "must be at least 1"),
            ("swap_threshold", self.swap_threshold >= 1, "must be at least 1"),
            ("fail_threshold", self.fail_threshold >= 1, "must be at least 1"),
            ("success_threshold", self.success_threshold >= 1, "must be at least 1"),
            ("seed", 0 <= self.seed < 2 ** 64, "must be an unsigned 64-bit integer"),
            ("mu_denominator", self.mu_denominator in ("all", "touched"), "must be 'all' or 'touched'"),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigurationError(f"Invalid value for '{key}': {getattr(self, key)!r} {message}", key=key)
        return self

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class BufferSample:
    checkpoint_index: int
    r_len_bytes: int
    capacity_bytes: int
    records_at_commit: int


@dataclass(frozen=True)
class DetectorEvent:
    op_index: int
    event: str
    fail_count: int
    success_count: int
    buffer_status: str


@dataclass(frozen=True)
class Event:
    op_index: int
    kind: str
    block: int
    detail: str = ""


@dataclass
class SimResult:
    config: SimConfig
    status: RunStatus
    wear: List[int]
    mu: float
    sigma: float
    frag: float
    used_blocks: int
    total_blocks: int
    max_write_count: int
    total_appends: int
    checkpoints: int
    interval_append_counts: List[int]
    max_interval_appends: int
    amplification: float
    committed_len: int
    content_hash: str
    swaps: int = 0
    log_writebacks: int = 0
    buffer_timeline: List[BufferSample] = field(default_factory=list)
    detector_timeline: List[DetectorEvent] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)
    trace: Optional[str] = None
    blocks: Any = None

    @property
    def completed(self) -> bool:
        return self.status is RunStatus.COMPLETED


@dataclass
class SweepSpec:
    pfr_list: List[float]
    cf_list: List[int]
    policies: List[PolicyKind]
    replicates: int = 30
    base_seed: int = 0
    base: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "results"
    jobs: int = 1

    def validate(self) -> "SweepSpec":
        for key in ("pfr_list", "cf_list", "policies"):
            if not getattr(self, key):
                raise ConfigurationError(f"Sweep key '{key}' must be a non-empty list", key=key)
        if self.replicates < 1:
            raise ConfigurationError("Sweep key 'replicates' must be at least 1", key="replicates")
        if self.jobs < 1:
            raise ConfigurationError("Sweep key 'jobs' must be at least 1", key="jobs")
        self.policies = [PolicyKind(p) for p in self.policies]
        return self
