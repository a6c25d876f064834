import hashlib
import logging
from typing import List, Optional

import numpy as np

from .buffer import Redirect, SizeEstimator, VolatileBuffer, update_size_estimate
from .checkpoint_log import LogSpace
from .detector import DetectorState
from .exceptions import ExhaustedError, InvariantError
from .failure import FailureProcess, Outcome, format_trace, spawn_streams
from .metrics import amplification, summarize
from .models import BufferSample, DetectorEvent, Event, RunStatus, SimConfig, SimResult
from .nvm import WRITE_UNIT, BlockTable
from .policies import AllocationPolicy, make_policy

logger = logging.getLogger(__name__)


def file_payload(start: int, end: int) -> bytes:
    """Deterministic file content for byte offsets [start, end)."""
    offsets = np.arange(start, end, dtype=np.int64)
    return ((offsets // WRITE_UNIT * 131 + offsets % WRITE_UNIT * 7 + 11) % 251).astype(np.uint8).tobytes()


class Simulation:
    """
    One experiment: a failure-free preload followed by an append workload that runs under
    power failures until the file has grown by workload_bytes.

    Each append is written (to NVM or to the SRAM buffer), logged, and then the failure
    process decides whether power survives it. A failure rolls the log back to the last
    commit record and the appends since then are executed again at the same offsets. After
    cf consecutive surviving appends a checkpoint commits them.
    """

    def __init__(self, config: SimConfig, table: Optional[BlockTable] = None,
                 failures: Optional[FailureProcess] = None):
        self.config = config.validate()
        failure_rng, policy_rng = spawn_streams(config.seed)
        self.table = table if table is not None else BlockTable(config.geometry)
        self.failures = failures if failures is not None else FailureProcess.stochastic(
            config.pfr, config.seed, rng=failure_rng, record=config.record_trace
        )
        if failures is not None and config.record_trace and self.failures.recorded is None:
            self.failures.recorded = []
        self.policy: AllocationPolicy = make_policy(
            config.policy, swap_threshold=config.swap_threshold, rng=policy_rng,
            count_migration_wear=config.count_migration_wear,
        )
        self.log = LogSpace(capacity_records=config.log_capacity)
        self.detector = DetectorState(config.fail_threshold, config.success_threshold)
        self.buffer = VolatileBuffer(config.geometry.block_size, config.sram_budget)
        self.estimator = SizeEstimator()

        self.chain: List[int] = []
        self.total_appends = 0
        self.checkpoints = 0
        self.interval_append_counts: List[int] = []
        self.buffer_timeline: List[BufferSample] = []
        self.detector_timeline: List[DetectorEvent] = []
        self.events: List[Event] = []

    def _event(self, kind: str, block: int, detail: str = "") -> None:
        if self.config.record_events:
            self.events.append(Event(self.total_appends, kind, block, detail))

    @property
    def buffering(self) -> bool:
        return self.policy.uses_buffer and (self.config.force_buffer_active or self.detector.active)

    def _block_for(self, offset: int) -> int:
        index = offset // self.config.geometry.block_size
        if index == len(self.chain):
            block = self.policy.select_next_block(self.table)
            self.chain.append(block)
            self._event("alloc", block, f"file_block={index}")
        return self.chain[index]

    def preload(self) -> int:
        """Write preload_bytes failure-free through the policy's allocation; returns the file length."""
        cfg = self.config
        bs = cfg.geometry.block_size
        offset = 0
        while offset < cfg.preload_bytes:
            block = self._block_for(offset)
            n = min(bs - offset % bs, cfg.preload_bytes - offset)
            self.table.record_write(block, n, offset=offset % bs, data=file_payload(offset, offset + n),
                                    counted=cfg.count_preload_wear)
            offset += n
        self.log = LogSpace(capacity_records=cfg.log_capacity, committed_file_len=offset,
                            uncommitted_file_len=offset)
        return offset

    def _write(self, offset: int, data: bytes) -> None:
        bs = self.config.geometry.block_size
        index = offset // bs
        block = self._block_for(offset)
        if self.buffering:
            if self.buffer.redirect_append(block, offset % bs, data) is Redirect.BUFFERED:
                self._event("buffer", block, f"offset={offset % bs}")
                return
        units = self.table.record_write(block, len(data), offset=offset % bs, data=data)
        self._event("write", block, f"offset={offset % bs} units={units}")
        replacement = self.policy.maybe_swap(self.table, block)
        if replacement is not None:
            self.chain[index] = replacement
            self._event("migrate", replacement, f"from={block} units={self.policy.last_migration_units}")
            self._event("retire", block)

    def _on_failure(self) -> None:
        self.log.rollback()
        dropped = self.buffer.on_power_failure()
        self._event("fail", -1, f"dropped={dropped}")
        if self.policy.uses_buffer and self.detector.on_rollback_to_commit():
            self._detector_changed("rollback")

    def _checkpoint(self, full_interval: bool, interval_appends: int) -> int:
        flushed = self.buffer.writeback_on_checkpoint(self.table) if len(self.buffer) else []
        for record, units in flushed:
            self._event("writeback", record.target_block, f"offset={record.offset} units={units}")
        log_written_back = self.log.commit()
        self.checkpoints += 1
        committed = self.log.committed_file_len
        self._event("commit", -1, f"len={committed}")
        if full_interval:
            self.interval_append_counts.append(interval_appends)
        if self.policy.uses_buffer:
            if self.detector.on_checkpoint_signal():
                self._detector_changed("checkpoint")
            update_size_estimate(self.estimator, self.buffer, committed, log_written_back, self.config.append_unit)
            self.buffer_timeline.append(
                BufferSample(self.checkpoints, self.estimator.r_len, self.buffer.capacity_bytes, len(flushed))
            )
        return committed

    def _detector_changed(self, event: str) -> None:
        d = self.detector
        logger.debug(f"Detector -> {d.buffer_status.value} after {event} at append {self.total_appends}")
        self.detector_timeline.append(
            DetectorEvent(self.total_appends, event, d.fail_count, d.success_count, d.buffer_status.value)
        )

    def run(self) -> SimResult:
        cfg = self.config
        committed = self.preload()
        units_before = self.table.units_written
        target = committed + cfg.workload_bytes
        payload = file_payload(committed, target)
        base = committed

        status = RunStatus.COMPLETED
        position = committed
        progress = 0
        interval_appends = 0
        try:
            while committed < target:
                if self.total_appends >= cfg.op_budget:
                    status = RunStatus.TIMEOUT
                    logger.debug(f"Op budget of {cfg.op_budget} appends spent at {committed - base} bytes")
                    break
                data = payload[position - base:position - base + cfg.append_unit]
                self._write(position, data)
                self.log.append_record(len(data))
                self.total_appends += 1
                interval_appends += 1
                if self.failures.next_outcome() is Outcome.FAIL:
                    self._on_failure()
                    position = committed
                    progress = 0
                    continue
                position += len(data)
                progress += 1
                if progress == cfg.cf or position == target:
                    committed = self._checkpoint(progress == cfg.cf, interval_appends)
                    if committed != position:
                        raise InvariantError(f"committed length {committed} differs from file position {position}")
                    progress = 0
                    interval_appends = 0
        except ExhaustedError as e:
            status = RunStatus.EXHAUSTED
            logger.debug(f"Exhausted after {self.total_appends} appends: {e}")
        return self._result(status, committed, units_before)

    def content_hash(self, length: int) -> str:
        bs = self.config.geometry.block_size
        digest = hashlib.sha256()
        for index in range(-(-length // bs)):
            digest.update(self.table.read(self.chain[index], 0, min(bs, length - index * bs)))
        return digest.hexdigest()

    def _result(self, status: RunStatus, committed: int, units_before: int) -> SimResult:
        cfg = self.config
        wear = self.table.write_counts()
        summary = summarize(wear, self.table.used_count, cfg.mu_denominator)
        written = (self.table.units_written - units_before) * WRITE_UNIT
        trace = None
        if self.failures.recorded is not None:
            trace = format_trace(self.failures.recorded, cfg.pfr, cfg.seed)
        return SimResult(
            config=cfg,
            status=status,
            wear=wear.tolist(),
            mu=summary.mu,
            sigma=summary.sigma,
            frag=summary.frag,
            used_blocks=summary.used,
            total_blocks=summary.total,
            max_write_count=summary.max_write_count,
            total_appends=self.total_appends,
            checkpoints=self.checkpoints,
            interval_append_counts=list(self.interval_append_counts),
            max_interval_appends=max(self.interval_append_counts, default=0),
            amplification=amplification(written, cfg.workload_bytes),
            committed_len=committed,
            content_hash=self.content_hash(committed),
            swaps=self.policy.swaps,
            log_writebacks=self.log.writeback_events,
            buffer_timeline=list(self.buffer_timeline),
            detector_timeline=list(self.detector_timeline),
            events=list(self.events),
            trace=trace,
            blocks=self.table.to_frame(),
        )


def run(config: SimConfig, table: Optional[BlockTable] = None,
        failures: Optional[FailureProcess] = None) -> SimResult:
    return Simulation(config, table=table, failures=failures).run()
