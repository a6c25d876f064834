"""
Power-failure process, trace record/replay and the interval-length oracles.

Randomness comes from numpy's PCG64 bit generator. A run seed (unsigned 64-bit) feeds
``numpy.random.SeedSequence(seed)``, which spawns two children: the first drives the failure
process, the second drives allocation policies. The failure stream is consumed as doubles
from ``Generator.random`` in chunks of ``CHUNK`` values, one double per append; an append
fails when its double is below the power failure rate.
"""
import logging
import math
import re
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainError, TraceError

logger = logging.getLogger(__name__)

CHUNK = 4096
TRACE_WIDTH = 64
_HEADER = re.compile(r"^icfs-trace v1 pfr=(?P<pfr>\S+) seed=(?P<seed>\d+)$")


class Outcome(str, Enum):
    SURVIVE = "S"
    FAIL = "F"


def spawn_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Return (failure_rng, policy_rng) for a run seed."""
    children = np.random.SeedSequence(seed).spawn(2)
    return tuple(np.random.Generator(np.random.PCG64(child)) for child in children)


class FailureProcess:
    def __init__(self, pfr: float, seed: int = 0, rng: Optional[np.random.Generator] = None,
                 trace: Optional[Sequence[Outcome]] = None, record: bool = False):
        if not 0.0 <= pfr <= 1.0:
            raise DomainError(f"power failure rate {pfr} outside [0, 1]")
        self.pfr = pfr
        self.seed = seed
        self.trace = list(trace) if trace is not None else None
        self.rng = rng if rng is not None or self.trace is not None else spawn_streams(seed)[0]
        self.recorded: Optional[List[str]] = [] if record else None
        self._chunk = np.empty(0)
        self._pos = 0

    @classmethod
    def stochastic(cls, pfr: float, seed: int, rng: Optional[np.random.Generator] = None,
                   record: bool = False) -> "FailureProcess":
        return cls(pfr, seed, rng=rng, record=record)

    @classmethod
    def replay(cls, outcomes: Iterable[Outcome], pfr: float = 0.0, seed: int = 0,
               record: bool = False) -> "FailureProcess":
        return cls(pfr, seed, trace=[Outcome(o) for o in outcomes], record=record)

    @property
    def mode(self) -> str:
        return "Stochastic" if self.trace is None else "Replay"

    def next_outcome(self) -> Outcome:
        if self.trace is None:
            if self._pos == len(self._chunk):
                self._chunk = self.rng.random(CHUNK)
                self._pos = 0
            outcome = Outcome.FAIL if self._chunk[self._pos] < self.pfr else Outcome.SURVIVE
        else:
            if self._pos == len(self.trace):
                raise TraceError(f"trace exhausted after {self._pos} outcomes")
            outcome = self.trace[self._pos]
        self._pos += 1
        if self.recorded is not None:
            self.recorded.append(outcome.value)
        return outcome


def format_trace(outcomes: Iterable, pfr: float, seed: int) -> str:
    chars = "".join(Outcome(o).value for o in outcomes)
    lines = [f"icfs-trace v1 pfr={pfr!r} seed={seed}"]
    lines += [chars[i:i + TRACE_WIDTH] for i in range(0, len(chars), TRACE_WIDTH)]
    return "\n".join(lines) + "\n"


def record_trace(path: str, outcomes: Iterable, pfr: float, seed: int) -> None:
    with open(path, "w") as f:
        f.write(format_trace(outcomes, pfr, seed))
    logger.debug(f"Wrote failure trace to {path}")


def parse_trace(text: str) -> FailureProcess:
    if not text.endswith("\n"):
        raise TraceError("missing trailing newline", line=text.count("\n") + 1)
    lines = text[:-1].split("\n")
    header = _HEADER.match(lines[0])
    if not header:
        raise TraceError(f"bad header {lines[0]!r}", line=1)
    try:
        pfr = float(header.group("pfr"))
    except ValueError:
        raise TraceError(f"bad pfr value {header.group('pfr')!r}", line=1)
    seed = int(header.group("seed"))
    if not 0.0 <= pfr <= 1.0 or seed >= 2 ** 64:
        raise TraceError("pfr or seed out of range", line=1)

    body = lines[1:]
    outcomes: List[Outcome] = []
    for number, line in enumerate(body, start=2):
        last = number == len(body) + 1
        if not line or len(line) > TRACE_WIDTH or (not last and len(line) != TRACE_WIDTH):
            raise TraceError(f"expected {TRACE_WIDTH} outcomes per line, got {len(line)}", line=number)
        bad = line.strip("SF")
        if bad:
            raise TraceError(f"unexpected character {bad[0]!r}", line=number)
        outcomes.extend(Outcome(c) for c in line)
    return FailureProcess.replay(outcomes, pfr=pfr, seed=seed)


def load_trace(path: str) -> FailureProcess:
    with open(path, "r") as f:
        return parse_trace(f.read())


def _check_domain(pfr: float, cf: int) -> None:
    if not 0.0 <= pfr <= 1.0:
        raise DomainError(f"power failure rate {pfr} outside [0, 1]")
    if cf < 1:
        raise DomainError(f"checkpoint frequency {cf} must be at least 1")
    if pfr == 1.0:
        raise DomainError("no interval ever completes at power failure rate 1")


def expected_appends_per_interval(pfr: float, cf: int) -> float:
    """Mean number of appends until cf consecutive appends survive."""
    _check_domain(pfr, cf)
    if pfr == 0.0:
        return float(cf)
    return ((1.0 - pfr) ** (-cf) - 1.0) / pfr


def interval_variance(pfr: float, cf: int) -> float:
    _check_domain(pfr, cf)
    if pfr == 0.0:
        return 0.0
    q = 1.0 - pfr
    numerator = 1.0 - (2 * cf + 1) * pfr * q ** cf - q ** (2 * cf + 1)
    return numerator / (pfr ** 2 * q ** (2 * cf))


def _run_length_chain(pfr: float, cf: int) -> np.ndarray:
    # States 0..cf-1 are the current run of survivals; mass leaving state cf-1 on success is absorbed.
    q = 1.0 - pfr
    chain = np.zeros((cf, cf))
    chain[:, 0] = pfr
    for j in range(cf - 1):
        chain[j, j + 1] = q
    return chain


def interval_tail_probability(pfr: float, cf: int, k: int) -> float:
    """P(an interval needs at least k appends)."""
    _check_domain(pfr, cf)
    if k <= cf:
        return 1.0
    start = np.zeros(cf)
    start[0] = 1.0
    return float((start @ np.linalg.matrix_power(_run_length_chain(pfr, cf), k - 1)).sum())


def interval_tail_probabilities(pfr: float, cf: int, ks: Sequence[int]) -> np.ndarray:
    """Vector form of interval_tail_probability for ascending or unordered ks."""
    _check_domain(pfr, cf)
    chain = _run_length_chain(pfr, cf)
    state = np.zeros(cf)
    state[0] = 1.0
    steps = 0
    tails = {}
    for k in sorted(set(int(k) for k in ks)):
        if k <= cf:
            tails[k] = 1.0
            continue
        state = state @ np.linalg.matrix_power(chain, k - 1 - steps)
        steps = k - 1
        tails[k] = float(state.sum())
    return np.array([tails[int(k)] for k in ks])


def sample_interval_lengths(pfr: float, cf: int, n: int, rng: np.random.Generator,
                            chunk: int = 10000) -> np.ndarray:
    """
    Draw n interval lengths without simulating every append.

    An interval is a geometric number of failed attempts followed by one run of cf
    survivals; a failed attempt survives j < cf appends and then fails, so its length
    j + 1 follows a geometric law truncated to cf values.
    """
    _check_domain(pfr, cf)
    q = 1.0 - pfr
    success = q ** cf
    lengths = np.empty(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        size = min(chunk, n - lo)
        failures = rng.geometric(success, size=size) - 1
        total = int(failures.sum())
        sums = np.zeros(size, dtype=np.int64)
        if total:
            u = rng.random(total)
            j = np.floor(np.log1p(-u * (1.0 - success)) / math.log(q)).astype(np.int64)
            np.minimum(j, cf - 1, out=j)
            owner = np.repeat(np.arange(size), failures)
            sums = np.bincount(owner, weights=j + 1, minlength=size).astype(np.int64)
        lengths[lo:lo + size] = sums + cf
    return lengths
