"""Simulated cloud targets: submission, queuing, availability, execution.

Everything runs on an explicit integer clock (seconds since the campaign
epoch); no wall time is read anywhere, which is what makes whole campaigns
reproducible byte-for-byte.  A provider accepts circuits against a target
profile (width, gate-set lowering, gate limit, billing, noise, queue model,
availability schedule) and hands back job handles whose lifecycle is a pure
function of the submission seed and the polling clock.

Status model:

* targets are Available, Degraded, or Unavailable at any instant.  Degraded
  comes in two observed flavors: accept-and-hold (submissions are accepted
  but execution waits for the next Available window) and reduced capacity
  (the target runs but with fewer usable qubits).
* jobs are submitted, processed, error, canceled, or unavailable; the last
  four are terminal.  A submission attempt against an Unavailable target
  terminates immediately (and costs nothing).

Queue waits are lognormal.  The published wait estimate is the distribution
median scaled by ``predictor_bias``; with bias 1 the estimate lands above the
actual wait for half the jobs in the long run, and calibrating bias below 1
reproduces vendors that overestimate less often than they underestimate.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from importlib import resources

import numpy as np

from .circuit import Circuit, GateCensus
from .costing import (
    CostModel,
    CreditBilling,
    GateRateBilling,
    Money,
    PerShotBilling,
)
from .rng import derive_seed
from .simulator import GlobalDepolarizing, NoiseSpec, run_noisy
from .transpiler import (
    EFFICIENT,
    REDUNDANT,
    GateSetProfile,
    TranspileResult,
    check_gate_limit,
    default_gate_limit,
    transpile,
)

DAY = 86_400


class JobStatus(str, Enum):
    SUBMITTED = "submitted"
    PROCESSED = "processed"
    ERROR = "error"
    CANCELED = "canceled"
    UNAVAILABLE = "unavailable"


TERMINAL_STATUSES = frozenset(
    {JobStatus.PROCESSED, JobStatus.ERROR, JobStatus.CANCELED, JobStatus.UNAVAILABLE}
)


class TargetState(str, Enum):
    AVAILABLE = "available"
    DEGRADED = "degraded"
    UNAVAILABLE = "unavailable"


class DegradedKind(str, Enum):
    ACCEPT_HOLD = "accept_hold"
    REDUCED_CAPACITY = "reduced_capacity"


@dataclass(frozen=True)
class TargetStatus:
    state: TargetState
    degraded: DegradedKind | None = None
    reduced_width: int | None = None

    def __post_init__(self) -> None:
        if (self.state is TargetState.DEGRADED) != (self.degraded is not None):
            raise ValueError("degraded kind set iff state is degraded")
        if self.degraded is DegradedKind.REDUCED_CAPACITY and self.reduced_width is None:
            raise ValueError("reduced capacity needs reduced_width")


AVAILABLE = TargetStatus(TargetState.AVAILABLE)
UNAVAILABLE = TargetStatus(TargetState.UNAVAILABLE)
ACCEPT_HOLD = TargetStatus(TargetState.DEGRADED, DegradedKind.ACCEPT_HOLD)


def reduced_capacity(width: int) -> TargetStatus:
    return TargetStatus(TargetState.DEGRADED, DegradedKind.REDUCED_CAPACITY, width)


# --- availability schedules ---------------------------------------------------


@dataclass(frozen=True)
class AlwaysSchedule:
    """Constant status; Unavailable targets never come back."""

    status: TargetStatus = AVAILABLE

    def status_at(self, clock: int) -> TargetStatus:
        return self.status

    def next_available_at(self, clock: int) -> int | None:
        return clock if self.status.state is TargetState.AVAILABLE else None


@dataclass(frozen=True)
class DailyWindowSchedule:
    """Available inside a daily [start, end) second-of-day window, else ``outside``.

    The window may wrap midnight (start > end), e.g. an evening-to-early-morning
    operations window.
    """

    start: int
    end: int
    outside: TargetStatus = ACCEPT_HOLD

    def _inside(self, clock: int) -> bool:
        s = clock % DAY
        if self.start <= self.end:
            return self.start <= s < self.end
        return s >= self.start or s < self.end

    def status_at(self, clock: int) -> TargetStatus:
        return AVAILABLE if self._inside(clock) else self.outside

    def next_available_at(self, clock: int) -> int | None:
        if self._inside(clock):
            return clock
        day0 = clock - clock % DAY
        for d in (0, 1):
            cand = day0 + d * DAY + self.start
            if cand >= clock:
                return cand
        return None  # unreachable: a daily window always recurs


@dataclass(frozen=True)
class RecurringOutageSchedule:
    """Available except for a fixed outage slice of every period."""

    period: int
    outage_start: int
    outage_len: int
    outage_status: TargetStatus = UNAVAILABLE

    def __post_init__(self) -> None:
        if not 0 <= self.outage_start < self.period:
            raise ValueError("outage_start must lie within the period")
        if self.outage_start + self.outage_len > self.period:
            raise ValueError("outage must not wrap the period")

    def _in_outage(self, clock: int) -> bool:
        s = clock % self.period
        return self.outage_start <= s < self.outage_start + self.outage_len

    def status_at(self, clock: int) -> TargetStatus:
        return self.outage_status if self._in_outage(clock) else AVAILABLE

    def next_available_at(self, clock: int) -> int | None:
        if not self._in_outage(clock):
            return clock
        return clock - clock % self.period + self.outage_start + self.outage_len


Schedule = AlwaysSchedule | DailyWindowSchedule | RecurringOutageSchedule


# --- queue model ---------------------------------------------------------------


@dataclass(frozen=True)
class QueueModel:
    """Lognormal wait-time model: wait = exp(mu + sigma * N(0,1)) seconds."""

    mu: float
    sigma: float
    predictor_bias: float = 1.0

    def draw_wait(self, rng: np.random.Generator) -> float:
        return float(math.exp(self.mu + self.sigma * rng.standard_normal()))

    def predicted_wait(self) -> float:
        """The estimate a status endpoint would publish: biased median."""
        return self.predictor_bias * math.exp(self.mu)


# --- target profile ------------------------------------------------------------


@dataclass(frozen=True)
class TargetProfile:
    name: str
    cloud: str  # "SimAWS" | "SimAzure"
    qubits: int
    gate_profile: GateSetProfile
    billing: CostModel
    noise: NoiseSpec
    queue: QueueModel
    schedule: Schedule
    gate_limit: int | None = None
    exposes_avg_queue_time: bool = False
    exposes_queue_position: bool = False
    execution_seconds: int = 60
    error_mitigated: bool = False


@dataclass
class JobHandle:
    """Mutable lifecycle record held by the provider; not persisted directly."""

    job_id: str
    target: TargetProfile
    shots: int
    seed: int
    submitted_at: int
    status: JobStatus
    source: Circuit | None = None
    lowered: TranspileResult | None = None
    error_message: str | None = None
    predicted_wait: float | None = None
    actual_wait: float | None = None
    exec_start: int | None = None
    exec_end: int | None = None
    canceled_at: int | None = None
    _counts: dict[str, int] | None = field(default=None, repr=False)

    @property
    def census(self) -> GateCensus | None:
        return None if self.lowered is None else self.lowered.census


@dataclass(frozen=True)
class PollResult:
    status: JobStatus
    counts: dict[str, int] | None = None
    error_message: str | None = None
    queue_position: int | None = None


class SimProvider:
    """One simulated access path to one target machine."""

    def __init__(self, target: TargetProfile):
        self.target = target
        self._lock = threading.Lock()
        self._handles: dict[str, JobHandle] = {}
        self._counter = 0

    def target_status(self, clock: int) -> TargetStatus:
        return self.target.schedule.status_at(clock)

    # -- submission ------------------------------------------------------------

    def submit(
        self, circuit: Circuit, shots: int, clock: int, *, seed: int, job_id: str | None = None
    ) -> JobHandle:
        """Validate, lower, and enqueue; returns a handle (possibly already terminal)."""
        if shots < 1:
            raise ValueError("shots must be >= 1")
        with self._lock:
            if job_id is None:
                job_id = f"{self.target.name}-{self._counter:06d}"
            if job_id in self._handles:
                raise ValueError(f"duplicate job id {job_id}")
            self._counter += 1
            handle = self._build_handle(circuit, shots, clock, seed, job_id)
            self._handles[job_id] = handle
            return handle

    def _build_handle(
        self, circuit: Circuit, shots: int, clock: int, seed: int, job_id: str
    ) -> JobHandle:
        t = self.target
        handle = JobHandle(
            job_id=job_id,
            target=t,
            shots=shots,
            seed=seed,
            submitted_at=clock,
            status=JobStatus.SUBMITTED,
            source=circuit,
        )
        status = t.schedule.status_at(clock)
        if status.state is TargetState.UNAVAILABLE:
            handle.status = JobStatus.UNAVAILABLE
            handle.error_message = "target unavailable at submission"
            return handle
        effective_width = t.qubits
        if status.degraded is DegradedKind.REDUCED_CAPACITY:
            effective_width = min(effective_width, status.reduced_width or 0)
        if circuit.width > effective_width:
            handle.status = JobStatus.ERROR
            handle.error_message = (
                f"circuit width {circuit.width} exceeds target capacity {effective_width}"
            )
            return handle
        lowered = transpile(circuit, t.gate_profile)
        handle.lowered = lowered
        if not check_gate_limit(lowered.census.total, t.gate_limit):
            handle.status = JobStatus.ERROR
            handle.error_message = (
                f"lowered gate count {lowered.census.total} exceeds limit {t.gate_limit}"
            )
            return handle
        rng = np.random.default_rng(derive_seed(seed, "queue"))
        wait = t.queue.draw_wait(rng)
        handle.actual_wait = wait
        if t.exposes_avg_queue_time:
            handle.predicted_wait = t.queue.predicted_wait()
        ready = clock + math.ceil(wait)
        handle.exec_start = self._next_runnable(ready, circuit.width)
        if handle.exec_start is not None:
            handle.exec_end = handle.exec_start + t.execution_seconds
        return handle

    def _next_runnable(self, clock: int, width: int) -> int | None:
        """Earliest instant >= clock when the target will actually run a job."""
        status = self.target.schedule.status_at(clock)
        if status.state is TargetState.AVAILABLE:
            return clock
        if (
            status.degraded is DegradedKind.REDUCED_CAPACITY
            and width <= (status.reduced_width or 0)
        ):
            return clock  # degraded but still running jobs of this width
        return self.target.schedule.next_available_at(clock)

    # -- lifecycle ---------------------------------------------------------------

    def poll(self, handle: JobHandle, clock: int) -> PollResult:
        """Status at ``clock``; idempotent for a fixed clock."""
        with self._lock:
            status = self._status_at(handle, clock)
            if status is JobStatus.PROCESSED and handle._counts is None:
                try:
                    handle._counts = run_noisy(
                        handle.lowered.circuit,
                        self.target.noise,
                        handle.shots,
                        derive_seed(handle.seed, "shots"),
                    )
                except ValueError as exc:
                    handle.status = JobStatus.ERROR
                    handle.error_message = f"execution failed: {exc}"
                    status = JobStatus.ERROR
            handle.status = status if handle.status is JobStatus.SUBMITTED else handle.status
            position = None
            if self.target.exposes_queue_position and status is JobStatus.SUBMITTED:
                position = self._queue_position(handle, clock)
            return PollResult(
                status=status,
                counts=handle._counts if status is JobStatus.PROCESSED else None,
                error_message=handle.error_message,
                queue_position=position,
            )

    def _status_at(self, handle: JobHandle, clock: int) -> JobStatus:
        if handle.status in (JobStatus.UNAVAILABLE, JobStatus.ERROR):
            return handle.status
        if handle.canceled_at is not None:
            return JobStatus.CANCELED
        if handle.exec_end is not None and clock >= handle.exec_end:
            return JobStatus.PROCESSED
        return JobStatus.SUBMITTED

    def _queue_position(self, handle: JobHandle, clock: int) -> int:
        mine = handle.exec_start if handle.exec_start is not None else math.inf
        ahead = 0
        for other in self._handles.values():
            if other.job_id == handle.job_id or other.canceled_at is not None:
                continue
            if other.exec_end is None or other.status in (JobStatus.ERROR, JobStatus.UNAVAILABLE):
                continue
            if other.exec_end > clock and (other.exec_start or 0) < mine:
                ahead += 1
        return ahead + 1

    def cancel(self, handle: JobHandle, clock: int) -> JobStatus:
        """Cancel if execution has not begun; otherwise report the real status."""
        with self._lock:
            status = self._status_at(handle, clock)
            if status is not JobStatus.SUBMITTED:
                return status
            if handle.exec_start is None or clock < handle.exec_start:
                handle.canceled_at = clock
                handle.status = JobStatus.CANCELED
                return JobStatus.CANCELED
            return JobStatus.SUBMITTED  # already running; too late to cancel

    # -- billing -------------------------------------------------------------------

    def job_cost(self, handle: JobHandle) -> Money:
        """Cost of a job in its current status; non-processed jobs cost nothing."""
        if handle.status is not JobStatus.PROCESSED:
            return Money.zero()
        counts = handle.census
        billing = self.target.billing
        if isinstance(billing, GateRateBilling):
            return billing.job_cost(
                counts, handle.shots, error_mitigated=self.target.error_mitigated
            )
        if isinstance(billing, CreditBilling):
            return billing.job_cost(counts, handle.shots, handle.lowered.circuit.width)
        if isinstance(billing, PerShotBilling):
            return billing.job_cost(handle.shots)
        raise TypeError(f"unknown billing model {billing!r}")


# --- shipped target presets -------------------------------------------------------


@cache
def _price_table() -> dict:
    text = resources.files("qbench.data").joinpath("price_table.json").read_text("utf-8")
    return json.loads(text)


def _ionq_gate_rate() -> GateRateBilling:
    p = _price_table()["gate_rate"]["ionq"]
    return GateRateBilling(
        usd_1q=Money.from_usd(p["usd_1q"]),
        usd_2q=Money.from_usd(p["usd_2q"]),
        minimum=Money.from_usd(p["min_job"]),
        minimum_mitigated=Money.from_usd(p["min_job_error_mitigated"]),
    )


def _credit_rate(tier: str) -> CreditBilling:
    p = _price_table()["credit_rate"]["quantinuum"]
    return CreditBilling(usd_per_credit=Money.from_usd(p[f"usd_per_credit_{tier}"]))


def _per_shot(device: str) -> PerShotBilling:
    p = _price_table()["per_shot"]
    return PerShotBilling(
        per_task=Money.from_usd(p["per_task"]), per_shot=Money.from_usd(p[device])
    )


_FREE = PerShotBilling(per_task=Money.zero(), per_shot=Money.zero())

_AWS_QUEUE = QueueModel(mu=math.log(300.0), sigma=1.0)
# bias 0.65 with sigma 1.2: the published estimate exceeds the actual wait for
# roughly a third of jobs, matching observed status-endpoint behavior
_AZURE_QUEUE = QueueModel(mu=math.log(600.0), sigma=1.2, predictor_bias=0.65)
_SLOW_QUEUE = QueueModel(mu=math.log(3600.0), sigma=1.3, predictor_bias=0.65)
_EMULATOR_QUEUE = QueueModel(mu=math.log(10.0), sigma=0.5)


@cache
def target_profile(name: str) -> TargetProfile:
    """Resolve a shipped preset by name; raises KeyError for unknown names."""
    makers = {
        "aria1-aws": lambda: TargetProfile(
            name="aria1-aws",
            cloud="SimAWS",
            qubits=25,
            gate_profile=REDUNDANT,
            billing=_per_shot("aria"),
            noise=GlobalDepolarizing(0.9995),
            queue=_AWS_QUEUE,
            schedule=RecurringOutageSchedule(period=36 * 3600, outage_start=30 * 3600, outage_len=6 * 3600),
            gate_limit=default_gate_limit(),
            exposes_queue_position=True,
        ),
        "aria1-azure": lambda: TargetProfile(
            name="aria1-azure",
            cloud="SimAzure",
            qubits=25,
            gate_profile=EFFICIENT,
            billing=_ionq_gate_rate(),
            noise=GlobalDepolarizing(0.9995),
            queue=_AZURE_QUEUE,
            schedule=RecurringOutageSchedule(period=36 * 3600, outage_start=24 * 3600, outage_len=12 * 3600),
            exposes_avg_queue_time=True,
        ),
        "aria2-aws": lambda: TargetProfile(
            name="aria2-aws",
            cloud="SimAWS",
            qubits=25,
            gate_profile=REDUNDANT,
            billing=_per_shot("aria"),
            noise=GlobalDepolarizing(0.9995),
            queue=_AWS_QUEUE,
            schedule=AlwaysSchedule(UNAVAILABLE),
            gate_limit=default_gate_limit(),
            exposes_queue_position=True,
        ),
        "aria2-azure": lambda: TargetProfile(
            name="aria2-azure",
            cloud="SimAzure",
            qubits=25,
            gate_profile=EFFICIENT,
            billing=_ionq_gate_rate(),
            noise=GlobalDepolarizing(0.9995),
            queue=_AZURE_QUEUE,
            schedule=AlwaysSchedule(UNAVAILABLE),
            exposes_avg_queue_time=True,
        ),
        "forte1-aws": lambda: TargetProfile(
            name="forte1-aws",
            cloud="SimAWS",
            qubits=36,
            gate_profile=REDUNDANT,
            billing=_per_shot("forte"),
            noise=GlobalDepolarizing(0.9993),
            queue=_AWS_QUEUE,
            schedule=AlwaysSchedule(),
            gate_limit=default_gate_limit(20, 22),
            exposes_queue_position=True,
        ),
        "garnet-aws": lambda: TargetProfile(
            name="garnet-aws",
            cloud="SimAWS",
            qubits=20,
            gate_profile=REDUNDANT,
            billing=_per_shot("garnet"),
            noise=GlobalDepolarizing(0.97),
            queue=_AWS_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_queue_position=True,
        ),
        "h1-azure": lambda: TargetProfile(
            name="h1-azure",
            cloud="SimAzure",
            qubits=20,
            gate_profile=EFFICIENT,
            billing=_credit_rate("hardware"),
            noise=GlobalDepolarizing(0.9998),
            queue=_SLOW_QUEUE,
            # nightly operations window, 17:00 to 02:00; submissions outside
            # are accepted and held
            schedule=DailyWindowSchedule(start=17 * 3600, end=2 * 3600),
            exposes_avg_queue_time=True,
        ),
        "h2-azure": lambda: TargetProfile(
            name="h2-azure",
            cloud="SimAzure",
            qubits=56,
            gate_profile=EFFICIENT,
            billing=_credit_rate("hardware"),
            noise=GlobalDepolarizing(0.9999),
            queue=_SLOW_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_avg_queue_time=True,
        ),
        "aria1-emulator": lambda: TargetProfile(
            name="aria1-emulator",
            cloud="SimAzure",
            qubits=25,
            gate_profile=EFFICIENT,
            billing=_FREE,
            noise=GlobalDepolarizing(0.9995),
            queue=_EMULATOR_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_avg_queue_time=True,
        ),
        "forte1-emulator": lambda: TargetProfile(
            name="forte1-emulator",
            cloud="SimAzure",
            qubits=36,
            gate_profile=EFFICIENT,
            billing=_FREE,
            noise=GlobalDepolarizing(0.9993),
            queue=_EMULATOR_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_avg_queue_time=True,
        ),
        "h1-emulator": lambda: TargetProfile(
            name="h1-emulator",
            cloud="SimAzure",
            qubits=20,
            gate_profile=EFFICIENT,
            billing=_credit_rate("emulator"),
            noise=GlobalDepolarizing(0.9998),
            queue=_EMULATOR_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_avg_queue_time=True,
        ),
        "h2-emulator": lambda: TargetProfile(
            name="h2-emulator",
            cloud="SimAzure",
            qubits=56,
            gate_profile=EFFICIENT,
            billing=_credit_rate("emulator"),
            noise=GlobalDepolarizing(0.9999),
            queue=_EMULATOR_QUEUE,
            schedule=AlwaysSchedule(),
            exposes_avg_queue_time=True,
        ),
    }
    try:
        return makers[name]()
    except KeyError:
        raise KeyError(f"unknown target preset {name!r}; known: {sorted(makers)}") from None


PRESET_NAMES = (
    "aria1-aws",
    "aria1-azure",
    "aria2-aws",
    "aria2-azure",
    "forte1-aws",
    "garnet-aws",
    "h1-azure",
    "h2-azure",
    "aria1-emulator",
    "forte1-emulator",
    "h1-emulator",
    "h2-emulator",
)
