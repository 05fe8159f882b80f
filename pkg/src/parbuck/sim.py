"""Fixed-step closed-loop integration with load events and trace recording.

The controller is evaluated inside every integrator stage (continuous-time
control, no sample-and-hold), the load is piecewise constant with steps
snapped to integration step boundaries, and the run fails fast if the state
diverges or an inductor current leaves continuous conduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .control import ControlGains, controller_step
from .errors import (
    CcmViolationError,
    DivergenceError,
    NumericDomainError,
    ParameterError,
    ScheduleError,
)
from .model import ConverterParams, PlantState, plant_derivatives

# Inductor current below -CCM_TOL amperes counts as a genuine loss of
# continuous conduction rather than integration noise.
CCM_TOL = 1e-9

_STATE_FIELDS = ("iL1", "iL2", "Vo", "d2")


class LoadStep(NamedTuple):
    """One entry of the load schedule: from `time` on, the load is `R` ohms."""

    time: float
    R: float


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one closed-loop run.

    The load schedule is closed on the left: an entry's resistance applies
    from its time (inclusive) until the next entry. init_label records how
    initial_state was specified so scenario files round-trip exactly.
    """

    p1: ConverterParams
    p2: ConverterParams
    gains: ControlGains
    Vref: float
    load_schedule: tuple[LoadStep, ...]
    dt: float = 1e-6
    t_end: float = 0.1
    initial_state: PlantState = field(default_factory=lambda: PlantState(0.0, 0.0, 0.0, 0.0))
    record_every: int = 50
    init_label: str = "custom"


@dataclass(frozen=True)
class TraceRecord:
    """One recorded sample: state, commands, errors and loop energies.

    sat1 means the d1 command was clamped at this sample; sat2 means the d2
    state hit a duty bound during the step that produced this sample.
    """

    t: float
    iL1: float
    iL2: float
    Vo: float
    d1: float
    d2: float
    d2_dot: float
    e: float
    e2: float
    V1_lyap: float
    V2_lyap: float
    R_active: float
    sat1: bool
    sat2: bool

    @property
    def per_unit_diff(self) -> float:
        """Alias for the per-unit sharing error e2."""
        return self.e2


def validate_scenario(scenario: Scenario) -> None:
    """Check cross-field invariants; raises ParameterError on violation.

    Parameter and gain objects validate themselves on construction, so this
    covers only the relations between them.
    """
    s = scenario
    if not math.isfinite(s.dt) or s.dt <= 0.0:
        raise ParameterError(f"dt must be positive, got {s.dt!r}")
    if not math.isfinite(s.t_end) or s.t_end < 0.0:
        raise ParameterError(f"t_end must be nonnegative, got {s.t_end!r}")
    if s.record_every < 1:
        raise ParameterError(f"record_every must be >= 1, got {s.record_every!r}")
    if not math.isfinite(s.Vref) or s.Vref <= 0.0:
        raise ParameterError(f"Vref must be positive, got {s.Vref!r}")
    if s.Vref >= min(s.p1.Vin, s.p2.Vin):
        raise ParameterError(
            f"Vref={s.Vref!r} must be below both input voltages "
            f"({s.p1.Vin!r}, {s.p2.Vin!r})"
        )
    if not s.load_schedule:
        raise ParameterError("load schedule must have at least one entry")
    if s.load_schedule[0].time != 0.0:
        raise ParameterError(
            f"first load entry must be at t=0, got t={s.load_schedule[0].time!r}"
        )
    prev = -math.inf
    for entry in s.load_schedule:
        if not math.isfinite(entry.R) or entry.R <= 0.0:
            raise ParameterError(f"load resistance must be positive, got {entry.R!r}")
        if entry.time <= prev:
            raise ParameterError("load schedule times must be strictly increasing")
        prev = entry.time
    if not s.initial_state.is_finite():
        raise ParameterError(f"initial state must be finite, got {s.initial_state}")


def rk4_update(f, y: tuple, h: float) -> tuple:
    """One classical 4th-order Runge-Kutta update for an autonomous system.

    ``f`` maps a state tuple to a derivative tuple. rk4_step is this same
    scheme unrolled over the plant state; a test pins their equality.
    """
    k1 = f(y)
    k2 = f(tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k1)))
    k3 = f(tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k2)))
    k4 = f(tuple(yi + h * ki for yi, ki in zip(y, k3)))
    sixth = h / 6.0
    return tuple(
        yi + sixth * (a + 2.0 * (b + c) + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def active_load(load_schedule: tuple[LoadStep, ...], t: float) -> float:
    """Resistance in effect at time t (closed-left: a step's time belongs to it)."""
    if not load_schedule or t < load_schedule[0].time:
        raise ScheduleError(
            f"t={t!r} s precedes the first load entry"
            + (f" at t={load_schedule[0].time!r} s" if load_schedule else "")
        )
    R = load_schedule[0].R
    for entry in load_schedule:
        if entry.time <= t:
            R = entry.R
        else:
            break
    return R


def rk4_step(
    state: PlantState,
    t: float,
    dt: float,
    scenario: Scenario,
) -> tuple[PlantState, bool]:
    """Advance one classical Runge-Kutta step of the closed loop.

    The controller is re-evaluated on every stage state. The load is resolved
    at the step's start time and held for all stages; run() shortens steps so
    load events always land on step boundaries. d2 is clamped to [0, 1] after
    the step; the returned flag reports whether the clamp changed it.
    Raises DivergenceError when the new state is non-finite.
    """
    scn = scenario
    R = active_load(scn.load_schedule, t)

    def f(s: PlantState):
        cmd = controller_step(s, scn.Vref, R, scn.p1, scn.p2, scn.gains)
        return plant_derivatives(s, scn.p1, scn.p2, R, cmd.d1, cmd.d2_dot)

    h = dt
    s2 = s3 = s4 = None
    try:
        k1 = f(state)
        s2 = PlantState(
            state.iL1 + 0.5 * h * k1.diL1,
            state.iL2 + 0.5 * h * k1.diL2,
            state.Vo + 0.5 * h * k1.dVo,
            state.d2 + 0.5 * h * k1.dd2,
        )
        k2 = f(s2)
        s3 = PlantState(
            state.iL1 + 0.5 * h * k2.diL1,
            state.iL2 + 0.5 * h * k2.diL2,
            state.Vo + 0.5 * h * k2.dVo,
            state.d2 + 0.5 * h * k2.dd2,
        )
        k3 = f(s3)
        s4 = PlantState(
            state.iL1 + h * k3.diL1,
            state.iL2 + h * k3.diL2,
            state.Vo + h * k3.dVo,
            state.d2 + h * k3.dd2,
        )
        k4 = f(s4)
    except NumericDomainError:
        # A stage went non-finite mid-step; name the first bad component.
        for stage in (state, s2, s3, s4):
            if stage is None:
                continue
            for name in _STATE_FIELDS:
                if not math.isfinite(getattr(stage, name)):
                    raise DivergenceError(t + dt, name) from None
        raise DivergenceError(t + dt, "duty command") from None
    sixth = h / 6.0
    new_d2 = state.d2 + sixth * (k1.dd2 + 2.0 * (k2.dd2 + k3.dd2) + k4.dd2)
    if not math.isfinite(new_d2):
        # Checked before clamping: the clamp would silently absorb an inf.
        raise DivergenceError(t + dt, "d2")
    clamped_d2 = min(max(new_d2, 0.0), 1.0)
    new = PlantState(
        state.iL1 + sixth * (k1.diL1 + 2.0 * (k2.diL1 + k3.diL1) + k4.diL1),
        state.iL2 + sixth * (k1.diL2 + 2.0 * (k2.diL2 + k3.diL2) + k4.diL2),
        state.Vo + sixth * (k1.dVo + 2.0 * (k2.dVo + k3.dVo) + k4.dVo),
        clamped_d2,
    )
    if not new.is_finite():
        for name in _STATE_FIELDS:
            if not math.isfinite(getattr(new, name)):
                raise DivergenceError(t + dt, name)
    return new, clamped_d2 != new_d2


def _make_record(
    t: float,
    state: PlantState,
    R: float,
    sat2: bool,
    scenario: Scenario,
) -> TraceRecord:
    sig = controller_step(state, scenario.Vref, R, scenario.p1, scenario.p2, scenario.gains)
    return TraceRecord(
        t=t,
        iL1=state.iL1,
        iL2=state.iL2,
        Vo=state.Vo,
        d1=sig.d1,
        d2=state.d2,
        d2_dot=sig.d2_dot,
        e=sig.e,
        e2=sig.e2,
        V1_lyap=sig.lyap_v,
        V2_lyap=sig.lyap_share,
        R_active=R,
        sat1=sig.saturated,
        sat2=sat2,
    )


def run(scenario: Scenario, record_every: int | None = None) -> list[TraceRecord]:
    """Integrate the scenario from t=0 to t_end and return the trace.

    Records the initial sample, every record_every-th step, both sides of
    every load event (same time and state, old and new resistance) and the
    final sample. Fails fast with DivergenceError on a non-finite state or
    CcmViolationError when an inductor current drops below -CCM_TOL.
    """
    validate_scenario(scenario)
    every = scenario.record_every if record_every is None else record_every
    if every < 1:
        raise ParameterError(f"record_every must be >= 1, got {every!r}")

    events = [e.time for e in scenario.load_schedule if 0.0 < e.time < scenario.t_end]
    boundaries = events + [scenario.t_end]

    state = scenario.initial_state
    records = [_make_record(0.0, state, scenario.load_schedule[0].R, False, scenario)]
    if scenario.t_end == 0.0:
        return records

    step_count = 0
    seg_start = 0.0
    for seg_end in boundaries:
        R = active_load(scenario.load_schedule, seg_start)
        seg_len = seg_end - seg_start
        n_full = int(math.floor(seg_len / scenario.dt + 1e-9))
        remainder = seg_len - n_full * scenario.dt
        if remainder <= scenario.dt * 1e-9:
            remainder = 0.0
            n_sub = n_full
        else:
            n_sub = n_full + 1
        for i in range(1, n_sub + 1):
            if i <= n_full:
                t_prev = seg_start + (i - 1) * scenario.dt
                h = scenario.dt
                t_next = seg_end if i == n_sub else seg_start + i * scenario.dt
            else:
                t_prev = seg_start + n_full * scenario.dt
                h = remainder
                t_next = seg_end
            state, sat2 = rk4_step(state, t_prev, h, scenario)
            step_count += 1
            if state.iL1 < -CCM_TOL or state.iL2 < -CCM_TOL:
                name, value = (
                    ("iL1", state.iL1) if state.iL1 < -CCM_TOL else ("iL2", state.iL2)
                )
                raise CcmViolationError(t_next, name, value)
            if step_count % every == 0 and t_next != seg_end:
                records.append(_make_record(t_next, state, R, sat2, scenario))
        # Segment boundary: either a load event (record both sides) or t_end.
        records.append(_make_record(seg_end, state, R, sat2, scenario))
        if seg_end in events:
            R_new = active_load(scenario.load_schedule, seg_end)
            records.append(_make_record(seg_end, state, R_new, sat2, scenario))
        seg_start = seg_end
    return records


def with_initial_state(scenario: Scenario, state: PlantState, label: str = "custom") -> Scenario:
    """Copy of the scenario starting from a different state."""
    return replace(scenario, initial_state=state, init_label=label)
