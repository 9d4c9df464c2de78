"""
This module stores the runtime invariant monitor
"""

from ..errors import LengthMismatch, UnknownTag
from ..invariants.models import SafetyInvariant
from ..st.evaluate import truth, variables
from .models import EventKind, Sample, SimTrace, ViolationEvent


def sample_env(trace: SimTrace, sample: Sample) -> dict[str, float]:
    """Ground-truth tag values of one sample."""
    tags = trace.tags
    env = dict(trace.externals)
    env.update(
        {
            tags.level: sample.level,
            tags.pressure: sample.pressure,
            tags.valve: sample.valve,
            tags.pump: float(sample.pump_on),
        }
    )
    return env


def _check_coverage(trace: SimTrace, inv: SafetyInvariant) -> None:
    if inv.actuator != trace.tags.pump:
        raise UnknownTag(inv.actuator, "invariant actuator")
    covered = set(trace.tags.sensors) | set(trace.tags.actuators)
    covered.update(name for name, _ in trace.externals)
    missing = sorted(variables(inv.predicate) - covered)
    if missing:
        raise UnknownTag(missing[0], "invariant predicate")


def monitor_invariant(
    trace: SimTrace, inv: SafetyInvariant, baseline: SimTrace | None = None
) -> list[ViolationEvent]:
    """
    Evaluates the negated invariant's two terms on a trace.

    A Hazard event is emitted at every sample where P holds on the plant's
    true state while the actuator is not at its safe value. When a baseline
    trace is given, a single Disruption-onset event marks the first sample
    where P does not hold, the actuator sits at the safe value and the
    baseline held it at the normal (ELSE) value.

    Raises:
        UnknownTag: If the trace cannot provide a tag the invariant reads.
        LengthMismatch: If the baseline has a different number of samples.
    """
    _check_coverage(trace, inv)
    if baseline is not None and len(baseline.samples) != len(trace.samples):
        raise LengthMismatch(
            f"baseline has {len(baseline.samples)} samples, "
            f"trace has {len(trace.samples)}"
        )

    events: list[ViolationEvent] = []
    onset_seen = baseline is None or inv.else_value is None
    for i, sample in enumerate(trace.samples):
        held = int(sample.pump_on)
        p = truth(inv.predicate, sample_env(trace, sample))
        if p and held != inv.safe_value:
            events.append(ViolationEvent(sample.t, EventKind.HAZARD))
        if not onset_seen and not p and held == inv.safe_value:
            assert baseline is not None
            if int(baseline.samples[i].pump_on) == inv.else_value:
                events.append(ViolationEvent(sample.t, EventKind.DISRUPTION_ONSET))
                onset_seen = True
    return events
