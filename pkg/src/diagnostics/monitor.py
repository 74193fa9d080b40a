"""
Continuation monitor for diagnostics record streams.
Supports capped rules, one-shot firing, event history and callbacks.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Union

import pandas as pd
from loguru import logger


class RuleKind(Enum):
    """Kinds of monitor rules."""
    INDICATOR_CAP = "indicator_cap"
    ENERGY_CAP = "energy_cap"
    NON_FINITE = "non_finite"


@dataclass
class MonitorRule:
    """
    Definition of a monitor rule.

    Attributes:
        rule_id: Unique identifier
        kind: Rule kind
        field: Record attribute the rule watches ('Q', 'E', ...)
        condition: Callable (value, threshold) -> bool
        threshold: Numeric cap
        terminal: Whether firing should stop the run
        message_template: Message with {field}, {value}, {threshold}, {t} placeholders
    """
    rule_id: str
    kind: RuleKind
    field: str
    condition: Callable
    threshold: float
    terminal: bool = True
    message_template: str = "{field} = {value:.6g} exceeds {threshold:.6g} at t = {t:.6g}"
    enabled: bool = True


@dataclass(frozen=True)
class MonitorEvent:
    """Fired rule instance."""
    rule_id: str
    kind: RuleKind
    t: float
    value: float
    threshold: float
    terminal: bool
    message: str


@dataclass(frozen=True)
class Passing:
    """No terminal rule fired; sup of the watched indicator so far."""
    sup_value: float = 0.0

    @property
    def suspected(self) -> bool:
        return False


@dataclass(frozen=True)
class BlowupSuspected:
    """First record at which a terminal rule fired."""
    t: float
    value: float
    cap: float

    @property
    def suspected(self) -> bool:
        return True


MonitorStatus = Union[Passing, BlowupSuspected]


class ContinuationMonitor:
    """
    Watches records as they are produced.

    Each rule fires at most once. The first terminal event fixes the status
    to BlowupSuspected; later records are still checked against the
    remaining non-terminal rules.
    """

    def __init__(self):
        self.rules: Dict[str, MonitorRule] = {}
        self.event_history: List[MonitorEvent] = []
        self.fired: Dict[str, MonitorEvent] = {}
        self.callbacks: List[Callable] = []
        self.sup_indicator = 0.0
        self._blowup: Optional[BlowupSuspected] = None

    def add_rule(self, rule: MonitorRule):
        """Add a monitor rule."""
        self.rules[rule.rule_id] = rule
        logger.debug(f"Added monitor rule: {rule.rule_id} on {rule.field} (threshold {rule.threshold})")

    def disable_rule(self, rule_id: str):
        if rule_id in self.rules:
            self.rules[rule_id].enabled = False

    def register_callback(self, callback: Callable):
        """
        Register a function called with each MonitorEvent.

        Callback signature: def callback(event: MonitorEvent)
        """
        self.callbacks.append(callback)

    @property
    def status(self) -> MonitorStatus:
        if self._blowup is not None:
            return self._blowup
        return Passing(sup_value=self.sup_indicator)

    def check_rule(self, rule: MonitorRule, record) -> Optional[MonitorEvent]:
        """
        Check one rule against one record.

        Returns MonitorEvent if fired, None otherwise.
        """
        if not rule.enabled or rule.rule_id in self.fired:
            return None

        value = float(getattr(record, rule.field))
        try:
            should_fire = rule.condition(value, rule.threshold)
        except Exception as e:
            logger.error(f"Error evaluating monitor rule {rule.rule_id}: {e}")
            return None

        if not should_fire:
            return None

        event = MonitorEvent(
            rule_id=rule.rule_id,
            kind=rule.kind,
            t=float(record.t),
            value=value,
            threshold=rule.threshold,
            terminal=rule.terminal,
            message=rule.message_template.format(field=rule.field, value=value, threshold=rule.threshold, t=record.t),
        )
        self.fired[rule.rule_id] = event
        self.event_history.append(event)

        for callback in self.callbacks:
            try:
                callback(event)
            except Exception as e:
                logger.error(f"Error in monitor callback: {e}")

        logger.warning(f"Monitor: {event.message}")
        return event

    def check(self, record) -> MonitorStatus:
        """Run every rule against a record and return the updated status."""
        q = getattr(record, 'Q', None)
        if q is not None and math.isfinite(q):
            self.sup_indicator = max(self.sup_indicator, float(q))

        for rule in list(self.rules.values()):
            event = self.check_rule(rule, record)
            if event is not None and event.terminal and self._blowup is None:
                self._blowup = BlowupSuspected(t=event.t, value=event.value, cap=event.threshold)

        return self.status

    def events_frame(self) -> pd.DataFrame:
        """Event history as a DataFrame."""
        return pd.DataFrame(
            [
                {'rule_id': e.rule_id, 'kind': e.kind.value, 't': e.t, 'value': e.value,
                 'threshold': e.threshold, 'terminal': e.terminal}
                for e in self.event_history
            ],
            columns=['rule_id', 'kind', 't', 'value', 'threshold', 'terminal'],
        )

    def clear_history(self):
        self.event_history = []
        self.fired = {}
        self._blowup = None
        self.sup_indicator = 0.0


class MonitorConditions:
    """Common monitor condition functions."""

    @staticmethod
    def above(value: float, threshold: float) -> bool:
        """Fire when value exceeds threshold, or is no longer finite."""
        return not math.isfinite(value) or value > threshold

    @staticmethod
    def not_finite(value: float, threshold: float) -> bool:
        return not math.isfinite(value)


class MonitorRuleBuilder:
    """Helpers to build common rules."""

    @staticmethod
    def indicator_cap(cap: float) -> MonitorRule:
        """Q <= M0 permits continuation; the first exceedance is terminal."""
        if not cap > 0:
            raise ValueError(f"monitor cap must be > 0, got {cap}")
        return MonitorRule(
            rule_id=f"indicator_cap_{cap:g}",
            kind=RuleKind.INDICATOR_CAP,
            field='Q',
            condition=MonitorConditions.above,
            threshold=cap,
            terminal=True,
            message_template="blow-up suspected: Q = {value:.6g} > M0 = {threshold:.6g} at t = {t:.6g}",
        )

    @staticmethod
    def energy_cap(cap: float, terminal: bool = False) -> MonitorRule:
        """Informational cap on E_full."""
        return MonitorRule(
            rule_id=f"energy_cap_{cap:g}",
            kind=RuleKind.ENERGY_CAP,
            field='E_full',
            condition=MonitorConditions.above,
            threshold=cap,
            terminal=terminal,
        )

    @staticmethod
    def non_finite(field: str = 'E') -> MonitorRule:
        return MonitorRule(
            rule_id=f"non_finite_{field}",
            kind=RuleKind.NON_FINITE,
            field=field,
            condition=MonitorConditions.not_finite,
            threshold=math.inf,
            terminal=True,
            message_template="non-finite {field} at t = {t:.6g}",
        )


def continuation_monitor(records: Iterable, cap: float) -> MonitorStatus:
    """
    Passing while sup Q <= cap, else BlowupSuspected at the first record with Q > cap.

    Args:
        records: Iterable of objects with attributes t and Q
        cap: M0 > 0
    """
    monitor = ContinuationMonitor()
    monitor.add_rule(MonitorRuleBuilder.indicator_cap(cap))

    for record in records:
        status = monitor.check(record)
        if status.suspected:
            return status
    return monitor.status


if __name__ == "__main__":
    from collections import namedtuple

    Sample = namedtuple('Sample', ['t', 'Q'])
    stream = [Sample(t=0.001 * i, Q=1.0 / (1.0 - 0.001 * i)) for i in range(1000)]

    result = continuation_monitor(stream, cap=100.0)
    print(f"Synthetic 1/(1-t) stream with cap 100: {result}")
