"""
Scenario engine: time-varying parameters driven by trigger rules.

A run records the market and its risk report at every step, evaluates the
rules against that record, applies the actions of the rules that hold and
then advances the model under the updated parameters.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from config import get_config
from errors import ConfigValidationError, DivergenceError, InvalidParamsError, InvalidScenarioError, UnknownPresetError
from model import MarketState, Params, log_next_rate, step
from regime import CriticalParamSelector, RegimeKind
from risk import risk_report

logger = logging.getLogger('umwe.scenario')


class ParamTarget(Enum):
    ALPHA = 'alpha'
    BETA = 'beta'
    MU = 'mu'
    NU = 'nu'
    K = 'k'
    L = 'l'


class ConditionKind(Enum):
    ALWAYS = 'Always'
    TIME_AT_LEAST = 'TimeAtLeast'
    RATE_BELOW = 'RateBelow'
    RATE_ABOVE = 'RateAbove'
    REGIME_IS = 'RegimeIs'
    DISTANCE_BELOW = 'DistanceBelow'
    PROJECTED_RATE_BELOW = 'ProjectedRateBelow'
    PARAM_AT_MOST = 'ParamAtMost'
    PARAM_AT_LEAST = 'ParamAtLeast'
    RULE_FIRED = 'RuleFired'
    RULE_NOT_FIRED = 'RuleNotFired'
    ALL = 'All'


class DistanceMeasure(Enum):
    STABILITY = 'stability'
    DIRECTION = 'direction'


class ActionKind(Enum):
    SET_PARAM = 'SetParam'
    ADD_TO_PARAM = 'AddToParam'
    MULTIPLY_PARAM = 'MultiplyParam'
    RAMP_PARAM = 'RampParam'


@dataclass(frozen=True)
class StepContext:
    """What a condition may look at: the recorded snapshot and earlier firings."""

    t: int
    state: MarketState
    params: Params
    report: object
    rate_floor: float
    fired_before: frozenset


def _finite(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True)
class Condition:
    """
    Trigger condition of a rule. Only the fields its kind uses are set;
    build instances through the classmethods.
    """

    kind: ConditionKind
    threshold: Optional[float] = None
    regime: Optional[RegimeKind] = None
    selector: Optional[CriticalParamSelector] = None
    measure: DistanceMeasure = DistanceMeasure.STABILITY
    target: Optional[ParamTarget] = None
    rule_id: Optional[str] = None
    children: Tuple['Condition', ...] = ()

    @classmethod
    def always(cls):
        return cls(ConditionKind.ALWAYS)

    @classmethod
    def time_at_least(cls, t):
        return cls(ConditionKind.TIME_AT_LEAST, threshold=t)

    @classmethod
    def rate_below(cls, threshold):
        return cls(ConditionKind.RATE_BELOW, threshold=threshold)

    @classmethod
    def rate_above(cls, threshold):
        return cls(ConditionKind.RATE_ABOVE, threshold=threshold)

    @classmethod
    def regime_is(cls, regime):
        return cls(ConditionKind.REGIME_IS, regime=regime)

    @classmethod
    def distance_below(cls, selector, threshold, measure=DistanceMeasure.STABILITY):
        return cls(ConditionKind.DISTANCE_BELOW, threshold=threshold, selector=selector, measure=measure)

    @classmethod
    def projected_rate_below(cls, threshold=None):
        """Next-step rate under the parameters in force; None means the scenario's rate floor."""
        return cls(ConditionKind.PROJECTED_RATE_BELOW, threshold=threshold)

    @classmethod
    def param_at_most(cls, target, threshold):
        return cls(ConditionKind.PARAM_AT_MOST, threshold=threshold, target=target)

    @classmethod
    def param_at_least(cls, target, threshold):
        return cls(ConditionKind.PARAM_AT_LEAST, threshold=threshold, target=target)

    @classmethod
    def rule_fired(cls, rule_id):
        return cls(ConditionKind.RULE_FIRED, rule_id=rule_id)

    @classmethod
    def rule_not_fired(cls, rule_id):
        return cls(ConditionKind.RULE_NOT_FIRED, rule_id=rule_id)

    @classmethod
    def all_of(cls, *children):
        return cls(ConditionKind.ALL, children=tuple(children))

    def referenced_rules(self):
        if self.kind is ConditionKind.ALL:
            return {ref for child in self.children for ref in child.referenced_rules()}
        if self.rule_id is not None:
            return {self.rule_id}
        return set()

    def problems(self):
        kind = self.kind
        found = []
        if kind is ConditionKind.ALL:
            if not self.children:
                found.append('All needs at least one child condition')
            for child in self.children:
                found.extend(child.problems())
            return found
        if kind in (ConditionKind.RATE_BELOW, ConditionKind.RATE_ABOVE):
            if not _finite(self.threshold) or self.threshold <= 0:
                found.append(f'{kind.value} threshold must be positive and finite, got {self.threshold!r}')
        elif kind is ConditionKind.PROJECTED_RATE_BELOW:
            if self.threshold is not None and (not _finite(self.threshold) or self.threshold <= 0):
                found.append(f'{kind.value} threshold must be positive and finite, got {self.threshold!r}')
        elif kind is ConditionKind.TIME_AT_LEAST:
            if not isinstance(self.threshold, int) or isinstance(self.threshold, bool) or self.threshold < 0:
                found.append(f'TimeAtLeast needs a non-negative integer step, got {self.threshold!r}')
        elif kind is ConditionKind.DISTANCE_BELOW:
            if not isinstance(self.selector, CriticalParamSelector):
                found.append('DistanceBelow needs a selector')
            if not _finite(self.threshold):
                found.append(f'DistanceBelow threshold must be finite, got {self.threshold!r}')
        elif kind in (ConditionKind.PARAM_AT_MOST, ConditionKind.PARAM_AT_LEAST):
            if not isinstance(self.target, ParamTarget):
                found.append(f'{kind.value} needs a parameter target')
            if not _finite(self.threshold):
                found.append(f'{kind.value} threshold must be finite, got {self.threshold!r}')
        elif kind is ConditionKind.REGIME_IS:
            if not isinstance(self.regime, RegimeKind):
                found.append('RegimeIs needs a regime')
        elif kind in (ConditionKind.RULE_FIRED, ConditionKind.RULE_NOT_FIRED):
            if not self.rule_id:
                found.append(f'{kind.value} needs a rule id')
        return found

    def holds(self, ctx):
        kind = self.kind
        if kind is ConditionKind.ALWAYS:
            return True
        if kind is ConditionKind.ALL:
            return all(child.holds(ctx) for child in self.children)
        if kind is ConditionKind.TIME_AT_LEAST:
            return ctx.t >= self.threshold
        if kind is ConditionKind.RATE_BELOW:
            return ctx.state.i < self.threshold
        if kind is ConditionKind.RATE_ABOVE:
            return ctx.state.i > self.threshold
        if kind is ConditionKind.REGIME_IS:
            return ctx.report.regime.kind is self.regime
        if kind is ConditionKind.DISTANCE_BELOW:
            distances = ctx.report[self.selector]
            if self.measure is DistanceMeasure.DIRECTION:
                value = distances.direction_distance_abs
            else:
                value = distances.stability_distance_abs
            return value is not None and value < self.threshold
        if kind is ConditionKind.PROJECTED_RATE_BELOW:
            threshold = ctx.rate_floor if self.threshold is None else self.threshold
            return log_next_rate(ctx.state.log_i, ctx.params) < math.log(threshold)
        if kind is ConditionKind.PARAM_AT_MOST:
            return getattr(ctx.params, self.target.value) <= self.threshold
        if kind is ConditionKind.PARAM_AT_LEAST:
            return getattr(ctx.params, self.target.value) >= self.threshold
        if kind is ConditionKind.RULE_FIRED:
            return self.rule_id in ctx.fired_before
        return self.rule_id not in ctx.fired_before


@dataclass(frozen=True)
class Action:
    """
    Parameter change applied when a rule fires.

    RampParam moves the target by magnitude per step toward ramp_to and lands
    on it exactly; without ramp_to it keeps adding magnitude.
    """

    kind: ActionKind
    target: ParamTarget
    magnitude: float
    ramp_to: Optional[float] = None

    @classmethod
    def set_param(cls, target, value):
        return cls(ActionKind.SET_PARAM, target, value)

    @classmethod
    def add_to_param(cls, target, delta):
        return cls(ActionKind.ADD_TO_PARAM, target, delta)

    @classmethod
    def multiply_param(cls, target, factor):
        return cls(ActionKind.MULTIPLY_PARAM, target, factor)

    @classmethod
    def ramp_param(cls, target, per_step_delta, ramp_to=None):
        return cls(ActionKind.RAMP_PARAM, target, per_step_delta, ramp_to)

    def problems(self):
        found = []
        if not isinstance(self.target, ParamTarget):
            found.append(f'action target must be one of {[t.value for t in ParamTarget]}, got {self.target!r}')
        if not _finite(self.magnitude):
            found.append(f'action magnitude must be finite, got {self.magnitude!r}')
        if self.kind is ActionKind.RAMP_PARAM:
            if _finite(self.magnitude) and self.ramp_to is not None and self.magnitude <= 0:
                found.append('a bounded ramp needs a positive per-step delta')
            if self.ramp_to is not None and not _finite(self.ramp_to):
                found.append(f'ramp_to must be finite, got {self.ramp_to!r}')
        return found

    def new_value(self, current):
        if self.kind is ActionKind.SET_PARAM:
            return self.magnitude
        if self.kind is ActionKind.ADD_TO_PARAM:
            return current + self.magnitude
        if self.kind is ActionKind.MULTIPLY_PARAM:
            return current * self.magnitude
        if self.ramp_to is None:
            return current + self.magnitude
        gap = self.ramp_to - current
        if abs(gap) <= self.magnitude:
            return self.ramp_to
        return current + math.copysign(self.magnitude, gap)

    def apply(self, p):
        """Return the updated Params; InvalidParamsError when the result is not admissible."""
        name = self.target.value
        return p.with_(**{name: self.new_value(getattr(p, name))})


@dataclass(frozen=True)
class ScheduleRule:
    id: str
    condition: Condition
    action: Action
    one_shot: bool = False


@dataclass(frozen=True)
class Scenario:
    initial_params: Params
    initial_rate: float
    horizon: int
    rules: Tuple[ScheduleRule, ...] = ()
    rate_floor: float = field(default_factory=lambda: get_config().RATE_FLOOR)
    sample_every: int = 1
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'rules', tuple(self.rules))
        problems = []
        if not isinstance(self.initial_params, Params):
            problems.append('initial_params must be Params')
        if not _finite(self.initial_rate) or self.initial_rate <= 0:
            problems.append(f'initial_rate must be positive and finite, got {self.initial_rate!r}')
        if not isinstance(self.horizon, int) or isinstance(self.horizon, bool) or self.horizon < 1:
            problems.append(f'horizon must be an integer >= 1, got {self.horizon!r}')
        if not _finite(self.rate_floor) or self.rate_floor <= 0:
            problems.append(f'rate_floor must be positive and finite, got {self.rate_floor!r}')
        if not isinstance(self.sample_every, int) or isinstance(self.sample_every, bool) or self.sample_every < 1:
            problems.append(f'sample_every must be an integer >= 1, got {self.sample_every!r}')

        seen = set()
        for rule in self.rules:
            if rule.id in seen:
                problems.append(f'duplicate rule id {rule.id!r}')
            seen.add(rule.id)
            problems.extend(f'rule {rule.id!r}: {p}' for p in rule.condition.problems())
            problems.extend(f'rule {rule.id!r}: {p}' for p in rule.action.problems())
        for rule in self.rules:
            for ref in rule.condition.referenced_rules() - seen:
                problems.append(f'rule {rule.id!r} refers to unknown rule {ref!r}')
        if problems:
            raise InvalidScenarioError(problems)


@dataclass(frozen=True)
class Rejection:
    t: int
    rule_id: str
    reason: str


@dataclass(frozen=True)
class TrajectoryRecord:
    """State at t, the parameters in force at t and what fired at t."""

    t: int
    i: float
    n_loans: float
    d_defaults: float
    params: Params
    report: object
    fired_rules: Tuple[str, ...] = ()

    @property
    def alpha(self):
        return self.params.alpha

    @property
    def beta(self):
        return self.params.beta

    @property
    def mu(self):
        return self.params.mu

    @property
    def nu(self):
        return self.params.nu

    @property
    def a(self):
        return self.report.a

    @property
    def i_fix(self):
        return self.report.i_fix

    @property
    def regime(self):
        return self.report.regime.kind


@dataclass(frozen=True)
class Trajectory:
    records: Tuple[TrajectoryRecord, ...]
    aborted: bool = False
    abort_reason: Optional[str] = None
    rejections: Tuple[Rejection, ...] = ()

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def sampled(self, every=1):
        return self.records[::every]

    def column(self, name):
        """One record attribute as a float array; absent values become nan."""
        values = [getattr(record, name) for record in self.records]
        return np.array([np.nan if v is None else v for v in values], dtype=float)

    def fired_at(self, rule_id):
        """Steps at which the rule fired."""
        return [record.t for record in self.records if rule_id in record.fired_rules]


def run_scenario(sc):
    """Run sc to its horizon, or until the dynamics leave the representable range."""
    logger.info(
        'Running scenario %s: horizon %d, %d rules', sc.name or '<custom>', sc.horizon, len(sc.rules)
    )
    params = sc.initial_params
    try:
        state = MarketState.at_rate(sc.initial_rate, params)
    except DivergenceError as e:
        logger.warning('Scenario aborted before t=0: %s', e)
        return Trajectory(records=(), aborted=True, abort_reason=str(e))
    retired = set()
    fired_so_far = set()
    records = []
    rejections = []
    aborted, abort_reason = False, None

    for t in range(sc.horizon):
        report = risk_report(params, state.i)
        ctx = StepContext(
            t=t, state=state, params=params, report=report,
            rate_floor=sc.rate_floor, fired_before=frozenset(fired_so_far),
        )
        holding = [r for r in sc.rules if r.id not in retired and r.condition.holds(ctx)]

        fired = []
        recorded_params = params
        for rule in holding:
            try:
                updated = rule.action.apply(params)
            except InvalidParamsError as e:
                logger.warning('t=%d: rule %s rejected: %s', t, rule.id, e)
                rejections.append(Rejection(t, rule.id, str(e)))
                continue
            if updated == params:
                continue
            params = updated
            fired.append(rule.id)
            if rule.one_shot:
                retired.add(rule.id)
            logger.info('t=%d: rule %s fired (%s %s)', t, rule.id, rule.action.kind.value, rule.action.target.value)
        fired_so_far.update(fired)

        records.append(TrajectoryRecord(
            t=t, i=state.i, n_loans=state.n_loans, d_defaults=state.d_defaults,
            params=recorded_params, report=report, fired_rules=tuple(fired),
        ))
        logger.debug('t=%d i=%.12g a=%.12g regime=%s', t, state.i, report.a, report.regime.name)

        if t == sc.horizon - 1:
            break
        try:
            state = step(state, params)
        except DivergenceError as e:
            aborted, abort_reason = True, str(e)
            logger.warning('Scenario aborted after t=%d: %s', t, e)
            break

    logger.info('Scenario finished with %d records%s', len(records), ' (aborted)' if aborted else '')
    return Trajectory(
        records=tuple(records), aborted=aborted, abort_reason=abort_reason, rejections=tuple(rejections)
    )


# ---------------------------------------------------------------------------
# Phase detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Phase:
    label: RegimeKind
    start_t: int
    end_t: int

    @property
    def length(self):
        return self.end_t - self.start_t + 1


def _merge_adjacent(runs):
    merged = []
    for label, start, end in runs:
        if merged and merged[-1][0] is label:
            merged[-1][2] = end
        else:
            merged.append([label, start, end])
    return merged


def detect_phases(tr, min_length=None):
    """
    Segment the trajectory by regime. Runs shorter than min_length steps
    fold into the preceding run (the following one at the start).
    """
    if not len(tr):
        raise ValueError('cannot segment an empty trajectory')
    min_length = get_config().PHASE_MIN_LENGTH if min_length is None else min_length

    runs = _merge_adjacent([r.regime, r.t, r.t] for r in tr.records)
    while len(runs) > 1:
        short = next((n for n, (_, s, e) in enumerate(runs) if e - s + 1 < min_length), None)
        if short is None:
            break
        _, start, end = runs.pop(short)
        if short == 0:
            runs[0][1] = start
        else:
            runs[short - 1][2] = end
        runs = _merge_adjacent(runs)

    phases = [Phase(label, start, end) for label, start, end in runs]
    for phase in phases:
        logger.debug('phase %s from t=%d to t=%d', phase.label.value, phase.start_t, phase.end_t)
    return phases


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

CYCLE_PARAMS = Params(alpha=1.0, beta=1.0, mu=0.499, nu=0.499, k=105.5, l=0.0096)
CYCLE_INITIAL_RATE = 0.042


def _stable(horizon=400, initial_rate=CYCLE_INITIAL_RATE, sample_every=1, rate_floor=None):
    return Scenario(
        initial_params=CYCLE_PARAMS, initial_rate=initial_rate, horizon=horizon,
        rate_floor=rate_floor or get_config().RATE_FLOOR, sample_every=sample_every, name='stable',
    )


def _bubble(horizon=150, initial_rate=CYCLE_INITIAL_RATE, calm_steps=100, alpha_ramp=0.004,
            sample_every=1, rate_floor=None):
    rules = [
        ScheduleRule('confidence_ramp', Condition.time_at_least(calm_steps),
                     Action.add_to_param(ParamTarget.ALPHA, alpha_ramp)),
    ]
    return Scenario(
        initial_params=CYCLE_PARAMS, initial_rate=initial_rate, horizon=horizon, rules=rules,
        rate_floor=rate_floor or get_config().RATE_FLOOR, sample_every=sample_every, name='bubble',
    )


def _full_cycle(horizon=4000, initial_rate=CYCLE_INITIAL_RATE, calm_steps=100, alpha_ramp=0.004,
                beta_shock=1.6, alpha_retreat=0.01, beta_recovery=0.02, sample_every=1, rate_floor=None):
    rules = [
        # confidence: alpha grows after the calm period until banks take fright
        ScheduleRule(
            'confidence_ramp',
            Condition.all_of(Condition.time_at_least(calm_steps), Condition.rule_not_fired('beta_shock')),
            Action.add_to_param(ParamTarget.ALPHA, alpha_ramp),
        ),
        ScheduleRule(
            'beta_shock', Condition.projected_rate_below(),
            Action.set_param(ParamTarget.BETA, beta_shock), one_shot=True,
        ),
        ScheduleRule(
            'alpha_retreat', Condition.rule_fired('beta_shock'),
            Action.ramp_param(ParamTarget.ALPHA, alpha_retreat, ramp_to=1.0),
        ),
        ScheduleRule(
            'beta_recovery',
            Condition.all_of(Condition.rule_fired('beta_shock'), Condition.param_at_most(ParamTarget.ALPHA, 1.0)),
            Action.ramp_param(ParamTarget.BETA, beta_recovery, ramp_to=1.0),
        ),
    ]
    return Scenario(
        initial_params=CYCLE_PARAMS, initial_rate=initial_rate, horizon=horizon, rules=rules,
        rate_floor=rate_floor or get_config().RATE_FLOOR, sample_every=sample_every, name='full_cycle',
    )


def _alpha_only_crash(horizon=250, initial_rate=0.03, alpha0=1.007, alpha_ramp=0.0001,
                      sample_every=1, rate_floor=None):
    params = Params(alpha=alpha0, beta=1.0, mu=0.499, nu=0.499, k=1e-12, l=1.27e12)
    rules = [
        ScheduleRule('alpha_ramp', Condition.always(), Action.add_to_param(ParamTarget.ALPHA, alpha_ramp)),
    ]
    return Scenario(
        initial_params=params, initial_rate=initial_rate, horizon=horizon, rules=rules,
        rate_floor=rate_floor or get_config().RATE_FLOOR, sample_every=sample_every, name='alpha_only_crash',
    )


def _textbook(name, a, initial_rate):
    def build(horizon=60, initial_rate=initial_rate, i_fix=0.04, sample_every=1, rate_floor=None):
        return Scenario(
            initial_params=Params.with_composite(a, i_fix), initial_rate=initial_rate, horizon=horizon,
            rate_floor=rate_floor or get_config().RATE_FLOOR, sample_every=sample_every, name=name,
        )
    return build


PRESETS = {
    'stable': _stable,
    'bubble': _bubble,
    'full_cycle': _full_cycle,
    'alpha_only_crash': _alpha_only_crash,
    'textbook_stable': _textbook('textbook_stable', 0.9, 0.045),
    'textbook_bubble': _textbook('textbook_bubble', 1.1, 0.035),
    'textbook_crash': _textbook('textbook_crash', 1.1, 0.045),
}


def preset(name, **overrides):
    """Build a named scenario; keyword overrides replace its documented defaults."""
    builder = PRESETS.get(name)
    if builder is None:
        raise UnknownPresetError(name, PRESETS)
    try:
        return builder(**overrides)
    except TypeError as e:
        raise InvalidScenarioError([f'preset {name!r}: {e}']) from e


# ---------------------------------------------------------------------------
# Dict form (the JSON layout used by config files)
# ---------------------------------------------------------------------------

def condition_to_dict(c):
    data = {'kind': c.kind.value}
    if c.kind is ConditionKind.ALL:
        data['children'] = [condition_to_dict(child) for child in c.children]
        return data
    if c.threshold is not None:
        data['threshold'] = c.threshold
    if c.regime is not None:
        data['regime'] = c.regime.value
    if c.selector is not None:
        data['selector'] = c.selector.value
        data['measure'] = c.measure.value
    if c.target is not None:
        data['target'] = c.target.value
    if c.rule_id is not None:
        data['rule'] = c.rule_id
    return data


def action_to_dict(a):
    data = {'kind': a.kind.value, 'target': a.target.value, 'magnitude': a.magnitude}
    if a.ramp_to is not None:
        data['ramp_to'] = a.ramp_to
    return data


def scenario_to_dict(sc):
    data = {
        'params': sc.initial_params.to_dict(),
        'initial_rate': sc.initial_rate,
        'horizon': sc.horizon,
        'rate_floor': sc.rate_floor,
        'sample_every': sc.sample_every,
        'rules': [
            {
                'id': rule.id,
                'one_shot': rule.one_shot,
                'when': condition_to_dict(rule.condition),
                'then': action_to_dict(rule.action),
            }
            for rule in sc.rules
        ],
    }
    if sc.name:
        data['name'] = sc.name
    return data


def _enum(enum_cls, raw, path, errors):
    try:
        return enum_cls(raw)
    except ValueError:
        errors.append((path, f'must be one of {[m.value for m in enum_cls]}, got {raw!r}'))
        return None


def _condition_from_dict(data, path, errors):
    if not isinstance(data, dict):
        errors.append((path, 'must be an object'))
        return None
    kind = _enum(ConditionKind, data.get('kind'), f'{path}.kind', errors)
    if kind is None:
        return None
    if kind is ConditionKind.ALL:
        children = data.get('children')
        if not isinstance(children, list):
            errors.append((f'{path}.children', 'must be a list'))
            return None
        parsed = [_condition_from_dict(c, f'{path}.children[{n}]', errors) for n, c in enumerate(children)]
        return Condition(kind, children=tuple(parsed)) if None not in parsed else None

    fields = {'threshold': data.get('threshold'), 'rule_id': data.get('rule')}
    if 'regime' in data:
        fields['regime'] = _enum(RegimeKind, data['regime'], f'{path}.regime', errors)
    if 'selector' in data:
        fields['selector'] = _enum(CriticalParamSelector, data['selector'], f'{path}.selector', errors)
        fields['measure'] = _enum(DistanceMeasure, data.get('measure', 'stability'), f'{path}.measure', errors)
    if 'target' in data:
        fields['target'] = _enum(ParamTarget, data['target'], f'{path}.target', errors)
    condition = Condition(kind, **fields)
    errors.extend((path, problem) for problem in condition.problems())
    return condition


def _action_from_dict(data, path, errors):
    if not isinstance(data, dict):
        errors.append((path, 'must be an object'))
        return None
    kind = _enum(ActionKind, data.get('kind'), f'{path}.kind', errors)
    target = _enum(ParamTarget, data.get('target'), f'{path}.target', errors)
    if kind is None or target is None:
        return None
    action = Action(kind, target, data.get('magnitude'), data.get('ramp_to'))
    errors.extend((path, problem) for problem in action.problems())
    return action


def params_from_dict(data, path, errors):
    """Params from a mapping, appending (field path, message) pairs on failure."""
    if not isinstance(data, dict):
        errors.append((path, 'must be an object'))
        return None
    missing = [name for name in ParamTarget if name.value not in data]
    for target in missing:
        errors.append((f'{path}.{target.value}', 'is required'))
    unknown = set(data) - {t.value for t in ParamTarget}
    for name in sorted(unknown):
        errors.append((f'{path}.{name}', 'unknown parameter'))
    bad = False
    for target in ParamTarget:
        value = data.get(target.value)
        if target in missing:
            continue
        if not _finite(value) or value <= 0:
            errors.append((f'{path}.{target.value}', f'must be strictly positive and finite, got {value!r}'))
            bad = True
    if missing or unknown or bad:
        return None
    try:
        return Params(**data)
    except InvalidParamsError as e:
        errors.extend((path, v) for v in e.violations)
        return None


def scenario_from_dict(data, path='', errors=None):
    """
    Rebuild a Scenario from its dict form.

    With an errors list the (field path, message) problems are appended and
    None is returned on failure; without one ConfigValidationError is raised.
    """
    collect = [] if errors is None else errors
    before = len(collect)
    prefix = f'{path}.' if path else ''

    if not isinstance(data, dict):
        collect.append((path or '<root>', 'scenario must be an object'))
    else:
        params = params_from_dict(data.get('params'), f'{prefix}params', collect)
        for name in ('initial_rate', 'rate_floor'):
            value = data.get(name, 1.0 if name == 'rate_floor' else None)
            if not _finite(value) or value <= 0:
                collect.append((f'{prefix}{name}', f'must be positive and finite, got {value!r}'))
        for name, default in (('horizon', None), ('sample_every', 1)):
            value = data.get(name, default)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                collect.append((f'{prefix}{name}', f'must be an integer >= 1, got {value!r}'))
        rules = []
        raw_rules = data.get('rules', [])
        if not isinstance(raw_rules, list):
            collect.append((f'{prefix}rules', 'must be a list'))
            raw_rules = []
        for n, raw in enumerate(raw_rules):
            rule_path = f'{prefix}rules[{n}]'
            if not isinstance(raw, dict):
                collect.append((rule_path, 'must be an object'))
                continue
            rule_id = raw.get('id')
            if not isinstance(rule_id, str) or not rule_id:
                collect.append((f'{rule_path}.id', 'must be a non-empty string'))
            one_shot = raw.get('one_shot', False)
            if not isinstance(one_shot, bool):
                collect.append((f'{rule_path}.one_shot', 'must be true or false'))
            condition = _condition_from_dict(raw.get('when'), f'{rule_path}.when', collect)
            action = _action_from_dict(raw.get('then'), f'{rule_path}.then', collect)
            rules.append(ScheduleRule(rule_id, condition, action, bool(one_shot)))

        if len(collect) == before:
            try:
                return Scenario(
                    initial_params=params,
                    initial_rate=data.get('initial_rate'),
                    horizon=data.get('horizon'),
                    rules=tuple(rules),
                    rate_floor=data.get('rate_floor', get_config().RATE_FLOOR),
                    sample_every=data.get('sample_every', 1),
                    name=data.get('name'),
                )
            except InvalidScenarioError as e:
                collect.extend((path or '<root>', problem) for problem in e.problems)

    if errors is None:
        raise ConfigValidationError(collect)
    return None
