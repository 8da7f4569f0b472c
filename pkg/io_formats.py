"""
Run configuration parsing and trajectory CSV output.

A config file is one JSON document. Scenario fields sit at the top level
(optionally starting from a named preset), next to an "output" block and an
optional "sweep" block:

    {
      "preset": "full_cycle",
      "preset_options": {"alpha_ramp": 0.005},
      "rate_floor": 0.02,
      "output": {"csv": "cycle.csv", "chart": "cycle.svg", "precision": 12},
      "sweep": {"target": "alpha", "lo": 0.9, "hi": 1.1, "steps": 2001}
    }

config_schema() returns the full JSON Schema of this document (also printed
by `umwe schema`), including the options each preset accepts.
"""
import csv
import inspect
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Optional

from config import get_config
from errors import ConfigParseError, ConfigValidationError, InvalidScenarioError, OutputPathError, UnknownPresetError
from regime import CriticalParamSelector, RegimeKind
from scenario import (
    PRESETS,
    ActionKind,
    ConditionKind,
    DistanceMeasure,
    ParamTarget,
    params_from_dict,
    preset,
    scenario_from_dict,
    scenario_to_dict,
)

logger = logging.getLogger('umwe.io')

SCENARIO_KEYS = ('params', 'initial_rate', 'horizon', 'rules', 'rate_floor', 'sample_every', 'name')
TOP_LEVEL_KEYS = frozenset(SCENARIO_KEYS) | {'preset', 'preset_options', 'output', 'sweep'}
SWEEP_TARGETS = ('alpha', 'beta', 'mu', 'nu', 'k', 'l', 'i0')

CSV_HEADER = [
    't', 'i', 'N', 'D', 'alpha', 'beta', 'mu', 'nu', 'a', 'i_fix', 'regime',
    'delta_alpha_crit', 'delta_beta_crit', 'delta_mu_crit', 'delta_nu_crit', 'delta_Delta_crit',
    'dir_delta_Delta', 'fired_rules',
]


@dataclass(frozen=True)
class SweepSpec:
    target: str
    lo: float
    hi: float
    steps: int
    params: object
    i0: float


@dataclass(frozen=True)
class RunConfig:
    scenario: Optional[object] = None
    sweep: Optional[SweepSpec] = None
    csv_path: Optional[str] = None
    chart_path: Optional[str] = None
    chart: bool = True
    precision: int = 12

    @property
    def sample_every(self):
        return self.scenario.sample_every if self.scenario is not None else 1

    @property
    def chart_enabled(self):
        return self.chart and self.chart_path is not None

    def output_paths(self):
        paths = [self.csv_path]
        if self.chart_enabled:
            paths.append(self.chart_path)
        return [p for p in paths if p]

    def check_paths(self, extra=()):
        """Fail before a run when any output file could not be written."""
        for path in [*self.output_paths(), *[p for p in extra if p]]:
            check_writable(path)


def check_writable(path):
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise OutputPathError(path, f'directory {directory} does not exist')
    if os.path.isdir(path):
        raise OutputPathError(path, 'is a directory')
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OutputPathError(path, 'file is not writable')
    if not os.path.exists(path) and not os.access(directory, os.W_OK):
        raise OutputPathError(path, f'directory {directory} is not writable')


def _reject_constant(name):
    raise ValueError(f'{name} is not a valid number')


def _decode(text):
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            before = text[:e.start]
            line = before.count(b'\n') + 1
            column = e.start - (before.rfind(b'\n') + 1) + 1
            raise ConfigParseError('invalid UTF-8', line, column) from e
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from e
    except ValueError as e:
        raise ConfigParseError(str(e), 1, 1) from e


def _precision(raw, errors, path='output.precision'):
    cfg = get_config()
    if raw is None:
        return cfg.OUTPUT_PRECISION
    if not isinstance(raw, int) or isinstance(raw, bool) or not cfg.MIN_PRECISION <= raw <= cfg.MAX_PRECISION:
        errors.append((path, f'must be an integer in [{cfg.MIN_PRECISION}, {cfg.MAX_PRECISION}], got {raw!r}'))
        return cfg.OUTPUT_PRECISION
    return raw


def _scenario_dict(data, errors):
    """Scenario fields of the config, laid over the named preset when there is one."""
    name = data.get('preset')
    if name is None:
        return {key: data[key] for key in SCENARIO_KEYS if key in data}
    options = data.get('preset_options', {})
    if not isinstance(options, dict):
        errors.append(('preset_options', 'must be an object'))
        return None
    try:
        merged = scenario_to_dict(preset(name, **options))
    except UnknownPresetError as e:
        errors.append(('preset', str(e)))
        return None
    except InvalidScenarioError as e:
        errors.extend(('preset_options', problem) for problem in e.problems)
        return None
    for key in SCENARIO_KEYS:
        if key not in data:
            continue
        if key == 'params' and isinstance(data['params'], dict):
            merged['params'] = {**merged['params'], **data['params']}
        else:
            merged[key] = data[key]
    return merged


def _sweep_spec(raw, scenario_data, errors):
    if not isinstance(raw, dict):
        errors.append(('sweep', 'must be an object'))
        return None
    target = raw.get('target')
    if target not in SWEEP_TARGETS:
        errors.append(('sweep.target', f'must be one of {list(SWEEP_TARGETS)}, got {target!r}'))
    lo, hi, steps = raw.get('lo'), raw.get('hi'), raw.get('steps')
    bounds_ok = True
    for name, value in (('lo', lo), ('hi', hi)):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            errors.append((f'sweep.{name}', f'must be positive and finite, got {value!r}'))
            bounds_ok = False
    if bounds_ok and not lo < hi:
        errors.append(('sweep.hi', f'must be greater than lo ({lo!r}), got {hi!r}'))
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 2:
        errors.append(('sweep.steps', f'must be an integer >= 2, got {steps!r}'))

    params = params_from_dict((scenario_data or {}).get('params'), 'params', errors)
    i0 = (scenario_data or {}).get('initial_rate')
    if isinstance(i0, bool) or not isinstance(i0, (int, float)) or not math.isfinite(i0) or i0 <= 0:
        errors.append(('initial_rate', f'a sweep needs a positive initial_rate, got {i0!r}'))
    if errors:
        return None
    return SweepSpec(target=target, lo=float(lo), hi=float(hi), steps=steps, params=params, i0=float(i0))


def parse_config(text, precision=None):
    """
    Parse and validate a run configuration.

    Raises ConfigParseError with line and column for malformed JSON and
    ConfigValidationError listing every invalid field otherwise.
    """
    data = _decode(text)
    if not isinstance(data, dict):
        raise ConfigValidationError([('<root>', 'configuration must be a JSON object')])

    errors = []
    for key in sorted(set(data) - TOP_LEVEL_KEYS):
        errors.append((key, 'unknown field'))

    output = data.get('output', {})
    if not isinstance(output, dict):
        errors.append(('output', 'must be an object'))
        output = {}
    for key in ('csv', 'chart'):
        if output.get(key) is not None and not isinstance(output[key], str):
            errors.append((f'output.{key}', 'must be a path string'))
    chart = output.get('chart_enabled', True)
    if not isinstance(chart, bool):
        errors.append(('output.chart_enabled', 'must be true or false'))
    digits = _precision(precision if precision is not None else output.get('precision'), errors,
                        '--precision' if precision is not None else 'output.precision')

    scenario_data = _scenario_dict(data, errors)
    scenario = None
    wants_scenario = 'preset' in data or 'horizon' in data or 'sweep' not in data
    if scenario_data is not None and wants_scenario:
        scenario = scenario_from_dict(scenario_data, errors=errors)

    sweep = None
    if 'sweep' in data:
        sweep_errors = []
        sweep = _sweep_spec(data['sweep'], scenario_data, sweep_errors)
        errors.extend(e for e in sweep_errors if e not in errors)

    if errors:
        raise ConfigValidationError(errors)
    return RunConfig(
        scenario=scenario,
        sweep=sweep,
        csv_path=output.get('csv'),
        chart_path=output.get('chart'),
        chart=chart,
        precision=digits,
    )


def preset_config(name, **options):
    """A ready-to-edit config document for a preset, with every field spelled out."""
    data = scenario_to_dict(preset(name, **options))
    data['output'] = {'csv': f'{name}.csv', 'chart': f'{name}.svg', 'precision': get_config().OUTPUT_PRECISION}
    return data


def preset_names():
    return sorted(PRESETS)


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

_POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}


def _enum_values(enum_cls):
    return [member.value for member in enum_cls]


def _preset_option_schemas():
    """One closed object schema per preset, listing its keyword options and defaults."""
    schemas = {}
    for name in preset_names():
        options = inspect.signature(PRESETS[name]).parameters
        schemas[f'preset_options.{name}'] = {
            'type': 'object',
            'properties': {opt: {'default': param.default} for opt, param in options.items()},
            'additionalProperties': False,
        }
    return schemas


def config_schema():
    """
    JSON Schema of a run configuration, built from the same enums, preset
    builders and config defaults that parse_config checks against.
    """
    cfg = get_config()
    condition = {
        'type': 'object',
        'required': ['kind'],
        'properties': {
            'kind': {'enum': _enum_values(ConditionKind)},
            'threshold': {
                'type': ['number', 'null'],
                'description': (
                    'TimeAtLeast: first step; RateBelow, RateAbove: rate; ProjectedRateBelow: rate, '
                    'null for the scenario rate_floor; DistanceBelow: distance; ParamAtMost, ParamAtLeast: '
                    'parameter value'
                ),
            },
            'regime': {'enum': _enum_values(RegimeKind), 'description': 'RegimeIs'},
            'selector': {'enum': _enum_values(CriticalParamSelector), 'description': 'DistanceBelow'},
            'measure': {'enum': _enum_values(DistanceMeasure), 'default': DistanceMeasure.STABILITY.value,
                        'description': 'DistanceBelow'},
            'target': {'enum': _enum_values(ParamTarget), 'description': 'ParamAtMost, ParamAtLeast'},
            'rule': {'type': 'string', 'description': 'RuleFired, RuleNotFired: id of another rule of the scenario'},
            'children': {'type': 'array', 'items': {'$ref': '#/$defs/condition'}, 'description': 'All'},
        },
    }
    action = {
        'type': 'object',
        'required': ['kind', 'target', 'magnitude'],
        'properties': {
            'kind': {'enum': _enum_values(ActionKind)},
            'target': {'enum': _enum_values(ParamTarget)},
            'magnitude': {
                'type': 'number',
                'description': 'SetParam: new value; AddToParam: increment; MultiplyParam: factor; '
                               'RampParam: change per step',
            },
            'ramp_to': {'type': ['number', 'null'], 'default': None,
                        'description': 'RampParam: value the ramp stops on; null ramps without bound'},
        },
    }
    rule = {
        'type': 'object',
        'required': ['id', 'when', 'then'],
        'properties': {
            'id': {'type': 'string', 'minLength': 1},
            'one_shot': {'type': 'boolean', 'default': False},
            'when': {'$ref': '#/$defs/condition'},
            'then': {'$ref': '#/$defs/action'},
        },
    }
    params = {
        'type': 'object',
        'required': _enum_values(ParamTarget),
        'properties': {name: _POSITIVE for name in _enum_values(ParamTarget)},
        'additionalProperties': False,
        'description': 'with a preset, any subset overrides the preset values field by field',
    }
    return {
        '$schema': 'https://json-schema.org/draft/2020-12/schema',
        'title': 'umwe run configuration',
        'type': 'object',
        'additionalProperties': False,
        'properties': {
            'preset': {'enum': preset_names()},
            'preset_options': {
                'type': 'object',
                'default': {},
                'description': 'keyword options of the named preset; see $defs/preset_options.<name>',
            },
            'params': params,
            'initial_rate': _POSITIVE,
            'horizon': {'type': 'integer', 'minimum': 1},
            'rules': {'type': 'array', 'items': {'$ref': '#/$defs/rule'}, 'default': []},
            'rate_floor': {**_POSITIVE, 'default': cfg.RATE_FLOOR},
            'sample_every': {'type': 'integer', 'minimum': 1, 'default': 1},
            'name': {'type': ['string', 'null'], 'default': None},
            'output': {
                'type': 'object',
                'properties': {
                    'csv': {'type': ['string', 'null'], 'default': None},
                    'chart': {'type': ['string', 'null'], 'default': None},
                    'chart_enabled': {'type': 'boolean', 'default': True},
                    'precision': {'type': 'integer', 'minimum': cfg.MIN_PRECISION,
                                  'maximum': cfg.MAX_PRECISION, 'default': cfg.OUTPUT_PRECISION},
                },
            },
            'sweep': {
                'type': 'object',
                'required': ['target', 'lo', 'hi', 'steps'],
                'properties': {
                    'target': {'enum': list(SWEEP_TARGETS)},
                    'lo': _POSITIVE,
                    'hi': {**_POSITIVE, 'description': 'greater than lo'},
                    'steps': {'type': 'integer', 'minimum': 2},
                },
                'description': 'grid over one parameter (or i0), around the scenario params and initial_rate',
            },
        },
        '$defs': {'condition': condition, 'action': action, 'rule': rule, **_preset_option_schemas()},
    }


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def format_number(value, precision):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    return f'{value:.{precision}g}'


def _row(record, precision):
    report = record.report
    num = lambda v: format_number(v, precision)  # noqa: E731
    row = [
        str(record.t), num(record.i), num(record.n_loans), num(record.d_defaults),
        num(record.alpha), num(record.beta), num(record.mu), num(record.nu),
        num(record.a), num(record.i_fix), record.regime.value,
    ]
    row.extend(num(report[sel].stability_distance_abs) for sel in CriticalParamSelector)
    row.append(num(report[CriticalParamSelector.DELTA].direction_distance_abs))
    row.append(';'.join(record.fired_rules))
    return row


def write_trajectory_csv(tr, stream, precision, sample_every=1):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for record in tr.sampled(sample_every):
        writer.writerow(_row(record, precision))


def emit_csv(tr, cfg, path=None):
    """Write the sampled trajectory to path (default cfg.csv_path) and return the path."""
    if not len(tr):
        raise ValueError('cannot write an empty trajectory')
    path = path or cfg.csv_path
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            write_trajectory_csv(tr, f, cfg.precision, cfg.sample_every)
    except OSError as e:
        raise OutputPathError(path, e.strerror or str(e)) from e
    logger.info('Wrote %s', path)
    return path
