"""
Tests for config parsing, CSV and SVG output and parameter sweeps.
"""
import csv
import json

import pytest

from charts import emit_chart
from errors import ConfigParseError, ConfigValidationError, OutputPathError
from io_formats import (
    CSV_HEADER,
    TOP_LEVEL_KEYS,
    RunConfig,
    SweepSpec,
    config_schema,
    emit_csv,
    parse_config,
    preset_config,
)
from model import Params, fixed_point
from regime import RegimeKind
from scenario import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    ParamTarget,
    Scenario,
    ScheduleRule,
    preset,
    run_scenario,
)
from sweep import run_sweep, sweep_points


def _config(**data):
    return json.dumps(data).encode('utf-8')


def _read_rows(path):
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


class TestParseConfig:
    """Tests for run configuration parsing."""

    def test_minimal_preset_config(self):
        """A bare preset name is filled in with defaults."""
        cfg = parse_config(_config(preset='stable'))
        assert cfg.scenario == preset('stable')
        assert cfg.precision == 12
        assert cfg.csv_path is None
        assert cfg.sweep is None

    def test_negative_alpha_names_field(self):
        """alpha = -1 is reported at params.alpha."""
        with pytest.raises(ConfigValidationError) as exc:
            parse_config(_config(preset='stable', params={'alpha': -1}))
        assert 'params.alpha' in exc.value.paths

    def test_reports_every_violation(self):
        """All invalid fields are listed together."""
        data = _config(
            params={'alpha': -1, 'beta': 1, 'mu': 0.5, 'nu': 0.5, 'k': 1, 'l': 1},
            initial_rate=0.04, horizon=0, output={'precision': 40}, colour='red',
        )
        with pytest.raises(ConfigValidationError) as exc:
            parse_config(data)
        assert {'params.alpha', 'horizon', 'output.precision', 'colour'} <= set(exc.value.paths)

    def test_rate_floor_override(self):
        """Overriding the floor of full_cycle reaches the scenario."""
        cfg = parse_config(_config(preset='full_cycle', rate_floor=0.02))
        assert cfg.scenario.rate_floor == 0.02

    def test_preset_options(self):
        """preset_options feed the preset builder."""
        cfg = parse_config(_config(preset='full_cycle', preset_options={'beta_shock': 1.8}))
        shock = next(r for r in cfg.scenario.rules if r.id == 'beta_shock')
        assert shock.action.magnitude == 1.8

    def test_parse_error_has_position(self):
        """Malformed JSON reports line and column."""
        with pytest.raises(ConfigParseError) as exc:
            parse_config(b'{\n  "preset": \n}')
        assert exc.value.line == 3
        assert exc.value.column == 1

    def test_nan_is_not_a_number(self):
        """Non-standard JSON constants are parse errors."""
        with pytest.raises(ConfigParseError):
            parse_config(b'{"preset": "stable", "rate_floor": NaN}')

    def test_precision_flag_overrides_config(self):
        """The command-line precision wins over the file."""
        assert parse_config(_config(preset='stable', output={'precision': 8}), precision=15).precision == 15

    def test_sweep_block(self):
        """A sweep block yields a SweepSpec with the scenario's parameters."""
        cfg = parse_config(_config(preset='stable', sweep={'target': 'alpha', 'lo': 0.9, 'hi': 1.1, 'steps': 21}))
        assert cfg.sweep == SweepSpec('alpha', 0.9, 1.1, 21, preset('stable').initial_params, 0.042)

    def test_sweep_needs_increasing_range(self):
        """lo = hi is rejected."""
        with pytest.raises(ConfigValidationError) as exc:
            parse_config(_config(preset='stable', sweep={'target': 'alpha', 'lo': 1.0, 'hi': 1.0, 'steps': 5}))
        assert 'sweep.hi' in exc.value.paths


class TestConfigSchema:
    """Tests for the published config schema."""

    def test_top_level_keys_match_parser(self):
        """The schema lists exactly the fields parse_config accepts."""
        schema = config_schema()
        assert set(schema['properties']) == TOP_LEVEL_KEYS
        assert schema['additionalProperties'] is False

    def test_rule_kinds_are_enumerated(self):
        """Condition and action kinds come from the engine's enums."""
        defs = config_schema()['$defs']
        assert defs['condition']['properties']['kind']['enum'] == [k.value for k in ConditionKind]
        assert defs['action']['properties']['kind']['enum'] == [k.value for k in ActionKind]
        assert defs['rule']['required'] == ['id', 'when', 'then']

    def test_preset_options_carry_defaults(self):
        """Each preset's keyword options are listed with their defaults."""
        options = config_schema()['$defs']['preset_options.full_cycle']['properties']
        assert options['beta_shock']['default'] == 1.6
        assert options['horizon']['default'] == 4000
        assert config_schema()['$defs']['preset_options.full_cycle']['additionalProperties'] is False

    def test_output_defaults_follow_config(self):
        """Precision bounds and default are the configured ones."""
        precision = config_schema()['properties']['output']['properties']['precision']
        assert (precision['minimum'], precision['maximum'], precision['default']) == (6, 17, 12)

    def test_written_preset_uses_only_schema_fields(self):
        """A preset config document stays inside the schema's field names."""
        schema = config_schema()
        data = preset_config('full_cycle')
        assert set(data) <= set(schema['properties'])
        condition_fields = set(schema['$defs']['condition']['properties'])
        action_fields = set(schema['$defs']['action']['properties'])
        for rule in data['rules']:
            assert set(rule) <= set(schema['$defs']['rule']['properties'])
            assert set(rule['when']) <= condition_fields
            assert set(rule['then']) <= action_fields

    def test_is_plain_json(self):
        """The schema serialises without non-standard constants."""
        json.dumps(config_schema(), allow_nan=False)


class TestEmitCsv:
    """Tests for trajectory CSV output."""

    def test_header_and_row_count(self, tmp_path):
        """Three steps give a header and three rows."""
        path = tmp_path / 'stable.csv'
        tr = run_scenario(preset('stable', horizon=3))
        emit_csv(tr, RunConfig(csv_path=str(path)))
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == ','.join(CSV_HEADER)
        assert lines[0] == (
            't,i,N,D,alpha,beta,mu,nu,a,i_fix,regime,delta_alpha_crit,delta_beta_crit,'
            'delta_mu_crit,delta_nu_crit,delta_Delta_crit,dir_delta_Delta,fired_rules'
        )

    def test_values_parse_back(self, tmp_path):
        """Numeric fields reproduce the trajectory to the configured digits."""
        path = tmp_path / 'cycle.csv'
        tr = run_scenario(preset('full_cycle', horizon=150))
        emit_csv(tr, RunConfig(csv_path=str(path), precision=12))
        for row, record in zip(_read_rows(path), tr):
            assert int(row['t']) == record.t
            assert float(row['i']) == pytest.approx(record.i, rel=1e-11)
            assert float(row['a']) == pytest.approx(record.a, rel=1e-11)
            assert row['regime'] == record.regime.value

    def test_fixed_point_absent_at_bifurcation(self, tmp_path, bifurcation_params):
        """i_fix is an empty field when a = 1."""
        path = tmp_path / 'flat.csv'
        tr = run_scenario(Scenario(initial_params=bifurcation_params, initial_rate=0.05, horizon=3))
        emit_csv(tr, RunConfig(csv_path=str(path)))
        rows = _read_rows(path)
        assert [row['i_fix'] for row in rows] == ['', '', '']
        assert rows[0]['regime'] == 'BifurcationConstant'

    def test_fired_rules_are_joined(self, tmp_path, cycle_params):
        """Rules firing together are ;-joined in listed order."""
        rules = [
            ScheduleRule('up', Condition.always(), Action.add_to_param(ParamTarget.ALPHA, 0.001), one_shot=True),
            ScheduleRule('shift', Condition.always(), Action.add_to_param(ParamTarget.BETA, 0.001), one_shot=True),
        ]
        path = tmp_path / 'rules.csv'
        tr = run_scenario(Scenario(initial_params=cycle_params, initial_rate=0.042, horizon=2, rules=rules))
        emit_csv(tr, RunConfig(csv_path=str(path)))
        assert [row['fired_rules'] for row in _read_rows(path)] == ['up;shift', '']

    def test_sample_every_thins_rows(self, tmp_path):
        """Only every n-th step is written."""
        path = tmp_path / 'thin.csv'
        sc = preset('stable', horizon=5, sample_every=2)
        emit_csv(run_scenario(sc), RunConfig(scenario=sc, csv_path=str(path)))
        assert [row['t'] for row in _read_rows(path)] == ['0', '2', '4']

    def test_unwritable_path(self, tmp_path):
        """I/O failures name the path."""
        path = tmp_path / 'missing' / 'out.csv'
        with pytest.raises(OutputPathError) as exc:
            emit_csv(run_scenario(preset('stable', horizon=2)), RunConfig(csv_path=str(path)))
        assert str(path) in str(exc.value)

    def test_paths_checked_before_run(self, tmp_path):
        """check_paths fails on a missing directory."""
        with pytest.raises(OutputPathError):
            RunConfig(csv_path=str(tmp_path / 'nowhere' / 'out.csv')).check_paths()


class TestEmitChart:
    """Tests for SVG chart output."""

    def test_writes_svg(self, tmp_path):
        """The chart is an SVG document."""
        path = tmp_path / 'stable.svg'
        emit_chart(run_scenario(preset('stable', horizon=50)), RunConfig(chart_path=str(path)))
        assert '<svg' in path.read_text()

    def test_identical_runs_give_identical_files(self, tmp_path):
        """SVG output carries no timestamps or random ids."""
        tr = run_scenario(preset('textbook_bubble'))
        first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
        emit_chart(tr, RunConfig(chart_path=str(first)))
        emit_chart(tr, RunConfig(chart_path=str(second)))
        assert first.read_bytes() == second.read_bytes()

    def test_toggle_off_writes_nothing(self, tmp_path):
        """A disabled chart creates no file."""
        path = tmp_path / 'off.svg'
        assert emit_chart(run_scenario(preset('stable', horizon=5)), RunConfig(chart_path=str(path), chart=False)) is None
        assert not path.exists()


class TestSweep:
    """Tests for parameter sweeps."""

    def test_alpha_sweep_flips_at_critical_value(self, cycle_params):
        """Stability is lost within one grid step of alpha_crit = 1.004008."""
        spec = SweepSpec('alpha', 0.9, 1.1, 2001, cycle_params, 0.042)
        points = sweep_points(spec)
        first_unstable = next(p for p in points if p.regime is not RegimeKind.STABLE)
        assert abs(first_unstable.value - 1.004008) <= 1e-4
        assert all(p.regime is RegimeKind.STABLE for p in points if p.value < 1.004)

    def test_rate_sweep_flips_at_fixed_point(self, params_with):
        """With a = 1.1 the bubble turns into a crash at i0 = i_fix."""
        p = params_with(1.1, 0.04)
        points = sweep_points(SweepSpec('i0', 0.03, 0.05, 201, p, 0.04))
        i_fix = fixed_point(p)
        assert all(pt.regime is RegimeKind.BUBBLE for pt in points if pt.value < i_fix - 1e-4)
        assert all(pt.regime is RegimeKind.CRASH for pt in points if pt.value > i_fix + 1e-4)

    def test_bifurcation_point_on_grid(self):
        """A grid point at a = 1 reports the bifurcation sub-kind."""
        p = Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=1.0, l=1.0)
        points = sweep_points(SweepSpec('alpha', 0.5, 1.5, 3, p, 0.05))
        assert points[1].regime is RegimeKind.BIFURCATION_CONSTANT
        assert points[1].i_fix is None

    def test_pool_matches_serial(self, cycle_params):
        """Worker threads change nothing but speed."""
        spec = SweepSpec('beta', 0.9, 1.1, 41, cycle_params, 0.042)
        assert sweep_points(spec, workers=4) == sweep_points(spec, workers=1)

    def test_writes_csv(self, tmp_path, cycle_params):
        """The sweep table has one row per grid point."""
        path = tmp_path / 'sweep.csv'
        run_sweep(SweepSpec('alpha', 0.9, 1.1, 11, cycle_params, 0.042), str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == 'value,a,i_fix,regime,delta_Delta_crit'
        assert len(lines) == 12
