"""
Command-line interface of the UMWE credit-cycle engine.

Exit codes: 0 success, 1 invalid input, 2 divergence abort, 3 I/O failure.
"""
import argparse
import json
import logging
import sys
from dataclasses import replace

from config import get_config, use_config
from errors import (
    EXIT_DIVERGENCE,
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    ConfigError,
    DivergenceError,
    OutputPathError,
    UMWEError,
)
from io_formats import (
    check_writable,
    config_schema,
    emit_csv,
    parse_config,
    preset_config,
    preset_names,
    write_trajectory_csv,
)
from model import Params
from risk import cross_check_direction_table, risk_report
from scenario import detect_phases, run_scenario

logger = logging.getLogger('umwe.app')


class _Parser(argparse.ArgumentParser):
    """Usage errors are invalid input (exit 1); exit 2 is reserved for divergence."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f'{self.prog}: error: {message}\n')


def configure_logging(cfg):
    logging.basicConfig(level=cfg.LOG_LEVEL, format=cfg.LOG_FORMAT, stream=sys.stderr)


def _read_config(path, precision):
    with open(path, 'rb') as f:
        text = f.read()
    return parse_config(text, precision=precision)


def cmd_simulate(args):
    run_cfg = _read_config(args.config, args.precision)
    if run_cfg.scenario is None:
        raise ConfigError(f'{args.config} describes no scenario to simulate')
    csv_path = args.csv or run_cfg.csv_path
    chart_path = None if args.no_chart else (args.chart or run_cfg.chart_path)
    run_cfg = replace(run_cfg, csv_path=csv_path, chart_path=chart_path, chart=run_cfg.chart and not args.no_chart)
    run_cfg.check_paths()

    tr = run_scenario(run_cfg.scenario)
    if not len(tr):
        logger.error('Run aborted at the initial rate: %s', tr.abort_reason)
        return EXIT_DIVERGENCE
    for phase in detect_phases(tr):
        logger.info('Phase %s: t=%d..%d (%d steps)', phase.label.value, phase.start_t, phase.end_t, phase.length)

    if run_cfg.csv_path:
        emit_csv(tr, run_cfg)
    else:
        write_trajectory_csv(tr, sys.stdout, run_cfg.precision, run_cfg.sample_every)
    if run_cfg.chart_enabled:
        # matplotlib is only needed when a chart is requested
        from charts import emit_chart
        emit_chart(tr, run_cfg)

    if tr.aborted:
        logger.error('Run aborted: %s', tr.abort_reason)
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_analyze(args):
    p = Params(alpha=args.alpha, beta=args.beta, mu=args.mu, nu=args.nu, k=args.k, l=args.l)
    report = risk_report(p, args.i0)
    if args.cross_check:
        cross_check_direction_table(p, args.i0)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write('\n')
    return EXIT_OK


def cmd_sweep(args):
    from sweep import run_sweep

    run_cfg = _read_config(args.config, args.precision)
    if run_cfg.sweep is None:
        raise ConfigError(f'{args.config} has no "sweep" block')
    check_writable(args.out)
    run_sweep(run_cfg.sweep, args.out, precision=run_cfg.precision)
    return EXIT_OK


def cmd_preset(args):
    data = preset_config(args.name)
    check_writable(args.out)
    try:
        with open(args.out, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2)
            f.write('\n')
    except OSError as e:
        raise OutputPathError(args.out, e.strerror or str(e)) from e
    logger.info('Wrote %s', args.out)
    return EXIT_OK


def cmd_presets(args):
    for name in preset_names():
        print(name)
    return EXIT_OK


def cmd_schema(args):
    json.dump(config_schema(), sys.stdout, indent=2)
    sys.stdout.write('\n')
    return EXIT_OK


def build_parser():
    parser = _Parser(prog='umwe', description='Unified Marshall-Walras credit-cycle engine')
    parser.add_argument('--precision', type=int, default=None,
                        help='significant digits in CSV output (6-17, default 12)')
    parser.add_argument('--profile', choices=['default', 'development', 'testing'], default=None,
                        help='configuration profile')
    sub = parser.add_subparsers(dest='command', required=True)

    simulate = sub.add_parser('simulate', help='run a scenario and write its trajectory')
    simulate.add_argument('--config', required=True)
    simulate.add_argument('--csv', help='CSV output path (stdout when omitted and the config names none)')
    simulate.add_argument('--chart', help='SVG chart output path')
    simulate.add_argument('--no-chart', action='store_true', help='skip the chart even if the config names one')
    simulate.set_defaults(handler=cmd_simulate)

    analyze = sub.add_parser('analyze', help='print the risk report of one parameter set as JSON')
    for name in ('alpha', 'beta', 'mu', 'nu', 'k', 'l', 'i0'):
        analyze.add_argument(f'--{name}', type=float, required=True)
    analyze.add_argument('--cross-check', action='store_true',
                         help='log where the printed direction-distance table disagrees')
    analyze.set_defaults(handler=cmd_analyze)

    sweep = sub.add_parser('sweep', help='classify the system over a parameter grid')
    sweep.add_argument('--config', required=True)
    sweep.add_argument('--out', required=True)
    sweep.set_defaults(handler=cmd_sweep)

    preset = sub.add_parser('preset', help='write a ready-to-edit scenario config')
    preset.add_argument('name', choices=preset_names())
    preset.add_argument('--out', required=True)
    preset.set_defaults(handler=cmd_preset)

    presets = sub.add_parser('presets', help='list preset names')
    presets.set_defaults(handler=cmd_presets)

    schema = sub.add_parser('schema', help='print the JSON Schema of config files')
    schema.set_defaults(handler=cmd_schema)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = use_config(args.profile) if args.profile else get_config()
    configure_logging(cfg)
    if args.precision is not None and not cfg.MIN_PRECISION <= args.precision <= cfg.MAX_PRECISION:
        print(f'error: --precision must be in [{cfg.MIN_PRECISION}, {cfg.MAX_PRECISION}]', file=sys.stderr)
        return EXIT_INVALID

    try:
        return args.handler(args)
    except DivergenceError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_DIVERGENCE
    except (OutputPathError, OSError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_IO
    except (UMWEError, ValueError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
