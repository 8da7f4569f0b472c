"""
Parameter sweeps: classify the system over a one-dimensional grid.
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import get_config
from errors import OutputPathError
from io_formats import format_number
from regime import CriticalParamSelector, classify
from risk import stability_distance

logger = logging.getLogger('umwe.sweep')

SWEEP_HEADER = ['value', 'a', 'i_fix', 'regime', 'delta_Delta_crit']


@dataclass(frozen=True)
class SweepPoint:
    value: float
    a: float
    i_fix: Optional[float]
    regime: object
    delta_Delta_crit: float


def grid(spec):
    return np.linspace(spec.lo, spec.hi, spec.steps)


def evaluate_point(spec, value):
    value = float(value)
    if spec.target == 'i0':
        p, i0 = spec.params, value
    else:
        p, i0 = spec.params.with_(**{spec.target: value}), spec.i0
    regime = classify(p, i0)
    return SweepPoint(
        value=value,
        a=regime.a,
        i_fix=regime.i_fix,
        regime=regime.kind,
        delta_Delta_crit=stability_distance(p, CriticalParamSelector.DELTA),
    )


def sweep_points(spec, workers=None):
    """Evaluate every grid point, in grid order."""
    workers = get_config().SWEEP_WORKERS if workers is None else workers
    values = grid(spec)
    if workers <= 1:
        return [evaluate_point(spec, v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: evaluate_point(spec, v), values))


def run_sweep(spec, path, precision=None, workers=None):
    """Write the sweep table for spec to path and return the evaluated points."""
    precision = get_config().OUTPUT_PRECISION if precision is None else precision
    logger.info('Sweeping %s over [%g, %g] in %d points', spec.target, spec.lo, spec.hi, spec.steps)
    points = sweep_points(spec, workers)
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(SWEEP_HEADER)
            for point in points:
                writer.writerow([
                    format_number(point.value, precision),
                    format_number(point.a, precision),
                    format_number(point.i_fix, precision),
                    point.regime.value,
                    format_number(point.delta_Delta_crit, precision),
                ])
    except OSError as e:
        raise OutputPathError(path, e.strerror or str(e)) from e
    logger.info('Wrote %s', path)
    return points
