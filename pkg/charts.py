"""
Static SVG charts of a trajectory: rate path, alpha/beta traces and risk distances.
"""
import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from errors import OutputPathError  # noqa: E402
from regime import CriticalParamSelector  # noqa: E402

logger = logging.getLogger('umwe.charts')

# fixed ids and no timestamp so identical runs give identical files
plt.rcParams['svg.hashsalt'] = 'umwe'
plt.rcParams['svg.fonttype'] = 'none'


def _rate_panel(ax, tr, t):
    ax.plot(t, tr.column('i'), color='tab:blue', linewidth=1.2, label='i(t)')
    i_fix = tr.column('i_fix')
    if np.isfinite(i_fix).any():
        ax.plot(t, i_fix, color='tab:gray', linestyle='--', linewidth=0.9, label='i_fix')
    rates = tr.column('i')
    if np.nanmax(rates) / np.nanmin(rates) > 1e3:
        ax.set_yscale('log')
    ax.set_ylabel('interest rate')
    ax.legend(loc='best', fontsize='small')


def _exponent_panel(ax, tr, t):
    ax.plot(t, tr.column('alpha'), color='tab:red', linewidth=1.2, label='alpha')
    ax.set_ylabel('alpha', color='tab:red')
    twin = ax.twinx()
    twin.plot(t, tr.column('beta'), color='tab:green', linewidth=1.2, label='beta')
    twin.set_ylabel('beta', color='tab:green')


def _distance_panel(ax, tr, t):
    for sel, color in (
        (CriticalParamSelector.ALPHA, 'tab:red'),
        (CriticalParamSelector.BETA, 'tab:green'),
        (CriticalParamSelector.DELTA, 'tab:purple'),
    ):
        stability = np.array([r.report[sel].stability_distance_abs for r in tr.records], dtype=float)
        ax.plot(t, stability, color=color, linewidth=1.0, label=f'stability d{sel.value}')
    direction = np.array(
        [np.nan if d is None else d
         for d in (r.report[CriticalParamSelector.DELTA].direction_distance_abs for r in tr.records)],
        dtype=float,
    )
    ax.plot(t, direction, color='tab:orange', linestyle=':', linewidth=1.0, label='direction dDelta')
    ax.axhline(0.0, color='black', linewidth=0.6)
    ax.set_ylabel('distance')
    ax.set_xlabel('t')
    ax.legend(loc='best', fontsize='small')


def emit_chart(tr, cfg, path=None):
    """Write the three-panel chart to path (default cfg.chart_path); None when charts are off."""
    if not len(tr):
        raise ValueError('cannot chart an empty trajectory')
    path = path or cfg.chart_path
    if not cfg.chart or not path:
        logger.debug('Chart output disabled')
        return None

    t = tr.column('t')
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    try:
        _rate_panel(axes[0], tr, t)
        _exponent_panel(axes[1], tr, t)
        _distance_panel(axes[2], tr, t)
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
    except OSError as e:
        raise OutputPathError(path, e.strerror or str(e)) from e
    finally:
        plt.close(fig)
    logger.info('Wrote %s', path)
    return path
