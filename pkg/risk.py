"""
Systemic-risk measures: distances from the current parameters to their
critical stability and critical direction values.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from config import get_config
from errors import NegativeRadicandError, SingularDenominatorError
from model import _check_rate
from regime import (
    CriticalParamSelector,
    classify,
    critical_direction,
    critical_stability,
    current_value,
)

logger = logging.getLogger('umwe.risk')


class DistanceMode(Enum):
    ABSOLUTE = 'absolute'
    RELATIVE = 'relative'


def stability_distance(p, sel, mode=DistanceMode.ABSOLUTE, eps_a=None):
    """
    lambda_crit - lambda (absolute) or that gap over lambda (relative).

    Negative distances are meaningful: the selected parameter alone cannot
    bring the system back across a = 1.
    """
    eps = get_config().EPS_A if eps_a is None else eps_a
    if abs(p.a - 1.0) <= eps:
        return 0.0
    current = current_value(p, sel)
    distance = critical_stability(p, sel).value - current
    if mode is DistanceMode.RELATIVE:
        return distance / current
    return distance


def direction_distance(p, i_t, sel, mode=DistanceMode.ABSOLUTE):
    """lambda_crit(i_t) - lambda, or None where the direction value is undefined."""
    _check_rate(i_t, 'i_t')
    try:
        critical = critical_direction(p, i_t, sel)
    except (SingularDenominatorError, NegativeRadicandError):
        return None
    current = current_value(p, sel)
    distance = critical - current
    if mode is DistanceMode.RELATIVE:
        return distance / current
    return distance


@dataclass(frozen=True)
class SelectorDistances:
    selector: CriticalParamSelector
    critical_stability: float
    stability_attainable: bool
    stability_distance_abs: float
    stability_distance_rel: float
    critical_direction: Optional[float]
    direction_distance_abs: Optional[float]
    direction_distance_rel: Optional[float]

    def to_dict(self):
        return {
            'critical_stability': self.critical_stability,
            'stability_attainable': self.stability_attainable,
            'stability_distance_abs': self.stability_distance_abs,
            'stability_distance_rel': self.stability_distance_rel,
            'critical_direction': self.critical_direction,
            'direction_distance_abs': self.direction_distance_abs,
            'direction_distance_rel': self.direction_distance_rel,
        }


@dataclass(frozen=True)
class RiskReport:
    """All critical values and distances of p, sampled at rate i_t."""

    i_t: float
    a: float
    i_fix: Optional[float]
    regime: object
    distances: Dict[CriticalParamSelector, SelectorDistances] = field(default_factory=dict)

    def __getitem__(self, sel):
        return self.distances[sel]

    def to_dict(self):
        return {
            'i_t': self.i_t,
            'a': self.a,
            'i_fix': self.i_fix,
            'regime': self.regime.name,
            'distances': {sel.value: d.to_dict() for sel, d in self.distances.items()},
        }


def _selector_distances(p, i_t, sel):
    try:
        critical_dir = critical_direction(p, i_t, sel)
    except (SingularDenominatorError, NegativeRadicandError):
        critical_dir = None
    critical = critical_stability(p, sel)
    return SelectorDistances(
        selector=sel,
        critical_stability=critical.value,
        stability_attainable=critical.attainable,
        stability_distance_abs=stability_distance(p, sel, DistanceMode.ABSOLUTE),
        stability_distance_rel=stability_distance(p, sel, DistanceMode.RELATIVE),
        critical_direction=critical_dir,
        direction_distance_abs=direction_distance(p, i_t, sel, DistanceMode.ABSOLUTE),
        direction_distance_rel=direction_distance(p, i_t, sel, DistanceMode.RELATIVE),
    )


def risk_report(p, i_t):
    _check_rate(i_t, 'i_t')
    regime = classify(p, i_t)
    return RiskReport(
        i_t=float(i_t),
        a=p.a,
        i_fix=regime.i_fix,
        regime=regime,
        distances={sel: _selector_distances(p, i_t, sel) for sel in CriticalParamSelector},
    )


# ---------------------------------------------------------------------------
# Cross-check against the published direction-distance table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableDivergence:
    selector: CriticalParamSelector
    mode: DistanceMode
    derived: float
    tabulated: float

    @property
    def difference(self):
        return self.tabulated - self.derived


def _tabulated_cells(p, i_t):
    """
    The printed direction-distance cells, read with the current rate in place
    of the initial rate their formulas are written in. The Delta cell prints
    the critical multiplier itself, not a distance.
    """
    y = math.log(i_t)
    lk = math.log(i_t / p.k)
    ll = math.log(i_t / p.l)
    a_mu, b_nu = p.alpha * p.mu, p.beta * p.nu
    sel = CriticalParamSelector
    return {
        (sel.ALPHA, DistanceMode.ABSOLUTE): lambda: -(b_nu * ll - y) / (p.mu * lk) - p.alpha,
        (sel.ALPHA, DistanceMode.RELATIVE): lambda: -(b_nu * ll - y) / (a_mu * lk) - 1.0,
        (sel.BETA, DistanceMode.ABSOLUTE): lambda: -(a_mu * ll - y) / (p.nu * lk) - p.beta,
        (sel.BETA, DistanceMode.RELATIVE): lambda: -(a_mu * ll - y) / (b_nu * lk) - 1.0,
        (sel.MU, DistanceMode.ABSOLUTE): lambda: -(b_nu * ll - y) / (p.alpha * lk) - p.mu,
        (sel.MU, DistanceMode.RELATIVE): lambda: -(a_mu * ll - y) / (b_nu * lk) - 1.0,
        (sel.NU, DistanceMode.ABSOLUTE): lambda: -(a_mu * ll - y) / (p.beta * lk) - p.nu,
        (sel.NU, DistanceMode.RELATIVE): lambda: -(a_mu * ll - y) / (b_nu * lk) - 1.0,
        (sel.DELTA, DistanceMode.ABSOLUTE): lambda: math.sqrt(y / (a_mu * lk + b_nu * ll)),
    }


def cross_check_direction_table(p, i_t, rel_tol=1e-9):
    """
    Compare the derived direction distances with the printed table cells.

    Divergences are logged and returned; cells that are undefined at i_t on
    either side are skipped.
    """
    _check_rate(i_t, 'i_t')
    divergences = []
    for (sel, mode), cell in _tabulated_cells(p, i_t).items():
        if sel is CriticalParamSelector.DELTA:
            try:
                derived = critical_direction(p, i_t, sel)
            except (SingularDenominatorError, NegativeRadicandError):
                derived = None
        else:
            derived = direction_distance(p, i_t, sel, mode)
        try:
            tabulated = cell()
        except (ZeroDivisionError, ValueError):
            tabulated = None
        if derived is None or tabulated is None:
            continue
        if not math.isclose(derived, tabulated, rel_tol=rel_tol, abs_tol=1e-12):
            divergence = TableDivergence(sel, mode, derived, tabulated)
            logger.warning(
                'direction table cell %s/%s diverges at i_t=%g: derived %.12g, tabulated %.12g (off by %.3g)',
                sel.value, mode.value, i_t, derived, tabulated, divergence.difference,
            )
            divergences.append(divergence)
    return divergences
