"""
Regime classification and critical parameters of the unified model.

The bubble/crash split compares ln i0 with ln i_fix directly. That is the
sign of the position inequality without its 1/(1-a) factor, which blows up
next to the bifurcation point.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from config import get_config
from errors import NegativeRadicandError, SingularDenominatorError
from model import _check_rate, log_bifurcation_constant, log_fixed_point


class RegimeKind(Enum):
    STABLE = 'Stable'
    AT_FIXED_POINT = 'AtFixedPoint'
    BUBBLE = 'Bubble'
    CRASH = 'Crash'
    BIFURCATION_CONSTANT = 'BifurcationConstant'
    BIFURCATION_TO_ZERO = 'BifurcationToZero'
    BIFURCATION_TO_INFINITY = 'BifurcationToInfinity'

    @property
    def is_bifurcation(self):
        return self in _BIFURCATION_KINDS


_BIFURCATION_KINDS = frozenset({
    RegimeKind.BIFURCATION_CONSTANT,
    RegimeKind.BIFURCATION_TO_ZERO,
    RegimeKind.BIFURCATION_TO_INFINITY,
})


@dataclass(frozen=True)
class Regime:
    """
    Qualitative behaviour of the system from a given rate.

    log_i_fix is kept even when the fixed point itself is too large or too
    small for a float; i_fix is then None.
    """

    kind: RegimeKind
    a: float
    i_fix: Optional[float] = None
    log_i_fix: Optional[float] = None

    @property
    def name(self):
        return self.kind.value


class CriticalParamSelector(Enum):
    ALPHA = 'alpha'
    BETA = 'beta'
    MU = 'mu'
    NU = 'nu'
    DELTA = 'Delta'

    @property
    def is_exponent(self):
        return self is not CriticalParamSelector.DELTA


EXPONENT_SELECTORS = (
    CriticalParamSelector.ALPHA,
    CriticalParamSelector.BETA,
    CriticalParamSelector.MU,
    CriticalParamSelector.NU,
)


@dataclass(frozen=True)
class CriticalValue:
    """A critical parameter value; attainable is False when it is not positive."""

    value: float
    attainable: bool


def current_value(p, sel):
    """Value of the selected parameter in p; the Delta multiplier is 1 by definition."""
    if sel is CriticalParamSelector.DELTA:
        return 1.0
    return getattr(p, sel.value)


def _representable(log_value):
    if abs(log_value) > get_config().LOG_OVERFLOW_GUARD:
        return None
    return math.exp(log_value)


def classify(p, i0, eps_a=None, eps_pos=None, eps_c=None):
    """Classify the behaviour of the system started from i0 under p."""
    _check_rate(i0, 'i0')
    cfg = get_config()
    eps_a = cfg.EPS_A if eps_a is None else eps_a
    eps_pos = cfg.EPS_POS if eps_pos is None else eps_pos
    eps_c = cfg.EPS_C if eps_c is None else eps_c

    a = p.a
    if abs(a - 1.0) <= eps_a:
        log_c = log_bifurcation_constant(p)
        if abs(log_c) <= eps_c:
            kind = RegimeKind.BIFURCATION_CONSTANT
        elif log_c < 0:
            kind = RegimeKind.BIFURCATION_TO_ZERO
        else:
            kind = RegimeKind.BIFURCATION_TO_INFINITY
        return Regime(kind=kind, a=a)

    log_fix = log_fixed_point(p, eps_a)
    gap = math.log(i0) - log_fix
    if abs(gap) <= eps_pos:
        kind = RegimeKind.AT_FIXED_POINT
    elif a < 1.0:
        kind = RegimeKind.STABLE
    elif gap > 0:
        kind = RegimeKind.CRASH
    else:
        kind = RegimeKind.BUBBLE
    return Regime(kind=kind, a=a, i_fix=_representable(log_fix), log_i_fix=log_fix)


def critical_stability(p, sel):
    """Value of the selected parameter at which a crosses 1, everything else held."""
    if sel is CriticalParamSelector.DELTA:
        value = 1.0 / math.sqrt(p.a)
    elif sel is CriticalParamSelector.ALPHA:
        value = (1.0 - p.beta * p.nu) / p.mu
    elif sel is CriticalParamSelector.BETA:
        value = (1.0 - p.alpha * p.mu) / p.nu
    elif sel is CriticalParamSelector.MU:
        value = (1.0 - p.beta * p.nu) / p.alpha
    else:
        value = (1.0 - p.alpha * p.mu) / p.beta
    return CriticalValue(value=value, attainable=value > 0)


def asymptotic_critical_direction(p, sel):
    """Limit of critical_direction as ln i_t -> +-inf; identical to critical_stability."""
    return critical_stability(p, sel)


def position_expression(p, i_t):
    """
    alpha mu (ln i_t - ln k) + beta nu (ln i_t - ln l) - ln i_t.

    Equals (a - 1)(ln i_t - ln i_fix): for a > 1 it is positive on the
    crash side and negative on the bubble side.
    """
    _check_rate(i_t, 'i_t')
    y = math.log(i_t)
    return p.alpha * p.mu * (y - p.log_k) + p.beta * p.nu * (y - p.log_l) - y


def critical_direction(p, i_t, sel):
    """
    Value of the selected parameter that zeroes the position expression at i_t.

    Each exponent enters the expression linearly; the Delta multiplier
    enters squared.
    """
    _check_rate(i_t, 'i_t')
    y = math.log(i_t)
    loan_term = y - p.log_k
    default_term = y - p.log_l

    if sel is CriticalParamSelector.DELTA:
        denominator = p.alpha * p.mu * loan_term + p.beta * p.nu * default_term
        if denominator == 0.0:
            raise SingularDenominatorError(f'Delta direction value undefined at i_t={i_t!r}')
        radicand = y / denominator
        if not radicand > 0:
            raise NegativeRadicandError(
                f'Delta direction radicand {radicand!r} is not positive at i_t={i_t!r}'
            )
        return math.sqrt(radicand)

    if sel is CriticalParamSelector.ALPHA:
        numerator, denominator = y - p.beta * p.nu * default_term, p.mu * loan_term
    elif sel is CriticalParamSelector.BETA:
        numerator, denominator = y - p.alpha * p.mu * loan_term, p.nu * default_term
    elif sel is CriticalParamSelector.MU:
        numerator, denominator = y - p.beta * p.nu * default_term, p.alpha * loan_term
    else:
        numerator, denominator = y - p.alpha * p.mu * loan_term, p.beta * default_term

    if denominator == 0.0:
        scale = 'k' if sel in (CriticalParamSelector.ALPHA, CriticalParamSelector.MU) else 'l'
        raise SingularDenominatorError(f'{sel.value} direction value undefined at i_t = {scale}')
    value = numerator / denominator
    if not math.isfinite(value):
        raise SingularDenominatorError(f'{sel.value} direction value is not finite at i_t={i_t!r}')
    return value
