"""
Core equations of the unified Marshall-Walras credit-market model (UMWE)
and of the legacy loan / crisis accelerators it unifies.

Every rate evolution is computed on ln i and exponentiated only when a value
is handed back, so the closed form survives a**t long after a float would
have overflowed.
"""
import math
from dataclasses import dataclass, fields, replace, asdict
from enum import Enum
from typing import Optional

from config import get_config
from errors import (
    AtBifurcationError,
    DomainOverflowError,
    ExponentOverflowError,
    InvalidParamsError,
    InvalidRateError,
    RateUnderflowError,
)

EXPONENTS = ('alpha', 'beta', 'mu', 'nu')


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Params:
    """The parameter set driving the unified model: four exponents and two scales."""

    alpha: float
    beta: float
    mu: float
    nu: float
    k: float
    l: float

    def __post_init__(self):
        violations = []
        for f in fields(self):
            value = getattr(self, f.name)
            if not _is_number(value):
                violations.append(f'{f.name} must be a number, got {value!r}')
            elif not math.isfinite(value) or value <= 0:
                violations.append(f'{f.name} must be strictly positive and finite, got {value!r}')
        if violations:
            raise InvalidParamsError(violations)
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        if not math.isfinite(self.a):
            raise InvalidParamsError([f'composite exponent a = {self.a!r} is not finite'])

    @property
    def a(self):
        return self.alpha * self.mu + self.beta * self.nu

    @property
    def log_k(self):
        return math.log(self.k)

    @property
    def log_l(self):
        return math.log(self.l)

    def with_(self, **changes):
        """Return a copy with the given fields replaced (validated again)."""
        return replace(self, **changes)

    def scaled(self, delta):
        """Multiply all four exponents by delta, keeping k and l."""
        return replace(self, **{name: getattr(self, name) * delta for name in EXPONENTS})

    def to_dict(self):
        return asdict(self)

    @classmethod
    def with_composite(cls, a, i_fix, alpha=1.0, beta=1.0):
        """
        Build parameters with a prescribed composite exponent and fixed point.

        The exponent weight is split evenly between loans and defaults
        (alpha*mu = beta*nu = a/2) and both scales share the value that puts
        the fixed point at i_fix.
        """
        if a == 1:
            raise AtBifurcationError(a)
        log_scale = -(1.0 - a) * math.log(i_fix) / a
        scale = math.exp(log_scale)
        return cls(alpha=alpha, beta=beta, mu=a / (2.0 * alpha), nu=a / (2.0 * beta), k=scale, l=scale)


@dataclass(frozen=True)
class MarketState:
    """Snapshot (t, i, N, D) of the credit market."""

    t: int
    i: float
    n_loans: float
    d_defaults: float

    @classmethod
    def at_rate(cls, i, p, t=0):
        """State whose loan and default volumes are consistent with rate i under p."""
        _check_rate(i)
        return cls(t=t, i=float(i), n_loans=loans_from_rate(i, p), d_defaults=defaults_from_rate(i, p))

    @property
    def log_i(self):
        return math.log(self.i)


class LegacyVariant(Enum):
    LOAN_ACCELERATOR = 'LoanAccelerator'
    CRISIS_ACCELERATOR = 'CrisisAccelerator'


@dataclass(frozen=True)
class LegacyMweParams:
    """
    Parameters of the i0-anchored legacy model.

    The loan accelerator uses (alpha, mu), the crisis accelerator (alpha, beta).
    Exponents may be zero here; that is how the legacy model degenerates.
    """

    variant: LegacyVariant
    i0: float
    alpha: float
    k: float
    mu: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        violations = []
        if not isinstance(self.variant, LegacyVariant):
            violations.append(f'variant must be a LegacyVariant, got {self.variant!r}')
        for name in ('i0', 'k'):
            value = getattr(self, name)
            if not _is_number(value) or not math.isfinite(value) or value <= 0:
                violations.append(f'{name} must be strictly positive and finite, got {value!r}')
        needed = 'mu' if self.variant is LegacyVariant.LOAN_ACCELERATOR else 'beta'
        for name in ('alpha', needed):
            value = getattr(self, name)
            if value is None or not _is_number(value) or not math.isfinite(value) or value < 0:
                violations.append(f'{name} must be a non-negative finite number, got {value!r}')
        if violations:
            raise InvalidParamsError(violations)

    @property
    def exponent_product(self):
        if self.variant is LegacyVariant.LOAN_ACCELERATOR:
            return self.alpha * self.mu
        return self.alpha * self.beta


# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------

def _check_rate(i, name='i'):
    if not _is_number(i) or not math.isfinite(i) or i <= 0:
        raise InvalidRateError(i, name)


def _log_guard(log_guard=None):
    return get_config().LOG_OVERFLOW_GUARD if log_guard is None else log_guard


def exp_guarded(log_value, what, log_guard=None):
    """exp(log_value), refusing magnitudes beyond the log-domain guard."""
    guard = _log_guard(log_guard)
    if not math.isfinite(log_value) or abs(log_value) > guard:
        raise DomainOverflowError(what, log_value, guard)
    return math.exp(log_value)


def check_log_rate(log_rate, underflow_guard=None, log_guard=None):
    """Raise the matching divergence error when ln i leaves the admissible band."""
    cfg = get_config()
    guard = _log_guard(log_guard)
    floor = cfg.RATE_UNDERFLOW_GUARD if underflow_guard is None else underflow_guard
    if math.isnan(log_rate) or log_rate > guard:
        raise DomainOverflowError('interest rate', log_rate, guard)
    if log_rate < math.log(floor):
        raise RateUnderflowError(log_rate, floor)


# ---------------------------------------------------------------------------
# Log-domain primitives
# ---------------------------------------------------------------------------

def log_loans(log_i, p):
    return -p.mu * (log_i - p.log_k)


def log_defaults(log_i, p):
    return p.nu * (log_i - p.log_l)


def log_next_rate(log_i, p):
    """ln i(t+1) = beta ln D(t) - alpha ln N(t)."""
    return p.beta * log_defaults(log_i, p) - p.alpha * log_loans(log_i, p)


def log_fixed_point(p, eps_a=None):
    a = p.a
    eps = get_config().EPS_A if eps_a is None else eps_a
    if abs(a - 1.0) <= eps:
        raise AtBifurcationError(a)
    return (-p.alpha * p.mu * p.log_k - p.beta * p.nu * p.log_l) / (1.0 - a)


def log_bifurcation_constant(p):
    return -p.beta * p.nu * p.log_l - p.mu * p.alpha * p.log_k


# ---------------------------------------------------------------------------
# The unified model
# ---------------------------------------------------------------------------

def loans_from_rate(i, p):
    """N = (i/k)^(-mu)."""
    _check_rate(i)
    return exp_guarded(log_loans(math.log(i), p), 'loan volume N')


def defaults_from_rate(i, p):
    """D = (i/l)^nu."""
    _check_rate(i)
    return exp_guarded(log_defaults(math.log(i), p), 'default volume D')


def next_rate(n, d, p):
    """i(t+1) = D^beta / N^alpha."""
    _check_rate(n, 'n')
    _check_rate(d, 'd')
    return exp_guarded(p.beta * math.log(d) - p.alpha * math.log(n), 'interest rate')


def step(s, p, underflow_guard=None, log_guard=None):
    """
    Advance the market one period under p.

    Only s.i enters the update; t and the earlier path do not.
    """
    log_i = math.log(s.i)
    growth = log_next_rate(log_i, p) - log_i
    log_next = log_i + growth
    check_log_rate(log_next, underflow_guard, log_guard)
    # zero log growth keeps the rate bit-for-bit (the c = 1 bifurcation case)
    i_next = s.i if growth == 0.0 else math.exp(log_next)
    return MarketState(
        t=s.t + 1,
        i=i_next,
        n_loans=exp_guarded(log_loans(log_next, p), 'loan volume N', log_guard),
        d_defaults=exp_guarded(log_defaults(log_next, p), 'default volume D', log_guard),
    )


def iterate(i0, p, steps, underflow_guard=None, log_guard=None):
    """Rates [i(0), ..., i(steps)] under fixed parameters."""
    state = MarketState.at_rate(i0, p)
    rates = [state.i]
    for _ in range(steps):
        state = step(state, p, underflow_guard, log_guard)
        rates.append(state.i)
    return rates


def composite_exponent(p):
    """a = alpha*mu + beta*nu."""
    return p.a


def fixed_point(p, eps_a=None):
    """i_fix = (k^(-alpha mu) l^(-beta nu))^(1/(1-a)); independent of any initial rate."""
    return exp_guarded(log_fixed_point(p, eps_a), 'fixed point')


def rate_at(t, i0, p, eps_a=None, log_guard=None, underflow_guard=None):
    """Closed form i(t) = i_fix * (i0/i_fix)^(a^t), evaluated on logs."""
    if isinstance(t, bool) or not isinstance(t, int) or t < 0:
        raise ValueError(f't must be a non-negative integer, got {t!r}')
    _check_rate(i0, 'i0')
    log_fix = log_fixed_point(p, eps_a)
    if t == 0:
        return float(i0)
    deviation = math.log(i0) - log_fix
    if deviation == 0.0:
        return exp_guarded(log_fix, 'fixed point', log_guard)
    a = p.a
    guard = _log_guard(log_guard)
    log_scale = t * math.log(a) + math.log(abs(deviation))
    if log_scale > math.log(guard):
        raise ExponentOverflowError(
            'closed-form exponent a**t * |ln(i0/i_fix)|', math.exp(min(log_scale, 709.0)), guard
        )
    log_rate = log_fix + a ** t * deviation
    check_log_rate(log_rate, underflow_guard, log_guard)
    return math.exp(log_rate)


def bifurcation_constant(p):
    """c = l^(-beta nu) k^(-mu alpha); at a = 1 the rate evolves as i(t) = c^t i0."""
    return exp_guarded(log_bifurcation_constant(p), 'bifurcation constant')


def bifurcation_rate_at(t, i0, p, eps_a=None, underflow_guard=None, log_guard=None):
    """i(t) = c^t * i0, valid only at the bifurcation point a = 1."""
    eps = get_config().EPS_A if eps_a is None else eps_a
    if abs(p.a - 1.0) > eps:
        raise InvalidParamsError([f'composite exponent a = {p.a!r} is not at the bifurcation point'])
    _check_rate(i0, 'i0')
    log_c = log_bifurcation_constant(p)
    if log_c == 0.0 or t == 0:
        return float(i0)
    log_rate = math.log(i0) + t * log_c
    check_log_rate(log_rate, underflow_guard, log_guard)
    return math.exp(log_rate)


def expected_return(i):
    """Expected return of a bare loan with zero recovery: r = -i."""
    _check_rate(i)
    return -i


# ---------------------------------------------------------------------------
# Legacy MWE (comparison mode)
# ---------------------------------------------------------------------------

def legacy_mwe_fixed_point(lp, eps_a=None):
    """i_fix^MWE = (i0 k^(-e))^(1/(1-e)) with e = alpha*mu (loans) or alpha*beta (crisis)."""
    e = lp.exponent_product
    eps = get_config().EPS_A if eps_a is None else eps_a
    if abs(e - 1.0) <= eps:
        raise AtBifurcationError(e)
    return exp_guarded((math.log(lp.i0) - e * math.log(lp.k)) / (1.0 - e), 'legacy fixed point')


def legacy_mwe_step(i, lp, log_guard=None):
    """
    One step of the anchored legacy recurrence.

    Loan accelerator: i(t+1) = i0 N^(-alpha), N = (i/k)^(-mu).
    Crisis accelerator: i(t+1) = i0 D^alpha, D = (i/k)^beta.
    """
    _check_rate(i)
    log_ratio = lp.exponent_product * (math.log(i) - math.log(lp.k))
    log_rate = math.log(lp.i0) + log_ratio
    guard = _log_guard(log_guard)
    if not math.isfinite(log_rate) or abs(log_rate) > guard:
        raise DomainOverflowError('legacy interest rate', log_rate, guard)
    if abs(log_ratio) > guard:
        # the ratio alone overflows a float; only the anchored rate fits
        return math.exp(log_rate)
    # i0 * exp(0) keeps i0 exact when the exponents vanish or i = k
    return lp.i0 * math.exp(log_ratio)


def legacy_mwe_path(i, lp, steps, log_guard=None):
    rates = [float(i)]
    for _ in range(steps):
        rates.append(legacy_mwe_step(rates[-1], lp, log_guard))
    return rates
