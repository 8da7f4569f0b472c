"""
Exception hierarchy for the UMWE engine and the exit codes the CLI maps it to.
"""

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DIVERGENCE = 2
EXIT_IO = 3


class UMWEError(Exception):
    """Base class for every error raised by the engine."""


class InvalidParamsError(UMWEError, ValueError):
    """Model parameters violate positivity or finiteness."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__('invalid parameters: ' + '; '.join(self.violations))


class InvalidRateError(UMWEError, ValueError):
    """A rate that must be strictly positive and finite is not."""

    def __init__(self, rate, name='i'):
        self.rate = rate
        super().__init__(f'{name} must be a positive finite rate, got {rate!r}')


class DivergenceError(UMWEError, ArithmeticError):
    """The dynamics left the range representable in double precision."""


class DomainOverflowError(DivergenceError):
    """A log-domain magnitude exceeded the overflow guard."""

    def __init__(self, what, log_magnitude, guard):
        self.what = what
        self.log_magnitude = log_magnitude
        self.guard = guard
        super().__init__(
            f'{what} out of range: log magnitude {log_magnitude:.6g} exceeds guard {guard:g}'
        )


class ExponentOverflowError(DomainOverflowError):
    """The closed-form exponent a**t * |ln(i0/i_fix)| exceeded the log guard."""


class RateUnderflowError(DivergenceError):
    """A rate fell below the underflow guard."""

    def __init__(self, log_rate, guard):
        self.log_rate = log_rate
        self.guard = guard
        super().__init__(f'rate underflow: ln i = {log_rate:.6g} is below ln({guard:g})')


class AtBifurcationError(UMWEError, ValueError):
    """No fixed point exists because the composite exponent equals 1."""

    def __init__(self, a):
        self.a = a
        super().__init__(f'composite exponent a = {a!r} is at the bifurcation point')


class SingularDenominatorError(UMWEError, ValueError):
    """A critical direction value has a vanishing denominator."""


class NegativeRadicandError(UMWEError, ValueError):
    """The critical direction multiplier has a non-positive radicand."""


class InvalidScenarioError(UMWEError, ValueError):
    """A scenario violates its invariants."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__('invalid scenario: ' + '; '.join(self.problems))


class UnknownPresetError(UMWEError, ValueError):
    """No preset is registered under the requested name."""

    def __init__(self, name, known):
        self.name = name
        super().__init__(f'unknown preset {name!r}; known presets: {", ".join(sorted(known))}')


class OutputPathError(UMWEError, OSError):
    """An output file cannot be written."""

    def __init__(self, path, reason):
        self.path = path
        super().__init__(f'cannot write {path}: {reason}')


class ConfigError(UMWEError):
    """Run configuration could not be used."""


class ConfigParseError(ConfigError):
    """The configuration text is not valid JSON."""

    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f'parse error at line {line}, column {column}: {message}')


class ConfigValidationError(ConfigError):
    """The configuration parsed but one or more fields are invalid."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f'{path}: {message}' for path, message in self.errors]
        super().__init__('invalid configuration:\n  ' + '\n  '.join(lines))

    @property
    def paths(self):
        return [path for path, _ in self.errors]
