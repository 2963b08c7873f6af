"""Exception hierarchy shared across the package.

The command-line layer maps these onto exit statuses: physics assertion
failures exit 1, configuration problems exit 2, parameters outside the
resolvable numeric range exit 3.
"""


class ContractError(ValueError):
    """A caller broke a documented precondition (shape, symmetry, ordering)."""


class ConfigError(ValueError):
    """Configuration file or option set is malformed or contains unknown keys."""


class RangeError(ValueError):
    """Requested parameter lies outside the range the grids can resolve."""


class DecayError(RangeError):
    """A weighted integrability requirement on the potential cannot be certified."""


class UndersampledPathError(RangeError):
    """A discrete winding path jumped too far between samples to be trusted."""


class PhysicsError(RuntimeError):
    """Computed data violates a constraint that should hold (unitarity, integrality)."""
