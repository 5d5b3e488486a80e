"""Error types shared across the package.

The CLI maps these onto its stable exit codes: expression/JSON syntax
problems exit 2, domain validation failures exit 3, resource caps exit 4.
"""


class BundleChowError(Exception):
    """Base class for all package-specific errors."""


class ExpressionError(BundleChowError):
    """Malformed polynomial expression (exit code 2)."""


class SpecJSONError(BundleChowError):
    """Spec file is not valid JSON or cannot be read (exit code 2)."""


class InvalidSpecError(BundleChowError):
    """Input passed syntax but violates a domain constraint (exit code 3)."""


class FiberTooSmallError(InvalidSpecError):
    """Symmetric-power question posed for a rank-2 factor (fiber dimension 1),
    which is outside the supported regime."""


class BasisLimitError(BundleChowError):
    """Monomial basis would exceed the configured cap (exit code 4)."""
