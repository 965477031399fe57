"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """A documented precondition was violated by the caller."""


class UnsupportedParameter(ValueError):
    """Parameter value outside the supported family (e.g. C = 0)."""


class CompatibilityViolation(RuntimeError):
    """A zero-determinant recurrence step has an inconsistent right-hand side.

    Carries the step index and the measured consistency defect so callers can
    see exactly where and by how much the formal series construction breaks.
    """

    def __init__(self, k, defect, message=None):
        self.k = k
        self.defect = defect
        super().__init__(
            message or f"compatibility violation at recurrence step k={k}: defect={defect}"
        )


class SingularityApproach(RuntimeError):
    """Numeric integration came too close to the movable singularity."""


class InsufficientPrefix(ValueError):
    """Certification needs more computed coefficients than were supplied."""

    def __init__(self, required, available):
        self.required = required
        self.available = available
        super().__init__(
            f"convergence certification needs a coefficient prefix through index "
            f"{required}, only {available} available"
        )
