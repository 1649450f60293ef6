"""Exception hierarchy shared by the kernel, the PT core and the protocol code."""


class PTError(ValueError):
    """Base class for every domain error raised by ptqsd."""


class InvalidParameter(PTError):
    pass


class BrokenPTRegime(PTError):
    """The Hamiltonian parameters give complex eigenvalues (|r sin(beta)| >= s)."""


class ZeroCPTNorm(PTError):
    """A vector has (numerically) vanishing norm under the operative metric."""


class PlanningError(PTError):
    """Base class for failures while designing a discrimination round."""


class NotOrthogonalizable(PlanningError):
    """No metric angle in the unbroken regime makes the pair CPT-orthogonal."""


class NoOrthogonalizingTime(PlanningError):
    """The evolved Hermitian overlap never reaches zero within one period."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DegenerateTriple(PlanningError):
    """A round's exclusion logic would be ambiguous for the chosen triple."""


class SampleBudgetExceeded(PTError):
    pass
