"""Exception types shared across the package.

Runtime failures of the solvers carry enough context (failure time,
partial trajectory) for callers to flush diagnostics before bailing out.
"""


class SingularConfiguration(RuntimeError):
    """A potential term blew past the singularity guard (near-collision).

    Attributes:
        time: simulation time of the failure, when known.
        partial: trajectory collected up to the failure, when available.
    """

    def __init__(self, message, time=None, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class ChamberExit(RuntimeError):
    """A recorded trajectory sample left the open Weyl chamber."""

    def __init__(self, message, time=None, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class SpectralBreakdown(RuntimeError):
    """Eigenvalue bookkeeping of the diagonalization solver failed.

    Raised on eigenvalue sign-count mismatches (loss of regularity),
    coincident recovered coordinates, or failed eigenvector continuity
    between consecutive samples.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
