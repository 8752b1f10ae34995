"""Exception types shared across the library."""


class RingsyncError(Exception):
    """Base class for all library errors."""


class DegenerateGeometryError(RingsyncError):
    """Raised when a geometric construction is undefined (e.g. coincident centers)."""


class OverlappingTrajectoriesError(RingsyncError):
    """Raised when trajectories that must be disjoint intersect or overlap."""


class InvalidInstanceError(RingsyncError):
    """Raised when an instance violates basic validity (overlap, disconnection, bad params)."""


class NotSynchronizableError(RingsyncError):
    """Raised when no synchronized schedule exists; carries an odd-cycle witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClosureViolationError(RingsyncError):
    """Raised when propagating a schedule around a cycle fails to close."""

    def __init__(self, message, cycle=None, edge=None):
        super().__init__(message)
        self.cycle = cycle
        self.edge = edge


class InfeasibleSectionTimesError(RingsyncError):
    """Raised when no section-time assignment satisfies the cycle constraints."""

    def __init__(self, message, cycles=None):
        super().__init__(message)
        self.cycles = cycles


class GenerationFailureError(RingsyncError):
    """Raised when random instance generation exhausts its retry budget."""


class DisconnectedGraphError(RingsyncError):
    """Raised by operations requiring a connected graph; carries the components."""

    def __init__(self, message, components=None):
        super().__init__(message)
        self.components = components
