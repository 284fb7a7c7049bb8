# src/grid_islander/errors.py
from __future__ import annotations

from typing import Optional


class GridIslanderError(Exception):
    """Root of every error raised by the package."""

    exit_code = 1


# ---------------------------------------------------------------------
# Input errors (bad files, bad partitions, bad options) -> exit code 2
# ---------------------------------------------------------------------
class InputError(GridIslanderError):
    exit_code = 2


class GridFormatError(InputError):
    """Parse failure, with the line and/or field where it happened."""

    def __init__(
        self, message: str, *, line: Optional[int] = None, field: Optional[str] = None
    ) -> None:
        self.line = line
        self.field = field
        locus = []
        if line is not None:
            locus.append(f"line {line}")
        if field is not None:
            locus.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(locus)})" if locus else message)


class DisconnectedGridError(InputError):
    pass


class DuplicateEdgeError(InputError):
    pass


class PartitionError(InputError):
    pass


class CoverageError(PartitionError):
    pass


class EmptyIslandError(PartitionError):
    pass


class DisconnectedIslandError(PartitionError):
    pass


class OverlappingGroupsError(InputError):
    pass


class OracleCapExceededError(InputError):
    pass


class ProbeError(InputError):
    """A probe node is neither a member nor a neighbor of the island it probes."""


# ---------------------------------------------------------------------
# Computation errors -> exit code 1
# ---------------------------------------------------------------------
class ComputationError(GridIslanderError):
    pass


class IntegratorDivergenceError(ComputationError):
    pass


class IterationCapError(ComputationError):
    pass


class NonSteadyRunError(ComputationError):
    pass


class EstimatorInconsistencyError(ComputationError):
    pass


class ImbalanceDriftError(ComputationError):
    pass


class SchedulerInvariantError(ComputationError):
    pass
