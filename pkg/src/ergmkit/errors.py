"""Exception hierarchy shared across the engine, CLI, and HTTP service."""


class ErgmError(Exception):
    """Base class for all ergmkit errors."""


class DataError(ErgmError):
    """Bad input data: unparseable files, invalid graphs, malformed requests."""


class SchemaError(DataError):
    """Result-document schema violation or unsupported schema version."""


class ModelValidationError(DataError):
    """A model specification failed validation; carries the diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class ConvergenceError(ErgmError):
    """An estimation procedure failed to converge."""


class SeparationError(ConvergenceError):
    """A term's change statistic perfectly predicts edge status."""

    def __init__(self, term_label):
        self.term_label = term_label
        super().__init__(
            f"complete separation: change statistic of term '{term_label}' "
            "perfectly predicts edge status"
        )


class ConvexHullError(ConvergenceError):
    """Observed statistics lie outside the convex hull of sampled statistics.

    Usually means the sample is too small or the starting value is too far
    from the maximizer; more samples or a different starting point may help.
    """


class BridgeVarianceError(ConvergenceError):
    """A bridge in the normalizing-constant path had exploding weights."""

    def __init__(self, bridge_index, ess):
        self.bridge_index = bridge_index
        self.ess = ess
        super().__init__(
            f"bridge {bridge_index} importance weights collapsed "
            f"(effective sample size {ess:.1f})"
        )


class DegeneracyError(ErgmError):
    """The sampler chain collapsed toward an empty or complete graph."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


class JobCancelled(ErgmError):
    """A service job was cancelled before completion."""
