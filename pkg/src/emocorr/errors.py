"""Exception types shared across the package."""


class EmocorrError(Exception):
    """Base class for every failure this package raises on purpose."""


class CorpusFormatError(EmocorrError):
    """A corpus, lexicon, or matrix file violates its line format."""


class ConfigurationError(EmocorrError):
    """Inconsistent options, mismatched dimensions, or missing inputs."""


class DataError(EmocorrError):
    """Well-formed input that fails a semantic requirement."""


class TrainingDivergedError(EmocorrError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch}: loss={loss}")
        self.epoch = epoch
        self.loss = loss


class UnreachableError(EmocorrError):
    """No finite-probability path satisfies the requested endpoints."""


class DegenerateSpectrumError(EmocorrError):
    """All eigenvalues vanish, so no feature direction can be retained."""
