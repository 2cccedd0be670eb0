"""Exception types shared across the package."""


class FuzzyError(Exception):
    """Base class for all package errors."""


class InputError(FuzzyError, ValueError):
    """A crisp input is missing, non-finite, or outside an allowed range."""


class ModelError(FuzzyError, ValueError):
    """A model is structurally invalid or a reference does not resolve."""


class NoRuleFired(FuzzyError):
    """Every rule feeding an output had zero firing strength."""

    def __init__(self, outputs):
        self.outputs = tuple(outputs)
        super().__init__(f"no rule fired for output(s): {', '.join(self.outputs)}")
