"""Exception types shared across the package."""


class MeaningGameError(Exception):
    """Base class for errors raised by this package."""


class InvalidGameError(MeaningGameError):
    """A game, strategy, or turn violates a structural requirement."""


class SizeLimitError(MeaningGameError):
    """An enumeration or flattening would exceed the configured cap."""


class NotApplicableError(MeaningGameError):
    """An operation's preconditions (completeness, strict orderings) fail."""


class ScenarioError(MeaningGameError):
    """A game or discourse file cannot be parsed or validated."""
