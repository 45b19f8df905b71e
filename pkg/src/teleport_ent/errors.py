"""Exception types shared across the package."""


class InvariantError(ValueError):
    """A validated object or operation violated one of its numeric contracts."""


class StateParseError(ValueError):
    """A state file could not be parsed."""
