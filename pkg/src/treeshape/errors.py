"""Shared exception types."""


class CapExceededError(ValueError):
    """An exact computation was asked for beyond its configured size cap."""
