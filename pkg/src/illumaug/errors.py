"""Exception types shared across the package."""


class DomainError(Exception):
    """A domain rule was violated (degenerate illuminant, empty mask, ...).

    The CLI maps these to exit code 1; I/O and usage failures exit with 2.
    """


class BankFormatError(ValueError):
    """An illuminant bank file could not be parsed or failed validation."""


class ScoreFormatError(ValueError):
    """A score CSV file could not be parsed or failed validation."""


class UnsupportedImageError(ValueError):
    """The image file has a format or bit depth this tool does not accept."""
