"""Exception types shared across the package."""


class TvsrError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedFormatError(TvsrError):
    """Image file is in a format or mode we do not handle."""


class CorruptDataError(TvsrError):
    """Image or model file is structurally damaged or truncated."""


class BankParseError(TvsrError):
    """Stencil bank file is syntactically malformed (carries a line number)."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class BankValidationError(TvsrError):
    """Stencil bank contents violate a structural invariant."""


class ModelFormatError(TvsrError):
    """Model file has wrong magic, version, or inconsistent dimensions."""


class ConfigError(TvsrError):
    """Pipeline/CLI configuration is invalid or contains unknown keys."""


class DatasetError(TvsrError):
    """Dataset directory is missing, empty, or unusable."""


class StageError(TvsrError):
    """A pipeline stage failed; the message names the stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
