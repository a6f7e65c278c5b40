"""Exporter exception types."""


class ExportError(Exception):
    """Base class for exporter failures."""


class AssetError(ExportError):
    """A required pretrained asset (weights, tokenizer, ...) is missing."""


class FormatError(ExportError):
    """An input file or model output does not match the expected contract."""


class IoError(ExportError):
    """A filesystem read or write failed."""
