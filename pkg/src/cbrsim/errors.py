"""Exception hierarchy.

Everything raised on bad input derives from :class:`CBRError`, which is a
``ValueError`` so callers that only care about "bad data" can catch that.
"""

from __future__ import annotations


class CBRError(ValueError):
    """Base class for all input and model errors."""


class InvalidSchema(CBRError):
    pass


class MissingOrdinalOrder(InvalidSchema):
    def __init__(self, attribute: str):
        super().__init__(
            f"attribute {attribute!r} is ordinal but no level order was configured; "
            f"add \"levels\": [...] for it in the schema config"
        )
        self.attribute = attribute


class UnknownAttribute(CBRError):
    pass


class MissingAttribute(CBRError):
    pass


class UnknownCategory(CBRError):
    pass


class UnknownLevel(UnknownCategory):
    pass


class NonNumeric(CBRError):
    pass


class NonFinite(NonNumeric):
    pass


class EmptyInput(CBRError):
    pass


class EmptyDataset(EmptyInput):
    pass


class EmptyQuery(EmptyInput):
    pass


class EmptyCaseBase(EmptyInput):
    pass


class DuplicateId(CBRError):
    pass


def at_row(exc: CBRError, row: int) -> CBRError:
    """Tag ``exc`` with the 0-based data row it came from."""
    exc.row = row
    exc.args = (f"row {row}: {exc}",)
    return exc


class MalformedRow(CBRError):
    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} fields, got {got}")
        self.line = line


class NoUsableAttributes(CBRError):
    pass


class VersionMismatch(CBRError):
    pass


class SchemaCorruption(CBRError):
    pass


class LabelMissing(CBRError):
    pass


class InvalidLabel(CBRError):
    pass


class NoNumericAttributes(CBRError):
    pass


class DegenerateSpreadWarning(UserWarning):
    """A numeric column has zero IQR or zero range; a default degree was used."""
