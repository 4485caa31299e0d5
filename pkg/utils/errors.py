import logging
from typing import Any, Dict

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert witness values (frozensets, tuples, nested dicts) into JSON-friendly data."""
    if isinstance(value, (frozenset, set)):
        items = [to_jsonable(v) for v in value]
        try:
            return sorted(items)
        except TypeError:
            return sorted(items, key=repr)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


class ToolkitError(ValueError):
    """
    Base class for every error raised by the toolkit.

    Each error carries a structured witness so callers (and the cli) can
    report what failed without parsing the message.
    """

    def __init__(self, message: str, **witness: Any):
        super().__init__(message)
        self.witness: Dict[str, Any] = witness

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': str(self),
            'witness': to_jsonable(self.witness),
        }


# finspace
class UnknownPoint(ToolkitError):
    pass


class MissingEmptyOrFull(ToolkitError):
    pass


class NotClosedUnderUnion(ToolkitError):
    pass


class NotClosedUnderIntersection(ToolkitError):
    pass


class NonOpenSubset(ToolkitError):
    pass


class InvalidPointMap(ToolkitError):
    pass


class CoverBudgetExceeded(ToolkitError):
    pass


# sheaves
class EmptyStalkRejected(ToolkitError):
    pass


class NotASheaf(ToolkitError):
    pass


# pseudogroups
class NotT1Space(ToolkitError):
    pass


class MissingUnderlyingFunctor(ToolkitError):
    pass


class DecompositionViolated(ToolkitError):
    pass


class NotAGroupoid(ToolkitError):
    pass


class CompositionUndefined(ToolkitError):
    pass


class NotConcrete(ToolkitError):
    pass


class NotAPseudogroup(ToolkitError):
    pass


# groupoids
class NotEtale(ToolkitError):
    pass


class NotAPseudogroupSheaf(ToolkitError):
    pass


class NoSectionThroughArrow(ToolkitError):
    pass


class WitnessFailed(ToolkitError):
    pass


# sheafification
class NoFactorization(ToolkitError):
    pass


class EnumerationBudgetExceeded(ToolkitError):
    pass


# cli
class ParseError(ToolkitError):
    pass


class SchemaError(ToolkitError):
    pass


class SuiteUnavailable(ToolkitError):
    pass


class BudgetExceeded(ToolkitError):
    pass


INPUT_ERRORS = (ParseError, SchemaError)
