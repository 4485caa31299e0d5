
from .helpers import (
    timed,
    open_key,
    sorted_opens,
    format_open,
    parse_open,
    ordered,
    map_key,
    describe,
    UnionFind,
)
from .config import Config, ALL_SUITES
from .reporting import Verdict, Violation, CheckReport, CheckResult, Report, stable_digest
from .errors import ToolkitError, to_jsonable

__all__ = [
    'timed',
    'open_key',
    'sorted_opens',
    'format_open',
    'parse_open',
    'ordered',
    'map_key',
    'describe',
    'UnionFind',
    'Config',
    'ALL_SUITES',
    'Verdict',
    'Violation',
    'CheckReport',
    'CheckResult',
    'Report',
    'stable_digest',
    'ToolkitError',
    'to_jsonable',
]
