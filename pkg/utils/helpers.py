import time
import logging
import functools
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, List, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')


def timed(label: str = ''):
    """Decorator logging the wall time of a call at DEBUG level."""
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> T:
            started = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed = time.perf_counter() - started
                logger.debug(f"{label or func.__name__} took {elapsed:.3f}s")
        return wrapper
    return decorator


def open_key(subset: Iterable[int]) -> Tuple[int, Tuple[int, ...]]:
    """Canonical sort key for opens: by size, then by sorted points."""
    points = tuple(sorted(subset))
    return (len(points), points)


def sorted_opens(opens: Iterable[FrozenSet[int]]) -> List[FrozenSet[int]]:
    return sorted(set(opens), key=open_key)


def format_open(subset: Iterable[int]) -> str:
    """'[0,1]' style key used in JSON files."""
    return '[' + ','.join(str(p) for p in sorted(subset)) + ']'


def parse_open(text: str) -> FrozenSet[int]:
    text = text.strip()
    if not (text.startswith('[') and text.endswith(']')):
        raise ValueError(f"Open key must look like [0,1], got {text!r}")
    body = text[1:-1].strip()
    if not body:
        return frozenset()
    return frozenset(int(part) for part in body.split(','))


def ordered(items: Iterable[Hashable]) -> Tuple[Hashable, ...]:
    """Deterministic order for heterogeneous hom elements and sections."""
    return tuple(sorted(set(items), key=repr))


def map_key(assignment: Dict[int, Hashable]) -> Tuple[Tuple[int, Hashable], ...]:
    """Hashable form of a finite map, sorted by argument."""
    return tuple(sorted(assignment.items()))


def describe(value: Any, limit: int = 60) -> str:
    text = repr(value)
    return text if len(text) <= limit else text[:limit - 3] + '...'


class UnionFind:
    """Disjoint sets over arbitrary hashable items, with path compression."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self._parent: Dict[Hashable, Hashable] = {}
        self._rank: Dict[Hashable, int] = {}
        for item in items:
            self.add(item)

    def add(self, item: Hashable) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._rank[item] = 0

    def find(self, item: Hashable) -> Hashable:
        self.add(item)
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1
        return True

    def classes(self) -> List[List[Hashable]]:
        groups: Dict[Hashable, List[Hashable]] = {}
        for item in self._parent:
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())
