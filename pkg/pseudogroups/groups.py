import logging
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Tuple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its elements and multiplication table."""

    name: str
    elements: Tuple[Hashable, ...]
    table: Tuple[Tuple[Tuple[Hashable, Hashable], Hashable], ...]
    identity: Hashable

    @classmethod
    def from_function(cls, name: str, elements, mul: Callable[[Hashable, Hashable], Hashable], identity) -> 'FiniteGroup':
        elements = tuple(elements)
        table = tuple(((a, b), mul(a, b)) for a in elements for b in elements)
        return cls(name=name, elements=elements, table=table, identity=identity)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: Hashable, b: Hashable) -> Hashable:
        return self._lookup[(a, b)]

    def inverse(self, a: Hashable) -> Hashable:
        for b in self.elements:
            if self.mul(a, b) == self.identity:
                return b
        raise ValueError(f"{a!r} has no inverse in {self.name}")

    @property
    def _lookup(self) -> Dict[Tuple[Hashable, Hashable], Hashable]:
        cache = self.__dict__.get('_lookup_cache')
        if cache is None:
            cache = dict(self.table)
            object.__setattr__(self, '_lookup_cache', cache)
        return cache

    def check_axioms(self) -> List[str]:
        """Return a list of violated group axioms (empty when valid)."""
        issues = []
        els = self.elements
        for a in els:
            for b in els:
                if (a, b) not in self._lookup or self.mul(a, b) not in els:
                    issues.append(f"{a}*{b} undefined or outside the group")
        if issues:
            return issues
        for a in els:
            if self.mul(self.identity, a) != a or self.mul(a, self.identity) != a:
                issues.append(f"identity fails on {a}")
            if not any(self.mul(a, b) == self.identity and self.mul(b, a) == self.identity for b in els):
                issues.append(f"{a} has no inverse")
        for a, b, c in itertools.product(els, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                issues.append(f"associativity fails on ({a},{b},{c})")
                break
        return issues


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with elements 'r0'..'r{n-1}'."""
    elements = [f"r{k}" for k in range(n)]
    return FiniteGroup.from_function(
        f"Z{n}", elements,
        lambda a, b: f"r{(int(a[1:]) + int(b[1:])) % n}",
        'r0',
    )


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def klein_group() -> FiniteGroup:
    elements = ['e', 'a', 'b', 'c']
    bits = {'e': 0, 'a': 1, 'b': 2, 'c': 3}
    names = {v: k for k, v in bits.items()}
    return FiniteGroup.from_function('V4', elements, lambda x, y: names[bits[x] ^ bits[y]], 'e')


def symmetric_group_3() -> FiniteGroup:
    perms = list(itertools.permutations(range(3)))
    label = {p: 'p' + ''.join(str(i) for i in p) for p in perms}
    back = {v: k for k, v in label.items()}

    def mul(a, b):
        pa, pb = back[a], back[b]
        return label[tuple(pa[pb[i]] for i in range(3))]

    return FiniteGroup.from_function('S3', [label[p] for p in perms], mul, label[(0, 1, 2)])


def standard_groups() -> List[FiniteGroup]:
    return [trivial_group(), cyclic_group(2), cyclic_group(3), cyclic_group(4), klein_group(), symmetric_group_3()]
