import json
import hashlib
import logging
from datetime import datetime
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .errors import to_jsonable

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
SKIPPED = 'skipped-over-budget'
ERROR = 'error'
NOT_APPLICABLE = 'not-applicable'
UNAVAILABLE = 'unavailable'


@dataclass
class Verdict:
    """A boolean result that carries a witness when it is false."""

    ok: bool
    witness: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {'ok': self.ok, 'witness': to_jsonable(self.witness)}


@dataclass
class Violation:
    kind: str
    message: str
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'message': self.message, 'witness': to_jsonable(self.witness)}


@dataclass
class CheckReport:
    """
    Report-valued result of a structural check.

    Violations are grouped by a kind string such as 'associativity' or
    'condition_2'; `sections` records which parts were evaluated at all.
    """

    name: str
    violations: List[Violation] = field(default_factory=list)
    sections: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, kind: str, message: str, **witness: Any) -> None:
        self.violations.append(Violation(kind, message, witness))
        self.sections[kind] = False

    def mark(self, kind: str) -> None:
        """Record that a section was evaluated (clean unless a violation arrives)."""
        self.sections.setdefault(kind, True)

    def passed(self, kind: str) -> bool:
        return self.sections.get(kind, False) and not any(v.kind == kind for v in self.violations)

    def failed(self, kind: str) -> bool:
        return any(v.kind == kind for v in self.violations)

    def merge(self, other: 'CheckReport', prefix: str = '') -> 'CheckReport':
        for kind, state in other.sections.items():
            key = f"{prefix}{kind}"
            self.sections[key] = self.sections.get(key, True) and state
        for v in other.violations:
            self.violations.append(Violation(f"{prefix}{v.kind}", v.message, v.witness))
        self.notes.extend(other.notes)
        return self

    def first(self, kind: Optional[str] = None) -> Optional[Violation]:
        for v in self.violations:
            if kind is None or v.kind == kind:
                return v
        return None

    def to_results(self, prefix: str = '') -> List['CheckResult']:
        """One result per evaluated section, carrying the first violation as witness."""
        results = []
        for kind in sorted(self.sections):
            violation = self.first(kind)
            witness = {'message': violation.message, **violation.witness} if violation else {}
            details = {'notes': list(self.notes)} if self.notes else {}
            results.append(CheckResult(name=f"{prefix}{kind}", status=FAIL if violation else PASS,
                                       witness=witness, details=details))
        return results

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'ok': self.ok,
            'sections': dict(sorted(self.sections.items())),
            'violations': [v.to_dict() for v in self.violations],
            'notes': list(self.notes),
        }


@dataclass
class CheckResult:
    """One line of a cli report."""

    name: str
    status: str
    witness: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'status': self.status,
            'witness': to_jsonable(self.witness),
            'details': to_jsonable(self.details),
        }
        if include_timing:
            data['seconds'] = round(self.seconds, 4)
        return data


@dataclass
class Report:
    """
    Machine-readable run report.

    The digest covers everything except timings and the timestamp, so two
    runs with identical inputs and seed share a digest.
    """

    command: str
    target: str
    results: List[CheckResult] = field(default_factory=list)
    instance_digests: Dict[str, str] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    created_at: str = field(default_factory=lambda: datetime.now().isoformat(timespec='seconds'))

    def add(self, result: CheckResult) -> None:
        self.results.append(result)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if r.status in (FAIL, ERROR)]

    @property
    def ok(self) -> bool:
        return not self.failures

    def counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for r in self.results:
            counts[r.status] = counts.get(r.status, 0) + 1
        return counts

    def stable_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'target': self.target,
            'results': [r.to_dict(include_timing=False) for r in self.results],
            'instance_digests': dict(sorted(self.instance_digests.items())),
            'summary': to_jsonable(self.summary),
        }

    def digest(self) -> str:
        return stable_digest(self.stable_dict())

    def to_dict(self) -> Dict[str, Any]:
        data = self.stable_dict()
        data['results'] = [r.to_dict() for r in self.results]
        data['counts'] = self.counts()
        data['digest'] = self.digest()
        data['timing'] = {
            'created_at': self.created_at,
            'total_seconds': round(sum(r.seconds for r in self.results), 4),
        }
        return data

    def render_text(self) -> str:
        lines = [f"{self.command} {self.target}", "-" * 60]
        for r in self.results:
            mark = {PASS: '✓', FAIL: '✗', ERROR: '✗'}.get(r.status, '-')
            lines.append(f"  {mark} {r.name}: {r.status}")
            if r.status in (FAIL, ERROR) and r.witness:
                lines.append(f"      witness: {json.dumps(to_jsonable(r.witness), sort_keys=True)[:200]}")
        counts = self.counts()
        lines.append("-" * 60)
        lines.append("  " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
        return "\n".join(lines)


def stable_digest(data: Any) -> str:
    """sha256 over canonical JSON."""
    payload = json.dumps(to_jsonable(data), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()
