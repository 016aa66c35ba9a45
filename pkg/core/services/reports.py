"""
Report Service.

Results are reduced to plain JSON values with canonical text for exact
objects: rationals as "a/b" (or "a" when integral), polynomials and
rational functions in graded-lex text, +inf as "inf". Output uses sorted
keys so identical inputs give byte-identical reports.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .exact_algebra import INFINITY, MPoly, RatFn

SCHEMA_ID = 'regulous-lab/report/v1'
TOOL_VERSION = '0.1.0'

STATUS_PASS = 'pass'
STATUS_FAIL = 'fail'
STATUS_INCONCLUSIVE = 'inconclusive'
STATUS_ERROR = 'error'


def canonical(value: Any) -> Any:
    """Convert exact objects and containers to canonical JSON values."""
    if value is INFINITY:
        return 'inf'
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (MPoly, RatFn)):
        return value.to_text()
    if hasattr(value, 'as_record'):
        return canonical(value.as_record())
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((canonical(v) for v in value), key=lambda item: json.dumps(item, sort_keys=True))
    raise TypeError(f"Cannot serialise {type(value).__name__} into a report")


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


@dataclass
class CommandRecord:
    verb: str
    status: str
    line: int = 0
    values: Dict[str, Any] = field(default_factory=dict)
    message: Optional[str] = None

    def as_record(self) -> Dict[str, Any]:
        record = {
            'verb': self.verb,
            'status': self.status,
            'line': self.line,
            'values': canonical(self.values),
        }
        if self.message:
            record['message'] = self.message
        return record


@dataclass
class Report:
    commands: List[CommandRecord] = field(default_factory=list)
    input_digest: str = ''
    seed: int = 0

    def as_record(self) -> Dict[str, Any]:
        return {
            'schema': SCHEMA_ID,
            'tool_version': TOOL_VERSION,
            'input_digest': self.input_digest,
            'seed': self.seed,
            'commands': [c.as_record() for c in self.commands],
        }

    @property
    def statuses(self) -> List[str]:
        return [c.status for c in self.commands]


def emit_report(results: List[CommandRecord], input_digest: str = '', seed: int = 0) -> str:
    """Deterministic JSON text for a result list."""
    report = Report(list(results), input_digest, seed)
    return json.dumps(report.as_record(), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def load_report(text: str) -> Report:
    data = json.loads(text)
    if data.get('schema') != SCHEMA_ID:
        raise ValueError(f"Unknown report schema {data.get('schema')!r}")
    commands = [
        CommandRecord(c['verb'], c['status'], c.get('line', 0), c.get('values', {}), c.get('message'))
        for c in data.get('commands', [])
    ]
    return Report(commands, data.get('input_digest', ''), data.get('seed', 0))


def exit_code(statuses: List[str]) -> int:
    """0 all pass, 1 any fail or error, 3 inconclusive without failures."""
    if any(s in (STATUS_FAIL, STATUS_ERROR) for s in statuses):
        return 1
    if any(s == STATUS_INCONCLUSIVE for s in statuses):
        return 3
    return 0


def overall_status(statuses: List[str]) -> str:
    """Worst status of a run: error, fail, inconclusive, pass."""
    for status in (STATUS_ERROR, STATUS_FAIL, STATUS_INCONCLUSIVE):
        if status in statuses:
            return status
    return STATUS_PASS
