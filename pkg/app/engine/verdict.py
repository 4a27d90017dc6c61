"""Outcome of one verification check"""
from dataclasses import dataclass, field

from app.engine.exact_core import to_plain
from app.utils.errors import VerificationFailure


@dataclass
class Verdict:
    check: str
    params: dict
    ok: bool = True
    details: dict = field(default_factory=dict)
    coordinate: object = None
    expected: object = None
    actual: object = None

    @classmethod
    def mismatch(cls, check, params, coordinate, expected, actual, **details):
        return cls(check, params, False, details, coordinate, expected, actual)

    @classmethod
    def compare(cls, check, params, expected, actual, labels=None, **details):
        """Entry-by-entry comparison of two sequences; the first difference is reported"""
        if len(expected) != len(actual):
            return cls.mismatch(check, params, 'length', len(expected), len(actual), **details)
        for position, (x, y) in enumerate(zip(expected, actual)):
            if x != y:
                coordinate = labels[position] if labels is not None else position
                return cls.mismatch(check, params, coordinate, x, y, **details)
        return cls(check, params, True, details)

    def raise_for_status(self):
        if not self.ok:
            raise VerificationFailure(self.check, self.params, self.coordinate, self.expected, self.actual)
        return self

    def sort_key(self):
        return self.check, tuple((k, v if isinstance(v, int) else str(v)) for k, v in sorted(self.params.items()))

    def to_dict(self):
        out = {
            'check': self.check,
            'params': to_plain(self.params),
            'verdict': 'ok' if self.ok else 'fail',
            'details': to_plain(self.details),
        }
        if not self.ok:
            out['coordinate'] = to_plain(self.coordinate)
            out['expected'] = to_plain(self.expected)
            out['actual'] = to_plain(self.actual)
        return out

    def __bool__(self):
        return self.ok
