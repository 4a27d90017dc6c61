"""
Exact arithmetic layer

Rationals are fractions.Fraction (always reduced, positive denominator).
Factorials, double factorials and Bernoulli numbers feed every closed formula
of the socle and pixton modules.
"""
from fractions import Fraction
from math import comb, gcd, lcm, factorial as _factorial
import threading

from app.utils.errors import DomainError

ExactRational = Fraction

_bernoulli_lock = threading.Lock()
# entry k holds B_{2k}
_bernoulli_even = [Fraction(1)]


def rational(value, denominator=1):
    """Coerce an int, Fraction or 'p/q' string to an ExactRational"""
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value, denominator)


def factorial(k):
    if k < 0:
        raise DomainError(f'factorial of negative integer {k}')
    return _factorial(k)


def double_factorial(k):
    """
    k!! = k(k-2)(k-4)... down to 1 or 2.

    Args:
        k: integer >= -1; (-1)!! = 0!! = 1!! = 1

    Returns:
        int
    """
    if k < -1:
        raise DomainError(f'double factorial undefined for {k}')
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def _extend_bernoulli(count):
    # sum_{r=0}^{m} C(m+1, r) B_r = 0 restricted to even r; odd terms vanish except B_1
    with _bernoulli_lock:
        while len(_bernoulli_even) <= count:
            m = 2 * len(_bernoulli_even)
            total = Fraction(0)
            for j, value in enumerate(_bernoulli_even):
                total += comb(m + 1, 2 * j) * value
            total += (m + 1) * Fraction(-1, 2)
            _bernoulli_even.append(-total / (m + 1))


def bernoulli(index):
    """
    Bernoulli number B_index for an even positive index.

    Even-index values do not depend on the sign convention for B_1;
    bernoulli(8) == -1/30.
    """
    if not isinstance(index, int) or index <= 0 or index % 2:
        raise DomainError(f'bernoulli expects an even positive index, got {index}')
    half = index // 2
    if len(_bernoulli_even) <= half:
        _extend_bernoulli(half)
    return _bernoulli_even[half]


class BernoulliTable:
    """Immutable snapshot of B_0, B_2, ..., B_{2k}; values[k] is B_{2k}"""

    def __init__(self, size):
        if size < 0:
            raise DomainError('table size must be nonnegative')
        if size:
            bernoulli(2 * size)
        self.values = tuple(_bernoulli_even[:size + 1])

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f'<BernoulliTable up to B_{2 * (len(self.values) - 1)}>'


def lcm_of_denominators(values):
    return lcm(1, *(Fraction(value).denominator for value in values))


def integer_content(values):
    """gcd of a sequence of integers (0 for an all-zero sequence)"""
    return gcd(*(int(value) for value in values))


def format_rational(value):
    """'p' for integers, 'p/q' otherwise"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def to_plain(value):
    """JSON-ready copy of value; Fractions become format_rational strings"""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return str(value)
