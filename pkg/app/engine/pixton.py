"""
Pixton's relations restricted to M_{g,n}

The relation attached to admissible data (sigma, a) in degree d is the T^d
coefficient of

    kappa( exp({1-A}) * {C_sigma_1} ... {C_sigma_l} ) * prod_i C_{a_i}(psi_i T)

where A, B are the hypergeometric series below, C_{3i} = T^i A,
C_{3i+1} = T^i B, {S} decorates the T^k coefficient with the formal
variable K_k, and kappa sends K_{e_1}...K_{e_l} to the cycle expansion of
kappa_{e_1..e_l}.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
import logging

from sympy.utilities.iterables import partitions

from app.engine.exact_core import factorial
from app.engine.linalg import ExactMatrix
from app.engine.taut_ring import (
    MultiKappa, RingContext, TautExpression, expr_mul, monomial_basis, multi_kappa_expand,
)
from app.utils.errors import DomainError

logger = logging.getLogger(__name__)


class TruncSeries:
    """Power series in T with Fraction coefficients, exact modulo T^(order+1)"""

    __slots__ = ('order', 'coefficients')

    def __init__(self, coefficients, order=None):
        coefficients = [Fraction(c) for c in coefficients]
        if order is None:
            order = len(coefficients) - 1
        coefficients = (coefficients + [Fraction(0)] * (order + 1))[:order + 1]
        self.order = order
        self.coefficients = tuple(coefficients)

    def __getitem__(self, k):
        return self.coefficients[k] if 0 <= k <= self.order else Fraction(0)

    def __add__(self, other):
        order = min(self.order, other.order)
        return TruncSeries([self[k] + other[k] for k in range(order + 1)], order)

    def __sub__(self, other):
        order = min(self.order, other.order)
        return TruncSeries([self[k] - other[k] for k in range(order + 1)], order)

    def __mul__(self, other):
        order = min(self.order, other.order)
        return TruncSeries(
            [sum((self[i] * other[k - i] for i in range(k + 1)), Fraction(0)) for k in range(order + 1)],
            order,
        )

    def shift(self, power):
        """Multiply by T^power"""
        return TruncSeries([Fraction(0)] * power + list(self.coefficients), self.order)

    @classmethod
    def one(cls, order):
        return cls([1], order)

    def __eq__(self, other):
        return isinstance(other, TruncSeries) and self.order == other.order and self.coefficients == other.coefficients

    def __repr__(self):
        return f'<TruncSeries {list(map(str, self.coefficients))}>'


class KPolynomial:
    """Polynomial in the formal variables K_0, K_1, ...; keys are descending index tuples"""

    __slots__ = ('_terms',)

    def __init__(self, terms=None):
        clean = {}
        for key, c in (terms or {}).items():
            key = tuple(sorted(key, reverse=True))
            clean[key] = clean.get(key, Fraction(0)) + Fraction(c)
        self._terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def variable(cls, index, coefficient=1):
        return cls({(index,): coefficient})

    @classmethod
    def constant(cls, value):
        return cls({(): value})

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self):
        return not self._terms

    def __add__(self, other):
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return KPolynomial(terms)

    def __mul__(self, other):
        if not isinstance(other, KPolynomial):
            return KPolynomial({k: c * Fraction(other) for k, c in self._terms.items()})
        terms = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = tuple(sorted(k1 + k2, reverse=True))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return KPolynomial(terms)

    def __eq__(self, other):
        return isinstance(other, KPolynomial) and self._terms == other._terms

    def __repr__(self):
        parts = []
        for key, c in self.items():
            parts.append(f'{c}*' + '*'.join(f'K{e}' for e in key) if key else str(c))
        return '<KPolynomial ' + (' + '.join(parts) or '0') + '>'


class KSeries:
    """Power series in T with KPolynomial coefficients"""

    __slots__ = ('order', 'coefficients')

    def __init__(self, coefficients, order=None):
        coefficients = list(coefficients)
        if order is None:
            order = len(coefficients) - 1
        coefficients = (coefficients + [KPolynomial()] * (order + 1))[:order + 1]
        self.order = order
        self.coefficients = tuple(coefficients)

    def __getitem__(self, k):
        return self.coefficients[k] if 0 <= k <= self.order else KPolynomial()

    def __add__(self, other):
        order = min(self.order, other.order)
        return KSeries([self[k] + other[k] for k in range(order + 1)], order)

    def __mul__(self, other):
        order = min(self.order, other.order)
        out = []
        for k in range(order + 1):
            acc = KPolynomial()
            for i in range(k + 1):
                if not self[i].is_zero() and not other[k - i].is_zero():
                    acc = acc + self[i] * other[k - i]
            out.append(acc)
        return KSeries(out, order)

    def scale(self, factor):
        return KSeries([c * factor for c in self.coefficients], self.order)

    @classmethod
    def one(cls, order):
        return cls([KPolynomial.constant(1)], order)


def _hypergeometric(k):
    return Fraction(factorial(6 * k), factorial(2 * k) * factorial(3 * k))


def series_A(order):
    """sum (6k)!/((2k)!(3k)!) T^k"""
    if order < 0:
        raise DomainError('series order must be nonnegative')
    return TruncSeries([_hypergeometric(k) for k in range(order + 1)], order)


def series_B(order):
    """sum (6k+1)/(6k-1) (6k)!/((2k)!(3k)!) T^k"""
    if order < 0:
        raise DomainError('series order must be nonnegative')
    return TruncSeries([Fraction(6 * k + 1, 6 * k - 1) * _hypergeometric(k) for k in range(order + 1)], order)


def series_C(j, order):
    """C_{3i} = T^i A, C_{3i+1} = T^i B"""
    if j < 0 or j % 3 == 2:
        raise DomainError(f'C_j is undefined for j={j} (j must be nonnegative and not 2 mod 3)')
    base = series_A(order) if j % 3 == 0 else series_B(order)
    return base.shift(j // 3)


def decorate(series):
    """{S}: the T^k coefficient c becomes c*K_k"""
    return KSeries([KPolynomial.variable(k, c) for k, c in enumerate(series.coefficients)], series.order)


def k_exp(series):
    """Formal exponential of a KSeries without constant term"""
    if not series[0].is_zero():
        raise DomainError('k_exp needs a series with zero constant term')
    result = KSeries.one(series.order)
    power = KSeries.one(series.order)
    for j in range(1, series.order + 1):
        power = power * series
        result = result + power.scale(Fraction(1, factorial(j)))
    return result


def kappa_apply(series, ctx):
    """
    Apply the kappa operator coefficientwise.

    Returns a tuple of TautExpression indexed by the power of T.
    """
    out = []
    for poly in series.coefficients:
        acc = TautExpression.zero(ctx.n)
        for key, c in poly.items():
            if not key:
                acc = acc + TautExpression.constant(c, ctx.n)
            else:
                acc = acc + multi_kappa_expand(MultiKappa(key), ctx).scale(c)
        out.append(acc)
    return tuple(out)


def _expr_series_mul(left, right, order):
    out = []
    for k in range(order + 1):
        acc = TautExpression.zero(left[0].n)
        for i in range(k + 1):
            if not left[i].is_zero() and not right[k - i].is_zero():
                acc = acc + expr_mul(left[i], right[k - i])
        out.append(acc)
    return out


@dataclass(frozen=True)
class RelationParams:
    """
    Data (g, n, d, sigma, a) of one relation.

    Admissible when no part of sigma and no a_i is 2 mod 3 and
    3d >= g+1+sum(sigma)+sum(a) with both sides of equal parity.
    """
    g: int
    n: int
    d: int
    sigma: tuple = ()
    a: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'sigma', tuple(sorted((int(s) for s in self.sigma), reverse=True)))
        a = tuple(int(x) for x in self.a) if self.a is not None else (0,) * self.n
        if len(a) != self.n:
            raise DomainError(f'a has {len(a)} entries for {self.n} points')
        object.__setattr__(self, 'a', a)

    @property
    def context(self):
        return RingContext(self.g, self.n)

    @property
    def weight(self):
        return self.g + 1 + sum(self.sigma) + sum(self.a)

    def problems(self):
        issues = []
        if 2 * self.g - 2 + self.n <= 0:
            issues.append('unstable (g, n)')
        if any(s <= 0 for s in self.sigma):
            issues.append('sigma must have positive parts')
        if any(s % 3 == 2 for s in self.sigma):
            issues.append('sigma has a part congruent to 2 mod 3')
        if any(x < 0 or x % 3 == 2 for x in self.a):
            issues.append('a has a value that is negative or congruent to 2 mod 3')
        if 3 * self.d < self.weight:
            issues.append(f'3d={3 * self.d} < g+1+|sigma|+|a|={self.weight}')
        elif (3 * self.d - self.weight) % 2:
            issues.append('3d and g+1+|sigma|+|a| have different parity')
        return issues

    @property
    def admissible(self):
        return not self.problems()

    def validate(self):
        issues = self.problems()
        if issues:
            raise DomainError(f'inadmissible relation data {self.describe()}: ' + '; '.join(issues))
        return self

    def describe(self):
        a = {i: x for i, x in enumerate(self.a, start=1) if x}
        return f'g={self.g} n={self.n} d={self.d} sigma={list(self.sigma)} a={a}'

    def to_dict(self):
        return {
            'g': self.g,
            'n': self.n,
            'd': self.d,
            'sigma': list(self.sigma),
            'a': list(self.a),
        }


@lru_cache(maxsize=4096)
def pixton_relation(params):
    """
    The normalized degree-d relation for admissible params.

    Raises DomainError for inadmissible params.
    """
    params.validate()
    ctx = params.context
    order = params.d
    one_minus_a = TruncSeries.one(order) - series_A(order)
    k_series = k_exp(decorate(one_minus_a))
    for part in params.sigma:
        k_series = k_series * decorate(series_C(part, order))
    series = list(kappa_apply(k_series, ctx))
    for point, value in enumerate(params.a, start=1):
        c = series_C(value, order)
        factor = [TautExpression.psi(ctx.n, point, k).scale(c[k]) if k else TautExpression.constant(c[0], ctx.n)
                  for k in range(order + 1)]
        series = _expr_series_mul(series, factor, order)
    relation = series[order].normalized()
    logger.debug(f'relation {params.describe()}: {relation.to_text()}')
    return relation


def _restricted_partitions(total, max_parts=None):
    """Partitions of total into positive parts that are not 2 mod 3, descending"""
    if total == 0:
        return [()]
    out = []
    for p in partitions(total):
        parts = tuple(sorted((k for k, m in p.items() for _ in range(m)), reverse=True))
        if any(x % 3 == 2 for x in parts):
            continue
        if max_parts is not None and len(parts) > max_parts:
            continue
        out.append(parts)
    return sorted(out, reverse=True)


@dataclass(frozen=True)
class RelationFamily:
    """One S_n-orbit of admissible data: sigma and the multiset of nonzero a values"""
    g: int
    d: int
    sigma: tuple
    profile: tuple

    def members(self, n):
        """All RelationParams of the orbit on n points, representative first"""
        seen = set()
        for points in permutations(range(n), len(self.profile)):
            a = [0] * n
            for point, value in zip(points, self.profile):
                a[point] = value
            seen.add(tuple(a))
        return [RelationParams(self.g, n, self.d, self.sigma, a) for a in sorted(seen, reverse=True)]

    def representative(self, n):
        return self.members(n)[0]

    @property
    def label(self):
        return f'sigma={{{",".join(map(str, self.sigma))}}} {self.orbit}'

    @property
    def orbit(self):
        names = 'klpqrs'
        if not self.profile:
            return 'a=0'
        return ', '.join(f'a_{names[i] if i < len(names) else i}={v}' for i, v in enumerate(self.profile))


def enumerate_admissible(ctx, d):
    """
    Admissible (sigma, a) up to relabelling the points.

    Returns RelationFamily objects in a fixed order: by total weight, then
    sigma, then the a-profile.
    """
    budget = 3 * d - ctx.g - 1
    families = []
    if budget < 0:
        return families
    for total in range(budget % 2, budget + 1, 2):
        for sigma_total in range(total + 1):
            for sigma in _restricted_partitions(sigma_total):
                for profile in _restricted_partitions(total - sigma_total, max_parts=ctx.n):
                    families.append(RelationFamily(ctx.g, d, sigma, profile))
    return families


def generated_relations(ctx, d):
    """[(params, relation)] for every admissible datum on ctx.n points"""
    out = []
    for family in enumerate_admissible(ctx, d):
        for params in family.members(ctx.n):
            out.append((params, pixton_relation(params)))
    return out


def relation_matrix(ctx, d, basis=None):
    """Rows: all generated relations of degree d; columns: monomial basis"""
    if basis is None:
        basis = monomial_basis(ctx, d)
    rows = [relation.vector(basis) for _, relation in generated_relations(ctx, d)]
    return ExactMatrix(rows, len(basis))


def _sum(terms, n):
    total = TautExpression.zero(n)
    for term in terms:
        total = total + term
    return total


class _Classes:
    """Degree-two classes on n points, for writing relations termwise"""

    def __init__(self, ctx):
        self.ctx = ctx
        self.n = ctx.n
        self.points = range(1, ctx.n + 1)

    def psi2(self, i):
        return TautExpression.psi(self.n, i, 2)

    def psipsi(self, i, j):
        return expr_mul(TautExpression.psi(self.n, i), TautExpression.psi(self.n, j))

    def k1psi(self, i):
        return expr_mul(TautExpression.kappa(self.n, 1), TautExpression.psi(self.n, i))

    @property
    def k2(self):
        return TautExpression.kappa(self.n, 2)

    @property
    def k11(self):
        return multi_kappa_expand(MultiKappa((1, 1)), self.ctx)

    def sum_psi2(self, skip=()):
        return _sum((self.psi2(i) for i in self.points if i not in skip), self.n)

    def sum_psipsi(self, skip=()):
        return _sum((self.psipsi(i, j) for i in self.points for j in self.points
                     if i < j and i not in skip and j not in skip), self.n)

    def sum_k1psi(self, skip=()):
        return _sum((self.k1psi(i) for i in self.points if i not in skip), self.n)


def genus3_published_relations(n):
    """
    The five published genus-3 degree-2 families with kappa_0 = n+4.

    Keys: '(1)', '(2)_k', '(3)', '(4)_k', '(5)_{k,l}'.
    """
    ctx = RingContext(3, n)
    c = _Classes(ctx)
    tail = c.k2.scale(-35) + c.k11.scale(3)
    out = {'(1)': c.sum_psi2().scale(35) + c.sum_psipsi().scale(6) - c.sum_k1psi().scale(6) + tail}
    for k in c.points:
        out[f'(2)_{k}'] = (
            c.sum_psi2(skip=(k,)).scale(35) - c.psi2(k).scale(45)
            - _sum((c.psipsi(k, i) for i in c.points if i != k), n).scale(10)
            + c.sum_psipsi(skip=(k,)).scale(6)
            + c.k1psi(k).scale(10) - c.sum_k1psi(skip=(k,)).scale(6) + tail
        )
    out['(3)'] = (
        c.sum_psi2().scale(35 * (n + 4)) + c.sum_psipsi().scale(6 * (n + 4))
        - c.sum_k1psi().scale(6 * n + 40) - c.k2.scale(35 * n + 220) + c.k11.scale(3 * n + 28)
    )
    for k in c.points:
        out[f'(4)_{k}'] = (
            c.sum_psi2(skip=(k,)).scale(35 * (n + 4)) + c.sum_psipsi(skip=(k,)).scale(6 * (n + 4))
            - c.sum_k1psi(skip=(k,)).scale(6 * (n + 5)) - c.k2.scale(35 * (n + 5)) + c.k11.scale(3 * (n + 6))
        )
    for k in c.points:
        for l in c.points:
            if k < l:
                skip = (k, l)
                out[f'(5)_{{{k},{l}}}'] = (
                    c.sum_psi2(skip=skip).scale(35) + c.sum_psipsi(skip=skip).scale(6)
                    - c.sum_k1psi(skip=skip).scale(6) + tail
                )
    return out


def genus4_published_relations(n):
    """
    The two published genus-4 degree-2 families (kappa_0 = n+6), keyed
    'sigma={1}' and 'a_k=1' for each k.
    """
    ctx = RingContext(4, n)
    c = _Classes(ctx)
    k0 = ctx.kappa0
    out = {'sigma={1}': (
        c.k2.scale(630 - 77 * k0) - c.k11.scale(24 + 5 * k0) - c.sum_psi2().scale(77 * k0)
        + c.sum_k1psi().scale(24 + 10 * k0) - c.sum_psipsi().scale(10 * k0)
    )}
    for k in c.points:
        out[f'a_{k}=1'] = (
            c.k2.scale(77) - c.k11.scale(5) + c.psi2(k).scale(91) - c.sum_psi2(skip=(k,)).scale(77)
            - c.k1psi(k).scale(14) + c.sum_k1psi(skip=(k,)).scale(10)
            + _sum((c.psipsi(k, i) for i in c.points if i != k), n).scale(14)
            - c.sum_psipsi(skip=(k,)).scale(10)
        )
    return out
