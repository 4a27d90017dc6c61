"""
Tautological ring of M_{g,n}

Canonical form: polynomials in psi_1..psi_n and single-index kappa classes
with positive indices.  kappa_0 never appears; it is replaced by 2g-2+n when
multi-index classes are expanded.  Multi-index classes kappa_{e_1..e_l} live
in the presentation layer (MultiKappa) and are converted with
multi_kappa_expand / single_to_multi.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
import logging
import re

from sympy.utilities.iterables import multiset_partitions, partitions

from app.engine.exact_core import factorial, format_rational, lcm_of_denominators, integer_content
from app.utils.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RingContext:
    """Genus g and number of marked points n; requires 2g-2+n > 0"""
    g: int
    n: int

    def __post_init__(self):
        if self.g < 0 or self.n < 0:
            raise DomainError(f'invalid context g={self.g}, n={self.n}')
        if 2 * self.g - 2 + self.n <= 0:
            raise DomainError(f'M_{{{self.g},{self.n}}} is not stable (2g-2+n must be positive)')

    @property
    def kappa0(self):
        return 2 * self.g - 2 + self.n


@dataclass(frozen=True)
class TautMonomial:
    """
    prod psi_i^{psi[i-1]} * prod kappa_k for k in kappa.

    psi: exponent tuple of length n
    kappa: multiset of positive kappa indices, stored in descending order
    """
    psi: tuple
    kappa: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'psi', tuple(int(e) for e in self.psi))
        object.__setattr__(self, 'kappa', tuple(sorted((int(k) for k in self.kappa), reverse=True)))
        if any(e < 0 for e in self.psi):
            raise DomainError(f'negative psi exponent in {self.psi}')
        if any(k <= 0 for k in self.kappa):
            raise DomainError(f'kappa indices must be positive, got {self.kappa}')

    @classmethod
    def one(cls, n):
        return cls((0,) * n)

    @classmethod
    def psi_power(cls, n, point, exponent=1):
        exps = [0] * n
        exps[point - 1] = exponent
        return cls(tuple(exps))

    @property
    def n(self):
        return len(self.psi)

    @property
    def degree(self):
        return sum(self.psi) + sum(self.kappa)

    @property
    def kappa_weight(self):
        return sum(self.kappa)

    @property
    def kappa_exponents(self):
        exps = {}
        for k in self.kappa:
            exps[k] = exps.get(k, 0) + 1
        return exps

    @property
    def psi_exponents(self):
        return {i + 1: e for i, e in enumerate(self.psi) if e}

    def kappa_part(self):
        return TautMonomial((0,) * self.n, self.kappa)

    def psi_part(self):
        return TautMonomial(self.psi)

    def __mul__(self, other):
        if self.n != other.n:
            raise DomainError('monomials on different numbers of points')
        return TautMonomial(tuple(a + b for a, b in zip(self.psi, other.psi)), self.kappa + other.kappa)

    def sort_key(self):
        """
        Canonical order: degree, then larger kappa weight first, then coarser
        kappa partitions first (kappa_2 before kappa_1^2), then coarser psi
        shapes first, then the points sorted by exponent and index.
        """
        shape = sorted(self.psi, reverse=True)
        shape = tuple(-e for e in shape if e)
        points = sorted((i for i, e in enumerate(self.psi) if e), key=lambda i: (-self.psi[i], i))
        return (self.degree, -self.kappa_weight, tuple(-k for k in self.kappa), shape, tuple(points))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def to_text(self):
        factors = []
        for k, mult in sorted(self.kappa_exponents.items()):
            factors.append(f'k{k}' if mult == 1 else f'k{k}^{mult}')
        for i, e in enumerate(self.psi, start=1):
            if e:
                factors.append(f'p{i}' if e == 1 else f'p{i}^{e}')
        return '*'.join(factors) or '1'

    def __repr__(self):
        return f'<TautMonomial {self.to_text()}>'


class TautExpression:
    """Finitely supported map TautMonomial -> Fraction on n points"""

    __slots__ = ('n', '_terms')

    def __init__(self, terms=None, n=0):
        self.n = n
        clean = {}
        for mono, coefficient in (terms or {}).items():
            if mono.n != n:
                raise DomainError(f'monomial on {mono.n} points in an expression on {n} points')
            coefficient = Fraction(coefficient)
            if coefficient:
                clean[mono] = clean.get(mono, Fraction(0)) + coefficient
        self._terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def zero(cls, n):
        return cls({}, n)

    @classmethod
    def constant(cls, value, n):
        return cls({TautMonomial.one(n): value}, n)

    @classmethod
    def monomial(cls, mono, coefficient=1):
        return cls({mono: coefficient}, mono.n)

    @classmethod
    def psi(cls, n, point, exponent=1):
        return cls.monomial(TautMonomial.psi_power(n, point, exponent))

    @classmethod
    def kappa(cls, n, *indices):
        return cls.monomial(TautMonomial((0,) * n, indices))

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        """Terms in canonical monomial order"""
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def coefficient(self, mono):
        return self._terms.get(mono, Fraction(0))

    def is_zero(self):
        return not self._terms

    def degree_set(self):
        return {mono.degree for mono in self._terms}

    def is_homogeneous(self, degree=None):
        degrees = self.degree_set()
        if not degrees:
            return True
        return len(degrees) == 1 and (degree is None or degree in degrees)

    def __add__(self, other):
        self._require_points(other)
        terms = dict(self._terms)
        for mono, c in other._terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + c
        return TautExpression(terms, self.n)

    def __neg__(self):
        return TautExpression({m: -c for m, c in self._terms.items()}, self.n)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = Fraction(factor)
        return TautExpression({m: factor * c for m, c in self._terms.items()}, self.n)

    def __mul__(self, other):
        if isinstance(other, TautExpression):
            return expr_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TautExpression):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def _require_points(self, other):
        if self.n != other.n:
            raise DomainError(f'expressions on {self.n} and {other.n} points')

    def normalized(self):
        """
        Clear denominators, divide by the integer content and make the first
        coefficient in canonical order positive.
        """
        if not self._terms:
            return self
        items = self.items()
        factor = lcm_of_denominators(c for _, c in items)
        content = integer_content(c * factor for _, c in items)
        if items[0][1] < 0:
            content = -content
        return self.scale(Fraction(factor, content))

    def vector(self, basis):
        """Coefficients on an ordered monomial basis; raises if terms fall outside it"""
        index = {mono: i for i, mono in enumerate(basis)}
        result = [Fraction(0)] * len(basis)
        for mono, c in self._terms.items():
            if mono not in index:
                raise DomainError(f'{mono.to_text()} is not in the given basis')
            result[index[mono]] = c
        return result

    def relabel(self, permutation):
        """Move psi_i to psi_{permutation[i]} (1-based mapping)"""
        terms = {}
        for mono, c in self._terms.items():
            psi = [0] * self.n
            for i, e in enumerate(mono.psi, start=1):
                psi[permutation[i] - 1] = e
            terms[TautMonomial(tuple(psi), mono.kappa)] = c
        return TautExpression(terms, self.n)

    def to_text(self):
        return format_terms((c, mono.to_text()) for mono, c in self.items())

    def __repr__(self):
        return f'<TautExpression {self.to_text()}>'


def format_terms(pairs):
    """Render (coefficient, monomial text) pairs as '35*k2 - 6*k1*p1 + 3*k1^2'"""
    out = ''
    for coefficient, text in pairs:
        sign = '-' if coefficient < 0 else '+'
        magnitude = abs(coefficient)
        if text == '1':
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = text
        else:
            body = f'{format_rational(magnitude)}*{text}'
        if not out:
            out = body if sign == '+' else f'-{body}'
        else:
            out += f' {sign} {body}'
    return out or '0'


@dataclass(frozen=True)
class MultiKappa:
    """kappa_{e_1,...,e_l}; indices may contain zeros"""
    indices: tuple

    def __post_init__(self):
        indices = tuple(sorted((int(e) for e in self.indices), reverse=True))
        if not indices:
            raise DomainError('a multi-index kappa needs at least one index')
        if any(e < 0 for e in indices):
            raise DomainError(f'negative kappa index in {indices}')
        object.__setattr__(self, 'indices', indices)

    @property
    def degree(self):
        return sum(self.indices)

    def to_text(self):
        if len(self.indices) == 1:
            return f'k{self.indices[0]}'
        return 'K(' + ','.join(str(e) for e in sorted(self.indices)) + ')'


@lru_cache(maxsize=None)
def _set_partitions(size):
    """All set partitions of range(size) with weight prod (|B|-1)!"""
    result = []
    for blocks in multiset_partitions(list(range(size))):
        weight = 1
        for block in blocks:
            weight *= factorial(len(block) - 1)
        result.append((tuple(tuple(b) for b in blocks), weight))
    return tuple(result)


@lru_cache(maxsize=None)
def _expand_indices(indices, kappa0):
    """
    sum over tau in S_l of prod over cycles c of kappa_{e_c}.

    Grouping permutations by their cycle sets gives a sum over set partitions
    with weight prod (|B|-1)!.  Returns {kappa multiset: coefficient}.
    """
    out = {}
    for blocks, weight in _set_partitions(len(indices)):
        coefficient = weight
        kappas = []
        for block in blocks:
            total = sum(indices[j] for j in block)
            if total == 0:
                coefficient *= kappa0
            else:
                kappas.append(total)
        key = tuple(sorted(kappas, reverse=True))
        out[key] = out.get(key, 0) + coefficient
    return {k: c for k, c in out.items() if c}


def multi_kappa_expand(m, ctx):
    """kappa_{e_1..e_l} as a polynomial in single-index kappas, with kappa_0 = 2g-2+n"""
    return TautExpression(
        {TautMonomial((0,) * ctx.n, key): c for key, c in _expand_indices(m.indices, ctx.kappa0).items()},
        ctx.n,
    )


@lru_cache(maxsize=None)
def _single_to_multi(kappa):
    out = {kappa: Fraction(1)}
    for blocks, weight in _set_partitions(len(kappa)):
        if len(blocks) == len(kappa):
            continue
        coarser = tuple(sorted((sum(kappa[j] for j in block) for block in blocks), reverse=True))
        for key, c in _single_to_multi(coarser).items():
            out[key] = out.get(key, Fraction(0)) - weight * c
    return {k: c for k, c in out.items() if c}


def single_to_multi(mono):
    """
    prod kappa_{k_j} = sum c_m kappa_m over multi-index classes with positive parts.

    Accepts a TautMonomial (its kappa part is used) or a tuple of indices.
    Solved by recursion over coarser set partitions; no zero index occurs, so
    the result does not depend on g and n.
    """
    kappa = mono.kappa if isinstance(mono, TautMonomial) else tuple(sorted(mono, reverse=True))
    if not kappa:
        raise DomainError('single_to_multi needs a nonempty kappa part')
    if any(k <= 0 for k in kappa):
        raise DomainError(f'kappa indices must be positive, got {kappa}')
    return {MultiKappa(key): c for key, c in _single_to_multi(kappa).items()}


def expr_mul(a, b, ctx=None):
    """Bilinear product; exponents add"""
    a._require_points(b)
    if ctx is not None and ctx.n != a.n:
        raise DomainError(f'context has {ctx.n} points, expression has {a.n}')
    terms = {}
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            mono = m1 * m2
            terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
    return TautExpression(terms, a.n)


def to_multi_basis(expr):
    """
    Re-express the kappa part of each term through multi-index classes.

    Returns {(psi exponents, MultiKappa or None): coefficient}.
    """
    out = {}
    for mono, c in expr.terms.items():
        if not mono.kappa:
            parts = {None: Fraction(1)}
        else:
            parts = single_to_multi(mono)
        for multi, d in parts.items():
            key = (mono.psi, multi)
            out[key] = out.get(key, Fraction(0)) + c * d
    return {k: v for k, v in out.items() if v}


def from_multi_terms(terms, ctx):
    """Build an expression from (coefficient, psi exponents, MultiKappa or None) triples"""
    result = TautExpression.zero(ctx.n)
    for coefficient, psi, multi in terms:
        psi_part = TautExpression.monomial(TautMonomial(tuple(psi)), coefficient)
        if multi is None:
            result = result + psi_part
        else:
            result = result + expr_mul(psi_part, multi_kappa_expand(multi, ctx))
    return result


def multi_term_text(key):
    psi, multi = key
    factors = [] if multi is None else [multi.to_text()]
    factors.extend(f'p{i}' if e == 1 else f'p{i}^{e}' for i, e in enumerate(psi, start=1) if e)
    return '*'.join(factors) or '1'


def _kappa_partitions(weight):
    if weight == 0:
        return [()]
    out = []
    for p in partitions(weight):
        out.append(tuple(sorted((k for k, m in p.items() for _ in range(m)), reverse=True)))
    return out


def _psi_vectors(n, degree):
    for combo in combinations_with_replacement(range(n), degree):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        yield tuple(exps)


def monomial_basis(ctx, d):
    """All degree-d monomials in canonical order"""
    if d < 0:
        raise DomainError(f'negative degree {d}')
    monos = []
    for weight in range(d, -1, -1):
        psi_list = list(_psi_vectors(ctx.n, d - weight))
        for kappa in _kappa_partitions(weight):
            for psi in psi_list:
                monos.append(TautMonomial(psi, kappa))
    return sorted(monos, key=TautMonomial.sort_key)


_TERM = re.compile(r'\s*([+-]?)\s*([^+-]+)')
_FACTOR = re.compile(r'^(?:(k|p)(\d+)(?:\^(\d+))?|K\(([\d,\s]+)\)(?:\^(\d+))?|(\d+(?:/\d+)?))$')


def parse_expression(text, ctx):
    """Inverse of to_text; also accepts multi-index kappas written K(1,1)"""
    text = text.strip()
    if not text or text == '0':
        return TautExpression.zero(ctx.n)
    result = TautExpression.zero(ctx.n)
    position = 0
    for match in _TERM.finditer(text):
        if match.start() != position:
            raise DomainError(f'cannot parse {text!r} near position {position}')
        position = match.end()
        sign, body = match.groups()
        term = TautExpression.constant(-1 if sign == '-' else 1, ctx.n)
        for factor in body.strip().split('*'):
            term = expr_mul(term, _parse_factor(factor.strip(), ctx))
        result = result + term
    if position != len(text):
        raise DomainError(f'cannot parse {text!r}')
    return result


def _parse_factor(factor, ctx):
    match = _FACTOR.match(factor)
    if not match:
        raise DomainError(f'unknown factor {factor!r}')
    kind, index, power, multi, multi_power, number = match.groups()
    if number is not None:
        return TautExpression.constant(Fraction(number), ctx.n)
    if multi is not None:
        indices = tuple(int(e) for e in multi.split(','))
        base = multi_kappa_expand(MultiKappa(indices), ctx)
        power = multi_power
    else:
        index = int(index)
        if kind == 'p':
            if not 1 <= index <= ctx.n:
                raise DomainError(f'psi index {index} outside 1..{ctx.n}')
            base = TautExpression.psi(ctx.n, index)
        elif index == 0:
            base = TautExpression.constant(ctx.kappa0, ctx.n)
        else:
            base = TautExpression.kappa(ctx.n, index)
    result = TautExpression.constant(1, ctx.n)
    for _ in range(int(power or 1)):
        result = expr_mul(result, base)
    return result
