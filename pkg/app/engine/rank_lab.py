"""
Rank certificates

Exact checks behind the rank table: genus-3 completeness of the generated
relations, the BSZ relations as combinations of them, the genus-4 upper
bound, and the eigenstructure of the rescaled pairing matrix M-hat on
E = {empty} + {points} + {pairs}.

M-hat acts on column vectors indexed by labels(n): (M-hat x)_alpha =
sum_beta M-hat[alpha, beta] x_beta.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import logging
import random

import sympy

from app.engine.exact_core import factorial, format_rational
from app.engine.linalg import ExactMatrix, det, det_gauss, is_zero_vector, proportionality, rank, solve
from app.engine.pixton import (
    RelationParams, genus3_published_relations, genus4_published_relations, generated_relations, pixton_relation,
    relation_matrix,
)
from app.engine.socle import (
    bsz_relation, build_matrices, genus3_socle_displays, genus4_degree3_relations, labels, mhat_entry,
    socle_express_general,
)
from app.engine.taut_ring import (
    MultiKappa, RingContext, TautExpression, TautMonomial, format_terms, monomial_basis, multi_term_text,
    to_multi_basis,
)
from app.engine.verdict import Verdict
from app.utils.errors import ConsistencyError, DomainError

logger = logging.getLogger(__name__)

__all__ = [
    'rank', 'det', 'det_gauss', 'solve', 'EVector', 'SpecialVectors', 'Infeasible', 'mhat_matrix',
    'upper_bound_solve', 'genus3_completeness', 'genus3_published_completeness', 'bsz_in_pixton',
    'stable_plane_check', 'eigenvector_check', 'exceptional_analysis', 'span_rank', 'decompose_in_span',
    'complement_block', 'det_closed_form', 'det_product_form', 'verify_det', 'rank_table', 'socle_rank',
    'plane_block',
]


# -- the coordinate space E ---------------------------------------------------

@lru_cache(maxsize=None)
def _positions(n):
    return {label: i for i, label in enumerate(labels(n))}


class EVector:
    """Vector of E with coordinates alpha, beta_1..beta_n and gamma_{ij}"""

    __slots__ = ('n', 'values')

    def __init__(self, n, values=None):
        size = len(_positions(n))
        self.n = n
        self.values = [Fraction(x) for x in values] if values is not None else [Fraction(0)] * size
        if len(self.values) != size:
            raise DomainError(f'E has dimension {size} for n={n}, got {len(self.values)} coordinates')

    @classmethod
    def from_coordinates(cls, n, alpha=0, beta=None, gamma=None):
        vector = cls(n)
        vector.values[0] = Fraction(alpha)
        for i, x in (beta or {}).items():
            vector.add_beta(i, x)
        for (i, j), x in (gamma or {}).items():
            vector.add_gamma(i, j, x)
        return vector

    def _pair_position(self, i, j):
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise DomainError(f'invalid pair {{{i},{j}}} for n={self.n}')
        i, j = min(i, j), max(i, j)
        # pairs follow the n+1 scalar coordinates in lexicographic order
        return 1 + self.n + (i - 1) * (2 * self.n - i) // 2 + (j - i - 1)

    def add_beta(self, i, x):
        if not 1 <= i <= self.n:
            raise DomainError(f'invalid point {i} for n={self.n}')
        self.values[i] += Fraction(x)

    def add_gamma(self, i, j, x):
        self.values[self._pair_position(i, j)] += Fraction(x)

    @property
    def alpha(self):
        return self.values[0]

    def beta(self, i):
        return self.values[i]

    def gamma(self, i, j):
        return self.values[self._pair_position(i, j)]

    def functionals(self):
        """(alpha, sum of beta, sum of gamma)"""
        return (
            self.values[0],
            sum(self.values[1:self.n + 1], Fraction(0)),
            sum(self.values[self.n + 1:], Fraction(0)),
        )

    def __add__(self, other):
        return EVector(self.n, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        return EVector(self.n, [a - b for a, b in zip(self.values, other.values)])

    def scale(self, factor):
        factor = Fraction(factor)
        return EVector(self.n, [factor * a for a in self.values])

    def is_zero(self):
        return is_zero_vector(self.values)

    def __eq__(self, other):
        return isinstance(other, EVector) and self.n == other.n and self.values == other.values

    def support(self):
        """{label: value} of the nonzero coordinates"""
        return {str(label): format_rational(self.values[i]) for label, i in _positions(self.n).items() if self.values[i]}

    def __repr__(self):
        return f'<EVector n={self.n} {self.support()}>'


class SpecialVectors:
    """Constructors for the named vectors of E on n points"""

    def __init__(self, n):
        self.n = n

    def _distinct(self, *indices):
        if len(set(indices)) != len(indices) or not all(1 <= i <= self.n for i in indices):
            raise DomainError(f'indices {indices} must be distinct points of 1..{self.n}')

    def u(self, i):
        self._distinct(i, i + 1)
        return EVector.from_coordinates(self.n, beta={i: 1, i + 1: -1})

    def v(self, i):
        self._distinct(i, i + 1)
        vector = EVector(self.n)
        for k in range(1, self.n + 1):
            if k not in (i, i + 1):
                vector.add_gamma(i, k, 1)
                vector.add_gamma(i + 1, k, -1)
        return vector

    def w(self, i, j, k, l):
        self._distinct(i, j, k, l)
        return EVector.from_coordinates(self.n, gamma={(i, k): 1, (j, l): 1, (i, l): -1, (j, k): -1})

    def t(self, i, j, k, l):
        self._distinct(i, j, k, l)
        return EVector.from_coordinates(
            self.n,
            beta={j: 2, k: -2},
            gamma={(i, j): -3, (i, k): 3, (j, l): -5, (k, l): 5},
        )

    @property
    def exceptional_m(self):
        """m with n = 8m+2, m >= 1; None otherwise"""
        if self.n >= 10 and self.n % 8 == 2:
            return (self.n - 2) // 8
        return None

    def z(self):
        m = self.exceptional_m
        if m is None:
            raise DomainError(f'z is only defined for n = 8m+2 with m >= 1, got n={self.n}')
        return EVector.from_coordinates(self.n, gamma={(3 * m + 1, self.n): 1, (3 * m + 2, self.n): -1})

    def a(self):
        return EVector.from_coordinates(self.n, alpha=1)

    def b(self):
        return EVector.from_coordinates(self.n, beta={1: 1})

    def c(self):
        return EVector.from_coordinates(self.n, gamma={(1, 2): 1})

    def v_tilde(self, i):
        """v_i + 1/3 sum_{p<i} t_{p,i,i+1,n}; zero on every gamma_{p,*} with p < i"""
        if not 1 <= i <= self.n - 2:
            raise DomainError(f'v_tilde needs 1 <= i <= n-2, got i={i}, n={self.n}')
        vector = self.v(i)
        for p in range(1, i):
            vector = vector + self.t(p, i, i + 1, self.n).scale(Fraction(1, 3))
        return vector


@lru_cache(maxsize=64)
def mhat_matrix(n):
    """M-hat from its integer table"""
    index = labels(n)
    return ExactMatrix([[mhat_entry(a, b, n) for b in index] for a in index], len(index))


def apply_mhat(vector, shift=0):
    """(M-hat + shift) vector"""
    image = mhat_matrix(vector.n).apply(vector.values)
    if shift:
        image = [x + shift * y for x, y in zip(image, vector.values)]
    return EVector(vector.n, image)


def _compare_vectors(check, params, expected, actual, **details):
    names = [str(label) for label in labels(expected.n)]
    return Verdict.compare(check, params, expected.values, actual.values, labels=names, **details)


# -- linear algebra facts -------------------------------------------------------

def det_closed_form(n):
    """(-1)^{n(n-1)/2} 2^{n^2+n+1} (2n+15) (n+6)!/6!"""
    if n < 1:
        raise DomainError(f'det_closed_form needs n >= 1, got {n}')
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return Fraction(sign * 2 ** (n * n + n + 1) * (2 * n + 15) * factorial(n + 6), factorial(6))


def det_product_form(n):
    """prod_{i<n} (-16(n-i+6)) * (-4)^{n(n-3)/2} * (-32)(n+6)(2n+15)"""
    if n < 1:
        raise DomainError(f'det_product_form needs n >= 1, got {n}')
    value = Fraction(1)
    for i in range(1, n):
        value *= -16 * (n - i + 6)
    value *= Fraction(-4) ** (n * (n - 3) // 2)
    return value * (-32) * (n + 6) * (2 * n + 15)


def verify_det(n):
    expected = det_closed_form(n)
    actual = det(mhat_matrix(n))
    params = {'n': n}
    if actual != expected:
        return Verdict.mismatch('det', params, 'det', expected, actual)
    return Verdict('det', params, True, {'det': actual, 'product_form': det_product_form(n) == expected})


def _plane_coordinates(vector, i):
    """(u_i, v_i) coordinates of a vector assumed to lie in span(u_i, v_i)"""
    k = next(p for p in range(1, vector.n + 1) if p not in (i, i + 1))
    return vector.beta(i), vector.gamma(i, k)


def plane_block(n, i):
    """
    Restriction of M-hat to span(u_i, v_i) in the basis (u_i, v_i), read off
    the images M-hat u_i and M-hat v_i, and its characteristic polynomial
    coefficients (leading first).  Needs n >= 3 so that v_i is nonzero.
    """
    if n < 3 or not 1 <= i <= n - 1:
        raise DomainError(f'plane_block needs n >= 3 and 1 <= i <= n-1, got i={i}, n={n}')
    vectors = SpecialVectors(n)
    u_image = _plane_coordinates(apply_mhat(vectors.u(i)), i)
    v_image = _plane_coordinates(apply_mhat(vectors.v(i)), i)
    block = ExactMatrix([[u_image[0], v_image[0]], [u_image[1], v_image[1]]], 2)
    lam = sympy.Symbol('lambda')
    charpoly = sympy.Matrix(block.to_lists()).charpoly(lam)
    return block, [Fraction(str(c)) for c in charpoly.all_coeffs()]


def stable_plane_check(n, i):
    """M-hat u_i = 28 u_i + 10 v_i, M-hat v_i = (32i-24-4n) u_i + (12i-12-2n) v_i"""
    if n < 2 or not 1 <= i <= n - 1:
        raise DomainError(f'stable_plane_check needs n >= 2 and 1 <= i <= n-1, got n={n}, i={i}')
    vectors = SpecialVectors(n)
    u, v = vectors.u(i), vectors.v(i)
    params = {'n': n, 'i': i}
    expected_u = u.scale(28) + v.scale(10)
    verdict = _compare_vectors('plane', params, expected_u, apply_mhat(u), image='M-hat u')
    if not verdict:
        return verdict
    expected_v = u.scale(32 * i - 24 - 4 * n) + v.scale(12 * i - 12 - 2 * n)
    verdict = _compare_vectors('plane', params, expected_v, apply_mhat(v), image='M-hat v')
    if not verdict:
        return verdict
    if v.is_zero():
        return Verdict('plane', params, True, {'block_det': None, 'v_is_zero': True})
    block, _ = plane_block(n, i)
    block_det = det(block)
    if block_det != -16 * (n - i + 6):
        return Verdict.mismatch('plane', params, 'block det', -16 * (n - i + 6), block_det)
    return Verdict('plane', params, True, {'block_det': block_det, 'v_is_zero': v.is_zero()})


def eigenvector_check(n, indices):
    """w_{ijkl} and t_{ijkl} are eigenvectors of M-hat for the eigenvalue -4"""
    i, j, k, l = indices
    if n < 4 or not 1 <= i < j < k < l <= n:
        raise DomainError(f'eigenvector_check needs n >= 4 and 1 <= i<j<k<l <= n, got {indices} for n={n}')
    vectors = SpecialVectors(n)
    params = {'n': n, 'ijkl': f'{i},{j},{k},{l}'}
    for name, vector in (('w', vectors.w(i, j, k, l)), ('t', vectors.t(i, j, k, l))):
        verdict = _compare_vectors('eigen', params, vector.scale(-4), apply_mhat(vector), vector=name)
        if not verdict:
            return verdict
    return Verdict('eigen', params, True)


@dataclass
class ExceptionalResult:
    n: int
    m: int
    U: EVector
    delta: Fraction
    published_delta: Fraction
    verdict: Verdict


def exceptional_analysis(n):
    """
    For n = 8m+2: U = 2m u_i - v_i (i = 3m+1) satisfies M-hat U = -4U, and
    Z = z + delta u_i is annihilated by (M-hat+4)^2 but not by M-hat+4.
    """
    vectors = SpecialVectors(n)
    m = vectors.exceptional_m
    if m is None:
        raise DomainError(f'exceptional_analysis needs n = 8m+2 with m >= 1, got n={n}')
    i = 3 * m + 1
    params = {'n': n, 'm': m}
    u, v, z = vectors.u(i), vectors.v(i), vectors.z()
    published = Fraction(m, 5 * m + 7)

    def result(verdict, U, delta=None):
        return ExceptionalResult(n, m, U, delta, published, verdict)

    block, charpoly = plane_block(n, i)
    expected_poly = [Fraction(1), Fraction(-20 * m - 24), Fraction(-80 * m - 112)]
    if charpoly != expected_poly:
        return result(Verdict.mismatch('exceptional', params, 'charpoly', expected_poly, charpoly), None)

    image_z = apply_mhat(z, shift=4)
    verdict = _compare_vectors('exceptional', params, u.scale(-4) + v.scale(-2), image_z, image='(M-hat+4) z')
    if not verdict:
        return result(verdict, None)

    U = u.scale(2 * m) - v
    verdict = _compare_vectors('exceptional', params, U.scale(-4), apply_mhat(U), image='M-hat U')
    if not verdict:
        return result(verdict, U)

    z2 = apply_mhat(apply_mhat(z, shift=4), shift=4)
    u2 = apply_mhat(apply_mhat(u, shift=4), shift=4)
    position = next((p for p, x in enumerate(u2.values) if x), None)
    if position is None:
        return result(Verdict.mismatch('exceptional', params, '(M-hat+4)^2 u', 'nonzero', 0), U)
    delta = -z2.values[position] / u2.values[position]
    Z = z + u.scale(delta)
    square = apply_mhat(apply_mhat(Z, shift=4), shift=4)
    if not square.is_zero():
        return result(Verdict.mismatch('exceptional', params, '(M-hat+4)^2 Z', 0, square.support()), U, delta)
    first = apply_mhat(Z, shift=4)
    if first.is_zero():
        return result(Verdict.mismatch('exceptional', params, '(M-hat+4) Z', 'nonzero', 0), U, delta)
    ratio = proportionality(first.values, U.values)
    if ratio is None:
        return result(Verdict.mismatch('exceptional', params, '(M-hat+4) Z', 'multiple of U', first.support()), U, delta)
    if delta != published:
        logger.warning(f'n={n}: computed delta {delta} differs from the published {published}')
    details = {'delta': delta, 'published_delta': published, 'ratio_to_U': ratio, 'block': block.to_lists()}
    return result(Verdict('exceptional', params, True, details), U, delta)


# -- span of the eigenvector families ------------------------------------------

def span_generators(n, include_z=True):
    """The constructive generating family as [(name, EVector)]"""
    vectors = SpecialVectors(n)
    out = []
    for i in range(1, n):
        out.append((f'u_{i}', vectors.u(i)))
    for i in range(1, n):
        out.append((f'v_{i}', vectors.v(i)))
    for i in range(1, n - 1):
        out.append((f'v~_{i}', vectors.v_tilde(i)))
    for i in range(1, n - 2):
        out.append((f't_{i},{i + 1},{i + 2},{i + 3}', vectors.t(i, i + 1, i + 2, i + 3)))
    for i in range(1, n - 2):
        for k in range(i + 2, n + 1):
            for l in range(k + 1, n + 1):
                out.append((f'w_{i},{i + 1},{k},{l}', vectors.w(i, i + 1, k, l)))
    if include_z and vectors.exceptional_m is not None:
        out.append(('z', vectors.z()))
    return out


def span_rank(n, include_z=True):
    """Rank of the generating family; N-3 whenever n >= 2"""
    if n < 2:
        raise DomainError(f'span_rank needs n >= 2, got {n}')
    generators = span_generators(n, include_z)
    return rank(ExactMatrix([vector.values for _, vector in generators], len(_positions(n))))


class Infeasible:
    """The vector violates one of alpha = 0, sum beta = 0, sum gamma = 0"""

    def __init__(self, functionals):
        self.functionals = functionals

    def __bool__(self):
        return False

    def __repr__(self):
        return f'<Infeasible functionals={tuple(map(str, self.functionals))}>'


def decompose_in_span(s, n=None):
    """
    Explicit decomposition of s over the generating family, or Infeasible.

    Sweep: v_{n-1} makes the column sum of gamma_{*,n} vanish; row i <= n-3
    is cleared by t_{i,i+1,i+2,i+3} (gamma_{i,i+1}), then v~_i or z (row sum),
    then w_{i,i+1,k,n} (the rest); v~_{n-2} clears the last three pairs and
    the u_i take care of beta.
    """
    n = s.n if n is None else n
    functionals = s.functionals()
    if any(functionals):
        return Infeasible(functionals)
    vectors = SpecialVectors(n)
    residual = EVector(n, s.values)
    coefficients = {}

    def use(name, vector, coefficient):
        nonlocal residual
        if coefficient:
            coefficients[name] = coefficients.get(name, Fraction(0)) + coefficient
            residual = residual - vector.scale(coefficient)

    if n >= 3:
        column = sum((residual.gamma(k, n) for k in range(1, n)), Fraction(0))
        use(f'v_{n - 1}', vectors.v(n - 1), -column / (n - 2))
        for i in range(1, n - 2):
            use(f't_{i},{i + 1},{i + 2},{i + 3}', vectors.t(i, i + 1, i + 2, i + 3),
                residual.gamma(i, i + 1) / -3)
            row = sum((residual.gamma(i, j) for j in range(i + 1, n + 1)), Fraction(0))
            if 3 * n + 2 - 8 * i:
                use(f'v~_{i}', vectors.v_tilde(i), row / Fraction(3 * n + 2 - 8 * i, 3))
            else:
                use('z', vectors.z(), row)
            for k in range(i + 2, n):
                use(f'w_{i},{i + 1},{k},{n}', vectors.w(i, i + 1, k, n), residual.gamma(i, k))
        use(f'v~_{n - 2}', vectors.v_tilde(n - 2), residual.gamma(n - 2, n) / Fraction(18 - 5 * n, 3))
    # u_i moves beta_i onto beta_{i+1}, so the residual carries the running sum
    for i in range(1, n):
        use(f'u_{i}', vectors.u(i), residual.beta(i))
    if not residual.is_zero():
        raise ConsistencyError(f'decomposition left a residual {residual.support()} for n={n}')
    return coefficients


def recompose(coefficients, n):
    """Sum of coefficient * generator for a decomposition"""
    generators = dict(span_generators(n))
    total = EVector(n)
    for name, c in coefficients.items():
        total = total + generators[name].scale(c)
    return total


def random_subspace_vector(n, rng=None, bound=9):
    """Pseudo-random integer vector with alpha = 0, sum beta = 0, sum gamma = 0"""
    rng = rng or random.Random(0)
    size = len(_positions(n))
    values = [Fraction(rng.randint(-bound, bound)) for _ in range(size)]
    values[0] = Fraction(0)
    values[n] -= sum(values[1:n + 1], Fraction(0))
    if size > n + 1:
        values[-1] -= sum(values[n + 1:], Fraction(0))
    return EVector(n, values)


def span_check(n, samples=100, seed=0):
    params = {'n': n}
    if n < 2:
        raise DomainError(f'span_check needs n >= 2, got {n}')
    size = len(_positions(n))
    expected = size - 3
    for name, vector in span_generators(n):
        if any(vector.functionals()):
            return Verdict.mismatch('span', params, name, (0, 0, 0), vector.functionals())
    actual = span_rank(n)
    if actual != expected:
        return Verdict.mismatch('span', params, 'rank', expected, actual)
    details = {'rank': actual}
    if SpecialVectors(n).exceptional_m is not None:
        without_z = span_rank(n, include_z=False)
        details['rank_without_z'] = without_z
        if without_z != expected - 1:
            return Verdict.mismatch('span', params, 'rank without z', expected - 1, without_z)
    rng = random.Random(seed + n)
    for sample in range(samples):
        s = random_subspace_vector(n, rng)
        coefficients = decompose_in_span(s, n)
        if recompose(coefficients, n) != s:
            return Verdict.mismatch('span', params, f'sample {sample}', 'exact recomposition', 'residual')
    details['samples'] = samples
    return Verdict('span', params, True, details)


def complement_block(n):
    """
    Functionals (alpha, sum beta, sum gamma) of M-hat a, M-hat b, M-hat c as
    the columns of a 3x3 matrix.
    """
    if n < 2:
        raise DomainError(f'complement_block needs n >= 2, got {n}')
    vectors = SpecialVectors(n)
    images = [apply_mhat(x).functionals() for x in (vectors.a(), vectors.b(), vectors.c())]
    return ExactMatrix.from_columns(images, 3)


def complement_expected(n):
    return ExactMatrix([
        [5 * (n + 6), 5 * n + 34, 5 * (n + 6)],
        [7 * n, 7 * n + 28, 7 * n + 24],
        [Fraction(5 * n * (n - 1), 2), Fraction(5 * (n - 1) * (n + 4), 2), Fraction(5 * n * n + 11 * n - 24, 2)],
    ], 3)


def complement_check(n):
    params = {'n': n}
    block = complement_block(n)
    expected = complement_expected(n)
    for r in range(3):
        for c in range(3):
            if block[r, c] != expected[r, c]:
                return Verdict.mismatch('complement', params, (r, c), expected[r, c], block[r, c])
    block_det = det(block)
    expected_det = -32 * (n + 6) * (2 * n + 15)
    if block_det != expected_det:
        return Verdict.mismatch('complement', params, 'det', expected_det, block_det)
    return Verdict('complement', params, True, {'det': block_det})


# -- relations ------------------------------------------------------------------

def genus3_completeness(n):
    """Rank of the generated degree-2 relations; ok iff it is dim - n"""
    ctx = RingContext(3, n)
    basis = monomial_basis(ctx, 2)
    relations_rank = rank(relation_matrix(ctx, 2, basis))
    params = {'n': n}
    expected = len(basis) - n
    if relations_rank != expected:
        return relations_rank, Verdict.mismatch('genus3', params, 'rank', expected, relations_rank, dim=len(basis))
    return relations_rank, Verdict('genus3', params, True, {'dim': len(basis), 'rank': relations_rank})


def _rows(expressions, basis):
    return ExactMatrix([e.vector(basis) for e in expressions], len(basis))


def genus3_published_completeness(n):
    """
    The published genus-3 families span the same space as the generated
    relations.  Returns (rank of the published set, Verdict).
    """
    ctx = RingContext(3, n)
    basis = monomial_basis(ctx, 2)
    published = list(genus3_published_relations(n).values())
    generated = [relation for _, relation in generated_relations(ctx, 2)]
    published_rank = rank(_rows(published, basis))
    generated_rank = rank(_rows(generated, basis))
    joint_rank = rank(_rows(published + generated, basis))
    params = {'n': n}
    details = {'published_rank': published_rank, 'generated_rank': generated_rank, 'joint_rank': joint_rank}
    if not published_rank == generated_rank == joint_rank:
        return published_rank, Verdict.mismatch('genus3-span', params, 'joint rank', generated_rank, joint_rank, **details)
    return published_rank, Verdict('genus3-span', params, True, details)


@dataclass
class BSZRepresentation:
    name: str
    coefficients: dict
    display_scalar: Fraction = None
    display_holds: bool = False


def _bsz_displays(n, published):
    """The published combinations, keyed like the BSZ relations"""
    points = range(1, n + 1)

    def rel(key):
        return published[key]

    def pair(i, j):
        return f'(5)_{{{min(i, j)},{max(i, j)}}}'

    def total(keys, factor=1):
        out = TautExpression.zero(n)
        for key in keys:
            out = out + rel(key)
        return out.scale(factor)

    displays = {}
    for k in points:
        for l in points:
            if k < l:
                displays[f'(a)_{{{k},{l}}}'] = (
                    rel('(1)') + rel(f'(2)_{k}').scale(Fraction(3, 2)) + rel(f'(2)_{l}').scale(Fraction(3, 2))
                    - rel(pair(k, l)).scale(4)
                )
    if n >= 2:
        for l in points:
            others = [i for i in points if i != l]
            displays[f'(b)_{l}'] = (
                rel('(1)').scale(Fraction(-(2 * n + 1), 3)) - rel(f'(2)_{l}').scale(n - 2)
                - total(f'(2)_{i}' for i in others) + total((pair(l, i) for i in others), Fraction(8, 3))
            )
    all_twos = [f'(2)_{i}' for i in points]
    displays['(c)'] = (
        rel('(1)').scale(Fraction(7, 4)) - rel('(3)').scale(Fraction(3, 16)) + total(all_twos, Fraction(3, 16))
    )
    displays['(d)'] = (
        rel('(1)').scale(Fraction(-(2 * n * n + 4 * n + 33), 3)) - total(all_twos, Fraction(8 * n - 9, 4))
        + rel('(3)').scale(Fraction(7, 4))
        + total((pair(i, j) for i in points for j in points if i < j), Fraction(16, 3))
    )
    return displays


def bsz_targets(n):
    """{name: BSZ relation} for (a)_{k,l}, (b)_l, (c), (d)"""
    targets = {}
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            targets[f'(a)_{{{k},{l}}}'] = bsz_relation('a', n, (k, l))
    for l in range(1, n + 1):
        targets[f'(b)_{l}'] = bsz_relation('b', n, (l,))
    targets['(c)'] = bsz_relation('c', n)
    targets['(d)'] = bsz_relation('d', n)
    return targets


def bsz_in_pixton(n):
    """
    Each BSZ relation as an exact combination of the published genus-3
    families, plus the scalar by which the published combination equals it.

    Returns {name: BSZRepresentation or None}; None means no representation.
    """
    if n < 2:
        raise DomainError(f'bsz_in_pixton needs n >= 2, got {n}')
    ctx = RingContext(3, n)
    basis = monomial_basis(ctx, 2)
    published = genus3_published_relations(n)
    keys = list(published)
    matrix = ExactMatrix.from_columns([published[key].vector(basis) for key in keys], len(basis))
    displays = _bsz_displays(n, published)
    out = {}
    for name, target in bsz_targets(n).items():
        target_vector = target.vector(basis)
        solution = solve(matrix, target_vector)
        if solution is None:
            out[name] = None
            continue
        representation = BSZRepresentation(name, {key: c for key, c in zip(keys, solution) if c})
        if name in displays:
            scalar = proportionality(displays[name].vector(basis), target_vector)
            representation.display_scalar = scalar
            representation.display_holds = scalar is not None and scalar != 0
        out[name] = representation
    return out


def bsz_verdicts(n):
    out = []
    for name, representation in bsz_in_pixton(n).items():
        params = {'n': n, 'relation': name}
        if representation is None:
            out.append(Verdict.mismatch('bsz', params, 'solve', 'representation', 'no solution'))
        elif not representation.display_holds:
            out.append(Verdict.mismatch('bsz', params, 'display', 'nonzero multiple', representation.display_scalar))
        else:
            out.append(Verdict('bsz', params, True, {'display_scalar': representation.display_scalar,
                                                     'terms': len(representation.coefficients)}))
    return out


@dataclass
class UpperBoundResult:
    n: int
    determinant: Fraction
    unknowns: list
    rows: list
    expressions: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)
    unknown_keys: list = field(default_factory=list)

    @property
    def singular(self):
        return self.determinant == 0

    def expression_text(self, unknown):
        terms = sorted(self.expressions[unknown].items(), key=lambda item: multi_term_text(item[0]))
        return format_terms((c, multi_term_text(key)) for key, c in terms)

    def substituted(self, position):
        """Relation `position` with every unknown replaced by its expression"""
        relation = self.relations[position]
        out = {key: c for key, c in relation.items() if key not in self.unknown_keys}
        for unknown in self.unknown_keys:
            factor = relation.get(unknown, Fraction(0))
            if not factor:
                continue
            for key, c in self.expressions[multi_term_text(unknown)].items():
                out[key] = out.get(key, Fraction(0)) + factor * c
        return {key: c for key, c in out.items() if c}

    def sigma_row_kappa2(self):
        """
        kappa_{(2)} coefficient of the sigma={1} row, scaled so that its
        psi_1^2 coefficient is -77*kappa_0 as in the published display.
        """
        kappa0 = self.n + 6
        psi_key = ((2,) + (0,) * (self.n - 1), None)
        relation = self.relations[0]
        return relation.get(self.unknown_keys[0], Fraction(0)) * (-77 * kappa0) / relation[psi_key]


def upper_bound_params(n):
    """sigma={1} first, then a_k=1 for k = 1..n"""
    params = [RelationParams(4, n, 2, (1,))]
    for k in range(n):
        a = [0] * n
        a[k] = 1
        params.append(RelationParams(4, n, 2, (), a))
    return params


def upper_bound_solve(n):
    """
    Solve the genus-4 degree-2 relations for kappa_2 and kappa_1 psi_i.

    Coordinates are taken in the multi-index presentation (kappa_{(2)},
    kappa_{(1,1)}, ...).  Returns an UpperBoundResult whose expressions map
    each unknown to {(psi exponents, MultiKappa or None): coefficient} over
    the remaining classes; result.singular reports failure.
    """
    if n < 1:
        raise DomainError(f'upper_bound_solve needs n >= 1, got {n}')
    relations = [to_multi_basis(pixton_relation(p)) for p in upper_bound_params(n)]
    zero_psi = (0,) * n
    unknowns = [(zero_psi, MultiKappa((2,)))]
    for k in range(n):
        psi = [0] * n
        psi[k] = 1
        unknowns.append((tuple(psi), MultiKappa((1,))))
    unknown_set = set(unknowns)
    rest = sorted({key for rel in relations for key in rel if key not in unknown_set}, key=multi_term_text)
    a_matrix = ExactMatrix([[rel.get(key, Fraction(0)) for key in unknowns] for rel in relations], len(unknowns))
    b_matrix = [[rel.get(key, Fraction(0)) for key in rest] for rel in relations]
    result = UpperBoundResult(n, det(a_matrix), [multi_term_text(k) for k in unknowns], a_matrix.to_lists(),
                              relations=relations, unknown_keys=unknowns)
    if result.singular:
        logger.warning(f'upper-bound system is singular for n={n}')
        return result
    # A x + B y = 0  =>  x = -A^{-1} B y, one column of B at a time
    columns = {}
    for j, key in enumerate(rest):
        solution = solve(a_matrix, [-row[j] for row in b_matrix])
        columns[key] = solution
    for position, unknown in enumerate(unknowns):
        result.expressions[multi_term_text(unknown)] = {
            key: columns[key][position] for key in rest if columns[key][position]
        }
    return result


def upper_bound_check(n):
    result = upper_bound_solve(n)
    params = {'n': n}
    if result.singular:
        return Verdict.mismatch('upper-bound', params, 'det', 'nonzero', 0)
    for position, relation_params in enumerate(upper_bound_params(n)):
        rest = result.substituted(position)
        if rest:
            return Verdict.mismatch('upper-bound', params, relation_params.describe(), 0,
                                    {multi_term_text(k): c for k, c in rest.items()})
    details = {
        'det': result.determinant,
        'kappa_2_row': result.sigma_row_kappa2(),
        'kappa_2_published_matrix': 1092 + 77 * n,
        'kappa_2_published_display': 630 - 77 * (n + 6),
    }
    return Verdict('upper-bound', params, True, details)


# -- ranks ----------------------------------------------------------------------

def socle_rank(g, n):
    """Rank of the socle map on monomial_basis(g, n, g-1)"""
    ctx = RingContext(g, n)
    basis = monomial_basis(ctx, g - 1)
    images = [socle_express_general(TautExpression.monomial(mono), ctx).coefficients for mono in basis]
    return rank(ExactMatrix(images, n))


def rank_table(g, n):
    """
    (r_g^0(n), ..., r_g^{g-1}(n)).

    Every entry is certified by an exact computation: socle ranks in the top
    degree, generated relations in genus 3, the upper bound and the
    determinant of M-hat for R^2 in genus 4.
    """
    if not 1 <= g <= 4:
        raise DomainError(f'rank_table covers 1 <= g <= 4, got g={g}')
    if n < 1:
        raise DomainError(f'rank_table needs n >= 1, got n={n}')
    ctx = RingContext(g, n)
    ranks = [1]
    if g == 1:
        return ranks
    if g >= 3:
        # no relations in degree 1
        ranks.append(len(monomial_basis(ctx, 1)))
    if g == 3:
        relations_rank, verdict = genus3_completeness(n)
        verdict.raise_for_status()
        ranks.append(len(monomial_basis(ctx, 2)) - relations_rank)
        return ranks
    if g == 4:
        if upper_bound_solve(n).singular:
            raise ConsistencyError(f'upper-bound system is singular for n={n}')
        if det(mhat_matrix(n)) == 0:
            raise ConsistencyError(f'M-hat is singular for n={n}')
        ranks.append(len(labels(n)))
    ranks.append(socle_rank(g, n))
    return ranks


def matrix_consistency(n):
    """M and M-hat are proportional under the diagonal scalings"""
    params = {'n': n}
    try:
        m, mhat = build_matrices(n)
    except ConsistencyError as e:
        return Verdict.mismatch('consistency', params, 'proportionality', 'proportional', str(e))
    details = {'scale': mhat.scale, 'rank_equal': None}
    if n <= 8:
        details['rank_equal'] = rank(m.entries) == rank(mhat.entries)
        if not details['rank_equal']:
            return Verdict.mismatch('consistency', params, 'rank', rank(mhat.entries), rank(m.entries))
    return Verdict('consistency', params, True, details)


# -- fixtures and top-degree displays ------------------------------------------

def _proportional_relation(expected, actual, basis):
    return proportionality(actual.vector(basis), expected.vector(basis))


def fixture_check(n):
    """
    Generated relations against the published displays: kappa_1 - sum psi_i
    in genus 2 and the two genus-4 degree-2 families, termwise up to scalar.
    """
    params = {'n': n}
    verdicts = []
    ctx = RingContext(2, n)
    basis = monomial_basis(ctx, 1)
    expected = TautExpression.kappa(n, 1)
    for i in range(1, n + 1):
        expected = expected - TautExpression.psi(n, i)
    relations = [relation for _, relation in generated_relations(ctx, 1)]
    scalars = [_proportional_relation(expected, relation, basis) for relation in relations]
    if not relations or any(s is None or s == 0 for s in scalars):
        verdicts.append(Verdict.mismatch('fixtures', params, 'genus 2', 'multiple of kappa_1 - sum psi', scalars))
    else:
        verdicts.append(Verdict('fixtures', dict(params, family='genus 2'), True, {'scalars': scalars}))

    ctx = RingContext(4, n)
    basis = monomial_basis(ctx, 2)
    published = genus4_published_relations(n)
    targets = {'sigma={1}': RelationParams(4, n, 2, (1,))}
    for k in range(1, n + 1):
        a = [0] * n
        a[k - 1] = 1
        targets[f'a_{k}=1'] = RelationParams(4, n, 2, (), a)
    for name, relation_params in targets.items():
        family_params = dict(params, family=name)
        relation = pixton_relation(relation_params)
        if name == 'sigma={1}':
            verdicts.append(_sigma_one_fixture(family_params, published[name], relation, basis))
            continue
        scalar = _proportional_relation(published[name], relation, basis)
        if scalar is None or scalar == 0:
            verdicts.append(Verdict.mismatch('fixtures', family_params, name, 'nonzero multiple', scalar))
        else:
            verdicts.append(Verdict('fixtures', family_params, True, {'scalar': scalar}))
    return verdicts


def relation_socle_images(relation, ctx):
    """Socle images of relation * psi_k for every k and of relation * kappa_1"""
    n = ctx.n
    factors = [(f'psi_{k}', TautExpression.psi(n, k)) for k in range(1, n + 1)]
    factors.append(('kappa_1', TautExpression.kappa(n, 1)))
    return {name: socle_express_general(relation * factor, ctx) for name, factor in factors}


def _sigma_one_fixture(params, published, generated, basis):
    """
    The published sigma={1} display carries 630-77*kappa_0 on kappa_{(2)}
    where the generated relation has 77*kappa_0+168.  Every other coordinate
    agrees up to scalar; the generated relation is certified by its products
    with psi_k and kappa_1 vanishing in the socle.
    """
    n = params['n']
    kappa2 = TautMonomial((0,) * n, (2,))
    others = [mono for mono in basis if mono != kappa2]
    scalar = proportionality([generated.coefficient(m) for m in others], [published.coefficient(m) for m in others])
    if scalar is None or scalar == 0:
        return Verdict.mismatch('fixtures', params, 'sigma={1}', 'nonzero multiple off kappa_2', scalar)
    ctx = RingContext(4, n)
    for name, image in relation_socle_images(generated, ctx).items():
        if not image.is_zero():
            return Verdict.mismatch('fixtures', params, f'relation*{name}', 0, image.to_list())
    key = ((0,) * n, MultiKappa((2,)))
    details = {
        'scalar': scalar,
        'kappa_2_published': to_multi_basis(published).get(key, Fraction(0)),
        'kappa_2_generated': to_multi_basis(generated).get(key, Fraction(0)) / scalar,
    }
    if details['kappa_2_published'] != details['kappa_2_generated']:
        logger.debug(f"n={n}: sigma={{1}} kappa_2 coefficient {details['kappa_2_generated']}, "
                     f"published {details['kappa_2_published']}")
    return Verdict('fixtures', params, True, details)


def socle_check(n):
    """
    The genus-3 and genus-4 top-degree displays, and the vanishing of every
    generated relation of degree g-1 in genus 2, 3 and 4 in the socle.
    """
    verdicts = []
    for genus, displays in ((3, genus3_socle_displays(n)), (4, genus4_degree3_relations(n))):
        ctx = RingContext(genus, n)
        for name, expr, expected in displays:
            actual = socle_express_general(expr, ctx)
            verdicts.append(Verdict.compare(
                'socle', {'n': n, 'g': genus, 'class': name}, expected.coefficients, actual.coefficients,
                labels=[f'psi_{i}^{genus - 1}' for i in range(1, n + 1)],
            ))
    for genus in (2, 3, 4):
        ctx = RingContext(genus, n)
        for relation_params, relation in generated_relations(ctx, genus - 1):
            image = socle_express_general(relation, ctx)
            verdicts.append(Verdict.compare(
                'socle', {'n': n, 'g': genus, 'relation': relation_params.describe()},
                [Fraction(0)] * n, image.coefficients,
            ))
    return verdicts


# -- suites ---------------------------------------------------------------------

def _eigen_suite(n):
    return [eigenvector_check(n, (i, j, k, l))
            for i in range(1, n + 1) for j in range(i + 1, n + 1)
            for k in range(j + 1, n + 1) for l in range(k + 1, n + 1)]


def _genus3_suite(n):
    _, completeness = genus3_completeness(n)
    _, published = genus3_published_completeness(n)
    return [completeness, published]


@dataclass(frozen=True)
class Suite:
    name: str
    check: object
    min_n: int = 1
    applies: object = None

    def covers(self, n):
        if n < self.min_n:
            return False
        return self.applies is None or self.applies(n)

    def run(self, n, **options):
        result = self.check(n, **options)
        return result if isinstance(result, list) else [result]


SUITES = {suite.name: suite for suite in (
    Suite('det', verify_det),
    Suite('plane', lambda n: [stable_plane_check(n, i) for i in range(1, n)], min_n=2),
    Suite('eigen', _eigen_suite, min_n=4),
    Suite('exceptional', lambda n: exceptional_analysis(n).verdict, min_n=10,
          applies=lambda n: SpecialVectors(n).exceptional_m is not None),
    Suite('span', span_check, min_n=2),
    Suite('complement', complement_check, min_n=2),
    Suite('upper-bound', upper_bound_check),
    Suite('genus3', _genus3_suite),
    Suite('bsz', bsz_verdicts, min_n=2),
    Suite('socle', socle_check),
    Suite('fixtures', fixture_check),
    Suite('consistency', matrix_consistency),
)}


def run_suite(name, n, **options):
    """
    Verdicts of one suite at one n; empty when the suite does not cover n.

    options go to the check itself (samples and seed for span).
    """
    try:
        suite = SUITES[name]
    except KeyError:
        raise DomainError(f'unknown suite {name!r}; choose from {", ".join(sorted(SUITES))}')
    if not suite.covers(n):
        logger.debug(f'suite {name} does not cover n={n}')
        return []
    verdicts = suite.run(n, **options)
    logger.debug(f'suite {name} n={n}: {sum(1 for v in verdicts if v)}/{len(verdicts)} ok')
    return verdicts
