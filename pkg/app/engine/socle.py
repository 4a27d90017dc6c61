"""
Top-degree evaluation

R^{g-1}(M_{g,n}) is spanned by psi_1^{g-1}, ..., psi_n^{g-1}.  Monomials are
evaluated there with closed formulas; R^{g-2}(M_g) is spanned by kappa_{g-2}.
The genus-4 pairing matrices M and M-hat are assembled from the pushforward
coefficient and the Hodge constant.
"""
import csv
from dataclasses import dataclass
from fractions import Fraction
import io
import json
import logging

from app.engine.exact_core import bernoulli, double_factorial, factorial, format_rational
from app.engine.linalg import ExactMatrix
from app.engine.taut_ring import (
    MultiKappa, RingContext, TautExpression, TautMonomial, expr_mul, multi_kappa_expand,
    to_multi_basis,
)
from app.utils.errors import ConsistencyError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SocleVector:
    """Coefficients on psi_1^{g-1}, ..., psi_n^{g-1}"""
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(Fraction(c) for c in self.coefficients))

    @classmethod
    def zero(cls, n):
        return cls((0,) * n)

    @property
    def n(self):
        return len(self.coefficients)

    def __getitem__(self, i):
        """1-based point index"""
        return self.coefficients[i - 1]

    def __add__(self, other):
        return SocleVector(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def scale(self, factor):
        return SocleVector(tuple(Fraction(factor) * c for c in self.coefficients))

    def is_zero(self):
        return not any(self.coefficients)

    def to_list(self):
        return [format_rational(c) for c in self.coefficients]


def _points(d, n):
    """Accept psi exponents as a dict {point: exponent} or a sequence of length n"""
    if isinstance(d, dict):
        exps = [0] * n
        for point, e in d.items():
            if not 1 <= point <= n:
                raise DomainError(f'point {point} outside 1..{n}')
            exps[point - 1] = int(e)
        return exps
    exps = [int(e) for e in d]
    if len(exps) != n:
        raise DomainError(f'{len(exps)} psi exponents for {n} points')
    return exps


def _check_kappa(k_list):
    k_list = tuple(int(k) for k in k_list)
    if any(k <= 0 for k in k_list):
        raise DomainError(f'kappa indices must be positive, got {k_list}')
    return k_list


def top_no_points(g, k_list):
    """
    c with kappa_{k_1..k_m} = c * kappa_{g-2} in R^{g-2}(M_g).

    c = (2g-3+m)! (2g-1)!! / ((2g-1)! prod (2k_i+1)!!)
    """
    k_list = _check_kappa(k_list)
    if g < 2:
        raise DomainError(f'top_no_points needs g >= 2, got {g}')
    if sum(k_list) != g - 2:
        raise DomainError(f'kappa indices {k_list} do not sum to g-2={g - 2}')
    m = len(k_list)
    denominator = factorial(2 * g - 1)
    for k in k_list:
        denominator *= double_factorial(2 * k + 1)
    return Fraction(factorial(2 * g - 3 + m) * double_factorial(2 * g - 1), denominator)


def socle_express(g, n, d, k_list=()):
    """
    prod psi_i^{d_i} kappa_{k_1..k_m} on the psi^{g-1} basis.

    Coefficient of psi_i^{g-1}:
        (2g-1)!!/(prod (2d_j+1)!! prod (2k_j+1)!!) * (2g-3+n+m)!/(2g-2+n)!
        * ((2g-2+n) d_i + sum k_j) / (g-1)
    """
    if g < 2:
        raise DomainError(f'socle_express needs g >= 2, got {g}')
    if n < 1:
        raise DomainError('socle_express needs at least one marked point')
    exps = _points(d, n)
    k_list = _check_kappa(k_list)
    if any(e < 0 for e in exps):
        raise DomainError(f'negative psi exponent in {exps}')
    if sum(exps) + sum(k_list) != g - 1:
        raise DomainError(f'degree {sum(exps) + sum(k_list)} is not g-1={g - 1}')
    m = len(k_list)
    denominator = 1
    for e in exps:
        denominator *= double_factorial(2 * e + 1)
    for k in k_list:
        denominator *= double_factorial(2 * k + 1)
    prefactor = Fraction(double_factorial(2 * g - 1), denominator)
    prefactor *= Fraction(factorial(2 * g - 3 + n + m), factorial(2 * g - 2 + n))
    kappa_total = sum(k_list)
    return SocleVector(tuple(
        prefactor * Fraction((2 * g - 2 + n) * e + kappa_total, g - 1) for e in exps
    ))


def socle_express_general(expr, ctx):
    """Linear extension of socle_express; kappa monomials go through single_to_multi"""
    if ctx.n < 1:
        raise DomainError('the socle needs at least one marked point')
    if expr.n != ctx.n:
        raise DomainError(f'expression on {expr.n} points in a context with {ctx.n}')
    if not expr.is_homogeneous(ctx.g - 1):
        raise DomainError(f'expression is not homogeneous of degree {ctx.g - 1}: degrees {sorted(expr.degree_set())}')
    total = SocleVector.zero(ctx.n)
    for (psi, multi), c in to_multi_basis(expr).items():
        k_list = () if multi is None else multi.indices
        total = total + socle_express(ctx.g, ctx.n, psi, k_list).scale(c)
    return total


def pushforward_coeff(g, n, d, k_list=()):
    """
    c with pi_*(kappa_{k_1..k_m} prod psi_i^{d_i+1}) = c * kappa_{g-2}.

    c = (2g-3+n+m)! (2g-3)!! / ((2g-2)! prod (2d_i+1)!! prod (2k_i+1)!!)

    d_i = -1 marks a point without psi factor; (-1)!! = 1.
    """
    exps = _points(d, n)
    k_list = _check_kappa(k_list)
    if any(e < -1 for e in exps):
        raise DomainError(f'psi exponents must be >= -1, got {exps}')
    m = len(k_list)
    denominator = factorial(2 * g - 2)
    for e in exps:
        denominator *= double_factorial(2 * e + 1)
    for k in k_list:
        denominator *= double_factorial(2 * k + 1)
    return Fraction(factorial(2 * g - 3 + n + m) * double_factorial(2 * g - 3), denominator)


def lambda_integral(g):
    """(-1)^{g-1} B_{2g} (g-1)! / (2^g (2g)!)"""
    if g < 2:
        raise DomainError(f'lambda_integral needs g >= 2, got {g}')
    return (-1) ** (g - 1) * bernoulli(2 * g) * factorial(g - 1) / (2 ** g * factorial(2 * g))


@dataclass(frozen=True, order=True)
class IndexLabel:
    """
    Coordinate of E = {empty} + {1..n} + {pairs i<j}.

    kind: 0 empty, 1 point, 2 pair; the dataclass order is the canonical one.
    """
    kind: int
    i: int = 0
    j: int = 0

    @classmethod
    def empty(cls):
        return cls(0)

    @classmethod
    def point(cls, i):
        return cls(1, i)

    @classmethod
    def pair(cls, i, j):
        if i == j:
            raise DomainError(f'pair label needs distinct indices, got {{{i},{j}}}')
        return cls(2, min(i, j), max(i, j))

    def validate(self, n):
        if self.kind == 0:
            ok = self.i == 0 and self.j == 0
        elif self.kind == 1:
            ok = 1 <= self.i <= n and self.j == 0
        elif self.kind == 2:
            ok = 1 <= self.i < self.j <= n
        else:
            ok = False
        if not ok:
            raise DomainError(f'invalid label {self} for n={n}')
        return self

    def __str__(self):
        if self.kind == 0:
            return 'empty'
        if self.kind == 1:
            return str(self.i)
        return f'{{{self.i},{self.j}}}'


def labels(n):
    """Canonical order: empty, 1..n, then pairs lexicographically"""
    out = [IndexLabel.empty()]
    out.extend(IndexLabel.point(i) for i in range(1, n + 1))
    out.extend(IndexLabel.pair(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))
    return out


def row_class(alpha, ctx):
    """Degree-2 basis monomial of a row: kappa_{1,1}, psi_i^2 or psi_i psi_j"""
    if alpha.kind == 0:
        return multi_kappa_expand(MultiKappa((1, 1)), ctx)
    if alpha.kind == 1:
        return TautExpression.psi(ctx.n, alpha.i, 2)
    return expr_mul(TautExpression.psi(ctx.n, alpha.i), TautExpression.psi(ctx.n, alpha.j))


def column_class(beta, ctx):
    """Test class of a column without the lambda_4 lambda_3 factor"""
    psi = [1] * ctx.n
    kappa = ()
    if beta.kind == 1:
        psi[beta.i - 1] = 0
        kappa = (1,)
    elif beta.kind == 2:
        psi[beta.i - 1] = 2
        psi[beta.j - 1] = 0
    return TautExpression.monomial(TautMonomial(tuple(psi), kappa))


def m_entry(alpha, beta, n):
    """
    integral of lambda_4 lambda_3 * beta * alpha over M-bar_{4,n}, in units of
    the integral of lambda_4 lambda_3 kappa_2 over M-bar_4.
    """
    alpha.validate(n)
    beta.validate(n)
    ctx = RingContext(4, n)
    product = expr_mul(row_class(alpha, ctx), column_class(beta, ctx))
    total = Fraction(0)
    for (psi, multi), c in to_multi_basis(product).items():
        k_list = () if multi is None else multi.indices
        total += c * pushforward_coeff(4, n, [e - 1 for e in psi], k_list)
    return total


def mhat_entry(alpha, beta, n):
    """Integer table of the rescaled pairing matrix"""
    alpha.validate(n)
    beta.validate(n)
    if alpha.kind == 0:
        return {0: 5 * (n + 6), 1: 5 * n + 34, 2: 5 * (n + 6)}[beta.kind]
    if alpha.kind == 1:
        k = alpha.i
        if beta.kind == 0:
            return 7
        if beta.kind == 1:
            return 35 if k == beta.i else 7
        if k == beta.i:
            return 3
        return 35 if k == beta.j else 7
    row = {alpha.i, alpha.j}
    if beta.kind == 0:
        return 5
    if beta.kind == 1:
        return 15 if beta.i in row else 5
    if row == {beta.i, beta.j}:
        return 9
    if beta.i in row:
        return 3
    if beta.j in row:
        return 15
    return 5


def row_scaling(label, n):
    return {0: Fraction(1, n + 7), 1: Fraction(7, 3), 2: Fraction(1)}[label.kind]


def column_scaling(label, n):
    return {0: Fraction(1), 1: Fraction(3, n + 6), 2: Fraction(3)}[label.kind]


@dataclass
class PairingMatrix:
    """N x N matrix with rows and columns indexed by labels(n)"""
    n: int
    labels: list
    entries: ExactMatrix
    scale: Fraction = None

    def entry(self, alpha, beta):
        return self.entries[self.labels.index(alpha), self.labels.index(beta)]

    @property
    def size(self):
        return len(self.labels)

    @classmethod
    def from_dict(cls, data):
        """Inverse of to_dict for the entries; labels are rebuilt from n"""
        n = data['n']
        entries = ExactMatrix([[Fraction(x) for x in row] for row in data['entries']])
        scale = Fraction(data['scale']) if data.get('scale') is not None else None
        return cls(n, labels(n), entries, scale)

    def to_dict(self):
        return {
            'n': self.n,
            'labels': [str(label) for label in self.labels],
            'entries': [[format_rational(x) for x in row] for row in self.entries.to_lists()],
            'scale': format_rational(self.scale) if self.scale is not None else None,
        }


def build_matrices(n):
    """
    (M, M-hat) for n points.

    M-hat.scale is the global scalar s(n) with
    D_row M D_col = s(n) M-hat; a mismatch raises ConsistencyError.
    """
    if n < 1:
        raise DomainError(f'build_matrices needs n >= 1, got {n}')
    index = labels(n)
    m = ExactMatrix([[m_entry(a, b, n) for b in index] for a in index], len(index))
    mhat = ExactMatrix([[mhat_entry(a, b, n) for b in index] for a in index], len(index))
    scale = None
    for r, alpha in enumerate(index):
        for c, beta in enumerate(index):
            scaled = row_scaling(alpha, n) * m[r, c] * column_scaling(beta, n)
            if scale is None:
                scale = scaled / mhat[r, c]
            elif scaled != scale * mhat[r, c]:
                raise ConsistencyError(
                    f'M and M-hat are not proportional at ({alpha}, {beta}) for n={n}: '
                    f'{scaled} != {scale} * {mhat[r, c]}'
                )
    published = Fraction(factorial(n + 5), 2 ** 4 * 3)
    if scale != published:
        logger.debug(f'n={n}: derived scalar {scale}, published divisor {published}')
    return PairingMatrix(n, index, m), PairingMatrix(n, index, mhat, scale)


def matrix_to_csv(matrix):
    """Header row of labels, then one row per label; exact 'p/q' entries"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['label'] + [str(label) for label in matrix.labels])
    for label, row in zip(matrix.labels, matrix.entries.to_lists()):
        writer.writerow([str(label)] + [format_rational(x) for x in row])
    return buffer.getvalue()


def matrix_to_json(matrix):
    return json.dumps(matrix.to_dict(), sort_keys=True)


def genus3_socle_displays(n):
    """
    The genus-3 top-degree identities as (name, monomial expression, expected vector).
    """
    ctx = RingContext(3, n)
    out = []
    out.append(('kappa_2', TautExpression.kappa(n, 2), SocleVector((1,) * n)))
    out.append(('kappa_{1,1}', multi_kappa_expand(MultiKappa((1, 1)), ctx),
                SocleVector((Fraction(5, 3) * (n + 5),) * n)))
    for i in range(1, n + 1):
        expected = [Fraction(5, 6)] * n
        expected[i - 1] = Fraction(5, 6) * (n + 5)
        out.append((f'kappa_1 psi_{i}', expr_mul(TautExpression.kappa(n, 1), TautExpression.psi(n, i)),
                    SocleVector(expected)))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            expected = [Fraction(0)] * n
            expected[i - 1] = expected[j - 1] = Fraction(5, 6)
            out.append((f'psi_{i} psi_{j}', expr_mul(TautExpression.psi(n, i), TautExpression.psi(n, j)),
                        SocleVector(expected)))
    return out


def genus4_degree3_relations(n):
    """
    The nine families of genus-4 degree-3 identities as
    (name, monomial expression, expected vector).
    """
    ctx = RingContext(4, n)

    def psi(*points):
        expr = TautExpression.constant(1, n)
        for p in points:
            expr = expr_mul(expr, TautExpression.psi(n, p))
        return expr

    def multi(*indices):
        return multi_kappa_expand(MultiKappa(indices), ctx)

    def vector(default, special=None):
        values = [Fraction(default)] * n
        for p, value in (special or {}).items():
            values[p - 1] = Fraction(value)
        return SocleVector(values)

    q = Fraction(1, 9)
    r = Fraction(1, 27)
    out = [
        ('kappa_3', multi(3), vector(1)),
        ('kappa_{2,1}', multi(2, 1), vector(Fraction(7, 3) * (n + 7))),
        ('kappa_{1,1,1}', multi(1, 1, 1), vector(35 * q * (n + 7) * (n + 8))),
    ]
    points = range(1, n + 1)
    for k in points:
        out.append((f'kappa_2 psi_{k}', expr_mul(multi(2), psi(k)), vector(14 * q, {k: 7 * q * (n + 8)})))
        out.append((f'kappa_{{1,1}} psi_{k}', expr_mul(multi(1, 1), psi(k)),
                    vector(70 * r * (n + 7), {k: 35 * r * (n + 7) * (n + 8)})))
        out.append((f'kappa_1 psi_{k}^2', expr_mul(multi(1), psi(k, k)), vector(7 * q, {k: 7 * q * (2 * n + 13)})))
    for k in points:
        for l in points:
            if k < l:
                out.append((f'kappa_1 psi_{k} psi_{l}', expr_mul(multi(1), psi(k, l)),
                            vector(35 * r, {k: 35 * r * (n + 7), l: 35 * r * (n + 7)})))
            if k != l:
                out.append((f'psi_{k}^2 psi_{l}', psi(k, k, l), vector(0, {k: 14 * q, l: 7 * q})))
    for k in points:
        for l in points:
            for p in points:
                if k < l < p:
                    out.append((f'psi_{k} psi_{l} psi_{p}', psi(k, l, p), vector(0, {k: 35 * r, l: 35 * r, p: 35 * r})))
    return out


def bsz_relation(kind, n, indices=()):
    """
    Genus-3 top-degree relation 'monomial minus its socle expression'.

    kind 'a': psi_k psi_l (indices k, l); 'b': kappa_1 psi_l (index l);
    'c': kappa_2; 'd': kappa_{1,1}.
    """
    ctx = RingContext(3, n)
    if kind == 'a':
        k, l = indices
        monomial = expr_mul(TautExpression.psi(n, k), TautExpression.psi(n, l))
    elif kind == 'b':
        (l,) = indices
        monomial = expr_mul(TautExpression.kappa(n, 1), TautExpression.psi(n, l))
    elif kind == 'c':
        monomial = TautExpression.kappa(n, 2)
    elif kind == 'd':
        monomial = multi_kappa_expand(MultiKappa((1, 1)), ctx)
    else:
        raise DomainError(f'unknown relation kind {kind!r}')
    image = socle_express_general(monomial, ctx)
    for i in range(1, n + 1):
        monomial = monomial - TautExpression.psi(n, i, 2).scale(image[i])
    return monomial
