from fractions import Fraction
from itertools import permutations

from hypothesis import given, settings, strategies as st
import pytest

from app.engine.taut_ring import (
    MultiKappa, RingContext, TautExpression, TautMonomial, expr_mul, from_multi_terms, monomial_basis,
    multi_kappa_expand, parse_expression, single_to_multi, to_multi_basis,
)
from app.utils.errors import DomainError

N = 3
CTX = RingContext(3, N)


def kappa(*indices):
    return TautExpression.kappa(N, *indices)


def psi(point, exponent=1):
    return TautExpression.psi(N, point, exponent)


def expand_linear(combination, ctx=CTX):
    total = TautExpression.zero(ctx.n)
    for multi, c in combination.items():
        total = total + multi_kappa_expand(multi, ctx).scale(c)
    return total


@pytest.mark.parametrize('g, n', [(0, 2), (1, 0), (0, 0)])
def test_unstable_contexts_rejected(g, n):
    with pytest.raises(DomainError):
        RingContext(g, n)


def test_kappa0():
    assert RingContext(4, 3).kappa0 == 9


def test_expand_single_index():
    assert multi_kappa_expand(MultiKappa((2,)), CTX) == kappa(2)


def test_expand_two_indices():
    assert multi_kappa_expand(MultiKappa((1, 1)), CTX) == kappa(1, 1) + kappa(2)


@pytest.mark.parametrize('n', [1, 2, 5])
def test_zero_index_uses_kappa0(n):
    ctx = RingContext(3, n)
    assert multi_kappa_expand(MultiKappa((0, 1)), ctx) == TautExpression.kappa(n, 1).scale(n + 5)


def test_expand_zero_one_one():
    expected = (kappa(1, 1) + kappa(2)).scale(CTX.kappa0 + 2)
    assert multi_kappa_expand(MultiKappa((0, 1, 1)), CTX) == expected


def test_single_to_multi_examples():
    assert single_to_multi((1,)) == {MultiKappa((1,)): 1}
    assert single_to_multi((1, 2)) == {MultiKappa((1, 2)): 1, MultiKappa((3,)): -1}
    assert single_to_multi((1, 1, 1)) == {
        MultiKappa((1, 1, 1)): 1, MultiKappa((1, 2)): -3, MultiKappa((3,)): 1,
    }


def test_single_to_multi_rejects_empty():
    with pytest.raises(DomainError):
        single_to_multi(())


def test_kappa_one_times_kappa_one_one():
    product = expr_mul(kappa(1), multi_kappa_expand(MultiKappa((1, 1)), CTX))
    assert product == kappa(1, 1, 1) + kappa(1, 2)
    multi = to_multi_basis(product)
    zero = (0,) * N
    assert multi == {(zero, MultiKappa((1, 1, 1))): 1, (zero, MultiKappa((1, 2))): -2}


multisets = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4)


@settings(max_examples=80, deadline=None)
@given(multisets)
def test_multi_single_round_trip(indices):
    mono = TautMonomial((0,) * N, indices)
    assert expand_linear(single_to_multi(mono)) == TautExpression.monomial(mono)
    multi = MultiKappa(tuple(indices))
    back = {}
    for m2, c in multi_kappa_expand(multi, CTX).terms.items():
        for key, d in single_to_multi(m2).items():
            back[key] = back.get(key, 0) + c * d
    assert {k: v for k, v in back.items() if v} == {multi: 1}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=3))
def test_zero_elimination_law(indices):
    m = len(indices)
    with_zero = multi_kappa_expand(MultiKappa((0,) + tuple(indices)), CTX)
    assert with_zero == multi_kappa_expand(MultiKappa(tuple(indices)), CTX).scale(CTX.kappa0 + m)


def test_expansion_symmetric_in_indices():
    results = {multi_kappa_expand(MultiKappa(p), CTX) for p in permutations((0, 1, 2))}
    assert len(results) == 1


small_terms = st.lists(
    st.tuples(
        st.tuples(*(st.integers(0, 2) for _ in range(N))),
        st.lists(st.integers(1, 2), max_size=2),
        st.fractions(min_value=-5, max_value=5, max_denominator=4),
    ),
    max_size=3,
)


def build(terms):
    expr = TautExpression.zero(N)
    for psi_exps, kappas, c in terms:
        expr = expr + TautExpression.monomial(TautMonomial(psi_exps, kappas), c)
    return expr


@settings(max_examples=50, deadline=None)
@given(small_terms, small_terms, small_terms)
def test_product_commutative_and_associative(a, b, c):
    a, b, c = build(a), build(b), build(c)
    assert expr_mul(a, b) == expr_mul(b, a)
    assert expr_mul(expr_mul(a, b), c) == expr_mul(a, expr_mul(b, c))


def test_psi_exponents_add():
    assert expr_mul(psi(1), psi(1)) == psi(1, 2)


def test_monomial_basis_small_degrees():
    ctx = RingContext(3, 2)
    assert monomial_basis(ctx, 0) == [TautMonomial((0, 0))]
    assert [m.to_text() for m in monomial_basis(ctx, 1)] == ['k1', 'p1', 'p2']


def test_monomial_basis_degree_two_order():
    ctx = RingContext(3, 2)
    texts = [m.to_text() for m in monomial_basis(ctx, 2)]
    assert texts == ['k2', 'k1^2', 'k1*p1', 'k1*p2', 'p1^2', 'p2^2', 'p1*p2']


@pytest.mark.parametrize('n', range(1, 7))
def test_monomial_basis_degree_two_size(n):
    assert len(monomial_basis(RingContext(4, n), 2)) == 2 + 2 * n + n * (n - 1) // 2


def test_negative_degree_rejected():
    with pytest.raises(DomainError):
        monomial_basis(CTX, -1)


def test_parse_expression():
    expr = parse_expression('35*k2 - 6*k1*p1 + 3*k1^2 - 5/6*p2^2', CTX)
    expected = kappa(2).scale(35) - expr_mul(kappa(1), psi(1)).scale(6) + kappa(1, 1).scale(3) \
        - psi(2, 2).scale(Fraction(5, 6))
    assert expr == expected
    assert parse_expression(expr.to_text(), CTX) == expr


def test_parse_multi_index_and_kappa0():
    assert parse_expression('K(1,1)', CTX) == kappa(1, 1) + kappa(2)
    assert parse_expression('k0*p1', CTX) == psi(1).scale(CTX.kappa0)


@pytest.mark.parametrize('text', ['p9', 'q1', '3*', 'k1 ** 2'])
def test_parse_errors(text):
    with pytest.raises(DomainError):
        parse_expression(text, CTX)


def test_multi_terms_round_trip():
    expr = parse_expression('3*k1^2*p1 - k2*p2 + 7*p1*p2*p3 + 2', CTX)
    terms = [(c, psi_exps, multi) for (psi_exps, multi), c in to_multi_basis(expr).items()]
    assert from_multi_terms(terms, CTX) == expr


def test_normalized_clears_denominators_and_sign():
    expr = (kappa(2).scale(Fraction(-1, 2)) + psi(1, 2).scale(Fraction(1, 3))).normalized()
    assert expr == kappa(2).scale(3) - psi(1, 2).scale(2)


def test_vector_outside_basis_rejected():
    with pytest.raises(DomainError):
        kappa(3).vector(monomial_basis(CTX, 2))


def test_relabel_moves_psi():
    expr = psi(1, 2) + TautExpression.monomial(TautMonomial((0, 1, 0), (1,)), 3)
    moved = expr.relabel({1: 3, 2: 1, 3: 2})
    assert moved == psi(3, 2) + TautExpression.monomial(TautMonomial((1, 0, 0), (1,)), 3)
    assert moved.relabel({1: 2, 2: 3, 3: 1}) == expr


degree_two = monomial_basis(CTX, 2)


@settings(max_examples=40, deadline=None)
@given(st.permutations([1, 2, 3]), st.sampled_from(degree_two), st.sampled_from(degree_two))
def test_relabel_commutes_with_products(order, left, right):
    permutation = dict(zip((1, 2, 3), order))
    a, b = TautExpression.monomial(left), TautExpression.monomial(right)
    assert expr_mul(a, b).relabel(permutation) == expr_mul(a.relabel(permutation), b.relabel(permutation))
