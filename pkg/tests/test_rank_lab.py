from fractions import Fraction
import random

import pytest
import sympy

from app.engine.linalg import det
from app.engine.rank_lab import (
    SUITES, EVector, Infeasible, SpecialVectors, apply_mhat, bsz_in_pixton, complement_block, complement_check,
    decompose_in_span, det_closed_form, det_product_form, eigenvector_check, exceptional_analysis, fixture_check,
    genus3_completeness, genus3_published_completeness, matrix_consistency, mhat_matrix, plane_block,
    random_subspace_vector, rank_table, recompose, run_suite, socle_check, socle_rank, span_check, span_rank,
    stable_plane_check, upper_bound_check, upper_bound_params, upper_bound_solve, verify_det,
)
from app.engine.verdict import Verdict
from app.utils.errors import DomainError, VerificationFailure


def size(n):
    return 1 + n + n * (n - 1) // 2


def test_det_closed_form_values():
    assert det_closed_form(1) == 952
    assert det_closed_form(2) == -136192


@pytest.mark.parametrize('n', range(1, 21))
def test_product_form_equals_closed_form(n):
    assert det_product_form(n) == det_closed_form(n)


@pytest.mark.parametrize('n', range(1, 9))
def test_verify_det(n):
    verdict = verify_det(n)
    assert verdict.ok, verdict.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize('n', range(9, 21))
def test_verify_det_large(n):
    assert verify_det(n).ok


def test_mhat_det_matches_sympy():
    m = mhat_matrix(3)
    assert Fraction(str(sympy.Matrix(m.to_lists()).det())) == det(m) == det_closed_form(3)


@pytest.mark.parametrize('n', range(3, 9))
def test_plane_blocks(n):
    lam = sympy.Symbol('lambda')
    for i in range(1, n):
        block, charpoly = plane_block(n, i)
        assert charpoly == [1, -(12 * i + 16 - 2 * n), -16 * (n - i + 6)]
        assert [Fraction(str(c)) for c in sympy.Matrix(block.to_lists()).charpoly(lam).all_coeffs()] == charpoly
        has_root = 16 + 4 * (12 * i + 16 - 2 * n) - 16 * (n - i + 6) == 0
        assert has_root == (8 * i == 3 * n + 2)


@pytest.mark.parametrize('n, i', [(3, 1), (6, 2), (10, 4)])
def test_plane_block_read_off_the_images(n, i):
    block, _ = plane_block(n, i)
    assert block.to_lists() == [[28, 32 * i - 24 - 4 * n], [10, 12 * i - 12 - 2 * n]]
    assert det(block) == -16 * (n - i + 6)


def test_plane_block_needs_a_nonzero_v():
    with pytest.raises(DomainError):
        plane_block(2, 1)
    assert stable_plane_check(2, 1).details == {'block_det': None, 'v_is_zero': True}


@pytest.mark.parametrize('n', range(3, 9))
def test_stable_planes(n):
    for i in range(1, n):
        verdict = stable_plane_check(n, i)
        assert verdict.ok, verdict.to_dict()
        assert verdict.details['block_det'] == -16 * (n - i + 6)


def test_stable_plane_index_out_of_range():
    with pytest.raises(DomainError):
        stable_plane_check(4, 4)


@pytest.mark.parametrize('n', range(4, 8))
def test_eigenvectors(n):
    for verdict in run_suite('eigen', n):
        assert verdict.ok, verdict.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize('n', range(8, 13))
def test_eigenvectors_large(n):
    assert all(run_suite('eigen', n))


def test_eigenvector_needs_increasing_indices():
    with pytest.raises(DomainError):
        eigenvector_check(5, (2, 1, 3, 4))


def test_special_vectors_are_orthogonal_to_functionals():
    vectors = SpecialVectors(6)
    for vector in (vectors.u(2), vectors.v(3), vectors.w(1, 2, 4, 6), vectors.t(1, 2, 3, 4), vectors.v_tilde(3)):
        assert vector.functionals() == (0, 0, 0)


@pytest.mark.parametrize('n, i', [(5, 1), (5, 2), (7, 3), (9, 5)])
def test_v_tilde_rows(n, i):
    vector = SpecialVectors(n).v_tilde(i)
    assert sum(vector.gamma(i, j) for j in range(i + 1, n + 1)) == Fraction(3 * n + 2 - 8 * i, 3)
    assert vector.gamma(i, n) == 1 - Fraction(5 * (i - 1), 3)
    for p in range(1, i):
        assert all(vector.gamma(p, j) == 0 for j in range(p + 1, n + 1))


def test_evector_coordinates():
    vector = EVector.from_coordinates(3, alpha=2, beta={1: 1}, gamma={(3, 2): 5})
    assert vector.alpha == 2
    assert vector.beta(1) == 1
    assert vector.gamma(2, 3) == 5
    assert vector.values == [2, 1, 0, 0, 0, 0, 5]
    with pytest.raises(DomainError):
        vector.gamma(2, 2)


def test_exceptional_case_n10():
    result = exceptional_analysis(10)
    assert result.verdict.ok, result.verdict.to_dict()
    assert result.m == 1
    assert result.delta == Fraction(2, 13)
    assert result.published_delta == Fraction(1, 12)
    assert apply_mhat(result.U) == result.U.scale(-4)


@pytest.mark.slow
def test_exceptional_case_n18():
    result = exceptional_analysis(18)
    assert result.verdict.ok
    assert result.delta == Fraction(3, 18)


@pytest.mark.parametrize('n', [9, 11, 2])
def test_exceptional_case_needs_8m_plus_2(n):
    with pytest.raises(DomainError):
        exceptional_analysis(n)


@pytest.mark.parametrize('n', range(2, 9))
def test_span(n):
    assert span_rank(n) == size(n) - 3
    verdict = span_check(n, samples=20, seed=7)
    assert verdict.ok, verdict.to_dict()


def test_span_without_z_in_exceptional_case():
    assert span_rank(10) == size(10) - 3
    assert span_rank(10, include_z=False) == size(10) - 4
    assert span_check(10, samples=10).ok


@pytest.mark.slow
@pytest.mark.parametrize('n', range(9, 13))
def test_span_large(n):
    assert span_check(n, samples=100).ok


def test_decompose_infeasible():
    vector = EVector.from_coordinates(4, alpha=1)
    result = decompose_in_span(vector)
    assert isinstance(result, Infeasible)
    assert not result
    unbalanced = EVector.from_coordinates(4, beta={1: 1})
    assert isinstance(decompose_in_span(unbalanced), Infeasible)


def test_decompose_beta_only_vector():
    vector = EVector.from_coordinates(4, beta={1: 2, 2: -5, 4: 3})
    coefficients = decompose_in_span(vector)
    assert coefficients == {'u_1': 2, 'u_2': -3, 'u_3': -3}
    assert recompose(coefficients, 4) == vector


def test_decompose_reconstructs():
    rng = random.Random(3)
    for n in (3, 5, 10):
        vector = random_subspace_vector(n, rng)
        assert recompose(decompose_in_span(vector), n) == vector


def test_complement_block_n4():
    block = complement_block(4)
    assert block.to_lists() == [[50, 54, 50], [28, 56, 52], [30, 60, 50]]
    assert det(block) == -7360


@pytest.mark.parametrize('n', range(2, 13))
def test_complement(n):
    verdict = complement_check(n)
    assert verdict.ok, verdict.to_dict()


def test_genus3_completeness_one_point():
    relations_rank, verdict = genus3_completeness(1)
    assert relations_rank == 3
    assert verdict.details['dim'] == 4


@pytest.mark.parametrize('n', range(1, 7))
def test_genus3_completeness(n):
    relations_rank, verdict = genus3_completeness(n)
    assert verdict.ok, verdict.to_dict()
    assert relations_rank == 2 + n + n * (n - 1) // 2


@pytest.mark.parametrize('n', range(2, 6))
def test_genus3_published_completeness(n):
    _, verdict = genus3_published_completeness(n)
    assert verdict.ok, verdict.to_dict()


@pytest.mark.parametrize('n', [*range(3, 6), *(pytest.param(n, marks=pytest.mark.slow) for n in range(6, 9))])
def test_bsz_from_published_families(n):
    representations = bsz_in_pixton(n)
    assert len(representations) == n * (n - 1) // 2 + n + 2
    scalars = {}
    for name, representation in representations.items():
        assert representation is not None, name
        assert representation.display_holds, name
        scalars.setdefault(name[:3], set()).add(representation.display_scalar)
    assert all(len(values) == 1 for values in scalars.values())


@pytest.mark.parametrize('n', range(1, 5))
def test_upper_bound_substitution_clears_every_relation(n):
    result = upper_bound_solve(n)
    for position in range(len(upper_bound_params(n))):
        assert result.substituted(position) == {}


@pytest.mark.parametrize('n', range(1, 5))
def test_upper_bound_reports_sigma_row(n):
    verdict = upper_bound_check(n)
    assert verdict.ok, verdict.to_dict()
    assert verdict.details['kappa_2_row'] == 77 * n + 630
    assert verdict.details['kappa_2_published_matrix'] == 1092 + 77 * n
    assert verdict.details['kappa_2_published_display'] == 168 - 77 * n


@pytest.mark.parametrize('n', range(1, 7))
def test_upper_bound_nonsingular(n):
    result = upper_bound_solve(n)
    assert not result.singular
    assert len(result.unknowns) == n + 1
    text = result.expression_text(result.unknowns[0])
    assert text != '0'


@pytest.mark.slow
@pytest.mark.parametrize('n', range(7, 16))
def test_upper_bound_nonsingular_large(n):
    assert not upper_bound_solve(n).singular


@pytest.mark.parametrize('g, n', [(2, 3), (3, 2), (3, 4), (4, 3)])
def test_socle_rank(g, n):
    assert socle_rank(g, n) == n


def expected_ranks(g, n):
    return {
        1: [1],
        2: [1, n],
        3: [1, n + 1, n],
        4: [1, n + 1, n * (n + 1) // 2 + 1, n],
    }[g]


@pytest.mark.parametrize('g', range(1, 5))
@pytest.mark.parametrize('n', range(1, 4))
def test_rank_table(g, n):
    assert rank_table(g, n) == expected_ranks(g, n)


@pytest.mark.slow
@pytest.mark.parametrize('g', range(1, 5))
@pytest.mark.parametrize('n', range(4, 11))
def test_rank_table_large(g, n):
    assert rank_table(g, n) == expected_ranks(g, n)


def test_rank_table_genus_out_of_range():
    with pytest.raises(DomainError):
        rank_table(5, 1)


def test_suites_registry():
    assert set(SUITES) == {
        'det', 'plane', 'eigen', 'exceptional', 'span', 'complement', 'upper-bound', 'genus3', 'bsz', 'socle',
        'fixtures', 'consistency',
    }
    assert run_suite('eigen', 3) == []
    assert run_suite('exceptional', 9) == []
    with pytest.raises(DomainError):
        run_suite('nope', 3)


@pytest.mark.parametrize('n', range(1, 4))
def test_fixture_sigma_one_differs_on_kappa_2_only(n):
    verdicts = {v.params['family']: v for v in fixture_check(n)}
    sigma = verdicts['sigma={1}']
    assert sigma.ok, sigma.to_dict()
    assert sigma.details['kappa_2_generated'] == 77 * n + 630
    assert sigma.details['kappa_2_published'] == 168 - 77 * n


@pytest.mark.parametrize('n', [1, 2])
def test_socle_suite_covers_genus4_relations(n):
    genus4 = [v for v in socle_check(n) if v.params['g'] == 4 and 'relation' in v.params]
    assert genus4
    assert all(v.ok for v in genus4)


@pytest.mark.slow
@pytest.mark.parametrize('n', range(5, 9))
def test_matrix_consistency_larger_n(n):
    verdict = matrix_consistency(n)
    assert verdict.ok, verdict.to_dict()
    assert verdict.details['rank_equal']


@pytest.mark.parametrize('suite', ['socle', 'fixtures', 'consistency'])
@pytest.mark.parametrize('n', [1, 3])
def test_small_suites_pass(suite, n):
    for verdict in run_suite(suite, n):
        assert verdict.ok, verdict.to_dict()


def test_failed_verdict_raises():
    verdict = stable_plane_check(3, 1)
    assert verdict.raise_for_status() is verdict
    failing = Verdict.mismatch('det', {'n': 1}, 'det', 1, 2)
    with pytest.raises(VerificationFailure):
        failing.raise_for_status()
