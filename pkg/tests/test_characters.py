import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from lmoment.arith import primes_between
from lmoment.characters import (HURWITZ_CACHE, CharacterTable, character_dft, character_table,
                                count_primitive, dft_bluestein, dft_naive, even_orthogonality_matrix,
                                functional_equation_residuals, gauss_sum, gauss_sums, l_value_grid,
                                l_value_naive, orthogonality_closed, orthogonality_even,
                                principal_check, root_number, x_factor)


def test_table_rejects_composite_and_small():
    for q in (3, 9, 100):
        with pytest.raises(ValueError):
            CharacterTable(q)


def test_chi_is_a_character():
    t = character_table(13)
    n = np.arange(13)
    for j in range(12):
        v = t.chi(j, n)
        assert v[0] == 0 and v[1] == 1
        prod = t.chi(j, (n[:, None] * n[None, :]) % 13)
        assert np.allclose(prod, v[:, None] * v[None, :], atol=1e-14)
        assert abs(t.chi(j, 12) - (-1) ** t.parity(j)) < 1e-14


def test_count_primitive_examples():
    assert count_primitive(5) == (3, 1)
    assert count_primitive(7) == (5, 2)
    assert count_primitive(101) == (99, 49)


def test_gauss_sum_modulus():
    for q in primes_between(5, 199):
        tau = gauss_sums(character_table(q))[1:]
        assert np.max(np.abs(np.abs(tau) - math.sqrt(q))) <= 1e-9


def test_gauss_sum_quadratic_mod_5():
    assert abs(gauss_sum(character_table(5), 2) - math.sqrt(5)) < 1e-14


@given(st.sampled_from([5, 7, 13, 29, 61, 101]), st.integers(1, 10**6))
def test_gauss_sum_conjugate(q, k):
    t = character_table(q)
    j = 1 + k % (q - 2)
    lhs = gauss_sum(t, t.conj_index(j))
    rhs = (-1) ** t.parity(j) * np.conj(gauss_sum(t, j))
    assert abs(lhs - rhs) <= 1e-12


def test_gauss_sum_dft_matches_direct():
    t = character_table(29)
    taus = gauss_sums(t)
    assert max(abs(taus[j] - gauss_sum(t, j)) for j in range(1, 28)) < 1e-12


def test_bluestein_matches_naive():
    rng = np.random.default_rng(2)
    for n in (12, 100, 600, 1008):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.max(np.abs(dft_bluestein(x) - dft_naive(x))) < 1e-10 * n
    x = rng.normal(size=1008)
    assert np.allclose(character_dft(x), dft_naive(x), atol=1e-10)


@given(st.floats(-0.4, 0.4), st.floats(-10, 10), st.sampled_from([0, 1]))
def test_x_factor_reciprocal(x, y, parity):
    u = complex(x, y)
    assert abs(x_factor(0.5 + u, parity, 13) * x_factor(0.5 - u, parity, 13) - 1) < 1e-12
    assert x_factor(0.5, parity, 13) == pytest.approx(1)


def test_asymmetric_functional_equation():
    t = character_table(13)
    s = 0.3 + 0.7j
    L, L1 = l_value_grid(t, s), l_value_grid(t, 1 - s)
    for j in t.indices():
        rhs = root_number(t, j) * x_factor(s, t.parity(j), 13) * L1[t.conj_index(j)]
        assert abs(L[j] - rhs) <= 1e-9


def test_completed_functional_equation():
    for q in (13, 29, 61):
        assert functional_equation_residuals(character_table(q), 0.4 + 1.2j).max() <= 1e-9


def test_principal_entry_is_zeta_q():
    assert abs(principal_check(character_table(13), 2.5)) < 1e-11


def test_l_value_against_series_and_mpmath():
    t = character_table(13)
    n = np.arange(1, 10**6 + 1)
    series = np.sum(t.chi(1, n) / n.astype(float) ** 2)
    assert abs(l_value_grid(t, 2.0)[1] - series) < 1e-6
    chi = [complex(t.chi(3, k)) for k in range(13)]
    ref = complex(mpmath.dirichlet(0.5 + 2j, chi))
    assert abs(l_value_grid(t, 0.5 + 2j)[3] - ref) < 1e-12


def test_dft_path_matches_naive_sum():
    for q in (5, 7, 11, 13, 29, 31):
        t = character_table(q)
        s = 0.5 + 0.3j
        grid = l_value_grid(t, s)
        assert max(abs(grid[j] - l_value_naive(t, j, s)) for j in range(q - 1)) <= 1e-10


def test_conjugate_characters_give_conjugate_values():
    t = character_table(31)
    L = l_value_grid(t, 1.7)
    for j in range(1, 30):
        assert abs(L[t.conj_index(j)] - np.conj(L[j])) < 1e-12


def test_parity_partition():
    for q in (5, 7, 101):
        t = character_table(q)
        assert len(t.indices(0)) + len(t.indices(1)) == q - 2


def test_hurwitz_cache_hits_on_exact_key():
    t = character_table(17)
    s = 0.5 + 0.123456789j
    before = HURWITZ_CACHE.hits
    a = l_value_grid(t, s)
    b = l_value_grid(t, s)
    assert HURWITZ_CACHE.hits == before + 1
    assert np.array_equal(a, b)


def test_orthogonality_examples():
    t = character_table(5)
    assert orthogonality_even(t, 1, 1) == (pytest.approx(1), 1)
    assert orthogonality_even(t, 2, 1) == (pytest.approx(-1), -1)
    assert orthogonality_even(t, 5, 2)[0] == 0 and orthogonality_closed(5, 5, 2) == 0


def test_orthogonality_matrix_equals_closed_form():
    for q in (7, 13, 31):
        O = even_orthogonality_matrix(character_table(q))
        closed = np.array([[orthogonality_closed(q, a, b) for b in range(q)] for a in range(q)])
        assert np.array_equal(np.round(O.real).astype(int), closed.astype(int))
        assert np.max(np.abs(O.imag)) < 1e-9


def test_l_value_grid_domain():
    with pytest.raises(ValueError):
        l_value_grid(character_table(13), 1.0)
