import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from meandro import (
    MeanderModel,
    QLogModel,
    ZeroSumGeneral,
    ZeroSumPiK,
    ZeroPole,
    eulerian_polynomial,
    evaluate_sum,
    geometric_power_sum,
    meander_curve,
    pi_k,
    ray_trace,
    taylor_jet,
    zero_sum_coefficients,
)


# ---------------------------------------------------------------------------
# Eulerian polynomials and power sums
# ---------------------------------------------------------------------------


def test_eulerian_polynomials_exact():
    assert eulerian_polynomial(1) == [1]
    assert eulerian_polynomial(2) == [1, 1]
    assert eulerian_polynomial(3) == [1, 4, 1]
    assert eulerian_polynomial(4) == [1, 11, 11, 1]


def test_eulerian_row_sums_are_factorials():
    for j in range(1, 9):
        assert sum(eulerian_polynomial(j)) == math.factorial(j)


def test_power_sum_exponent_resolved_by_brute_force():
    # The closed form x*E_j(x)/(1-x)**(j+1): the brute-force series pins the
    # denominator exponent at j+1 (j alone is off by a factor (1-x)).
    for j in (1, 3, 5, 8):
        for x in (0.3, 0.5, -0.4):
            brute = math.fsum(n**j * x**n for n in range(1, 4000))
            assert geometric_power_sum(j, x) == pytest.approx(brute, rel=1e-12)
            wrong_exponent = geometric_power_sum(j, x) * (1 - x)
            assert abs(wrong_exponent - brute) > 1e-6 * abs(brute)


# ---------------------------------------------------------------------------
# Meander model
# ---------------------------------------------------------------------------


def test_meander_jet_matches_eulerian_closed_form(meander_half):
    jet = taylor_jet(meander_half, 0j, 8, rel_tol=1e-12)
    for j in range(9):
        closed = (-1.0) ** j * geometric_power_sum(j, 0.5)
        assert abs(jet.coefficients[j] - closed) <= 1e-9 * abs(closed)


def test_meander_factorial_growth_bounds(meander_half):
    # x**j * j**j below, C**j * j! above (C = 2 suffices at x = 1/2).
    jet = taylor_jet(meander_half, 0j, 8, rel_tol=1e-12)
    for j in range(1, 9):
        a = abs(jet.coefficients[j])
        assert a >= 0.5**j * j**j
        assert a <= 2.0**j * math.factorial(j) * (1 + 1e-12)


def test_meander_derivative_closed_form():
    m = MeanderModel(0.4, c=0.1, alpha=2.0, lam=1.5)
    z, n, k = 0.2 + 0.1j, 3, 4
    expect = 0.4**n * (-n) ** k * math.factorial(k) / (1 + n * z) ** (k + 1)
    assert m.derivative(n, k, z) == expect


def test_meander_rejects_large_x():
    with pytest.raises(ValueError):
        MeanderModel(1.0)


# ---------------------------------------------------------------------------
# q-logarithm model
# ---------------------------------------------------------------------------


def test_fiber_identity_random_points(qlog_half):
    rng = np.random.default_rng(5)
    for n in (1, 2, 7, 33, 64):
        roots = qlog_half.perforation.poles_on_sheet(n)
        for _ in range(4):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if np.min(np.abs(z - roots)) < 1e-2:
                continue
            direct = 1.0 / (z**n - 1.0)
            fiber = np.sum(roots / (z - roots)) / n
            assert abs(direct - fiber) <= 1e-10 * max(1.0, abs(direct))


def test_qlog_derivative_matches_difference(qlog_half):
    z, n = 0.4 + 0.1j, 5
    h = 1e-6
    fd = (qlog_half.term(n, z + h) - qlog_half.term(n, z - h)) / (2 * h)
    assert qlog_half.derivative(n, 1, z) == pytest.approx(fd, rel=1e-8)


def test_qlog_residues(qlog_half):
    omega = cmath.exp(2j * math.pi / 5.0)
    assert qlog_half.residue(5, omega) == pytest.approx(0.5**5 * omega / 5.0)
    with pytest.raises(ValueError):
        qlog_half.residue(5, 0.3 + 0j)


# ---------------------------------------------------------------------------
# Zero-expansion constructions
# ---------------------------------------------------------------------------


def test_pi_k_values():
    assert pi_k(0, 0.5) == 0.5
    assert pi_k(2, 0.0) == 1.0
    assert pi_k(3, 0.1) == pytest.approx(0.9 * 0.8 * 0.7 * 0.6)
    assert pi_k(2, Fraction(1, 3)) == Fraction(2, 3) * Fraction(1, 3) * 0


def test_pik_partial_sum_identity_exact():
    """Telescoping remainder of the zero expansion of 1, in exact rationals.

    With pi_k = prod_{j=1}^{k+1}(1 - j z), the remainder after the order-n
    partial sum is (-1)**(n+1) (n+1)! z**(n+1) / pi_n(z); the denominator
    index n (not n+1) is pinned by this oracle.
    """
    for z in (Fraction(3, 17), Fraction(-2, 9), Fraction(1, 101)):
        for n in range(13):
            lhs = 1 - sum(
                (-1) ** k * math.factorial(k) * z**k / pi_k(k, z) for k in range(n + 1)
            )
            rhs = (-1) ** (n + 1) * math.factorial(n + 1) * z ** (n + 1) / pi_k(n, z)
            assert lhs == rhs
            off_by_one = (-1) ** (n + 1) * math.factorial(n + 1) * z ** (n + 1) / pi_k(n + 1, z)
            assert lhs != off_by_one


def test_pik_jet_is_one(meander_half):
    jet = taylor_jet(ZeroSumPiK(), 0j, 8)
    assert jet.coefficients[0] == 1.0
    assert np.all(jet.coefficients[1:] == 0.0)


def test_zero_sum_coefficient_seeds():
    assert zero_sum_coefficients(1, [Fraction(2)], 0) == [-1]
    a = zero_sum_coefficients(1, [Fraction(1), Fraction(1)], 1)
    assert a == [-1, 1]  # a_1 = -a_0/e_0


def test_zero_sum_rejects_zero_pole():
    with pytest.raises(ZeroPole):
        zero_sum_coefficients(1, [Fraction(0), Fraction(1)], 1)


def test_zero_sum_partial_jets_vanish_exactly():
    poles = [Fraction(1, k + 1) for k in range(9)]
    a = zero_sum_coefficients(1, poles, 8)
    for order in range(9):
        jet_coeff = sum(
            a[j] * poles[j] ** -(order - j) for j in range(min(order, 8) + 1)
        ) + (1 if order == 0 else 0)
        assert jet_coeff == 0


def test_zero_sum_general_jets_vanish_in_float():
    model = ZeroSumGeneral(1, [Fraction(1, k + 1) for k in range(10)])
    jet = taylor_jet(model, 0j, 8)
    assert float(np.max(np.abs(jet.coefficients))) <= 1e-9
    # flatness witness: the assembled partial sum is tiny near the origin
    for z in (0.01 + 0j, 0.01j):
        val = sum(model.term(k, z) for k in range(10))
        assert abs(val) <= 1e-12


def test_zero_sum_general_finite_eval():
    model = ZeroSumGeneral(1, [Fraction(1, k + 1) for k in range(10)])
    res = evaluate_sum(model, 0.02 + 0.01j, tol=1e-12)
    direct = sum(model.term(k, 0.02 + 0.01j) for k in range(10))
    assert res.value == pytest.approx(direct)
    assert res.tail_bound == 0.0


# ---------------------------------------------------------------------------
# Truncation curves
# ---------------------------------------------------------------------------


def test_curve_degree_one():
    data = meander_curve(1, [0.0, 0.75])
    assert data[0][1] == pytest.approx([-1.0, 0.0])
    # branch through the origin: z = (-1 + sqrt(1 + 4 x))/2 = 0.5 at x = 0.75
    assert 0.5 in [pytest.approx(r) for r in data[1][1]]


def test_curve_roots_satisfy_equation():
    for x, roots in meander_curve(3, np.linspace(0.05, 0.9, 12)):
        for z in roots:
            residual = abs(z - sum(x**k / (1 + k * z) for k in range(1, 4)))
            assert residual <= 1e-8


def test_curve_winds_with_order():
    # more truncation terms bring more poles, hence more real branches
    low = meander_curve(2, [0.5])[0][1]
    high = meander_curve(8, [0.5])[0][1]
    assert len(high) > len(low)


def test_curve_rejects_high_degree():
    with pytest.raises(ValueError):
        meander_curve(40, [0.5])


# ---------------------------------------------------------------------------
# Ray tracing
# ---------------------------------------------------------------------------


def test_ray_origin_value(qlog_half):
    pts = ray_trace(qlog_half, t_grid=[0.0], tol=1e-12)
    assert pts[0].value == pytest.approx(-1.0)


def test_ray_bridges_the_circle(qlog_half):
    pts = ray_trace(qlog_half, t_grid=np.arange(0.9, 1.1001, 0.05), tol=1e-10)
    assert all(p.flagged is None for p in pts)
    values = [p.value for p in pts]
    # no blow-up across t = 1
    assert max(abs(v) for v in values) < 10.0


def test_ray_flags_exact_pole_direction(qlog_half):
    pts = ray_trace(qlog_half, theta=0.0, t_grid=[1.0], tol=1e-10)
    assert pts[0].flagged == (1, 1 + 0j)
    assert pts[0].value is None
