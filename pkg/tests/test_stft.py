import io
import math

import numpy as np
import pytest
from scipy import integrate

from gamma_stft.distributions import (
    DeltaDeriv,
    ExpPolyOrthant,
    GaussPoly,
    TestDistribution,
    delta,
    distribution_from_json,
    gaussian,
    heaviside_exp,
)
from gamma_stft.functions import Poly, SchwartzTestFunction, Window
from gamma_stft.stft import (
    DEFAULT_GRID,
    GridSpec,
    GridTooSmall,
    SynthesisWindowError,
    TimeFrequencyField,
    adjoint_apply,
    convolve,
    isometry_gap,
    pairing,
    reconstruct_error,
    stft,
    stft_row,
    window_inner,
)

PSI = Window(1.0, 1)
PHI = Window(1.0, 1, center=(0.3,))
SMALL = GridSpec.symmetric(2.0, 6.0, 9, 13)


def bump1(t):
    return math.exp(-1.0 / (1.0 - t * t)) if abs(t) < 1 else 0.0


# -- distributions


def test_regions_of_terms():
    assert heaviside_exp(0.5).region().contains_point([0.6])
    assert not heaviside_exp(0.5).region().contains_point([0.4])
    assert (delta(0.0) + gaussian()).region().contains_point([-100.0])
    f = heaviside_exp([0.5, -1.0])
    assert f.region().contains_point([0.6, -0.9]) and not f.region().contains_point([0.6, -1.1])


def test_delta_reweighting_matches_direct_pairing():
    f = TestDistribution((DeltaDeriv([0.4], (2,), 1.5),), 1)
    eta = 0.7
    g = SchwartzTestFunction(Poly.from_json([1, 2, 0, 1], 1), sigma=0.3)
    lhs = pairing(f.reweighted([eta]), g)
    rhs = pairing(f, g.reweighted([eta]))
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("term", [GaussPoly(0.8, Poly.from_json([1, -1], 1), 2.0, [0.3]), ExpPolyOrthant([0.5], Poly.from_json([0, 1], 1), [-0.2], 1.0)])
def test_density_reweighting_and_translation(term):
    T = np.linspace(-1.5, 2.5, 17)[:, None]
    (rw,) = term.reweighted([0.9])
    assert np.allclose(rw.density(T), np.exp(-0.9 * T[:, 0]) * term.density(T))
    (tr,) = term.translated([0.6])
    assert np.allclose(tr.density(T + 0.6), term.density(T))


def test_distribution_json_round_trip():
    f = delta(0.2, (1,), 2.0) + heaviside_exp(0.5) + gaussian(0.7, coeff=1 - 2j)
    g = distribution_from_json(f.to_json())
    assert g.to_json() == f.to_json()


def test_zero_coefficients_are_dropped():
    assert delta(0.0, coeff=0.0).is_zero


# -- pairing


def test_pairing_delta_and_derivative():
    g = SchwartzTestFunction(Poly.from_json([0, 0, 1], 1), sigma=0.0, bump=Window(5.0, 1))
    assert pairing(delta(0.0), PHI) == pytest.approx(PHI(np.array([[0.0]]))[0])
    # <delta', t^2 * bump> = -(d/dt)(t^2 bump)(0) = 0
    assert abs(pairing(delta(0.0, (1,)), g)) < 1e-15


def test_pairing_delta_derivative_matches_finite_differences():
    a, h = 0.37, 1e-5
    got = pairing(delta(a, (1,)), PSI)
    fd = -(PSI(np.array([[a + h]]))[0] - PSI(np.array([[a - h]]))[0]) / (2 * h)
    assert got == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("mu", [-1.0, 0.5, 2.0])
def test_pairing_orthant_against_adaptive_oracle(mu):
    ref, _ = integrate.quad(lambda t: math.exp(mu * t) * bump1(t), 0, 1, epsabs=1e-15, epsrel=1e-13)
    assert pairing(heaviside_exp(mu), PSI).real == pytest.approx(ref, rel=1e-9)


# -- stft


def test_stft_of_delta_closed_form():
    a = 0.4
    F = stft(delta(a), PSI, SMALL)
    X, Xi = SMALL.x_nodes(), SMALL.xi_nodes()
    expect = PSI(a - X)[:, None] * np.exp(-2j * np.pi * a * Xi[:, 0])[None, :]
    assert np.allclose(F.values, expect, atol=1e-15)


def test_stft_of_gaussian_against_direct_quadrature():
    f = gaussian(1.0)
    F = stft(f, PSI, SMALL)
    X, Xi = SMALL.x_nodes(), SMALL.xi_nodes()
    rng = np.random.default_rng(11)
    for _ in range(25):
        i, j = rng.integers(X.shape[0]), rng.integers(Xi.shape[0])
        x, xi = X[i, 0], Xi[j, 0]
        kern = lambda t, part: math.exp(-t * t / 2) * bump1(t - x) * part(-2 * math.pi * xi * t)
        re = integrate.quad(kern, x - 1, x + 1, args=(math.cos,), epsabs=1e-14, limit=200)[0]
        im = integrate.quad(kern, x - 1, x + 1, args=(math.sin,), epsabs=1e-14, limit=200)[0]
        assert abs(F.values[i, j] - (re + 1j * im)) < 1e-8


def test_stft_of_zero_is_zero():
    assert not np.any(stft(TestDistribution((), 1), PSI, SMALL).values)


def test_stft_translation_covariance():
    f, h = gaussian(0.8) + heaviside_exp(0.3, corner=[-0.5]), 0.5
    axes = [np.linspace(-6, 6, 13)]
    for x in (-0.7, 0.2, 1.1):
        lhs = stft_row(f.translated([h]), PSI, np.array([x]), axes)
        rhs = np.exp(-2j * np.pi * axes[0] * h) * stft_row(f, PSI, np.array([x - h]), axes)
        assert np.allclose(lhs, rhs, atol=1e-8)


def test_stft_linearity():
    f1, f2 = gaussian(1.0), delta(0.3, (1,))
    a, b = 2.0 - 1j, -0.5
    lhs = stft(f1.scaled(a) + f2.scaled(b), PSI, SMALL).values
    rhs = a * stft(f1, PSI, SMALL).values + b * stft(f2, PSI, SMALL).values
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_field_csv_export():
    F = stft(delta(0.0), PSI, SMALL)
    buf = io.StringIO()
    assert F.to_csv(buf) == SMALL.size
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x1,xi1,re,im,abs" and len(lines) == SMALL.size + 1
    assert F.csv_text().startswith("# {")


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec((1.0,), (0.0,), (0.0,), (1.0,), 4, 4)
    with pytest.raises(ValueError):
        TimeFrequencyField(SMALL, np.zeros((3, 3)))


# -- adjoint, reconstruction, isometry


def test_adjoint_of_zero_field():
    F = TimeFrequencyField(DEFAULT_GRID, np.zeros((DEFAULT_GRID.n_x, DEFAULT_GRID.n_xi)))
    assert adjoint_apply(F, PSI, PHI) == 0


def test_adjoint_of_delta_field_approaches_reconstruction_value():
    F = stft(delta(0.0), PSI, DEFAULT_GRID)
    got = adjoint_apply(F, PSI, PHI)
    expect = window_inner(PSI, PSI) * PHI(np.array([[0.0]]))[0]
    assert abs(got - expect) < 1e-4 * abs(expect)


def test_adjoint_linearity():
    F1 = stft(delta(0.0), PSI, DEFAULT_GRID)
    F2 = stft(delta(0.5, (1,)), PSI, DEFAULT_GRID)
    a, b = 1.5 + 2j, -0.25
    lhs = adjoint_apply(a * F1 + b * F2, PSI, PHI)
    rhs = a * adjoint_apply(F1, PSI, PHI) + b * adjoint_apply(F2, PSI, PHI)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_adjoint_guard_reports_tail():
    F = stft(delta(0.0), PSI, SMALL)
    with pytest.raises(GridTooSmall) as info:
        adjoint_apply(F, PSI, PHI)
    assert info.value.tail_fraction > 1e-6


def test_reconstruction_of_delta_on_default_grid():
    assert reconstruct_error(delta(0.0), PSI, PSI, PHI) < 1e-3


def test_reconstruction_with_distinct_synthesis_window():
    gamma = Window(0.8, 1, 1.7)
    assert reconstruct_error(delta(0.1), PSI, gamma, PHI) < 1e-3


def test_reconstruction_of_zero_and_degenerate_window():
    assert reconstruct_error(TestDistribution((), 1), PSI, PSI, PHI) == 0.0
    far = Window(1.0, 1, center=(5.0,))
    with pytest.raises(SynthesisWindowError):
        reconstruct_error(delta(0.0), PSI, far, PHI)


def test_isometry_gap_invariant_under_scaling():
    g = GridSpec.symmetric(4.0, 16.0, 33, 129)
    base = isometry_gap(gaussian(1.0), PSI, g)
    assert base < 1e-2
    assert isometry_gap(gaussian(1.0, coeff=2.0), PSI, g) == pytest.approx(base, rel=1e-6, abs=1e-14)
    assert isometry_gap(gaussian(1.0), PSI.scaled(3.0), g) == pytest.approx(base, rel=1e-6, abs=1e-14)


def test_isometry_rejects_non_l2():
    with pytest.raises(ValueError):
        isometry_gap(delta(0.0), PSI, SMALL)


# -- convolution


def test_convolve_delta_and_derivative():
    x = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(convolve(delta(0.3), PSI, x), PSI(x - 0.3))
    assert np.allclose(convolve(delta(0.0, (1,)), PSI, x), PSI.derivative((1,), x))


def test_convolve_orthant_against_oracle():
    mu = 0.5
    for x in (-0.5, 0.2, 1.7, 4.0):
        lo, hi = max(0.0, x - 1), x + 1
        ref = integrate.quad(lambda t: math.exp(mu * t) * bump1(x - t), lo, hi, epsabs=1e-15, epsrel=1e-13)[0] if hi > lo else 0.0
        got = convolve(heaviside_exp(mu), PSI, [[x]])[0]
        assert got.real == pytest.approx(ref, rel=1e-9, abs=1e-15)
