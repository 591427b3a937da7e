import math

import numpy as np
import pytest
from scipy import integrate

from gamma_stft import convex as cg
from gamma_stft.distributions import TestDistribution, delta, heaviside_exp
from gamma_stft.functions import Poly, SchwartzTestFunction, Window
from gamma_stft.seminorms import (
    GuardError,
    Ladder,
    adjoint_bound_suite,
    adjoint_constant,
    convolutor_suite,
    gamma_membership,
    lemma1_constant,
    lemma1_suite,
    lemma2_constant,
    lemma2_sup_constant,
    lemma2_suite,
    membership_ladder,
    p_seminorm,
    schwartz_norm,
    tensor_membership_scan,
    tf_weighted_norm,
    trend_verdict,
    weighted_cn_norm,
)
from gamma_stft.stft import DEFAULT_GRID, GridSpec, TimeFrequencyField, stft
from gamma_stft.weights import ConstantWeight, PolyInvWeight, PolyWeight, PowerExpWeight, exp_weight_system, pol_system, system_from_json

PSI = Window(1.0, 1)
GAUSS = SchwartzTestFunction(sigma=1.0, dim=1)
HALF = cg.open_interval(0.5, np.inf)


def test_schwartz_norm_closed_forms():
    assert schwartz_norm(GAUSS, 0, 0) == pytest.approx(1.0)
    # sup |t e^{-t^2}| = e^{-1/2} / sqrt 2 ; sup |d/dt e^{-t^2}| is the same
    assert schwartz_norm(GAUSS, 1, 0) == pytest.approx(max((1 + t) * math.exp(-t * t) for t in np.linspace(0, 3, 300001)), rel=1e-10)
    assert schwartz_norm(SchwartzTestFunction(Poly.coordinate(0, 1), 1.0), 0, 0) == pytest.approx(math.exp(-0.5) / math.sqrt(2), rel=1e-10)


def test_norms_of_window():
    assert weighted_cn_norm(PSI, ConstantWeight(1.0), 0) == pytest.approx(math.exp(-1))
    assert schwartz_norm(PSI, 0, 2) == pytest.approx(PSI.max_sup_norm(2), rel=1e-6)


def test_norm_guard_on_slowly_decaying_function():
    with pytest.raises(GuardError, match="enlarge box"):
        # exp(|t|^2) cancels the Gaussian decay, so no box is large enough
        weighted_cn_norm(GAUSS, PowerExpWeight(2.0), 0)


def test_p_seminorm_against_oracle():
    f = heaviside_exp(1.0)
    # sup over eta in [2, 3] of int_0^inf e^{(1 - eta) t} e^{-t^2} dt is reached at eta = 2
    ref = integrate.quad(lambda t: math.exp(-t - t * t), 0, np.inf)[0]
    assert p_seminorm(f, cg.interval(2.0, 3.0), [GAUSS]) == pytest.approx(ref, rel=1e-9)
    assert p_seminorm(f, cg.interval(2.0, 3.0), []) == 0.0
    with pytest.raises(ValueError, match="outside"):
        p_seminorm(f, cg.interval(0.5, 3.0), [GAUSS])


def test_tf_weighted_norm_of_zero_and_delta():
    g = GridSpec.symmetric(2.0, 4.0, 9, 9)
    assert tf_weighted_norm(TimeFrequencyField(g, np.zeros((9, 9))), cg.point([0.0]), ConstantWeight(1.0)) == 0.0
    F = stft(delta(0.0), PSI, g)
    assert tf_weighted_norm(F, cg.point([0.0]), ConstantWeight(1.0)) == pytest.approx(math.exp(-1), rel=1e-12)


def test_trend_verdicts():
    assert trend_verdict([1, 2, 2.05]) == "bounded"
    assert trend_verdict([1, 2, 4, 8]) == "diverging"
    assert trend_verdict([1, 1.2, 1.4]) == "inconclusive"
    assert trend_verdict([0, 0, 0]) == "bounded"
    with pytest.raises(ValueError):
        trend_verdict([1, 2])
    with pytest.raises(ValueError):
        Ladder(levels=2)


@pytest.mark.parametrize("K", [cg.point([0.0]), cg.interval(-1.0, 2.0)])
@pytest.mark.parametrize("k,n", [(0, 0), (2, 1), (1, 2)])
def test_lemma1_bound_holds(K, k, n):
    rep = lemma1_suite(PSI, K, 0.7, PolyInvWeight(2), k, n)
    assert rep.passed and 0 < rep.max_ratio <= 1


def test_lemma1_is_linear_in_window():
    K = cg.interval(0.0, 1.0)
    a = lemma1_suite(PSI, K, 1.0, PolyInvWeight(2), 1, 1)
    b = lemma1_suite(PSI.scaled(2.0), K, 1.0, PolyInvWeight(2), 1, 1)
    assert b.max_ratio == pytest.approx(a.max_ratio, rel=1e-12)
    assert lemma1_constant(PSI.scaled(2.0), K, 1.0, PolyInvWeight(2), 1, 1)["C"] == pytest.approx(2 * lemma1_constant(PSI, K, 1.0, PolyInvWeight(2), 1, 1)["C"])


def test_lemma1_rejects_non_nachbin_weight():
    with pytest.raises(ValueError, match="Nachbin"):
        lemma1_constant(PSI, cg.point([0.0]), 1.0, PolyWeight(1), 0, 1)


def test_lemma2_constant_example_and_sup_bound():
    assert lemma2_constant(PSI, [0.0], 0, 0) == pytest.approx(2 * math.exp(-1), rel=1e-10)
    K = cg.interval(-1.0, 1.0)
    top = lemma2_sup_constant(PSI, K, 1, 2)
    for eta in np.linspace(-1, 1, 9):
        assert lemma2_constant(PSI, [eta], 1, 2) <= top * (1 + 1e-12)


def test_lemma2_bound_holds_for_tilted_gaussian():
    reps = lemma2_suite(PSI, [0.5], [0, 2], [0, 2], GAUSS)
    assert len(reps) == 4
    assert all(r.passed for r in reps)
    assert max(r.max_ratio for r in reps) > 1e-6


def test_lemma2_grid_guard():
    with pytest.raises(GuardError, match="grid too small"):
        lemma2_suite(PSI, [0.0], [0], [0], GAUSS, grid=GridSpec.symmetric(2.0, 4.0, 9, 9))


def test_gamma_membership_halfline_exponential():
    out = gamma_membership(heaviside_exp(0.5), HALF, PSI, PolyInvWeight(2), N_max=3)
    assert out["passed"]
    for row in out["rows"]:
        assert row["sampled_norm"] <= row["proof_bound"]


def test_gamma_membership_negative_control_and_precondition():
    v = PolyInvWeight(2)
    assert membership_ladder(heaviside_exp(0.5), cg.interval(0.1, 0.4), PSI, v).trend == "diverging"
    with pytest.raises(ValueError, match="not inside"):
        gamma_membership(heaviside_exp(0.5), cg.open_interval(0.0, np.inf), PSI, v, N_max=3)


def test_gamma_membership_of_zero():
    out = gamma_membership(TestDistribution((), 1), cg.FullSpace(1), PSI, PolyInvWeight(2), N_max=2)
    assert out["passed"] and all(r["sampled_norm"] == 0 for r in out["rows"])


def test_adjoint_constant_closed_forms():
    eps = 0.5
    assert adjoint_constant(1, eps) == pytest.approx(2 / eps * 2)
    assert adjoint_constant(2, eps) == pytest.approx(2 * math.pi / eps**2 * math.pi)
    assert adjoint_constant(3, eps) == pytest.approx(8 * math.pi / eps**3 * 4 * math.pi / 3)
    ref = integrate.quad(lambda r: 2 * math.pi * r * math.exp(-eps * r), 0, np.inf)[0] * integrate.quad(lambda r: 2 * math.pi * r / (1 + r) ** 3, 0, np.inf)[0]
    assert adjoint_constant(2, eps) == pytest.approx(ref, rel=1e-8)


def test_adjoint_bound_for_delta_field():
    F = stft(delta(0.0), PSI, DEFAULT_GRID)
    rep = adjoint_bound_suite(F, cg.FullSpace(1), PSI, 1, 0.5, B=[GAUSS], eta_samples=2)
    assert rep.passed and rep.details["lhs"] > 0


def test_adjoint_rejects_large_eps():
    F = TimeFrequencyField(DEFAULT_GRID, np.zeros((DEFAULT_GRID.n_x, DEFAULT_GRID.n_xi)))
    with pytest.raises(ValueError, match="eps too large"):
        adjoint_bound_suite(F, HALF, PSI, 3, 0.5)
    assert adjoint_bound_suite(F, cg.FullSpace(1), PSI, 1, 0.5).max_ratio == 0.0


def test_tensor_scan_polynomial_growth():
    g = GridSpec.symmetric(16.0, 64.0, 33, 257)
    F = TimeFrequencyField(g, np.ones((g.n_x, 1)) * (1 + np.abs(g.xi_nodes()[:, 0]))[None, :] ** 3)
    out = tensor_membership_scan(F, system_from_json({"family": "constant", "N_max": 2}), pol_system(6))
    assert [row["n"] for row in out.table] == [3, 3]


def test_convolutor_halfline():
    f = heaviside_exp(0.5)
    assert convolutor_suite(f, [PSI], exp_weight_system(HALF, 4)).trend == "bounded"
    wrong = exp_weight_system(cg.open_interval(0.0, np.inf), 4)
    assert convolutor_suite(f, [PSI], wrong, require_membership=False).trend == "diverging"
    with pytest.raises(ValueError):
        convolutor_suite(f, [PSI], wrong)
