import math

import numpy as np
import pytest

from gamma_stft import convex as cg
from gamma_stft.weights import (
    CERTIFIED,
    FALSIFIED,
    SUPPORTED,
    UNDETERMINED,
    ConstantWeight,
    PolyInvWeight,
    PolyWeight,
    PowerExpWeight,
    check_L1,
    check_monotone,
    check_omega_switched,
    check_trans_inv,
    check_V,
    exp_weight_system,
    nachbin_member,
    pol_system,
    replay_omega,
    system_from_json,
    weight_from_json,
)

HALFLINE = cg.open_interval(0.0, np.inf)
SQUARE = cg.open_box([0.0, 0.0], [1.0, 1.0])
TRIANGLE = cg.HRegion([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])


def test_halfline_system_closed_form():
    W = exp_weight_system(HALFLINE, 6)
    x = np.linspace(-5, 5, 41)
    for N in W.indices:
        # K_N = [1/N, N], so h_{-K_N}(x) = -x/N for x >= 0 and N|x| for x < 0
        expect = np.where(x >= 0, np.exp(-x / N), np.exp(N * np.abs(x)))
        assert np.allclose(W[N](x), expect, rtol=1e-12)


def test_full_space_system_is_exp_norm():
    W = exp_weight_system(cg.FullSpace(2), 5)
    X = np.random.default_rng(0).normal(size=(50, 2))
    for N in W.indices:
        assert np.allclose(W[N](X), np.exp(N * np.linalg.norm(X, axis=1)))


@pytest.mark.parametrize("G", [HALFLINE, cg.FullSpace(1), SQUARE, TRIANGLE])
def test_exp_systems_are_monotone_and_certified_nested(G):
    W = exp_weight_system(G, 8)
    assert len(W.certificates) == len(W.indices) - 1
    assert check_monotone(W).verdict == SUPPORTED


def test_exp_system_index_too_small():
    with pytest.raises(ValueError, match="too small"):
        exp_weight_system(SQUARE, 1)


def test_check_V_examples():
    assert check_V(pol_system(5)).verdict == SUPPORTED
    rep = check_V(exp_weight_system(HALFLINE, 6))
    assert rep.verdict == SUPPORTED
    assert all(w["M"] == w["N"] + 1 for w in rep.witnesses)
    const = system_from_json({"family": "constant", "N_max": 4})
    rep = check_V(const)
    assert rep.verdict == FALSIFIED and rep.witnesses[0]["violation"]


def test_check_V_rejects_bad_radii():
    with pytest.raises(ValueError):
        check_V(pol_system(3), radii=[1.0, 2.0])


def test_check_L1_square_and_polynomial_examples():
    assert check_L1(exp_weight_system(SQUARE, 5)).verdict == SUPPORTED
    rep = check_L1(system_from_json({"family": "poly", "N_max": 6}))
    by_N = {w["N"]: w for w in rep.witnesses}
    for N in range(1, 5):
        assert by_N[N]["M"] == N + 2 and by_N[N]["verdict"] == SUPPORTED
    # with only N + 1 available the ratio (1 + |x|)^-1 is not integrable
    assert by_N[5]["diagnostic"] == "exhausted indices"
    short = check_L1(system_from_json({"family": "poly", "N_max": 2}))
    assert short.verdict == UNDETERMINED


def test_check_L1_value_on_halfline():
    rep = check_L1(exp_weight_system(HALFLINE, 4))
    w = rep.witnesses[0]
    # int_0^inf e^{-x(1/N - 1/M)} dx + int_0^inf e^{-(M - N) x} dx
    N, M = w["N"], w["M"]
    assert w["integral"] == pytest.approx(1 / (1 / N - 1 / M) + 1 / (M - N), rel=1e-9)


def test_trans_inv_exponential_certified_and_subadditive():
    for G in (HALFLINE, SQUARE):
        W = exp_weight_system(G, 5)
        rep = check_trans_inv(W)
        assert rep.verdict == CERTIFIED and all(w["C"] == 1.0 for w in rep.witnesses)
        assert rep.diagnostics["sampled_max_log_excess"] <= 1e-10
        rng = np.random.default_rng(9)
        X, Y = rng.normal(size=(10_000, W.dim)) * 5, rng.normal(size=(10_000, W.dim)) * 5
        for N in W.indices:
            assert np.all(W[N](X + Y) <= W[N](X) * W[N](Y) * (1 + 1e-10))


def test_trans_inv_polynomial_and_constant():
    rep = check_trans_inv(system_from_json({"family": "poly", "N_max": 4}))
    assert rep.verdict == SUPPORTED
    for w in rep.witnesses:
        assert (w["M1"], w["M2"]) == (w["N"], w["N"])
        assert w["C"] <= 2 ** w["N"]
    assert check_trans_inv(system_from_json({"family": "constant", "N_max": 3})).verdict == CERTIFIED
    with pytest.raises(ValueError):
        check_trans_inv(pol_system(2), n_samples=10)


@pytest.mark.parametrize("G", [HALFLINE, cg.FullSpace(1), SQUARE, TRIANGLE])
def test_omega_geometric_certificates(G):
    W = exp_weight_system(G, 8)
    rep = check_omega_switched(W)
    assert rep.verdict == CERTIFIED
    for w in rep.witnesses:
        assert all(row["C"] == 1.0 for row in w["per_P"])
        assert replay_omega(W, w) == 0


def test_omega_halfline_interval_oracle():
    W = exp_weight_system(HALFLINE, 12)
    for N in (1, 2, 3):
        M = 2 * N
        for P in range(M + 1, 13):
            th = min(0.5, N / (P - N))
            # endpoint arithmetic for (1 - th)[1/N, N] + th [1/P, P] inside [1/M, M]
            assert (1 - th) / N + th / P >= 1 / M - 1e-15
            assert (1 - th) * N + th * P <= M + 1e-12
            comb = cg.MinkowskiSum((cg.Scaled(1 - th, W.bodies[N]), cg.Scaled(th, W.bodies[P])))
            assert cg.contains(comb, W.bodies[M]).certified


def test_omega_exp_norm_as_user_system():
    S = system_from_json({"family": "exp_norm", "N_max": 6})
    rep = check_omega_switched(S)
    assert rep.verdict == SUPPORTED
    for w in rep.witnesses:
        for row in w["per_P"]:
            assert row["theta"] <= (w["M"] - w["N"]) / (row["P"] - w["N"]) + 1e-12
            assert row["C"] == pytest.approx(1.0)
        assert replay_omega(S, w) == 0


def test_omega_power_exp_negative_control():
    rep = check_omega_switched(system_from_json({"family": "power_exp", "N_max": 6}))
    assert rep.verdict == FALSIFIED
    assert rep.diagnostics["divergence"]


def test_omega_grid_validation():
    with pytest.raises(ValueError):
        check_omega_switched(pol_system(3), theta_grid=[])
    with pytest.raises(ValueError):
        check_omega_switched(exp_weight_system(HALFLINE, 4), P_max=9)


def test_nachbin_examples():
    V = pol_system(5)
    assert nachbin_member(PolyInvWeight(8), V).verdict == SUPPORTED
    assert nachbin_member(PolyWeight(1), V).verdict == FALSIFIED
    v0 = ConstantWeight(1.0) / PowerExpWeight(1.0)
    assert nachbin_member(v0 * PolyWeight(2), V).verdict == SUPPORTED


def test_weight_json_round_trip():
    w = (PolyWeight(2) * weight_from_json({"type": "exp_support", "body": {"type": "ball", "center": [0.0], "radius": 1.5}})) / PolyInvWeight(1)
    x = np.linspace(-3, 3, 13)
    assert np.allclose(weight_from_json(w.to_json())(x), w(x))
    with pytest.raises(ValueError):
        weight_from_json({"type": "nope"})


def test_system_json():
    S = system_from_json({"family": "exponential", "region": {"type": "open_interval", "lo": 0.0}, "N_max": 4})
    assert S.origin == "exponential" and S.indices == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        system_from_json({"family": "unknown"})
    assert math.isclose(system_from_json({"weights": [{"type": "poly", "k": 1}], "N_max": 1})[1](np.array([1.0]))[0], 2.0)
