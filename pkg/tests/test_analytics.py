import math

import mpmath
import numpy as np
import pytest

from aqec_lab import analytics as an
from aqec_lab.errors import ParameterError, UnsupportedError
from aqec_lab.noise import AmplitudeDamping, Depolarizing, ErasureFixedT, ErasureIID, PauliIID, PauliVec, ZZCoupling


def test_entropies():
    assert an.binary_entropy(0.5) == 1.0
    assert an.binary_entropy(0.0) == 0.0
    assert an.relative_entropy_bits(0.4, 0.25) == pytest.approx(
        0.4 * math.log2(0.4 / 0.25) + 0.6 * math.log2(0.6 / 0.75))
    assert an.relative_entropy_bits(0.3, 0.3) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ParameterError):
        an.relative_entropy_bits(0.3, 0.0)


def test_f_and_h_of_noiseless_and_uniform():
    assert an.f_of_p(PauliVec(1, 0, 0, 0)) == 0.0
    assert an.h_of_p(PauliVec(1, 0, 0, 0)) == 0.0
    assert an.f_of_p(PauliVec(0.25, 0.25, 0.25, 0.25)) == pytest.approx(2.0)
    assert an.h_of_p(PauliVec(0.25, 0.25, 0.25, 0.25)) == pytest.approx(2.0)


def test_renyi_half_dominates_shannon():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.dirichlet(np.ones(4))
        pv = PauliVec(*v)
        assert an.f_of_p(pv) >= an.h_of_p(pv) - 1e-12


def test_achievable_rates():
    assert an.achievable_rate(ErasureIID(0.1)) == pytest.approx(1 - math.log2(1.3))
    assert an.achievable_rate(ErasureIID(0.1), "smooth") == pytest.approx(0.8)
    assert an.achievable_rate(ErasureFixedT(10), n=100) == pytest.approx(1 - math.log2(1.3))
    zz = an.achievable_rate(ZZCoupling(0.01))
    assert an.achievable_rate(ZZCoupling(0.01), xi=4) < zz
    assert an.achievable_rate(Depolarizing(0.0)) == 1.0
    with pytest.raises(UnsupportedError):
        an.achievable_rate(ErasureFixedT(3), "smooth", n=10)
    with pytest.raises(UnsupportedError):
        an.achievable_rate(ZZCoupling(0.1), "smooth")


def test_amplitude_damping_rates_reference():
    mpmath.mp.dps = 30
    p = mpmath.mpf("0.2")
    want = -mpmath.log(1 / (2 - p) + mpmath.sqrt(p / (2 - p)), 2)
    assert an.achievable_rate(AmplitudeDamping(0.2)) == pytest.approx(float(want), rel=1e-13)
    assert an.achievable_rate(AmplitudeDamping(0.0)) == pytest.approx(1.0)
    assert an.achievable_rate(AmplitudeDamping(0.0), "smooth") == pytest.approx(1.0)


def test_clifford_singleton_bound():
    rep = an.clifford_baseline(ErasureFixedT(12), 40, 8)
    assert rep.value == pytest.approx(0.25)
    assert rep.formula_id == "clifford/erasure-fixed/nonsmooth"
    bad = an.clifford_baseline(ErasureFixedT(20), 40, 8)
    assert bad.warnings and bad.vacuous


def test_double_layer_bound_decreases_with_n():
    vals = [an.choi_upper_bound("double-layer", ErasureIID(0.05), n, n // 4, 1 / n).value for n in (64, 256, 1024, 4096)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_bound_terms_combine():
    rep = an.choi_upper_bound("double-layer", Depolarizing(0.01), 1000, 100, 0.01)
    terms = rep.log2_terms
    assert rep.value == pytest.approx(math.sqrt(math.sqrt(2 ** terms["exponential"] + 2 ** terms["approximation"])))
    assert rep.to_dict()["formula_id"] == "double-layer/depolarizing/nonsmooth"


def test_rate_violation_is_reported():
    rep = an.choi_upper_bound("double-layer", ErasureIID(0.25), 240, 48, 240 ** -0.375)
    assert any("rate condition" in w for w in rep.warnings)
    assert rep.rate == pytest.approx(1 - math.log2(1.75))


def test_bound_saturates_when_rate_condition_fails():
    rep = an.choi_upper_bound("double-layer", ErasureIID(0.25), 10 ** 12, 2 * 10 ** 11, 1e-3)
    assert rep.value == math.inf and rep.vacuous


def test_smooth_bound_needs_delta():
    with pytest.raises(ParameterError):
        an.choi_upper_bound("double-layer", ErasureIID(0.1), 100, 10, 0.1, regime="smooth")
    rep = an.choi_upper_bound("double-layer", ErasureIID(0.1), 100, 10, 0.1, delta=0.01, regime="smooth")
    assert rep.value >= math.sqrt(0.08)


def test_block_has_no_upper_bound():
    with pytest.raises(UnsupportedError):
        an.choi_upper_bound("block", ErasureIID(0.1), 100, 10, 0.1)


def test_exponents_for_block_comparison():
    assert round(an.block_poly_exponent(0.2, 0.25, 0.375), 2) == 0.14
    assert an.double_layer_poly_exponent(0.2, 0.375) == pytest.approx(-0.025)
    fit = an.fitted_exponent(lambda n: an.block_lower_bound(n, n // 5, n ** -0.375, 0.25).term_poly, 1e3, 1e6)
    assert fit == pytest.approx(an.block_poly_exponent(0.2, 0.25, 0.375), rel=1e-9)


def test_block_lower_bound_constant_term():
    lb = an.block_lower_bound(240, 48, 240 ** -0.375, 0.25, xi=12)
    m = 240 / 48
    assert lb.term_const == pytest.approx((1 - (1 - 1 / m) ** m) / math.sqrt(2))
    with pytest.raises(ParameterError):
        an.block_lower_bound(100, 60, 0.1, 0.25)


def test_f_ave_relation():
    assert an.f_ave_from_choi(1.0, 3) == pytest.approx(1.0)
    # completely depolarizing on one qubit: F_e^2 = 1/4, F_ave = 1/2
    assert an.f_ave_from_choi(0.5, 1) ** 2 == pytest.approx(0.5)


def test_decoupling_noiseless_single_pair():
    assert an.decoupling_rhs("double-layer", [math.inf] * 2, [math.inf] * 2, 4, 2) == 0.0
    val = an.decoupling_rhs("double-layer", [1, 1, 1, 1], [1, 1, 1, 1], 8, 2)
    # 2 eta = 8/17, rho = 2, N = 2: c = 2 * (16/17); the product term is 1
    assert val == pytest.approx(math.sqrt(2 ** -8 + 32 / 17))


def test_depth_formula():
    assert an.depth_formula("double-layer", 256, 32, 1.0) == 8
    assert an.depth_formula("clifford", 40, 8, 1.0) == 40
    with pytest.raises(ParameterError):
        an.depth_formula("other", 4, 1, 1.0)


def test_curves_and_threshold():
    grid = an.default_grid()
    assert len(grid) == 61 and grid[0] == 0.0 and grid[-1] == 0.6
    table = an.emit_rate_curves(grid)
    assert table.shape == (61, len(an.CURVE_COLUMNS))
    assert np.all(table[:, 1:] >= 0)
    assert np.all(table[0, 1:] == 1.0)
    root = an.hashing_threshold()
    assert root == pytest.approx(an.hashing_threshold("newton"), abs=1e-12)
    assert root == pytest.approx(0.2523861665536, abs=1e-10)
    with pytest.raises(ParameterError):
        an.emit_rate_curves([0.7])
