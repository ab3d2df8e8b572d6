import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coboson.errors import DomainError, UndefinedRatioError
from coboson.schmidt import (
    from_weights,
    geometric_family,
    geometric_for_tail,
    power_sum,
    purity,
    random_distribution,
    uniform_family,
    zeta_family,
)
from coboson.symfun import (
    CancellationWarning,
    ChiSequence,
    chi_from_newton,
    chi_lower_chain,
    chi_sequence,
    departure_expectation,
    elementary_symmetric,
    epsilon_norm,
    f_bounds,
    f_ratio,
    f_series_approx,
    number_expectation,
    quality_report,
)
from oracles import esym_exact, geometric_chi_mp, weights, zeta_family_chi_mp

PAIR = from_weights([0.6, 0.4])


class TestElementarySymmetric:
    def test_pair(self):
        chi = elementary_symmetric(PAIR, 3)
        assert chi.chi_tilde.tolist() == pytest.approx([1.0, 1.0, 0.24, 0.0], abs=1e-16)
        assert chi.source == "dp"
        assert chi.is_zero(3)

    def test_uniform(self):
        assert elementary_symmetric(uniform_family(4), 2).chi_tilde[2] == pytest.approx(0.375, rel=1e-15)

    def test_pauli_zero_is_exact(self):
        chi = elementary_symmetric(uniform_family(5), 9)
        assert all(chi.chi_tilde[6:] == 0.0)
        assert chi.chi_tilde[5] > 0

    def test_first_orders(self):
        g = geometric_family(0.8, 30)
        chi = elementary_symmetric(g, 2)
        assert chi.chi_tilde[0] == 1.0
        assert chi.chi_tilde[1] == pytest.approx(1 - g.tail_mass, rel=1e-15)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            elementary_symmetric(PAIR, -1)

    def test_no_underflow(self):
        # chi~_1000 of uniform(2000) is far below the double range
        chi = elementary_symmetric(uniform_family(2000), 1000)
        ref = math.lgamma(2001) - 2 * math.lgamma(1001) - 1000 * math.log(2000)
        assert chi.chi_tilde[1000] == 0.0 or ref > -745
        assert chi.log_tilde(1000) == pytest.approx(ref, rel=1e-12)
        assert f_ratio(chi, 1000) == pytest.approx(1001 / 2000, rel=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(weights, st.integers(0, 12))
    def test_against_subset_enumeration(self, raw, n):
        dist = from_weights(raw)
        got = elementary_symmetric(dist, n).chi_tilde[n]
        ref = float(esym_exact(dist.lambdas, n))
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("z", [0.3, 0.7, 0.95])
    def test_geometric_closed_form(self, z):
        g = geometric_for_tail(z, 1e-16)
        chi = elementary_symmetric(g, 10)
        for n in range(11):
            assert chi.chi_tilde[n] == pytest.approx(float(geometric_chi_mp(z, n)), rel=1e-10)


class TestNewton:
    def test_pair(self):
        chi = chi_from_newton(PAIR, 2)
        assert chi.chi_tilde[2] == pytest.approx(0.24, rel=1e-14)
        assert chi.source == "newton"

    def test_first_order(self):
        dist = random_distribution(np.random.default_rng(1), 9)
        assert chi_from_newton(dist, 1).chi_tilde[1] == pytest.approx(power_sum(dist, 1), rel=1e-15)

    def test_uniform_product(self):
        assert chi_from_newton(uniform_family(4), 4).chi_tilde[4] == pytest.approx(4.0 ** -4, rel=1e-12)

    def test_cancellation_flagged(self):
        with pytest.warns(CancellationWarning):
            chi = chi_from_newton(zeta_family(1.05, 1000), 30)
        assert chi.cancellation[30] > 1e12

    def test_route_agreement_random(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(200):
            dist = random_distribution(rng, int(rng.integers(1, 65)))
            n_max = min(16, dist.d)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", CancellationWarning)
                nw = chi_from_newton(dist, n_max)
            dp = elementary_symmetric(dist, n_max)
            for n in range(n_max + 1):
                if nw.cancellation[n] < 1e6:
                    checked += 1
                    assert nw.chi_tilde[n] == pytest.approx(dp.chi_tilde[n], rel=1e-10)
        assert checked > 500


class TestTailCorrected:
    @pytest.mark.parametrize("z,d", [(0.3, 5), (0.7, 12), (0.95, 40), (0.99, 100)])
    def test_geometric_exact_despite_truncation(self, z, d):
        g = geometric_family(z, d)
        chi = chi_sequence(g, 10)
        assert chi.source == "dp+tail"
        for n in range(11):
            assert chi.chi_tilde[n] == pytest.approx(float(geometric_chi_mp(z, n)), rel=1e-12)

    @pytest.mark.parametrize("s,d", [(1.02, 10_000), (1.5, 300), (3.0, 20)])
    def test_zeta_against_high_precision(self, s, d):
        chi = chi_sequence(zeta_family(s, d), 20)
        ref = zeta_family_chi_mp(s, 20)
        for n in range(21):
            assert chi.chi_tilde[n] == pytest.approx(float(ref[n]), rel=1e-10)

    def test_finite_is_plain_dp(self):
        assert chi_sequence(PAIR, 3).source == "dp"


class TestRatios:
    def test_n2_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            dist = random_distribution(rng, 20)
            chi = elementary_symmetric(dist, 2)
            assert abs(f_ratio(chi, 2) - (1 - purity(dist))) <= 1e-12

    @pytest.mark.parametrize("d", range(2, 9))
    def test_uniform_ratio(self, d):
        chi = elementary_symmetric(uniform_family(d), d)
        for N in range(1, d):
            exact = Fraction(N + 1) * esym_exact([1 / d] * d, N + 1) / esym_exact([1 / d] * d, N)
            assert f_ratio(chi, N + 1) == pytest.approx(float(exact), rel=1e-13)
            assert f_ratio(chi, N + 1) == pytest.approx((d - N) / d, rel=1e-13)

    def test_pauli(self):
        chi = elementary_symmetric(PAIR, 4)
        assert f_ratio(chi, 3) == 0.0
        with pytest.raises(UndefinedRatioError):
            f_ratio(chi, 4)
        with pytest.raises(DomainError):
            f_ratio(chi, 0)

    def test_bounds(self):
        assert f_bounds(0.1, 5) == pytest.approx((0.5, 0.9))
        assert f_bounds(1.0, 1) == (0.0, 0.0)
        d, N = 12, 5
        lo, _ = f_bounds(1 / d, N)
        assert lo == pytest.approx(f_ratio(elementary_symmetric(uniform_family(d), N + 1), N + 1), abs=1e-15)

    def test_series(self):
        assert f_series_approx(uniform_family(100), 5) == pytest.approx(0.95, abs=1e-15)
        chi = elementary_symmetric(uniform_family(100), 6)
        assert f_ratio(chi, 6) == pytest.approx(0.95, abs=1e-15)
        assert f_series_approx(uniform_family(10 ** 6), 3) == pytest.approx(1.0, abs=1e-5)


class TestExpectations:
    def test_epsilon_pair(self):
        assert epsilon_norm(elementary_symmetric(PAIR, 3), 2) == pytest.approx(0.04, abs=1e-15)

    @pytest.mark.parametrize("d", [3, 6, 10])
    def test_epsilon_uniform_vanishes(self, d):
        # closed-form ratios make every term cancel
        chi = elementary_symmetric(uniform_family(d), d + 1)
        for n in range(1, d + 1):
            assert epsilon_norm(chi, n) == pytest.approx(0.0, abs=1e-13)

    def test_epsilon_single_coboson(self):
        dist = random_distribution(np.random.default_rng(2), 6)
        assert epsilon_norm(elementary_symmetric(dist, 2), 1) == pytest.approx(0.0, abs=1e-15)

    def test_departure(self):
        assert departure_expectation(elementary_symmetric(from_weights([1.0]), 2), 1) == 2.0
        for d in (4, 7, 50):
            chi = elementary_symmetric(uniform_family(d), 2)
            assert departure_expectation(chi, 1) == pytest.approx(2 / d, rel=1e-13)
        with pytest.raises(UndefinedRatioError):
            departure_expectation(elementary_symmetric(PAIR, 4), 3)

    def test_number_expectation(self):
        dist = random_distribution(np.random.default_rng(4), 7)
        chi = elementary_symmetric(dist, 2)
        assert number_expectation(chi, 1) == 1.0
        for d in (6, 10, 30):
            chi = elementary_symmetric(uniform_family(d), 4)
            assert number_expectation(chi, 3) == pytest.approx(3 - 6 / d, rel=1e-13)

    def test_ideal_limit(self):
        chi = elementary_symmetric(uniform_family(10 ** 5), 4)
        assert departure_expectation(chi, 3) == pytest.approx(0.0, abs=1e-4)
        assert number_expectation(chi, 3) == pytest.approx(3.0, abs=1e-4)
        assert epsilon_norm(chi, 3) == pytest.approx(0.0, abs=1e-12)


class TestChainBound:
    def test_examples(self):
        assert chi_lower_chain(0.3, 1).value == 1.0
        for n in (2, 5, 30, 200):
            assert chi_lower_chain(0.0, n).log == pytest.approx(-math.lgamma(n + 1), rel=1e-14)
        g = geometric_for_tail(0.9, 1e-14)
        chi = chi_sequence(g, 4)
        assert chi_lower_chain((1 - 0.9) / 1.9, 4).value <= chi.chi_tilde[4]

    def test_clamped(self):
        assert chi_lower_chain(0.5, 4).value == 0.0


def test_quality_report_consistency():
    dist = zeta_family(1.5, 500)
    chi = chi_sequence(dist, 11)
    rep = quality_report(dist, chi, 10)
    assert rep.alpha ** 2 == pytest.approx(rep.f_ratio, rel=1e-14)
    assert 0 <= rep.f_ratio <= 1
    d = rep.to_dict(dist.family_tag)
    assert len(d) == 10 and d["family"] == "zeta(1.5)"


# -- properties ---------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(weights)
def test_purity_bounds_hold(raw):
    dist = from_weights(raw)
    chi = elementary_symmetric(dist, dist.d + 1)
    P = purity(dist)
    for n in range(1, dist.d + 1):
        ratio = f_ratio(chi, n + 1)
        lo, hi = f_bounds(P, n)
        assert lo - 1e-12 <= ratio <= hi + 1e-12
        # equality at n = 2, so the slack carries the roundoff of 1 - P
        assert chi_lower_chain(P, n).value <= chi.chi_tilde[n] + 1e-12


@settings(max_examples=100, deadline=None)
@given(weights)
def test_pauli_blocking(raw):
    dist = from_weights(raw)
    chi = elementary_symmetric(dist, dist.d + 3)
    assert np.all(chi.chi_tilde[dist.d + 1:] == 0.0)
    assert not any(chi.is_zero(n) for n in range(dist.d + 1))


@settings(max_examples=100, deadline=None)
@given(weights)
def test_expectations_in_range(raw):
    dist = from_weights(raw)
    chi = elementary_symmetric(dist, dist.d + 1)
    for n in range(1, dist.d + 1):
        assert 0.0 <= epsilon_norm(chi, n) <= 1.0 + 1e-12
        assert 0.0 <= f_ratio(chi, n) <= 1.0 + 1e-12
        assert -1e-12 <= departure_expectation(chi, n) <= 2.0 + 1e-12


def test_from_values_roundtrip():
    chi = ChiSequence.from_values([1.0, 0.5, 1e-310, 0.0], "oracle")
    assert chi.chi_tilde[2] == 1e-310 and chi.is_zero(3) and chi.source == "oracle"
