"""Acceptance criteria, one check and one printed PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py`` for the bare report.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from coboson import fock_oracle as fo
from coboson.majorization import (
    Outcome,
    check_majorization,
    first_element_test,
    gamma_condition,
    geometric_prefix_proof,
    uniform_final_test,
)
from coboson.schmidt import (
    full_purity,
    geometric_for_tail,
    purity,
    purity_closed_form,
    random_distribution,
    uniform_family,
    zeta_family,
)
from coboson.symfun import (
    chi_sequence,
    departure_expectation,
    elementary_symmetric,
    epsilon_norm,
    f_bounds,
    f_ratio,
    f_series_approx,
)
from conftest import ACCEPTANCE_LINES
from oracles import geometric_chi_mp, zeta_mp, zeta_tail_mp

pytestmark = pytest.mark.acceptance
PI2_6 = math.pi ** 2 / 6


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@contextmanager
def timer():
    box = {}
    t0 = time.perf_counter()
    yield box
    box["t"] = time.perf_counter() - t0


def random_dists(seed, count, d_max):
    rng = np.random.default_rng(seed)
    return [random_distribution(rng, int(rng.integers(1, d_max + 1))) for _ in range(count)]


def test_1_universal_n2_identity():
    dists = random_dists(101, 1000, 64)
    with timer() as t:
        worst = 0.0
        for dist in dists:
            chi = elementary_symmetric(dist, 2)
            worst = max(worst, abs(f_ratio(chi, 2) - (1.0 - purity(dist))))
    ok = worst <= 1e-12 and t["t"] < 1.0
    assert report(1, ok, f"max |F_2-(1-P)| = {worst:.2e} (<= 1e-12), {t['t']:.2f}s (< 1s)")


def test_2_purity_bounds():
    dists = random_dists(102, 500, 64)
    with timer() as t:
        worst = -math.inf
        checks = 0
        for dist in dists:
            P = purity(dist)
            top = min(dist.d - 1, 20)
            chi = elementary_symmetric(dist, top + 1)
            for n in range(1, top + 1):
                r = f_ratio(chi, n + 1)
                lo, hi = f_bounds(P, n)
                worst = max(worst, lo - r, r - hi)
                checks += 1
    ok = worst <= 1e-12 and t["t"] < 5.0
    assert report(2, ok, f"{checks} ratios, worst bound excess {worst:.2e} (<= 1e-12), {t['t']:.2f}s (< 5s)")


def test_3_geometric_closed_forms():
    refs = {(z, n): float(geometric_chi_mp(z, n)) for z in (0.3, 0.7, 0.95) for n in range(11)}
    with timer() as t:
        worst_chi = worst_dp = worst_p = 0.0
        tails = []
        for z in (0.3, 0.7, 0.95):
            g = geometric_for_tail(z, 1e-14)
            tails.append(g.tail_mass)
            chi = chi_sequence(g, 10)
            dp = elementary_symmetric(geometric_for_tail(z, 1e-16), 10)
            for n in range(11):
                worst_chi = max(worst_chi, abs(chi.chi_tilde[n] / refs[z, n] - 1))
                worst_dp = max(worst_dp, abs(dp.chi_tilde[n] / refs[z, n] - 1))
            worst_p = max(worst_p, abs(purity(g) / ((1 - z) / (1 + z)) - 1))
    ok = max(tails) < 1e-14 and worst_chi <= 1e-10 and worst_p <= 1e-10 and t["t"] < 1.0
    assert report(3, ok, f"chi~ rel err {worst_chi:.1e} (plain recurrence at tail<1e-16: {worst_dp:.1e}), "
                         f"purity rel err {worst_p:.1e} (<= 1e-10), {t['t']:.2f}s (< 1s)")


def test_4_zeta_purity():
    oracle = {}
    d = 2000
    for s in (1.1, 1.5, 2.0):
        zs = zeta_mp(s)
        lam = [(j + 1) ** -s for j in range(d)]
        # direct sum over retained modes plus the high-precision tail
        oracle[s] = float((math.fsum(x * x for x in lam) + zeta_tail_mp(2 * s, d + 1)) / zs ** 2)
    with timer() as t:
        worst = 0.0
        for s in (1.1, 1.5, 2.0):
            dist = zeta_family(s, d)
            closed = purity_closed_form(dist)
            worst = max(worst, abs(closed / oracle[s] - 1), abs(full_purity(dist) / closed - 1))
        eps = 0.05
        P = purity_closed_form(zeta_family(1 + eps, 10))
        approx_err = abs(P - PI2_6 * eps ** 2) / P
    ok = worst <= 1e-6 and approx_err <= 0.2 and t["t"] < 5.0
    assert report(4, ok, f"zeta purity rel err {worst:.1e} (<= 1e-6); eps=0.05 approximation "
                         f"rel err {approx_err:.3f} (<= 0.2), {t['t']:.2f}s (< 5s)")


def test_5_counterexample():
    eps, N = 0.02, 20
    with timer() as t:
        dist = zeta_family(1 + eps, 10_000)
        chi = chi_sequence(dist, N)
        first = first_element_test(dist, N, chi)
        gamma = gamma_condition(dist, N)
        fn = f_ratio(chi, N)
        bound = 1 - PI2_6 * N * eps ** 2
    ok = first.violated and first.gap > 0 and gamma.fails_majorization and fn >= bound and t["t"] < 10.0
    assert report(5, ok, f"log gap {first.gap:.3f} > 0, gamma lhs {gamma.log_lhs:.2f} < rhs {gamma.log_rhs:.2f} "
                         f"(log), F_N = {fn:.5f} >= {bound:.5f}, {t['t']:.2f}s (< 10s)")


def test_6_geometric_majorization():
    with timer() as t:
        verdicts = []
        min_margin = math.inf
        for z in (0.5, 0.9, 0.99):
            g = geometric_for_tail(z, 1e-12)
            for n in (2, 3, 4, 5):
                verdicts.append(check_majorization(g, n, tol=1e-12).outcome)
                rows = geometric_prefix_proof(z, n, 64)
                min_margin = min(min_margin, min(r.margin for r in rows))
    majorized = sum(v is Outcome.MAJORIZED for v in verdicts)
    ok = majorized == 12 and min_margin >= 0 and t["t"] < 30.0
    assert report(6, ok, f"{majorized}/12 Majorized, min proof margin {min_margin:.2e} (>= 0), "
                         f"{t['t']:.2f}s (< 30s)")


def test_7_sufficient_condition_ordering():
    rng = np.random.default_rng(107)
    dists = []
    for _ in range(500):
        # spread concentrations wide so both premises fire
        dists.append(random_distribution(rng, int(rng.integers(1, 11)), 10.0 ** rng.uniform(-1.5, 1.5)))
    with timer() as t:
        bad = uniform_hits = gamma_hits = 0
        for dist in dists:
            chi = elementary_symmetric(dist, min(dist.d, 4))
            for n in range(1, min(dist.d, 4) + 1):
                verdict = check_majorization(dist, n, chi=chi).outcome
                if uniform_final_test(dist, n).sufficient:
                    uniform_hits += 1
                    bad += verdict is not Outcome.MAJORIZED
                if n >= 2 and gamma_condition(dist, n).fails_majorization:
                    gamma_hits += 1
                    first = first_element_test(dist, n, chi, 1e-12)
                    bad += not first.violated or verdict is not Outcome.VIOLATED
    ok = bad == 0 and t["t"] < 30.0
    assert report(7, ok, f"{bad} counterexamples ({uniform_hits} uniform-final, {gamma_hits} gamma premises), "
                         f"{t['t']:.2f}s (< 30s)")


def test_8_fock_oracle():
    dists = random_dists(108, 200, 6)
    with timer() as t:
        worst = worst_res = 0.0
        cases = 0
        for dist in dists:
            chi = elementary_symmetric(dist, 4)
            for n in range(1, min(dist.d, 3) + 1):
                _, chi_fock = fo.number_state(dist, n)
                ann = fo.verify_annihilation(dist, n)
                delta = fo.commutator_expectation(dist, n)
                diffs = (
                    abs(chi_fock / (math.factorial(n) * chi.chi_tilde[n]) - 1),
                    abs(ann.eps_norm - epsilon_norm(chi, n)),
                    abs(delta - departure_expectation(chi, n)),
                    abs(ann.alpha - math.sqrt(f_ratio(chi, n))),
                )
                worst = max(worst, *diffs)
                worst_res = max(worst_res, ann.orthogonality_residual)
                cases += 1
    ok = worst <= 1e-10 and worst_res <= 1e-12 and t["t"] < 60.0
    assert report(8, ok, f"{cases} cases, max diff {worst:.1e} (<= 1e-10), orthogonality {worst_res:.1e} "
                         f"(<= 1e-12), {t['t']:.2f}s (< 60s)")


def test_9_series_order():
    z, N = 0.99, 10
    with timer() as t:
        g = geometric_for_tail(z, 1e-12)
        chi = chi_sequence(g, N + 1)
        P = full_purity(g)
        diff = abs(f_ratio(chi, N) - f_series_approx(g, N))
        bound = 50 * N ** 3 * P ** 3
    ok = diff <= bound and t["t"] < 1.0
    assert report(9, ok, f"|F_N - series| = {diff:.2e} <= 50 N^3 P^3 = {bound:.2e}, {t['t']:.2f}s (< 1s)")


def test_10_uniform_saturation():
    with timer() as t:
        worst = 0.0
        for d in range(1, 101):
            dist = uniform_family(d)
            chi = elementary_symmetric(dist, d)
            for N in range(1, d):
                r = f_ratio(chi, N + 1)
                lo, _ = f_bounds(1 / d, N)
                worst = max(worst, abs(r - (d - N) / d), abs(r - lo))
    ok = worst <= 1e-12
    assert report(10, ok, f"max deviation from (d-N)/d and 1-N/d: {worst:.1e} (<= 1e-12), {t['t']:.2f}s")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
