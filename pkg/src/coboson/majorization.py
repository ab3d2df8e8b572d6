"""Majorization tests for LOCC condensation of N cobosons.

N single cobosons in separate wells can be turned into the condensate
|N> by local operations and classical communication exactly when the
initial reduced spectrum is majorized by the final one.  Besides the
full prefix-sum check this module carries the cheap necessary and
sufficient conditions (first elements, purity chain, uniform target,
single crossing against a geometric law) and the level-by-level proof
table for geometric distributions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, DomainError, PauliBlockingError
from .schmidt import SchmidtDistribution, full_purity
from .spectrum import (
    CompensatedSum,
    PartitionCounter,
    SpectrumStream,
    composition_count,
    final_spectrum,
    initial_spectrum,
)
from .symfun import ChiSequence, chi_lower_chain, chi_sequence

DEFAULT_TOL = 1e-12


class Outcome(str, enum.Enum):
    MAJORIZED = "Majorized"
    VIOLATED = "Violated"
    INCONCLUSIVE = "InconclusiveAfterK"


@dataclass(frozen=True)
class MajorizationVerdict:
    """Result of the rank-synchronized prefix comparison.

    ``checked_prefixes`` is the number of leading ranks whose prefix sums
    were compared; ``violation_index`` is the 1-based first violating rank.
    """

    outcome: Outcome
    checked_prefixes: int
    violation_index: int | None = None
    gap: float | None = None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "violation_index": self.violation_index,
            "gap": self.gap,
            "checked_prefixes": self.checked_prefixes,
        }


def _certified(si: SpectrumStream, sf: SpectrumStream, tol: float) -> bool:
    """True when no later rank can produce a violation."""
    gap = sf.prefix - si.prefix
    rem_i = si.remaining_mass
    if rem_i <= gap + tol:
        return True
    blk = si.peek()
    if blk is None:
        return si.exhausted
    m_f = sf.remaining_count
    if not math.isfinite(m_f) or m_f <= 0:
        return False
    # future initial entries are at most the pending value a; the next j
    # final entries carry at least j times their average b
    a = blk[0]
    rem_f = sf.remaining_mass
    b = rem_f / m_f

    def excess(j):
        return min(j * a, rem_i) - min(j * b, rem_f) - gap

    return all(excess(j) <= tol for j in (rem_i / a, m_f)) and rem_i - rem_f - gap <= tol


def compare_streams(si: SpectrumStream, sf: SpectrumStream, max_prefixes: int = 100_000,
                    tol: float = DEFAULT_TOL) -> MajorizationVerdict:
    """Walk both streams in rank lockstep and compare prefix sums.

    Between consecutive block boundaries both prefix sums are linear in
    the rank, so checking boundaries (and solving for the first crossing
    inside a segment) covers every rank.  ``max_prefixes`` bounds the
    number of boundaries visited.
    """
    k = 0
    steps = 0
    while True:
        if _certified(si, sf, tol):
            return MajorizationVerdict(Outcome.MAJORIZED, k)
        bi = si.peek()
        if bi is None:
            if si.exhausted:
                return MajorizationVerdict(Outcome.MAJORIZED, k)
            return MajorizationVerdict(Outcome.INCONCLUSIVE, k)
        bf = sf.peek()
        if bf is None:
            if sf.truncated:
                return MajorizationVerdict(Outcome.INCONCLUSIVE, k)
            # implicit zero padding
            bf = (0.0, bi[1])
        if steps >= max_prefixes:
            return MajorizationVerdict(Outcome.INCONCLUSIVE, k)
        step = min(bi[1], bf[1])
        diff = si.prefix - sf.prefix
        slope = bi[0] - bf[0]
        if diff + step * slope > tol:
            j = 1 if diff > tol else max(1, math.floor((tol - diff) / slope) + 1)
            j = min(j, step)
            return MajorizationVerdict(Outcome.VIOLATED, k, k + j, diff + j * slope)
        si.take(step)
        sf.take(step)
        k += step
        steps += 1


def check_majorization(dist: SchmidtDistribution, n: int, max_prefixes: int = 100_000,
                       tol: float = DEFAULT_TOL, chi: ChiSequence | None = None) -> MajorizationVerdict:
    """Decide lambda_initial < lambda_final for n cobosons.

    Distributions carrying a tail are judged as the untruncated family;
    when the exact part of a stream runs out before a decision the
    verdict is InconclusiveAfterK.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    if chi is None:
        chi = chi_sequence(dist, n)
    sf = final_spectrum(dist, n, chi)
    si = initial_spectrum(dist, n)
    return compare_streams(si, sf, max_prefixes, tol)


# -- cheap tests -------------------------------------------------------------


class FirstElement(NamedTuple):
    violated: bool
    gap: float


def _need_modes(dist: SchmidtDistribution, n: int):
    if n > dist.d:
        if dist.tail_mass == 0.0:
            raise PauliBlockingError(f"{n} cobosons cannot share {dist.d} modes")
        raise DomainError(f"retain at least {n} modes of this distribution")


def first_element_test(dist: SchmidtDistribution, n: int, chi: ChiSequence,
                       tol: float = 0.0) -> FirstElement:
    """Compare the leading eigenvalues lambda_0**n and lambda_0..lambda_{n-1}/chi~_n.

    ``gap`` is the log of their ratio.  With ``tol > 0`` a violation also
    needs the linear difference to exceed ``tol``, matching the prefix
    tolerance of :func:`check_majorization`.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    _need_modes(dist, n)
    if chi.n_max < n or chi.is_zero(n):
        raise PauliBlockingError(f"chi~_{n} vanishes or was not computed")
    log_init = n * float(dist.log_lambdas[0])
    log_final = math.fsum(dist.log_lambdas[:n]) - chi.log_tilde(n)
    gap = log_init - log_final
    violated = n > 1 and gap > 0.0
    if violated and tol > 0.0:
        violated = math.exp(log_init) - math.exp(log_final) > tol
    return FirstElement(violated, gap)


@dataclass(frozen=True)
class GammaCondition:
    """Sufficient condition for failure: prod gamma_j < (1-(n-1)P)^(n-1)/n!."""

    fails_majorization: bool
    log_lhs: float
    log_rhs: float

    @property
    def lhs(self) -> float:
        return math.exp(self.log_lhs)

    @property
    def rhs(self) -> float:
        return math.exp(self.log_rhs)


def gamma_condition(dist: SchmidtDistribution, n: int, P: float | None = None) -> GammaCondition:
    """Evaluate both sides in log space.

    ``P`` defaults to the purity of the untruncated distribution.
    """
    if n < 2:
        raise DomainError("the gamma condition needs n >= 2")
    _need_modes(dist, n)
    impurity = None
    if P is None:
        # 1 - P = 2 chi~_2 / (sum lambda)^2 avoids cancellation when P -> 1
        norm2 = (math.fsum(dist.lambdas) + dist.tail_mass) ** 2
        P = full_purity(dist) / norm2
        impurity = 2.0 * float(chi_sequence(dist, 2).chi_tilde[2]) / norm2
    log_lhs = math.fsum(dist.log_lambdas[1:n] - dist.log_lambdas[0])
    bound = chi_lower_chain(P, n, impurity)
    return GammaCondition(bound.sign > 0 and log_lhs < bound.log, log_lhs, bound.log)


class UniformFinal(NamedTuple):
    sufficient: bool
    mu: float


def log_binomial(d: int, n: int) -> float:
    return math.lgamma(d + 1) - math.lgamma(n + 1) - math.lgamma(d - n + 1)


def uniform_final_test(dist: SchmidtDistribution, n: int, d: int | None = None) -> UniformFinal:
    """Sufficient condition lambda_0**n <= 1/C(d, n).

    When it holds the initial spectrum is majorized by the uniform
    distribution over the C(d, n) condensate states, which in turn is
    majorized by the actual condensate spectrum.
    """
    if d is None:
        d = dist.d
    if d < dist.d and dist.tail_mass == 0.0:
        raise DomainError(f"d={d} is smaller than the support size {dist.d}")
    if n < 1:
        raise DomainError("n must be at least 1")
    if n > d or n > dist.d:
        raise PauliBlockingError(f"{n} cobosons cannot share {min(d, dist.d)} modes")
    ok = n * float(dist.log_lambdas[0]) <= -log_binomial(d, n)
    return UniformFinal(bool(ok), n / d)


class SingleCrossing(NamedTuple):
    majorized_by_geometric: bool
    crossing_count: int


def single_crossing_test(dist: SchmidtDistribution, z: float, tol: float = 1e-12) -> SingleCrossing:
    """Sufficient test for dist < geometric(z) on the common support.

    Both vectors are normalized on the d retained modes.  A difference
    sequence that is first non-positive and then non-negative keeps every
    prefix of dist below the target's.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z!r} must lie in (0, 1)")
    d = dist.d
    x = dist.lambdas / math.fsum(dist.lambdas)
    target = (1.0 - z) * z ** np.arange(d) / -math.expm1(d * math.log(z))
    diff = x - target
    signs = np.sign(np.where(np.abs(diff) <= tol, 0.0, diff))
    nonzero = signs[signs != 0]
    crossings = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
    ok = x[0] <= target[0] + tol and crossings <= 1 and (nonzero.size == 0 or nonzero[0] < 0)
    return SingleCrossing(bool(ok), crossings)


# -- geometric proof table ---------------------------------------------------


class ProofRow(NamedTuple):
    level: int
    g_initial: int
    g_final: int
    prefix_initial: float
    prefix_final: float
    margin: float


def _level_suffixes(terms: list[float]) -> list[float]:
    """suffix[l] = sum_{j >= l} terms[j], summed smallest first."""
    out = [0.0] * (len(terms) + 1)
    acc = CompensatedSum()
    for j in range(len(terms) - 1, -1, -1):
        acc.add(terms[j])
        out[j] = acc.value
    return out


def geometric_prefix_proof(z: float, n: int, l_max: int) -> list[ProofRow]:
    """Verify majorization for the geometric family up to level ``l_max``.

    Level l of the initial spectrum holds C(l+n-1, l) entries
    (1-z)^n z^l; level l of the condensate holds p_n(l) entries (the
    partitions of l into at most n parts) scaled by
    prod_{k=1}^{n-1} sum_{j<=k} z^j.  Margins (final minus initial prefix)
    are evaluated at every block boundary as differences of suffix sums,
    which keeps them accurate when both prefixes approach 1.  Each row
    reports the smallest margin met inside that initial level.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z!r} must lie in (0, 1)")
    if n < 2:
        raise DomainError("n must be at least 2")
    if l_max < 0:
        raise DomainError("l_max must be non-negative")
    base = (1.0 - z) ** n
    factor = math.prod(sum(z ** j for j in range(k + 1)) for k in range(1, n))
    parts = PartitionCounter(n)

    def v_i(level):
        return base * z ** level

    def v_f(level):
        return base * factor * z ** level

    # how far the final stream must be resolved to reach rank K_i(l_max)
    rank_needed = math.comb(l_max + n, n)
    level_f, seen = 0, parts[0]
    while seen < rank_needed:
        level_f += 1
        seen += parts[level_f]

    def tail_terms(g, v, start):
        terms = [g(l) * v(l) for l in range(start + 1)]
        ref = terms[-1]
        l = start
        while True:
            l += 1
            t = g(l) * v(l)
            terms.append(t)
            if t < 1e-22 * ref and t < terms[-2]:
                return terms

    suf_i = _level_suffixes(tail_terms(lambda l: composition_count(l, n), v_i, l_max))
    suf_f = _level_suffixes(tail_terms(lambda l: parts[l], v_f, level_f))

    rows = []
    li, lf = 0, 0
    left_i, left_f = composition_count(0, n), parts[0]
    pre_i, pre_f = CompensatedSum(), CompensatedSum()
    worst = math.inf
    while li <= l_max:
        step = min(left_i, left_f)
        pre_i.add(step * v_i(li))
        pre_f.add(step * v_f(lf))
        left_i -= step
        left_f -= step
        margin = (left_i * v_i(li) + suf_i[li + 1]) - (left_f * v_f(lf) + suf_f[lf + 1])
        worst = min(worst, margin)
        if margin < -1e-12:
            raise ConsistencyError(f"geometric prefix margin {margin!r} at level {li} (z={z}, n={n})")
        if left_f == 0:
            lf += 1
            left_f = parts[lf]
        if left_i == 0:
            rows.append(ProofRow(li, composition_count(li, n), parts[li], pre_i.value, pre_f.value, worst))
            worst = math.inf
            li += 1
            left_i = composition_count(li, n)
    return rows
