"""Normalization factors chi_N of N-coboson states and derived quantities.

chi~_N is the N-th elementary symmetric polynomial of the Schmidt
coefficients and chi_N = N! chi~_N.  Two independent numerical routes are
provided: a one-pass recurrence (authoritative) and Newton's identities
from power sums (cross-check, prone to cancellation).

Values are held as mantissa/exponent pairs, ``chi~ = m * 2**e``; chi~_N
underflows doubles long before the ratios chi_{N+1}/chi_N leave O(1).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, UndefinedRatioError
from .schmidt import SchmidtDistribution, power_sum

_NO_EXP = np.iinfo(np.int64).min // 4
CANCELLATION_WARN = 1e12
LN2 = math.log(2.0)


class CancellationWarning(RuntimeWarning):
    pass


def _normalize(m: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    frac, shift = np.frexp(m)
    e = np.where(frac == 0.0, _NO_EXP, e + shift)
    return frac, e


@dataclass(frozen=True, eq=False)
class ChiSequence:
    """chi~_0 ... chi~_{n_max} in scaled form ``mantissa * 2**exponent``.

    ``source`` records the route: ``dp``, ``dp+tail``, ``newton`` or
    ``oracle``.  For the Newton route ``cancellation`` holds, per order, the
    largest partial-sum magnitude divided by the result magnitude.
    """

    mantissa: np.ndarray
    exponent: np.ndarray
    source: str
    cancellation: np.ndarray | None = None

    @classmethod
    def from_values(cls, values, source: str, cancellation=None) -> "ChiSequence":
        m, e = _normalize(np.asarray(values, dtype=float), np.zeros(len(values), dtype=np.int64))
        return cls(m, e, source, cancellation)

    @property
    def n_max(self) -> int:
        return len(self.mantissa) - 1

    @property
    def chi_tilde(self) -> np.ndarray:
        """Plain floating values of chi~ (may underflow to 0)."""
        e = np.clip(self.exponent, -2000, 2000)
        return np.ldexp(self.mantissa, e.astype(np.int32))

    def _check(self, n: int):
        if not 0 <= n <= self.n_max:
            raise DomainError(f"order {n} outside computed range 0..{self.n_max}")

    def is_zero(self, n: int) -> bool:
        self._check(n)
        return self.mantissa[n] == 0.0

    def sign(self, n: int) -> int:
        self._check(n)
        return int(np.sign(self.mantissa[n]))

    def log_tilde(self, n: int) -> float:
        """ln|chi~_n|; -inf when chi~_n = 0."""
        self._check(n)
        m = self.mantissa[n]
        if m == 0.0:
            return -math.inf
        return math.log(abs(m)) + int(self.exponent[n]) * LN2

    def log_chi(self, n: int) -> float:
        return math.lgamma(n + 1) + self.log_tilde(n)

    def tilde_ratio(self, a: int, b: int) -> float:
        """chi~_a / chi~_b without leaving the scaled representation."""
        self._check(a)
        self._check(b)
        if self.mantissa[b] == 0.0:
            raise UndefinedRatioError(f"chi~_{b} = 0")
        if self.mantissa[a] == 0.0:
            return 0.0
        return math.ldexp(float(self.mantissa[a] / self.mantissa[b]),
                          int(self.exponent[a] - self.exponent[b]))

    def ratio(self, n: int) -> float:
        """chi_n / chi_{n-1} = n chi~_n / chi~_{n-1}."""
        return n * self.tilde_ratio(n, n - 1)


def _dp_scaled(lam: np.ndarray, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.zeros(n_max + 1)
    e = np.full(n_max + 1, _NO_EXP, dtype=np.int64)
    m[0], e[0] = 0.5, 1
    if n_max == 0:
        return m, e
    for x in lam:
        # e_k <- e_k + x e_{k-1}, aligned to the larger exponent
        top = np.maximum(e[1:], e[:-1])
        a = np.ldexp(m[1:], np.maximum(e[1:] - top, -1100).astype(np.int32))
        b = np.ldexp(x * m[:-1], np.maximum(e[:-1] - top, -1100).astype(np.int32))
        new_m, new_e = _normalize(a + b, top)
        m[1:], e[1:] = new_m, new_e
    return m, e


def elementary_symmetric(dist: SchmidtDistribution, n_max: int) -> ChiSequence:
    """chi~_0..chi~_{n_max} of the retained modes by the one-pass recurrence.

    O(d * n_max); orders beyond d come out exactly zero.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    m, e = _dp_scaled(dist.lambdas, n_max)
    return ChiSequence(m, e, "dp")


def _newton(power_sums: list[float], n_max: int) -> tuple[list[float], list[float]]:
    """Signed Newton identities n e_n = sum_j (-1)^(j-1) p_j e_{n-j}."""
    e = [1.0]
    indicator = [1.0]
    for n in range(1, n_max + 1):
        acc = 0.0
        biggest = 0.0
        for j in range(1, n + 1):
            term = power_sums[j] * e[n - j]
            acc = acc + term if j % 2 else acc - term
            biggest = max(biggest, abs(acc), abs(term))
        e.append(acc / n)
        indicator.append(biggest / abs(acc) if acc != 0.0 else math.inf)
    return e, indicator


def chi_from_newton(dist: SchmidtDistribution, n_max: int) -> ChiSequence:
    """chi~ from power sums via Newton's identities (cross-check route).

    Orders whose cancellation indicator exceeds 1e12 trigger a
    CancellationWarning; the values are still returned.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    p = [0.0] + [power_sum(dist, j) for j in range(1, n_max + 1)]
    e, indicator = _newton(p, n_max)
    worst = max(indicator)
    if worst > CANCELLATION_WARN:
        warnings.warn(
            f"Newton route lost accuracy (cancellation indicator {worst:.3g})",
            CancellationWarning,
            stacklevel=2,
        )
    return ChiSequence.from_values(e, "newton", np.array(indicator))


def tail_chi(dist: SchmidtDistribution, n_max: int) -> np.ndarray:
    """Elementary symmetric polynomials of the truncated modes only."""
    if dist.tail_mass == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if dist.family == "geometric":
        # omitted modes form the same family scaled by z**d
        z, d = dist.param, dist.d
        out = [1.0]
        for k in range(1, n_max + 1):
            out.append(out[-1] * z ** (k - 1 + d) * (1.0 - z) / (1.0 - z ** k))
        return np.array(out)
    p = [0.0] + [dist.tail_power_sum(j) for j in range(1, n_max + 1)]
    e, _ = _newton(p, n_max)
    return np.array(e)


def chi_sequence(dist: SchmidtDistribution, n_max: int) -> ChiSequence:
    """chi~ of the full (untruncated) distribution.

    Finite distributions reduce to :func:`elementary_symmetric`.  For
    geometric and zeta families the truncated modes enter through their
    own elementary symmetric polynomials, combined with the retained
    modes as a product of generating functions.
    """
    head = elementary_symmetric(dist, n_max)
    if dist.tail_mass == 0.0:
        return head
    tail = tail_chi(dist, n_max)
    m = np.zeros(n_max + 1)
    e = np.full(n_max + 1, _NO_EXP, dtype=np.int64)
    for n in range(n_max + 1):
        hm = head.mantissa[n::-1]
        he = head.exponent[n::-1]
        prod = hm * tail[: n + 1]
        live = prod != 0.0
        if not live.any():
            continue
        top = int(he[live].max())
        total = math.fsum(np.ldexp(prod[live], (he[live] - top).astype(np.int32)))
        frac, shift = math.frexp(total)
        m[n], e[n] = frac, top + shift if frac else _NO_EXP
    return ChiSequence(m, e, "dp+tail")


# -- quality indicators ----------------------------------------------------


def f_ratio(chi: ChiSequence, n: int) -> float:
    """F_n = chi_n / chi_{n-1}; zero when n cobosons are Pauli blocked."""
    if n < 1:
        raise DomainError("F_n is defined for n >= 1")
    if chi.is_zero(n - 1):
        raise UndefinedRatioError(f"chi_{n - 1} = 0: the distribution cannot host {n - 1} cobosons")
    return chi.ratio(n)


def _next_ratio(chi: ChiSequence, n: int) -> float:
    """chi_{n+1} / chi_n, with chi_n required to be nonzero."""
    if chi.is_zero(n):
        raise UndefinedRatioError(f"chi_{n} = 0: no {n}-coboson state exists")
    if n + 1 > chi.n_max:
        raise DomainError(f"need chi up to order {n + 1}, have {chi.n_max}")
    return chi.ratio(n + 1)


def f_bounds(P: float, n: int) -> tuple[float, float]:
    """Purity bounds (1 - nP, 1 - P) on chi_{n+1}/chi_n; lower may be negative."""
    if not 0.0 < P <= 1.0:
        raise DomainError("purity must lie in (0, 1]")
    if n < 1:
        raise DomainError("n must be at least 1")
    return 1.0 - n * P, 1.0 - P


def f_series_approx(dist: SchmidtDistribution, n: int) -> float:
    """Second-order power-sum expansion 1 - n P2 + n^2 (P3 - P2^2).

    The expansion is exact for uniform distributions when compared with
    chi_{n+1}/chi_n.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    p2 = power_sum(dist, 2)
    p3 = power_sum(dist, 3)
    return 1.0 - n * p2 + n * n * (p3 - p2 * p2)


def epsilon_norm(chi: ChiSequence, n: int) -> float:
    """Squared norm of the part of c|n> orthogonal to |n-1>."""
    if n < 1:
        raise DomainError("n must be at least 1")
    fn = f_ratio(chi, n)
    nxt = 0.0 if chi.is_zero(n) else _next_ratio(chi, n)
    value = 1.0 - n * fn + (n - 1) * nxt
    # the terms cancel; allow roundoff relative to their size
    if value < -1e-12 * (1.0 + n * fn):
        raise ConsistencyError(f"negative <eps|eps> = {value!r} at n={n}")
    return max(value, 0.0)


def departure_expectation(chi: ChiSequence, n: int) -> float:
    """<1 - [c, c^dagger]> in |n>, i.e. 2 (1 - chi_{n+1}/chi_n)."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return 2.0 * (1.0 - _next_ratio(chi, n))


def number_expectation(chi: ChiSequence, n: int) -> float:
    """<c^dagger c> in |n>."""
    return n - 0.5 * (n - 1) * departure_expectation(chi, n)


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign * exp(log)."""

    log: float
    sign: int

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log) if self.sign else 0.0

    def __float__(self):
        return self.value


def chi_lower_chain(P: float, n: int, impurity: float | None = None) -> SignedLog:
    """Chained purity bound chi~_n >= (1 - (n-1) P)^(n-1) / n!.

    Every link of the chain needs 1 - (n-1) P >= 0; past that point the
    only valid bound is 0.  ``impurity`` optionally supplies 1 - P
    computed without cancellation (e.g. 2 chi~_2 for nearly pure states).
    """
    if not 0.0 <= P <= 1.0:
        raise DomainError("purity must lie in [0, 1]")
    if n < 1:
        raise DomainError("n must be at least 1")
    if impurity is None:
        base = 1.0 - (n - 1) * P
    else:
        base = impurity - (n - 2) * P
    if n == 1:
        return SignedLog(0.0, 1)
    if base <= 0.0:
        return SignedLog(-math.inf, 0)
    return SignedLog((n - 1) * math.log(base) - math.lgamma(n + 1), 1)


@dataclass(frozen=True)
class QualityReport:
    n: int
    f_ratio: float
    alpha: float
    eps_norm: float
    departure: float
    number_exp: float
    lower_bound: float
    upper_bound: float
    series_approx: float

    def to_dict(self, family: str | None = None) -> dict:
        out = asdict(self)
        out["family"] = family
        return out


def quality_report(dist: SchmidtDistribution, chi: ChiSequence, n: int, P: float | None = None) -> QualityReport:
    """All bosonic-quality indicators for n cobosons.

    ``P`` defaults to the purity of the retained modes; pass the
    tail-corrected purity for truncated infinite families.
    """
    if P is None:
        P = power_sum(dist, 2)
    fn = f_ratio(chi, n)
    lo, hi = f_bounds(P, n)
    return QualityReport(
        n=n,
        f_ratio=fn,
        alpha=math.sqrt(fn),
        eps_norm=epsilon_norm(chi, n),
        departure=departure_expectation(chi, n),
        number_exp=number_expectation(chi, n),
        lower_bound=lo,
        upper_bound=hi,
        series_approx=f_series_approx(dist, n),
    )
