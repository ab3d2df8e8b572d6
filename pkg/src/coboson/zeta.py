"""Riemann and Hurwitz-type zeta sums for real arguments s > 1.

Partial sums are combined with an Euler-Maclaurin tail so that the
result is accurate to roughly machine precision even for s close to 1,
where the plain series converges far too slowly to be summed directly.
"""
import math

from .errors import DomainError

# B_2, B_4, ..., B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)


def _em_tail(s: float, m: int) -> float:
    """Euler-Maclaurin estimate of sum_{k >= m} k**-s (no direct terms)."""
    total = m ** (1.0 - s) / (s - 1.0) + 0.5 * m ** (-s)
    # rising factorial s (s+1) ... (s+2j-2) and (2j)!
    rising = s
    fact = 2.0
    power = m ** (-s - 1.0)
    for j, b in enumerate(_BERNOULLI, start=1):
        term = b / fact * rising * power
        total += term
        if abs(term) < 1e-18 * total:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        power /= m * m
    return total


def zeta_tail(s: float, m: int) -> float:
    """Return sum_{k=m}^{inf} k**-s for real s > 1 and integer m >= 1."""
    if not s > 1.0:
        raise DomainError(f"zeta sums diverge for s={s!r} <= 1")
    if m < 1:
        raise DomainError("tail start must be a positive integer")
    # the asymptotic expansion needs the cutoff well above s
    cutoff = max(m, 20, int(math.ceil(s)) + 10)
    head = math.fsum(k ** -s for k in range(m, cutoff))
    return head + _em_tail(s, cutoff)


def riemann_zeta(s: float) -> float:
    """Riemann zeta function for real s > 1."""
    return zeta_tail(s, 1)
