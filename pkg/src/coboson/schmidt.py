"""Schmidt-coefficient distributions of a single coboson.

A coboson is fully described by the occupation probabilities
lambda_0 >= lambda_1 >= ... of its paired modes.  Infinite-support
families are cut at ``d`` retained modes; the discarded probability is
kept as ``tail_mass`` instead of renormalizing, so closed-form values of
the untruncated family stay comparable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .zeta import riemann_zeta, zeta_tail

SUM_TOL = 1e-12
_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class SchmidtDistribution:
    """Sorted, strictly positive Schmidt coefficients plus truncated mass.

    ``family`` is one of ``"geometric"``, ``"zeta"``, ``"uniform"``,
    ``"custom"`` or None, and ``param`` holds z (geometric) or s (zeta).
    """

    lambdas: np.ndarray
    tail_mass: float = 0.0
    family: str | None = None
    param: float | None = None
    _log: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise DomainError("a distribution needs at least one coefficient")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0.0) or np.any(lam > 1.0):
            raise DomainError("coefficients must lie in (0, 1]")
        if np.any(np.diff(lam) > 0.0):
            raise DomainError("coefficients must be sorted non-increasing")
        tail = float(self.tail_mass)
        if not 0.0 <= tail < 1.0:
            raise DomainError(f"tail_mass={tail!r} outside [0, 1)")
        total = math.fsum(lam) + tail
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"coefficients plus tail sum to {total!r}, not 1")
        lam.setflags(write=False)
        log = np.log(lam)
        log.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "tail_mass", tail)
        object.__setattr__(self, "_log", log)

    @property
    def d(self) -> int:
        return int(self.lambdas.size)

    @property
    def log_lambdas(self) -> np.ndarray:
        return self._log

    @property
    def family_tag(self) -> str | None:
        if self.family in ("geometric", "zeta"):
            return f"{self.family}({self.param!r})"
        return self.family

    def omitted_bound(self) -> float:
        """Upper bound on any coefficient beyond the retained modes."""
        if self.tail_mass == 0.0:
            return 0.0
        if self.family == "geometric":
            z = self.param
            return (1.0 - z) * z ** self.d
        if self.family == "zeta":
            s = self.param
            return (self.d + 1.0) ** -s / riemann_zeta(s)
        return min(float(self.lambdas[-1]), self.tail_mass)

    def tail_power_sum(self, j: int) -> float:
        """Power sum of order j over the truncated (omitted) modes.

        Only geometric and zeta families have a known tail; for other
        distributions with nonzero tail mass this raises DomainError.
        """
        if self.tail_mass == 0.0:
            return 0.0
        if self.family == "geometric":
            z = self.param
            return (1.0 - z) ** j * z ** (self.d * j) / (1.0 - z ** j)
        if self.family == "zeta":
            s = self.param
            return zeta_tail(j * s, self.d + 1) / riemann_zeta(s) ** j
        raise DomainError(
            "tail structure unknown for this distribution; renormalize it "
            "with from_weights(dist.lambdas)"
        )


def _cut(values: np.ndarray) -> np.ndarray:
    # zero and denormal entries carry no usable information
    keep = values >= _TINY
    return values[keep]


def geometric_family(z: float, d: int) -> SchmidtDistribution:
    """Exponential distribution (1 - z) z**j truncated to d modes."""
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z!r} must lie in (0, 1)")
    if d < 1:
        raise DomainError("d must be a positive integer")
    lam = _cut((1.0 - z) * z ** np.arange(d, dtype=float))
    return SchmidtDistribution(lam, z ** lam.size, "geometric", float(z))


def geometric_for_tail(z: float, tail: float = 1e-12) -> SchmidtDistribution:
    """Geometric distribution with the smallest d leaving at most ``tail``."""
    if not 0.0 < tail < 1.0:
        raise DomainError("tail threshold must lie in (0, 1)")
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z!r} must lie in (0, 1)")
    d = max(1, math.ceil(math.log(tail) / math.log(z)))
    while z ** d > tail:
        d += 1
    return geometric_family(z, d)


def zeta_family(s: float, d: int) -> SchmidtDistribution:
    """Power-law distribution (j+1)**-s / zeta(s) truncated to d modes."""
    if not s > 1.0:
        raise DomainError(f"s={s!r} must exceed 1 for a normalizable series")
    if d < 1:
        raise DomainError("d must be a positive integer")
    zs = riemann_zeta(s)
    lam = _cut(np.arange(1, d + 1, dtype=float) ** -s / zs)
    tail = zeta_tail(s, lam.size + 1) / zs
    return SchmidtDistribution(lam, tail, "zeta", float(s))


def uniform_family(d: int) -> SchmidtDistribution:
    if d < 1:
        raise DomainError("d must be a positive integer")
    return SchmidtDistribution(np.full(d, 1.0 / d), 0.0, "uniform")


def from_weights(raw) -> SchmidtDistribution:
    """Normalize non-negative weights into a custom distribution.

    Zeros are dropped and ties keep their input order.
    """
    w = np.asarray(raw, dtype=float).ravel()
    if w.size == 0:
        raise DomainError("empty weight vector")
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise DomainError("weights must be finite and non-negative")
    w = w[w > 0.0]
    if w.size == 0:
        raise DomainError("all weights are zero")
    w = w / math.fsum(w)
    w = _cut(w[np.argsort(-w, kind="stable")])
    return SchmidtDistribution(w, 0.0, "custom")


def random_distribution(rng: np.random.Generator, d: int, concentration=None) -> SchmidtDistribution:
    """Dirichlet-distributed weights on d modes.

    Small concentrations produce spiky distributions, large ones nearly
    uniform ones; by default the concentration is drawn log-uniformly.
    """
    if concentration is None:
        concentration = 10.0 ** rng.uniform(-1.0, 1.0)
    w = rng.dirichlet(np.full(d, concentration))
    if not np.any(w > 0.0):
        w[0] = 1.0
    return from_weights(w)


def power_sum(dist: SchmidtDistribution, j: int) -> float:
    """Sum of lambda**j over retained modes."""
    if j < 1:
        raise DomainError("power sums start at order 1")
    return math.fsum(dist.lambdas ** j)


def purity(dist: SchmidtDistribution) -> float:
    """Purity Tr(rho_A**2) of the retained modes; equals power_sum(dist, 2)."""
    return power_sum(dist, 2)


def full_purity(dist: SchmidtDistribution) -> float:
    """Purity including the analytic contribution of truncated modes."""
    return purity(dist) + dist.tail_power_sum(2)


def purity_closed_form(dist: SchmidtDistribution) -> float | None:
    """Untruncated purity of a named family, or None for other distributions."""
    if dist.family == "geometric":
        z = dist.param
        return (1.0 - z) / (1.0 + z)
    if dist.family == "zeta":
        s = dist.param
        return riemann_zeta(2.0 * s) / riemann_zeta(s) ** 2
    if dist.family == "uniform":
        return 1.0 / dist.d
    return None


def entropy(dist: SchmidtDistribution) -> float:
    """Entanglement entropy -sum lambda ln lambda over retained modes (nats).

    The truncated tail is ignored; check ``dist.tail_mass`` for its size.
    """
    lam = dist.lambdas
    return -math.fsum(lam * dist.log_lambdas)


# -- file format ----------------------------------------------------------

_TAG = re.compile(r"^(geometric|zeta)\(([^)]+)\)$")


def to_json_dict(dist: SchmidtDistribution) -> dict:
    return {
        "lambdas": [float(x) for x in dist.lambdas],
        "tail_mass": dist.tail_mass,
        "family": dist.family_tag,
    }


def from_json_dict(obj) -> SchmidtDistribution:
    """Validate and build a distribution from its JSON object form."""
    if not isinstance(obj, dict):
        raise DomainError("distribution file must hold a JSON object")
    missing = {"lambdas", "tail_mass"} - set(obj)
    if missing:
        raise DomainError(f"distribution file lacks {sorted(missing)}")
    lam = obj["lambdas"]
    if not isinstance(lam, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in lam
    ):
        raise DomainError("'lambdas' must be an array of numbers")
    tail = obj["tail_mass"]
    if not isinstance(tail, (int, float)) or isinstance(tail, bool):
        raise DomainError("'tail_mass' must be a number")
    tag = obj.get("family")
    family, param = None, None
    if tag is not None:
        if not isinstance(tag, str):
            raise DomainError("'family' must be a string or null")
        m = _TAG.match(tag)
        if m:
            family, param = m.group(1), float(m.group(2))
        elif tag in ("uniform", "custom"):
            family = tag
        else:
            raise DomainError(f"unknown family descriptor {tag!r}")
    if family in ("uniform", "custom") and tail != 0:
        raise DomainError("finite distributions must have tail_mass 0")
    return SchmidtDistribution(np.array(lam, dtype=float), float(tail), family, param)
