"""Brute-force fermionic Fock space for two species A and B.

Basis states are pairs of occupation bitmasks ``(mask_A, mask_B)``.  The
Jordan-Wigner sign string orders all modes of one species before the
other (``order="AB"`` puts A first); scalar results do not depend on the
choice, which the tests check.

Two representations are offered: sparse matrices over an explicit basis
(full 4**d space, or the paired sector mask_A == mask_B that c^dagger
never leaves) and an exact-rational route for tiny d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, PauliBlockingError, ResourceLimitError
from .schmidt import SchmidtDistribution

MAX_MODES = 12
MAX_FULL_MODES = 6


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _offset(species: str, order: str, d: int) -> int:
    """Bit offset of a species in the combined 2d-bit sign string."""
    if order not in ("AB", "BA"):
        raise DomainError(f"unknown ordering {order!r}")
    return 0 if order[0] == species else d


def apply_op(state: tuple[int, int], species: str, mode: int, dagger: bool, d: int,
             order: str = "AB") -> tuple[int, tuple[int, int]] | None:
    """Apply a creation (dagger) or annihilation operator to a basis state.

    Returns ``(sign, new_state)`` or None when the result vanishes.
    """
    combined = state[0] << _offset("A", order, d) | state[1] << _offset("B", order, d)
    bit = mode + _offset(species, order, d)
    occupied = combined >> bit & 1
    if occupied == dagger:
        return None
    sign = -1 if _popcount(combined & ((1 << bit) - 1)) % 2 else 1
    flip = 1 << mode
    if species == "A":
        return sign, (state[0] ^ flip, state[1])
    return sign, (state[0], state[1] ^ flip)


@dataclass
class FockSpace:
    """Explicit basis of the two-species Fock space on d modes.

    ``sector="paired"`` keeps only states with mask_A == mask_B
    (dimension 2**d); ``sector="full"`` keeps all 4**d pairs.
    """

    d: int
    sector: str = "paired"
    order: str = "AB"

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("need at least one mode")
        if self.d > MAX_MODES:
            raise ResourceLimitError(f"d={self.d} exceeds the oracle limit of {MAX_MODES} modes")
        if self.sector == "full" and self.d > MAX_FULL_MODES:
            raise ResourceLimitError(f"full space limited to d <= {MAX_FULL_MODES}")
        if self.sector == "paired":
            self.basis = [(m, m) for m in range(1 << self.d)]
        elif self.sector == "full":
            self.basis = [(a, b) for a in range(1 << self.d) for b in range(1 << self.d)]
        else:
            raise DomainError(f"unknown sector {self.sector!r}")
        self.index = {s: i for i, s in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dimension)
        v[self.index[(0, 0)]] = 1.0
        return v

    def sector_of(self, n: int) -> np.ndarray:
        """Indices of basis states holding n A-particles and n B-particles."""
        return np.array([i for i, (a, b) in enumerate(self.basis)
                         if _popcount(a) == n and _popcount(b) == n], dtype=np.intp)


@dataclass
class SparseOperator:
    """Operator as (row, column, amplitude) triples over a FockSpace basis."""

    space: FockSpace
    rows: np.ndarray
    cols: np.ndarray
    data: np.ndarray

    @property
    def matrix(self) -> sp.csr_matrix:
        n = self.space.dimension
        return sp.csr_matrix((self.data, (self.rows, self.cols)), shape=(n, n))

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.space, self.cols, self.rows, np.conj(self.data))

    def __matmul__(self, vec):
        return self.matrix @ vec


def _from_triples(space: FockSpace, triples) -> SparseOperator:
    if triples:
        r, c, a = zip(*triples)
    else:
        r, c, a = (), (), ()
    return SparseOperator(space, np.array(r, dtype=np.intp), np.array(c, dtype=np.intp),
                          np.array(a, dtype=float))


def mode_operator(space: FockSpace, species: str, mode: int, dagger: bool) -> SparseOperator:
    """Single-mode creation/annihilation operator (full sector only)."""
    if space.sector != "full":
        raise DomainError("single-species operators leave the paired sector")
    triples = []
    for col, state in enumerate(space.basis):
        hit = apply_op(state, species, mode, dagger, space.d, space.order)
        if hit is not None:
            triples.append((space.index[hit[1]], col, float(hit[0])))
    return _from_triples(space, triples)


def _check_modes(dist: SchmidtDistribution, space: FockSpace | None, sector: str, order: str) -> FockSpace:
    if dist.d > MAX_MODES:
        raise ResourceLimitError(f"d={dist.d} exceeds the oracle limit of {MAX_MODES} modes")
    if space is None:
        space = FockSpace(dist.d, sector, order)
    elif space.d != dist.d:
        raise DomainError("space and distribution disagree on d")
    return space


def build_coboson_op(dist: SchmidtDistribution, space: FockSpace | None = None,
                     sector: str = "paired", order: str = "AB") -> SparseOperator:
    """c^dagger = sum_n sqrt(lambda_n) a^dagger_n b^dagger_n."""
    space = _check_modes(dist, space, sector, order)
    amps = np.sqrt(dist.lambdas)
    triples = []
    for col, state in enumerate(space.basis):
        for n in range(space.d):
            hit_b = apply_op(state, "B", n, True, space.d, space.order)
            if hit_b is None:
                continue
            hit_a = apply_op(hit_b[1], "A", n, True, space.d, space.order)
            if hit_a is None:
                continue
            triples.append((space.index[hit_a[1]], col, hit_b[0] * hit_a[0] * amps[n]))
    return _from_triples(space, triples)


def deviation_op(dist: SchmidtDistribution, space: FockSpace | None = None,
                 sector: str = "paired", order: str = "AB") -> SparseOperator:
    """Delta = sum_n lambda_n (a^dagger_n a_n + b^dagger_n b_n), diagonal."""
    space = _check_modes(dist, space, sector, order)
    lam = dist.lambdas
    diag = []
    for a, b in space.basis:
        diag.append(math.fsum(lam[n] * ((a >> n & 1) + (b >> n & 1)) for n in range(space.d)))
    idx = np.arange(space.dimension)
    return SparseOperator(space, idx, idx, np.array(diag))


def _raw_number_state(dist, n, sector, order):
    space = _check_modes(dist, None, sector, order)
    cdag = build_coboson_op(dist, space).matrix
    v = space.vacuum()
    for _ in range(n):
        v = cdag @ v
    return space, cdag, v


def number_state(dist: SchmidtDistribution, n: int, sector: str = "paired",
                 order: str = "AB") -> tuple[np.ndarray, float]:
    """Normalized |n> = chi_n^(-1/2) (c^dagger)^n / sqrt(n!) |0> and chi_n."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if n > dist.d:
        raise PauliBlockingError(f"{n} cobosons cannot share {dist.d} modes")
    _, _, v = _raw_number_state(dist, n, sector, order)
    norm2 = float(v @ v)
    if norm2 == 0.0:
        raise PauliBlockingError(f"(c^dagger)^{n}|0> vanishes")
    chi = norm2 / math.factorial(n)
    return v / math.sqrt(norm2), chi


@dataclass(frozen=True)
class Annihilation:
    alpha: float
    eps_norm: float
    orthogonality_residual: float


def verify_annihilation(dist: SchmidtDistribution, n: int, sector: str = "paired",
                        order: str = "AB") -> Annihilation:
    """Split c|n> into its component along |n-1> and the orthogonal rest."""
    if not 1 <= n <= dist.d:
        raise DomainError("need 1 <= n <= d")
    space = _check_modes(dist, None, sector, order)
    cdag = build_coboson_op(dist, space).matrix
    c = cdag.T.tocsr()
    prev = space.vacuum()
    for _ in range(n - 1):
        prev = cdag @ prev
    cur = cdag @ prev
    prev = prev / math.sqrt(float(prev @ prev))
    cur = cur / math.sqrt(float(cur @ cur))
    image = c @ cur
    overlap = float(prev @ image)
    eps = image - overlap * prev
    return Annihilation(
        alpha=overlap / math.sqrt(n),
        eps_norm=float(eps @ eps),
        orthogonality_residual=abs(float(prev @ eps)),
    )


def commutator_expectation(dist: SchmidtDistribution, n: int, sector: str = "paired",
                           order: str = "AB") -> float:
    """<n| Delta |n>, which equals <n| 1 - [c, c^dagger] |n>."""
    vec, _ = number_state(dist, n, sector, order)
    delta = deviation_op(dist, FockSpace(dist.d, sector, order)).matrix
    return float(vec @ (delta @ vec))


def commutator_matrix(dist: SchmidtDistribution, space: FockSpace) -> sp.csr_matrix:
    """[c, c^dagger] built from the explicit operators."""
    cdag = build_coboson_op(dist, space).matrix
    c = cdag.T.tocsr()
    return (c @ cdag - cdag @ c).tocsr()


# -- exact rational route --------------------------------------------------


def _subset_weight(lam, mask):
    w = Fraction(1)
    for i, x in enumerate(lam):
        if mask >> i & 1:
            w *= x
    return w


def rational_oracle(lambdas, n: int, order: str = "AB") -> dict[str, Fraction]:
    """Exact chi_n and related ratios for rational coefficients, d <= 4.

    In the paired sector an amplitude on |S, S> always has the form
    r * sqrt(prod_{m in S} lambda_m) with rational r, so only r is stored:
    c^dagger maps r to r (times a sign) and c maps r to r * lambda_m.
    """
    lam = [Fraction(x) for x in lambdas]
    d = len(lam)
    if d > 4:
        raise ResourceLimitError("exact mode is limited to d <= 4")
    if sum(lam) != 1:
        raise DomainError("exact mode needs coefficients summing to 1")
    if not 1 <= n <= d:
        raise DomainError("need 1 <= n <= d")

    def create(vec):
        out = {}
        for mask, r in vec.items():
            for m in range(d):
                hit_b = apply_op((mask, mask), "B", m, True, d, order)
                if hit_b is None:
                    continue
                hit_a = apply_op(hit_b[1], "A", m, True, d, order)
                new = hit_a[1][0]
                out[new] = out.get(new, 0) + hit_a[0] * hit_b[0] * r
        return {k: v for k, v in out.items() if v}

    def annihilate(vec):
        out = {}
        for mask, r in vec.items():
            for m in range(d):
                # c contains b_m a_m: apply a_m first, then b_m
                hit_a = apply_op((mask, mask), "A", m, False, d, order)
                if hit_a is None:
                    continue
                hit_b = apply_op(hit_a[1], "B", m, False, d, order)
                new = hit_b[1][0]
                out[new] = out.get(new, 0) + hit_a[0] * hit_b[0] * r * lam[m]
        return {k: v for k, v in out.items() if v}

    def inner(u, v):
        return sum((u[k] * v[k] * _subset_weight(lam, k) for k in u.keys() & v.keys()), Fraction(0))

    states = [{0: Fraction(1)}]
    for _ in range(n + 1):
        states.append(create(states[-1]))
    norms = [inner(s, s) for s in states]
    chi = [norms[k] / math.factorial(k) for k in range(n + 2)]
    image = annihilate(states[n])
    # unnormalized: c v_n = a v_{n-1} + e,  <v_{n-1}|e> = 0
    proj = inner(states[n - 1], image)
    eps = inner(image, image) / norms[n] - proj * proj / (norms[n - 1] * norms[n])
    delta = sum((r * r * _subset_weight(lam, k) * 2 * sum(lam[i] for i in range(d) if k >> i & 1)
                 for k, r in states[n].items()), Fraction(0)) / norms[n]
    return {
        "chi": chi[n],
        "chi_next": chi[n + 1],
        "alpha_sq": chi[n] / chi[n - 1],
        "eps_norm": eps,
        "departure": delta,
    }


def subset_chi(lambdas, n: int) -> Fraction:
    """chi~_n by exhaustive subset enumeration in exact arithmetic."""
    lam = [Fraction(x) for x in lambdas]
    return sum((math.prod(c, start=Fraction(1)) for c in combinations(lam, n)), Fraction(0))
