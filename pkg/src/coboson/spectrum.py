"""Descending eigenvalue streams of the reduced density matrices.

The initial state (N cobosons in separate wells) has the d**N products
lambda_{n1} ... lambda_{nN} over ordered multi-indices as reduced
spectrum; the condensate |N> has the C(d, N) products over strictly
increasing multi-indices, divided by chi~_N.  Streams yield these in
non-increasing order as blocks ``(value, count)`` of equal entries so that
degenerate spectra (geometric family) cost one block per level.
"""
from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, PauliBlockingError
from .schmidt import SchmidtDistribution
from .symfun import ChiSequence

EXACT_LIMIT = 4_000_000


class CompensatedSum:
    """Neumaier summation; ``value`` is the running total."""

    __slots__ = ("_s", "_c")

    def __init__(self):
        self._s = 0.0
        self._c = 0.0

    def add(self, x: float):
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


class SpectrumStream:
    """Single-consumer stream of eigenvalues in non-increasing order.

    ``horizon`` marks the value below which the block source is no longer
    exact (truncated infinite distributions); reaching it sets
    ``truncated`` and ends the stream.
    """

    def __init__(self, kind: str, blocks: Iterable[tuple[float, int]], total_mass: float,
                 total_dimension: int | None, horizon: float = 0.0, exact: bool = False):
        self.kind = kind
        self.total_mass = total_mass
        self.total_dimension = total_dimension
        self.horizon = horizon
        self.exact = exact
        self.emitted_count = 0
        self.exhausted = False
        self.truncated = False
        self._blocks = iter(blocks)
        self._cur: list | None = None
        self._acc = CompensatedSum()

    @property
    def prefix(self) -> float:
        return self._acc.value

    @property
    def remaining_mass(self) -> float:
        return max(self.total_mass - self.prefix, 0.0)

    @property
    def remaining_count(self) -> float:
        if self.total_dimension is None:
            return math.inf
        return self.total_dimension - self.emitted_count

    def peek(self) -> tuple[float, int] | None:
        """The pending block (value, count left), or None at the end."""
        if self._cur is None and not (self.exhausted or self.truncated):
            try:
                value, count = next(self._blocks)
            except StopIteration:
                self.exhausted = True
                return None
            if value < self.horizon:
                self.truncated = True
                return None
            self._cur = [value, count]
        return None if self._cur is None else (self._cur[0], self._cur[1])

    def take(self, count: int) -> tuple[float, int] | None:
        """Consume up to ``count`` copies of the pending value."""
        if self.peek() is None:
            return None
        value, left = self._cur
        used = min(count, left)
        self._acc.add(used * value)
        self.emitted_count += used
        if used == left:
            self._cur = None
        else:
            self._cur[1] = left - used
        return value, used

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return self

    def __next__(self) -> tuple[float, float]:
        got = self.take(1)
        if got is None:
            raise StopIteration
        return got[0], self.prefix

    def materialize(self) -> np.ndarray:
        """Drain the stream into an array (finite spectra only)."""
        if self.total_dimension is None or self.total_dimension > 4 * EXACT_LIMIT:
            raise DomainError("refusing to materialize an unbounded or huge spectrum")
        out = []
        while (blk := self.peek()) is not None:
            out.extend([blk[0]] * blk[1])
            self.take(blk[1])
        return np.array(out)


def _multinomial(t: tuple[int, ...]) -> int:
    out = math.factorial(len(t))
    for c in Counter(t).values():
        out //= math.factorial(c)
    return out


def _lazy_multisets(lam: list[float], n: int) -> Iterator[tuple[float, int]]:
    # best-first over non-decreasing index tuples; every ordered
    # multi-index is a permutation of exactly one of them
    d = len(lam)
    start = (0,) * n
    heap = [(-math.prod(lam[i] for i in start), start)]
    seen = {start}
    while heap:
        neg, t = heapq.heappop(heap)
        yield -neg, _multinomial(t)
        for p in range(n):
            nxt = t[p] + 1
            if nxt < d and (p == n - 1 or nxt <= t[p + 1]):
                u = t[:p] + (nxt,) + t[p + 1:]
                if u not in seen:
                    seen.add(u)
                    heapq.heappush(heap, (-math.prod(lam[i] for i in u), u))


def _lazy_subsets(lam: list[float], n: int, log_norm: float) -> Iterator[tuple[float, int]]:
    d = len(lam)
    scale = math.exp(-log_norm) if log_norm > -600.0 else None
    log_lam = [math.log(x) for x in lam]

    def value(u):
        if scale is not None:
            return math.prod(lam[i] for i in u) * scale
        return math.exp(math.fsum(log_lam[i] for i in u) - log_norm)

    start = tuple(range(n))
    heap = [(-value(start), start)]
    seen = {start}
    while heap:
        neg, t = heapq.heappop(heap)
        yield -neg, 1
        for p in range(n):
            nxt = t[p] + 1
            bound = t[p + 1] if p < n - 1 else d
            if nxt < bound:
                u = t[:p] + (nxt,) + t[p + 1:]
                if u not in seen:
                    seen.add(u)
                    heapq.heappush(heap, (-value(u), u))


def _runs(values: np.ndarray) -> Iterator[tuple[float, int]]:
    values = np.sort(values)[::-1]
    if values.size == 0:
        return
    cut = np.flatnonzero(np.diff(values) != 0.0) + 1
    starts = np.concatenate(([0], cut))
    ends = np.concatenate((cut, [values.size]))
    for a, b in zip(starts, ends):
        yield float(values[a]), int(b - a)


def _exact_products(lam: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.multiply.outer(out, lam).ravel()
    return out


def _exact_subset_products(lam: np.ndarray, n: int, log: bool = False) -> np.ndarray:
    """Products (or, with ``log``, sums of the given logs) over all n-subsets."""
    idx = np.array(list(itertools.combinations(range(lam.size), n)), dtype=np.intp)
    if idx.size == 0:
        return np.zeros(0)
    return np.sum(lam[idx], axis=1) if log else np.prod(lam[idx], axis=1)


# -- degeneracies of the geometric family ------------------------------------


def composition_count(level: int, n: int) -> int:
    """Ordered n-tuples of non-negative integers summing to ``level``."""
    return math.comb(level + n - 1, n - 1)


class PartitionCounter:
    """Partitions of l into at most n parts, extended on demand."""

    def __init__(self, n: int):
        self.n = n
        # rows[k][l]: partitions of l into at most k parts
        self._rows = [[1] for _ in range(n + 1)]

    def __getitem__(self, level: int) -> int:
        rows = self._rows
        while len(rows[self.n]) <= level:
            l = len(rows[self.n])
            rows[0].append(0)
            for k in range(1, self.n + 1):
                rows[k].append(rows[k - 1][l] + (rows[k][l - k] if l >= k else 0))
        return rows[self.n][level]


def _geometric_initial(z: float, n: int) -> Iterator[tuple[float, int]]:
    base = n * math.log1p(-z)
    lz = math.log(z)
    for level in itertools.count():
        yield math.exp(base + level * lz), composition_count(level, n)


def _geometric_final(z: float, n: int, log_norm: float) -> Iterator[tuple[float, int]]:
    base = n * math.log1p(-z) + (n * (n - 1) // 2) * math.log(z) - log_norm
    lz = math.log(z)
    parts = PartitionCounter(n)
    for level in itertools.count():
        yield math.exp(base + level * lz), parts[level]


# -- public constructors -----------------------------------------------------


def initial_spectrum(dist: SchmidtDistribution, n: int, exact: bool | None = None) -> SpectrumStream:
    """Spectrum of the n separated cobosons, lambda^(tensor n).

    Geometric distributions are treated as the untruncated family and
    streamed level by level.  Other distributions with a tail are exact
    only down to the largest product that could involve an omitted mode.
    ``exact=None`` materializes the sorted list when d**n <= 4e6.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if dist.family == "geometric":
        return SpectrumStream("initial", _geometric_initial(dist.param, n), 1.0, None)
    d = dist.d
    if dist.tail_mass > 0.0:
        horizon = float(dist.lambdas[0]) ** (n - 1) * dist.omitted_bound()
        return SpectrumStream("initial", _lazy_multisets(dist.lambdas.tolist(), n), 1.0, None, horizon)
    total = math.fsum(dist.lambdas) ** n
    dim = d ** n
    if exact is None:
        exact = dim <= EXACT_LIMIT
    if exact:
        if dim > EXACT_LIMIT:
            raise DomainError(f"exact initial spectrum would hold {dim} entries")
        blocks = _runs(_exact_products(dist.lambdas, n))
    else:
        blocks = _lazy_multisets(dist.lambdas.tolist(), n)
    return SpectrumStream("initial", blocks, total, dim, exact=exact)


def final_spectrum(dist: SchmidtDistribution, n: int, chi: ChiSequence, exact: bool | None = None) -> SpectrumStream:
    """Spectrum of the condensate |n>, padded implicitly with zeros.

    ``chi`` must describe the same (untruncated) distribution, e.g. from
    :func:`coboson.symfun.chi_sequence`.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if dist.tail_mass == 0.0 and n > dist.d:
        raise PauliBlockingError(f"{n} cobosons cannot share {dist.d} modes")
    if chi.n_max < n or chi.is_zero(n):
        raise PauliBlockingError(f"chi~_{n} vanishes or was not computed")
    log_norm = chi.log_tilde(n)
    if dist.family == "geometric":
        return SpectrumStream("final", _geometric_final(dist.param, n, log_norm), 1.0, None)
    if dist.tail_mass > 0.0:
        if n > dist.d:
            raise DomainError(f"retain at least {n} modes to stream this spectrum")
        lead = math.fsum(dist.log_lambdas[: n - 1])
        horizon = math.exp(lead + math.log(dist.omitted_bound()) - log_norm)
        return SpectrumStream("final", _lazy_subsets(dist.lambdas.tolist(), n, log_norm), 1.0, None, horizon)
    dim = math.comb(dist.d, n)
    if exact is None:
        exact = dim <= EXACT_LIMIT
    if exact:
        if dim > EXACT_LIMIT:
            raise DomainError(f"exact final spectrum would hold {dim} entries")
        if log_norm > -600.0:
            values = _exact_subset_products(dist.lambdas, n) * math.exp(-log_norm)
        else:
            values = np.exp(_exact_subset_products(dist.log_lambdas, n, log=True) - log_norm)
        blocks = _runs(values)
    else:
        blocks = _lazy_subsets(dist.lambdas.tolist(), n, log_norm)
    return SpectrumStream("final", blocks, 1.0, dim, exact=exact)
