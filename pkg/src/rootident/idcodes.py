"""Coloring-scheme identification codes over a noiseless channel.

A code is ``N`` colorings ``T_i : {1..M'} -> {1..M''}``. Message ``i`` is sent
as a uniformly chosen inner index ``j`` together with its color ``T_i(j)``;
with an identity channel, receiver ``j'`` wrongly accepts exactly when the
colors agree, so the type-II error between two messages is the fraction of
inner indices on which their colorings coincide.

Colors are stored 0-based in an ``(N, M')`` integer array.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError

ENUMERATION_LIMIT = 10**6
HISTOGRAM_HEADER = ("agreements", "overlap", "pairs")


@dataclass(frozen=True)
class ColoringCode:
    m_prime: int
    m_double_prime: int
    colorings: np.ndarray

    def __post_init__(self):
        if self.m_prime < 1 or self.m_double_prime < 1:
            raise InvalidArgumentError("M' and M'' must be positive")
        c = self.colorings
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] != self.m_prime:
            raise InvalidArgumentError(f"colorings must have shape (N>=1, {self.m_prime})")
        if c.min() < 0 or c.max() >= self.m_double_prime:
            raise InvalidArgumentError("colors must lie in 0..M''-1")

    @property
    def n_codes(self) -> int:
        return self.colorings.shape[0]

    def is_distinct(self) -> bool:
        return len({row.tobytes() for row in self.colorings}) == self.n_codes


def distinct_code_count(m_prime: int, m_double_prime: int) -> int:
    """Number of maps ``{1..M'} -> {1..M''}``, as an exact integer."""
    return m_double_prime**m_prime


def _decode(indices, m_prime, m2):
    idx = np.asarray(indices, dtype=np.int64)
    digits = np.empty((idx.size, m_prime), dtype=np.int64)
    for pos in range(m_prime - 1, -1, -1):
        digits[:, pos] = idx % m2
        idx = idx // m2
    return digits


def build_coloring_code(m_prime: int, m_double_prime: int, n_codes: int, distinct: bool = True,
                        seed: int = 0) -> ColoringCode:
    """Draw ``n_codes`` uniform colorings, pairwise distinct if requested.

    Small map spaces are sampled without replacement by index; larger ones
    redraw colliding rows.
    """
    if m_prime < 1 or m_double_prime < 1 or n_codes < 1:
        raise InvalidArgumentError("M', M'' and n_codes must be positive")
    total = distinct_code_count(m_prime, m_double_prime)
    if distinct and n_codes > total:
        raise InvalidArgumentError(
            f"only {total} distinct colorings exist for M'={m_prime}, M''={m_double_prime}")
    rng = np.random.default_rng(seed)
    if not distinct:
        rows = rng.integers(0, m_double_prime, size=(n_codes, m_prime))
    elif total <= ENUMERATION_LIMIT:
        rows = _decode(rng.choice(total, size=n_codes, replace=False), m_prime, m_double_prime)
    else:
        seen, out = set(), []
        while len(out) < n_codes:
            row = rng.integers(0, m_double_prime, size=m_prime)
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(row)
        rows = np.array(out)
    return ColoringCode(m_prime, m_double_prime, np.asarray(rows, dtype=np.int64))


def all_colorings(m_prime: int, m_double_prime: int) -> ColoringCode:
    total = distinct_code_count(m_prime, m_double_prime)
    if total > ENUMERATION_LIMIT:
        raise InvalidArgumentError(f"{total} maps is beyond the enumeration limit")
    return ColoringCode(m_prime, m_double_prime,
                        _decode(np.arange(total), m_prime, m_double_prime))


def pairwise_overlap(code: ColoringCode, i: int, j: int) -> float:
    if i == j:
        raise InvalidArgumentError("overlap needs two different messages")
    for k in (i, j):
        if not 0 <= k < code.n_codes:
            raise InvalidArgumentError(f"message index {k} out of range 0..{code.n_codes - 1}")
    agree = np.count_nonzero(code.colorings[i] == code.colorings[j])
    return agree / code.m_prime


def _agreement_matrix(code):
    c = code.colorings
    return (c[:, None, :] == c[None, :, :]).sum(axis=-1)


def max_pairwise_overlap(code: ColoringCode) -> float:
    if code.n_codes < 2:
        raise InvalidArgumentError("need at least two colorings")
    agree = _agreement_matrix(code)
    iu = np.triu_indices(code.n_codes, k=1)
    return int(agree[iu].max()) / code.m_prime


def overlap_histogram(code: ColoringCode) -> list[dict]:
    """Counts of unordered pairs by number of agreeing positions."""
    if code.n_codes < 2:
        raise InvalidArgumentError("need at least two colorings")
    agree = _agreement_matrix(code)[np.triu_indices(code.n_codes, k=1)]
    counts = Counter(int(a) for a in agree)
    return [{"agreements": k, "overlap": k / code.m_prime, "pairs": counts.get(k, 0)}
            for k in range(code.m_prime + 1)]


def random_pair_agreements(m_prime: int, m_double_prime: int, pairs: int, seed: int = 0):
    """Agreements between independent uniform colorings, counted per position.

    Returns ``(agreements, positions)``; each position is a Bernoulli trial
    with success probability ``1/M''``.
    """
    rng = np.random.default_rng(seed)
    x = rng.integers(0, m_double_prime, size=(pairs, m_prime))
    y = rng.integers(0, m_double_prime, size=(pairs, m_prime))
    return int(np.count_nonzero(x == y)), pairs * m_prime


def log2_log2_code_count(m_prime: int, m_double_prime: int) -> float:
    """``log2 log2 (M''^M')`` computed without forming the count."""
    if m_double_prime < 2:
        raise InvalidArgumentError("need M'' >= 2 for a positive log count")
    return math.log2(m_prime) + math.log2(math.log2(m_double_prime))


def exact_log2_bracket(count: int) -> tuple[int, int]:
    """Integers ``(k, k+1)`` with ``2**k <= count < 2**(k+1)``."""
    k = count.bit_length() - 1
    return k, k + 1


def overlap_fraction(code: ColoringCode, i: int, j: int) -> Fraction:
    """Exact version of :func:`pairwise_overlap`."""
    pairwise_overlap(code, i, j)
    return Fraction(int(np.count_nonzero(code.colorings[i] == code.colorings[j])), code.m_prime)
