"""Bernoulli measures on address space and reproducible sampling.

The random source is counter based (Philox) and keyed by (seed, stream), so
any substream can be reconstructed independently of execution order: worker k
of a batch always draws the same letters, no matter how many workers run or
in what order they finish. Letter draws use inverse-CDF lookup against the
cumulative probabilities rather than any library categorical sampler, so the
letter stream is a pure function of the documented uniform output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetError, EnumerationCapError, ValidationError
from .ifs import Word, as_fraction

__all__ = [
    "ProbVector",
    "RandomSource",
    "cylinder_measure",
    "sample_address",
    "contains_all_words",
]

_SUM_TOL = Fraction(1, 10**12)
_MIX = 0x9E3779B97F4A7C15  # 64-bit golden-ratio increment for stream splitting


@dataclass(frozen=True)
class ProbVector:
    """Probability weights p_1..p_m, stored exactly.

    Float inputs embed exactly into Fractions; the sum check allows 1e-12 so
    vectors like six copies of float 1/6 validate.
    """

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))
        if not 2 <= len(self.values) <= 255:
            raise ValidationError("need between 2 and 255 weights")
        if any(v <= 0 for v in self.values):
            raise ValidationError("weights must be strictly positive")
        if abs(sum(self.values) - 1) > _SUM_TOL:
            raise ValidationError(f"weights sum to {float(sum(self.values))}, not 1")

    @classmethod
    def uniform(cls, m: int) -> "ProbVector":
        return cls(tuple(Fraction(1, m) for _ in range(m)))

    @classmethod
    def of(cls, values: Iterable) -> "ProbVector":
        return cls(tuple(values))

    @property
    def m(self) -> int:
        return len(self.values)

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]


@dataclass(eq=False)
class RandomSource:
    """Deterministic, splittable random source.

    Instances are stateful (draws consume the stream) and must not be shared
    across workers; derive one per task with ``substream``. Two sources built
    with the same (seed, stream) always produce identical draws.
    """

    seed: int
    stream: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")
        if not 0 <= self.stream < 2**64:
            raise ValidationError("stream must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed, self.stream], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, index: int) -> "RandomSource":
        """Independent source for task ``index``; fresh state every call."""
        if index < 0:
            raise ValidationError("substream index must be nonnegative")
        mixed = (self.stream * _MIX + index + 1) % 2**64
        return RandomSource(seed=self.seed, stream=mixed)


def cylinder_measure(p: ProbVector, u: Word) -> Fraction:
    """nu_p(R_u) = product of p over the letters of u; empty word gives 1."""
    if any(not (1 <= c <= p.m) for c in u):
        raise AlphabetError(f"word uses letters outside 1..{p.m}")
    out = Fraction(1)
    for c in u:
        out *= p.values[c - 1]
    return out


def sample_address(p: ProbVector, n: int, rng: RandomSource) -> Word:
    """Draw n i.i.d. letters from p. Identical (seed, stream) => identical word."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if n == 0:
        return b""
    u = rng.generator().random(n)
    cum = np.cumsum(p.floats())[:-1]
    letters = (np.searchsorted(cum, u, side="right") + 1).astype(np.uint8)
    return letters.tobytes()


def contains_all_words(u: Word, k: int, m: int, enum_cap: int = 10_000_000) -> bool:
    """True iff every word of length k over 1..m occurs in u as a factor."""
    if k < 1:
        raise ValidationError("k must be at least 1")
    if m < 1:
        raise ValidationError("m must be at least 1")
    if m**k > enum_cap:
        raise EnumerationCapError(
            f"m^k = {m ** k} exceeds the enumeration cap", needed=m**k, cap=enum_cap
        )
    if any(not (1 <= c <= m) for c in u):
        raise AlphabetError(f"word uses letters outside 1..{m}")
    if len(u) < k:
        return False
    seen = {u[i : i + k] for i in range(len(u) - k + 1)}
    return len(seen) == m**k
