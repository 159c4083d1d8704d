"""Column structure of aligned systems and vertical fibre Cantor sets.

When the level-1 rectangles organise into full-height columns whose horizontal
projections tile [0,1] (see ``conditions.gl_alignment``), a vertical line
{x1} x [0,1] meets the attractor in a Cantor set generated by the vertical
parts g_j(y) = s_j y + b_j of the maps sitting in the columns that the address
of x1 walks through. Fibre covers here use the whole seed interval [0,1]
instead of a seed point, so every cover certifiably contains the fibre and
interval lengths bound the approximation error.

All arithmetic in this module is exact (Fractions); callers convert to floats
only to rasterize.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AlphabetError,
    EnumerationCapError,
    GridShapeError,
    HypothesisFailure,
    ValidationError,
)
from .ifs import ENUM_CAP_DEFAULT, Rational, SelfAffineSystem, Word, as_fraction

__all__ = [
    "GLStructure",
    "ColumnAddress",
    "column_address",
    "fibre_cover",
    "fibre_vs_section",
    "column_weights",
]


@dataclass(frozen=True)
class GLStructure:
    """Columns of an aligned system.

    breakpoints: 0 = b_0 < b_1 < ... < b_k = 1, exact.
    groups: for each column, the 1-based letters whose rectangles live in it.
    vmaps: for each column, the (s_j, b_j) pairs of those letters, same order.
    """

    breakpoints: tuple[Fraction, ...]
    groups: tuple[tuple[int, ...], ...]
    vmaps: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.groups) + 1:
            raise ValidationError("breakpoint count must be column count + 1")
        if self.breakpoints[0] != 0 or self.breakpoints[-1] != 1:
            raise ValidationError("columns must tile [0,1]")
        if any(x >= y for x, y in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if len(self.vmaps) != len(self.groups):
            raise ValidationError("vmaps and groups disagree")

    @property
    def k(self) -> int:
        return len(self.groups)

    def width(self, column: int) -> Fraction:
        """Width of the 1-based column, equal to its r_i."""
        return self.breakpoints[column] - self.breakpoints[column - 1]

    def validate_column_word(self, u: Word) -> None:
        if any(not (1 <= c <= self.k) for c in u):
            raise AlphabetError(f"column word uses indices outside 1..{self.k}")


@dataclass(frozen=True)
class ColumnAddress:
    """Address of x1 under the column interval maps h_i(x) = r_i x + b_{i-1}.

    ``word`` is the lexicographically smaller address when x1 admits two
    (interior breakpoint hit at some depth); ``alternate`` then carries the
    other branch and ``ambiguous`` is set.
    """

    word: Word
    ambiguous: bool = False
    alternate: Word | None = None

    def branches(self) -> tuple[Word, ...]:
        if self.alternate is None:
            return (self.word,)
        return (self.word, self.alternate)


def column_address(gl: GLStructure, x1: Rational, depth: int) -> ColumnAddress:
    """Digit expansion of x1 with respect to the column partition, exact.

    A point landing exactly on an interior breakpoint at some step has two
    expansions: left column followed by all-last-column, and right column
    followed by all-first-column. The first is lexicographically smaller and is
    returned as primary.
    """
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    x = as_fraction(x1)
    if not (0 <= x <= 1):
        raise ValidationError(f"x1 = {x} outside [0,1]")
    bps = gl.breakpoints
    k = gl.k
    letters: list[int] = []
    for step in range(depth):
        # column with b_{c-1} <= x <= b_c; interior breakpoint hit => ambiguous
        c = bisect_right(bps, x)  # index of first breakpoint > x, so x in column c
        if c > k:  # x == 1
            c = k
        if 1 <= c - 1 and x == bps[c - 1]:
            # x sits on the breakpoint between columns c-1 and c
            left = bytes(letters + [c - 1] + [k] * (depth - step - 1))
            right = bytes(letters + [c] + [1] * (depth - step - 1))
            return ColumnAddress(word=left, ambiguous=True, alternate=right)
        letters.append(c)
        x = (x - bps[c - 1]) / (bps[c] - bps[c - 1])
    return ColumnAddress(word=bytes(letters))


def fibre_cover(
    gl: GLStructure,
    addr: Word,
    n: int,
    enum_cap: int = ENUM_CAP_DEFAULT,
) -> list[tuple[Fraction, Fraction]]:
    """Level-n cover of the fibre over a column address.

    Returns the sorted list of intervals g_{j_1} o ... o g_{j_n}([0,1]) over
    all letter choices j_t in the columns addr[0..n-1]. Intervals are kept
    with multiplicity (no merging), so total length is exactly the product of
    the per-column sums of s_j.
    """
    if n < 0 or n > len(addr):
        raise ValidationError(f"need 0 <= n <= len(addr), got n={n}")
    gl.validate_column_word(addr[:n])
    total = 1
    for c in addr[:n]:
        total *= len(gl.vmaps[c - 1])
        if total > enum_cap:
            raise EnumerationCapError(
                f"fibre cover would need more than {enum_cap} intervals",
                needed=total,
                cap=enum_cap,
            )
    one = Fraction(1)
    zero = Fraction(0)
    # composed vertical maps as (S, B): y -> S y + B, left-to-right
    comps: list[tuple[Fraction, Fraction]] = [(one, zero)]
    for c in addr[:n]:
        nxt: list[tuple[Fraction, Fraction]] = []
        for S, B in comps:
            for s_j, b_j in gl.vmaps[c - 1]:
                nxt.append((S * s_j, B + S * b_j))
        comps = nxt
    return sorted((B, B + S) for S, B in comps)


def column_weights(gl: GLStructure, p: Sequence) -> tuple:
    """P_i = sum of p_j over letters j in column i; exact on exact inputs."""
    letters = max(max(g) for g in gl.groups)
    if len(p) < letters:
        raise ValidationError("probability vector shorter than the alphabet")
    return tuple(sum(p[j - 1] for j in g) for g in gl.groups)


# ---------------------------------------------------------------------------
# fibre versus attractor section


def section_intervals(
    sys: SelfAffineSystem, x: Fraction, n: int, enum_cap: int = ENUM_CAP_DEFAULT
) -> list[tuple[Fraction, Fraction]]:
    """y-extents of the level-n cylinders whose x-range contains x, exact."""
    frontier: list[tuple[Fraction, Fraction, Fraction, Fraction]] = [
        (Fraction(1), Fraction(1), Fraction(0), Fraction(0))
    ]  # (r, s, a, b) of composed maps
    for _ in range(n):
        nxt = []
        if len(frontier) * sys.m > enum_cap:
            raise EnumerationCapError(
                "section enumeration exceeds cap",
                needed=len(frontier) * sys.m,
                cap=enum_cap,
            )
        for R, S, A, B in frontier:
            for f in sys.maps:
                A2 = A + R * f.a
                R2 = R * f.r
                if A2 <= x <= A2 + R2:
                    nxt.append((R2, S * f.s, A2, B + S * f.b))
        frontier = nxt
    if not frontier:
        raise HypothesisFailure(
            f"no level-{n} cylinder meets the vertical line x1={x}; "
            "projections do not cover [0,1]"
        )
    return sorted((B, B + S) for R, S, A, B in frontier)


def _mask_1d(intervals, N: int) -> np.ndarray:
    """Closed-intersection rasterization of y-intervals onto N cells of [0,1]."""
    mask = np.zeros(N, dtype=bool)
    for lo, hi in intervals:
        lo_f, hi_f = float(lo), float(hi)
        j0 = max(0, int(np.ceil(lo_f * N - 1.0)))
        j1 = min(N - 1, int(np.floor(hi_f * N)))
        if j0 <= j1:
            mask[j0 : j1 + 1] = True
    return mask


def _directed_1d(a: np.ndarray, b: np.ndarray) -> int:
    """max over cells of a of the index distance to the nearest cell of b."""
    (ia,) = np.nonzero(a)
    (ib,) = np.nonzero(b)
    pos = np.searchsorted(ib, ia)
    left = np.where(pos > 0, np.abs(ia - ib[np.clip(pos - 1, 0, len(ib) - 1)]), np.iinfo(np.int64).max)
    right = np.where(pos < len(ib), np.abs(ib[np.clip(pos, 0, len(ib) - 1)] - ia), np.iinfo(np.int64).max)
    return int(np.minimum(left, right).max()) if len(ia) else 0


def fibre_vs_section(
    sys: SelfAffineSystem,
    gl: GLStructure,
    x1: Rational,
    n: int,
    N: int = 1024,
    enum_cap: int = ENUM_CAP_DEFAULT,
) -> float:
    """Grid Hausdorff distance between the level-n fibre cover over x1 and the
    y-extents of the level-n cylinders meeting the vertical line at x1.

    Both unions approximate the same section of the attractor, so the distance
    is at most 2 (s_max)^n plus two grid cells. Ambiguous x1 contributes the
    union of both branch covers; the section side picks both columns up
    automatically because cylinder x-ranges are closed.
    """
    if N & (N - 1) or not (64 <= N <= 4096):
        raise GridShapeError("N must be a power of two in [64, 4096]")
    x = as_fraction(x1)
    addr = column_address(gl, x, depth=max(n, 1))
    fib: list[tuple[Fraction, Fraction]] = []
    for branch in addr.branches():
        fib.extend(fibre_cover(gl, branch, n, enum_cap=enum_cap))
    sec = section_intervals(sys, x, n, enum_cap)
    ma = _mask_1d(fib, N)
    mb = _mask_1d(sec, N)
    d = max(_directed_1d(ma, mb), _directed_1d(mb, ma))
    return d / N
