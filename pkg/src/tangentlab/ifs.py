"""Planar self-affine iterated function systems on the unit square.

A system is a finite family of contractions

    f_j(x1, x2) = (r_j x1 + a_j, s_j x2 + b_j),   j = 1..m,

with 0 < s_j < r_j < 1, whose images R_j = f_j(Q) of Q = [0,1]^2 are pairwise
disjoint closed rectangles inside Q (validated as strictly positive pairwise
distance). The attractor is the unique nonempty compact E with
E = union of f_j(E).

Conventions used throughout the package:

* Words are ``bytes`` with 1-based letters, so ``b"\\x01\\x02"`` is the word
  [1, 2]. The empty word is ``b""``.
* ``compose(sys, u)`` composes left to right: f_u = f_{u1} o f_{u2} o ... and
  the accumulation order is fixed, so results are bit-for-bit reproducible.
* Map parameters are stored as exact ``Fraction`` values; geometry operations
  run in binary64 on cached float mirrors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    AlphabetError,
    DepthCapError,
    ValidationError,
)

Word = bytes
Rational = Union[int, float, str, Fraction]

DEPTH_CAP_DEFAULT = 64
ENUM_CAP_DEFAULT = 10_000_000


def as_fraction(value: Rational) -> Fraction:
    """Exact conversion. Strings may be decimals ("0.05") or ratios ("1/3")."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot interpret {value!r} as a rational") from exc
    if isinstance(value, float):
        return Fraction(value)  # exact binary value, not a re-rounding
    raise ValidationError(f"cannot interpret {value!r} as a rational number")


# ---------------------------------------------------------------------------
# words


def as_word(letters: Iterable[int]) -> Word:
    u = bytes(letters)
    if any(c == 0 for c in u):
        raise AlphabetError("letters are 1-based; 0 is not a letter")
    return u


def format_word(u: Word) -> str:
    return ".".join(str(c) for c in u)


def parse_word(text: str) -> Word:
    """Parse "1.2.1" or, for single-digit alphabets, "121"."""
    text = text.strip()
    if not text:
        return b""
    parts = text.split(".") if "." in text else list(text)
    try:
        return as_word(int(p) for p in parts)
    except ValueError as exc:
        raise AlphabetError(f"cannot parse word from {text!r}") from exc


# ---------------------------------------------------------------------------
# geometry primitives


class AffineParams(NamedTuple):
    """Raw parameters of a composed map, in binary64."""

    r: float
    s: float
    a: float
    b: float


class PointEnclosure(NamedTuple):
    """A point known only up to the enclosing cylinder: center plus radius."""

    x1: float
    x2: float
    radius: float


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 <= self.x1 and self.y0 <= self.y1):
            raise ValidationError(f"degenerate rectangle bounds {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def center(self) -> tuple[float, float]:
        return (self.x0 + self.width / 2.0, self.y0 + self.height / 2.0)

    def intersects(self, other: "Rect") -> bool:
        # closed-set test, no epsilon
        return (
            self.x0 <= other.x1
            and other.x0 <= self.x1
            and self.y0 <= other.y1
            and other.y0 <= self.y1
        )

    def clip(self, other: "Rect") -> "Rect | None":
        if not self.intersects(other):
            return None
        return Rect(
            max(self.x0, other.x0),
            min(self.x1, other.x1),
            max(self.y0, other.y0),
            min(self.y1, other.y1),
        )

    def contains_point(self, x1: float, x2: float) -> bool:
        return self.x0 <= x1 <= self.x1 and self.y0 <= x2 <= self.y1


UNIT_SQUARE = Rect(0.0, 1.0, 0.0, 1.0)

RectUnion = tuple[Rect, ...]


@dataclass(frozen=True)
class AffineMapSpec:
    """One map f(x1, x2) = (r x1 + a, s x2 + b), parameters exact."""

    r: Fraction
    s: Fraction
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("r", "s", "a", "b"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not (0 < self.s < self.r < 1):
            raise ValidationError(
                f"need 0 < s < r < 1, got r={self.r}, s={self.s}"
            )
        if not (0 <= self.a and self.a + self.r <= 1):
            raise ValidationError(f"horizontal image [{self.a}, {self.a + self.r}] leaves [0,1]")
        if not (0 <= self.b and self.b + self.s <= 1):
            raise ValidationError(f"vertical image [{self.b}, {self.b + self.s}] leaves [0,1]")

    @classmethod
    def from_values(cls, r: Rational, s: Rational, a: Rational, b: Rational) -> "AffineMapSpec":
        return cls(as_fraction(r), as_fraction(s), as_fraction(a), as_fraction(b))

    def rect_exact(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(x0, x1, y0, y1) of f(Q), exact."""
        return (self.a, self.a + self.r, self.b, self.b + self.s)

    def floats(self) -> AffineParams:
        return AffineParams(float(self.r), float(self.s), float(self.a), float(self.b))


def _pair_distance_sq(
    A: tuple[Fraction, Fraction, Fraction, Fraction],
    B: tuple[Fraction, Fraction, Fraction, Fraction],
) -> Fraction:
    zero = Fraction(0)
    dx = max(A[0] - B[1], B[0] - A[1], zero)
    dy = max(A[2] - B[3], B[2] - A[3], zero)
    return dx * dx + dy * dy


class SelfAffineSystem:
    """Validated map family with cached constants.

    Attributes of note: ``m`` (alphabet size), exact extrema ``s_min``,
    ``s_max``, ``r_min``, ``r_max``, the anisotropy ratio ``q`` (min r_j/s_j),
    and ``delta_sq``, the exact squared minimum distance between distinct
    level-1 rectangles. ``delta`` is its binary64 square root.
    """

    def __init__(self, maps: Sequence[AffineMapSpec]):
        maps = tuple(maps)
        if len(maps) < 2:
            raise ValidationError("need at least two maps")
        if len(maps) > 255:
            raise ValidationError("letters are stored in bytes; at most 255 maps")
        self.maps = maps
        self.m = len(maps)

        rects = [f.rect_exact() for f in maps]
        delta_sq = None
        for i in range(self.m):
            for j in range(i + 1, self.m):
                d2 = _pair_distance_sq(rects[i], rects[j])
                if d2 == 0:
                    raise ValidationError(
                        f"level-1 rectangles {i + 1} and {j + 1} touch or overlap; "
                        "the family must have positive pairwise distance"
                    )
                if delta_sq is None or d2 < delta_sq:
                    delta_sq = d2
        assert delta_sq is not None
        self.delta_sq: Fraction = delta_sq
        self.delta: float = _float_sqrt(delta_sq)

        self.s_min: Fraction = min(f.s for f in maps)
        self.s_max: Fraction = max(f.s for f in maps)
        self.r_min: Fraction = min(f.r for f in maps)
        self.r_max: Fraction = max(f.r for f in maps)
        self.q: Fraction = min(f.r / f.s for f in maps)

        self._rf = tuple(float(f.r) for f in maps)
        self._sf = tuple(float(f.s) for f in maps)
        self._af = tuple(float(f.a) for f in maps)
        self._bf = tuple(float(f.b) for f in maps)

    def float_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(r, s, a, b) as float64 arrays, for numeric kernels."""
        return (
            np.array(self._rf, dtype=np.float64),
            np.array(self._sf, dtype=np.float64),
            np.array(self._af, dtype=np.float64),
            np.array(self._bf, dtype=np.float64),
        )

    def validate_word(self, u: Word) -> None:
        if any(not (1 <= c <= self.m) for c in u):
            raise AlphabetError(f"word {format_word(u)} uses letters outside 1..{self.m}")

    def __repr__(self) -> str:
        return f"SelfAffineSystem(m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SelfAffineSystem):
            return NotImplemented
        return self.maps == other.maps

    def __hash__(self) -> int:
        return hash(self.maps)

    def to_dict(self) -> dict:
        return {
            "maps": [
                {"r": str(f.r), "s": str(f.s), "a": str(f.a), "b": str(f.b)}
                for f in self.maps
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SelfAffineSystem":
        try:
            entries = data["maps"]
        except (TypeError, KeyError) as exc:
            raise ValidationError("system dict needs a 'maps' list") from exc
        return cls([
            AffineMapSpec.from_values(e["r"], e["s"], e["a"], e["b"]) for e in entries
        ])


def _float_sqrt(f: Fraction) -> float:
    """sqrt of an exact nonnegative rational; exact when it is a perfect square."""
    n, d = f.numerator, f.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return float(Fraction(rn, rd))
    return math.sqrt(n / d)


# ---------------------------------------------------------------------------
# operations


def compose(sys: SelfAffineSystem, u: Word) -> AffineParams:
    """Parameters of f_u = f_{u1} o ... o f_{un}, accumulated left to right.

    The empty word gives the identity parameters (1, 1, 0, 0).
    """
    sys.validate_word(u)
    R = 1.0
    S = 1.0
    A = 0.0
    B = 0.0
    rf, sf, af, bf = sys._rf, sys._sf, sys._af, sys._bf
    for c in u:
        k = c - 1
        A = A + R * af[k]
        B = B + S * bf[k]
        R = R * rf[k]
        S = S * sf[k]
    return AffineParams(R, S, A, B)


def cylinder_rect(sys: SelfAffineSystem, u: Word) -> Rect:
    """R_u = f_u(Q), a closed rectangle of width r_u and height s_u."""
    p = compose(sys, u)
    return Rect(p.a, p.a + p.r, p.b, p.b + p.s)


def point_of_address(sys: SelfAffineSystem, u: Word) -> PointEnclosure:
    """Enclosure of the attractor point with address starting with u.

    Every point of E whose address extends u lies in R_u, hence within
    ``radius`` (half the diagonal) of the returned center.
    """
    if len(u) == 0:
        raise ValidationError("empty prefix encloses all of Q; give at least one letter")
    p = compose(sys, u)
    return PointEnclosure(
        p.a + p.r / 2.0,
        p.b + p.s / 2.0,
        math.hypot(p.r, p.s) / 2.0,
    )


def cover(
    sys: SelfAffineSystem,
    window: Rect,
    width_threshold: float,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> list[Word]:
    """Minimal nonempty words u with R_u meeting the window and r_u <= threshold.

    Minimal means every proper nonempty prefix still has width above the
    threshold; the root is always subdivided, so the empty word is never
    returned. Words come back in lexicographic order. Every returned cylinder
    contains attractor points, since cylinders always do.
    """
    if not width_threshold > 0.0:
        raise ValidationError("width threshold must be positive")
    if depth_cap < 1:
        raise ValidationError("depth cap must be at least 1")
    out: list[Word] = []
    # stack of (word, params); children pushed in reverse letter order so the
    # traversal emits lexicographically
    stack: list[tuple[Word, AffineParams]] = [(b"", AffineParams(1.0, 1.0, 0.0, 0.0))]
    rf, sf, af, bf = sys._rf, sys._sf, sys._af, sys._bf
    while stack:
        u, p = stack.pop()
        rect = Rect(p.a, p.a + p.r, p.b, p.b + p.s)
        if not rect.intersects(window):
            continue
        if u and p.r <= width_threshold:
            out.append(u)
            continue
        if len(u) >= depth_cap:
            raise DepthCapError(
                f"cover needs words longer than the depth cap {depth_cap} "
                f"(width {p.r:.3g} still above threshold {width_threshold:.3g})",
                partial_depth=len(u),
            )
        for k in range(sys.m - 1, -1, -1):
            child = AffineParams(
                p.r * rf[k], p.s * sf[k], p.a + p.r * af[k], p.b + p.s * bf[k]
            )
            stack.append((u + bytes([k + 1]), child))
    return out
