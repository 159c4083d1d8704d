"""Structural hypotheses of a system, verified in exact rational arithmetic.

Everything here is decidable from the level-1 data (or bounded-level
enumerations), so results are exact: the squared separation distance, the
maximal column multiplicity M, the least vertical-segment order, the
anisotropy ratio q, and the aligned column structure when present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import EnumerationCapError, HypothesisFailure, ValidationError
from .fibres import GLStructure
from .ifs import ENUM_CAP_DEFAULT, SelfAffineSystem

__all__ = [
    "SeparationDelta",
    "HypothesisReport",
    "separation_delta",
    "column_count_M",
    "vertical_segment_order",
    "anisotropy_q",
    "bernoulli_admissible",
    "gl_alignment",
    "k_tilde",
    "build_report",
]


class SeparationDelta(NamedTuple):
    """Minimum distance between distinct level-1 rectangles.

    ``sq`` is always exact; ``exact`` is the rational square root when one
    exists (it does whenever the minimum is realised along an axis), else
    None and ``value`` is the binary64 sqrt.
    """

    value: float
    sq: Fraction
    exact: Fraction | None


def _exact_sqrt(f: Fraction) -> Fraction | None:
    rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None


def separation_delta(sys: SelfAffineSystem) -> SeparationDelta:
    sq = sys.delta_sq
    exact = _exact_sqrt(sq)
    value = float(exact) if exact is not None else math.sqrt(float(sq))
    return SeparationDelta(value=value, sq=sq, exact=exact)


def column_count_M(sys: SelfAffineSystem) -> int:
    """Max number of level-1 rectangles a vertical segment can meet.

    Closed intervals: a segment through a shared endpoint counts both sides.
    The maximum of a closed-interval multiplicity function is attained at an
    endpoint, so endpoints are the only candidates.
    """
    iv = [(f.a, f.a + f.r) for f in sys.maps]
    candidates = sorted({e for lo, hi in iv for e in (lo, hi)})
    return max(sum(1 for lo, hi in iv if lo <= x <= hi) for x in candidates)


def _x_interval_counts(
    sys: SelfAffineSystem, n: int, enum_cap: int
) -> dict[tuple[Fraction, Fraction], int]:
    """Multiset of level-n x-projections [a_u, a_u + r_u], exact, deduplicated."""
    if sys.m**n > enum_cap:
        raise EnumerationCapError(
            f"level-{n} projection enumeration needs {sys.m ** n} intervals",
            needed=sys.m**n,
            cap=enum_cap,
        )
    counts: dict[tuple[Fraction, Fraction], int] = {(Fraction(0), Fraction(1)): 1}
    for _ in range(n):
        nxt: dict[tuple[Fraction, Fraction], int] = {}
        for (lo, w), c in counts.items():
            for f in sys.maps:
                key = (lo + w * f.a, w * f.r)
                nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    return counts


def _min_multiplicity(intervals: list[tuple[Fraction, Fraction, int]]) -> int:
    """Min over x in [0,1] of the weighted count of closed intervals containing x."""
    pts = {Fraction(0), Fraction(1)}
    pts.update(e for lo, hi, _ in intervals for e in (lo, hi))
    ordered = sorted(pts)
    candidates = list(ordered)
    candidates.extend((a + b) / 2 for a, b in zip(ordered, ordered[1:]))
    return min(
        sum(c for lo, hi, c in intervals if lo <= x <= hi)
        for x in candidates
        if 0 <= x <= 1
    )


def vertical_segment_order(
    sys: SelfAffineSystem, n_max: int = 4, enum_cap: int = ENUM_CAP_DEFAULT
) -> int:
    """Least n <= n_max such that every vertical segment of Q meets at least
    two level-n rectangles. Raises HypothesisFailure when no such n exists
    within the bound."""
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    for n in range(1, n_max + 1):
        counts = _x_interval_counts(sys, n, enum_cap)
        triples = [(lo, lo + w, c) for (lo, w), c in counts.items()]
        if _min_multiplicity(triples) >= 2:
            return n
    raise HypothesisFailure(
        f"some vertical segment meets fewer than two level-n rectangles "
        f"for every n <= {n_max}"
    )


def anisotropy_q(sys: SelfAffineSystem) -> Fraction:
    """min_j r_j / s_j, exact; greater than 1 by map validation."""
    return sys.q


def bernoulli_admissible(sys: SelfAffineSystem, p: Sequence) -> bool:
    """True iff p is a probability vector with 0 < p_j < 1/M for every j.

    Comparisons are exact: float entries embed exactly into Fractions. The sum
    check tolerates 1e-12 to accommodate float inputs like [1/6]*6.
    """
    if len(p) != sys.m:
        raise ValidationError(f"need {sys.m} probabilities, got {len(p)}")
    fractions = [Fraction(v) if not isinstance(v, Fraction) else v for v in p]
    total = sum(fractions)
    if abs(total - 1) > Fraction(1, 10**12):
        return False
    bound = Fraction(1, column_count_M(sys))
    return all(0 < v < bound for v in fractions)


def gl_alignment(sys: SelfAffineSystem) -> GLStructure | None:
    """Column structure when level-1 x-projections coincide or tile.

    Two projections must either be identical (exact endpoint equality) or have
    disjoint interiors, and their union must be [0,1]. Returns None when the
    system is not aligned.
    """
    groups: dict[tuple[Fraction, Fraction], list[int]] = {}
    for j, f in enumerate(sys.maps, start=1):
        groups.setdefault((f.a, f.a + f.r), []).append(j)
    spans = sorted(groups)
    if spans[0][0] != 0 or spans[-1][1] != 1:
        return None
    for (lo0, hi0), (lo1, hi1) in zip(spans, spans[1:]):
        if lo1 != hi0:  # gap or interior overlap
            return None
    breakpoints = tuple([spans[0][0]] + [hi for _, hi in spans])
    letter_groups = tuple(tuple(groups[span]) for span in spans)
    vmaps = tuple(
        tuple((sys.maps[j - 1].s, sys.maps[j - 1].b) for j in g) for g in letter_groups
    )
    return GLStructure(breakpoints=breakpoints, groups=letter_groups, vmaps=vmaps)


def k_tilde(sys: SelfAffineSystem) -> int:
    """Integer part of log(delta/2) / log(s_max), by exact power comparison.

    Equals the largest k with (s_max)^k >= delta/2; computed on squares so an
    irrational delta needs no rounding: (s_max)^{2k} >= delta^2 / 4.
    """
    bound = sys.delta_sq / 4
    s2 = sys.s_max * sys.s_max
    k = 0
    power = s2
    while power >= bound:
        k += 1
        power *= s2
    return k


@dataclass(frozen=True)
class HypothesisReport:
    """Everything the experiments assume about a system, in one record."""

    m: int
    delta: SeparationDelta
    M: int
    n_tilde: int | None
    q: Fraction
    k_tilde: int
    admissible_p_bound: Fraction
    gl: GLStructure | None
    p_admissible: bool | None = None
    failures: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        gl = None
        if self.gl is not None:
            gl = {
                "breakpoints": [str(b) for b in self.gl.breakpoints],
                "groups": [list(g) for g in self.gl.groups],
            }
        return {
            "m": self.m,
            "delta": self.delta.value,
            "delta_sq_exact": str(self.delta.sq),
            "delta_exact": None if self.delta.exact is None else str(self.delta.exact),
            "M": self.M,
            "n_tilde": self.n_tilde,
            "q": float(self.q),
            "q_exact": str(self.q),
            "k_tilde": self.k_tilde,
            "admissible_p_bound": float(self.admissible_p_bound),
            "admissible_p_bound_exact": str(self.admissible_p_bound),
            "gl": gl,
            "p_admissible": self.p_admissible,
            "failures": list(self.failures),
        }


def build_report(
    sys: SelfAffineSystem,
    p: Sequence | None = None,
    n_max: int = 4,
    enum_cap: int = ENUM_CAP_DEFAULT,
) -> HypothesisReport:
    failures: list[str] = []
    delta = separation_delta(sys)
    M = column_count_M(sys)
    try:
        n_tilde: int | None = vertical_segment_order(sys, n_max=n_max, enum_cap=enum_cap)
    except HypothesisFailure as exc:
        n_tilde = None
        failures.append(str(exc))
    bound = Fraction(1, M)
    p_admissible: bool | None = None
    if p is not None:
        p_admissible = bernoulli_admissible(sys, p)
        if not p_admissible:
            failures.append(
                f"probability vector is not admissible: need 0 < p_j < 1/M "
                f"with M = {M}, so p_j < {bound} = {float(bound)}"
            )
    gl = gl_alignment(sys)
    if gl is None:
        failures.append(
            "level-1 x-projections neither coincide nor tile [0,1]; "
            "no column structure is available"
        )
    return HypothesisReport(
        m=sys.m,
        delta=delta,
        M=M,
        n_tilde=n_tilde,
        q=anisotropy_q(sys),
        k_tilde=k_tilde(sys),
        admissible_p_bound=bound,
        gl=gl,
        p_admissible=p_admissible,
        failures=tuple(failures),
    )
