"""Magnified views of the attractor and their pattern structure.

A view at scale t around an attractor point x is the normalized picture
h(E intersect Q(x, t)), where Q(x, t) is the closed axis-aligned square of
side t centered at x and h(y) = (y - x) / t + 1/2 sends the window onto the
unit square. Points are addressed by finite prefixes, which pin them down
only to a cylinder; every yes/no decision here is therefore made
simultaneously for all points the prefix can still denote, and a decision
that would depend on where the point sits inside its enclosure raises
EnclosureError instead of guessing.

Coordinates of rectangles use the nominal cylinder center. The enclosure is
many orders of magnitude smaller than the tolerances carried by the numeric
outputs, so only the logical decisions need the unanimity treatment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from . import _kernels
from .conditions import k_tilde, separation_delta
from .errors import (
    DepthCapError,
    EmptinessError,
    EnclosureError,
    InvariantViolation,
    ValidationError,
)
from .fibres import section_intervals
from .gridset import GridSet, check_grid_n
from .ifs import (
    DEPTH_CAP_DEFAULT,
    ENUM_CAP_DEFAULT,
    AffineParams,
    Rational,
    Rect,
    RectUnion,
    SelfAffineSystem,
    Word,
    as_fraction,
    compose,
    format_word,
)

VIEW_RESOLUTION = 2.0 ** -10


@dataclass(frozen=True)
class Window:
    """Closed square of side t around a point known only up to a cylinder.

    ``x1, x2`` are the nominal center (cylinder midpoint); ``xlo..yhi`` bound
    where the true point can be. ``rect`` is the window at the nominal center
    and is what all coordinate arithmetic uses. ``clipped`` flags windows that
    stick out of the unit square; the part outside holds no attractor, so
    nothing is cut, but such views are the boundary counterexamples and are
    worth telling apart.
    """

    prefix: Word
    t: float
    x1: float
    x2: float
    xlo: float
    xhi: float
    ylo: float
    yhi: float
    rect: Rect
    clipped: bool = False

    def meets_for_all(self, r: Rect) -> bool:
        h = self.t / 2.0
        return (
            self.xhi - h <= r.x1
            and self.xlo + h >= r.x0
            and self.yhi - h <= r.y1
            and self.ylo + h >= r.y0
        )

    def meets_for_some(self, r: Rect) -> bool:
        h = self.t / 2.0
        return (
            self.xlo - h <= r.x1
            and self.xhi + h >= r.x0
            and self.ylo - h <= r.y1
            and self.yhi + h >= r.y0
        )

    def meets(self, r: Rect, level: int) -> bool:
        """True/False only when every candidate center agrees."""
        if self.meets_for_all(r):
            return True
        if not self.meets_for_some(r):
            return False
        raise EnclosureError(
            f"a level-{level} cylinder meets the window for some candidate "
            f"centers of prefix {format_word(self.prefix)} but not all; "
            "lengthen the prefix",
            level=level,
        )

    def contains_for_all(self, r: Rect) -> bool:
        """r inside the window no matter where the true center is."""
        h = self.t / 2.0
        return (
            r.x0 >= self.xhi - h
            and r.x1 <= self.xlo + h
            and r.y0 >= self.yhi - h
            and r.y1 <= self.ylo + h
        )

    def normalize(self, r: Rect) -> Rect:
        """Window coordinates: (v - center) / t + 1/2 per axis."""
        return Rect(
            (r.x0 - self.x1) / self.t + 0.5,
            (r.x1 - self.x1) / self.t + 0.5,
            (r.y0 - self.x2) / self.t + 0.5,
            (r.y1 - self.x2) / self.t + 0.5,
        )


def make_window(sys: SelfAffineSystem, prefix: Word, t: float) -> Window:
    if not prefix:
        raise ValidationError("a window needs a nonempty address prefix")
    if not (0.0 < t < 0.5):
        raise ValidationError(f"scale must satisfy 0 < t < 1/2, got {t}")
    sys.validate_word(prefix)
    p = compose(sys, prefix)
    if math.hypot(p.r, p.s) / 2.0 > t * 1e-3:
        raise EnclosureError(
            f"prefix of length {len(prefix)} pins the point only to within "
            f"{math.hypot(p.r, p.s) / 2.0:.3g}; need at most t/1000 = {t * 1e-3:.3g}",
            level=len(prefix),
        )
    c1 = p.a + p.r / 2.0
    c2 = p.b + p.s / 2.0
    h = t / 2.0
    rect = Rect(c1 - h, c1 + h, c2 - h, c2 + h)
    clipped = rect.x0 < 0.0 or rect.x1 > 1.0 or rect.y0 < 0.0 or rect.y1 > 1.0
    return Window(
        prefix=prefix,
        t=t,
        x1=c1,
        x2=c2,
        xlo=p.a,
        xhi=p.a + p.r,
        ylo=p.b,
        yhi=p.b + p.s,
        rect=rect,
        clipped=clipped,
    )


def _rect_of(p: AffineParams) -> Rect:
    return Rect(p.a, p.a + p.r, p.b, p.b + p.s)


def _expand(
    sys: SelfAffineSystem, win: Window, frontier: list, level: int
) -> list:
    """All children of the frontier that meet the window, unanimously."""
    rf, sf, af, bf = sys._rf, sys._sf, sys._af, sys._bf
    out = []
    for u, p in frontier:
        for k in range(sys.m):
            child = AffineParams(
                p.r * rf[k], p.s * sf[k], p.a + p.r * af[k], p.b + p.s * bf[k]
            )
            if win.meets(_rect_of(child), level):
                out.append((u + bytes([k + 1]), child))
    return out


class DepthReport(NamedTuple):
    """Largest level n at which the window meets exactly one cylinder."""

    n: int
    word: Word
    terminal_level: int


def single_cylinder_depth(
    sys: SelfAffineSystem,
    prefix: Word,
    t: float,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> DepthReport:
    """n(x, t): the deepest level met by the window in a single cylinder.

    Scans level by level. Once some intersecting cylinder lies entirely
    inside the window, every deeper level meets at least m >= 2 cylinders,
    so the scan can stop; the last level with a one-cylinder frontier is n.
    """
    win = make_window(sys, prefix, t)
    frontier = [(b"", AffineParams(1.0, 1.0, 0.0, 0.0))]
    best_n = 0
    best_word: Word = b""
    level = 0
    while True:
        if len(frontier) == 1:
            best_n = level
            best_word = frontier[0][0]
        if any(win.contains_for_all(_rect_of(p)) for _, p in frontier):
            break
        if level >= depth_cap:
            raise DepthCapError(
                f"no cylinder inside the window after {level} levels; "
                "the scale may be too large for the depth cap",
                partial_depth=level,
            )
        frontier = _expand(sys, win, frontier, level + 1)
        if not frontier:
            raise InvariantViolation(
                "window lost all cylinders during the level scan; the prefix "
                "path should always survive"
            )
        level += 1
    p_best = compose(sys, best_word)
    if not sys.delta * p_best.s < t * math.sqrt(2.0):
        raise InvariantViolation(
            f"depth witness violates the thin-window relation: "
            f"delta * s_u = {sys.delta * p_best.s:.6g} >= sqrt(2) t = {t * math.sqrt(2.0):.6g}"
        )
    return DepthReport(n=best_n, word=best_word, terminal_level=level)


def epsilon_level(sys: SelfAffineSystem, K: int) -> float:
    """Height bound for pieces of a level-(n + K) view: (s_max)^K sqrt(2)/delta."""
    if K < 0:
        raise ValidationError("K must be nonnegative")
    return float(sys.s_max**K) * math.sqrt(2.0) / sys.delta


@dataclass(frozen=True)
class ViewCover:
    """Normalized magnified view: cylinder pieces clipped to the window.

    ``rects`` live in window coordinates inside [0, 1]^2 (up to float dust at
    the clipped edges); heights are below ``epsilon``. ``resolution`` is the
    coordinate scale below which gap questions stop being meaningful.
    """

    words: tuple[Word, ...]
    rects: RectUnion
    depth_n: int
    level: int
    epsilon: float
    window: Window
    resolution: float = field(default=VIEW_RESOLUTION)


def approx_view(
    sys: SelfAffineSystem,
    prefix: Word,
    t: float,
    K: int = 3,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> ViewCover:
    """The level-(n + K) cylinder cover of the window, normalized.

    n is the single-cylinder depth of the window; descending K extra levels
    splits the unique witness into pieces whose normalized heights fall under
    epsilon_level(sys, K), which is what makes the stripe pattern visible.
    """
    if K < 0:
        raise ValidationError("K must be nonnegative")
    rep = single_cylinder_depth(sys, prefix, t, depth_cap=depth_cap)
    target = rep.n + K
    if target > depth_cap:
        raise DepthCapError(
            f"view needs level {target} above the depth cap {depth_cap}",
            partial_depth=rep.n,
        )
    win = make_window(sys, prefix, t)
    frontier = [(b"", AffineParams(1.0, 1.0, 0.0, 0.0))]
    for level in range(1, target + 1):
        frontier = _expand(sys, win, frontier, level)
    if not frontier:
        raise EmptinessError("view cover came out empty; this cannot happen")
    eps = epsilon_level(sys, K)
    words = []
    rects = []
    for u, p in frontier:
        clipped = _rect_of(p).clip(win.rect)
        if clipped is None:
            # unanimity said every candidate center meets it, so the nominal
            # center cannot miss it
            raise InvariantViolation(f"cylinder {format_word(u)} lost in clipping")
        nr = win.normalize(clipped)
        if nr.height > eps * (1.0 + 1e-9):
            raise InvariantViolation(
                f"normalized piece height {nr.height:.6g} exceeds the bound {eps:.6g}"
            )
        words.append(u)
        rects.append(nr)
    return ViewCover(
        words=tuple(words),
        rects=tuple(rects),
        depth_n=rep.n,
        level=target,
        epsilon=eps,
        window=win,
    )


# ---------------------------------------------------------------------------
# pattern structure


@dataclass(frozen=True)
class PatternReport:
    """Outcome of the stripe-pattern test on a view.

    A view is a pattern at height eps when its pieces merge into horizontal
    slabs, each of positive height at most eps, and every slab spans the full
    x-range (no gap wider than tol_x). ``area`` is the total slab height, a
    proxy for the window fraction the set occupies vertically.
    """

    is_pattern: bool
    slabs: tuple[tuple[float, float], ...]
    area: float
    max_height: float
    tol_x: float
    reason: Optional[str] = None


def is_pattern(
    view: ViewCover,
    eps: Optional[float] = None,
    tol_x: Optional[float] = None,
) -> PatternReport:
    """Decide whether the view is a union of thin full-width bands.

    Pieces whose y-intervals touch merge into a slab; a slab of height at
    most eps counts as a full-width band when the x-projections of its
    pieces cover [0, 1] with no gap wider than tol_x. A slab is then within
    eps of the exact band [0, 1] x (its y-span), which is the sense in which
    the view equals a product of [0, 1] with a union of intervals."""
    if eps is None:
        eps = view.epsilon
    if tol_x is None:
        tol_x = view.resolution
    rects = view.rects
    if not rects:
        raise EmptinessError("pattern test on an empty view")

    by_y = sorted(rects, key=lambda r: (r.y0, r.y1))
    slabs: list[tuple[float, float, list[Rect]]] = []
    cur_lo, cur_hi = by_y[0].y0, by_y[0].y1
    members: list[Rect] = [by_y[0]]
    for r in by_y[1:]:
        if r.y0 <= cur_hi:
            members.append(r)
            if r.y1 > cur_hi:
                cur_hi = r.y1
        else:
            slabs.append((cur_lo, cur_hi, members))
            cur_lo, cur_hi, members = r.y0, r.y1, [r]
    slabs.append((cur_lo, cur_hi, members))

    spans = tuple((lo, hi) for lo, hi, _ in slabs)
    area = float(sum(hi - lo for lo, hi in spans))
    max_height = max(hi - lo for lo, hi in spans)

    def fail(reason: str) -> PatternReport:
        return PatternReport(False, spans, area, max_height, tol_x, reason)

    for lo, hi, rs in slabs:
        if hi - lo <= 0.0:
            return fail(f"zero-height slab at y = {lo:.6g}")
        if hi - lo > eps:
            return fail(f"slab [{lo:.6g}, {hi:.6g}] is taller than eps = {eps:.6g}")
        cursor = 0.0
        for x0, x1 in sorted((r.x0, r.x1) for r in rs):
            if x0 - cursor > tol_x:
                return fail(
                    f"x-gap [{cursor:.6g}, {x0:.6g}] in slab y = [{lo:.6g}, {hi:.6g}]"
                )
            if x1 > cursor:
                cursor = x1
        if 1.0 - cursor > tol_x:
            return fail(
                f"slab y = [{lo:.6g}, {hi:.6g}] spans only up to x = {cursor:.6g}"
            )
    return PatternReport(True, spans, area, max_height, tol_x, None)


class AreaBound(NamedTuple):
    """Ceiling (1 - delta)^(K - k) on the pattern area, when defined."""

    value: float
    k_tilde: int
    defined: bool


def pattern_area_bound(sys: SelfAffineSystem, K: int) -> AreaBound:
    """Largest window-height fraction slabs can cover: separation carves a
    delta-gap out of every level past k, so the area shrinks geometrically.
    Below K = k the only ceiling is the trivial one."""
    kt = k_tilde(sys)
    if K < kt:
        return AreaBound(1.0, kt, False)
    d = separation_delta(sys)
    if d.exact is not None:
        value = float((1 - d.exact) ** (K - kt))
    else:
        value = (1.0 - d.value) ** (K - kt)
    return AreaBound(value, kt, True)


# ---------------------------------------------------------------------------
# vertical sections


def vertical_section_diameter(
    sys: SelfAffineSystem,
    x1: Rational,
    depth: int,
    enum_cap: int = ENUM_CAP_DEFAULT,
) -> tuple[float, float]:
    """(lower, upper) bounds for the diameter of the section over x1.

    Exact level-``depth`` cylinder extents give the sandwich: the section sits
    inside their union, and when the column structure tiles the x-axis every
    listed cylinder holds section points, so the spread between the highest
    bottom and the lowest top is forced.
    """
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    x = as_fraction(x1)
    if not 0 <= x <= 1:
        raise ValidationError(f"x1 must lie in [0, 1], got {x1!r}")
    ivs = section_intervals(sys, x, depth, enum_cap)
    top = max(hi for _, hi in ivs)
    bot = min(lo for lo, _ in ivs)
    hi_bot = max(lo for lo, _ in ivs)
    lo_top = min(hi for _, hi in ivs)
    lower = max(Fraction(0), hi_bot - lo_top)
    return (float(lower), float(top - bot))


# ---------------------------------------------------------------------------
# reference rasters


def raster_view(
    sys: SelfAffineSystem,
    prefix: Word,
    t: float,
    n_grid: int,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> GridSet:
    """Fine occupancy raster of the window, descending until cylinder widths
    fall below one cell. This is the reference picture views and patterns are
    compared against; it uses the nominal window placement."""
    win = make_window(sys, prefix, t)
    check_grid_n(n_grid)
    rf, sf, af, bf = sys.float_arrays()
    cells = _kernels.raster_cover(
        rf, sf, af, bf, win.x1, win.x2, t, n_grid, t / n_grid, depth_cap
    )
    return GridSet(cells)
