"""Scenery flows: zoom ladders, view galleries, and boundary demonstrations.

A zoom ladder fixes a typical point (through a sampled address prefix) and
walks a geometric sequence of scales, recording for each scale the
single-cylinder depth, the normalized cylinder cover, its pattern report,
and how far the fine reference raster sits from both a product set and the
cover. Galleries collect the fine rasters alone, so scenery from different
starting points can be compared wholesale.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .conditions import bernoulli_admissible, column_count_M
from .errors import HypothesisFailure, ValidationError
from .gridset import GridSet, hausdorff, product_deviation, rasterize
from .ifs import DEPTH_CAP_DEFAULT, SelfAffineSystem, Word
from .measure import ProbVector, RandomSource, sample_address
from .views import approx_view, is_pattern, pattern_area_bound, raster_view


def thread_count() -> int:
    env = os.environ.get("TANGENTLAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"TANGENTLAB_THREADS must be an int, got {env!r}") from exc
    return min(8, os.cpu_count() or 1)


def zoom_scales(t0: float, rho: float, count: int) -> tuple[float, ...]:
    if not (0.0 < t0 < 0.5):
        raise ValidationError(f"t0 must be in (0, 1/2), got {t0}")
    if not (0.0 < rho < 1.0):
        raise ValidationError(f"rho must be in (0, 1), got {rho}")
    if count < 1:
        raise ValidationError("count must be at least 1")
    return tuple(t0 * rho**k for k in range(count))


def _require_admissible(sys: SelfAffineSystem, p: ProbVector) -> None:
    """Refuse weights outside the open admissibility region.

    Every p_j must be strictly between 0 and 1/M, where M is the maximal
    number of columns a vertical line can meet.
    """
    if len(p) != sys.m:
        raise ValidationError(f"got {len(p)} weights for {sys.m} maps")
    if not bernoulli_admissible(sys, p.values):
        M = column_count_M(sys)
        raise HypothesisFailure(
            f"weights are not admissible: need 0 < p_j < 1/M with M = {M}"
        )


def sample_typical_prefixes(
    sys: SelfAffineSystem,
    p: ProbVector,
    count: int,
    length: int,
    rng: RandomSource,
) -> list[Word]:
    """Addresses of typical points, one independent substream each."""
    _require_admissible(sys, p)
    return [sample_address(p, length, rng.substream(i)) for i in range(count)]


class ZoomRow(NamedTuple):
    k: int
    t: float
    depth_n: int
    level: int
    epsilon: float
    pattern: bool
    area: float
    area_bound: float
    bound_defined: bool
    product_dev: float
    grid_dist: float


@dataclass(frozen=True)
class ZoomReport:
    """One zoom ladder at a fixed point; a row per scale.

    ``product_dev`` is the distance of the fine raster from the product of
    the full x-axis with its own y-projection; ``grid_dist`` is the distance
    between the fine raster and the rasterized cylinder cover, both in window
    coordinates.
    """

    prefix: Word
    t0: float
    rho: float
    K: int
    n_grid: int
    rows: tuple[ZoomRow, ...]

    @property
    def all_patterns(self) -> bool:
        return all(r.pattern for r in self.rows)

    def to_csv(self) -> str:
        header = (
            "k,t,depth_n,level,epsilon,is_pattern,area,area_bound,"
            "bound_defined,product_deviation,grid_distance"
        )
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.k},{r.t!r},{r.depth_n},{r.level},{r.epsilon!r},"
                f"{int(r.pattern)},{r.area!r},{r.area_bound!r},"
                f"{int(r.bound_defined)},{r.product_dev!r},{r.grid_dist!r}"
            )
        return "\n".join(lines) + "\n"


def zoom_sequence(
    sys: SelfAffineSystem,
    p: ProbVector,
    prefix: Word,
    t0: float,
    count: int,
    rho: Optional[float] = None,
    K: int = 3,
    n_grid: int = 512,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> ZoomReport:
    """Walk scales t0 * rho^k, k < count, around one point.

    The weights ``p`` are the measure the starting point is typical for;
    they must be admissible or the ladder is refused, because none of the
    recorded quantities carry their intended meaning at a non-typical point.
    """
    if rho is None:
        rho = float(sys.s_min)
    _require_admissible(sys, p)
    scales = zoom_scales(t0, rho, count)
    bound = pattern_area_bound(sys, K)
    rows = []
    for k, t in enumerate(scales):
        view = approx_view(sys, prefix, t, K=K, depth_cap=depth_cap)
        pat = is_pattern(view)
        fine = raster_view(sys, prefix, t, n_grid, depth_cap=depth_cap)
        pdev = product_deviation(fine)
        cover_grid = rasterize(view.rects, n_grid)
        gdist = hausdorff(fine, cover_grid)
        rows.append(
            ZoomRow(
                k=k,
                t=t,
                depth_n=view.depth_n,
                level=view.level,
                epsilon=view.epsilon,
                pattern=pat.is_pattern,
                area=pat.area,
                area_bound=bound.value,
                bound_defined=bound.defined,
                product_dev=pdev,
                grid_dist=gdist,
            )
        )
    return ZoomReport(
        prefix=prefix, t0=t0, rho=rho, K=K, n_grid=n_grid, rows=tuple(rows)
    )


def run_zoom_batch(
    sys: SelfAffineSystem,
    p: ProbVector,
    prefixes: Sequence[Word],
    t0: float,
    count: int,
    rho: Optional[float] = None,
    K: int = 3,
    n_grid: int = 512,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> list[ZoomReport]:
    """Zoom ladders for many starting points, in worker threads.

    The heavy kernels release the interpreter lock, so threads give real
    parallelism; results come back in input order regardless of completion
    order.
    """
    _require_admissible(sys, p)
    if not prefixes:
        return []

    def job(prefix: Word) -> ZoomReport:
        return zoom_sequence(
            sys, p, prefix, t0, count, rho=rho, K=K, n_grid=n_grid, depth_cap=depth_cap
        )

    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        return list(ex.map(job, prefixes))


# ---------------------------------------------------------------------------
# galleries


@dataclass(frozen=True)
class Gallery:
    """Fine rasters of one point's scenery at strictly decreasing scales."""

    prefix: Word
    scales: tuple[float, ...]
    grids: tuple[GridSet, ...]

    def truncated(self, d: int) -> "Gallery":
        """The first d scales, shallowest kept."""
        if not (1 <= d <= len(self.grids)):
            raise ValidationError(f"cannot truncate to {d} of {len(self.grids)} scales")
        return Gallery(self.prefix, self.scales[:d], self.grids[:d])

    def from_depth(self, d: int) -> "Gallery":
        """The scenery from ladder step d onward, shallower views dropped."""
        if not (1 <= d <= len(self.grids)):
            raise ValidationError(f"no ladder step {d} in {len(self.grids)} scales")
        return Gallery(self.prefix, self.scales[d - 1 :], self.grids[d - 1 :])


def gallery_collect(
    sys: SelfAffineSystem,
    prefix: Word,
    scales: Sequence[float],
    n_grid: int,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> Gallery:
    scales = tuple(float(t) for t in scales)
    if not scales:
        raise ValidationError("gallery needs at least one scale")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValidationError("gallery scales must be strictly decreasing")

    def job(t: float) -> GridSet:
        return raster_view(sys, prefix, t, n_grid, depth_cap=depth_cap)

    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        grids = tuple(ex.map(job, scales))
    return Gallery(prefix=prefix, scales=scales, grids=grids)


class GalleryDistance(NamedTuple):
    """Matching distances between two view collections.

    ``one_sided`` asks that every view of the first collection sit near some
    view of the second; ``symmetric`` asks it in both directions.
    """

    one_sided: float
    symmetric: float


def _grids_of(g) -> tuple[GridSet, ...]:
    if isinstance(g, Gallery):
        return g.grids
    return tuple(g)


def gallery_distance(a, b) -> GalleryDistance:
    """Distance between two galleries under best-match pairing of views."""
    ga, gb = _grids_of(a), _grids_of(b)
    if not ga or not gb:
        raise ValidationError("gallery distance needs nonempty collections")
    dm = [[hausdorff(A, B) for B in gb] for A in ga]
    d_ab = max(min(row) for row in dm)
    d_ba = max(min(dm[i][j] for i in range(len(ga))) for j in range(len(gb)))
    return GalleryDistance(one_sided=d_ab, symmetric=max(d_ab, d_ba))


# ---------------------------------------------------------------------------
# boundary behaviour


@dataclass(frozen=True)
class BoundaryDemo:
    """Zooms at a fixed point on a vertical edge of the square.

    At such a point every window hangs halfway outside the unit square, so
    the occupied columns stay in one half of the view no matter how deep the
    zoom: magnification does not wash out the boundary. ``column_bounds``
    holds, per scale, the extreme occupied column index on the empty side.
    """

    side: str
    letter: int
    scales: tuple[float, ...]
    grids: tuple[GridSet, ...]
    column_bounds: tuple[int, ...]
    ok: bool


def boundary_demo(
    sys: SelfAffineSystem,
    side: str,
    n_grid: int = 512,
    t0: float = 0.1,
    count: int = 4,
    prefix_len: int = 48,
    depth_cap: int = DEPTH_CAP_DEFAULT,
) -> BoundaryDemo:
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    if side == "left":
        candidates = [j for j, f in enumerate(sys.maps) if f.a == 0]
    else:
        candidates = [j for j, f in enumerate(sys.maps) if f.a + f.r == 1]
    if not candidates:
        raise HypothesisFailure(f"no level-1 rectangle touches the {side} edge")
    j = min(candidates, key=lambda i: sys.maps[i].b)
    letter = j + 1
    prefix = bytes([letter]) * prefix_len

    scales = zoom_scales(t0, float(sys.s_min), count)
    grids = []
    bounds = []
    ok = True
    half = n_grid // 2
    for t in scales:
        gs = raster_view(sys, prefix, t, n_grid, depth_cap=depth_cap)
        (cols,) = gs.cells.any(axis=1).nonzero()
        if side == "left":
            bound = int(cols.min())
            ok = ok and bound >= half - 1
        else:
            bound = int(cols.max())
            ok = ok and bound <= half
        grids.append(gs)
        bounds.append(bound)
    return BoundaryDemo(
        side=side,
        letter=letter,
        scales=scales,
        grids=tuple(grids),
        column_bounds=tuple(bounds),
        ok=ok,
    )
