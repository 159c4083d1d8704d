"""Dyadic occupancy grids on the unit square and the Hausdorff metric on them.

A grid set is a boolean N x N array over [0, 1]^2 with N a power of two,
indexed [ix, iy]; cell (i, j) is the closed square
[i/N, (i+1)/N] x [j/N, (j+1)/N]. Rasterization is the closed-intersection
rule: a cell is occupied when its closed square meets the closed input
rectangle. Because N is a power of two and at most 4096, products x * N and
the shifted value x * N - 1 are exact in binary64 for x in [0, 1], so the
index arithmetic has no rounding slop.

Distances are computed through an exact integer squared Euclidean distance
transform; `hausdorff_sq` returns the squared value in cell units as a plain
int so tests can compare it against brute force without any float tolerance.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .errors import EmptinessError, GridShapeError, ValidationError
from .ifs import Rect

GRID_MIN = 64
GRID_MAX = 4096

_RLE_MAGIC = "tangentlab-grid 1"


def check_grid_n(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"grid size must be an int, got {n!r}")
    if n < GRID_MIN or n > GRID_MAX or (n & (n - 1)) != 0:
        raise ValidationError(
            f"grid size must be a power of two in [{GRID_MIN}, {GRID_MAX}], got {n}"
        )
    return n


class GridSet:
    """Immutable boolean occupancy grid with a cached distance transform."""

    __slots__ = ("cells", "_edt_sq")

    def __init__(self, cells: np.ndarray):
        cells = np.ascontiguousarray(cells, dtype=np.bool_)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise GridShapeError(f"expected a square 2-d array, got shape {cells.shape}")
        check_grid_n(int(cells.shape[0]))
        cells.setflags(write=False)
        self.cells = cells
        self._edt_sq: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.cells.shape[0])

    @property
    def count(self) -> int:
        return int(self.cells.sum())

    @property
    def is_empty(self) -> bool:
        return not self.cells.any()

    def edt_sq(self) -> np.ndarray:
        """Squared distance, in cell units, from each cell to the nearest
        occupied cell. Cached after the first call."""
        if self.is_empty:
            raise EmptinessError("distance transform of an empty grid")
        if self._edt_sq is None:
            self._edt_sq = _kernels.edt_sq(self.cells)
            self._edt_sq.setflags(write=False)
        return self._edt_sq

    def y_projection(self) -> np.ndarray:
        """Boolean length-N mask of occupied rows (second-axis indices)."""
        return self.cells.any(axis=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.n, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"GridSet(n={self.n}, count={self.count})"


def rasterize(rects: Iterable[Rect], n: int) -> GridSet:
    """Grid occupancy of a finite union of closed rectangles."""
    check_grid_n(n)
    cells = np.zeros((n, n), dtype=np.bool_)
    for r in rects:
        i0 = max(0, math.ceil(r.x0 * n - 1.0))
        i1 = min(n - 1, math.floor(r.x1 * n))
        j0 = max(0, math.ceil(r.y0 * n - 1.0))
        j1 = min(n - 1, math.floor(r.y1 * n))
        if i0 > i1 or j0 > j1:
            continue
        cells[i0 : i1 + 1, j0 : j1 + 1] = True
    return GridSet(cells)


def _directed_sq(a: GridSet, b: GridSet) -> int:
    return int(b.edt_sq()[a.cells].max())


def hausdorff_sq(a: GridSet, b: GridSet) -> int:
    """Squared Hausdorff distance in cell units, exact integer."""
    if not isinstance(a, GridSet) or not isinstance(b, GridSet):
        raise TypeError("hausdorff_sq expects GridSet arguments")
    if a.n != b.n:
        raise GridShapeError(f"grid sizes differ: {a.n} vs {b.n}")
    if a.is_empty or b.is_empty:
        raise EmptinessError("Hausdorff distance with an empty grid")
    return max(_directed_sq(a, b), _directed_sq(b, a))


def hausdorff(a: GridSet, b: GridSet) -> float:
    """Hausdorff distance between occupied cell centers, scaled to [0, 1]
    coordinates (sqrt of the exact squared cell distance, divided by N)."""
    return math.sqrt(hausdorff_sq(a, b)) / a.n


def product_grid(y_mask: np.ndarray, n: int) -> GridSet:
    """The grid set [0, 1] x Y for a boolean row mask Y."""
    check_grid_n(n)
    y_mask = np.asarray(y_mask, dtype=np.bool_)
    if y_mask.shape != (n,):
        raise GridShapeError(f"row mask must have shape ({n},), got {y_mask.shape}")
    cells = np.broadcast_to(y_mask, (n, n)).copy()
    return GridSet(cells)


def product_deviation(gs: GridSet) -> float:
    """Distance from a grid set to the product of the full first axis with
    its own second-axis projection. Zero exactly when the set is such a
    product; tangent-set candidates are judged by how small this gets."""
    if gs.is_empty:
        raise EmptinessError("product deviation of an empty grid")
    return hausdorff(gs, product_grid(gs.y_projection(), gs.n))


def encode_pgm(img: np.ndarray) -> bytes:
    """Binary PGM (P5) for a uint8 image whose row 0 is the top."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 2:
        raise GridShapeError(f"PGM needs a 2-d image, got shape {img.shape}")
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def to_pgm(gs: GridSet) -> bytes:
    """Binary PGM (P5) image, occupied cells black on white, row 0 at the
    top of the image (largest second-axis index first)."""
    return encode_pgm(np.where(gs.cells.T[::-1, :], 0, 255))


def encode_rle(gs: GridSet) -> str:
    """Compact deterministic text encoding, run lengths over the C-order
    flattening of the cell array."""
    flat = gs.cells.ravel()
    runs = []
    for value, group in itertools.groupby(flat.tolist()):
        runs.append(f"{len(list(group))}x{1 if value else 0}")
    return f"{_RLE_MAGIC} {gs.n}\n" + " ".join(runs) + "\n"


def decode_rle(text: str) -> GridSet:
    lines = text.strip("\n").split("\n")
    if len(lines) != 2:
        raise ValidationError("run-length grid text must have exactly two lines")
    head = lines[0].rsplit(" ", 1)
    if len(head) != 2 or head[0] != _RLE_MAGIC:
        raise ValidationError(f"bad grid header: {lines[0]!r}")
    n = check_grid_n(int(head[1]))
    flat = np.empty(n * n, dtype=np.bool_)
    pos = 0
    for token in lines[1].split():
        length_s, _, value_s = token.partition("x")
        length = int(length_s)
        if length <= 0 or value_s not in ("0", "1") or pos + length > n * n:
            raise ValidationError(f"bad run token {token!r}")
        flat[pos : pos + length] = value_s == "1"
        pos += length
    if pos != n * n:
        raise ValidationError(f"run lengths cover {pos} cells, expected {n * n}")
    return GridSet(flat.reshape(n, n))
