"""Occupancy grids: rasterization, exact Hausdorff metric, serialization."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tangentlab import (
    GridSet,
    Rect,
    check_grid_n,
    decode_rle,
    encode_rle,
    hausdorff,
    hausdorff_sq,
    product_deviation,
    product_grid,
    rasterize,
    to_pgm,
)
from tangentlab.errors import EmptinessError, GridShapeError, ValidationError


def random_grid(rng, n=64, fill=0.1):
    cells = rng.random((n, n)) < fill
    if not cells.any():
        cells[rng.integers(n), rng.integers(n)] = True
    return GridSet(cells)


def brute_hausdorff_sq(a: GridSet, b: GridSet) -> int:
    """O(count^2) pairwise integer distances, numpy broadcast."""
    pa = np.argwhere(a.cells).astype(np.int64)
    pb = np.argwhere(b.cells).astype(np.int64)
    d2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
    return int(max(d2.min(axis=1).max(), d2.min(axis=0).max()))


def test_grid_size_gate():
    check_grid_n(64)
    check_grid_n(4096)
    for bad in (32, 100, 8192, 0, -64, True):
        with pytest.raises(ValidationError):
            check_grid_n(bad)
    with pytest.raises(GridShapeError):
        GridSet(np.zeros((64, 32), dtype=bool))


def test_point_rect_touches_four_cells():
    gs = rasterize([Rect(0.5, 0.5, 0.5, 0.5)], 64)
    assert gs.count == 4
    assert gs.cells[31:33, 31:33].all()


def test_rasterize_closed_semantics():
    # a rect ending exactly on a cell border marks the neighbour cell too
    gs = rasterize([Rect(0.0, 1.0 / 64.0, 0.0, 1.0)], 64)
    assert gs.cells[0].all() and gs.cells[1].all()
    assert not gs.cells[2].any()


def test_rasterize_matches_exact_interval_arithmetic():
    rng = np.random.default_rng(5)
    n = 64
    for _ in range(25):
        lo = rng.integers(0, 512, size=2)
        hi = lo + rng.integers(0, 512 - lo.max(), size=2)
        fx0, fx1 = Fraction(int(lo[0]), 512), Fraction(int(hi[0]), 512)
        fy0, fy1 = Fraction(int(lo[1]), 512), Fraction(int(hi[1]), 512)
        gs = rasterize([Rect(float(fx0), float(fx1), float(fy0), float(fy1))], n)
        for i in range(n):
            xi = fx0 <= Fraction(i + 1, n) and Fraction(i, n) <= fx1
            for j in range(n):
                yj = fy0 <= Fraction(j + 1, n) and Fraction(j, n) <= fy1
                assert gs.cells[i, j] == (xi and yj)


def test_rasterize_monotone_in_rect_list():
    rects = [Rect(0.1, 0.4, 0.2, 0.3), Rect(0.5, 0.9, 0.6, 0.61)]
    a = rasterize(rects[:1], 128)
    b = rasterize(rects, 128)
    assert (a.cells <= b.cells).all()
    assert b.count > a.count


def test_grid_set_basics():
    cells = np.zeros((64, 64), dtype=bool)
    cells[3, 10] = True
    gs = GridSet(cells)
    assert gs.n == 64 and gs.count == 1 and not gs.is_empty
    assert gs.y_projection()[10] and gs.y_projection().sum() == 1
    assert gs == GridSet(cells.copy())
    assert hash(gs) == hash(GridSet(cells.copy()))
    with pytest.raises(ValueError):
        gs.cells[0, 0] = True  # immutable
    with pytest.raises(EmptinessError):
        GridSet(np.zeros((64, 64), dtype=bool)).edt_sq()


def test_corner_distance_is_one():
    n = 1024
    a = np.zeros((n, n), dtype=bool)
    b = np.zeros((n, n), dtype=bool)
    a[0, 0] = True
    b[0, n - 1] = True
    b[n - 1, 0] = True
    d = hausdorff(GridSet(a), GridSet(b))
    assert abs(d - 1.0) < 2.0 / n


def test_hausdorff_exact_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b = random_grid(rng), random_grid(rng)
        assert hausdorff_sq(a, b) == brute_hausdorff_sq(a, b)


def test_hausdorff_metric_properties():
    rng = np.random.default_rng(23)
    for _ in range(10):
        a, b, c = (random_grid(rng) for _ in range(3))
        assert hausdorff_sq(a, a) == 0
        assert hausdorff_sq(a, b) == hausdorff_sq(b, a)
        assert hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12


def test_hausdorff_argument_errors():
    a = random_grid(np.random.default_rng(0), n=64)
    b = random_grid(np.random.default_rng(1), n=128)
    with pytest.raises(GridShapeError):
        hausdorff_sq(a, b)
    with pytest.raises(TypeError):
        hausdorff_sq(a, a.cells)
    with pytest.raises(EmptinessError):
        hausdorff_sq(a, GridSet(np.zeros((64, 64), dtype=bool)))


def test_product_grid_and_deviation():
    n = 64
    y = np.zeros(n, dtype=bool)
    y[10:13] = True
    prod = product_grid(y, n)
    assert prod.count == 3 * n
    assert product_deviation(prod) == 0.0

    # a single cell: its product is the full row, farthest point is the
    # opposite end of the row
    cells = np.zeros((n, n), dtype=bool)
    cells[0, 10] = True
    dev = product_deviation(GridSet(cells))
    assert dev == (n - 1) / n


def test_pgm_layout():
    n = 64
    cells = np.zeros((n, n), dtype=bool)
    cells[0, 0] = True  # x = 0, y = 0 corner
    data = to_pgm(GridSet(cells))
    header = f"P5\n{n} {n}\n255\n".encode()
    assert data.startswith(header)
    raster = data[len(header) :]
    assert len(raster) == n * n
    # bottom-left corner of the image is the last row's first byte
    assert raster[(n - 1) * n] == 0
    assert raster.count(0) == 1


def test_rle_round_trip():
    rng = np.random.default_rng(77)
    for fill in (0.0, 0.02, 0.5, 1.0):
        cells = rng.random((64, 64)) < fill
        gs = GridSet(cells)
        again = decode_rle(encode_rle(gs))
        assert again == gs


def test_rle_rejects_corrupt_text():
    gs = random_grid(np.random.default_rng(4))
    text = encode_rle(gs)
    with pytest.raises(ValidationError):
        decode_rle(text.replace("tangentlab-grid 1", "somethingelse 9"))
    with pytest.raises(ValidationError):
        decode_rle(text + "1x1\n")
    body_short = text.splitlines()[0] + "\n" + "5x1\n"
    with pytest.raises(ValidationError):
        decode_rle(body_short)
