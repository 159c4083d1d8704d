"""Fibre covers over column addresses and their match with exact sections."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentlab import (
    AlphabetError,
    EnumerationCapError,
    GridShapeError,
    ValidationError,
    column_address,
    column_weights,
    fibre_cover,
    fibre_vs_section,
    gl_alignment,
    section_intervals,
)

F = Fraction


@pytest.fixture(scope="module")
def gl(system):
    structure = gl_alignment(system)
    assert structure is not None
    return structure


# ---------------------------------------------------------------------------
# fibre covers


def test_fibre_cover_level_zero(gl):
    assert fibre_cover(gl, b"\x01", 0) == [(F(0), F(1))]


def test_fibre_cover_one_level(gl):
    assert fibre_cover(gl, b"\x01", 1) == [(F(0), F(1, 5)), (F(4, 5), F(1))]
    assert fibre_cover(gl, b"\x02", 1) == [
        (F(3, 10), F(1, 2)),
        (F(11, 20), F(3, 4)),
    ]


def test_fibre_cover_two_levels_exact(gl):
    got = fibre_cover(gl, bytes([1, 2]), 2)
    assert got == [
        (F(3, 50), F(1, 10)),
        (F(11, 100), F(3, 20)),
        (F(43, 50), F(9, 10)),
        (F(91, 100), F(19, 20)),
    ]


def test_fibre_cover_nesting(gl):
    addr = bytes([1, 2, 3, 1, 2, 3])
    for n in range(5):
        outer = fibre_cover(gl, addr, n)
        inner = fibre_cover(gl, addr, n + 1)
        for lo, hi in inner:
            assert any(a <= lo and hi <= b for a, b in outer)


def test_fibre_cover_counts_and_total_length(gl):
    addr = bytes([2, 3, 1, 1, 3])
    for n in range(6):
        cov = fibre_cover(gl, addr, n)
        assert len(cov) == 2**n
        assert sum(hi - lo for lo, hi in cov) == F(2, 5) ** n


def test_fibre_cover_argument_errors(gl):
    with pytest.raises(ValidationError):
        fibre_cover(gl, b"\x01", 2)
    with pytest.raises(AlphabetError):
        fibre_cover(gl, bytes([4]), 1)
    with pytest.raises(EnumerationCapError):
        fibre_cover(gl, bytes([1]) * 30, 30, enum_cap=1000)


# ---------------------------------------------------------------------------
# column addresses


def test_column_address_fixed_points(gl):
    assert column_address(gl, 0, 4).word == bytes([1, 1, 1, 1])
    assert column_address(gl, F(1, 2), 4).word == bytes([2, 2, 2, 2])
    assert column_address(gl, 1, 4).word == bytes([3, 3, 3, 3])
    assert not column_address(gl, 1, 4).ambiguous


def test_column_address_breakpoint_is_ambiguous(gl):
    addr = column_address(gl, F(1, 3), 3)
    assert addr.ambiguous
    assert addr.word == bytes([1, 3, 3])
    assert addr.alternate == bytes([2, 1, 1])
    assert addr.branches() == (bytes([1, 3, 3]), bytes([2, 1, 1]))


def test_column_address_deep_breakpoint(gl):
    # 1/9 enters column 1 and then lands on the 1/3 breakpoint
    addr = column_address(gl, F(1, 9), 3)
    assert addr.ambiguous
    assert addr.word == bytes([1, 1, 3])
    assert addr.alternate == bytes([1, 2, 1])


def test_column_address_rejects_bad_input(gl):
    with pytest.raises(ValidationError):
        column_address(gl, F(1, 2), 0)
    with pytest.raises(ValidationError):
        column_address(gl, 2, 3)


@settings(max_examples=50, deadline=None)
@given(x=st.fractions(min_value=0, max_value=1, max_denominator=10**6))
def test_column_address_locates_the_point(gl, x):
    """Folding the column widths along the address recovers an interval
    that contains x, for either branch."""
    addr = column_address(gl, x, 6)
    for branch in addr.branches():
        lo = F(0)
        w = F(1)
        for c in branch:
            lo += gl.breakpoints[c - 1] * w
            w *= gl.width(c)
        assert lo <= x <= lo + w


# ---------------------------------------------------------------------------
# column weights


def test_column_weights_uniform(gl, weights):
    assert column_weights(gl, weights.values) == (F(1, 3), F(1, 3), F(1, 3))


def test_column_weights_lopsided(gl):
    p = tuple(F(v) for v in ("3/10", "1/10", "1/10", "1/10", "1/5", "1/5"))
    assert column_weights(gl, p) == (F(2, 5), F(1, 5), F(2, 5))


def test_column_weights_short_vector(gl):
    with pytest.raises(ValidationError):
        column_weights(gl, (F(1, 2), F(1, 2)))


# ---------------------------------------------------------------------------
# sections along a vertical line


def test_section_intervals_at_zero(system):
    assert section_intervals(system, F(0), 1) == [
        (F(0), F(1, 5)),
        (F(4, 5), F(1)),
    ]


def test_section_intervals_on_seam(system):
    got = section_intervals(system, F(1, 3), 1)
    assert got == [
        (F(0), F(1, 5)),
        (F(3, 10), F(1, 2)),
        (F(11, 20), F(3, 4)),
        (F(4, 5), F(1)),
    ]


def test_section_matches_fibre_route(system, gl):
    """Away from seams the cylinder enumeration and the column walk name the
    same intervals, exactly."""
    for x in (F(1, 10), F(7, 13), F(9, 11)):
        addr = column_address(gl, x, 3)
        assert not addr.ambiguous
        assert section_intervals(system, x, 3) == fibre_cover(gl, addr.word, 3)


# ---------------------------------------------------------------------------
# distance between the two routes


def test_fibre_vs_section_zero_at_axis(system, gl):
    assert fibre_vs_section(system, gl, 0, 1) == 0.0


def test_fibre_vs_section_within_bound(system, gl):
    n = 4
    bound = 2 * float(F(1, 5)) ** n + 2 / 1024
    for x in ("1/10", "7/13", "1/3"):
        d = fibre_vs_section(system, gl, x, n, N=1024)
        assert 0.0 <= d <= bound


def test_fibre_vs_section_rejects_bad_grid(system, gl):
    with pytest.raises(GridShapeError):
        fibre_vs_section(system, gl, "1/10", 2, N=100)
