"""Structural hypothesis checks: separation, columns, admissibility."""

import json
import math
from fractions import Fraction

import pytest

from tangentlab import (
    AffineMapSpec,
    SelfAffineSystem,
    anisotropy_q,
    bernoulli_admissible,
    build_report,
    column_count_M,
    gl_alignment,
    k_tilde,
    separation_delta,
    vertical_segment_order,
)
from tangentlab.errors import HypothesisFailure, ValidationError


def _mk(entries):
    return SelfAffineSystem(
        tuple(AffineMapSpec.from_values(r, s, a, b) for r, s, a, b in entries)
    )


def quad_system():
    """Two columns of two maps each; M = m = 4, so no vector is admissible."""
    return _mk(
        [
            ("1/2", "1/5", "0", "0"),
            ("1/2", "1/5", "0", "3/4"),
            ("1/2", "1/5", "1/2", "1/4"),
            ("1/2", "1/5", "1/2", "1/2"),
        ]
    )


def lonely_column_system():
    """Right column holds a single map, so some vertical line always meets
    only one cylinder no matter the level."""
    return _mk(
        [
            ("1/2", "1/5", "0", "0"),
            ("1/2", "1/5", "0", "4/5"),
            ("1/2", "1/5", "1/2", "2/5"),
        ]
    )


def test_separation_delta_e6(system):
    d = separation_delta(system)
    assert d.sq == Fraction(1, 400)
    assert d.exact == Fraction(1, 20)
    assert d.value == 0.05


def test_separation_delta_irrational_case():
    sys_ = _mk([("1/3", "1/5", "0", "0"), ("1/3", "1/5", "2/3", "2/5")])
    d = separation_delta(sys_)
    assert d.sq == Fraction(1, 9) + Fraction(1, 25)
    assert d.exact is None
    assert d.value == pytest.approx(math.sqrt(34) / 15, rel=1e-15)


def test_delta_brute_force_pair_distances(system):
    # straight float recomputation over all pairs, no shared code path
    rects = [
        (float(f.a), float(f.a + f.r), float(f.b), float(f.b + f.s))
        for f in system.maps
    ]
    best = math.inf
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            ax0, ax1, ay0, ay1 = rects[i]
            bx0, bx1, by0, by1 = rects[j]
            dx = max(0.0, ax0 - bx1, bx0 - ax1)
            dy = max(0.0, ay0 - by1, by0 - ay1)
            best = min(best, math.hypot(dx, dy))
    assert abs(best - separation_delta(system).value) < 1e-12


def test_column_count_e6(system):
    assert column_count_M(system) == 4


def test_column_count_grid_sweep_oracle(system):
    iv = [(f.a, f.a + f.r) for f in system.maps]

    def count(x):
        return sum(1 for lo, hi in iv if lo <= x <= hi)

    xs = [Fraction(i, 1000) for i in range(1001)]
    xs += [e for lo, hi in iv for e in (lo, hi)]
    assert max(count(x) for x in xs) == column_count_M(system)
    # the maximum only shows up at the interior seams
    assert count(Fraction(1, 3)) == 4
    assert count(Fraction(1, 10)) == 2
    assert count(Fraction(0)) == 2


def test_vertical_segment_order(system):
    assert vertical_segment_order(system) == 1
    assert vertical_segment_order(quad_system()) == 1
    with pytest.raises(HypothesisFailure):
        vertical_segment_order(lonely_column_system())
    with pytest.raises(ValidationError):
        vertical_segment_order(system, n_max=0)


def test_anisotropy(system):
    assert anisotropy_q(system) == Fraction(5, 3)
    assert anisotropy_q(quad_system()) == Fraction(5, 2)


def test_admissibility_e6(system):
    assert bernoulli_admissible(system, [Fraction(1, 6)] * 6)
    assert bernoulli_admissible(system, [1.0 / 6.0] * 6)
    # an entry equal to 1/M fails the strict bound
    p = ["1/4", "3/20", "3/20", "3/20", "3/20", "3/20"]
    assert not bernoulli_admissible(system, p)
    assert not bernoulli_admissible(system, ["1/2"] + ["1/10"] * 5)
    assert not bernoulli_admissible(system, ["1/6"] * 5 + ["1/7"])  # sum off
    with pytest.raises(ValidationError):
        bernoulli_admissible(system, ["1/2", "1/2"])


def test_admissibility_impossible_when_M_equals_m():
    sys_ = quad_system()
    assert column_count_M(sys_) == 4
    # four weights summing to 1 cannot all be strictly under 1/4
    assert not bernoulli_admissible(sys_, [Fraction(1, 4)] * 4)
    assert not bernoulli_admissible(sys_, ["1/4", "1/4", "1/4", "1/4"])


def test_gl_alignment_e6(system):
    gl = gl_alignment(system)
    assert gl is not None
    assert gl.breakpoints == (0, Fraction(1, 3), Fraction(2, 3), 1)
    assert gl.groups == ((1, 2), (3, 4), (5, 6))
    assert gl.vmaps[0] == ((Fraction(1, 5), 0), (Fraction(1, 5), Fraction(4, 5)))
    assert gl.k == 3
    assert gl.width(2) == Fraction(1, 3)


def test_gl_alignment_rejects_misaligned():
    gappy = _mk([("1/3", "1/5", "0", "0"), ("1/2", "1/5", "2/5", "1/2")])
    assert gl_alignment(gappy) is None
    staggered = _mk([("1/2", "1/5", "0", "0"), ("3/4", "1/5", "1/4", "2/5")])
    assert gl_alignment(staggered) is None


def test_k_tilde(system):
    assert k_tilde(system) == 2
    assert k_tilde(quad_system()) == 2


def test_build_report_e6(system, weights):
    rep = build_report(system, p=weights.values)
    assert rep.ok
    assert rep.m == 6
    assert rep.M == 4
    assert rep.n_tilde == 1
    assert rep.q == Fraction(5, 3)
    assert rep.k_tilde == 2
    assert rep.admissible_p_bound == Fraction(1, 4)
    assert rep.p_admissible is True
    doc = json.loads(json.dumps(rep.to_json_dict()))
    assert doc["delta"] == 0.05
    assert doc["delta_exact"] == "1/20"
    assert doc["gl"]["breakpoints"] == ["0", "1/3", "2/3", "1"]


def test_build_report_flags_failures():
    rep = build_report(quad_system(), p=[0.25] * 4)
    assert not rep.ok
    assert any("need 0 < p_j < 1/M with M = 4" in f for f in rep.failures)

    rep2 = build_report(lonely_column_system())
    assert rep2.n_tilde is None
    assert not rep2.ok

    gappy = _mk([("1/3", "1/5", "0", "0"), ("1/2", "1/5", "2/5", "1/2")])
    rep3 = build_report(gappy)
    assert any("column structure" in f for f in rep3.failures)
