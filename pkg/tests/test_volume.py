import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horopack import coxeter as cx
from horopack import horoball as hb
from horopack import volume as vo

ZETA3 = float(mpmath.zeta(3))


# ------------------------------------------------------------------ polylog


@given(st.integers(2, 5), st.floats(0.0, 1.0), st.floats(-math.pi, math.pi))
def test_polylog_matches_mpmath(s, radius, theta):
    z = radius * cmath.exp(1j * theta)
    expected = complex(mpmath.polylog(s, z))
    assert abs(vo.polylog(s, z) - expected) < 1e-12


@pytest.mark.parametrize("theta", [1e-6, 0.3, 1.0, math.pi / 2, 3.0, math.pi])
def test_polylog_on_the_unit_circle(theta):
    z = cmath.exp(1j * theta)
    for s in (2, 3):
        assert abs(vo.polylog(s, z) - complex(mpmath.polylog(s, z))) < 1e-13


def test_polylog_special_values():
    assert vo.dilog(1).real == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert vo.dilog(-1).real == pytest.approx(-(math.pi**2) / 12, rel=1e-14)
    assert vo.trilog(1).real == pytest.approx(ZETA3, rel=1e-15)
    assert vo.trilog(-1).real == pytest.approx(-0.75 * ZETA3, rel=1e-14)


def test_polylog_domain():
    with pytest.raises(ValueError):
        vo.polylog(1, 0.5)
    with pytest.raises(ValueError):
        vo.polylog(2, 1.5)


@given(st.floats(0.01, math.pi - 0.01))
def test_lobachevsky3_derivative_is_the_dilog_clausen(alpha):
    # d/da Re Li3(e^{2ia}) / 4 = -Im Li2(e^{2ia}) / 2
    h = 1e-5
    deriv = (vo.lobachevsky3(alpha + h) - vo.lobachevsky3(alpha - h)) / (2 * h)
    expected = -0.5 * float(mpmath.im(mpmath.polylog(2, mpmath.exp(2j * alpha))))
    assert deriv == pytest.approx(expected, abs=1e-8)


def test_lobachevsky3_values():
    assert vo.lobachevsky3(0.0) == pytest.approx(ZETA3 / 4)
    assert vo.lobachevsky3(math.pi / 2) == pytest.approx(-3 * ZETA3 / 16)
    assert vo.lobachevsky3(0.7) == pytest.approx(vo.lobachevsky3(0.7 + math.pi))


# ------------------------------------------------------ doubly asymptotic


def test_doubly_asymptotic_piece():
    R = vo.DoublyAsymptoticOrthoscheme5.from_symbol((4, 3, 3, 4, 3))
    assert vo.vol5_doubly_asymptotic(R) == pytest.approx(7 * ZETA3 / 4608, rel=1e-12)


def test_doubly_asymptotic_piece_is_reversal_invariant():
    R = vo.DoublyAsymptoticOrthoscheme5.from_symbol((4, 3, 3, 4, 3))
    assert vo.vol5_doubly_asymptotic(R.reversed()) == pytest.approx(vo.vol5_doubly_asymptotic(R), rel=1e-12)


def test_doubly_asymptotic_rejects_other_parameters():
    with pytest.raises(ValueError):
        vo.DoublyAsymptoticOrthoscheme5.from_symbol((4, 3, 4, 3, 3))
    with pytest.raises(ValueError):
        vo.DoublyAsymptoticOrthoscheme5.from_symbol((4, 3, 3))


# --------------------------------------------------------- Gauss-Bonnet


@pytest.mark.parametrize("p,q", [(7, 3), (4, 5), (3, 8), (5, 5)])
def test_gauss_bonnet_matches_triangle_angle_defect(p, q):
    coeff, power, value = vo.gauss_bonnet_volume(cx.OrthoschemeSpec((p, q), parallel=False))
    assert power == 1
    assert coeff == Fraction(1, 2) - Fraction(1, p) - Fraction(1, q)
    assert value == pytest.approx(math.pi * (0.5 - 1 / p - 1 / q))


@pytest.mark.parametrize(
    "weights,coeff",
    [((5, 3, 3, 3), Fraction(1, 10800)), ((5, 3, 3, 4), Fraction(17, 21600)), ((5, 3, 3, 5), Fraction(13, 5400))],
)
def test_gauss_bonnet_matches_known_compact_simplices(weights, coeff):
    assert vo.gauss_bonnet_volume(cx.OrthoschemeSpec(weights, parallel=False))[:2] == (coeff, 2)


def test_gauss_bonnet_needs_even_dimension():
    with pytest.raises(ValueError):
        vo.gauss_bonnet_volume(cx.parse_symbol("{4,3,4,3,3,inf}"))


ANALYTIC = {
    "{4,4,3,3,inf}": math.pi**2 / 288,
    "{4,4,3,4,inf}": math.pi**2 / 144,
    "{6,3,3,3,inf}": math.pi**2 / 540,
    "{6,3,3,4,inf}": math.pi**2 / 288,
    "{6,3,3,5,inf}": 61 * math.pi**2 / 10800,
    "{6,3,4,3,inf}": 5 * math.pi**2 / 864,
    "{4,3,4,3,3,inf}": 7 * ZETA3 / 1152,
    "{3,4,3,3,3,3,inf}": math.pi**3 / 259200,
    "{3,4,3,3,3,4,inf}": math.pi**3 / 86400,
}


@pytest.mark.parametrize("symbol", list(ANALYTIC))
def test_analytic_volumes(symbol):
    res = vo.vol_truncated_orthoscheme(symbol)
    assert res.value == pytest.approx(ANALYTIC[symbol], rel=1e-12)
    assert res.method in (vo.CLOSED_FORM, vo.DISSECTION)
    assert res.exact


def test_volume_result_validation():
    with pytest.raises(ValueError):
        vo.VolumeResult(-1.0, vo.CLOSED_FORM)
    with pytest.raises(ValueError):
        vo.VolumeResult(1.0, vo.MONTE_CARLO, stderr=-1.0)


def test_no_analytic_route_for_unknown_odd_symbols():
    with pytest.raises(ValueError):
        vo.vol_truncated_orthoscheme(cx.OrthoschemeSpec((4, 3, 3, 4, 3)))


# ------------------------------------------------------------ Monte Carlo


@pytest.mark.parametrize("symbol", ["{4,4,3,4,inf}", "{6,3,3,3,inf}", "{4,3,4,3,3,inf}"])
def test_mc_agrees_with_analytic_volume(symbol):
    orth = cx.realize(symbol)
    res = vo.mc_volume(orth, samples=200_000, seed=3)
    assert res.method == vo.MONTE_CARLO and res.samples == 200_000
    assert abs(res.value - ANALYTIC[symbol]) < 4 * res.stderr


def test_mc_is_reproducible_and_thread_independent():
    orth = cx.realize("{6,3,3,4,inf}")
    a = vo.mc_volume(orth, samples=100_000, seed=11, chunk_size=10_000, workers=1)
    b = vo.mc_volume(orth, samples=100_000, seed=11, chunk_size=10_000, workers=4)
    c = vo.mc_volume(orth, samples=100_000, seed=12, chunk_size=10_000)
    assert a.value == b.value and a.stderr == b.stderr
    assert a.value != c.value


def test_mc_respects_thread_cap(monkeypatch):
    monkeypatch.setenv("HOROPACK_THREADS", "1")
    assert vo._thread_cap() == 1


def test_mc_rejects_zero_samples():
    with pytest.raises(ValueError, match="samples"):
        vo.mc_volume(cx.realize("{4,4,3,4,inf}"), samples=0)


def test_mc_requires_a_cusp_cut_at_every_ideal_vertex():
    orth = cx.realize("{4,4,3,4,inf}")
    only_one = [hb.shrink(hb.max_admissible_horoball(orth, 3), 0.5)]
    with pytest.raises(ValueError, match="ideal"):
        vo.mc_volume(orth, cusp_cut=only_one, samples=1000)


def test_mc_is_insensitive_to_the_cusp_cut():
    orth = cx.realize("{4,4,3,4,inf}")
    deep = [hb.shrink(hb.max_admissible_horoball(orth, c), 1.0) for c in orth.ideal_indices]
    a = vo.mc_volume(orth, samples=200_000, seed=5)
    b = vo.mc_volume(orth, cusp_cut=deep, samples=200_000, seed=5)
    assert abs(a.value - b.value) < 4 * math.hypot(a.stderr, b.stderr)



@pytest.mark.slow
@pytest.mark.parametrize("symbol", list(ANALYTIC))
def test_mc_confirms_every_analytic_volume_at_ten_million_samples(symbol):
    res = vo.mc_volume(cx.realize(symbol), samples=10_000_000, seed=0)
    assert abs(res.value - ANALYTIC[symbol]) < 3 * res.stderr
    assert abs(res.value / ANALYTIC[symbol] - 1) < 0.01
