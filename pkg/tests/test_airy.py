"""Airy evaluator and zero finder against independent references."""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from qbouncer import airy_ai, airy_zero
from qbouncer.airy import SERIES_CUTOFF, _zero_seed

mp.mp.dps = 30


def mp_ai(x):
    return float(mp.airyai(mp.mpf(float(x))))


def mp_aip(x):
    return float(mp.airyai(mp.mpf(float(x)), 1))


def test_value_at_zero_closed_form():
    # Ai(0) = 3^(-2/3)/Gamma(2/3), Ai'(0) = -3^(-1/3)/Gamma(1/3)
    ai0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    aip0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
    v, d = airy_ai(0.0)
    assert v == pytest.approx(ai0, abs=1e-15)
    assert d == pytest.approx(aip0, abs=1e-15)
    assert v == pytest.approx(0.35502805, abs=1e-8)
    assert d == pytest.approx(-0.25881940, abs=1e-8)


@pytest.mark.parametrize("x", [-10.0, -1.0, 0.0, 1.0, 5.0])
def test_defining_ode_by_finite_differences(x):
    # Richardson-extrapolated central second difference: the plain h^2
    # stencil cannot reach 1e-9 at x = -10, the extrapolated one can.
    h = 3e-3
    v, _ = airy_ai(x)

    def second(hh):
        vp, _ = airy_ai(x + hh)
        vm, _ = airy_ai(x - hh)
        return (vp - 2.0 * v + vm) / hh ** 2

    d2 = (4.0 * second(h / 2.0) - second(h)) / 3.0
    assert abs(d2 - x * v) <= 1e-9


def test_ode_residual_across_interval():
    h = 3e-3
    for x in np.linspace(-20.0, 5.0, 51):
        v, _ = airy_ai(x)
        s1 = (airy_ai(x + h)[0] - 2 * v + airy_ai(x - h)[0]) / h ** 2
        s2 = (airy_ai(x + h / 2)[0] - 2 * v + airy_ai(x - h / 2)[0]) / (h / 2) ** 2
        assert abs((4 * s2 - s1) / 3 - x * v) <= 1e-9


def test_first_zero_by_bisection_oracle():
    # locate the first sign change of the evaluator itself
    lo, hi = -3.0, -2.0
    flo = airy_ai(lo)[0]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = airy_ai(mid)[0]
        if fm * flo <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(-2.33810741, abs=1e-8)
    v, d = airy_ai(root)
    assert abs(v) <= 1e-8
    assert d > 0.0


def test_absolute_accuracy_against_mpmath():
    xs = np.concatenate([
        np.linspace(-60.0, 60.0, 241),
        np.linspace(-SERIES_CUTOFF - 0.5, SERIES_CUTOFF + 0.5, 41),
    ])
    v, d = airy_ai(xs)
    for i, x in enumerate(xs):
        assert abs(v[i] - mp_ai(x)) <= 1e-12, f"Ai at {x}"
        assert abs(d[i] - mp_aip(x)) <= 1e-12, f"Ai' at {x}"


def test_branch_overlap_agreement():
    # series and asymptotic branches must agree where they meet
    for x in (SERIES_CUTOFF - 1e-9, SERIES_CUTOFF + 1e-9):
        for s in (1.0, -1.0):
            v1, d1 = airy_ai(s * x)
            assert abs(v1 - mp_ai(s * x)) <= 1e-12
            assert abs(d1 - mp_aip(s * x)) <= 1e-12


def test_matches_scipy_broadly():
    xs = np.linspace(-40.0, 20.0, 601)
    v, d = airy_ai(xs)
    sv, sd, _, _ = special.airy(xs)
    assert np.max(np.abs(v - sv)) <= 5e-13
    assert np.max(np.abs(d - sd)) <= 5e-12


def test_large_positive_underflows_cleanly():
    v, d = airy_ai(400.0)
    assert 0.0 <= v < 1e-300
    assert abs(d) < 1e-300


def test_array_shapes_and_scalars():
    arr = np.array([[0.0, 1.0], [-1.0, -2.0]])
    v, d = airy_ai(arr)
    assert v.shape == arr.shape and d.shape == arr.shape
    sv, sd = airy_ai(1.0)
    assert isinstance(sv, float) and isinstance(sd, float)
    assert sv == pytest.approx(v[0, 1], abs=0.0)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        airy_ai(float("nan"))
    with pytest.raises(ValueError):
        airy_ai(np.array([1.0, np.inf]))


# ---------------------------------------------------------------------------
# zeros


def test_first_two_zeros():
    assert airy_zero(1) == pytest.approx(-2.33810741, abs=1e-8)
    assert airy_zero(2) == pytest.approx(-4.08794944, abs=1e-8)


def test_zero_values_vanish_and_decrease():
    prev = 0.0
    for n in range(1, 31):
        a = airy_zero(n)
        assert abs(airy_ai(a)[0]) <= 1e-10
        assert a < prev
        prev = a


def test_zero_against_scipy():
    ours = np.array([airy_zero(n) for n in range(1, 51)])
    ref = special.ai_zeros(50)[0]
    assert np.max(np.abs(ours - ref)) <= 1e-12


def test_zero_50_close_to_refined_seed():
    # the asymptotic seed itself is already within 1e-4 at n = 50; the
    # refined value must sit within 1e-6 of a Newton polish of that seed
    a = airy_zero(50)
    x = _zero_seed(50)
    for _ in range(6):
        f, fp = airy_ai(x)
        x -= f / fp
    assert abs(a - x) <= 1e-6


def test_spacing_approaches_asymptotic():
    # consecutive zero spacing ~ pi / sqrt(|a_n|) within 1% for n >= 5
    zeros = [airy_zero(n) for n in range(5, 16)]
    for a_n, a_next in zip(zeros, zeros[1:]):
        predicted = math.pi / math.sqrt(abs(a_n))
        assert abs((a_n - a_next) - predicted) <= 0.01 * predicted


def test_zero_rejects_bad_index():
    with pytest.raises(ValueError):
        airy_zero(0)
    with pytest.raises(ValueError):
        airy_zero(1.5)
