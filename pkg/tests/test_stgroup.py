import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satostats import stgroup
from satostats.arith import NormedEulerFactor
from satostats.errors import WeilViolation
from satostats.stgroup import SIGMA, ClassPoint, STGroup


def F1(norm, a):
    return NormedEulerFactor(norm=norm, genus=1, coefficients=(a,))


def F2(norm, c1, c2):
    return NormedEulerFactor(norm=norm, genus=2, coefficients=(c1, c2))


# ---------------------------------------------------------------------------
# normalization

def test_normalize_g1_zero_trace():
    pt = stgroup.normalize_g1(F1(5, 0), STGroup.SU2)
    assert pt.angles[0] == pytest.approx(math.pi / 2)
    pt = stgroup.normalize_g1(F1(5, 0), STGroup.NU1)
    assert pt.component == SIGMA


def test_normalize_g1_example():
    pt = stgroup.normalize_g1(F1(5, 2), STGroup.SU2)
    assert pt.angles[0] == pytest.approx(math.acos(1 / math.sqrt(5)))
    # re-expand: det(1 - yT) must reproduce the normalized factor
    assert 2 * math.cos(pt.angles[0]) == pytest.approx(2 / math.sqrt(5))


def test_normalize_g1_boundary():
    pt = stgroup.normalize_g1(F1(4, 4), STGroup.SU2)  # square norm, abar = 2
    assert pt.angles[0] == pytest.approx(0.0)


def test_normalize_g1_weil():
    with pytest.raises(WeilViolation):
        stgroup.class_grid_g1(np.array([5]), np.array([5]), STGroup.SU2)


def test_normalize_g2_examples():
    pt = stgroup.normalize_g2(F2(7, 0, 0), STGroup.USp4)
    assert pt.angles[0] == pytest.approx(math.pi / 4)
    assert pt.angles[1] == pytest.approx(3 * math.pi / 4)
    # identity-like: abar1 = 4, abar2 = 6 at norm 4
    pt = stgroup.normalize_g2(F2(4, 8, 24), STGroup.USp4)
    assert pt.angles == pytest.approx((0.0, 0.0))
    # double root: abar1 = 0, abar2 = 2
    pt = stgroup.normalize_g2(F2(4, 0, 8), STGroup.USp4)
    assert pt.angles == pytest.approx((math.pi / 2, math.pi / 2))


def test_normalize_g2_sorted_invariant(rng):
    for _ in range(200):
        a = rng.uniform(0, math.pi, 2)
        t1 = 2 * (math.cos(a[0]) + math.cos(a[1]))
        t2 = 2 + 4 * math.cos(a[0]) * math.cos(a[1])
        norm = 101
        c1 = t1 * math.sqrt(norm)
        c2 = t2 * norm
        grid = stgroup.class_grid_g2(np.array([norm]), np.array([c1]),
                                     np.array([c2]), STGroup.USp4)
        pt = grid.point(0)
        assert pt.angles[0] <= pt.angles[1]
        # normalize then re-expand
        b1 = 2 * (math.cos(pt.angles[0]) + math.cos(pt.angles[1]))
        b2 = 2 + 4 * math.cos(pt.angles[0]) * math.cos(pt.angles[1])
        assert b1 == pytest.approx(t1, abs=1e-9)
        assert b2 == pytest.approx(t2, abs=1e-9)


def test_normalize_g1_reexpand(rng):
    for _ in range(200):
        t = rng.uniform(0, math.pi)
        norm = 83
        c1 = 2 * math.cos(t) * math.sqrt(norm)
        grid = stgroup.class_grid_g1(np.array([norm]), np.array([c1]),
                                     STGroup.SU2)
        assert 2 * math.cos(grid.point(0).angles[0]) == pytest.approx(
            c1 / math.sqrt(norm), abs=1e-9)


# ---------------------------------------------------------------------------
# Haar density and sampling

def test_haar_density_values():
    assert stgroup.haar_density(
        STGroup.SU2, ClassPoint(STGroup.SU2, (math.pi / 2,))
    ) == pytest.approx(2 / math.pi)
    assert stgroup.haar_density(
        STGroup.NU1, ClassPoint(STGroup.NU1, (), SIGMA)) == 0.5
    assert stgroup.haar_density(
        STGroup.USp4, ClassPoint(STGroup.USp4, (1.0, 1.0))) == 0.0


def test_haar_sample_su2_moments():
    n = 100_000
    g = stgroup.haar_sample(STGroup.SU2, seed=7, count=n)
    vals = 2 * np.cos(g.angles[:, 0])
    se = 1.0 / math.sqrt(n)  # Var(chi_1) = 1 under Haar
    assert abs(vals.mean()) < 3 * se


def test_haar_sample_u1_moments():
    n = 100_000
    g = stgroup.haar_sample(STGroup.U1, seed=11, count=n)
    vals = np.cos(g.angles[:, 0])
    se = math.sqrt(0.5 / n)
    assert abs(vals.mean()) < 3 * se


def test_haar_sample_nu1_component_mass():
    n = 100_000
    g = stgroup.haar_sample(STGroup.NU1, seed=13, count=n)
    freq = g.sigma.mean()
    assert abs(freq - 0.5) < 3 * 0.5 / math.sqrt(n)


def test_haar_sample_usp4_selfconsistent():
    # a_1 has Haar mean 0 and variance 1 on USp4
    n = 60_000
    g = stgroup.haar_sample(STGroup.USp4, seed=17, count=n)
    vals = 2 * np.cos(g.angles).sum(axis=1)
    assert abs(vals.mean()) < 4 / math.sqrt(n)
    assert np.all(g.angles[:, 0] <= g.angles[:, 1])


# ---------------------------------------------------------------------------
# powers of classes

def test_class_power_su2_fold():
    pt = ClassPoint(STGroup.SU2, (2.0,))
    sq = stgroup.class_power(pt, 2)
    assert sq.angles[0] == pytest.approx(2 * math.pi - 4.0)


def test_class_power_identity_usp4():
    pt = ClassPoint(STGroup.USp4, (0.0, 0.0))
    for n in (1, 2, 5):
        assert stgroup.class_power(pt, n).angles == (0.0, 0.0)


def test_class_power_su2_pi_third():
    pt = ClassPoint(STGroup.SU2, (math.pi / 3,))
    assert stgroup.class_power(pt, 3).angles[0] == pytest.approx(math.pi)


def test_class_power_nu1_sigma():
    sig = ClassPoint(STGroup.NU1, (), SIGMA)
    sq = stgroup.class_power(sig, 2)
    assert sq.component == "identity"
    assert sq.angles[0] == pytest.approx(math.pi)
    assert stgroup.class_power(sig, 3).component == SIGMA
    four = stgroup.class_power(sig, 4)
    assert four.component == "identity"
    assert four.angles[0] == pytest.approx(0.0)


@settings(max_examples=80)
@given(st.floats(min_value=0.0, max_value=math.pi),
       st.integers(min_value=1, max_value=6),
       st.integers(min_value=1, max_value=6))
def test_class_power_composes(theta, a, b):
    pt = ClassPoint(STGroup.SU2, (theta,))
    lhs = stgroup.class_power(stgroup.class_power(pt, a), b)
    rhs = stgroup.class_power(pt, a * b)
    assert lhs.angles[0] == pytest.approx(rhs.angles[0], abs=1e-9)


def test_class_power_one_is_identity_map():
    pt = ClassPoint(STGroup.USp4, (0.3, 1.7))
    out = stgroup.class_power(pt, 1)
    assert out.angles == pytest.approx(pt.angles)
