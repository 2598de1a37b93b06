import math
from math import comb

import numpy as np
import pytest

from satostats import chars, stgroup
from satostats.chars import (
    CharLabel,
    ClassFunction,
    VirtualCharacter,
    decompose_numeric,
    fs_index,
    fs_index_numeric,
    moment_char,
    power_sum_char,
    trivial_multiplicity,
)
from satostats.errors import GroupMismatch, ResidualTooLarge, TrivialPresent
from satostats.stgroup import SIGMA, ClassGrid, ClassPoint, STGroup

U1, NU1, SU2 = STGroup.U1, STGroup.NU1, STGroup.SU2
BOX, USP4 = STGroup.SU2xSU2, STGroup.USp4


def chi(n):
    return CharLabel(SU2, "chi", (n,))


def chi2(m, n):
    return CharLabel(USP4, "chi2", (m, n))


def nu(m):
    return CharLabel(U1, "nu", (m,))


def rho(m):
    return CharLabel(NU1, "rho", (m,))


def box(i, j):
    return CharLabel(BOX, "box", (i, j))


def vc(group, *pairs):
    return VirtualCharacter(group, {lab: c for lab, c in pairs})


# ---------------------------------------------------------------------------
# polynomial identities

def test_char_poly_su2_trace():
    assert chars.char_poly(chi(1)) == chars.ChebPoly.x()


def test_char_poly_usp4_standard():
    assert chars.char_poly(chi2(1, 0)) == chars.ChebPoly.x() + chars.ChebPoly.y()


def test_char_poly_usp4_chi11():
    # value 5 at the identity x = y = 2
    p = chars.char_poly(chi2(1, 1))
    assert p.eval_at(2, 2) == 5
    assert p == chars.ChebPoly.x() * chars.ChebPoly.y() + 1


def test_su2_chi3_at_right_angle():
    assert chars.eval_char(chi(3), ClassPoint(SU2, (math.pi / 2,))) == 0


def test_rho_at_sigma_vanishes():
    assert chars.eval_char(rho(3), ClassPoint(NU1, (), SIGMA)) == 0
    assert chars.eval_char(CharLabel(NU1, "sign"), ClassPoint(NU1, (), SIGMA)) == -1


def test_char_at_identity_is_degree():
    ident = ClassPoint(USP4, (0.0, 0.0))
    for m in range(5):
        for n in range(m + 1):
            lab = chi2(m, n)
            val = chars.eval_char(lab, ident)
            assert val.real == pytest.approx(lab.degree)
            assert lab.degree == (m - n + 1) * (n + 1) * (m + 2) * (m + n + 3) // 6


def test_group_mismatch():
    with pytest.raises(GroupMismatch):
        chars.eval_char(chi(1), ClassPoint(U1, (0.5,)))


def weyl_sine_quotient(m, n, a, b):
    """The singular sine-quotient form of the USp4 character (oracle)."""
    num = (math.sin((m + 2) * a) * math.sin((n + 1) * b)
           - math.sin((m + 2) * b) * math.sin((n + 1) * a))
    den = math.sin(2 * a) * math.sin(b) - math.sin(2 * b) * math.sin(a)
    return num / den


def test_poly_matches_sine_quotient(rng):
    pts = rng.uniform(0.05, math.pi - 0.05, (1000, 2))
    pts = pts[np.abs(pts[:, 0] - pts[:, 1]) > 1e-3]
    for (m, n) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 2), (4, 1), (5, 3)]:
        poly = chars.char_poly(chi2(m, n))
        x = 2 * np.cos(pts[:, 0])
        y = 2 * np.cos(pts[:, 1])
        got = poly.eval(x, y).real
        want = np.array([weyl_sine_quotient(m, n, a, b) for a, b in pts])
        assert np.max(np.abs(got - want)) < 1e-9


# ---------------------------------------------------------------------------
# Haar normalization and orthonormality (smoke; full suite in acceptance)

@pytest.mark.parametrize("group", list(STGroup))
def test_density_integrates_to_one(group):
    q = chars.quadrature(group)
    assert q.integrate(np.ones(len(q.grid))) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("group", list(STGroup))
def test_orthonormality_small(group):
    q = chars.quadrature(group)
    labs = chars.labels_up_to(group, 3)
    vals = [chars.label_values(lab, q.grid) for lab in labs]
    for i, vi in enumerate(vals):
        for j, vj in enumerate(vals):
            want = 1.0 if i == j else 0.0
            assert abs(q.inner(vi, vj) - want) < 1e-8, (labs[i], labs[j])


# ---------------------------------------------------------------------------
# moments

def test_a1_squared_su2():
    _, dec = moment_char(1, 2, SU2)
    assert dec == vc(SU2, (chi(2), 1), (chi(0), 1))


def test_a1_cubed_su2():
    _, dec = moment_char(1, 3, SU2)
    assert dec == vc(SU2, (chi(1), 2), (chi(3), 1))


def test_a1_fourth_su2():
    _, dec = moment_char(1, 4, SU2)
    assert dec == vc(SU2, (chi(4), 1), (chi(2), 3), (chi(0), 2))


@pytest.mark.parametrize("n", range(1, 7))
def test_a1_pow_su2_binomial_difference(n):
    _, dec = moment_char(1, n, SU2)
    want = {}
    for j in range(n // 2 + 1):
        c = comb(n, j) - (comb(n, j - 1) if j >= 1 else 0)
        want[chi(n - 2 * j)] = c
    assert dec == VirtualCharacter(SU2, want)


@pytest.mark.parametrize("n", range(1, 7))
def test_a1_pow_u1_binomial(n):
    _, dec = moment_char(1, n, U1)
    want = {nu(n - 2 * k): comb(n, k) for k in range(n + 1)}
    agg = {}
    for lab, c in want.items():
        agg[lab] = agg.get(lab, 0) + c
    assert dec == VirtualCharacter(U1, agg)


def test_a1_cubed_u1():
    _, dec = moment_char(1, 3, U1)
    assert dec == vc(U1, (nu(-3), 1), (nu(-1), 3), (nu(1), 3), (nu(3), 1))


def test_a1_cubed_nu1():
    _, dec = moment_char(1, 3, NU1)
    assert dec == vc(NU1, (rho(1), 3), (rho(3), 1))


def test_a2_minus_one_usp4():
    fn, dec = moment_char(2, 1, USP4)
    tilde = dec.tilde()
    assert dec - tilde == VirtualCharacter(
        USP4, {chi2(0, 0): 1})
    assert tilde == vc(USP4, (chi2(1, 1), 1))


def test_a1_squared_usp4_even_weight_identity():
    _, dec = moment_char(1, 2, USP4)
    assert dec == vc(USP4, (chi2(1, 1), 1), (chi2(2, 0), 1), (chi2(0, 0), 1))


def test_s2_plus_one_usp4():
    _, dec = power_sum_char(1, 2, USP4)
    assert dec == vc(USP4, (chi2(2, 0), 1), (chi2(1, 1), -1), (chi2(0, 0), -1))


# ---------------------------------------------------------------------------
# power sums

def test_s2_su2():
    _, dec = power_sum_char(1, 2, SU2)
    assert dec == vc(SU2, (chi(2), 1), (chi(0), -1))


@pytest.mark.parametrize("n", range(2, 11))
def test_sn_su2(n):
    _, dec = power_sum_char(1, n, SU2)
    assert dec == vc(SU2, (chi(n), 1), (chi(n - 2), -1))


def test_s3_usp4():
    _, dec = power_sum_char(1, 3, USP4)
    assert dec == vc(USP4, (chi2(3, 0), 1), (chi2(2, 1), -1))


def test_s5_usp4():
    _, dec = power_sum_char(1, 5, USP4)
    assert dec == vc(USP4, (chi2(5, 0), 1), (chi2(4, 1), -1),
                     (chi2(2, 1), 1), (chi2(1, 0), -1))


@pytest.mark.parametrize("n", range(4, 11))
def test_sn_usp4_general(n):
    _, dec = power_sum_char(1, n, USP4)
    want = {chi2(n, 0): 1, chi2(n - 1, 1): -1}
    want[chi2(n - 3, 1)] = want.get(chi2(n - 3, 1), 0) + 1
    want[chi2(n - 4, 0)] = want.get(chi2(n - 4, 0), 0) - 1
    assert dec == VirtualCharacter(USP4, want)


def test_sn_nu1_even_components():
    # n = 2 mod 4: sigma^n has angle pi, so s_n = rho_n - triv + sign
    _, dec = power_sum_char(1, 2, NU1)
    assert dec == vc(NU1, (rho(2), 1), (CharLabel(NU1, "triv"), -1),
                     (CharLabel(NU1, "sign"), 1))
    _, dec = power_sum_char(1, 4, NU1)
    assert dec == vc(NU1, (rho(4), 1), (CharLabel(NU1, "triv"), 1),
                     (CharLabel(NU1, "sign"), -1))
    _, dec = power_sum_char(1, 3, NU1)
    assert dec == vc(NU1, (rho(3), 1))


def test_s2_u1():
    _, dec = power_sum_char(1, 2, U1)
    assert dec == vc(U1, (nu(2), 1), (nu(-2), 1))


# ---------------------------------------------------------------------------
# pointwise identities

@pytest.mark.parametrize("group", list(STGroup))
def test_pointwise_moment_and_power(group, rng):
    n_pts = 1000
    grid = stgroup.haar_sample(group, seed=41, count=n_pts)
    a1 = chars.moment_function(1, group)
    base = a1.evaluate(grid)
    for n in (2, 3, 5):
        fn, _ = moment_char(1, n, group)
        assert np.allclose(fn.evaluate(grid), base ** n, atol=1e-9)
        sn, _ = power_sum_char(1, n, group)
        powered = stgroup.grid_power(grid, n)
        assert np.allclose(sn.evaluate(grid), a1.evaluate(powered), atol=1e-9)


def test_newton_consistency(rng):
    """Genus-2 power sums match the Newton recurrence on (abar1, abar2)."""
    for _ in range(200):
        a, b = sorted(rng.uniform(0, math.pi, 2))
        grid = ClassGrid(USP4, np.array([[a, b]]))
        e1 = 2 * (math.cos(a) + math.cos(b))
        e2 = 2 + 4 * math.cos(a) * math.cos(b)
        e3, e4 = e1, 1.0
        p = {0: 4.0, 1: e1}
        p[2] = e1 * p[1] - 2 * e2
        p[3] = e1 * p[2] - e2 * p[1] + 3 * e3
        p[4] = e1 * p[3] - e2 * p[2] + e3 * p[1] - 4 * e4
        for n in range(5, 11):
            p[n] = e1 * p[n-1] - e2 * p[n-2] + e3 * p[n-3] - e4 * p[n-4]
        for n in range(1, 11):
            sn = chars.power_sum_function(n, 1, USP4)
            assert sn.evaluate(grid)[0].real == pytest.approx(p[n], abs=1e-9)


# ---------------------------------------------------------------------------
# numeric decomposition

def test_decompose_identity_on_basis():
    d = decompose_numeric(SU2, chi(2), max_index=4)
    assert d.vchar == vc(SU2, (chi(2), 1))
    assert d.residual < 1e-8


def test_decompose_a1_fourth():
    fn, _ = moment_char(1, 4, SU2)
    d = decompose_numeric(SU2, fn, max_index=5)
    assert d.vchar == vc(SU2, (chi(4), 1), (chi(2), 3), (chi(0), 2))


def test_decompose_a2_minus_1():
    fn = chars.moment_function(2, USP4) - 1
    d = decompose_numeric(USP4, fn, max_index=3)
    assert d.vchar == vc(USP4, (chi2(1, 1), 1))


def test_decompose_residual_too_large():
    with pytest.raises(ResidualTooLarge):
        decompose_numeric(SU2, chi(8), max_index=4)


@pytest.mark.parametrize("group", [U1, NU1, SU2, BOX, USP4])
@pytest.mark.parametrize("n", [2, 4, 6])
def test_exact_vs_numeric_moments(group, n):
    fn, exact = moment_char(1, n, group)
    d = decompose_numeric(group, fn, max_index=n)
    assert d.residual < 1e-6
    assert d.vchar == exact
    for c in exact.coeffs.values():
        assert c == int(c.real)


@pytest.mark.parametrize("group", [NU1, SU2, USP4])
@pytest.mark.parametrize("n", [3, 7, 10])
def test_exact_vs_numeric_power_sums(group, n):
    fn, exact = power_sum_char(1, n, group)
    d = decompose_numeric(group, fn, max_index=n)
    assert d.residual < 1e-6
    assert d.vchar == exact


def test_exact_vs_numeric_a2_powers():
    for n in (2, 4):
        fn, exact = moment_char(2, n, USP4)
        d = decompose_numeric(USP4, fn, max_index=2 * n)
        assert d.residual < 1e-6
        assert d.vchar == exact


# ---------------------------------------------------------------------------
# trivial multiplicity

def test_trivial_multiplicities():
    fn, _ = moment_char(1, 2, SU2)
    assert trivial_multiplicity(SU2, fn) == 1
    assert trivial_multiplicity(USP4, chars.moment_function(1, USP4)) == 0
    assert trivial_multiplicity(USP4, chars.moment_function(2, USP4)) == 1


# ---------------------------------------------------------------------------
# Frobenius-Schur

def test_fs_table():
    assert fs_index(chi(1)) == -1
    assert fs_index(chi(2)) == 1
    assert fs_index(chi2(1, 1)) == 1
    assert fs_index(chi2(1, 0)) == -1
    assert fs_index(nu(3)) == 0
    assert fs_index(nu(0)) == 1


def test_fs_numeric_matches_table():
    for lab in [chi(n) for n in range(5)] + [nu(m) for m in (-2, -1, 0, 1, 2)] \
            + [chi2(m, n) for m in range(4) for n in range(m + 1)]:
        assert fs_index_numeric(lab) == pytest.approx(fs_index(lab), abs=1e-8)


def test_fs_rho_parity():
    assert fs_index(rho(1)) == -1
    assert fs_index(rho(2)) == 1
    assert fs_index(rho(3)) == -1
    assert fs_index(CharLabel(NU1, "sign")) == 1


def test_fs_box_products():
    assert fs_index(box(1, 1)) == 1
    assert fs_index_numeric(box(1, 1)) == pytest.approx(1.0, abs=1e-8)
    assert fs_index(box(1, 0)) == 0 or fs_index(box(1, 0)) == -1
    # chi_1 x chi_0 is the alternating 2-dim rep on the first factor
    assert fs_index(box(1, 0)) == -1
    assert fs_index(box(2, 1)) == -1
    assert fs_index(box(2, 2)) == 1


# ---------------------------------------------------------------------------
# restriction

def test_restrict_a1_to_product():
    a1 = chars.moment_function(1, USP4)
    r = chars.restrict(a1, BOX)
    assert r.to_vchar() == vc(BOX, (box(1, 0), 1), (box(0, 1), 1))


def test_restrict_trivial():
    t = ClassFunction.from_label(chi2(0, 0))
    r = chars.restrict(t, BOX)
    assert r.to_vchar() == vc(BOX, (box(0, 0), 1))


def test_restrict_a1sq_trivial_multiplicity():
    a1sq = chars.moment_function(1, USP4) ** 2
    r = chars.restrict(a1sq, BOX)
    assert trivial_multiplicity(BOX, r) == 2
    assert r.to_vchar().trivial_coefficient() == 2


def test_restrict_su2_cube_to_nu1_matches_moment():
    cube = chars.moment_function(1, SU2) ** 3
    r = chars.restrict(cube, NU1)
    assert r.to_vchar() == vc(NU1, (rho(1), 3), (rho(3), 1))
    d = decompose_numeric(NU1, r, max_index=4)
    assert d.vchar == r.to_vchar()


def test_restrict_su2_to_u1():
    sq = chars.moment_function(1, SU2) ** 2
    r = chars.restrict(sq, U1)
    assert r.to_vchar() == vc(U1, (nu(-2), 1), (nu(0), 2), (nu(2), 1))


# ---------------------------------------------------------------------------
# constituent statistics

def test_rc_stats_power_sums_su2():
    for n in range(2, 12):
        _, dec = power_sum_char(1, n, SU2)
        st = chars.rc_stats(dec.tilde())
        assert (st.R, st.C) == (2, 2)


def test_rc_stats_a1_cubed_su2():
    _, dec = moment_char(1, 3, SU2)
    st = chars.rc_stats(dec)
    assert st.R == 2
    assert st.C == 5  # 2^2 + 1^2


def test_rc_stats_u1_formula():
    for n in range(2, 7):
        _, dec = moment_char(1, n, U1)
        st = chars.rc_stats(dec.tilde())
        want = sum(2 * comb(n, j) ** 2 for j in range(0, (n + 1) // 2))
        assert st.C == want
        assert st.R == 2 * ((n + 1) // 2)


def test_rc_stats_su2_formula():
    for n in range(2, 7):
        _, dec = moment_char(1, n, SU2)
        st = chars.rc_stats(dec.tilde())
        want = 1 + sum((comb(n, j) - comb(n, j - 1)) ** 2
                       for j in range(1, (n + 1) // 2))
        assert st.C == want
        assert st.R == (n + 1) // 2


def test_rc_stats_trivial_present():
    _, dec = moment_char(1, 2, SU2)
    with pytest.raises(TrivialPresent):
        chars.rc_stats(dec)


def test_usp4_moment_full_coefficient_sums():
    """Sum of squared coefficients of a_1^n on USp4, trivial included,
    matches the recorded cross-check values 3, 14, 84 for n = 2, 3, 4."""
    want = {2: 3, 3: 14, 4: 84}
    for n, w in want.items():
        _, dec = moment_char(1, n, USP4)
        total = sum(abs(c) ** 2 for c in dec.coeffs.values())
        assert total == w


def test_prop_boundedness_of_power_sum_c():
    for n in range(2, 21):
        _, dec = power_sum_char(1, n, USP4)
        st = chars.rc_stats(dec.tilde())
        assert st.C <= 4


def test_weights_even_iff_m_plus_n_even():
    for m in range(4):
        for n in range(m + 1):
            lab = chi2(m, n)
            assert (lab.weight % 2 == 0) == ((m + n) % 2 == 0)


# ---------------------------------------------------------------------------
# virtual character plumbing

def test_selfdual_predicate():
    assert vc(U1, (nu(2), 1), (nu(-2), 1)).is_selfdual()
    assert vc(U1, (nu(2), 1j), (nu(-2), -1j)).is_selfdual()
    assert not vc(U1, (nu(2), 1)).is_selfdual()
    assert vc(SU2, (chi(1), 2), (chi(3), 1)).is_selfdual()


def test_vchar_json_roundtrip():
    v = vc(USP4, (chi2(2, 0), 1), (chi2(1, 1), -1), (chi2(0, 0), -1))
    obj = v.to_json()
    assert obj["group"] == "USp4"
    assert VirtualCharacter.from_json(obj) == v


def test_label_parsing():
    assert chars.parse_label("chi_{2,1}", USP4) == chi2(2, 1)
    assert chars.parse_label("nu_-3", U1) == nu(-3)
    assert chars.parse_label("chi_1xchi_0", BOX) == box(1, 0)
    with pytest.raises(ValueError):
        chars.parse_label("chi_{1,2}", USP4)  # m >= n violated
