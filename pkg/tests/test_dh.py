import pytest

from nilforge.dh import (
    central_correction_invariance,
    characteristic_check,
    cubic_condition,
    dh_orbit_decision,
    find_valid_r,
    matrix_lift_search,
    scaling_isomorphism,
    verify_structure,
)
from nilforge.lab import induced_frattini_matrix

SHEAR = ((1, 1, 0), (0, 1, 1), (0, 0, 1))


def _mat_mul(a, b, p):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) % p
                       for j in range(3)) for i in range(3))


# -- structure ---------------------------------------------------------------------

@pytest.mark.parametrize("p,r", [(5, 1), (5, 2)])
def test_structure(p, r):
    rep = verify_structure(p, r)
    assert rep.passed
    assert rep.order == p ** 6
    assert rep.derived_order == rep.center_order == rep.agemo_order == p ** 3


def test_structure_p7():
    rep = verify_structure(7, 1)
    assert rep.passed
    assert rep.order == 7 ** 6


# -- scaling map --------------------------------------------------------------------

def test_scaling_5_2():
    phi = scaling_isomorphism(5, 2)
    m = induced_frattini_matrix(phi)
    assert m.entries == ((2, 0, 0), (0, 2, 0), (0, 0, 2))
    assert m.det == 3  # 8 mod 5


def test_scaling_identity():
    m = induced_frattini_matrix(scaling_isomorphism(5, 1))
    assert m.entries == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_scaling_7_3():
    # 27 = -1 mod 7: the determinant argument cannot separate this prime
    m = induced_frattini_matrix(scaling_isomorphism(7, 3))
    assert m.det == 6


# -- cubic condition ------------------------------------------------------------------

def test_cubic_examples():
    assert cubic_condition(5, 2)
    assert not cubic_condition(5, 1)
    assert all(not cubic_condition(7, r) for r in range(1, 7))


def test_find_valid_r():
    assert find_valid_r(5) == 2
    assert find_valid_r(7) is None
    assert find_valid_r(11) == 2
    assert find_valid_r(3) is None


# -- matrix lift search ----------------------------------------------------------------

def test_search_identity_family():
    lifts = matrix_lift_search(5, 1, 1, "all")
    assert len(lifts) == 5  # p-power cardinality
    assert {c.det_residue for c in lifts} == {1}
    mats = {c.matrix for c in lifts}
    assert SHEAR in mats
    # closure under multiplication: the passing set is a group
    assert all(_mat_mul(a, b, 5) in mats for a in mats for b in mats)


def test_search_obstructed_family():
    lifts = matrix_lift_search(5, 2, 1, "all")
    assert lifts
    assert {c.det_residue for c in lifts} == {3}
    assert matrix_lift_search(5, 2, 1, "pm1") == []


def test_search_det_multiplicative_on_lift_group():
    lifts = matrix_lift_search(5, 1, 1, "all")
    mats = {c.matrix: c.det_residue for c in lifts}
    for a in mats:
        for b in mats:
            prod = _mat_mul(a, b, 5)
            assert mats[prod] == (mats[a] * mats[b]) % 5


def test_scaling_composed_with_lift_group():
    # composing the scaling map with any automorphism keeps determinant r^3
    lifts = matrix_lift_search(5, 2, 1, "all")
    assert {c.det_residue for c in lifts} == {pow(2, 3, 5)}


def test_search_validates_inputs():
    with pytest.raises(ValueError):
        matrix_lift_search(5, 1, 1, "weird")


# -- orbit decisions -------------------------------------------------------------------

def test_dh_orbit_equivalent_with_witness():
    cert = dh_orbit_decision(5, 1, 4)
    assert cert.equivalent and cert.certified
    assert cert.witness is not None
    assert cert.witness.det_residue == 4  # a det = -1 witness


def test_dh_orbit_inequivalent():
    cert = dh_orbit_decision(5, 2, 1)
    assert not cert.equivalent and cert.certified
    assert cert.pm1_candidates == 0


def test_dh_orbit_reflexive_identity_witness():
    cert = dh_orbit_decision(5, 3, 3)
    assert cert.equivalent
    assert cert.witness.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_dh_orbit_grid_at_five():
    for r in range(1, 5):
        for s in range(1, 5):
            cert = dh_orbit_decision(5, r, s)
            assert cert.equivalent == (r == s or r + s == 5)
            assert cert.certified


def test_dh_orbit_p7_vacuous_obstruction():
    # regression for the p = 7 discovery: scaling by 4 has det 64 = 1 mod 7
    # and transports the 1-family into the 2-family, so the det filter
    # cannot certify inequivalence; the decision is honest about it
    cert = dh_orbit_decision(7, 1, 2)
    assert not cert.equivalent
    assert not cert.certified
    assert cert.pm1_candidates > 0
    assert "vacuous" in cert.note


# -- characteristic subgroups -------------------------------------------------------------

def test_characteristic_check():
    rep = characteristic_check(5)
    assert rep.passed
    assert rep.lift_group_order == 5
    assert rep.h1_preserved and rep.h2_preserved
    assert rep.negative_control_moved
    assert rep.center_inside_both


def test_central_correction_invariance():
    assert central_correction_invariance(5, 2, 1, samples=1000, seed=1)
    assert central_correction_invariance(5, 1, 1, samples=120, seed=2)


def test_lift_group_closed_for_other_r():
    lifts = matrix_lift_search(5, 2, 2, "all")
    mats = {c.matrix for c in lifts}
    assert len(mats) == 5
    assert all(_mat_mul(a, b, 5) in mats for a in mats for b in mats)
    assert {c.det_residue for c in lifts} == {1}
