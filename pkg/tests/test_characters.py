import random

import pytest

from jetchar import (
    AdditivePoly,
    DrinfeldModule,
    FieldSpec,
    LocalRing,
    crystal,
    del_psi,
    ext_reduce,
    ext_sharp_image,
    inner_derivation,
    order0_certificate,
    phi_star,
    psi,
    rank2_closed_forms,
    splitting_data,
    xn_basis,
)
from jetchar.acceptance import random_module
from jetchar.characters import check_character_linear, combine_characters
from jetchar.drinfeld import act_t, jet_cocycle, random_point
from jetchar.errors import CaseNotCovered, NonzeroLinearTerm, PrecisionTooLowToCertify


def residues(cls):
    return [c.residue() for c in cls.coords]


# ---------------------------------------------------------------- Ext reduction

def test_inner_derivations_reduce_to_zero(E11, rng):
    R = E11.ring
    for _ in range(10):
        alpha = AdditivePoly.from_list(R, [R.random(rng) for _ in range(5)])
        assert ext_reduce(E11, inner_derivation(E11, alpha)).is_zero()


def test_reduced_cocycle_is_fixed(E11):
    R = E11.ring
    assert ext_reduce(E11, AdditivePoly.tau(R, 1)).coords == [R.one()]


def test_reduction_rejects_linear_term(E11):
    with pytest.raises(NonzeroLinearTerm):
        ext_reduce(E11, AdditivePoly.identity(E11.ring))


@pytest.mark.parametrize("a1,a2", [(1, 1), (2, 1), (1, 2)])
def test_tau_powers_mod_pi(F3, a1, a2):
    E = DrinfeldModule(F3, [F3.constant(a1), F3.constant(a2)])
    F = F3.field
    w = F.div(a1, a2)
    q = 3
    for i in range(1, 6):
        got = ext_reduce(E, AdditivePoly.tau(F3, i + 1)).coords[0].residue()
        want = F.mul(F.pow(F.neg(1), i), F.pow(w, (q**i - 1) // (q - 1)))
        assert got == want


def test_del_psi1_mod_pi_is_reduced_cocycle(F9):
    E = DrinfeldModule(F9, [F9([4, 1, 2]), F9([1, 3])])
    f = F9.spec.f
    a1, a2 = E.a
    z = AdditivePoly(F9, {f: F9.one(), f + 1: a1.delta(), f + 2: a2.delta()})
    assert residues(del_psi(E, 1, 1)) == residues(ext_reduce(E, z))


def test_del_psi1_for_the_running_example(E11):
    # with w = 1 and constant coefficients the reduced class is +τ¹ mod π
    assert residues(del_psi(E11, 1, 1)) == [1]


# ---------------------------------------------------------------- splitting data

def test_splitting_running_example(E11):
    data = splitting_data(E11)
    assert data.m == 2
    assert [x.residue() for x in data.lambda_] == [2]
    assert all(x.is_integral() for x in data.lambda_)


def test_splitting_needs_room(E11):
    with pytest.raises(ValueError):
        splitting_data(E11, max_n=1)


def test_low_precision_is_reported():
    for cap in (2, 3, 4):
        R = LocalRing(FieldSpec.standard(3, 1, 1), cap)
        E = DrinfeldModule(R, [R.one(), R.one()])
        with pytest.raises(PrecisionTooLowToCertify):
            splitting_data(E)
    R = LocalRing(FieldSpec.standard(3, 1, 1), 5)
    assert splitting_data(DrinfeldModule(R, [R.one(), R.one()])).m == 2


@pytest.mark.parametrize("rank", [2, 3])
def test_splitting_order_at_most_rank(F3, rank):
    rng = random.Random(rank)
    for _ in range(4):
        E = random_module(F3, rank, rng)
        data = splitting_data(E)
        assert 1 <= data.m <= rank
        assert all(x.is_integral() for x in data.lambda_)


# ---------------------------------------------------------------- Θ_m and φ*

def test_theta_running_example(E11, rng):
    data = crystal(E11)
    theta = data.theta
    R = E11.ring
    assert theta.order == 2
    assert theta.mu[-1] == R.one() and theta.mu[0] == -data.lambda_[0]
    assert ext_sharp_image(E11, theta.kernel_part(E11)).ext.is_zero()
    assert check_character_linear(E11, theta).passed
    for _ in range(5):
        p = random_point(E11, 2, rng)
        assert theta.evaluate(E11, act_t(E11, p)) == R.pi() * theta.evaluate(E11, p)


def test_phi_star(E11):
    data = crystal(E11)
    ps = phi_star(E11, data.theta)
    assert ps.order == data.theta.order + 1
    assert ps.g.coeff(0).is_zero()
    assert all(c.passed for c in ps.certificates)


def test_frobenius_difference_certificate(E11):
    names = {c.name: c.passed for c in crystal(E11).certificates}
    assert names["prop-diff"] and names["gamma-matrix"]


def test_xn_basis(F3):
    E = DrinfeldModule(F3, [F3.one(), F3([0, 1]), F3.one()])
    data = crystal(E)
    basis = xn_basis(E, 4, data)
    assert len(basis) == 4 - data.m + 1
    for j, ch in enumerate(basis):
        assert ch.mu[data.m + j - 1] == F3.one()
        assert all(x.is_integral() for x in ch.mu)
        assert all(c.passed for c in ch.certificates if c.name == "basis-leading-integral")
    with pytest.raises(ValueError):
        xn_basis(E, data.m - 1, data)


# ---------------------------------------------------------------- crystal

def test_crystal_running_example(E11):
    data = crystal(E11)
    R = E11.ring
    assert data.m == 2
    assert data.gamma == R.pi().scale(2)
    G = data.Gamma
    assert G[0][0].is_zero() and G[1][0] == R.one()
    assert G[0][1] == -data.gamma
    assert G[1][1] == data.lambda_[0].phi()
    assert data.Gamma0 is None
    assert data.all_passed()


def test_gamma_matrix_shape_rank3(F3):
    E = DrinfeldModule(F3, [F3.one(), F3([0, 1]), F3.one()])
    data = crystal(E)
    m = data.m
    G = data.Gamma
    for i in range(1, m):
        assert G[i][i - 1] == F3.one()
    assert G[0][m - 1] == -data.gamma
    assert all(G[0][j].is_zero() for j in range(m - 1))
    assert data.all_passed()


# ---------------------------------------------------------------- Ext♯

def test_ext_sharp_of_characters(E11):
    data = crystal(E11)
    theta = data.theta
    img = ext_sharp_image(E11, theta.kernel_part(E11))
    assert img.lie == -theta.g.coeff(0)
    assert img.ext.is_zero()
    ps = phi_star(E11, theta)
    assert ext_sharp_image(E11, ps.kernel_part(E11)).is_zero()


def test_ext_sharp_of_psi(E11):
    # Teichmüller splitting: Ψ_1 carries no unit Lie part, Ψ_2 does
    assert ext_sharp_image(E11, psi(E11, 1, 1)).lie.valuation() >= 1
    assert ext_sharp_image(E11, psi(E11, 2, 2)).lie.is_unit()


def test_ext_sharp_vanishes_on_basis_combinations(F3, rng):
    E = DrinfeldModule(F3, [F3.one(), F3([0, 1]), F3.one()])
    basis = xn_basis(E, 4)
    shifted = [phi_star(E, ch) for ch in basis]
    combo = combine_characters(E, [F3.random(rng) for _ in shifted], shifted)
    assert ext_sharp_image(E, combo.kernel_part(E)).is_zero()


# ---------------------------------------------------------------- closed forms

def test_closed_forms_running_example(E11):
    cf = rank2_closed_forms(E11)
    assert cf.lambda1 == 2
    assert cf.gamma.residue() == 0 and cf.gamma.div_pi_exact(1).residue() == 2
    assert cf.case == "pi*lambda1/a1"


def test_closed_form_normalized(F9):
    # a_2 = 1: λ_1 = (-1)^f a^(q^(f-1)(q^f-1)/(q-1)) (1 - a' a^(q^(f-1)))^(q^f-1)
    F = F9.field
    q, f = 3, 2
    for a in (F9([F.generator]), F9([1, 1]), F9([F.generator, 2])):
        E = DrinfeldModule(F9, [a, F9.one()])
        cf = rank2_closed_forms(E, strict=False)
        r, d = a.residue(), a.delta().residue()
        inner = F.sub(1, F.mul(d, F.pow(r, q ** (f - 1))))
        if inner == 0:
            assert cf.case == "degenerate"
            continue
        want = F.mul(F.pow(r, q ** (f - 1) * (q**f - 1) // (q - 1)), F.pow(inner, q**f - 1))
        assert cf.lambda1 == want


def test_closed_form_agrees_with_pipeline(F3):
    rng = random.Random(77)
    compared = 0
    for _ in range(12):
        E = random_module(F3, 2, rng, a1_unit=True)
        cf = rank2_closed_forms(E, strict=False)
        if cf.case == "degenerate":
            continue
        data = crystal(E)
        assert data.lambda_[0].residue() == cf.lambda1
        assert (data.gamma - cf.gamma).vbound() >= 2
        compared += 1
    assert compared >= 5


def test_closed_form_not_covered(F3):
    E = DrinfeldModule(F3, [F3.pi(), F3.one()])
    with pytest.raises(CaseNotCovered):
        rank2_closed_forms(E)
    assert rank2_closed_forms(E, strict=False).case == "not-covered"
    with pytest.raises(CaseNotCovered):
        rank2_closed_forms(DrinfeldModule(F3, [F3.one(), F3.one(), F3.one()]))


def test_degenerate_closed_form(F3):
    # a_1 = 1 + π, a_2 = 1: the bracketed factor vanishes mod π; ∂Ψ_1 and
    # ∂Ψ_2 both have valuation 1 so λ_1 is a unit the formula cannot see
    E = DrinfeldModule(F3, [F3([1, 1]), F3.one()])
    with pytest.raises(CaseNotCovered):
        rank2_closed_forms(E)
    assert rank2_closed_forms(E, strict=False).case == "degenerate"
    assert del_psi(E, 1, 1).coords[0].valuation() == 1
    assert del_psi(E, 2, 2).coords[0].valuation() == 1
    data = crystal(E)
    assert data.m == 2 and data.lambda_[0].is_unit()
    assert data.all_passed()


@pytest.mark.parametrize("a2,m", [(1, 1), (2, 1), ("gen", 2)])
def test_canonical_lifts(F9, a2, m):
    # f = 2, a_1 = π: Ψ_1 already dies in Ext exactly when a_2 mod π lies in F_3
    c = F9.constant(F9.field.generator) if a2 == "gen" else F9.constant(a2)
    E = DrinfeldModule(F9, [F9.pi(), c])
    data = crystal(E)
    assert data.m == m
    assert data.canonical_lift == (m == 1)
    assert del_psi(E, 1, 1).is_zero() == (m == 1)
    assert data.all_passed()


# ---------------------------------------------------------------- order 0

def test_order0_running_example(E11):
    rep = order0_certificate(E11)
    assert rep.passed
    assert rep.blowup_degrees["b0"] == 1
    for mins in rep.window_minima.values():
        neg = [v for v in mins if v < 0]
        assert all(a > b for a, b in zip(neg, neg[1:]))


def test_order0_window_seed_drops_one(E11):
    R = E11.ring
    pi = R.pi()
    a = E11.coeffs
    r = E11.rank
    start = 5
    b = {start: R.one(), start + 1: R.zero()}
    n = start + r
    s = R.zero()
    for k in range(1, r + 1):
        s = s + a[k].qpow(n - k) * b[n - k]
    bn = s.shift(-1) * (R.one() - pi.qpow(n).shift(-1)).invert()
    assert bn.valuation() == -1


@pytest.mark.parametrize("seed", range(4))
def test_order0_random_rank2(F3, seed):
    E = random_module(F3, 2, random.Random(seed))
    assert order0_certificate(E).passed


def test_jet_cocycle_reduces_to_del_psi1(E11):
    (z1,) = jet_cocycle(E11, 1)
    assert residues(ext_reduce(E11, z1)) == residues(del_psi(E11, 1, 1))
