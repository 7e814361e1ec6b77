import random

import pytest

from jetchar import AdditivePoly, ConfigError, DrinfeldModule, FieldSpec, LocalRing, WittVector, psi, theta_iso
from jetchar.drinfeld import (
    act,
    act_t,
    check_iphi,
    check_kernel_char_linear,
    check_latfrob_linear,
    default_theta_bound,
    jet_cocycle,
    kernel_action_coeffs,
    kernel_action_matrix,
    lateral_frobenius,
    psi_by_iteration,
    random_point,
)
from jetchar.witt import LocalCarrier, ghost

from conftest import const, module


def mod_pi(x):
    return x.residue()


@pytest.fixture
def E9(F9):
    """A rank-2 module over F_9[[π]] with q̂ = 9 and non-constant coefficients."""
    return DrinfeldModule(F9, [F9([4, 1, 2]), F9([1, 3])])


def test_rank_and_leading_unit(F3):
    assert module(F3, 1, 1).rank == 2
    with pytest.raises(ConfigError):
        DrinfeldModule(F3, [])


def test_act_t_on_zero(E11):
    C = LocalCarrier(E11.ring)
    zero = WittVector(C, tuple(E11.ring.zero() for _ in range(3)))
    assert act_t(E11, zero) == zero


def test_act_t_order_zero(E11, F3):
    x = F3([2, 1])
    p = WittVector(LocalCarrier(F3), (x,))
    assert act_t(E11, p).comps[0] == F3.pi() * x + x.qpow(1) + x.qpow(2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_act_t_in_ghost_coordinates(E9, n):
    rng = random.Random(n)
    p = random_point(E9, n, rng)
    gp = ghost(p)
    lhs = ghost(act_t(E9, p))
    q = E9.spec.q
    for i, w in enumerate(gp):
        rhs = E9.ring.pi() * w
        for j, a in enumerate(E9.a, start=1):
            rhs = rhs + a.phi(i) * w ** (q**j)
        assert lhs[i] == rhs


def test_act_polynomial_is_additive_and_multiplicative(E11):
    rng = random.Random(4)
    p, r = random_point(E11, 2, rng), random_point(E11, 2, rng)
    a = [1, 2, 1]  # 1 + 2t + t²
    assert act(E11, a, p + r) == act(E11, a, p) + act(E11, a, r)
    assert act(E11, [0, 1], act(E11, [1, 1], p)) == act(E11, [0, 1, 1], p)
    assert act(E11, [0], p) == p - p


def test_act_rejects_coefficients_outside_fq(E9):
    p = random_point(E9, 1, random.Random(0))
    with pytest.raises(ConfigError):
        act(E9, [E9.ring.field.generator], p)


def test_jet_cocycle_paths_agree(E9):
    for n in (1, 2):
        a = jet_cocycle(E9, n, "ghost")
        assert a == jet_cocycle(E9, n, "witt")
        assert a == jet_cocycle(E9, n, "closed")


def test_jet_cocycle_first_component(E9):
    (z1,) = jet_cocycle(E9, 1)
    F9 = E9.ring
    a1, a2 = E9.a
    expected = AdditivePoly(F9, {2: F9.pi().delta(), 3: a1.delta(), 4: a2.delta()})
    assert z1 == expected


def test_jet_cocycle_constant_coefficients(E11, F3):
    (z1,) = jet_cocycle(E11, 1)
    assert z1 == AdditivePoly.tau(F3, 1, F3.one() - F3.pi(2))


def test_kernel_action_coeffs(E11, F3):
    pi = F3.pi()
    assert kernel_action_coeffs(E11, 0) == [pi, F3.one(), F3.one()]
    assert kernel_action_coeffs(E11, 1) == [pi, pi ** 2, pi ** 8]
    for n in (1, 2, 3):
        coeffs = kernel_action_coeffs(E11, n)
        for j, c in enumerate(coeffs[1:], start=1):
            assert c.valuation() == n * (3**j - 1) or c.is_zero()


def test_kernel_action_coeffs_match_jet_space(E9):
    # the t-action on x_1 of N^1 is exactly the H^1 action
    M = kernel_action_matrix(E9, 1)
    coeffs = kernel_action_coeffs(E9, 1)
    assert M.rows[0][0] == AdditivePoly.from_list(E9.ring, coeffs)


def test_theta_iso(E9):
    R = E9.ring
    bound = default_theta_bound(E9)
    th = theta_iso(E9, 1, bound)
    assert th.coeff(0) == R.one()
    for i in range(1, bound + 1):
        c = th.coeff(i)
        assert c.vbound() >= min(i, c.prec)
    a1 = E9.a[0]
    assert th.coeff(1) == (R.one() - R.pi(2)).invert() * a1.phi() * R.pi()
    coeffs = kernel_action_coeffs(E9, 1)
    lhs = th.compose(AdditivePoly.from_list(R, coeffs), bound=bound)
    assert lhs == th.scale(R.pi()).truncate(bound)


def test_lateral_frobenius_first_component(E11, F3):
    rng = random.Random(9)
    p = random_point(E11, 2, rng, kernel=True)
    out = lateral_frobenius(E11, 2, p)
    assert out.comps[1] == p.comps[1].qhat_pow() + F3.pi() * p.comps[2]
    zero = WittVector(p.carrier, tuple(F3.zero() for _ in range(3)))
    assert lateral_frobenius(E11, 2, zero) == WittVector(p.carrier, (F3.zero(), F3.zero()))
    with pytest.raises(ValueError):
        lateral_frobenius(E11, 2, random_point(E11, 2, rng))


def test_lateral_frobenius_is_a_linear_numerically(E11):
    rng = random.Random(3)
    E1 = E11.twist(1)
    for _ in range(5):
        y = random_point(E11, 2, rng, kernel=True)
        assert lateral_frobenius(E11, 2, act_t(E11, y)) == act_t(E1, lateral_frobenius(E11, 2, y))


@pytest.mark.parametrize("n", [2, 3])
def test_iphi_and_latfrob_certificates(E9, n):
    rng = random.Random(n)
    pts = [random_point(E9, n, rng, kernel=True) for _ in range(3)]
    assert check_iphi(E9, n, pts).passed
    assert check_latfrob_linear(E9, n).passed


def test_iphi_needs_order_two(E11):
    with pytest.raises(ValueError):
        check_iphi(E11, 1)


def test_psi_reductions(E9):
    R = E9.ring
    f = R.spec.f
    p1 = psi(E9, 1, 2)
    assert mod_pi(p1.columns[0].coeff(0)) == 1
    assert all(mod_pi(p1.columns[0].coeff(j)) == 0 for j in range(1, 12))
    assert p1.columns[1].is_zero()
    p2 = psi(E9, 2, 2)
    col1 = p2.columns[0]
    assert all(mod_pi(col1.coeff(j)) == (1 if j == f else 0) for j in range(12))
    lin = p2.columns[1].coeff(0)
    assert lin.valuation() == 1 and lin.div_pi_exact(1).residue() == 1


@pytest.mark.parametrize("i,n", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)])
def test_psi_constructions_agree_and_are_linear(E9, i, n):
    a = psi(E9, i, n)
    assert a.as_matrix() == psi_by_iteration(E9, i, n).as_matrix()
    assert check_kernel_char_linear(E9, a).passed


def test_psi_index_range(E11):
    with pytest.raises(ValueError):
        psi(E11, 3, 2)


def test_psi_numeric_linearity(E11):
    rng = random.Random(11)
    chi = psi(E11, 2, 2)
    pi = E11.ring.pi()
    for _ in range(5):
        y = random_point(E11, 2, rng, kernel=True)
        ty = act_t(E11, y)
        assert chi.evaluate(ty.comps[1:]) == pi * chi.evaluate(y.comps[1:])


def test_twist_applies_phi(F9):
    E = DrinfeldModule(F9, [F9([4, 1]), F9([1])])
    assert E.twist(1).a[0] == E.a[0].phi()


def test_module_over_s2(F3s2):
    F = F3s2.field
    E = DrinfeldModule(F3s2, [F3s2([F.generator, 1]), F3s2.one()])
    assert check_latfrob_linear(E, 2).passed
    assert check_kernel_char_linear(E, psi(E, 2, 2)).passed


def test_const_helper_is_integer_constant(F3):
    assert const(F3, 2) == F3.constant(2)
    assert LocalRing(FieldSpec.standard(3, 1, 1), 4).cap == 4
