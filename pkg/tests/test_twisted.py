import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetchar import AdditivePoly, FieldSpec, LocalRing, invert_sdagger, solve_intertwiner
from jetchar.errors import InsufficientPrecision, NotInSDagger, StrictnessViolation
from jetchar.twisted import compose, linear_coefficient, q_twist

R9 = LocalRing(FieldSpec.standard(3, 1, 2), 20)

coeff = st.lists(st.integers(0, 8), max_size=6).map(lambda d: R9(d))
polys = st.lists(coeff, min_size=1, max_size=4).map(lambda cs: AdditivePoly.from_list(R9, cs))


def P(R, *cs):
    return AdditivePoly.from_list(R, list(cs))


def test_commutation_law(F9):
    F = F9.field
    c = F9.constant(F.generator)
    tau = AdditivePoly.tau(F9, 1)
    assert compose(tau, AdditivePoly.tau(F9, 0, c)) == AdditivePoly.tau(F9, 1, c.qpow(1))


def test_identity_is_neutral(F3):
    f = P(F3, F3.pi(), F3.one(), F3.pi(2))
    x = AdditivePoly.identity(F3)
    assert compose(f, x) == f and compose(x, f) == f


def test_square_of_one_plus_pi_tau(F3):
    pi = F3.pi()
    f = P(F3, F3.one(), pi)
    expected = P(F3, F3.one(), pi + pi, pi ** 4)
    assert compose(f, f) == expected


@settings(max_examples=40)
@given(polys, polys, polys)
def test_compose_is_associative(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@settings(max_examples=40)
@given(polys, polys, coeff)
def test_compose_matches_evaluation(f, g, x):
    assert compose(f, g).evaluate(x) == f.evaluate(g.evaluate(x))


def test_invert_identity(F3):
    x = AdditivePoly.identity(F3)
    assert invert_sdagger(x, 6) == x


def test_invert_one_plus_pi_tau(F3):
    pi = F3.pi()
    f = P(F3, F3.one(), pi)
    g = invert_sdagger(f, 6)
    assert g.coeff(1) == -pi
    assert g.coeff(2) == pi ** 4
    for n in range(7):
        assert g.coeff(n).vbound() >= n
    assert compose(g, f).truncate(6) == AdditivePoly.identity(F3)
    assert compose(f, g).truncate(6) == AdditivePoly.identity(F3)


def test_invert_constant_two(F3):
    f = P(F3, F3.constant(2), F3.pi())
    assert invert_sdagger(f, 3).coeff(0) == F3.constant(2)


def test_invert_rejects_non_members(F3):
    with pytest.raises(NotInSDagger):
        invert_sdagger(P(F3, F3.pi()), 3)
    with pytest.raises(NotInSDagger):
        invert_sdagger(P(F3, F3.one(), F3.one()), 3)


def test_intertwiner_identity(F3):
    a = [F3.pi(), F3.one(), F3.one()]
    f = solve_intertwiner(a, a, F3.one(), 10)
    assert f == AdditivePoly.identity(F3)


def test_intertwiner_first_step(F3):
    # src = (π, φ(a1) π^(q-1)), tgt = Ĝ_a
    pi = F3.pi()
    a1 = F3([1, 2, 1])
    abar = a1.phi() * pi ** 2
    f = solve_intertwiner([pi, abar], [pi], F3.one(), 8)
    expected = (F3.one() - pi ** 2).invert() * a1.phi() * pi
    assert f.coeff(1) == expected
    for i in range(9):
        assert f.coeff(i).vbound() >= i
    # f ∘ φ_src(t) = π·f up to the bound
    lhs = compose(f, P(F3, pi, abar), bound=8)
    assert lhs == f.scale(pi).truncate(8)


def test_intertwiner_zero_start(F3):
    pi = F3.pi()
    f = solve_intertwiner([pi, pi], [pi], F3.zero(), 6)
    assert f.is_zero()


def test_intertwiner_errors(F3):
    with pytest.raises(StrictnessViolation):
        solve_intertwiner([F3.one()], [F3.pi()], F3.one(), 3)
    R1 = LocalRing(F3.spec, 1)
    with pytest.raises(InsufficientPrecision):
        solve_intertwiner([R1.pi()], [R1.pi()], R1.one(), 3)


def test_linear_coefficient(F3):
    assert linear_coefficient(AdditivePoly.identity(F3)) == F3.one()
    assert linear_coefficient(AdditivePoly.tau(F3, 1)).is_zero()
    assert linear_coefficient(P(F3, F3.pi(), F3.one())) == F3.pi()


def test_q_twist(F9):
    c = F9.constant(F9.field.generator)
    assert q_twist(AdditivePoly.identity(F9), 1) == AdditivePoly.tau(F9, 1)
    assert q_twist(AdditivePoly.tau(F9, 0, c), 1) == AdditivePoly.tau(F9, 1, c.qpow(1))
    f = P(F9, c, F9.pi())
    assert q_twist(f, 0) == f
