import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetchar import FieldSpec, LocalRing
from jetchar.local import InfiniteValuation
from jetchar.errors import InsufficientPrecision, NotAUnit, NotDivisible

R3 = LocalRing(FieldSpec.standard(3, 1, 1), 20)

digits = st.lists(st.integers(0, 2), min_size=0, max_size=12)


def elem(ds):
    return R3(ds)


def test_phi_fixes_pi(F3):
    assert F3.pi().phi() == F3.pi()


def test_phi_is_coefficientwise_qhat_power(F3s2):
    F = F3s2.field
    c = F.generator
    x = F3s2([0, 0, c])
    assert x.phi() == F3s2([0, 0, F.pow(c, 3)])
    assert F.pow(c, 3) != c


def test_delta_of_constant_is_zero(F9):
    for c in range(9):
        assert F9.constant(c).delta().is_zero()


def test_delta_pi(F3):
    assert F3.pi().delta() == F3.one() - F3.pi(2)


def test_delta_c_plus_pi_over_f9(F9):
    F = F9.field
    c = F.generator
    assert F9([c, 1]).delta() == F9.one() - F9.pi(8)


def test_delta_needs_precision():
    R = LocalRing(FieldSpec.standard(3, 1, 1), 4)
    x = R([1], prec=0)
    with pytest.raises(InsufficientPrecision):
        x.delta()


def test_valuation_examples(F3):
    v = F3.zero().valuation()
    assert isinstance(v, InfiniteValuation) and v.certified_to == F3.cap
    assert v > 1000
    assert (F3.pi(2) + F3.pi(3)).valuation() == 2
    assert F3.pi().delta().valuation() == 0


def test_div_pi_exact(F3):
    pi = F3.pi()
    assert F3.pi(2).div_pi_exact(2) == F3.one()
    assert (pi - pi ** 3).div_pi_exact(1) == F3.one() - F3.pi(2)
    with pytest.raises(NotDivisible):
        (F3.one() + pi).div_pi_exact(1)


def test_div_pi_lowers_precision(F3):
    x = F3.pi(3)
    assert x.div_pi_exact(2).prec == x.prec - 2


def test_invert_examples(F3):
    assert F3.one().invert() == F3.one()
    geo = F3([1] * F3.cap)
    assert (F3.one() - F3.pi()).invert() == geo
    with pytest.raises(NotAUnit):
        F3.pi().invert()


@given(digits, digits)
def test_delta_is_additive_up_to_the_carry(a, b):
    # δ(x+y) = δx + δy - Σ binom terms; in characteristic p the carry vanishes
    x, y = elem(a), elem(b)
    assert (x + y).delta() == x.delta() + y.delta()


@given(digits, digits)
def test_delta_product_rule(a, b):
    x, y = elem(a), elem(b)
    q = 3
    pi = R3.pi()
    lhs = (x * y).delta()
    rhs = x.qhat_pow() * y.delta() + y.qhat_pow() * x.delta() + pi * x.delta() * y.delta()
    assert lhs == rhs
    assert q == R3.field.spec.qhat


@given(digits.filter(lambda d: d and d[0] != 0))
def test_unit_inverse(ds):
    x = elem(ds)
    assert x * x.invert() == R3.one()


@settings(max_examples=50)
@given(digits, digits, digits)
def test_ring_axioms(a, b, c):
    x, y, z = elem(a), elem(b), elem(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x.phi() * y.phi() == (x * y).phi()


def test_multiplication_tracks_precision(F3):
    x = F3([1, 1], prec=5)
    y = F3.pi(2)
    assert (x * y).prec == 7
