"""Truncated π-typical Witt vectors over R-algebras ("carriers").

Ghost components are w_i = Σ_j π^j x_j^(q̂^(i-j)).  In equal characteristic
addition is componentwise, and multiplication is bi-additive, which gives
the closed product formula

    (x·y)_i = Σ_{a,b ≤ i} e_{i-max(a,b)}(min(a,b)) · x_a^(q̂^(i-a)) · y_b^(q̂^(i-b))

where e_l(μ) is Witt component l of the universal lift of π^μ.  Its
coefficients lie in F_p[π], so evaluating it never divides by π.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import LengthMismatch, NotDivisible, NotInGhostImage
from .field import FieldSpec
from .local import LocalElem, LocalRing
from .symbolic import Poly
from .twisted import AdditivePoly


# ---------------------------------------------------------------- carriers

class LocalCarrier:
    """The base ring itself (flat when the ring is exact)."""

    kind = "local"

    def __init__(self, ring: LocalRing):
        self.ring = ring
        self.flat = ring.exact

    def zero(self):
        return self.ring.zero()

    def one(self):
        return self.ring.one()

    def mul(self, a, b):
        return a * b

    def frob(self, x, k):
        return x.frob(k)

    def scalar(self, r: LocalElem, x):
        return r * x

    def pi_mul(self, x, j):
        return x.shift(j)

    def div_pi(self, x, k):
        return x.div_pi_exact(k)

    def phi(self, x, k=1):
        return x.phi(k)

    def is_zero(self, x):
        return x.is_zero()


class PolyCarrier:
    """Polynomials in ``nvars`` variables over the ring."""

    kind = "poly"

    def __init__(self, ring: LocalRing, nvars: int):
        self.ring = ring
        self.nvars = nvars
        self.flat = ring.exact

    def var(self, i: int, power: int = 1) -> Poly:
        return Poly.var(self.ring, self.nvars, i, power)

    def zero(self):
        return Poly(self.ring, self.nvars)

    def one(self):
        return Poly.const(self.ring, self.nvars, self.ring.one())

    def mul(self, a, b):
        return a * b

    def frob(self, x, k):
        return x.frob(k)

    def scalar(self, r, x):
        return x.scale(r)

    def pi_mul(self, x, j):
        return x.shift(j)

    def div_pi(self, x, k):
        return x.div_pi_exact(k)

    def phi(self, x, k=1):
        return x.phi(k)

    def is_zero(self, x):
        return x.is_zero()


class AdditiveCarrier:
    """F_q-additive polynomials in one variable x.

    Only additive operations, q-powers and R-scalars are available, which is
    all that the A-action on Teichmüller-type points needs.
    """

    kind = "additive"
    flat = False

    def __init__(self, ring: LocalRing):
        self.ring = ring

    def point(self) -> AdditivePoly:
        return AdditivePoly.identity(self.ring)

    def zero(self):
        return AdditivePoly.zero(self.ring)

    def one(self):
        raise TypeError("the additive carrier has no unit")

    def mul(self, a, b):
        raise TypeError("additive polynomials cannot be multiplied pointwise")

    def frob(self, x, k):
        h = self.ring.q_exp
        if k % h:
            raise TypeError("only q-power maps preserve additivity over F_q")
        return x.q_twist(k // h)

    def scalar(self, r, x):
        return x.scale(r)

    def pi_mul(self, x, j):
        return x.scale(self.ring.pi(j))

    def div_pi(self, x, k):
        return x.div_pi_exact(k)

    def phi(self, x, k=1):
        return x.phi_twist(k)

    def is_zero(self, x):
        return x.is_zero()


# ---------------------------------------------------------------- vectors

@dataclass(frozen=True, eq=False)
class WittVector:
    carrier: Any
    comps: tuple

    @property
    def n(self) -> int:
        """Truncation level: the vector lies in W_n."""
        return len(self.comps) - 1

    def __len__(self):
        return len(self.comps)

    def __getitem__(self, i):
        return self.comps[i]

    def __add__(self, other):
        return witt_add(self, other)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, WittVector) or len(self) != len(other):
            return False
        return all((a - b).is_zero() for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def __repr__(self):
        return f"W{list(self.comps)}"


def witt_vector(carrier, comps: Sequence) -> WittVector:
    return WittVector(carrier, tuple(comps))


def zero_vector(carrier, n: int) -> WittVector:
    return WittVector(carrier, tuple(carrier.zero() for _ in range(n + 1)))


def teichmuller(carrier, x, n: int) -> WittVector:
    return WittVector(carrier, (x,) + tuple(carrier.zero() for _ in range(n)))


def _qhat_exp(carrier) -> int:
    return carrier.ring.qhat_exp


def ghost(v: WittVector) -> list:
    """Witt polynomials w_i = Σ_j π^j x_j^(q̂^(i-j))."""
    C = v.carrier
    e = _qhat_exp(C)
    out = []
    for i in range(len(v)):
        acc = C.zero()
        for j in range(i + 1):
            acc = acc + C.pi_mul(C.frob(v.comps[j], e * (i - j)), j)
        out.append(acc)
    return out


def unghost(carrier, w: Sequence) -> WittVector:
    """Invert the ghost map; each step needs an exact division by π^i."""
    e = _qhat_exp(carrier)
    xs = []
    for i, wi in enumerate(w):
        acc = wi
        for j, xj in enumerate(xs):
            acc = acc - carrier.pi_mul(carrier.frob(xj, e * (i - j)), j)
        try:
            xs.append(carrier.div_pi(acc, i))
        except NotDivisible as exc:
            raise NotInGhostImage(f"ghost component {i} is not in the image") from exc
    return WittVector(carrier, tuple(xs))


def _check_lengths(u: WittVector, v: WittVector):
    if len(u) != len(v):
        raise LengthMismatch(f"lengths {len(u)} and {len(v)} differ")


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    _check_lengths(u, v)
    return WittVector(u.carrier, tuple(a + b for a, b in zip(u.comps, v.comps)))


def witt_neg(u: WittVector) -> WittVector:
    return WittVector(u.carrier, tuple(-a for a in u.comps))


def witt_scale(c: int, u: WittVector) -> WittVector:
    """Componentwise action of a constant c ∈ F_Q (the k-vector space structure)."""
    ring = u.carrier.ring
    r = ring.constant(c)
    return WittVector(u.carrier, tuple(u.carrier.scalar(r, a) for a in u.comps))


@functools.lru_cache(maxsize=None)
def _lift_components_exact(spec: FieldSpec, mu: int, n: int) -> tuple:
    """Witt components e_0..e_n of the universal lift of π^mu, exactly over F_p[π]."""
    ring = LocalRing(spec, None)
    pm = ring.pi(mu)
    return tuple(unghost(LocalCarrier(ring), [pm] * (n + 1)).comps)


@functools.lru_cache(maxsize=4096)
def lift_components(ring: LocalRing, mu: int, n: int) -> tuple:
    """e_0(μ), ..., e_n(μ) coerced into ``ring``."""
    return tuple(ring.coerce(c) for c in _lift_components_exact(ring.spec, mu, n))


def _product_fn(cu, cv):
    """Pointwise product of a component of u with one of v; one side may be R-valued."""
    if cu.kind == cv.kind:
        return cu, cu.mul
    if cu.kind == "local":
        return cv, lambda a, b: cv.scalar(a, b)
    if cv.kind == "local":
        return cu, lambda a, b: cu.scalar(b, a)
    raise TypeError(f"cannot multiply {cu.kind} by {cv.kind} Witt vectors")


def witt_mul(u: WittVector, v: WittVector, path: str = "universal") -> WittVector:
    """Product in W_n.

    ``path="universal"`` evaluates the closed product formula and works over
    any carrier (including mixed R-scalar times other carrier).
    ``path="ghost"`` multiplies ghost components and unghosts; it needs a
    flat carrier or certified divisibility.
    """
    _check_lengths(u, v)
    if path == "ghost":
        C = u.carrier
        return unghost(C, [C.mul(a, b) for a, b in zip(ghost(u), ghost(v))])
    out_c, mul = _product_fn(u.carrier, v.carrier)
    ring = out_c.ring
    e = _qhat_exp(out_c)
    n = len(u) - 1
    xs, ys = u.comps, v.comps
    upow = {}
    vpow = {}
    comps = []
    for i in range(n + 1):
        acc = out_c.zero()
        for a in range(i + 1):
            xa = upow.get((a, i))
            if xa is None:
                xa = upow[(a, i)] = u.carrier.frob(xs[a], e * (i - a))
            for b in range(i + 1):
                m, M = min(a, b), max(a, b)
                coeff = lift_components(ring, m, n)[i - M]
                if coeff.is_zero() and coeff.prec >= ring.cap:
                    continue
                yb = vpow.get((b, i))
                if yb is None:
                    yb = vpow[(b, i)] = v.carrier.frob(ys[b], e * (i - b))
                acc = acc + out_c.scalar(coeff, mul(xa, yb))
        comps.append(acc)
    return WittVector(out_c, tuple(comps))


def witt_qpow(u: WittVector, j: int) -> WittVector:
    """u^(q^j) in W_n.

    The q^j-power map is additive in characteristic p, and
    (V^a[x])^(q^j) = V^a(g(π^(a(q^j-1)))·[x^(q^j)]), so
    component i is Σ_a e_{i-a}(a(q^j - 1)) x_a^(q^j q̂^(i-a)).
    """
    C = u.carrier
    ring = C.ring
    h, e = ring.q_exp, ring.qhat_exp
    Q = ring.spec.q**j
    n = len(u) - 1
    comps = []
    for i in range(n + 1):
        acc = C.zero()
        for a in range(i + 1):
            coeff = lift_components(ring, a * (Q - 1), n)[i - a]
            if coeff.is_zero() and coeff.prec >= ring.cap:
                continue
            acc = acc + C.scalar(coeff, C.frob(u.comps[a], h * j + e * (i - a)))
        comps.append(acc)
    return WittVector(C, tuple(comps))


def witt_pow(u: WittVector, k: int) -> WittVector:
    """u^k by repeated multiplication (used to cross-check ``witt_qpow``)."""
    result = one_vector(u.carrier, u.n)
    base = u
    while k:
        if k & 1:
            result = witt_mul(result, base)
        k >>= 1
        if k:
            base = witt_mul(base, base)
    return result


def one_vector(carrier, n: int) -> WittVector:
    return teichmuller(carrier, carrier.one(), n)


def frobenius_W(v: WittVector, path: str = "universal") -> WittVector:
    """Witt Frobenius W_n → W_{n-1}: ghost components shift left.

    Closed form: F(x)_k = [k=0] x_0^q̂ + Σ_{j≥1} e_{k+1-j}(1) x_j^(q̂^(k+1-j)),
    because F[x] = [x^q̂] and F V = π.
    """
    if len(v) < 2:
        raise LengthMismatch("Frobenius needs length at least 2")
    C = v.carrier
    if path == "ghost":
        return unghost(C, ghost(v)[1:])
    ring = C.ring
    e = _qhat_exp(C)
    n = len(v) - 2
    c = lift_components(ring, 1, n + 1)
    comps = []
    for k in range(n + 1):
        acc = C.frob(v.comps[0], e) if k == 0 else C.zero()
        for j in range(1, k + 2):
            acc = acc + C.scalar(c[k + 1 - j], C.frob(v.comps[j], e * (k + 1 - j)))
        comps.append(acc)
    return WittVector(C, tuple(comps))


def verschiebung(v: WittVector) -> WittVector:
    return WittVector(v.carrier, (v.carrier.zero(),) + v.comps)


def truncate(v: WittVector, n: int) -> WittVector:
    """Restriction W_m → W_n (drop the last components)."""
    return WittVector(v.carrier, v.comps[: n + 1])


def pi_times(v: WittVector) -> WittVector:
    """Multiplication by π, i.e. by the universal lift g(π)."""
    return witt_mul(scalar_embed(v.carrier.ring.pi(), len(v) - 1), v)


def scalar_embed(r: LocalElem, n: int) -> WittVector:
    """Universal lift g(r) ∈ W_n(R), with ghost components (r, φr, ..., φ^n r).

    Component i is known to prec(r) - i.
    """
    ring = r.ring
    ghosts = [r.phi(i) for i in range(n + 1)]
    return unghost(LocalCarrier(ring), ghosts)


def twist_vector(v: WittVector, k: int = 1) -> WittVector:
    """Apply φ^k to the R-scalars inside every component."""
    return WittVector(v.carrier, tuple(v.carrier.phi(c, k) for c in v.comps))


def fv_minus_vf_form(spec: FieldSpec, n: int) -> list[LocalElem]:
    """Universal c_j with (FV - VF)(x_0..x_n) = (πx_0, c_1 x_0^q̂, c_2 x_0^(q̂^2), ...).

    Computed by ghost/unghost over F_Q[π][x_0..x_n]; also checks that every
    other monomial vanishes and that FV - VF kills V-images.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ring = LocalRing(spec, None)
    C = PolyCarrier(ring, n + 1)
    x = WittVector(C, tuple(C.var(i) for i in range(n + 1)))
    diff = witt_add(frobenius_W(verschiebung(x), path="ghost"),
                    witt_neg(verschiebung(frobenius_W(x, path="ghost"))))
    qh = spec.qhat
    out = []
    for j, comp in enumerate(diff.comps):
        mono = tuple(qh**j if k == 0 else 0 for k in range(n + 1))
        c = comp.coeff(mono)
        rest = comp - Poly.monomial(ring, mono, c)
        if not rest.is_zero():
            raise AssertionError(f"component {j} of FV - VF has extra terms: {rest}")
        out.append(c)
    if not (out[0] - ring.pi()).is_zero():
        raise AssertionError("component 0 of FV - VF is not πx_0")
    y = WittVector(C, tuple(C.var(i) for i in range(n)))
    vy = verschiebung(y)
    on_v = witt_add(frobenius_W(verschiebung(vy), path="ghost"),
                    witt_neg(verschiebung(frobenius_W(vy, path="ghost"))))
    if not all(c.is_zero() for c in on_v.comps):
        raise AssertionError("FV - VF does not vanish on the image of V")
    return out[1:]


def universal_product_polys(spec: FieldSpec, n: int) -> list[list[tuple]]:
    """Export of the product polynomials of W_n.

    Entry i lists (exponent vector over x_0..x_n, y_0..y_n, coefficient) with
    the coefficient encoded as a sparse list of (power of π, digit string).
    """
    ring = LocalRing(spec, None)
    F = ring.field
    qh = spec.qhat
    out = []
    for i in range(n + 1):
        terms = []
        for a in range(i + 1):
            for b in range(i + 1):
                c = _lift_components_exact(spec, min(a, b), n)[i - max(a, b)]
                if c.is_zero():
                    continue
                exps = [0] * (2 * n + 2)
                exps[a] += qh ** (i - a)
                exps[n + 1 + b] += qh ** (i - b)
                terms.append((tuple(exps), [(e, F.encode(v)) for e, v in c.terms()]))
        out.append(terms)
    return out


def universal_polys_by_ghost(spec: FieldSpec, n: int) -> list[Poly]:
    """Product polynomials of W_n obtained from ghost/unghost over F_Q[π][x, y]."""
    ring = LocalRing(spec, None)
    C = PolyCarrier(ring, 2 * n + 2)
    x = WittVector(C, tuple(C.var(i) for i in range(n + 1)))
    y = WittVector(C, tuple(C.var(n + 1 + i) for i in range(n + 1)))
    return list(witt_mul(x, y, path="ghost").comps)
