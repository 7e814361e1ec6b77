"""Drinfeld modules in coordinates and the A-module structure of their jet spaces.

Points of J^nE over a carrier B are Witt vectors in W_n(B).  The generator t
acts by x ↦ Σ_j g(a_j)·x^(q^j) inside the ring W_n(B), where a_0 = π and g is
the universal lift R → W_n(R).

Every map used below is additive, so it is also available as an
``OreMatrix``: column j holds the image of the generic point V^j[x] over the
additive carrier.  Identities between such matrices are exact symbolic
certificates at working precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError
from .local import LocalElem, LocalRing
from .twisted import AdditivePoly, OreMatrix, solve_intertwiner
from .witt import (
    AdditiveCarrier,
    LocalCarrier,
    WittVector,
    frobenius_W,
    scalar_embed,
    unghost,
    witt_add,
    witt_mul,
    witt_qpow,
    witt_scale,
)

# A point of J^nE is a Witt vector of length n+1; N^n points have x_0 = 0.
JetPoint = WittVector


@dataclass(frozen=True)
class Certificate:
    """Outcome of an identity check."""

    name: str
    order: int
    passed: bool
    precision: float
    detail: str = ""

    def as_record(self) -> dict:
        prec = None if self.precision == float("inf") else self.precision
        return {"name": self.name, "order": self.order, "passed": self.passed,
                "precision": prec, "detail": self.detail}


class DrinfeldModule:
    """φ_E(t) = πτ^0 + a_1 τ + ... + a_r τ^r over a truncated ring, a_r a unit."""

    def __init__(self, ring: LocalRing, a: Sequence[LocalElem], base_poly: Sequence[int] | None = None):
        if not a:
            raise ConfigError("a Drinfeld module needs rank at least 1")
        self.ring = ring
        self.a = tuple(ring.coerce(x) for x in a)
        if not self.a[-1].is_unit():
            raise ConfigError("leading coefficient a_r must be a unit")
        if any(not x.is_integral() for x in self.a):
            raise ConfigError("coefficients must be integral")
        self.base_poly = None if base_poly is None else tuple(base_poly)
        self._cache: dict = {}

    @property
    def rank(self) -> int:
        return len(self.a)

    @property
    def spec(self):
        return self.ring.spec

    @property
    def coeffs(self) -> tuple:
        """(a_0 = π, a_1, ..., a_r)."""
        return (self.ring.pi(),) + self.a

    def phi_t(self) -> AdditivePoly:
        return AdditivePoly.from_list(self.ring, self.coeffs)

    def twist(self, k: int = 1) -> "DrinfeldModule":
        """The module E^(φ^k) with coefficients φ^k(a_i)."""
        if k == 0:
            return self
        key = ("twist", k)
        if key not in self._cache:
            self._cache[key] = DrinfeldModule(self.ring, [x.phi(k) for x in self.a], self.base_poly)
        return self._cache[key]

    def lifts(self, n: int) -> tuple:
        """Universal lifts g(a_j) ∈ W_n(R) for j = 0..r."""
        key = ("lifts", n)
        if key not in self._cache:
            self._cache[key] = tuple(scalar_embed(c, n) for c in self.coeffs)
        return self._cache[key]

    def cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def __repr__(self):
        return f"DrinfeldModule(r={self.rank}, a={list(self.a)})"


# ---------------------------------------------------------------- A-action

def _check_poly_in_Fq(E: DrinfeldModule, a: Sequence[int]):
    F = E.ring.field
    for c in a:
        if not F.in_subfield(c, E.spec.h):
            raise ConfigError("elements of A = F_q[t] need coefficients in F_q")


def act_t(E: DrinfeldModule, p: WittVector) -> WittVector:
    """t·p = Σ_j g(a_j)·p^(q^j) in W_n(B)."""
    n = len(p) - 1
    total = None
    for j, lift in enumerate(E.lifts(n)):
        term = witt_mul(lift, witt_qpow(p, j))
        total = term if total is None else witt_add(total, term)
    return total


def act(E: DrinfeldModule, a: Sequence[int], p: WittVector) -> WittVector:
    """φ_E(a) applied to a jet point, for a = Σ a_k t^k ∈ F_q[t] (list of F_q constants)."""
    _check_poly_in_Fq(E, a)
    coeffs = list(a)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return witt_scale(0, p)
    result = witt_scale(coeffs[-1], p)
    for c in reversed(coeffs[:-1]):
        result = witt_add(act_t(E, result), witt_scale(c, p))
    return result


def ghost_action(E: DrinfeldModule, w: Sequence, carrier) -> list:
    """t acting on ghost components: w_i ↦ π w_i + Σ_j φ^i(a_j) w_i^(q^j)."""
    h = E.ring.q_exp
    out = []
    for i, wi in enumerate(w):
        acc = carrier.pi_mul(wi, 1)
        for j, aj in enumerate(E.a, start=1):
            acc = acc + carrier.scalar(aj.phi(i), carrier.frob(wi, h * j))
        out.append(acc)
    return out


# ---------------------------------------------------------------- generic points

def _generic_point(ring: LocalRing, n: int, j: int) -> WittVector:
    """V^j[x] over the additive carrier, in W_n."""
    C = AdditiveCarrier(ring)
    comps = [C.point() if k == j else C.zero() for k in range(n + 1)]
    return WittVector(C, tuple(comps))


def additive_matrix(ring: LocalRing, n_in: int, fn, first: int = 0) -> OreMatrix:
    """Matrix of an additive map on Witt coordinates first..n_in."""
    cols = [list(fn(_generic_point(ring, n_in, j)).comps) for j in range(first, n_in + 1)]
    return OreMatrix.from_columns(ring, cols)


def t_action_matrix(E: DrinfeldModule, n: int) -> OreMatrix:
    """The t-action on J^nE, an (n+1)×(n+1) matrix of additive polynomials."""
    return E.cached(("tmat", n), lambda: additive_matrix(E.ring, n, lambda p: act_t(E, p)))


def kernel_action_matrix(E: DrinfeldModule, n: int) -> OreMatrix:
    """The t-action on N^n in the coordinates x_1..x_n."""
    def build():
        M = t_action_matrix(E, n)
        return OreMatrix(E.ring, [row[1:] for row in M.rows[1:]])
    return E.cached(("nmat", n), build)


def jet_cocycle(E: DrinfeldModule, n: int, path: str = "ghost") -> list[AdditivePoly]:
    """Components z_1..z_n of t·[x]: the cocycle of J^nE → E for the Teichmüller splitting.

    ``path="ghost"`` acts on ghost components and unghosts over the additive
    carrier; ``"witt"`` uses the ring structure of W_n; ``"closed"`` uses
    z_i = Σ_j g(a_j)_i τ^(f i + j).
    """
    ring = E.ring
    if path == "ghost":
        C = AdditiveCarrier(ring)
        f = ring.spec.f
        w = [AdditivePoly.tau(ring, f * i) for i in range(n + 1)]
        return list(unghost(C, ghost_action(E, w, C)).comps[1:])
    if path == "witt":
        return t_action_matrix(E, n).column(0)[1:]
    if path == "closed":
        f = ring.spec.f
        lifts = E.lifts(n)
        return [AdditivePoly(ring, {f * i + j: lifts[j][i] for j in range(E.rank + 1)})
                for i in range(1, n + 1)]
    raise ValueError(f"unknown path {path!r}")


def kernel_action_coeffs(E: DrinfeldModule, n: int) -> list[LocalElem]:
    """(π, φ^n(a_1)π^(n(q-1)), ..., φ^n(a_r)π^(n(q^r-1)))."""
    q = E.spec.q
    return [E.ring.pi()] + [a.phi(n).shift(n * (q**j - 1)) for j, a in enumerate(E.a, start=1)]


def theta_iso(E: DrinfeldModule, n: int, degree_bound: int) -> AdditivePoly:
    """Linearization ϑ_n: the A-linear coordinate with ϑ_n'(0) = 1."""
    key = ("theta", n, degree_bound)
    return E.cached(key, lambda: solve_intertwiner(
        kernel_action_coeffs(E, n), [E.ring.pi()], E.ring.one(), degree_bound))


def default_theta_bound(E: DrinfeldModule) -> int:
    """Degree beyond which ϑ_1 vanishes at working precision.

    v(b_i) ≥ (q-2)·i for q ≥ 3, so ceil(cap/(q-2)) terms always suffice.
    """
    q = E.spec.q
    cap = E.ring.cap
    return max(4, -(-cap // (q - 2)) + 1)


# ---------------------------------------------------------------- lateral Frobenius

def lateral_frobenius(E: DrinfeldModule, n: int, p: WittVector) -> WittVector:
    """𝔣: N^n → N^(n-1); under N^n ≅ W_(n-1) it is the Witt Frobenius."""
    if len(p) != n + 1:
        raise ValueError("point has the wrong order")
    if not p.carrier.is_zero(p.comps[0]):
        raise ValueError("lateral Frobenius is defined on N^n (x_0 = 0)")
    y = WittVector(p.carrier, p.comps[1:])
    fy = frobenius_W(y)
    return WittVector(p.carrier, (p.carrier.zero(),) + fy.comps)


def lateral_frobenius_matrix(E: DrinfeldModule, n: int) -> OreMatrix:
    """𝔣 in coordinates: (x_1..x_n) ↦ (y_1..y_(n-1))."""
    def build():
        cols = []
        for j in range(1, n + 1):
            p = _generic_point(E.ring, n, j)
            cols.append(list(lateral_frobenius(E, n, p).comps[1:]))
        return OreMatrix.from_columns(E.ring, cols)
    return E.cached(("latfrob", n), build)


def jet_frobenius_matrix(ring: LocalRing, n: int) -> OreMatrix:
    """φ: J^nE → J^(n-1)E (Witt Frobenius on all coordinates)."""
    return additive_matrix(ring, n, frobenius_W)


def inclusion_matrix(ring: LocalRing, n: int) -> OreMatrix:
    """i: N^n → J^nE, (x_1..x_n) ↦ (0, x_1..x_n)."""
    zero = AdditivePoly.zero(ring)
    one = AdditivePoly.identity(ring)
    rows = [[zero] * n] + [[one if i == j else zero for j in range(n)] for i in range(n)]
    return OreMatrix(ring, rows)


def check_iphi(E: DrinfeldModule, n: int, points: Sequence[WittVector] = ()) -> Certificate:
    """Certify φ∘φ∘i = φ∘i∘𝔣 on N^n as an identity of additive matrices.

    Optional numeric points of N^n are also checked.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ring = E.ring
    Fn = jet_frobenius_matrix(ring, n)
    Fn1 = jet_frobenius_matrix(ring, n - 1)
    lhs = Fn1 @ (Fn @ inclusion_matrix(ring, n))
    rhs = Fn1 @ (inclusion_matrix(ring, n - 1) @ lateral_frobenius_matrix(E, n))
    diff = lhs - rhs
    ok = diff.is_zero()
    prec = diff.min_prec()
    for p in points:
        a = frobenius_W(frobenius_W(p))
        b = frobenius_W(lateral_frobenius(E, n, p))
        ok = ok and a == b
    return Certificate("iphi", n, ok, prec)


def check_latfrob_linear(E: DrinfeldModule, n: int) -> Certificate:
    """𝔣 ∘ t_E = t_(E^φ) ∘ 𝔣 on N^n, symbolically."""
    L = lateral_frobenius_matrix(E, n)
    lhs = L @ kernel_action_matrix(E, n)
    rhs = kernel_action_matrix(E.twist(1), n - 1) @ L
    diff = lhs - rhs
    return Certificate("latfrob-linear", n, diff.is_zero(), diff.min_prec())


# ---------------------------------------------------------------- kernel characters

@dataclass
class NKernelChar:
    """A homomorphism N^n → Ĝ_a: (x_1..x_n) ↦ Σ_j ψ_j(x_j)."""

    order: int
    columns: list = field(default_factory=list)

    @property
    def ring(self) -> LocalRing:
        return self.columns[0].ring

    def as_matrix(self) -> OreMatrix:
        return OreMatrix(self.ring, [list(self.columns)])

    def __add__(self, other: "NKernelChar") -> "NKernelChar":
        return NKernelChar(self.order, [a + b for a, b in zip(self.columns, other.columns)])

    def __sub__(self, other: "NKernelChar") -> "NKernelChar":
        return NKernelChar(self.order, [a - b for a, b in zip(self.columns, other.columns)])

    def scale(self, r: LocalElem) -> "NKernelChar":
        return NKernelChar(self.order, [c.scale(r) for c in self.columns])

    def phi_twist(self, k: int = 1) -> "NKernelChar":
        return NKernelChar(self.order, [c.phi_twist(k) for c in self.columns])

    def extend(self, n: int) -> "NKernelChar":
        """Pull back along the truncation N^n → N^order."""
        zero = AdditivePoly.zero(self.ring)
        return NKernelChar(n, list(self.columns) + [zero] * (n - self.order))

    def pullback(self, M: OreMatrix, order: int) -> "NKernelChar":
        """χ ∘ M for an additive map M into N^self.order."""
        return NKernelChar(order, (self.as_matrix() @ M).rows[0])

    def evaluate(self, xs: Sequence[LocalElem]) -> LocalElem:
        total = self.ring.zero()
        for col, x in zip(self.columns, xs):
            total = total + col.evaluate(x)
        return total

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.columns)

    def min_prec(self):
        return min(c.min_prec() for c in self.columns)


def psi(E: DrinfeldModule, i: int, n: int, degree_bound: int | None = None) -> NKernelChar:
    """Ψ_i = ϑ_1^(φ^(i-1)) ∘ 𝔣^(i-1) on N^n.

    The first coordinate of 𝔣^(i-1)(x_1..x_n) is the ghost component
    Σ_{j ≤ i} π^(j-1) x_j^(q̂^(i-j)), giving column j = ϑ_1^(φ^(i-1)) ∘ π^(j-1)τ^(f(i-j)).
    """
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    bound = default_theta_bound(E) if degree_bound is None else degree_bound

    def build():
        ring = E.ring
        theta = theta_iso(E, 1, bound).phi_twist(i - 1)
        f = ring.spec.f
        cols = []
        for j in range(1, n + 1):
            if j <= i:
                cols.append(theta.compose(AdditivePoly.tau(ring, f * (i - j), ring.pi(j - 1))))
            else:
                cols.append(AdditivePoly.zero(ring))
        return NKernelChar(n, cols)
    return E.cached(("psi", i, n, bound), build)


def psi_by_iteration(E: DrinfeldModule, i: int, n: int, degree_bound: int | None = None) -> NKernelChar:
    """Ψ_i built from the lateral Frobenius matrices (independent of the ghost shortcut)."""
    bound = default_theta_bound(E) if degree_bound is None else degree_bound
    ring = E.ring
    M = None
    for k in range(i - 1):
        L = lateral_frobenius_matrix(E, n - k)
        M = L if M is None else L @ M
    theta = theta_iso(E, 1, bound).phi_twist(i - 1)
    first = OreMatrix(ring, [[AdditivePoly.identity(ring)] + [AdditivePoly.zero(ring)] * (n - i)])
    proj = first if M is None else first @ M
    return NKernelChar(n, [theta.compose(c) for c in proj.rows[0]])


def check_kernel_char_linear(E: DrinfeldModule, chi: NKernelChar) -> Certificate:
    """χ ∘ t = π·χ on N^n."""
    n = chi.order
    lhs = chi.as_matrix() @ kernel_action_matrix(E, n)
    rhs = chi.as_matrix().scale(E.ring.pi())
    diff = lhs - rhs
    return Certificate("kernel-char-linear", n, diff.is_zero(), diff.min_prec())


def random_point(E: DrinfeldModule, n: int, rng, kernel: bool = False) -> WittVector:
    C = LocalCarrier(E.ring)
    comps = [E.ring.random(rng) for _ in range(n + 1)]
    if kernel:
        comps[0] = E.ring.zero()
    return WittVector(C, tuple(comps))
