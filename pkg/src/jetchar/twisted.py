"""F_q-additive polynomials Σ c_j x^(q^j) as elements of the Ore ring R{τ}.

Exponents are stored as τ-degrees j.  Composition follows b τ^i ∘ c τ^j =
b c^(q^i) τ^(i+j).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import InsufficientPrecision, NotInSDagger, StrictnessViolation
from .local import INF, LocalElem, LocalRing


class AdditivePoly:
    """Immutable additive polynomial with LocalElem coefficients.

    Coefficients that are zero to full ring precision are dropped; zeros known
    only to lower precision are kept so that the uncertainty propagates.
    ``bound_limited`` marks series cut at a degree bound while the tail was not
    yet provably zero.
    """

    __slots__ = ("ring", "_c", "bound_limited")

    def __init__(self, ring: LocalRing, coeffs: dict | None = None, bound_limited: bool = False):
        self.ring = ring
        clean = {}
        for j, c in (coeffs or {}).items():
            if c.ring is not ring:
                c = ring.coerce(c)
            if not c.is_zero() or c.prec < ring.cap:
                clean[j] = c
        self._c = clean
        self.bound_limited = bound_limited

    # constructors
    @classmethod
    def tau(cls, ring: LocalRing, j: int = 1, c: LocalElem | None = None) -> "AdditivePoly":
        return cls(ring, {j: ring.one() if c is None else c})

    @classmethod
    def identity(cls, ring: LocalRing) -> "AdditivePoly":
        return cls.tau(ring, 0)

    @classmethod
    def zero(cls, ring: LocalRing) -> "AdditivePoly":
        return cls(ring, {})

    @classmethod
    def from_list(cls, ring: LocalRing, coeffs: Sequence[LocalElem]) -> "AdditivePoly":
        return cls(ring, dict(enumerate(coeffs)))

    # inspection
    def coeff(self, j: int) -> LocalElem:
        c = self._c.get(j)
        return self.ring.zero() if c is None else c

    def items(self):
        return sorted(self._c.items())

    def support(self) -> list[int]:
        """τ-degrees whose coefficient is nonzero at its known precision."""
        return sorted(j for j, c in self._c.items() if not c.is_zero())

    def degree(self) -> int:
        sup = self.support()
        return sup[-1] if sup else -1

    def stored_degree(self) -> int:
        return max(self._c) if self._c else -1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._c.values())

    def min_prec(self):
        return min((c.prec for c in self._c.values()), default=self.ring.cap)

    def min_valuation(self):
        return min((c.vbound() for c in self._c.values()), default=INF)

    def linear_coefficient(self) -> LocalElem:
        return self.coeff(0)

    # arithmetic
    def __add__(self, other: "AdditivePoly") -> "AdditivePoly":
        acc = dict(self._c)
        for j, c in other._c.items():
            acc[j] = acc[j] + c if j in acc else c
        return AdditivePoly(self.ring, acc, self.bound_limited or other.bound_limited)

    def __neg__(self) -> "AdditivePoly":
        return AdditivePoly(self.ring, {j: -c for j, c in self._c.items()}, self.bound_limited)

    def __sub__(self, other: "AdditivePoly") -> "AdditivePoly":
        return self + (-other)

    def scale(self, r: LocalElem) -> "AdditivePoly":
        """Left multiplication r·f (post-composition with multiplication by r)."""
        return AdditivePoly(self.ring, {j: r * c for j, c in self._c.items()}, self.bound_limited)

    def compose(self, other: "AdditivePoly", bound: int | None = None) -> "AdditivePoly":
        """self ∘ other, optionally dropping τ-degrees above ``bound``."""
        acc: dict[int, LocalElem] = {}
        other_items = other.items()
        for i, fi in self.items():
            for j, gj in other_items:
                n = i + j
                if bound is not None and n > bound:
                    continue
                term = fi * gj.qpow(i)
                acc[n] = acc[n] + term if n in acc else term
        return AdditivePoly(self.ring, acc, self.bound_limited or other.bound_limited)

    def __matmul__(self, other: "AdditivePoly") -> "AdditivePoly":
        return self.compose(other)

    def q_twist(self, k: int) -> "AdditivePoly":
        """τ^k ∘ f, i.e. x ↦ f(x)^(q^k)."""
        if k == 0:
            return self
        return AdditivePoly(self.ring, {j + k: c.qpow(k) for j, c in self._c.items()},
                            self.bound_limited)

    def phi_twist(self, k: int = 1) -> "AdditivePoly":
        """Apply φ^k to every coefficient."""
        if k == 0:
            return self
        return AdditivePoly(self.ring, {j: c.phi(k) for j, c in self._c.items()},
                            self.bound_limited)

    def div_pi_exact(self, k: int) -> "AdditivePoly":
        return AdditivePoly(self.ring, {j: c.div_pi_exact(k) for j, c in self._c.items()},
                            self.bound_limited)

    def truncate(self, bound: int) -> "AdditivePoly":
        return AdditivePoly(self.ring, {j: c for j, c in self._c.items() if j <= bound},
                            self.bound_limited)

    def evaluate(self, x: LocalElem) -> LocalElem:
        """Numeric value Σ c_j x^(q^j)."""
        total = self.ring.zero()
        for j, c in self._c.items():
            total = total + c * x.qpow(j)
        return total

    def __eq__(self, other):
        if not isinstance(other, AdditivePoly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def encode(self) -> list:
        return [[j, c.encode()] for j, c in self.items()]

    def __repr__(self):
        if not self._c:
            return "0"
        return " + ".join(f"({c})τ^{j}" for j, c in self.items())


def compose(f: AdditivePoly, g: AdditivePoly, bound: int | None = None) -> AdditivePoly:
    return f.compose(g, bound)


def q_twist(f: AdditivePoly, k: int) -> AdditivePoly:
    return f.q_twist(k)


def linear_coefficient(f: AdditivePoly) -> LocalElem:
    return f.linear_coefficient()


def _tail_vanishes(coeffs: Sequence[LocalElem], width: int) -> bool:
    """The last ``width`` coefficients are zero at their known precision."""
    return all(c.is_zero() for c in coeffs[-width:])


def invert_sdagger(f: AdditivePoly, degree_bound: int) -> AdditivePoly:
    """Compositional inverse of f ∈ S† (unit constant term, v(b_i) ≥ i)."""
    ring = f.ring
    b = [f.coeff(i) for i in range(degree_bound + 1)]
    if not b[0].is_unit():
        raise NotInSDagger("constant coefficient is not a unit")
    for i, bi in enumerate(b):
        if bi.vbound() < i:
            raise NotInSDagger(f"coefficient {i} has valuation below {i}")
    inv_b0 = b[0].invert()
    c = [inv_b0]
    for n in range(1, degree_bound + 1):
        s = ring.zero()
        for i in range(n):
            bn = b[n - i]
            if not bn.is_zero() or bn.prec < ring.cap:
                s = s + c[i] * bn.qpow(i)
        c.append(-(inv_b0.qpow(n) * s))
    limited = f.stored_degree() > degree_bound or not _tail_vanishes(c, 1)
    return AdditivePoly(ring, dict(enumerate(c)), bound_limited=limited)


def _check_strict(coeffs: Sequence[LocalElem], name: str):
    if not coeffs:
        raise StrictnessViolation(f"{name} has no constant term")
    c0 = coeffs[0]
    pi = c0.ring.pi()
    if not (c0 - pi).is_zero():
        raise StrictnessViolation(f"{name} constant term is not π")


def solve_intertwiner(src: Sequence[LocalElem], tgt: Sequence[LocalElem], b0: LocalElem,
                      degree_bound: int) -> AdditivePoly:
    """The unique f = Σ b_i τ^i with f ∘ φ_src(t) = φ_tgt(t) ∘ f and f'(0) = b0.

    ``src`` and ``tgt`` list the coefficients (a_0 = π, a_1, ...).  Coefficients
    may have negative valuation when no integral solution exists.
    """
    _check_strict(src, "source")
    _check_strict(tgt, "target")
    ring = b0.ring
    if ring.cap < 2:
        raise InsufficientPrecision("division by π - π^(q^k) needs precision > 1")
    pi = ring.pi()

    def get(seq, k):
        return seq[k] if k < len(seq) else None

    b = [b0]
    for k in range(1, degree_bound + 1):
        s = ring.zero()
        for i in range(k):
            bi = b[i]
            if bi.is_zero() and bi.prec >= ring.cap:
                continue
            a = get(src, k - i)
            if a is not None:
                s = s + bi * a.qpow(i)
            c = get(tgt, k - i)
            if c is not None:
                s = s - c * bi.qpow(k - i)
        unit = ring.one() - pi.qpow(k).shift(-1)
        b.append(s.shift(-1) * unit.invert())
    limited = not _tail_vanishes(b, max(len(src), len(tgt)) - 1)
    return AdditivePoly(ring, dict(enumerate(b)), bound_limited=limited)


class OreMatrix:
    """Matrix of additive polynomials: an additive map between coordinate spaces.

    Entry [i][j] is the contribution of input coordinate j to output
    coordinate i.
    """

    def __init__(self, ring: LocalRing, rows: Sequence[Sequence[AdditivePoly]]):
        self.ring = ring
        self.rows = [list(r) for r in rows]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @classmethod
    def from_columns(cls, ring: LocalRing, cols: Sequence[Sequence[AdditivePoly]]) -> "OreMatrix":
        n_out = len(cols[0]) if cols else 0
        return cls(ring, [[col[i] for col in cols] for i in range(n_out)])

    def column(self, j: int) -> list[AdditivePoly]:
        return [row[j] for row in self.rows]

    def compose(self, other: "OreMatrix", bound: int | None = None) -> "OreMatrix":
        n, m = self.shape
        m2, k = other.shape
        if m != m2:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = []
        for i in range(n):
            row = []
            for c in range(k):
                acc = AdditivePoly.zero(self.ring)
                for j in range(m):
                    a = self.rows[i][j]
                    if a._c:
                        acc = acc + a.compose(other.rows[j][c], bound)
                row.append(acc)
            out.append(row)
        return OreMatrix(self.ring, out)

    def __matmul__(self, other: "OreMatrix") -> "OreMatrix":
        return self.compose(other)

    def __add__(self, other: "OreMatrix") -> "OreMatrix":
        return OreMatrix(self.ring, [[a + b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "OreMatrix") -> "OreMatrix":
        return OreMatrix(self.ring, [[a - b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.rows, other.rows)])

    def phi_twist(self, k: int = 1) -> "OreMatrix":
        return OreMatrix(self.ring, [[a.phi_twist(k) for a in r] for r in self.rows])

    def scale(self, r: LocalElem) -> "OreMatrix":
        return OreMatrix(self.ring, [[a.scale(r) for a in row] for row in self.rows])

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def min_prec(self):
        return min((a.min_prec() for r in self.rows for a in r), default=self.ring.cap)

    def __eq__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None


def tau_powers(ring: LocalRing, degrees: Iterable[int]) -> list[AdditivePoly]:
    return [AdditivePoly.tau(ring, d) for d in degrees]
