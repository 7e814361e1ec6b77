"""Truncated Laurent series over F_Q with tracked absolute precision.

``LocalRing(spec, cap)`` models R = F_Q[[π]]/π^cap (and its fraction field K
through negative valuations).  ``cap=None`` gives exact polynomials in π and
1/π, which serve as the flat carrier for symbolic checks.

Every element carries ``prec``: its value is known modulo π^prec.  Inputs are
exact up to the ring cap; each operation derives the precision of its result.
"""

from __future__ import annotations

import functools
import math
import random as _random
from dataclasses import dataclass

from .errors import ConfigError, InsufficientPrecision, NotAUnit, NotDivisible
from .field import FieldSpec, FiniteField, field_for

INF = math.inf


@functools.total_ordering
@dataclass(frozen=True)
class InfiniteValuation:
    """Valuation of an element that is zero to the precision ``certified_to``."""

    certified_to: float

    def __eq__(self, other):
        return isinstance(other, InfiniteValuation)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, InfiniteValuation)

    def __hash__(self):
        return hash("inf-valuation")

    def __repr__(self):
        return f"inf@{self.certified_to}"


class LocalRing:
    """The ring F_Q[[π]]/π^cap with Frobenius lift φ (coefficientwise q̂-power)."""

    def __init__(self, spec: FieldSpec, cap: int | None):
        if cap is not None and cap < 1:
            raise ConfigError("precision cap must be positive")
        self.spec = spec
        self.field: FiniteField = field_for(spec)
        self.cap = INF if cap is None else cap
        self.q_exp = spec.h
        self.qhat_exp = spec.h * spec.f

    @property
    def exact(self) -> bool:
        return self.cap == INF

    def __eq__(self, other):
        return isinstance(other, LocalRing) and (self.spec, self.cap) == (other.spec, other.cap)

    def __hash__(self):
        return hash((self.spec, self.cap))

    def __repr__(self):
        cap = "exact" if self.exact else f"π^{self.cap}"
        return f"LocalRing(F_{self.field.order}, {cap})"

    def exact_ring(self) -> "LocalRing":
        return LocalRing(self.spec, None)

    def with_cap(self, cap: int | None) -> "LocalRing":
        return LocalRing(self.spec, cap)

    # constructors
    def __call__(self, coeffs=(), offset: int = 0, prec=None) -> "LocalElem":
        """Element Σ coeffs[i] π^(offset+i), known to ``prec`` (default: cap)."""
        if isinstance(coeffs, LocalElem):
            return self.coerce(coeffs)
        if isinstance(coeffs, int):
            coeffs = [self.field.from_int(coeffs)]
        terms = {offset + i: c for i, c in enumerate(coeffs) if c}
        return LocalElem._make(self, terms, self.cap if prec is None else prec)

    def from_terms(self, terms: dict[int, int], prec=None) -> "LocalElem":
        return LocalElem._make(self, dict(terms), self.cap if prec is None else prec)

    def constant(self, c: int) -> "LocalElem":
        return LocalElem._make(self, {0: c} if c else {}, self.cap)

    def zero(self, prec=None) -> "LocalElem":
        return LocalElem._make(self, {}, self.cap if prec is None else prec)

    def one(self) -> "LocalElem":
        return self.constant(1)

    def pi(self, k: int = 1) -> "LocalElem":
        return LocalElem._make(self, {k: 1}, self.cap)

    def coerce(self, x: "LocalElem") -> "LocalElem":
        if x.ring.spec != self.spec:
            raise ConfigError("elements live over different residue fields")
        if x.ring.cap == self.cap:
            return x
        return LocalElem._make(self, dict(x._terms), min(x.prec, self.cap))

    def random(self, rng: _random.Random, valuation: int = 0, unit: bool = False,
               prec=None) -> "LocalElem":
        """Uniform element of π^valuation·R to the given precision."""
        prec = self.cap if prec is None else prec
        if prec == INF:
            raise ConfigError("random elements need a finite precision")
        Q = self.field.order
        terms = {}
        for e in range(valuation, prec):
            c = rng.randrange(1, Q) if (unit and e == valuation) else rng.randrange(Q)
            if c:
                terms[e] = c
        return LocalElem._make(self, terms, prec)

    def decode(self, data) -> "LocalElem":
        """Parse the textual encoding: a list of coefficients, one per power of π.

        Each coefficient is a digit string or a list of digit strings that are
        concatenated.  A dict ``{"v": offset, "c": [...], "prec": P}`` is also
        accepted (the output format).
        """
        offset, prec = 0, None
        if isinstance(data, dict):
            offset = int(data.get("v", 0))
            prec = data.get("prec")
            data = data.get("c", [])
        coeffs = []
        for item in data:
            text = item if isinstance(item, str) else "".join(item)
            coeffs.append(self.field.decode(text))
        return self(coeffs, offset, prec)


class LocalElem:
    """Immutable truncated Laurent series; ``_terms`` is a sorted tuple of (exponent, coefficient)."""

    __slots__ = ("ring", "_terms", "prec")

    def __init__(self, ring: LocalRing, terms: tuple, prec):
        self.ring = ring
        self._terms = terms
        self.prec = prec

    @staticmethod
    def _make(ring: LocalRing, terms: dict, prec) -> "LocalElem":
        prec = min(prec, ring.cap)
        items = tuple(sorted((e, c) for e, c in terms.items() if c and e < prec))
        return LocalElem(ring, items, prec)

    # inspection
    @property
    def field(self) -> FiniteField:
        return self.ring.field

    def terms(self) -> tuple:
        return self._terms

    def is_zero(self) -> bool:
        """Zero to the known precision."""
        return not self._terms

    def valuation(self):
        if self._terms:
            return self._terms[0][0]
        return InfiniteValuation(self.prec)

    def vbound(self):
        """Lower bound for the true valuation (``prec`` when zero at precision)."""
        return self._terms[0][0] if self._terms else self.prec

    def coefficient(self, e: int) -> int:
        for k, c in self._terms:
            if k == e:
                return c
            if k > e:
                break
        return 0

    def residue(self) -> int:
        if self._terms and self._terms[0][0] < 0:
            raise NotDivisible("element is not integral")
        if self.prec < 1:
            raise InsufficientPrecision("residue needs precision >= 1")
        return self.coefficient(0)

    def is_integral(self) -> bool:
        return not self._terms or self._terms[0][0] >= 0

    def is_unit(self) -> bool:
        return bool(self._terms) and self._terms[0][0] == 0

    def degree(self) -> int:
        return self._terms[-1][0] if self._terms else -1

    def with_prec(self, prec) -> "LocalElem":
        return LocalElem._make(self.ring, dict(self._terms), min(prec, self.prec))

    def identical(self, other: "LocalElem") -> bool:
        return self._terms == other._terms and self.prec == other.prec

    # arithmetic
    def _other(self, other) -> "LocalElem":
        if isinstance(other, LocalElem):
            return other
        if isinstance(other, int):
            return self.ring.constant(self.field.from_int(other))
        return NotImplemented

    def _target_ring(self, other: "LocalElem") -> LocalRing:
        if other.ring is self.ring:
            return self.ring
        if other.ring.spec != self.ring.spec:
            raise ConfigError("elements live over different residue fields")
        return self.ring if self.ring.cap <= other.ring.cap else other.ring

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        ring = self._target_ring(other)
        add = self.field.add_table
        acc = dict(self._terms)
        for e, c in other._terms:
            old = acc.get(e)
            acc[e] = c if old is None else add[old][c]
        return LocalElem._make(ring, acc, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg_table
        return LocalElem(self.ring, tuple((e, neg[c]) for e, c in self._terms), self.prec)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        ring = self._target_ring(other)
        prec = min(self.prec + other.vbound(), other.prec + self.vbound(), ring.cap)
        A, B = self._terms, other._terms
        if not A or not B:
            return LocalElem(ring, (), prec)
        F = self.field
        add, exp, log = F.add_table, F.exp_table, F.log_table
        acc: dict[int, int] = {}
        for e1, c1 in A:
            lim = prec - e1
            if lim <= B[0][0]:
                break
            l1 = log[c1]
            for e2, c2 in B:
                if e2 >= lim:
                    break
                e = e1 + e2
                v = exp[l1 + log[c2]]
                old = acc.get(e)
                acc[e] = v if old is None else add[old][v]
        items = tuple(sorted((e, c) for e, c in acc.items() if c))
        return LocalElem(ring, items, prec)

    __rmul__ = __mul__

    def scale(self, c: int) -> "LocalElem":
        """Multiply by the constant c ∈ F_Q."""
        if c == 0:
            return LocalElem(self.ring, (), self.prec)
        F = self.field
        exp, log = F.exp_table, F.log_table
        lc = log[c]
        return LocalElem(self.ring, tuple((e, exp[lc + log[a]]) for e, a in self._terms), self.prec)

    def shift(self, k: int) -> "LocalElem":
        """Multiply by π^k (k may be negative)."""
        return LocalElem._make(self.ring, {e + k: c for e, c in self._terms}, self.prec + k)

    def frob(self, k: int) -> "LocalElem":
        """x^(p^k); exact in characteristic p, precision scales by p^k."""
        if k == 0:
            return self
        tab = self.field.frob_table(k)
        m = self.field.p**k
        return LocalElem._make(self.ring, {e * m: tab[c] for e, c in self._terms}, self.prec * m)

    def qpow(self, j: int = 1) -> "LocalElem":
        """x^(q^j)."""
        return self.frob(self.ring.q_exp * j)

    def qhat_pow(self, k: int = 1) -> "LocalElem":
        """x^(q̂^k)."""
        return self.frob(self.ring.qhat_exp * k)

    def phi(self, k: int = 1) -> "LocalElem":
        """Frobenius lift φ^k: raise every coefficient to the q̂^k power."""
        if k == 0:
            return self
        tab = self.field.frob_table(self.ring.qhat_exp * k)
        return LocalElem(self.ring, tuple((e, tab[c]) for e, c in self._terms), self.prec)

    def div_pi_exact(self, k: int = 1) -> "LocalElem":
        if self.prec < k:
            raise InsufficientPrecision(f"cannot certify divisibility by π^{k} at precision {self.prec}")
        if self._terms and self._terms[0][0] < k:
            raise NotDivisible(f"element is not divisible by π^{k}")
        return self.shift(-k)

    def delta(self) -> "LocalElem":
        """π-derivation δ(x) = (φ(x) - x^q̂)/π."""
        if self.prec < 1:
            raise InsufficientPrecision("δ needs precision >= 1")
        if not self.is_integral():
            raise NotDivisible("δ is only defined on integral elements")
        return (self.phi() - self.qhat_pow()).div_pi_exact(1)

    def invert(self) -> "LocalElem":
        """Inverse of a unit."""
        if not self.is_unit():
            raise NotAUnit("element is not a unit")
        return self._inverse()

    def _inverse(self) -> "LocalElem":
        """Inverse of π^v·u for any nonzero element; absolute precision prec - 2v."""
        if not self._terms:
            raise NotAUnit("element is zero at its precision")
        v = self._terms[0][0]
        F = self.field
        rel = self.prec - v
        if rel == INF:
            if len(self._terms) > 1:
                raise InsufficientPrecision("inverse of a non-monomial in the exact ring")
            return LocalElem(self.ring, ((-v, F.inv(self._terms[0][1])),), INF)
        u = [0] * rel
        for e, c in self._terms:
            u[e - v] = c
        add, exp, log, neg = F.add_table, F.exp_table, F.log_table, F.neg_table
        inv0 = F.inv(u[0])
        w = [0] * rel
        w[0] = inv0
        lneg_inv0 = log[neg[inv0]]
        nz = [(i, log[c]) for i, c in enumerate(u) if c and i]
        for n in range(1, rel):
            s = 0
            for i, lc in nz:
                if i > n:
                    break
                b = w[n - i]
                if b:
                    s = add[s][exp[lc + log[b]]]
            w[n] = exp[lneg_inv0 + log[s]] if s else 0
        terms = {i - v: c for i, c in enumerate(w) if c}
        return LocalElem._make(self.ring, terms, self.prec - 2 * v)

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other._inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self._inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison
    def __eq__(self, other):
        """Equality at the common known precision."""
        if isinstance(other, int):
            other = self.ring.constant(self.field.from_int(other))
        if not isinstance(other, LocalElem):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def agrees_to(self, other: "LocalElem", prec) -> bool:
        """Equal modulo π^prec, with both values known that far."""
        d = self - other
        return d.prec >= prec and d.vbound() >= prec

    # encoding
    def encode(self) -> dict:
        start = min(0, self._terms[0][0]) if self._terms else 0
        stop = self.degree() + 1 if self._terms else start
        coeffs = [self.field.encode(self.coefficient(e)) for e in range(start, stop)]
        prec = None if self.prec == INF else self.prec
        return {"v": start, "c": coeffs, "prec": prec}

    def __repr__(self):
        if not self._terms:
            body = "0"
        else:
            parts = []
            F = self.field
            for e, c in self._terms:
                cs = F.encode(c).rstrip("0") or "0"
                if e == 0:
                    parts.append(f"[{cs}]")
                else:
                    mon = "π" if e == 1 else f"π^{e}"
                    parts.append(mon if cs == "1" else f"[{cs}]*{mon}")
            body = " + ".join(parts)
        tail = "" if self.prec == INF else f" + O(π^{self.prec})"
        return body + tail
