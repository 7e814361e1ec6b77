"""Sparse multivariate polynomials with LocalElem coefficients.

Over an exact ring these form the flat carrier F_Q[π][x_0, x_1, ...]; over a
truncated ring they give (R/π^N)[x_0, x_1, ...] for identities certified at
working precision.
"""

from __future__ import annotations

from .local import LocalElem, LocalRing


class Poly:
    __slots__ = ("ring", "nvars", "_t")

    def __init__(self, ring: LocalRing, nvars: int, terms: dict | None = None):
        self.ring = ring
        self.nvars = nvars
        clean = {}
        for mono, c in (terms or {}).items():
            if c.ring is not ring:
                c = ring.coerce(c)
            if not c.is_zero() or c.prec < ring.cap:
                clean[mono] = c
        self._t = clean

    @classmethod
    def var(cls, ring: LocalRing, nvars: int, i: int, power: int = 1) -> "Poly":
        mono = tuple(power if k == i else 0 for k in range(nvars))
        return cls(ring, nvars, {mono: ring.one()})

    @classmethod
    def const(cls, ring: LocalRing, nvars: int, c: LocalElem) -> "Poly":
        return cls(ring, nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, ring: LocalRing, exps: tuple, c: LocalElem | None = None) -> "Poly":
        return cls(ring, len(exps), {tuple(exps): ring.one() if c is None else c})

    def items(self):
        return sorted(self._t.items())

    def coeff(self, mono: tuple) -> LocalElem:
        c = self._t.get(tuple(mono))
        return self.ring.zero() if c is None else c

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._t.values())

    def _map(self, fn) -> "Poly":
        return Poly(self.ring, self.nvars, {m: fn(c) for m, c in self._t.items()})

    def __add__(self, other: "Poly") -> "Poly":
        acc = dict(self._t)
        for m, c in other._t.items():
            acc[m] = acc[m] + c if m in acc else c
        return Poly(self.ring, self.nvars, acc)

    def __neg__(self) -> "Poly":
        return self._map(lambda c: -c)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        acc: dict = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t = c1 * c2
                acc[m] = acc[m] + t if m in acc else t
        return Poly(self.ring, self.nvars, acc)

    def scale(self, r: LocalElem) -> "Poly":
        return self._map(lambda c: r * c)

    def shift(self, k: int) -> "Poly":
        return self._map(lambda c: c.shift(k))

    def frob(self, k: int) -> "Poly":
        """p^k-th power: exact termwise in characteristic p."""
        if k == 0:
            return self
        m = self.ring.field.p**k
        return Poly(self.ring, self.nvars,
                    {tuple(e * m for e in mono): c.frob(k) for mono, c in self._t.items()})

    def phi(self, k: int = 1) -> "Poly":
        return self._map(lambda c: c.phi(k))

    def div_pi_exact(self, k: int) -> "Poly":
        return self._map(lambda c: c.div_pi_exact(k))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for mono, c in self.items():
            mon = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(mono) if e)
            parts.append(f"({c})" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)
