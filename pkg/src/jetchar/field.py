"""Finite fields F_{p^d} given by an explicit modulus.

Elements are plain ints in ``range(p**d)``; the base-p digits of the int,
little-endian, are the coordinates in the power basis of the modulus.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .errors import ConfigError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m over F_p."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [x % p for x in a[:dm]] + [0] * max(0, dm - len(a))


def is_irreducible(modulus: tuple[int, ...] | list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree at most d/2."""
    d = len(modulus) - 1
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            div = list(low) + [1]
            if not any(_poly_mod(modulus, div, p)[:k]):
                return False
    return True


def first_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree d over F_p.

    A search helper for building fixtures; configurations still carry the
    modulus explicitly.
    """
    for low in itertools.product(range(p), repeat=d):
        cand = tuple(reversed(low)) + (1,)
        if d == 1 or (cand[0] and is_irreducible(cand, p)):
            return cand
    raise ConfigError(f"no irreducible polynomial of degree {d} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """Parameters q = p^h, q̂ = q^f and residue field F_{q̂^s} with its modulus."""

    p: int
    h: int
    f: int
    s: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modulus", tuple(int(c) for c in self.modulus))
        if not _is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if min(self.h, self.f, self.s) < 1:
            raise ConfigError("h, f and s must be positive")
        if self.p**self.h < 3:
            raise ConfigError("q = 2 is not supported (the theory needs q >= 3)")
        if len(self.modulus) != self.degree + 1:
            raise ConfigError(
                f"modulus must have degree h*f*s = {self.degree}, got {len(self.modulus) - 1}"
            )
        if self.modulus[-1] != 1 or any(not 0 <= c < self.p for c in self.modulus):
            raise ConfigError("modulus must be monic with digits in [0, p)")
        if not is_irreducible(self.modulus, self.p):
            raise ConfigError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @property
    def degree(self) -> int:
        return self.h * self.f * self.s

    @property
    def q(self) -> int:
        return self.p**self.h

    @property
    def qhat(self) -> int:
        return self.q**self.f

    @property
    def order(self) -> int:
        return self.p**self.degree

    @classmethod
    def standard(cls, p: int, h: int, f: int, s: int = 1) -> "FieldSpec":
        """Spec using the first irreducible modulus of the right degree."""
        return cls(p, h, f, s, first_irreducible(p, h * f * s))


class _ZechRows:
    """Addition rows built on first use (fields too large for a full table)."""

    def __init__(self, field: "FiniteField"):
        self._field = field
        self._rows: dict[int, list[int]] = {}

    def __getitem__(self, a: int) -> list[int]:
        row = self._rows.get(a)
        if row is None:
            F = self._field
            row = [F._digit_add(a, b) for b in range(F.order)]
            self._rows[a] = row
        return row


class FiniteField:
    """Arithmetic in F_{p^d} through log/exp tables of a primitive element."""

    TABLE_LIMIT = 1024

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = spec.p
        self.degree = spec.degree
        self.order = spec.order
        self._pows = [self.p**i for i in range(self.degree)]
        self._build_log_tables()
        if self.order <= self.TABLE_LIMIT:
            self.add_table = [
                [self._digit_add(a, b) for b in range(self.order)] for a in range(self.order)
            ]
        else:
            self.add_table = _ZechRows(self)
        self.neg_table = [self._digit_neg(a) for a in range(self.order)]
        self._frob_tables: dict[int, list[int]] = {}

    # digit-level helpers
    def to_digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, digits) -> int:
        digits = list(digits)
        if len(digits) > self.degree or any(not 0 <= d < self.p for d in digits):
            raise ConfigError(f"bad digit vector {digits} for F_{self.order}")
        return sum(d * self._pows[i] for i, d in enumerate(digits))

    def _digit_add(self, a: int, b: int) -> int:
        da, db = self.to_digits(a), self.to_digits(b)
        return self.from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def _digit_neg(self, a: int) -> int:
        return self.from_digits([(-x) % self.p for x in self.to_digits(a)])

    def _digit_mul(self, a: int, b: int) -> int:
        da, db = self.to_digits(a), self.to_digits(b)
        prod = [0] * (2 * self.degree - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return self.from_digits(_poly_mod(prod, list(self.spec.modulus), self.p))

    def _build_log_tables(self):
        n = self.order - 1
        for g in range(1, self.order):
            exp = [1]
            cur = 1
            for _ in range(n - 1):
                cur = self._digit_mul(cur, g)
                if cur == 1:
                    break
                exp.append(cur)
            if len(exp) == n:
                break
        else:  # pragma: no cover - every finite field has a generator
            raise ConfigError("no primitive element found")
        self.generator = g if n > 1 else 1
        self.exp_table = exp + exp
        self.log_table = [-1] * self.order
        for i, v in enumerate(exp):
            self.log_table[v] = i

    # public arithmetic
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[self.log_table[a] + self.log_table[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self.exp_table[(-self.log_table[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of 0")
            return 1 if e == 0 else 0
        return self.exp_table[(self.log_table[a] * e) % (self.order - 1)]

    def frob_table(self, k: int) -> list[int]:
        """Table of a -> a^(p^k)."""
        k %= self.degree
        tab = self._frob_tables.get(k)
        if tab is None:
            e = self.p**k
            tab = [self.pow(a, e) for a in range(self.order)]
            self._frob_tables[k] = tab
        return tab

    def frob(self, a: int, k: int) -> int:
        return self.frob_table(k)[a]

    def in_subfield(self, a: int, e: int) -> bool:
        """True when a lies in F_{p^e}."""
        return self.frob(a, e) == a

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_{p^d}."""
        return n % self.p

    def encode(self, a: int) -> str:
        return "".join(str(d) for d in self.to_digits(a))

    def decode(self, text: str) -> int:
        try:
            return self.from_digits(int(ch) for ch in text)
        except ValueError as exc:
            raise ConfigError(f"bad field element string {text!r}") from exc

    def __repr__(self):
        return f"FiniteField({self.order}, modulus={self.spec.modulus})"


@functools.lru_cache(maxsize=None)
def field_for(spec: FieldSpec) -> FiniteField:
    """Shared field instance per spec; tables are read-only after construction."""
    return FiniteField(spec)
