"""Prime-field arithmetic, Legendre symbols, and complex roots of unity."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

# Trial division stays comfortably fast below this; nothing in the simulator
# needs a larger prime.
PRIME_CAP = 10**6


def is_prime(m: int) -> bool:
    """True iff m is prime (trial division, m >= 0)."""
    m = int(m)
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A prime modulus, certified at construction and capped at PRIME_CAP."""

    p: int

    def __post_init__(self) -> None:
        p = int(self.p)
        object.__setattr__(self, "p", p)
        if p < 2:
            raise ValueError(f"modulus must be >= 2, got {p}")
        if p > PRIME_CAP:
            raise ValueError(f"modulus {p} exceeds the supported cap {PRIME_CAP}")
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")

    @property
    def is_odd(self) -> bool:
        return self.p != 2


def _as_odd_prime(p: int | PrimeModulus) -> int:
    mod = p if isinstance(p, PrimeModulus) else PrimeModulus(p)
    if not mod.is_odd:
        raise ValueError("modulus must be an odd prime")
    return mod.p


def legendre(a: int, p: int | PrimeModulus) -> int:
    """Legendre symbol of a modulo an odd prime p.

    Returns 0 if p divides a, +1 if a is a nonzero quadratic residue mod p,
    and -1 otherwise.  Computed by Euler's criterion a**((p-1)/2) mod p.
    """
    q = _as_odd_prime(p)
    a = int(a) % q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def root_of_unity(q: int, k: int) -> complex:
    """exp(2*pi*i*k/q) in double precision; q must be >= 1."""
    q = int(q)
    if q < 1:
        raise ValueError(f"root order must be >= 1, got {q}")
    return cmath.exp(2j * cmath.pi * (int(k) % q) / q)


@dataclass(frozen=True)
class FieldElement:
    """An element of the prime field Z/pZ, reduced at construction."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) % self.modulus.p)

    def __int__(self) -> int:
        return self.value

    def _coerce(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement(self.value * self._coerce(other), self.modulus)

    def __neg__(self) -> FieldElement:
        return FieldElement(-self.value, self.modulus)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElement(pow(self.value, -1, self.modulus.p), self.modulus)
