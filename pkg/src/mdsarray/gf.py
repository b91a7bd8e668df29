"""Prime-field arithmetic and field selection.

Field elements are plain Python ints (or numpy int64 arrays) reduced
modulo ``q``.  A :class:`FieldSpec` pins the modulus together with the
primitive element that every coefficient table is expressed in.
"""

from __future__ import annotations

from dataclasses import dataclass

SCAN_LIMIT = 1 << 20


class FieldError(ValueError):
    pass


class FieldTooSmall(FieldError):
    pass


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def gf_pow(base: int, exp: int, q: int) -> int:
    """``base**exp`` in GF(q); negative exponents invert first."""
    base %= q
    if exp < 0:
        if base == 0:
            raise ZeroDivisionError("zero has no inverse")
        base = pow(base, -1, q)
        exp = -exp
    return pow(base, exp, q)


def gf_inv(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(a, -1, q)


def multiplicative_order(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise FieldError("zero has no multiplicative order")
    order = q - 1
    for p in prime_factors(q - 1):
        while order % p == 0 and pow(a, order // p, q) == 1:
            order //= p
    return order


def is_primitive(g: int, q: int) -> bool:
    g %= q
    if g == 0:
        return False
    return all(pow(g, (q - 1) // p, q) != 1 for p in prime_factors(q - 1))


def primitive_element(q: int) -> int:
    """Smallest generator of GF(q)^* (searched from 2 upwards)."""
    if not is_prime(q):
        raise FieldError(f"{q} is not prime")
    if q == 2:
        return 1
    for g in range(2, q):
        if is_primitive(g, q):
            return g
    raise FieldError(f"no primitive element found for q={q}")  # unreachable for prime q


@dataclass(frozen=True)
class FieldSpec:
    """GF(q) with a designated primitive element ``c``."""

    q: int
    c: int

    def __post_init__(self):
        if self.q < 3 or not is_prime(self.q):
            raise FieldError(f"q={self.q} must be a prime >= 3")
        if not is_primitive(self.c, self.q):
            raise FieldError(f"c={self.c} is not primitive in GF({self.q})")

    @classmethod
    def of(cls, q: int) -> "FieldSpec":
        return cls(q, primitive_element(q))

    def cpow(self, e: int) -> int:
        """``c**e``; exponents are taken modulo q-1."""
        return pow(self.c, e % (self.q - 1), self.q)

    def pow(self, a: int, e: int) -> int:
        return gf_pow(a, e, self.q)

    def inv(self, a: int) -> int:
        return gf_inv(a, self.q)

    def log(self, a: int) -> int:
        """Discrete log to base ``c`` by table scan (small fields only)."""
        a %= self.q
        if a == 0:
            raise FieldError("log of zero")
        x = 1
        for e in range(self.q - 1):
            if x == a:
                return e
            x = x * self.c % self.q
        raise FieldError("element not in the cyclic group")  # unreachable

    def root_of_unity(self, w: int) -> int:
        """Primitive ``w``-th root of unity ``c**((q-1)/w)``."""
        if (self.q - 1) % w:
            raise FieldError(f"{w} does not divide q-1={self.q - 1}")
        return self.cpow((self.q - 1) // w)


def find_field(lower_bound: int, divisor: int | None = None) -> FieldSpec:
    """Smallest prime q > lower_bound (with divisor | q-1 if given)."""
    if lower_bound < 2:
        raise FieldError("lower_bound must be >= 2")
    if divisor is not None and divisor < 2:
        raise FieldError("divisor must be >= 2")
    q = lower_bound + 1
    while q < SCAN_LIMIT:
        if is_prime(q) and (divisor is None or (q - 1) % divisor == 0):
            return FieldSpec.of(q)
        q += 1
    raise FieldTooSmall(f"no admissible prime below {SCAN_LIMIT} for bound {lower_bound}")


def resolve_field(bound: int, q: int | None = None, divisor: int | None = None) -> FieldSpec:
    """Automatic field for ``bound`` or a user override ``q``.

    An override is accepted as long as it is a prime field; whether the
    resulting code is valid is left to the condition checkers.
    """
    if q is None:
        return find_field(bound, divisor)
    if divisor is not None and (q - 1) % divisor:
        raise FieldTooSmall(f"q={q} needs {divisor} | q-1")
    return FieldSpec.of(q)
