"""Finite fields GF(p^a) with a reproducible modulus.

Elements are dense coefficient vectors over GF(p) in the basis
1, x, ..., x^(a-1) of GF(p)[x]/(f).  Internally a vector is packed into the
integer ``sum(c_i * p**i)``; that integer is the element's *label* and the
enumeration order of the field is label order.  All arithmetic is defined by
polynomial reduction modulo ``f``; addition, multiplication and inversion
tables are derived from it once per field so that the heavy geometric code can
work directly on labels.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np
from sympy import factorint, isprime

__all__ = [
    "FiniteField",
    "FieldElement",
    "FieldError",
    "make_field",
    "twist_theta",
    "is_irreducible",
    "prime_power",
    "field_of_order",
]


class FieldError(ValueError):
    pass


def _poly_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    # low-degree-first coefficient lists over GF(p); den must be monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] % p
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] = (num[i - dd + j] - c * den[j]) % p
    rem = num[:dd] or [0]
    return quot, rem


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division of a monic polynomial by every monic polynomial of
    degree 1..deg/2 over GF(p)."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    if poly[0] % p == 0:
        return False
    for d in range(1, deg // 2 + 1):
        for tail in product(range(p), repeat=d):
            _, rem = _poly_divmod(poly, list(tail) + [1], p)
            if not any(rem):
                return False
    return True


@lru_cache(maxsize=None)
def _smallest_irreducible(p: int, a: int) -> tuple[int, ...]:
    # monic candidates x^a + sum c_i x^i in increasing label order sum c_i p^i
    for label in range(p**a):
        tail = [(label // p**i) % p for i in range(a)]
        poly = tail + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """GF(p^a) with the smallest monic irreducible modulus (label order).

    Instances are cached per ``(p, a)``, so identity comparison is field
    equality.
    """

    _cache: dict[tuple[int, int], "FiniteField"] = {}

    def __new__(cls, p: int, a: int = 1):
        key = (p, a)
        if key in cls._cache:
            return cls._cache[key]
        if not isinstance(p, int) or not isprime(p):
            raise FieldError(f"characteristic must be prime, got {p!r}")
        if not isinstance(a, int) or a < 1:
            raise FieldError(f"extension degree must be >= 1, got {a!r}")
        self = super().__new__(cls)
        self.p = p
        self.a = a
        self.q = p**a
        self.modulus = _smallest_irreducible(p, a)
        self._build_tables()
        cls._cache[key] = self
        return self

    def __reduce__(self):
        return (FiniteField, (self.p, self.a))

    # -- label <-> vector ------------------------------------------------
    def vector(self, label: int) -> tuple[int, ...]:
        p = self.p
        return tuple((label // p**i) % p for i in range(self.a))

    def label(self, vec: Sequence[int]) -> int:
        p = self.p
        return sum((c % p) * p**i for i, c in enumerate(vec))

    def _mul_vec(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        p, a = self.p, self.a
        prod_ = [0] * (2 * a - 1)
        for i, ui in enumerate(u):
            if ui:
                for j, vj in enumerate(v):
                    prod_[i + j] += ui * vj
        _, rem = _poly_divmod([c % p for c in prod_], list(self.modulus), p)
        rem = rem + [0] * (a - len(rem))
        return tuple(rem[:a])

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        vecs = [self.vector(i) for i in range(q)]
        digits = np.array(vecs, dtype=np.int64).reshape(q, self.a)
        weights = p ** np.arange(self.a, dtype=np.int64)
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        self.add_table = (summed @ weights).tolist()
        self.neg_table = [self.label([-x for x in vecs[i]]) for i in range(q)]
        # y*x reduced mod f, from the vector definition
        times_x = [self.label(self._mul_vec(vecs[i], self.vector(p) if self.a > 1 else (0,)))
                   for i in range(q)] if self.a > 1 else [0] * q
        # scalar multiples c*y for c in GF(p)
        smul = [[self.label([c * t for t in vecs[y]]) for y in range(q)] for c in range(p)]
        mul = [[0] * q for _ in range(q)]
        for c in range(p):
            mul[c] = smul[c][:]
        add = self.add_table
        for x in range(p, q):
            c0, rest = x % p, x // p
            row_rest, row_c = mul[rest], smul[c0]
            mul[x] = [add[row_c[y]][row_rest[times_x[y]]] for y in range(q)]
        self.mul_table = mul
        self.inv_table = [0] * q
        for i in range(1, q):
            self.inv_table[i] = mul[i].index(1)

    # -- label-level arithmetic (hot paths) -------------------------------
    def add(self, x: int, y: int) -> int:
        return self.add_table[x][y]

    def sub(self, x: int, y: int) -> int:
        return self.add_table[x][self.neg_table[y]]

    def neg(self, x: int) -> int:
        return self.neg_table[x]

    def mul(self, x: int, y: int) -> int:
        return self.mul_table[x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.inv_table[x]

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        result, base = 1, x
        while e:
            if e & 1:
                result = self.mul_table[result][base]
            base = self.mul_table[base][base]
            e >>= 1
        return result

    def frobenius(self, x: int, j: int = 1) -> int:
        return self.pow(x, self.p ** (j % self.a))

    # -- element-level API -------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, int):
            # integers embed through the prime field
            return FieldElement(self, self.label([value % self.p]))
        return FieldElement(self, self.label(value))

    def element(self, label: int) -> "FieldElement":
        if not 0 <= label < self.q:
            raise FieldError(f"label {label} out of range for GF({self.q})")
        return FieldElement(self, label)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    def __iter__(self) -> Iterator["FieldElement"]:
        return iter(self.elements())

    def __len__(self) -> int:
        return self.q

    @cached_property
    def primitive_element(self) -> int:
        """Smallest label generating the multiplicative group."""
        q = self.q
        for g in range(1, q):
            x, order = g, 1
            while x != 1:
                x = self.mul_table[x][g]
                order += 1
            if order == q - 1:
                return g
        raise AssertionError("multiplicative group not cyclic")  # pragma: no cover

    def mult_order(self, x: int) -> int:
        if x == 0:
            raise FieldError("zero has no multiplicative order")
        y, order = x, 1
        while y != 1:
            y = self.mul_table[y][x]
            order += 1
        return order

    def subfield_embedding(self, sub: "FiniteField") -> list[int]:
        """Labels of the images of ``sub``'s elements under the embedding that
        sends the generator class ``x`` of ``sub`` to the smallest root of its
        modulus in this field."""
        if sub.p != self.p or self.a % sub.a:
            raise FieldError(f"GF({sub.q}) is not a subfield of GF({self.q})")
        for root in range(self.q):
            val = 0
            for c in reversed(sub.modulus):
                val = self.add(self.mul(val, root), self.label([c]))
            if val == 0:
                break
        else:  # pragma: no cover
            raise AssertionError("subfield modulus has no root")
        images = []
        for lab in range(sub.q):
            acc = 0
            for c in reversed(sub.vector(lab)):
                acc = self.add(self.mul(acc, root), self.label([c]))
            images.append(acc)
        return images

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.a})" if self.a > 1 else f"GF({self.p})"


class FieldElement:
    __slots__ = ("field", "label")

    def __init__(self, field: FiniteField, label: int):
        self.field = field
        self.label = label

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.vector(self.label)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("mixed-field operands")
            return other.label
        if isinstance(other, int):
            return self.field.label([other % self.field.p])
        return NotImplemented

    def __add__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.add(self.label, y))

    __radd__ = __add__

    def __sub__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.sub(self.label, y))

    def __rsub__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.sub(y, self.label))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.label))

    def __mul__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.mul(self.label, y))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.label))

    def __truediv__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.mul(self.label, self.field.inv(y)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.label, e))

    def frobenius(self, j: int = 1) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius(self.label, j))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.label == other.label
        if isinstance(other, int):
            return self.label == self.field.label([other % self.field.p])
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.label))

    def __bool__(self):
        return self.label != 0

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(mono if c == 1 and i else (f"{c}" if i == 0 else f"{c}*{mono}"))
        return " + ".join(reversed(terms)) or "0"


def make_field(p: int, a: int = 1) -> FiniteField:
    return FiniteField(p, a)


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, a)`` with ``q == p**a``; raise if ``q`` is not a prime power."""
    if isinstance(q, int) and q >= 2:
        fac = factorint(q)
        if len(fac) == 1:
            ((p, a),) = fac.items()
            return p, a
    raise FieldError(f"{q!r} is not a prime power")


def field_of_order(q: int) -> FiniteField:
    return FiniteField(*prime_power(q))


class TwistAutomorphism:
    """The Tits twist x -> x^(2^(m+1)) of GF(2^(2m+1)); squares to Frobenius."""

    def __init__(self, field: FiniteField):
        if field.p != 2 or field.a % 2 == 0 or field.a < 3:
            raise FieldError(f"twist needs GF(2^(2m+1)) with m >= 1, got {field!r}")
        self.field = field
        self.m = (field.a - 1) // 2
        self.exponent = 2 ** (self.m + 1)
        self.table = [field.pow(x, self.exponent) for x in range(field.q)]

    def __call__(self, x):
        if isinstance(x, FieldElement):
            return FieldElement(self.field, self.table[x.label])
        return self.table[x]


def twist_theta(field: FiniteField) -> TwistAutomorphism:
    return TwistAutomorphism(field)
