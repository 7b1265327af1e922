"""Exact arithmetic in small finite fields GF(p^k).

Elements are encoded as integers ``c0 + c1*p + ... + c_{k-1}*p^(k-1)`` where
``(c0, ..., c_{k-1})`` is the little-endian coefficient vector in the
polynomial basis ``1, g, g^2, ...`` and ``g`` is the class of ``X`` modulo the
field's modulus.  :class:`FiniteField` precomputes full operation tables on
these codes (the largest supported field has 729 elements), and
:class:`FieldElement` is a thin value type on top of them.

Default moduli (little-endian, monic) shipped with the package::

    p=2: X+1, X^2+X+1, X^3+X+1, X^4+X+1, X^5+X^2+1, X^6+X^4+X^3+X+1
    p=3: X+1, X^2+2X+2, X^3+2X+1, X^4+2X^3+2, X^5+2X+1,
         X^6+2X^4+X^2+2X+2
    p=5: X+3, X^2+4X+2, X^3+3X+3, X^4+4X^2+4X+2
    p=7: X+4, X^2+6X+3, X^3+6X^2+4

For other primes up to 17 the lexicographically first monic irreducible
polynomial is used (degree 1: ``X - r`` with ``r`` the least primitive root).
"""
from __future__ import annotations

import functools
import re
from itertools import product
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 729
MAX_CHARACTERISTIC = 17
MAX_DEGREE = 6

_MODULUS_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 2, 1, 0, 2, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
}


class FieldError(ValueError):
    """Base class for invalid field constructions or operations."""


class NonPrimeCharacteristic(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class UnsupportedSize(FieldError):
    pass


class MixedFields(FieldError):
    pass


class InvalidSubfield(FieldError):
    pass


class ZeroInverse(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


# -- polynomials over a prime field, coefficient tuples little-endian ------

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


class _PolyRing:
    """Dense polynomial arithmetic over a field given by add/mul/inv callables."""

    def __init__(self, add, neg, mul, inv):
        self.add, self.neg, self.mul, self.inv = add, neg, mul, inv

    def sub(self, a, b):
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return _trim([self.add(x, self.neg(y)) for x, y in zip(a, b)])

    def mulp(self, a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = self.add(out[i + j], self.mul(x, y))
        return _trim(out)

    def divmod(self, a, b):
        a = _trim(list(a))
        b = _trim(list(b))
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        lead_inv = self.inv(b[-1])
        q = [0] * max(len(a) - len(b) + 1, 0)
        while len(a) >= len(b):
            c = self.mul(a[-1], lead_inv)
            s = len(a) - len(b)
            q[s] = c
            for i, y in enumerate(b):
                a[s + i] = self.add(a[s + i], self.neg(self.mul(c, y)))
            _trim(a)
        return _trim(q), a

    def mod(self, a, b):
        return self.divmod(a, b)[1]

    def gcd(self, a, b):
        a, b = _trim(list(a)), _trim(list(b))
        while b:
            a, b = b, self.mod(a, b)
        return a

    def powmod(self, base, e, m):
        result = [1]
        base = self.mod(base, m)
        while e:
            if e & 1:
                result = self.mod(self.mulp(result, base), m)
            base = self.mod(self.mulp(base, base), m)
            e >>= 1
        return result


def _prime_ring(p: int) -> _PolyRing:
    return _PolyRing(
        lambda x, y: (x + y) % p,
        lambda x: (-x) % p,
        lambda x, y: (x * y) % p,
        lambda x: pow(x, p - 2, p),
    )


def _irreducible_over(ring: _PolyRing, coeffs: Sequence[int], q: int, roots: Iterable[int]) -> bool:
    f = _trim(list(coeffs))
    n = len(f) - 1
    if n < 1:
        raise FieldError("irreducibility needs a polynomial of degree >= 1")
    if n == 1:
        return True
    if n <= 3:
        for r in roots:
            acc = 0
            for c in reversed(f):
                acc = ring.add(ring.mul(acc, r), c)
            if acc == 0:
                return False
        return True
    x = [0, 1]
    xq = x
    for _ in range(n // 2):
        xq = ring.powmod(xq, q, f)
        g = ring.gcd(f, ring.sub(xq, x))
        if len(g) > 1:
            return False
    return True


def _default_modulus(p: int, k: int) -> tuple[int, ...]:
    if (p, k) in _MODULUS_TABLE:
        return _MODULUS_TABLE[(p, k)]
    ring = _prime_ring(p)
    if k == 1:
        for r in range(1, p):
            if all(pow(r, (p - 1) // f, p) != 1 for f in range(2, p) if (p - 1) % f == 0 and is_prime(f)):
                return ((-r) % p, 1)
    for tail in product(range(p), repeat=k):
        coeffs = tuple(reversed(tail)) + (1,)
        if coeffs[0] == 0:
            continue
        if _irreducible_over(ring, coeffs, p, range(p)):
            return coeffs
    raise ReducibleModulus(f"no irreducible polynomial found for ({p},{k})")  # pragma: no cover


class FiniteField:
    """The field GF(p^k) = GF(p)[X]/(modulus), with precomputed tables.

    Instances are immutable after construction.  Arithmetic on integer codes
    goes through ``add``, ``mul`` (lists of lists), ``neg`` and ``inv``;
    the same tables are available as numpy arrays (``add_np``, ``mul_np``,
    ``neg_np``) for vectorised work.
    """

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
        if p > MAX_CHARACTERISTIC or not 1 <= k <= MAX_DEGREE or p**k > MAX_ORDER:
            raise UnsupportedSize(f"GF({p}^{k}) is outside the supported range (order <= {MAX_ORDER})")
        if modulus is None:
            modulus = _default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {k}: {modulus}")
        if not _irreducible_over(_prime_ring(p), modulus, p, range(p)):
            raise ReducibleModulus(f"modulus {format_poly(modulus)} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.order = q = p**k
        self._build_tables()

    # -- construction -----------------------------------------------------
    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.order
        digits = np.zeros((q, k), dtype=np.int64)
        codes = np.arange(q)
        for i in range(k):
            digits[:, i] = (codes // p**i) % p
        weights = p ** np.arange(k)
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        neg = ((-digits) % p) @ weights

        # multiplication by g: shift up and reduce by the modulus
        red = np.array(self.modulus[:k], dtype=np.int64)
        shifted = np.zeros_like(digits)
        shifted[:, 1:] = digits[:, :-1]
        top = digits[:, k - 1]
        shifted = (shifted - top[:, None] * red[None, :]) % p
        times_g = shifted @ weights

        # mul[a][b] via powers-of-g decomposition of b
        mul = np.zeros((q, q), dtype=np.int64)
        cur = codes.copy()  # a * g^i
        for i in range(k):
            for c in range(1, p):
                # a * c * g^i
                term = cur.copy()
                for _ in range(c - 1):
                    term = add[term, cur]
                mask = digits[:, i] == c
                cols = np.nonzero(mask)[0]
                mul[:, cols] = add[mul[:, cols], term[:, None]]
            cur = times_g[cur]
        self.add_np = add
        self.neg_np = neg
        self.mul_np = mul
        self.add = add.tolist()
        self.neg = neg.tolist()
        self.mul = mul.tolist()
        self.digits = [tuple(int(d) for d in row) for row in digits]
        inv = [0] * q
        for a in range(1, q):
            row = self.mul[a]
            inv[a] = row.index(1)
        self.inv = inv
        self.inv_np = np.array(inv, dtype=np.int64)
        self.frob = [_pow_tab(self.mul, a, p) for a in range(q)]
        self.gen = p if k > 1 else (-self.modulus[0]) % p
        self._log = self._discrete_log(self.gen)

    def _discrete_log(self, g: int) -> dict[int, int] | None:
        q = self.order
        logs = {}
        x = 1
        for e in range(q - 1):
            if x in logs:
                return None
            logs[x] = e
            x = self.mul[x][g]
        return logs if len(logs) == q - 1 else None

    # -- element access -----------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise MixedFields("element belongs to another field")
            return value
        if isinstance(value, str):
            return parse_literal(self, value)
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_coeffs(value))
        return FieldElement(self, self.from_int(int(value)))

    def from_int(self, n: int) -> int:
        """Code of ``n * 1``."""
        return n % self.p

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise FieldError(f"expected at most {self.k} coefficients, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, a) for a in range(self.order)]

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def g(self) -> "FieldElement":
        return FieldElement(self, self.gen)

    @property
    def is_gen_primitive(self) -> bool:
        return self._log is not None

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]

    def pow(self, a: int, e: int) -> int:
        return pow_code(self, a, e)

    def sort_key(self, a: int) -> tuple[int, ...]:
        return self.digits[a]

    def format(self, a: int) -> str:
        if a < self.p:
            return str(a)
        if self._log is not None and self.gen == self.p:
            e = self._log[a]
            return "g" if e == 1 else f"g^{e}"
        return "[" + ",".join(str(d) for d in self.digits[a]) + "]"

    def describe(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k}) mod {format_poly(self.modulus)}" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))


def _pow_tab(mul, a: int, e: int) -> int:
    r = 1
    for _ in range(e):
        r = mul[r][a]
    return r


def pow_code(F: FiniteField, a: int, e: int) -> int:
    if e < 0:
        if a == 0:
            raise ZeroInverse("zero has no inverse")
        a, e = F.inv[a], -e
    r = 1
    while e:
        if e & 1:
            r = F.mul[r][a]
        a = F.mul[a][a]
        e >>= 1
    return r


@functools.lru_cache(maxsize=None)
def make_field(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> FiniteField:
    """Return GF(p^k); cached so equal arguments give the same descriptor."""
    return FiniteField(p, k, None if modulus is None else tuple(modulus))


def format_poly(coeffs: Sequence[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) or "0"


class FieldElement:
    """An element of a :class:`FiniteField`; compares equal to ints via ``n*1``."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise MixedFields(f"cannot combine elements of {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.add[self.value][b])

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(b, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg[self.value])

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul[self.value][b])

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroInverse("zero has no inverse")
        return FieldElement(self.field, self.field.inv[self.value])

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if b == 0:
            raise ZeroInverse("division by zero")
        return FieldElement(self.field, self.field.mul[self.value][self.field.inv[b]])

    def __rtruediv__(self, other):
        return FieldElement(self.field, self._coerce(other)) / self

    def __pow__(self, e: int):
        return FieldElement(self.field, pow_code(self.field, self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.value))

    def __bool__(self):
        return self.value != 0

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.digits[self.value]

    def frobenius(self, q: int | None = None) -> "FieldElement":
        return frobenius(self, q or self.field.p)

    def __repr__(self):
        return self.field.format(self.value)

    __str__ = __repr__


def field_arith(op: str, *operands):
    """Dispatch ``add | mul | neg | inv | pow | sub`` on field elements."""
    if op == "neg":
        (x,) = operands
        return -x
    if op == "inv":
        (x,) = operands
        return x.inv()
    if op == "pow":
        x, e = operands
        return x ** int(e)
    x, y = operands
    if isinstance(x, FieldElement) and isinstance(y, FieldElement) and x.field != y.field:
        raise MixedFields("operands belong to different fields")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise FieldError(f"unknown operation {op!r}")


def _subfield_degree(F: FiniteField, q: int) -> int:
    d, r = 0, 1
    while r < q:
        r *= F.p
        d += 1
    if r != q or d == 0 or F.k % d:
        raise InvalidSubfield(f"GF({q}) is not a subfield of {F!r}")
    return d


def frobenius(x: FieldElement, q: int) -> FieldElement:
    """``x -> x^q`` for a subfield GF(q) of x's field."""
    F = x.field
    d = _subfield_degree(F, q)
    v = x.value
    for _ in range(d):
        v = F.frob[v]
    return FieldElement(F, v)


def relative_trace(x: FieldElement, q: int) -> FieldElement:
    """Trace of x down to GF(q) (returned as an element of x's field)."""
    F = x.field
    d = _subfield_degree(F, q)
    acc, y = x, x
    for _ in range(F.k // d - 1):
        y = frobenius(y, q)
        acc = acc + y
    return acc


def relative_norm(x: FieldElement, q: int) -> FieldElement:
    F = x.field
    d = _subfield_degree(F, q)
    acc, y = x, x
    for _ in range(F.k // d - 1):
        y = frobenius(y, q)
        acc = acc * y
    return acc


def poly_irreducible(coeffs: Sequence, field: FiniteField | None = None) -> bool:
    """Irreducibility of a polynomial (little-endian coefficients) over ``field``.

    Coefficients may be FieldElements (the field is then inferred) or ints,
    read as codes in ``field``.  Degree <= 3 uses the root test, higher
    degrees a distinct-degree gcd test.
    """
    if field is None:
        fs = [c.field for c in coeffs if isinstance(c, FieldElement)]
        if not fs:
            raise FieldError("cannot infer the field of an integer coefficient list")
        field = fs[0]
    codes = [field(c).value if isinstance(c, FieldElement) else int(c) for c in coeffs]
    F = field
    ring = _PolyRing(lambda a, b: F.add[a][b], lambda a: F.neg[a], lambda a, b: F.mul[a][b], lambda a: F.inv[a])
    return _irreducible_over(ring, codes, F.order, range(F.order))


_LIT_RE = re.compile(r"^\s*(-?)\s*(?:(\d+)|g(?:\^(-?\d+))?|\[([^\]]*)\])\s*$")


def parse_literal(F: FiniteField, text: str) -> FieldElement:
    """Parse ``0``, ``1``, an integer, ``g``, ``g^k`` or ``[c0,c1,...]``."""
    m = _LIT_RE.match(text)
    if not m:
        raise FieldError(f"bad field literal {text!r}")
    sign, num, exp, vec = m.groups()
    if num is not None:
        v = F.from_int(int(num))
    elif vec is not None:
        parts = [s for s in vec.split(",") if s.strip()]
        v = F.from_coeffs([int(s) for s in parts])
    else:
        v = pow_code(F, F.gen, int(exp) if exp else 1)
    if sign:
        v = F.neg[v]
    return FieldElement(F, v)


def embed_subfield(small: FiniteField, big: FiniteField) -> list[int]:
    """Codes in ``big`` of the elements of ``small`` under a fixed embedding.

    The image of ``small``'s generator is the least root (by code) of its
    modulus in ``big``; the map is checked to be a ring homomorphism.
    """
    if small.p != big.p or big.k % small.k:
        raise InvalidSubfield(f"{small!r} does not embed in {big!r}")
    mod = small.modulus
    root = None
    for r in range(big.order):
        acc = 0
        for c in reversed(mod):
            acc = big.add[big.mul[acc][r]][c]
        if acc == 0:
            root = r
            break
    if root is None:
        raise InvalidSubfield(f"modulus of {small!r} has no root in {big!r}")
    powers = [1]
    for _ in range(small.k - 1):
        powers.append(big.mul[powers[-1]][root])
    image = []
    for a in range(small.order):
        acc = 0
        for c, pw in zip(small.digits[a], powers):
            term = 0
            for _ in range(c):
                term = big.add[term][pw]
            acc = big.add[acc][term]
        image.append(acc)
    for a in range(small.order):
        for b in range(small.order):
            assert image[small.add[a][b]] == big.add[image[a]][image[b]]
            assert image[small.mul[a][b]] == big.mul[image[a]][image[b]]
    return image
