"""Arithmetic in small Galois fields GF(p^e).

Field elements are plain integers in ``range(q)``: the integer
``a0 + a1*p + ... + a_{e-1}*p**(e-1)`` encodes the polynomial
``a0 + a1*x + ...`` over GF(p) in the polynomial basis, reduced modulo
a fixed irreducible monic polynomial.  The moduli are pinned below
(the usual Conway polynomial choices) so that element labels, point
coordinates and group actions are reproducible between runs and
machines.

Add/mul/inv go through precomputed tables; the tables themselves are
produced by plain polynomial arithmetic, which doubles as the reference
implementation in the tests.
"""

from functools import lru_cache

# (p, e) -> coefficients of the reduction polynomial, lowest degree
# first, leading 1 included.  e == 1 is implicit (plain mod-p).
MODULI = {
    (2, 2): (1, 1, 1),                 # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),              # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),           # x^4 + x + 1
    (2, 5): (1, 0, 1, 0, 0, 1),        # x^5 + x^2 + 1
    (2, 6): (1, 1, 0, 1, 1, 0, 1),     # x^6 + x^4 + x^3 + x + 1
    (3, 2): (2, 2, 1),                 # x^2 + 2x + 2
    (3, 3): (1, 2, 0, 1),              # x^3 + 2x + 1
    (3, 4): (2, 0, 0, 2, 1),           # x^4 + 2x^3 + 2
    (5, 2): (2, 4, 1),                 # x^2 + 4x + 2
    (7, 2): (3, 6, 1),                 # x^2 + 6x + 3
}

MAX_Q = 128


class FieldError(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q):
    """Split q into (p, e) with p prime, or raise."""
    if q < 2:
        raise FieldError(f"not a prime power: {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise FieldError(f"not a prime power: {q}")
            return p, e
        p += 1
    return q, 1  # q itself prime


def _poly_mul_mod(a, b, modulus, p):
    """Multiply two coefficient tuples mod (modulus, p)."""
    e = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce: x^e = -(modulus without leading term)
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(e):
                prod[k - e + j] = (prod[k - e + j] - c * modulus[j]) % p
    return tuple(prod[:e])


class Element:
    """Tiny wrapper giving field elements operator syntax.

    Internals work with bare ints for speed; this class exists for the
    public API and the axiom tests, and it refuses cross-field
    arithmetic.
    """

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, Element):
            if other.field is not self.field:
                raise FieldError("mixed fields: %s vs %s" % (self.field, other.field))
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return Element(self.field, self.field.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return Element(self.field, self.field.sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        return Element(self.field, self.field.sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        return Element(self.field, self.field.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        return Element(self.field, self.field.div(self.value, v))

    def __neg__(self):
        return Element(self.field, self.field.neg(self.value))

    def __pow__(self, k):
        return Element(self.field, self.field.pow(self.value, k))

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.value))

    @property
    def coeffs(self):
        return self.field.coeffs(self.value)

    def __repr__(self):
        return f"GF({self.field.q}).el({self.value})"


class GF:
    """The field GF(p^e), elements encoded as ints in range(q)."""

    def __init__(self, p, e=1):
        if not is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        q = p ** e
        if q > MAX_Q:
            raise FieldError(f"q = {q} above supported limit {MAX_Q}")
        if e > 1 and (p, e) not in MODULI:
            raise FieldError(f"no modulus on file for GF({p}^{e})")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = MODULI.get((p, e))
        self._build_tables()
        self.omega = self._find_primitive()

    # -- encoding ---------------------------------------------------

    def coeffs(self, a):
        """Polynomial-basis coordinates of element a, length e."""
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def element(self, coeffs):
        if len(coeffs) != self.e:
            raise FieldError(f"need {self.e} coefficients")
        n = 0
        for c in reversed(coeffs):
            n = n * self.p + (c % self.p)
        return n

    def el(self, value):
        return Element(self, value % self.q)

    def elements(self):
        return range(self.q)

    # -- construction -----------------------------------------------

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        if e == 1:
            self._add = tuple(tuple((a + b) % p for b in range(q)) for a in range(q))
            self._mul = tuple(tuple((a * b) % p for b in range(q)) for a in range(q))
        else:
            mod = self.modulus
            cfs = [self.coeffs(a) for a in range(q)]
            add = []
            mul = []
            for a in range(q):
                arow = []
                mrow = []
                ca = cfs[a]
                for b in range(q):
                    cb = cfs[b]
                    arow.append(self.element(tuple((x + y) % p for x, y in zip(ca, cb))))
                    mrow.append(self.element(_poly_mul_mod(ca, cb, mod, p)))
                add.append(tuple(arow))
                mul.append(tuple(mrow))
            self._add = tuple(add)
            self._mul = tuple(mul)
        self._neg = tuple(next(b for b in range(q) if self._add[a][b] == 0) for a in range(q))
        inv = [0] * q
        for a in range(1, q):
            inv[a] = next(b for b in range(1, q) if self._mul[a][b] == 1)
        self._inv = tuple(inv)

    def _find_primitive(self):
        # smallest multiplicative generator; for the Conway moduli this
        # comes out as the polynomial x (encoded p) when e > 1
        for g in range(1, self.q):
            if self.mult_order(g) == self.q - 1:
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    # -- arithmetic ---------------------------------------------------

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by 0")
        return self._mul[a][self._inv[b]]

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        r = 1
        while k:
            if k & 1:
                r = self._mul[r][a]
            a = self._mul[a][a]
            k >>= 1
        return r

    def arith(self, a, b, op):
        if op == "+":
            return self.add(a, b)
        if op == "-":
            return self.sub(a, b)
        if op == "*":
            return self.mul(a, b)
        if op == "/":
            return self.div(a, b)
        raise FieldError(f"unknown op {op!r}")

    def frobenius(self, a, i=1):
        """a ↦ a^(p^i)."""
        return self.pow(a, self.p ** (i % self.e if self.e > 1 else 1))

    def mult_order(self, a):
        if a == 0:
            raise FieldError("order of 0 undefined")
        r, k = a, 1
        while r != 1:
            r = self._mul[r][a]
            k += 1
        return k

    def is_square(self, a):
        if a == 0:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1 if self.q % 2 == 1 else True

    def subfield(self, m):
        """Elements of the subfield GF(p^m) inside this field (m | e)."""
        if self.e % m != 0:
            raise FieldError(f"GF({self.p}^{m}) is not a subfield of GF({self.q})")
        pm = self.p ** m
        return tuple(a for a in range(self.q) if self.pow(a, pm) == a)

    def __repr__(self):
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field(q):
    """The field GF(q) (cached, so `is` comparisons work)."""
    p, e = factor_prime_power(q)
    return GF(p, e)
