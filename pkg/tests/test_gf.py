"""Field arithmetic against first-principles oracles."""

import random

import pytest

from polyforge.gf import GF, FieldError, factor_prime_power, field, is_prime

SMALL_Q = [2, 3, 4, 5, 7, 8, 9, 16, 25]


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23}
    for n in range(25):
        assert is_prime(n) == (n in primes)


def test_factor_prime_power():
    assert factor_prime_power(2) == (2, 1)
    assert factor_prime_power(9) == (3, 2)
    assert factor_prime_power(32) == (2, 5)
    assert factor_prime_power(49) == (7, 2)
    for bad in (0, 1, 6, 12, 100):
        with pytest.raises(FieldError):
            factor_prime_power(bad)


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    F = field(q)
    els = list(F.elements())
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a in els:
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
    rng = random.Random(q)
    for _ in range(200):
        a, b, c = (rng.randrange(q) for _ in range(3))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@pytest.mark.parametrize("q", [8, 9, 16])
def test_tables_match_polynomial_reference(q):
    # recompute a sample of products by schoolbook polynomial
    # multiplication with reduction, bypassing the cached tables
    F = field(q)
    p, mod = F.p, F.modulus
    e = len(mod) - 1
    rng = random.Random(q)
    for _ in range(300):
        a, b = rng.randrange(q), rng.randrange(q)
        ca, cb = F.coeffs(a), F.coeffs(b)
        prod = [0] * (2 * e - 1)
        for i in range(e):
            for j in range(e):
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            prod[k] = 0
            for j in range(e):
                prod[k - e + j] = (prod[k - e + j] - c * mod[j]) % p
        want = 0
        for c in reversed(prod[:e]):
            want = want * p + c
        assert F.mul(a, b) == want


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25])
def test_frobenius_is_automorphism(q):
    F = field(q)
    for a in F.elements():
        for b in F.elements():
            assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
            assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
    # prime subfield is fixed pointwise, full orbit closes after e steps
    for a in range(F.p):
        assert F.frobenius(a) == a
    for a in F.elements():
        r = a
        for _ in range(F.e):
            r = F.frobenius(r)
        assert r == a


def test_subfield_of_gf16():
    F = field(16)
    sub = F.subfield(2)
    assert len(sub) == 4
    for a in sub:
        for b in sub:
            assert F.add(a, b) in sub
            assert F.mul(a, b) in sub


@pytest.mark.parametrize("q", SMALL_Q)
def test_multiplicative_orders(q):
    F = field(q)
    assert F.mult_order(F.omega) == q - 1
    for a in range(1, q):
        assert (q - 1) % F.mult_order(a) == 0


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_square_counts_odd_q(q):
    F = field(q)
    squares = {F.mul(a, a) for a in F.elements()}
    assert squares == {a for a in F.elements() if F.is_square(a)}
    assert len(squares) == (q + 1) // 2


def test_element_wrapper_operators():
    F = field(9)
    a, b = F.el(5), F.el(7)
    assert (a + b).value == F.add(5, 7)
    assert (a - b).value == F.sub(5, 7)
    assert (a * b).value == F.mul(5, 7)
    assert (a / b).value == F.div(5, 7)
    assert (-a).value == F.neg(5)
    assert (a ** 3).value == F.pow(5, 3)
    assert a + 0 == a and 1 * a == a
    with pytest.raises(ZeroDivisionError):
        a / F.el(0)


def test_element_refuses_mixed_fields():
    a = field(4).el(2)
    b = field(8).el(2)
    with pytest.raises(FieldError):
        a + b


def test_coeff_round_trip():
    F = field(27)
    for a in F.elements():
        assert F.element(F.coeffs(a)) == a


def test_field_cache_identity():
    assert field(16) is field(16)
    assert GF(2, 4).q == 16


def test_unsupported_fields_raise():
    with pytest.raises(FieldError):
        GF(4)          # not prime
    with pytest.raises(FieldError):
        GF(2, 20)      # above size limit
    with pytest.raises(FieldError):
        field(121)     # no modulus on file
