import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliffcayley import ring
from cliffcayley.ring import ONE, ZERO, Cyclo8Scalar, RingOverflowError

W = cmath.exp(1j * math.pi / 4)

coeff = st.integers(-40, 40)
scalars = st.builds(
    lambda c, k: Cyclo8Scalar.make(c, k),
    st.tuples(coeff, coeff, coeff, coeff),
    st.integers(0, 4),
)


def S(*c, k=0):
    return Cyclo8Scalar.make(c, k)


def test_omega_times_omega_cubed_is_minus_one():
    assert ring.omega_pow(1) * ring.omega_pow(3) == S(-1, 0, 0, 0)


def test_half_is_one_over_sqrt2_squared():
    h = S(1, 0, 0, 0, k=1)
    prod = h * h
    assert prod.coeffs == (1, 0, 0, 0) and prod.sqrt2_exp == 2


def test_one_plus_omega_times_one_minus_omega():
    prod = S(1, 1, 0, 0) * S(1, -1, 0, 0)
    assert prod == S(1, 0, -1, 0)
    assert abs(complex(prod) - (1 + W) * (1 - W)) < 1e-12


def test_normalize_examples():
    assert ring.normalize(Cyclo8Scalar((2, 0, 0, 0), 2)) == Cyclo8Scalar((1, 0, 0, 0), 0)
    assert ring.normalize(Cyclo8Scalar((0, 0, 0, 0), 5)) == ZERO
    raw = Cyclo8Scalar((1, 0, -1, 0), 1)
    out = ring.normalize(raw)
    assert out.sqrt2_exp == 0
    assert out.coeffs == (0, 0, 0, -1)  # (1 - i)/sqrt2 = w^-1 = -w^3
    assert abs(complex(out) - (1 - 1j) / math.sqrt(2)) < 1e-12


@pytest.mark.parametrize("t,expect", [(0, (1, 0, 0, 0)), (4, (-1, 0, 0, 0)), (6, (0, 0, -1, 0)), (8, (1, 0, 0, 0))])
def test_omega_pow(t, expect):
    assert ring.omega_pow(t).coeffs == expect


def test_conj_examples():
    assert ring.scalar_conj(ring.omega_pow(1)) == S(0, 0, 0, -1)
    r = S(1, 0, 0, 0, k=1)
    assert r.conj() == r
    assert S(1, 1, 0, 0, k=1).conj() == S(1, 0, 0, -1, k=1)


def test_scalar_arith_dispatch():
    a, b = S(1, 2, 0, 0), S(0, 1, 0, 0, k=1)
    assert ring.scalar_arith(a, b, "add") == a + b
    assert ring.scalar_arith(a, b, "mul") == a * b
    with pytest.raises(ValueError):
        ring.scalar_arith(a, b, "div")


def test_overflow_is_fatal():
    big = Cyclo8Scalar.make((2**62, 0, 0, 0))
    with pytest.raises(RingOverflowError):
        big + big
    with pytest.raises(RingOverflowError):
        big * big
    with pytest.raises(RingOverflowError):
        Cyclo8Scalar.make((2**64, 0, 0, 0))


def test_text_round_trip():
    x = S(3, -1, 0, 2, k=3)
    assert str(x) == "(3,-1,0,2)/s2^3"
    assert ring.parse_scalar(str(x)) == x
    with pytest.raises(ValueError):
        ring.parse_scalar("(1,2,3)/s2^0")


def test_ring_axioms_on_ten_thousand_triples():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        c = rng.integers(-9, 10, size=(3, 4))
        k = rng.integers(0, 4, size=3)
        a, b, d = (Cyclo8Scalar.make(tuple(c[i]), int(k[i])) for i in range(3))
        assert (a * b) * d == a * (b * d)
        assert a * b == b * a
        assert a + b == b + a
        assert a * (b + d) == a * b + a * d


@settings(max_examples=300, deadline=None)
@given(scalars)
def test_normalize_idempotent(x):
    assert ring.normalize(ring.normalize(x)) == ring.normalize(x)


@settings(max_examples=300, deadline=None)
@given(scalars, scalars)
def test_float_evaluation_is_multiplicative(x, y):
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9
    assert abs(complex(x + y) - (complex(x) + complex(y))) < 1e-9


@settings(max_examples=300, deadline=None)
@given(scalars, scalars)
def test_conj_is_an_involutive_homomorphism(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
    assert abs(complex(x.conj()) - complex(x).conjugate()) < 1e-9


@settings(max_examples=200, deadline=None)
@given(scalars)
def test_identities(x):
    assert x * ONE == x
    assert x + ZERO == x
    assert (x - x).is_zero()


def test_canonical_form_zero_has_k_zero():
    x = S(1, 0, 0, 0, k=3)
    assert (x - x) == ZERO and (x - x).sqrt2_exp == 0


# array layer


def test_times_omega_matches_scalar():
    rng = np.random.default_rng(1)
    a = rng.integers(-5, 6, size=(7, 4))
    for t in range(9):
        out = ring.times_omega(a, t)
        for row, o in zip(a, out):
            assert Cyclo8Scalar(tuple(int(x) for x in o), 0) == Cyclo8Scalar.make(tuple(row)) * ring.omega_pow(t)


def test_ring_matmul_matches_complex():
    rng = np.random.default_rng(2)
    a = rng.integers(-4, 5, size=(3, 4, 4))
    b = rng.integers(-4, 5, size=(4, 2, 4))
    got = ring.to_complex(ring.ring_matmul(a, b), 0)
    want = ring.to_complex(a, 0) @ ring.to_complex(b, 0)
    assert np.allclose(got, want)


def test_ring_matmul_overflow_guard():
    a = np.full((1, 1, 4), 2**40, dtype=np.int64)
    with pytest.raises(RingOverflowError):
        ring.ring_matmul(a, a)


def test_normalize_batch_agrees_with_scalar():
    rng = np.random.default_rng(3)
    num = rng.integers(-6, 7, size=(50, 1, 4)) * 2
    k = rng.integers(0, 5, size=50)
    out, kk = ring.normalize_batch(num, k)
    for i in range(50):
        s = ring.normalize(Cyclo8Scalar(tuple(int(x) for x in num[i, 0]), int(k[i])))
        if s.is_zero():
            assert not out[i].any()
        else:
            assert s.coeffs == tuple(int(x) for x in out[i, 0]) and s.sqrt2_exp == kk[i]
