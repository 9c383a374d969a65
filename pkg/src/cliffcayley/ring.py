"""Exact arithmetic in Z[omega, 1/sqrt2], omega = exp(i*pi/4).

A value is ``(a0 + a1*w + a2*w^2 + a3*w^3) / sqrt2^k`` with integer
coefficients.  Reduction uses ``w^4 = -1``.  :class:`Cyclo8Scalar` is the
scalar type; the module-level array helpers implement the same arithmetic on
numpy arrays whose trailing axis holds the four coefficients, which is what the
matrix and group code runs on.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_OMEGA = cmath.exp(1j * math.pi / 4)
_SQRT2 = math.sqrt(2.0)


class RingOverflowError(OverflowError, ArithmeticError):
    """Raised when an exact coefficient leaves the signed 64-bit range."""


def _check(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise RingOverflowError(f"coefficient {value} outside signed 64-bit range")
    return value


def _conv(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, int, int, int]:
    # negacyclic convolution: w^4 = -1
    out = [0, 0, 0, 0]
    for i in range(4):
        if a[i] == 0:
            continue
        for j in range(4):
            t = a[i] * b[j]
            if i + j >= 4:
                out[i + j - 4] -= t
            else:
                out[i + j] += t
    return tuple(_check(c) for c in out)  # type: ignore[return-value]


def _times_sqrt2(a: tuple[int, ...]) -> tuple[int, int, int, int]:
    # sqrt2 = w - w^3
    a0, a1, a2, a3 = a
    return (a1 - a3, a0 + a2, a1 + a3, a2 - a0)


@dataclass(frozen=True, slots=True)
class Cyclo8Scalar:
    """Immutable exact scalar ``(a0 + a1 w + a2 w^2 + a3 w^3) / sqrt2^k``.

    Construct through :meth:`make` (or the arithmetic operators) to obtain the
    canonical representative; the raw constructor trusts its input.
    """

    coeffs: tuple[int, int, int, int] = (0, 0, 0, 0)
    sqrt2_exp: int = 0

    @classmethod
    def make(cls, coeffs, sqrt2_exp: int = 0) -> Cyclo8Scalar:
        c = tuple(_check(int(x)) for x in coeffs)
        if len(c) != 4:
            raise ValueError("expected four coefficients")
        if sqrt2_exp < 0:
            raise ValueError("sqrt2 exponent must be non-negative")
        return normalize(cls(c, int(sqrt2_exp)))  # type: ignore[arg-type]

    @classmethod
    def from_int(cls, value: int) -> Cyclo8Scalar:
        return cls.make((value, 0, 0, 0))

    def is_zero(self) -> bool:
        return self.coeffs == (0, 0, 0, 0)

    def __add__(self, other: Cyclo8Scalar) -> Cyclo8Scalar:
        if isinstance(other, int):
            other = Cyclo8Scalar.from_int(other)
        a, b = self.coeffs, other.coeffs
        k = max(self.sqrt2_exp, other.sqrt2_exp)
        for _ in range(k - self.sqrt2_exp):
            a = _times_sqrt2(a)
        for _ in range(k - other.sqrt2_exp):
            b = _times_sqrt2(b)
        return normalize(Cyclo8Scalar(tuple(_check(x + y) for x, y in zip(a, b)), k))

    __radd__ = __add__

    def __neg__(self) -> Cyclo8Scalar:
        return Cyclo8Scalar(tuple(-x for x in self.coeffs), self.sqrt2_exp)

    def __sub__(self, other: Cyclo8Scalar) -> Cyclo8Scalar:
        return self + (-other)

    def __mul__(self, other: Cyclo8Scalar) -> Cyclo8Scalar:
        if isinstance(other, int):
            other = Cyclo8Scalar.from_int(other)
        return normalize(
            Cyclo8Scalar(_conv(self.coeffs, other.coeffs), self.sqrt2_exp + other.sqrt2_exp)
        )

    __rmul__ = __mul__

    def conj(self) -> Cyclo8Scalar:
        return scalar_conj(self)

    def __complex__(self) -> complex:
        z = sum(c * _OMEGA**p for p, c in enumerate(self.coeffs))
        return complex(z / _SQRT2**self.sqrt2_exp)

    def __str__(self) -> str:
        a0, a1, a2, a3 = self.coeffs
        return f"({a0},{a1},{a2},{a3})/s2^{self.sqrt2_exp}"

    def __repr__(self) -> str:
        return f"Cyclo8Scalar{self.coeffs!r}/s2^{self.sqrt2_exp}"


ZERO = Cyclo8Scalar()
ONE = Cyclo8Scalar((1, 0, 0, 0), 0)


def scalar_arith(a: Cyclo8Scalar, b: Cyclo8Scalar, op: str) -> Cyclo8Scalar:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def normalize(a: Cyclo8Scalar) -> Cyclo8Scalar:
    """Strip common sqrt2 factors until the numerator is no longer divisible."""
    c, k = a.coeffs, a.sqrt2_exp
    if c == (0, 0, 0, 0):
        return ZERO
    while k > 0:
        s = _times_sqrt2(c)
        if any(x % 2 for x in s):
            break
        c = tuple(x // 2 for x in s)
        k -= 1
    return Cyclo8Scalar(c, k)  # type: ignore[arg-type]


scalar_normalize = normalize


def omega_pow(t: int) -> Cyclo8Scalar:
    t %= 8
    c = [0, 0, 0, 0]
    c[t % 4] = 1 if t < 4 else -1
    return Cyclo8Scalar(tuple(c), 0)  # type: ignore[arg-type]


def scalar_conj(a: Cyclo8Scalar) -> Cyclo8Scalar:
    # conj(w^p) = w^(8-p) = -w^(4-p) for p = 1..3
    a0, a1, a2, a3 = a.coeffs
    return Cyclo8Scalar((a0, -a3, -a2, -a1), a.sqrt2_exp)


_TEXT = re.compile(r"^\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*/\s*s2\^(\d+)\s*$")


def parse_scalar(text: str) -> Cyclo8Scalar:
    """Inverse of ``str(Cyclo8Scalar)``; the result is canonicalised."""
    m = _TEXT.match(text)
    if not m:
        raise ValueError(f"malformed scalar literal {text!r}")
    return Cyclo8Scalar.make(tuple(int(g) for g in m.groups()[:4]), int(m.group(5)))


# ---------------------------------------------------------------------------
# array arithmetic; trailing axis of length 4 holds the coefficients


def times_omega(a: np.ndarray, t: int = 1) -> np.ndarray:
    """Multiply coefficient arrays by w^t."""
    t %= 8
    out = a
    if t >= 4:
        out = -out
        t -= 4
    if t:
        out = np.concatenate([-out[..., 4 - t :], out[..., : 4 - t]], axis=-1)
    return out


def times_sqrt2(a: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    return np.stack([a1 - a3, a0 + a2, a1 + a3, a2 - a0], axis=-1)


def conj_array(a: np.ndarray) -> np.ndarray:
    return np.stack([a[..., 0], -a[..., 3], -a[..., 2], -a[..., 1]], axis=-1)


def _bound(a: np.ndarray) -> int:
    return int(np.abs(a).max()) if a.size else 0


def guard(a: np.ndarray, headroom: int = 1) -> None:
    """Raise if ``headroom`` further additions could overflow int64."""
    if _bound(a) * headroom >= 2**62:
        raise RingOverflowError("coefficient magnitude too large for checked int64 arithmetic")


def ring_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over Z[w] of arrays shaped ``(..., r, s, 4)`` and ``(..., s, c, 4)``."""
    inner = a.shape[-2]
    if _bound(a) * _bound(b) * 4 * max(inner, 1) >= 2**63:
        raise RingOverflowError("ring matmul would overflow int64")
    a = a.astype(np.int64, copy=False)
    b = b.astype(np.int64, copy=False)
    shape = np.broadcast_shapes(a.shape[:-3], b.shape[:-3]) + (a.shape[-3], b.shape[-2], 4)
    out = np.zeros(shape, dtype=np.int64)
    for i in range(4):
        ai = a[..., i]
        if not ai.any():
            continue
        for j in range(4):
            p = ai @ b[..., j]
            if i + j >= 4:
                out[..., i + j - 4] -= p
            else:
                out[..., i + j] += p
    return out


def normalize_batch(num: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonicalise a batch of values sharing one sqrt2 exponent per item.

    ``num`` has shape ``(B, ..., 4)`` and ``k`` shape ``(B,)``.  Each item is
    divided by sqrt2 while every one of its coefficients allows it and k > 0.
    """
    num = np.array(num, dtype=np.int64, copy=True)
    k = np.array(k, dtype=np.int64, copy=True)
    axes = tuple(range(1, num.ndim - 1))
    while True:
        # divisible by sqrt2 iff a0 = a2 and a1 = a3 (mod 2) entrywise
        par = ((num[..., 0] - num[..., 2]) | (num[..., 1] - num[..., 3])) & 1
        ok = (k > 0) & ~par.any(axis=axes) if axes else (k > 0) & (par == 0)
        if not ok.any():
            return num, k
        num[ok] = times_sqrt2(num[ok]) // 2
        k[ok] -= 1


def to_complex(num: np.ndarray, k) -> np.ndarray:
    powers = np.array([_OMEGA**p for p in range(4)])
    z = num.astype(np.float64) @ powers
    return z / _SQRT2 ** np.asarray(k, dtype=np.float64).reshape(np.shape(k) + (1,) * (z.ndim - np.ndim(k)))
