"""Gates, words, exact matrices and states.

Conventions:

* basis index ``b`` encodes ``|b_1 ... b_n>`` with qubit 1 the most
  significant bit;
* a word ``g1 g2 ... gk`` evaluates to the product ``M(g1) M(g2) ... M(gk)``,
  so the rightmost letter acts first on a state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import ring
from .ring import Cyclo8Scalar

MAX_QUBITS = 10


class WordParseError(ValueError):
    """Malformed gate word; carries the offending token and its offset."""

    def __init__(self, message: str, token: str = "", position: int = -1):
        super().__init__(f"{message} (token {token!r} at position {position})" if token else message)
        self.token = token
        self.position = position


@dataclass(frozen=True, slots=True, order=True)
class GateId:
    kind: str  # "H", "P" or "C"
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("H", "P", "C"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == "C" else 1
        if len(self.qubits) != want:
            raise ValueError(f"{self.kind} gate takes {want} qubit index(es)")
        if any(q < 1 for q in self.qubits):
            raise ValueError("qubit indices are 1-based")
        if self.kind == "C" and self.qubits[0] == self.qubits[1]:
            raise ValueError("CNOT control and target must differ")

    @classmethod
    def H(cls, i: int) -> GateId:
        return cls("H", (i,))

    @classmethod
    def P(cls, i: int) -> GateId:
        return cls("P", (i,))

    @classmethod
    def C(cls, control: int, target: int) -> GateId:
        return cls("C", (control, target))

    @property
    def max_qubit(self) -> int:
        return max(self.qubits)

    def inverse(self) -> tuple[GateId, ...]:
        return (self, self, self) if self.kind == "P" else (self,)

    def __str__(self) -> str:
        if self.kind == "C":
            i, j = self.qubits
            return f"C{i}{j}" if i < 10 and j < 10 else f"C{i},{j}"
        return f"{self.kind}{self.qubits[0]}"


class GateWord(tuple):
    """Immutable sequence of :class:`GateId`; the empty word is the identity."""

    def __new__(cls, letters=()):
        letters = tuple(letters)
        for g in letters:
            if not isinstance(g, GateId):
                raise TypeError(f"not a gate: {g!r}")
        return super().__new__(cls, letters)

    def __add__(self, other):
        return GateWord(tuple(self) + tuple(other))

    def __mul__(self, k: int):
        return GateWord(tuple(self) * k)

    def inverse(self) -> GateWord:
        return GateWord(x for g in reversed(self) for x in g.inverse())

    @property
    def max_qubit(self) -> int:
        return max((g.max_qubit for g in self), default=0)

    def __str__(self) -> str:
        return " ".join(str(g) for g in self)

    def __repr__(self) -> str:
        return f"GateWord({str(self)!r})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<open>\()
      | (?P<close>\))(?P<cexp>\^-?\d+|')?
      | (?P<gate>[A-Za-z]+\d+(?:,\d+)?)(?P<gexp>\^-?\d+|')?
      | (?P<sep>,)
    )""",
    re.VERBOSE,
)


def _gate_from_token(tok: str, pos: int) -> GateId:
    m = re.fullmatch(r"([HPC]|CNOT)(\d+(?:,\d+)?)", tok)
    if not m:
        raise WordParseError("unknown gate token", tok, pos)
    kind, rest = m.group(1), m.group(2)
    if kind in ("C", "CNOT"):
        if "," in rest:
            i, j = (int(x) for x in rest.split(","))
        elif len(rest) == 2:
            i, j = int(rest[0]), int(rest[1])
        else:
            raise WordParseError("CNOT needs two indices (use C1,2 for multi-digit indices)", tok, pos)
        if i == 0 or j == 0:
            raise WordParseError("qubit index must be >= 1", tok, pos)
        if i == j:
            raise WordParseError("CNOT control equals target", tok, pos)
        return GateId.C(i, j)
    if "," in rest:
        raise WordParseError("single-qubit gate takes one index", tok, pos)
    i = int(rest)
    if i == 0:
        raise WordParseError("qubit index must be >= 1", tok, pos)
    return GateId(kind, (i,))


def _power(word: GateWord, exp: str | None, tok: str, pos: int) -> GateWord:
    if not exp:
        return word
    if exp == "'":
        return word.inverse()
    k = int(exp[1:])
    if k == 0:
        raise WordParseError("exponent must be non-zero", tok, pos)
    return word.inverse() * (-k) if k < 0 else word * k


def parse_word(text: str) -> GateWord:
    """Parse ``"H1 P2^3 C12 (C12 H2)^4 P1'"`` into a :class:`GateWord`.

    Tokens are whitespace separated (commas between letters are tolerated).
    ``C12`` and ``C1,2`` both mean control 1, target 2.  ``^k`` repeats,
    ``^-k`` and ``'`` invert; parentheses group.
    """
    stack: list[list[GateId]] = [[]]
    pos = 0
    text = text.replace("·", " ").replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = text[pos:].split()[0]
            raise WordParseError("unexpected input", bad, text.index(bad, pos))
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("open"):
            stack.append([])
        elif m.group("close"):
            if len(stack) == 1:
                raise WordParseError("unbalanced ')'", ")", start)
            inner = GateWord(stack.pop())
            stack[-1].extend(_power(inner, m.group("cexp"), ")", start))
        elif m.group("gate"):
            tok = m.group("gate")
            g = _gate_from_token(tok, m.start("gate"))
            stack[-1].extend(_power(GateWord([g]), m.group("gexp"), tok, m.start("gate")))
        pos = m.end()
    if len(stack) != 1:
        raise WordParseError("unbalanced '('", "(", len(text))
    return GateWord(stack[0])


def parse_gates(text: str) -> list[GateId]:
    """Parse a generator list such as ``"H1,H2,C12,C21"`` (commas or spaces)."""
    gens: list[GateId] = []
    offset = 0
    for tok in re.split(r"[\s;]+|,(?![0-9]+(?:[\s,;]|$))", text.strip()):
        if not tok:
            continue
        offset = text.find(tok, offset)
        gens.append(_gate_from_token(tok, offset))
    return gens


# ---------------------------------------------------------------------------
# row operations on coefficient arrays


def apply_gate_rows(num: np.ndarray, k: np.ndarray, gate: GateId, n: int):
    """Left-multiply a batch by ``gate`` acting on ``n`` qubits.

    ``num`` is ``(B, 2**n, C, 4)``: gate acts on the row axis.  Returns the new
    ``(num, k)`` pair, canonicalised.
    """
    if gate.max_qubit > n:
        raise ValueError(f"gate {gate} acts outside {n} qubit(s)")
    B, D, C, _ = num.shape
    t = num.reshape((B,) + (2,) * n + (C, 4))
    if gate.kind == "H":
        ring.guard(t, 2)
        ax = gate.qubits[0]
        a = np.take(t, 0, axis=ax)
        b = np.take(t, 1, axis=ax)
        out = np.stack([a + b, a - b], axis=ax)
        return ring.normalize_batch(out.reshape(num.shape), np.asarray(k) + 1)
    out = t.copy()
    if gate.kind == "P":
        idx = [slice(None)] * out.ndim
        idx[gate.qubits[0]] = 1
        idx = tuple(idx)
        out[idx] = ring.times_omega(t[idx], 2)
    else:
        c, tq = gate.qubits
        idx = [slice(None)] * out.ndim
        idx[c] = 1
        idx = tuple(idx)
        sub = t[idx]
        # target axis shifts down by one when the control axis precedes it
        out[idx] = np.flip(sub, axis=tq - 1 if c < tq else tq)
    return out.reshape(num.shape), np.array(k, copy=True)


def identity_batch(n: int, batch: int = 1) -> tuple[np.ndarray, np.ndarray]:
    D = 2**n
    num = np.zeros((batch, D, D, 4), dtype=np.int64)
    num[:, np.arange(D), np.arange(D), 0] = 1
    return num, np.zeros(batch, dtype=np.int64)


# ---------------------------------------------------------------------------
# serialisation used for dedup keys; byte order equals numeric lexicographic
# order of (k, coefficients...)


def encode_batch(num: np.ndarray, k: np.ndarray) -> list[bytes]:
    B = num.shape[0]
    flat = num.reshape(B, -1)
    if flat.size and (flat.min() < -128 or flat.max() > 127):
        raise ring.RingOverflowError("coefficient does not fit the encoding byte range")
    buf = np.empty((B, flat.shape[1] + 1), dtype=np.uint8)
    buf[:, 0] = k
    buf[:, 1:] = (flat + 128).astype(np.uint8)
    return buf.view(f"V{buf.shape[1]}").ravel().tolist()


def decode(data: bytes, shape: tuple[int, ...]) -> tuple[np.ndarray, int]:
    arr = np.frombuffer(data, dtype=np.uint8)
    return (arr[1:].astype(np.int64) - 128).reshape(shape), int(arr[0])


def phase_canonical_batch(num: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pick, per item, the multiple ``w^t * x`` with least encoding.

    Returns ``(canonical numerators, t)``.  Items must already be normalised
    (all multiples then share the same k, so only coefficients are compared).
    """
    B = num.shape[0]
    flat = num.reshape(B, -1, 4)
    cands = np.stack([ring.times_omega(flat, t) for t in range(8)], axis=1)  # (B, 8, L, 4)
    keys = cands.reshape(B, 8, -1)
    alive = np.ones((B, 8), dtype=bool)
    big = np.iinfo(np.int64).max
    for c in range(keys.shape[2]):
        col = keys[:, :, c]
        m = np.where(alive, col, big).min(axis=1, keepdims=True)
        alive &= col == m
        if (alive.sum(axis=1) == 1).all():
            break
    t = alive.argmax(axis=1)
    out = cands[np.arange(B), t].reshape(num.shape)
    return out, t


# ---------------------------------------------------------------------------
# matrices and states


class UnitaryMatrix:
    """Exact ``2**n x 2**n`` matrix stored as one numerator array over sqrt2^k."""

    __slots__ = ("n", "num", "k", "__dict__")

    def __init__(self, n: int, num: np.ndarray, k: int = 0, *, canonical: bool = False):
        num = np.asarray(num, dtype=np.int64)
        D = 2**n
        if num.shape != (D, D, 4):
            raise ValueError(f"expected shape {(D, D, 4)}, got {num.shape}")
        if not canonical:
            nb, kb = ring.normalize_batch(num[None], np.array([k]))
            num, k = nb[0], int(kb[0])
        num.setflags(write=False)
        self.n = n
        self.num = num
        self.k = int(k)

    @classmethod
    def identity(cls, n: int) -> UnitaryMatrix:
        num, _ = identity_batch(n)
        return cls(n, num[0], 0, canonical=True)

    @classmethod
    def from_entries(cls, n: int, entries) -> UnitaryMatrix:
        """Build from a nested list of :class:`Cyclo8Scalar`."""
        D = 2**n
        kmax = max(e.sqrt2_exp for row in entries for e in row)
        num = np.zeros((D, D, 4), dtype=np.int64)
        for r, row in enumerate(entries):
            for c, e in enumerate(row):
                coeffs = e.coeffs
                for _ in range(kmax - e.sqrt2_exp):
                    coeffs = ring._times_sqrt2(coeffs)
                num[r, c] = coeffs
        return cls(n, num, kmax)

    @property
    def dim(self) -> int:
        return 2**self.n

    def entry(self, r: int, c: int) -> Cyclo8Scalar:
        return Cyclo8Scalar.make(tuple(int(x) for x in self.num[r, c]), self.k)

    @cached_property
    def entries(self) -> list[list[Cyclo8Scalar]]:
        return [[self.entry(r, c) for c in range(self.dim)] for r in range(self.dim)]

    def batch(self) -> tuple[np.ndarray, np.ndarray]:
        return self.num[None].copy(), np.array([self.k])

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return apply(self, other)
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return UnitaryMatrix(self.n, ring.ring_matmul(self.num, other.num), self.k + other.k)

    def scaled_by_omega(self, t: int) -> UnitaryMatrix:
        return UnitaryMatrix(self.n, ring.times_omega(self.num, t), self.k, canonical=True)

    def dagger(self) -> UnitaryMatrix:
        return UnitaryMatrix(self.n, ring.conj_array(self.num.transpose(1, 0, 2)), self.k, canonical=True)

    def is_identity(self) -> bool:
        return self == UnitaryMatrix.identity(self.n)

    def is_unitary(self) -> bool:
        return (self @ self.dagger()).is_identity()

    def encoding(self) -> bytes:
        return encode_batch(self.num[None], np.array([self.k]))[0]

    def to_complex(self) -> np.ndarray:
        return ring.to_complex(self.num, self.k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.num, other.num)

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.num.tobytes()))

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(str(e) for e in row) + "]" for row in self.entries]
        return f"UnitaryMatrix(n={self.n}, [" + ", ".join(rows) + "])"


class StateVector:
    """Unnormalised exact amplitude vector of length ``2**n``."""

    __slots__ = ("n", "num", "k")

    def __init__(self, n: int, num: np.ndarray, k: int = 0, *, canonical: bool = False):
        num = np.asarray(num, dtype=np.int64)
        if num.shape != (2**n, 4):
            raise ValueError(f"expected shape {(2**n, 4)}, got {num.shape}")
        if not num.any():
            raise ValueError("state vector is identically zero")
        if not canonical:
            nb, kb = ring.normalize_batch(num[None], np.array([k]))
            num, k = nb[0], int(kb[0])
        num.setflags(write=False)
        self.n = n
        self.num = num
        self.k = int(k)

    @classmethod
    def basis(cls, n: int, index: int = 0) -> StateVector:
        num = np.zeros((2**n, 4), dtype=np.int64)
        num[index, 0] = 1
        return cls(n, num, 0, canonical=True)

    @classmethod
    def from_amplitudes(cls, n: int, amps) -> StateVector:
        amps = list(amps)
        kmax = max(a.sqrt2_exp for a in amps)
        num = np.zeros((2**n, 4), dtype=np.int64)
        for i, a in enumerate(amps):
            c = a.coeffs
            for _ in range(kmax - a.sqrt2_exp):
                c = ring._times_sqrt2(c)
            num[i] = c
        return cls(n, num, kmax)

    @property
    def amps(self) -> list[Cyclo8Scalar]:
        return [Cyclo8Scalar.make(tuple(int(x) for x in row), self.k) for row in self.num]

    def scaled_by_omega(self, t: int) -> StateVector:
        return StateVector(self.n, ring.times_omega(self.num, t), self.k, canonical=True)

    def phase_canonical(self) -> tuple[StateVector, int]:
        out, t = phase_canonical_batch(self.num[None], np.array([self.k]))
        return StateVector(self.n, out[0], self.k, canonical=True), int(t[0])

    def encoding(self) -> bytes:
        return encode_batch(self.num[None], np.array([self.k]))[0]

    def to_complex(self) -> np.ndarray:
        return ring.to_complex(self.num, self.k)

    def tensor(self, other: StateVector) -> StateVector:
        prod = ring.ring_matmul(self.num[:, None, None, :], other.num[None, None, :, :])
        return StateVector(self.n + other.n, prod.reshape(-1, 4), self.k + other.k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.num, other.num)

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.num.tobytes()))

    def __str__(self) -> str:
        return "[" + ", ".join(str(a) for a in self.amps) + "]"

    def __repr__(self) -> str:
        return f"StateVector(n={self.n}, {self})"


# ---------------------------------------------------------------------------
# operations


def gate_matrix(g: GateId, n: int) -> UnitaryMatrix:
    return word_matrix(GateWord([g]), n)


def word_matrix(w: GateWord | str, n: int) -> UnitaryMatrix:
    if isinstance(w, str):
        w = parse_word(w)
    if w.max_qubit > n:
        raise ValueError(f"word {w} acts outside {n} qubit(s)")
    num, k = identity_batch(n)
    for g in reversed(w):
        num, k = apply_gate_rows(num, k, g, n)
    return UnitaryMatrix(n, num[0], int(k[0]), canonical=True)


def matrix_dagger(m: UnitaryMatrix) -> UnitaryMatrix:
    return m.dagger()


def embed_rows(num: np.ndarray, m: int, n: int) -> np.ndarray:
    """Reshape an ``n``-qubit column ``(2**n, ..., 4)`` for an ``m``-qubit operator."""
    return num.reshape((2**m, 2 ** (n - m)) + num.shape[1:-1] + (4,))


def apply(m: UnitaryMatrix, v: StateVector) -> StateVector:
    """Exact ``M v``; an operator on fewer qubits acts on the leading ones."""
    if m.n > v.n:
        raise ValueError(f"dimension mismatch: {m.n}-qubit operator on {v.n}-qubit state")
    cols = embed_rows(v.num, m.n, v.n)
    out = ring.ring_matmul(m.num, cols)
    return StateVector(v.n, out.reshape(2**v.n, 4), m.k + v.k)


def apply_word(w: GateWord | str, v: StateVector) -> StateVector:
    if isinstance(w, str):
        w = parse_word(w)
    num, k = v.num[None, :, None, :].astype(np.int64), np.array([v.k])
    for g in reversed(w):
        num, k = apply_gate_rows(num, k, g, v.n)
    return StateVector(v.n, num[0, :, 0], int(k[0]), canonical=True)


def canonical_phase_form(m: UnitaryMatrix) -> tuple[UnitaryMatrix, int]:
    """Representative ``w^t M`` with least encoding, and the ``t`` used."""
    out, t = phase_canonical_batch(m.num[None], np.array([m.k]))
    return UnitaryMatrix(m.n, out[0], m.k, canonical=True), int(t[0])


# ---------------------------------------------------------------------------
# state literals:  "|i1+>", "|0,-i>",  |+> = |0>+|1>,  |i> = |0>+i|1>

_LITERALS = {
    "0": ((1, 0, 0, 0), (0, 0, 0, 0)),
    "1": ((0, 0, 0, 0), (1, 0, 0, 0)),
    "+": ((1, 0, 0, 0), (1, 0, 0, 0)),
    "-": ((1, 0, 0, 0), (-1, 0, 0, 0)),
    "i": ((1, 0, 0, 0), (0, 0, 1, 0)),
    "-i": ((1, 0, 0, 0), (0, 0, -1, 0)),
}


def parse_state_literal(text: str) -> StateVector:
    s = text.strip().replace("−", "-")
    if not (s.startswith("|") and s.endswith((">", "⟩"))):
        raise ValueError(f"state literal must look like |...>: {text!r}")
    factors: list[str] = []
    # separators always split factors; inside a chunk "-i" is read greedily
    for chunk in re.split(r"[,\s]+", s[1:-1]):
        pos = 0
        while pos < len(chunk):
            if chunk.startswith("-i", pos):
                factors.append("-i")
                pos += 2
            elif chunk[pos] in "01+-i":
                factors.append(chunk[pos])
                pos += 1
            else:
                raise ValueError(f"unknown single-qubit literal {chunk[pos]!r} in {text!r}")
    if not factors:
        raise ValueError("empty state literal")
    vec = np.array([[1, 0, 0, 0]], dtype=np.int64)
    for f in factors:
        a, b = (np.array(x, dtype=np.int64) for x in _LITERALS[f])
        pair = np.stack([a, b])  # (2, 4)
        vec = ring.ring_matmul(vec[:, None, None, :], pair[None, None, :, :]).reshape(-1, 4)
    return StateVector(len(factors), vec, 0)
