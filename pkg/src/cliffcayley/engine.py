"""Breadth-first closure of generator sets, Cayley graphs, diameters, subgroup survey.

Elements are stored on the qubits the generators actually touch (``m`` =
largest generator index); on ``n >= m`` qubits an element ``M`` acts as
``M (x) I`` because qubit 1 is the most significant bit, so equality and
phase-equivalence are decided at size ``2**m``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import core, ring
from .core import GateId, GateWord, UnitaryMatrix, parse_gates

log = logging.getLogger(__name__)

EXACT = "exact"
MOD_PHASE = "mod_phase"
DEFAULT_CAP = 10**6


class GroupTooLargeError(RuntimeError):
    """Enumeration exceeded the configured element cap."""


class NotInGroupError(KeyError):
    """Target matrix is not an element of the group."""


def _canonicalise(num, k, phase_mode):
    if phase_mode == MOD_PHASE:
        num, _ = core.phase_canonical_batch(num, k)
    return num, k


@dataclass(eq=False)
class CliffordGroup:
    n: int
    phase_mode: str
    generators: tuple[GateId, ...]
    support: int
    num: np.ndarray  # (N, d, d, 4) int8, canonical numerators
    k: np.ndarray  # (N,) int8
    lookup: dict[bytes, int]
    parent: np.ndarray  # (N,) parent id, -1 for identity
    via: np.ndarray  # (N,) generator index used from parent
    table: np.ndarray  # (G, N) left-multiplication targets
    level: np.ndarray  # (N,) BFS depth
    _words: dict[int, GateWord] = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.k)

    def __len__(self) -> int:
        return self.order

    @property
    def labels(self) -> list[str]:
        return [str(g) for g in self.generators]

    @cached_property
    def elements(self) -> list[bytes]:
        inv = [b""] * self.order
        for enc, i in self.lookup.items():
            inv[i] = enc
        return inv

    def word(self, idx: int) -> GateWord:
        """Shortest word for element ``idx`` (BFS witness, leftmost letter last applied)."""
        if idx in self._words:
            return self._words[idx]
        letters = []
        j = idx
        while self.parent[j] >= 0:
            letters.append(self.generators[self.via[j]])
            j = self.parent[j]
        w = GateWord(letters)
        self._words[idx] = w
        return w

    @property
    def words(self) -> list[GateWord]:
        return [self.word(i) for i in range(self.order)]

    def matrix(self, idx: int, n: int | None = None) -> UnitaryMatrix:
        """Element ``idx`` as a matrix on ``n`` qubits (default: the group's ``n``)."""
        n = self.n if n is None else n
        m = UnitaryMatrix(self.support, self.num[idx].astype(np.int64), int(self.k[idx]), canonical=True)
        return m if n == self.support else embed(m, n)

    def batch(self, ids=None) -> tuple[np.ndarray, np.ndarray]:
        ids = slice(None) if ids is None else ids
        return self.num[ids].astype(np.int64), self.k[ids].astype(np.int64)

    def key_of(self, m: UnitaryMatrix) -> bytes:
        m = restrict(m, self.support)
        num, k = _canonicalise(m.num[None], np.array([m.k]), self.phase_mode)
        return core.encode_batch(num, k)[0]

    def index_of(self, target) -> int:
        if isinstance(target, (int, np.integer)):
            if not 0 <= target < self.order:
                raise NotInGroupError(target)
            return int(target)
        if isinstance(target, (str, GateWord)):
            target = core.word_matrix(target, max(self.support, core.parse_word(str(target)).max_qubit))
        try:
            return self.lookup[self.key_of(target)]
        except (KeyError, ValueError) as exc:
            raise NotInGroupError(f"matrix is not an element of <{', '.join(self.labels)}>") from exc

    def __contains__(self, target) -> bool:
        try:
            self.index_of(target)
        except NotInGroupError:
            return False
        return True

    def multiply_ids(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """IDs of the products ``elem[a[t]] @ elem[b[t]]``."""
        na, ka = self.batch(np.asarray(a))
        nb, kb = self.batch(np.asarray(b))
        num, k = ring.normalize_batch(ring.ring_matmul(na, nb), ka + kb)
        num, k = _canonicalise(num, k, self.phase_mode)
        keys = core.encode_batch(num, k)
        try:
            return np.array([self.lookup[x] for x in keys], dtype=np.int64)
        except KeyError as exc:
            raise AssertionError("group is not closed under multiplication") from exc

    def right_multiply_all(self, s: int) -> np.ndarray:
        """IDs of ``g @ elem[s]`` for every element ``g`` (ID order)."""
        num, k = self.batch()
        sn, sk = self.batch([s])
        prod = ring.ring_matmul(num, sn)
        return self._lookup_batch(prod, k + sk)

    def _lookup_batch(self, num, k) -> np.ndarray:
        num, k = ring.normalize_batch(num, k)
        num, k = _canonicalise(num, k, self.phase_mode)
        out = np.empty(len(k), dtype=np.int64)
        for i, key in enumerate(core.encode_batch(num, k)):
            out[i] = self.lookup[key]
        return out

    def inverse_ids(self) -> np.ndarray:
        num, k = self.batch()
        dag = ring.conj_array(num.transpose(0, 2, 1, 3))
        return self._lookup_batch(dag, k)

    @cached_property
    def inverse(self) -> np.ndarray:
        return self.inverse_ids()

    def left_permutation(self, s: int) -> np.ndarray:
        """``id(elem[s] @ g)`` for every ``g``, composed from Cayley table rows."""
        out = np.arange(self.order)
        for letter in reversed(self.word_indices(s)):
            out = self.table[letter][out]
        return out

    def right_permutation(self, s: int) -> np.ndarray:
        """``id(g @ elem[s])`` for every ``g``, using ``g s = (s^-1 g^-1)^-1``."""
        inv = self.inverse
        return inv[self.left_permutation(int(inv[s]))[inv]]

    def word_indices(self, idx: int) -> list[int]:
        out = []
        j = idx
        while self.parent[j] >= 0:
            out.append(int(self.via[j]))
            j = self.parent[j]
        return out


def restrict(m: UnitaryMatrix, support: int) -> UnitaryMatrix:
    """Inverse of :func:`embed`; raises ValueError when ``m`` is not ``A (x) I``."""
    if m.n == support:
        return m
    if m.n < support:
        return embed(m, support)
    D, R = 2**support, 2 ** (m.n - support)
    t = m.num.reshape(D, R, D, R, 4)
    block = t[:, 0, :, 0]
    ident = np.zeros((R, R, 4), dtype=np.int64)
    ident[np.arange(R), np.arange(R), 0] = 1
    expect = np.einsum("acx,bd->abcdx", block, ident[..., 0])
    if not np.array_equal(t, expect):
        raise ValueError("matrix acts on qubits outside the group's support")
    return UnitaryMatrix(support, block, m.k)


def embed(m: UnitaryMatrix, n: int) -> UnitaryMatrix:
    """``M (x) I`` on ``n`` qubits."""
    if n == m.n:
        return m
    if n < m.n:
        raise ValueError("cannot embed into fewer qubits")
    D, R = 2**m.n, 2 ** (n - m.n)
    out = np.zeros((D, R, D, R, 4), dtype=np.int64)
    for r in range(R):
        out[:, r, :, r] = m.num
    return UnitaryMatrix(n, out.reshape(D * R, D * R, 4), m.k, canonical=True)


def _as_gates(generators) -> list[GateId]:
    if isinstance(generators, str):
        return parse_gates(generators)
    return [g if isinstance(g, GateId) else core._gate_from_token(str(g), 0) for g in generators]


def enumerate_group(generators, n: int | None = None, phase_mode: str = EXACT, *, cap: int = DEFAULT_CAP) -> CliffordGroup:
    """Deterministic BFS closure from the identity by left multiplication.

    Elements get IDs in discovery order: FIFO over parents, generators in the
    given order.  The Cayley edge table is filled as a by-product.
    """
    gens = _as_gates(generators)
    if len(set(gens)) != len(gens):
        raise ValueError("duplicate generators")
    if phase_mode not in (EXACT, MOD_PHASE):
        raise ValueError(f"unknown phase mode {phase_mode!r}")
    support = max([g.max_qubit for g in gens], default=1)
    n = support if n is None else n
    if support > n:
        raise ValueError(f"generators act on qubit {support} > n = {n}")
    G = len(gens)

    num0, k0 = identity_batch_for(support)
    num0, k0 = _canonicalise(num0, k0, phase_mode)
    lookup: dict[bytes, int] = {core.encode_batch(num0, k0)[0]: 0}
    nums = [num0.astype(np.int8)]
    ks = [k0.astype(np.int8)]
    parent = [np.array([-1])]
    via = [np.array([-1])]
    levels = [np.array([0])]
    edges: list[list[np.ndarray]] = [[] for _ in range(G)]
    frontier_ids = np.array([0])
    frontier_num, frontier_k = num0, k0
    depth = 0
    count = 1
    while len(frontier_ids):
        depth += 1
        B = len(frontier_ids)
        keys_by_gen = []
        cands = []
        for g in gens:
            cn, ck = core.apply_gate_rows(frontier_num, frontier_k, g, support)
            cn, ck = _canonicalise(cn, ck, phase_mode)
            keys_by_gen.append(core.encode_batch(cn, ck))
            cands.append((cn, ck))
        targets = np.empty((G, B), dtype=np.int64)
        new_src: list[tuple[int, int]] = []
        for b in range(B):
            for gi in range(G):
                key = keys_by_gen[gi][b]
                tid = lookup.get(key)
                if tid is None:
                    tid = count
                    lookup[key] = tid
                    count += 1
                    new_src.append((gi, b))
                    if count > cap:
                        raise GroupTooLargeError(f"group exceeds {cap} elements")
                targets[gi, b] = tid
        for gi in range(G):
            edges[gi].append(targets[gi])
        if not new_src:
            break
        gi_arr = np.array([s[0] for s in new_src])
        b_arr = np.array([s[1] for s in new_src])
        stacked_n = np.stack([c[0] for c in cands])  # (G, B, d, d, 4)
        stacked_k = np.stack([c[1] for c in cands])
        frontier_num = stacked_n[gi_arr, b_arr]
        frontier_k = stacked_k[gi_arr, b_arr]
        new_ids = np.arange(count - len(new_src), count)
        nums.append(frontier_num.astype(np.int8))
        ks.append(frontier_k.astype(np.int8))
        parent.append(frontier_ids[b_arr])
        via.append(gi_arr)
        levels.append(np.full(len(new_src), depth))
        frontier_ids = new_ids
    order = count
    table = np.empty((G, order), dtype=np.int64)
    if G:
        # frontier batches were processed in increasing ID order
        for gi in range(G):
            table[gi] = np.concatenate(edges[gi])
    group = CliffordGroup(
        n=n,
        phase_mode=phase_mode,
        generators=tuple(gens),
        support=support,
        num=np.concatenate(nums),
        k=np.concatenate(ks),
        lookup=lookup,
        parent=np.concatenate(parent),
        via=np.concatenate(via),
        table=table,
        level=np.concatenate(levels),
    )
    log.debug("enumerated <%s> (%s): %d elements", ",".join(group.labels), phase_mode, order)
    return group


def identity_batch_for(m: int):
    return core.identity_batch(m)


@dataclass(eq=False)
class CayleyGraph:
    """Left-multiplication Cayley graph: edge ``v --g--> generator_g @ element_v``."""

    group: CliffordGroup
    table: np.ndarray  # (G, N)

    @property
    def num_vertices(self) -> int:
        return self.table.shape[1]

    @property
    def labels(self) -> list[str]:
        return self.group.labels

    def to_labeled(self):
        from .graphs import LabeledGraph

        return LabeledGraph.from_table(
            self.table,
            self.labels,
            phase_mode=self.group.phase_mode,
            generators=self.labels,
            vertex_words=[str(w) for w in self.group.words],
        )


def build_cayley(group: CliffordGroup) -> CayleyGraph:
    return CayleyGraph(group, group.table)


def diameter(graph, *, sources: str = "all", threads: int = 1) -> int:
    """Largest directed distance following generator edges (no inverses).

    ``sources="all"`` runs a BFS from every vertex.  ``sources="identity"``
    uses only vertex 0, which suffices for Cayley graphs: right multiplication
    by any element is a label-preserving automorphism, so all eccentricities
    coincide.
    """
    from .graphs import max_eccentricity

    table = graph.table if hasattr(graph, "table") else graph.table_array()
    if sources == "identity":
        return max_eccentricity(table, sources=np.array([0]))
    if sources != "all":
        raise ValueError(f"unknown source mode {sources!r}")
    return max_eccentricity(table, threads=threads)


def shortest_word(group: CliffordGroup, target) -> GateWord:
    """Minimum-length word over the group's generators equal to ``target``."""
    return group.word(group.index_of(target))


def _keys_at(g: CliffordGroup, s: int) -> set[bytes]:
    if g.support == s:
        return set(g.lookup)
    out = set()
    for i in range(g.order):
        m = embed(g.matrix(i, g.support), s)
        num, k = _canonicalise(m.num[None], np.array([m.k]), g.phase_mode)
        out.add(core.encode_batch(num, k)[0])
    return out


def same_element_set(a: CliffordGroup, b: CliffordGroup) -> bool:
    """Whether two groups (same n and phase mode) contain the same matrices."""
    if a.phase_mode != b.phase_mode:
        raise ValueError("phase modes differ")
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    if a.order != b.order:
        return False
    s = max(a.support, b.support)
    return _keys_at(a, s) == _keys_at(b, s)


# ---------------------------------------------------------------------------
# reference subgroup survey on two qubits

# (generators, order, diameter, factor or None, mod-phase diameter or None, marks)
SURVEY: tuple[tuple[str, int, int, int | None, int | None, str], ...] = (
    ("H1", 2, 1, None, None, "dagger"),
    ("C12", 2, 1, None, None, "dagger"),
    ("P1", 4, 3, None, None, ""),
    ("H1,H2", 4, 2, None, None, ""),
    ("C12,C21", 6, 3, None, None, ""),
    ("H1,P2", 8, 4, None, None, "dagger"),
    ("P1,C12", 8, 4, None, None, "dagger"),
    ("P1,P2", 16, 6, None, None, ""),
    ("H1,C21", 16, 8, None, None, "dagger"),
    ("H1,C12", 16, 8, None, None, "dagger"),
    ("H1,P2,C21", 32, 6, None, None, ""),
    ("P2,C12", 32, 8, None, None, ""),
    ("P1,P2,C21", 64, 7, None, None, ""),
    ("P1,C21,C12", 192, 11, None, None, ""),
    ("H1,P1", 192, 16, 8, 6, ""),
    ("H1,H2,P1", 384, 17, 8, 7, ""),
    ("P1,P2,H1", 768, 19, 8, 9, ""),
    ("H1,C21,C12", 2304, 26, 2, 15, "asterisk"),
    ("H1,H2,C12", 2304, 27, 2, 17, "asterisk"),
    ("H1,H2,C12,C21", 2304, 25, 2, 15, "asterisk"),
    ("H1,P1,C21", 3072, 19, 8, 9, "asterisk"),
    ("H1,P1,C12", 3072, 19, 8, 11, ""),
    ("H1,P1,P2,C21", 3072, 19, 8, 9, "asterisk"),
    ("H1,H2,P1,P2", 4608, 17, 8, 12, ""),
    ("H1,P2,C12", 9216, 24, 8, 13, ""),
    ("H1,H2,P1,C21", 92160, 21, 8, 13, "asterisk"),
    ("H1,H2,P1,C12", 92160, 21, 8, 16, "asterisk"),
    ("H1,P1,P2,C12", 92160, 21, 8, 14, "asterisk"),
    ("H1,H2,P1,P2,C12,C21", 92160, 19, 8, 11, "asterisk"),
)


@dataclass(frozen=True)
class TableRow:
    generators: str
    order: int
    diameter: int
    factor: int | None
    mod_phase_diameter: int | None

    def cells(self) -> list[str]:
        dash = "-"
        return [
            "{" + ",".join(self.generators.split(",")) + "}",
            str(self.order),
            str(self.diameter),
            dash if self.factor is None else str(self.factor),
            dash if self.mod_phase_diameter is None else str(self.mod_phase_diameter),
        ]


def table_row(gens: str, *, n: int = 2, sources: str = "identity", threads: int = 1, cap: int = DEFAULT_CAP) -> TableRow:
    exact = enumerate_group(gens, n, EXACT, cap=cap)
    mod = enumerate_group(gens, n, MOD_PHASE, cap=cap)
    factor = exact.order // mod.order
    d = diameter(build_cayley(exact), sources=sources, threads=threads)
    if factor > 1:
        return TableRow(gens, exact.order, d, factor, diameter(build_cayley(mod), sources=sources, threads=threads))
    return TableRow(gens, exact.order, d, None, None)


def subgroup_table(n: int = 2, *, sources: str = "identity", threads: int = 1, rows=None) -> list[TableRow]:
    """Recompute every survey row, in catalogue order."""
    chosen = SURVEY if rows is None else [r for r in SURVEY if r[0] in rows]
    return [table_row(r[0], n=n, sources=sources, threads=threads) for r in chosen]
