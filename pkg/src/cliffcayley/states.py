"""Preset states, stabilizer subgroups, coset quotients and a direct state-orbit oracle."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import core, ring
from .core import StateVector
from .engine import EXACT, MOD_PHASE, CliffordGroup, GroupTooLargeError, _as_gates
from .graphs import LabeledGraph

CHUNK = 4096


# ---------------------------------------------------------------------------
# presets


def ghz(n: int) -> StateVector:
    num = np.zeros((2**n, 4), dtype=np.int64)
    num[0, 0] = num[-1, 0] = 1
    return StateVector(n, num, canonical=True)


def dicke(n: int, k: int) -> StateVector:
    if not 0 <= k <= n:
        raise ValueError(f"Dicke weight {k} outside 0..{n}")
    num = np.zeros((2**n, 4), dtype=np.int64)
    for ones in combinations(range(n), k):
        # qubit 1 is the most significant bit
        num[sum(1 << (n - 1 - q) for q in ones), 0] = 1
    return StateVector(n, num, canonical=True)


def w_state(n: int) -> StateVector:
    return dicke(n, 1)


_APPLY = re.compile(r"^\s*apply\s+(?P<word>.+?)\s+to\s+(?P<rest>.+)$", re.IGNORECASE)


def preset_state(spec: str) -> StateVector:
    """Build a state from text: ``zeros n``, ``ghz n``, ``w n``, ``dicke n k``,
    a literal such as ``|i1+>``, or ``apply <word> to <spec>``."""
    spec = spec.strip()
    m = _APPLY.match(spec)
    if m:
        v = preset_state(m.group("rest"))
        return core.apply_word(m.group("word"), v)
    if spec.startswith("|"):
        return core.parse_state_literal(spec)
    parts = spec.split()
    if not parts:
        raise ValueError("empty state spec")
    name, args = parts[0].lower(), parts[1:]
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise ValueError(f"malformed state spec {spec!r}") from None
    if any(x < 0 for x in nums):
        raise ValueError(f"malformed state spec {spec!r}")
    if name == "zeros" and len(nums) == 1 and nums[0] >= 1:
        return StateVector.basis(nums[0], 0)
    if name == "ghz" and len(nums) == 1 and nums[0] >= 1:
        return ghz(nums[0])
    if name == "w" and len(nums) == 1 and nums[0] >= 1:
        return w_state(nums[0])
    if name == "dicke" and len(nums) == 2 and nums[0] >= 1:
        return dicke(nums[0], nums[1])
    raise ValueError(f"malformed state spec {spec!r}")


def random_state(n: int, rng: np.random.Generator, bound: int = 2) -> StateVector:
    """Small random integer amplitudes in every coefficient slot."""
    while True:
        num = rng.integers(-bound, bound + 1, size=(2**n, 4))
        if num.any():
            return StateVector(n, num)


def stabilizer_state_count(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return 2**n * math.prod(2 ** (n - k) + 1 for k in range(n))


def describe_state(v: StateVector) -> str:
    """Readable ket sum of the nonzero amplitudes, e.g. ``(1,0,0,0)/s2^0|00>``."""
    terms = []
    for idx, row in enumerate(v.num):
        if row.any():
            a = ring.Cyclo8Scalar.make(tuple(int(x) for x in row), v.k)
            terms.append(f"{a}|{idx:0{v.n}b}>")
    return " + ".join(terms)


# ---------------------------------------------------------------------------
# stabilizers


def _normalized(v: StateVector):
    num, k = ring.normalize_batch(v.num[None], np.array([v.k]))
    return num[0], int(k[0])


def image_states(group: CliffordGroup, v: StateVector, ids=None) -> tuple[np.ndarray, np.ndarray]:
    """Numerators ``(B, 2**n, 4)`` and exponents of ``elem[id] @ v`` for ``ids`` (default all)."""
    if v.n < group.support:
        raise ValueError(f"dimension mismatch: group acts on {group.support} qubits, state has {v.n}")
    ids = np.arange(group.order) if ids is None else np.asarray(ids)
    cols = core.embed_rows(v.num, group.support, v.n)  # (d, R, 4)
    outs, ks = [], []
    for i in range(0, len(ids), CHUNK):
        num, k = group.batch(ids[i : i + CHUNK])
        prod = ring.ring_matmul(num, cols[None])
        pn, pk = ring.normalize_batch(prod.reshape(len(k), 2**v.n, 4), k + v.k)
        outs.append(pn)
        ks.append(pk)
    if not outs:
        return np.zeros((0, 2**v.n, 4), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(outs), np.concatenate(ks)


def state_keys(num: np.ndarray, k: np.ndarray, phase_mode: str) -> list[bytes]:
    if phase_mode == MOD_PHASE:
        num, _ = core.phase_canonical_batch(num, k)
    return core.encode_batch(num, k)


@dataclass
class StabilizerSubgroup:
    group: CliffordGroup
    members: np.ndarray  # sorted element IDs
    state: StateVector
    mode: str

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return self.order

    def words(self) -> list[core.GateWord]:
        return [self.group.word(int(i)) for i in self.members]

    def contains(self, idx: int) -> bool:
        return bool(np.isin(idx, self.members))


def stabilizer_subgroup(group: CliffordGroup, v: StateVector, mode: str | None = None) -> StabilizerSubgroup:
    """Elements fixing ``v``: exactly, or up to a power of w in mod_phase mode.

    ``mode`` defaults to the group's phase mode.  A mod_phase group can only
    be asked for mod_phase stabilizers, since its elements carry no phase.
    """
    mode = group.phase_mode if mode is None else mode
    if mode not in (EXACT, MOD_PHASE):
        raise ValueError(f"unknown stabilizer mode {mode!r}")
    if group.phase_mode == MOD_PHASE and mode == EXACT:
        raise ValueError("exact stabilizers need an exact-mode group")
    if v.n != group.n and v.n < group.support:
        raise ValueError(f"dimension mismatch: group on {group.support} qubits, state on {v.n}")
    num, k = image_states(group, v)
    vn, vk = _normalized(v)
    if mode == MOD_PHASE:
        num, _ = core.phase_canonical_batch(num, k)
        vn, _ = core.phase_canonical_batch(vn[None], np.array([vk]))
        vn = vn[0]
    hit = (k == vk) & (num == vn[None]).all(axis=(1, 2))
    return StabilizerSubgroup(group, np.nonzero(hit)[0], v, mode)


# ---------------------------------------------------------------------------
# quotient by a stabilizer


@dataclass(eq=False)
class ReachabilityGraph:
    """Left cosets ``g Stab`` as vertices; edge ``[g] --s--> [s g]``."""

    group: CliffordGroup
    stabilizer: StabilizerSubgroup
    reps: np.ndarray  # (V,) least member ID of each coset, increasing
    coset_of: np.ndarray  # (N,) vertex index of every element
    table: np.ndarray  # (G, V)
    state_num: np.ndarray  # (V, 2**n, 4) canonical rep @ v
    state_k: np.ndarray

    @property
    def num_vertices(self) -> int:
        return len(self.reps)

    @property
    def labels(self) -> list[str]:
        return self.group.labels

    def state(self, vertex: int) -> StateVector:
        n = self.stabilizer.state.n
        return StateVector(n, self.state_num[vertex], int(self.state_k[vertex]), canonical=True)

    def state_keys(self) -> list[bytes]:
        return core.encode_batch(self.state_num, self.state_k)

    def to_labeled(self) -> LabeledGraph:
        return LabeledGraph.from_table(
            self.table,
            self.labels,
            phase_mode=self.group.phase_mode,
            generators=self.labels,
            vertex_words=[str(self.group.word(int(r))) for r in self.reps],
            vertex_states=[describe_state(self.state(i)) for i in range(self.num_vertices)],
        )


def quotient_graph(group: CliffordGroup, v: StateVector, stabilizer: StabilizerSubgroup | None = None) -> ReachabilityGraph:
    """Quotient of the Cayley graph of ``group`` by ``Stab(v)``.

    The stabilizer is taken in the group's phase mode.  Cosets are computed
    from group products alone: ``rep(g) = min over s in Stab of id(g s)``,
    with right multiplication read off the Cayley table.
    """
    stab = stabilizer_subgroup(group, v) if stabilizer is None else stabilizer
    N = group.order
    rep = np.arange(N)
    for s in stab.members.tolist():
        if s == 0:
            continue
        rep = np.minimum(rep, group.right_permutation(s))
    reps = np.unique(rep)
    index = np.full(N, -1, dtype=np.int64)
    index[reps] = np.arange(len(reps))
    coset_of = index[rep]
    table = coset_of[group.table[:, reps]] if group.table.size else np.zeros((0, len(reps)), dtype=np.int64)
    num, k = image_states(group, v, reps)
    if group.phase_mode == MOD_PHASE:
        num, _ = core.phase_canonical_batch(num, k)
    return ReachabilityGraph(group, stab, reps, coset_of, table, num, k)


# ---------------------------------------------------------------------------
# direct orbit BFS, independent of group enumeration


@dataclass(eq=False)
class OrbitGraph:
    generators: tuple
    phase_mode: str
    state_num: np.ndarray  # (V, 2**n, 4)
    state_k: np.ndarray
    keys: list[bytes]
    table: np.ndarray  # (G, V)

    @property
    def num_vertices(self) -> int:
        return len(self.keys)

    @property
    def labels(self) -> list[str]:
        return [str(g) for g in self.generators]

    def to_labeled(self) -> LabeledGraph:
        n = self.state_num.shape[1].bit_length() - 1
        return LabeledGraph.from_table(
            self.table,
            self.labels,
            phase_mode=self.phase_mode,
            generators=self.labels,
            vertex_states=[
                describe_state(StateVector(n, self.state_num[i], int(self.state_k[i]), canonical=True))
                for i in range(self.num_vertices)
            ],
        )


def orbit_states(generators, v: StateVector, phase_mode: str = MOD_PHASE, *, cap: int = 10**6) -> OrbitGraph:
    """FIFO BFS over states reached from ``v``; states are deduplicated by
    their canonical (phase-canonical in mod_phase mode) encoding."""
    gens = _as_gates(generators)
    if any(g.max_qubit > v.n for g in gens):
        raise ValueError("generator acts outside the state's qubits")
    vn, vk = _normalized(v)
    num0, k0 = vn[None, :, None, :], np.array([vk])
    if phase_mode == MOD_PHASE:
        c, _ = core.phase_canonical_batch(num0, k0)
        num0 = c
    keys = core.encode_batch(num0, k0)
    lookup = {keys[0]: 0}
    nums, ks = [num0[:, :, 0]], [k0]
    edges = [[] for _ in gens]
    fn, fk = num0, k0
    while len(fk):
        B = len(fk)
        outs = []
        for g in gens:
            cn, ck = core.apply_gate_rows(fn, fk, g, v.n)
            if phase_mode == MOD_PHASE:
                cn, _ = core.phase_canonical_batch(cn, ck)
            outs.append((cn, ck, core.encode_batch(cn, ck)))
        targets = np.empty((len(gens), B), dtype=np.int64)
        fresh = []
        for b in range(B):
            for gi in range(len(gens)):
                key = outs[gi][2][b]
                tid = lookup.get(key)
                if tid is None:
                    tid = len(keys)
                    lookup[key] = tid
                    keys.append(key)
                    fresh.append((gi, b))
                    if len(keys) > cap:
                        raise GroupTooLargeError(f"orbit exceeds {cap} states")
                targets[gi, b] = tid
        for gi in range(len(gens)):
            edges[gi].append(targets[gi])
        if not fresh:
            break
        fn = np.stack([outs[gi][0][b] for gi, b in fresh])
        fk = np.array([outs[gi][1][b] for gi, b in fresh])
        nums.append(fn[:, :, 0])
        ks.append(fk)
    table = np.stack([np.concatenate(e) for e in edges]) if gens else np.zeros((0, len(keys)), dtype=np.int64)
    return OrbitGraph(tuple(gens), phase_mode, np.concatenate(nums), np.concatenate(ks), keys, table)


def oracle_correspondence(q: ReachabilityGraph, orbit: OrbitGraph) -> np.ndarray | None:
    """Map quotient vertices to orbit vertices via ``g Stab -> canonical(g v)``.

    Returns the bijection when every labeled edge agrees, else None.
    """
    if q.num_vertices != orbit.num_vertices or q.labels != orbit.labels:
        return None
    where = {key: i for i, key in enumerate(orbit.keys)}
    try:
        phi = np.array([where[key] for key in q.state_keys()], dtype=np.int64)
    except KeyError:
        return None
    if len(np.unique(phi)) != len(phi):
        return None
    if not np.array_equal(phi[q.table], orbit.table[:, phi]):
        return None
    return phi


def find_generic_state(group: CliffordGroup, n: int, seed: int = 0, *, attempts: int = 1000) -> tuple[StateVector, int]:
    """First seed ``>= seed`` whose random state has a trivial stabilizer in ``group``."""
    for s in range(seed, seed + attempts):
        v = random_state(n, np.random.default_rng(s))
        if stabilizer_subgroup(group, v).order == 1:
            return v, s
    raise RuntimeError(f"no generic state found in {attempts} seeds")
