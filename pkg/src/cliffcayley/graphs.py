"""Labeled directed multigraphs: BFS distances, components, contraction, fingerprints, isomorphism, export."""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


@dataclass(eq=False)
class LabeledGraph:
    num_vertices: int
    edges: np.ndarray  # (E, 3) rows (source, label index, target), lexicographically sorted
    labels: list[str]
    phase_mode: str = ""
    generators: list[str] = field(default_factory=list)
    vertex_words: list[str] = field(default_factory=list)
    vertex_states: list[str] | None = None
    loops_removed: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 3)
        if len(e):
            if e[:, [0, 2]].min() < 0 or e[:, [0, 2]].max() >= self.num_vertices:
                raise ValueError("edge endpoint out of range")
            if e[:, 1].min() < 0 or e[:, 1].max() >= len(self.labels):
                raise ValueError("edge label out of range")
            e = e[np.lexsort((e[:, 2], e[:, 1], e[:, 0]))]
            key = e[:, 0] * len(self.labels) + e[:, 1]
            if len(np.unique(key)) != len(key):
                raise ValueError("duplicate (source, label) pair: edges must be functional")
        self.edges = e

    @classmethod
    def from_table(cls, table: np.ndarray, labels, **meta) -> LabeledGraph:
        """From a ``(L, V)`` target table; entries < 0 mean no edge."""
        table = np.asarray(table)
        L, V = table.shape
        lab, src = np.nonzero(table >= 0)
        edges = np.stack([src, lab, table[lab, src]], axis=1) if len(src) else np.empty((0, 3), dtype=np.int64)
        return cls(V, edges, list(labels), **meta)

    def table_array(self) -> np.ndarray:
        t = np.full((len(self.labels), self.num_vertices), -1, dtype=np.int64)
        if len(self.edges):
            t[self.edges[:, 1], self.edges[:, 0]] = self.edges[:, 2]
        return t

    @property
    def table(self) -> np.ndarray:
        return self.table_array()

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def label_index(self, name: str) -> int:
        try:
            return self.labels.index(name)
        except ValueError:
            raise KeyError(f"unknown label {name!r}; have {self.labels}") from None

    def relabeled(self, perm: np.ndarray) -> LabeledGraph:
        """Copy with vertex ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm)
        e = self.edges.copy()
        e[:, 0] = perm[e[:, 0]]
        e[:, 2] = perm[e[:, 2]]
        return LabeledGraph(self.num_vertices, e, list(self.labels))

    def same_as(self, other: LabeledGraph) -> bool:
        return (
            self.num_vertices == other.num_vertices
            and self.labels == other.labels
            and np.array_equal(self.edges, other.edges)
        )


# ---------------------------------------------------------------------------
# BFS machinery: sources packed 64 per uint64 word


def _pull_plan(table: np.ndarray):
    """Per label: ('gather', inv) if the label is a permutation, else ('scatter', src, dst)."""
    plans = []
    V = table.shape[1]
    for row in table:
        ok = row >= 0
        if ok.all() and np.bincount(row, minlength=V).max() == 1:
            inv = np.empty(V, dtype=np.int64)
            inv[row] = np.arange(V)
            plans.append(("gather", inv))
        else:
            src = np.nonzero(ok)[0]
            plans.append(("scatter", src, row[src]))
    return plans


def _bfs_batch(plans, V: int, sources: np.ndarray):
    """Run BFS from ``sources`` simultaneously; returns (levels until done, all reached?)."""
    W = (len(sources) + 63) // 64
    reached = np.zeros((V, W), dtype=np.uint64)
    bits = np.arange(len(sources))
    np.bitwise_or.at(reached, (sources, bits // 64), np.left_shift(np.uint64(1), (bits % 64).astype(np.uint64)))
    frontier = reached.copy()
    level = 0
    while True:
        nxt = np.zeros_like(frontier)
        for plan in plans:
            if plan[0] == "gather":
                nxt |= frontier[plan[1]]
            else:
                np.bitwise_or.at(nxt, plan[2], frontier[plan[1]])
        nxt &= ~reached
        if not nxt.any():
            break
        reached |= nxt
        frontier = nxt
        level += 1
    full = np.full(W, np.iinfo(np.uint64).max, dtype=np.uint64)
    rem = len(sources) % 64
    if rem:
        full[-1] = np.uint64((1 << rem) - 1)
    return level, bool((reached == full).all())


def max_eccentricity(table: np.ndarray, sources: np.ndarray | None = None, *, threads: int = 1, batch_words: int | None = None) -> int:
    """Max over ``sources`` (default: all) of the directed BFS eccentricity.

    Raises ValueError when some source does not reach every vertex.
    """
    table = np.asarray(table)
    V = table.shape[1]
    if sources is None:
        sources = np.arange(V)
    plans = _pull_plan(table)
    if batch_words is None:
        batch_words = max(1, min(64, (1 << 21) // max(V, 1)))
    width = 64 * batch_words
    chunks = [sources[i : i + width] for i in range(0, len(sources), width)]

    def run(chunk):
        return _bfs_batch(plans, V, chunk)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    if not all(ok for _, ok in results):
        raise ValueError("graph is not strongly connected from every source")
    return max(lvl for lvl, _ in results)


def graph_diameter(g: LabeledGraph, *, threads: int = 1) -> int:
    return max_eccentricity(g.table_array(), threads=threads)


# ---------------------------------------------------------------------------
# components and contraction


@dataclass
class Components:
    component_of: np.ndarray  # numbered by least member ID
    sizes: list[int]

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.component_of == c)[0]


def _label_ids(g: LabeledGraph, labels) -> list[int]:
    return [lab if isinstance(lab, (int, np.integer)) else g.label_index(lab) for lab in labels]


def components_by_labels(g: LabeledGraph, labels) -> Components:
    """Weakly connected components of the subgraph restricted to ``labels``."""
    ids = _label_ids(g, labels)
    e = g.edges[np.isin(g.edges[:, 1], ids)] if len(g.edges) else g.edges
    V = g.num_vertices
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 2])), shape=(V, V))
    _, raw = connected_components(adj, directed=True, connection="weak")
    # renumber by least member ID
    first = {}
    for v, c in enumerate(raw.tolist()):
        if c not in first:
            first[c] = len(first)
    comp = np.array([first[c] for c in raw.tolist()], dtype=np.int64)
    sizes = np.bincount(comp, minlength=len(first)).tolist()
    return Components(comp, sizes)


@dataclass
class ContractionGraph:
    sizes: list[int]
    super_edges: dict[tuple[int, int], int]  # unordered pair -> overlay edge count
    self_links: list[int]  # overlay edges inside each component
    core_edges: int
    components: Components

    @property
    def num_super_vertices(self) -> int:
        return len(self.sizes)

    def is_complete(self) -> bool:
        m = self.num_super_vertices
        return all((a, b) in self.super_edges for a in range(m) for b in range(a + 1, m))


def overlay_contraction(g: LabeledGraph, core_labels, overlay_labels) -> ContractionGraph:
    core = _label_ids(g, core_labels)
    overlay = _label_ids(g, overlay_labels)
    if set(core) & set(overlay):
        raise ValueError("core and overlay labels overlap")
    comps = components_by_labels(g, core)
    supers: Counter = Counter()
    selfs = [0] * comps.count
    e = g.edges
    for s, lab, t in e[np.isin(e[:, 1], overlay)].tolist() if len(e) else []:
        a, b = int(comps.component_of[s]), int(comps.component_of[t])
        if a == b:
            selfs[a] += 1
        else:
            supers[(min(a, b), max(a, b))] += 1
    core_edges = int(np.isin(e[:, 1], core).sum()) if len(e) else 0
    return ContractionGraph(comps.sizes, dict(sorted(supers.items())), selfs, core_edges, comps)


def strip_trivial_loops(g: LabeledGraph) -> LabeledGraph:
    e = g.edges
    loop = e[:, 0] == e[:, 2] if len(e) else np.zeros(0, dtype=bool)
    removed = Counter(g.labels[i] for i in e[loop, 1].tolist())
    out = LabeledGraph(
        g.num_vertices,
        e[~loop],
        list(g.labels),
        phase_mode=g.phase_mode,
        generators=list(g.generators),
        vertex_words=list(g.vertex_words),
        vertex_states=None if g.vertex_states is None else list(g.vertex_states),
    )
    out.loops_removed = {lab: removed.get(lab, 0) for lab in g.labels}
    return out


# ---------------------------------------------------------------------------
# fingerprints

ALL_PAIRS_LIMIT = 5000
SAMPLE_SOURCES = 32


@dataclass(frozen=True)
class Fingerprint:
    num_vertices: int
    num_labels: int
    # one record per label, sorted so the fingerprint ignores label order:
    # (out-degree multiset, in-degree multiset, self loops, directed 3-cycles)
    label_records: tuple
    distance_profile: tuple  # sorted multiset of per-source distance histograms
    sampled: bool

    def as_json(self) -> str:
        return json.dumps(
            {
                "num_vertices": self.num_vertices,
                "num_labels": self.num_labels,
                "label_records": self.label_records,
                "distance_profile": self.distance_profile,
                "sampled": self.sampled,
            },
            separators=(",", ":"),
        )

    def digest(self) -> str:
        return hashlib.sha256(self.as_json().encode()).hexdigest()

    def differences(self, other: Fingerprint) -> list[str]:
        return [
            name
            for name in ("num_vertices", "num_labels", "label_records", "distance_profile")
            if getattr(self, name) != getattr(other, name)
        ]


def _label_record(g: LabeledGraph, lab: int) -> tuple:
    V = g.num_vertices
    e = g.edges[g.edges[:, 1] == lab]
    outdeg = np.bincount(e[:, 0], minlength=V)
    indeg = np.bincount(e[:, 2], minlength=V)
    loops = int((e[:, 0] == e[:, 2]).sum())
    f = np.full(V, -1, dtype=np.int64)
    f[e[:, 0]] = e[:, 2]

    def step(x):
        y = np.full_like(x, -1)
        ok = x >= 0
        y[ok] = f[x[ok]]
        return y

    v = np.arange(V)
    f1 = step(v)
    f3 = step(step(f1))
    tri = int(((f3 == v) & (f1 != v)).sum()) // 3
    hist = lambda d: tuple(sorted(Counter(d.tolist()).items()))  # noqa: E731
    return (hist(outdeg), hist(indeg), loops, tri)


def _distance_profile(g: LabeledGraph) -> tuple[tuple, bool]:
    V = g.num_vertices
    e = g.edges
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 2])), shape=(V, V)).tocsr()
    sampled = V > ALL_PAIRS_LIMIT
    if sampled:
        step = max(V // SAMPLE_SOURCES, 1)
        sources = np.arange(0, step * SAMPLE_SOURCES, step)[:SAMPLE_SOURCES]
    else:
        sources = np.arange(V)
    hists = []
    for i in range(0, len(sources), 256):
        d = shortest_path(adj, directed=False, unweighted=True, indices=sources[i : i + 256])
        d = np.where(np.isinf(d), -1, d).astype(np.int64)
        for row in d:
            hists.append(tuple(sorted(Counter(row.tolist()).items())))
    return tuple(sorted(hists)), sampled


def fingerprint(g: LabeledGraph) -> Fingerprint:
    records = tuple(sorted(_label_record(g, lab) for lab in range(len(g.labels))))
    profile, sampled = _distance_profile(g)
    return Fingerprint(g.num_vertices, len(g.labels), records, profile, sampled)


# ---------------------------------------------------------------------------
# isomorphism


ISOMORPHIC = "isomorphic"
NOT_ISOMORPHIC = "not_isomorphic"
INCONCLUSIVE = "inconclusive"


@dataclass
class IsoResult:
    status: str
    mapping: np.ndarray | None = None
    label_map: tuple[int, ...] | None = None
    nodes: int = 0
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == ISOMORPHIC


def verify_isomorphism(g1: LabeledGraph, g2: LabeledGraph, mapping, label_map) -> bool:
    """Edge-by-edge check that ``mapping`` carries ``g1`` onto ``g2``."""
    mapping = np.asarray(mapping)
    if g1.num_vertices != g2.num_vertices or len(np.unique(mapping)) != g1.num_vertices:
        return False
    if len(g1.edges) != len(g2.edges):
        return False
    lm = np.asarray(label_map)
    e = g1.edges
    img = np.stack([mapping[e[:, 0]], lm[e[:, 1]], mapping[e[:, 2]]], axis=1) if len(e) else e
    img = img[np.lexsort((img[:, 2], img[:, 1], img[:, 0]))] if len(img) else img
    return bool(np.array_equal(img, g2.edges))


def _adjacency(g: LabeledGraph):
    out = defaultdict(list)
    inn = defaultdict(list)
    for s, lab, t in g.edges.tolist():
        out[s].append((lab, t))
        inn[t].append((lab, s))
    return out, inn


def _vertex_invariants(g: LabeledGraph, out, inn, label_rank):
    inv = []
    for v in range(g.num_vertices):
        o = tuple(sorted((label_rank[lab], t == v) for lab, t in out[v]))
        i = tuple(sorted(label_rank[lab] for lab, _ in inn[v]))
        inv.append((o, i))
    return inv


def _search(g1, g2, label_map, budget):
    """Backtracking over vertex assignments; returns (mapping | None, nodes, exhausted?)."""
    V = g1.num_vertices
    out1, in1 = _adjacency(g1)
    out2, in2 = _adjacency(g2)
    rank1 = {a: label_map[a] for a in range(len(g1.labels))}
    rank2 = {b: b for b in range(len(g2.labels))}
    inv1 = _vertex_invariants(g1, out1, in1, rank1)
    inv2 = _vertex_invariants(g2, out2, in2, rank2)
    by_inv = defaultdict(list)
    for w in range(V):
        by_inv[inv2[w]].append(w)

    # vertex order: undirected BFS, restarting at the least unvisited vertex
    order, parent_edge, seen = [], {}, np.zeros(V, dtype=bool)
    for root in range(V):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        parent_edge[root] = None
        while queue:
            u = queue.pop(0)
            order.append(u)
            for lab, t in out1[u]:
                if not seen[t]:
                    seen[t] = True
                    parent_edge[t] = ("out", u, lab)
                    queue.append(t)
            for lab, s in in1[u]:
                if not seen[s]:
                    seen[s] = True
                    parent_edge[s] = ("in", u, lab)
                    queue.append(s)

    phi = np.full(V, -1, dtype=np.int64)
    used = np.zeros(V, dtype=bool)

    def candidates(u):
        pe = parent_edge[u]
        if pe is None:
            return [w for w in by_inv[inv1[u]] if not used[w]]
        kind, p, lab = pe
        wp = phi[p]
        b = label_map[lab]
        if kind == "out":  # p --lab--> u
            return [t for bl, t in out2[wp] if bl == b and not used[t]]
        return [s for bl, s in in2[wp] if bl == b and not used[s]]

    def consistent(u, w):
        if inv1[u] != inv2[w]:
            return False
        # every edge between u and mapped vertices must exist at w, and vice versa
        mine = Counter()
        for lab, t in out1[u]:
            if t == u or phi[t] >= 0:
                mine[("o", label_map[lab], w if t == u else int(phi[t]))] += 1
        for lab, s in in1[u]:
            if s != u and phi[s] >= 0:
                mine[("i", label_map[lab], int(phi[s]))] += 1
        theirs = Counter()
        for b, t in out2[w]:
            if t == w or used[t]:
                theirs[("o", b, t)] += 1
        for b, s in in2[w]:
            if s != w and used[s]:
                theirs[("i", b, s)] += 1
        return mine == theirs

    nodes = 0
    stack = [(0, iter(candidates(order[0])) if V else iter(()))]
    if V == 0:
        return phi, 0, False
    while stack:
        depth, it = stack[-1]
        u = order[depth]
        if phi[u] >= 0:
            used[phi[u]] = False
            phi[u] = -1
        advanced = False
        for w in it:
            nodes += 1
            if nodes > budget:
                return None, nodes, True
            if consistent(u, w):
                phi[u] = w
                used[w] = True
                advanced = True
                break
        if not advanced:
            stack.pop()
            continue
        if depth + 1 == V:
            return phi.copy(), nodes, False
        stack.append((depth + 1, iter(candidates(order[depth + 1]))))
    return None, nodes, False


def iso_test(g1: LabeledGraph, g2: LabeledGraph, budget: int = 10**6) -> IsoResult:
    """Label-preserving isomorphism up to a bijection of label names.

    Fingerprint mismatch certifies non-isomorphism.  Otherwise every label
    bijection consistent with the per-label invariants is tried with a
    backtracking vertex search bounded by ``budget`` assignment attempts.
    """
    f1, f2 = fingerprint(g1), fingerprint(g2)
    if f1 != f2:
        return IsoResult(NOT_ISOMORPHIC, reason="fingerprint mismatch: " + ", ".join(f1.differences(f2)))
    rec1 = [_label_record(g1, a) for a in range(len(g1.labels))]
    rec2 = [_label_record(g2, b) for b in range(len(g2.labels))]
    total = 0
    exhausted = False
    for perm in itertools.permutations(range(len(g2.labels))):
        if any(rec1[a] != rec2[perm[a]] for a in range(len(perm))):
            continue
        mapping, nodes, ran_out = _search(g1, g2, perm, budget - total)
        total += nodes
        if mapping is not None:
            if not verify_isomorphism(g1, g2, mapping, perm):
                raise AssertionError("isomorphism search produced an invalid mapping")
            return IsoResult(ISOMORPHIC, mapping, tuple(perm), total)
        if ran_out:
            exhausted = True
            break
    if exhausted:
        return IsoResult(INCONCLUSIVE, nodes=total, reason="search budget exhausted")
    return IsoResult(NOT_ISOMORPHIC, nodes=total, reason="exhaustive search found no mapping")


# ---------------------------------------------------------------------------
# export / import


def to_json(g: LabeledGraph) -> str:
    obj = {
        "phase_mode": g.phase_mode,
        "generators": list(g.generators),
        "num_vertices": int(g.num_vertices),
        "edges": g.edges.tolist(),
        "labels": list(g.labels),
        "vertex_words": list(g.vertex_words),
    }
    if g.vertex_states is not None:
        obj["vertex_states"] = list(g.vertex_states)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def from_json(text: str | bytes) -> LabeledGraph:
    obj = json.loads(text)
    return LabeledGraph(
        int(obj["num_vertices"]),
        np.array(obj["edges"], dtype=np.int64).reshape(-1, 3),
        list(obj["labels"]),
        phase_mode=obj.get("phase_mode", ""),
        generators=list(obj.get("generators", [])),
        vertex_words=list(obj.get("vertex_words", [])),
        vertex_states=obj.get("vertex_states"),
    )


def to_dot(g: LabeledGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    has_edge = np.zeros(g.num_vertices, dtype=bool)
    if len(g.edges):
        has_edge[g.edges[:, 0]] = True
        has_edge[g.edges[:, 2]] = True
    for v in np.nonzero(~has_edge)[0].tolist():
        lines.append(f"  {v};")
    for s, lab, t in g.edges.tolist():
        color = PALETTE[lab % len(PALETTE)]
        lines.append(f'  {s} -> {t} [label="{g.labels[lab]}", color="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(g: LabeledGraph, fmt: str = "json") -> bytes:
    if fmt == "json":
        return to_json(g).encode("utf-8")
    if fmt == "dot":
        return to_dot(g).encode("utf-8")
    raise ValueError(f"unknown export format {fmt!r}")


def import_graph(data: bytes | str) -> LabeledGraph:
    return from_json(data)
