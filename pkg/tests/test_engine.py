import numpy as np
import pytest

from cliffcayley import core, engine
from cliffcayley.engine import EXACT, MOD_PHASE, SURVEY, GroupTooLargeError, NotInGroupError
from cliffcayley.graphs import max_eccentricity

from conftest import FULL, HC, cached_group


@pytest.mark.parametrize(
    "gens,order",
    [("H1", 2), ("P1", 4), ("H1,P1", 192), ("C12,C21", 6), ("H1,H2", 4), ("P1,P2", 16), (HC, 2304)],
)
def test_small_orders(gens, order):
    assert cached_group(gens, 2).order == order


def test_single_qubit_clifford_mod_phase():
    assert cached_group("H1,P1", 1, MOD_PHASE).order == 24


def test_full_two_qubit_group():
    g = cached_group(FULL, 2)
    assert g.order == 92160
    assert cached_group(FULL, 2, MOD_PHASE).order == 11520


def test_empty_generator_list_is_trivial_group():
    g = engine.enumerate_group([], 2)
    assert g.order == 1 and g.word(0) == core.GateWord()


def test_duplicate_generators_rejected():
    with pytest.raises(ValueError):
        engine.enumerate_group("H1,H1", 2)


def test_bad_phase_mode_and_register():
    with pytest.raises(ValueError):
        engine.enumerate_group("H1", 2, "weird")
    with pytest.raises(ValueError):
        engine.enumerate_group("H3", 2)


def test_cap_is_enforced():
    with pytest.raises(GroupTooLargeError):
        engine.enumerate_group("H1,P1", 1, cap=100)


@pytest.mark.parametrize("gens", [row[0] for row in SURVEY])
def test_lagrange_and_factor(gens):
    ex = cached_group(gens, 2)
    mp = cached_group(gens, 2, MOD_PHASE)
    assert 92160 % ex.order == 0
    assert ex.order % mp.order == 0
    assert ex.order // mp.order in (1, 2, 8)


def test_enumeration_is_deterministic():
    a = engine.enumerate_group("H1,P2,C12", 2)
    b = engine.enumerate_group("H1,P2,C12", 2)
    assert a.elements == b.elements
    assert np.array_equal(a.table, b.table)


def test_ids_follow_bfs_levels():
    g = cached_group(HC, 2)
    assert np.all(np.diff(g.level) >= 0)
    for i in range(0, g.order, 97):
        assert len(g.word(i)) == g.level[i]


def test_words_evaluate_to_their_elements():
    g = cached_group("H1,P1,C12", 2)
    for i in range(0, g.order, 37):
        assert core.word_matrix(g.word(i), 2) == g.matrix(i)


def test_cayley_edges_are_left_multiplication():
    g = cached_group("H1,P1,C21", 2)
    for gi, gate in enumerate(g.generators):
        m = core.gate_matrix(gate, 2)
        for v in range(0, g.order, 101):
            assert g.matrix(int(g.table[gi, v])) == m @ g.matrix(v)


def test_closure_spot_check():
    g = cached_group(HC, 2)
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, g.order, size=(2, 200))
    ab = g.multiply_ids(a, b)
    for x, y, z in list(zip(a, b, ab))[:20]:
        assert g.matrix(int(z)) == g.matrix(int(x)) @ g.matrix(int(y))


def test_inverse_and_permutations():
    g = cached_group("H1,P2,C12", 2)
    inv = g.inverse
    assert np.array_equal(inv[inv], np.arange(g.order))
    assert np.all(g.multiply_ids(np.arange(g.order), inv) == 0)
    for s in (1, 17, 500, g.order - 1):
        assert np.array_equal(g.right_permutation(s), g.right_multiply_all(s))
        left = g.left_permutation(s)
        assert np.array_equal(left, g.multiply_ids(np.full(g.order, s), np.arange(g.order)))


def test_membership():
    g = cached_group(HC, 2)
    assert "C12 H1 C21" in g
    assert "P1" not in g
    with pytest.raises(NotInGroupError):
        g.index_of("P1")
    with pytest.raises(NotInGroupError):
        g.index_of(10**9)


def test_support_embedding():
    g = cached_group("H1,P1", 3)
    assert g.support == 1 and g.order == 192
    assert core.word_matrix("H1 P1", 3) in g
    assert core.word_matrix("H2", 3) not in g
    assert g.matrix(5).n == 3


@pytest.mark.parametrize("gens", ["H1,P1", "P1,C12", "H1,C12", "C12,C21"])
def test_vertex_transitive_eccentricity(gens):
    g = cached_group(gens, 2)
    e0 = max_eccentricity(g.table, sources=np.array([0]))
    rng = np.random.default_rng(0)
    for s in rng.integers(0, g.order, size=5):
        assert max_eccentricity(g.table, sources=np.array([s])) == e0
    assert engine.diameter(engine.build_cayley(g), sources="all") == e0


def test_diameter_examples():
    assert engine.diameter(engine.build_cayley(cached_group("P1", 2))) == 3
    assert engine.diameter(engine.build_cayley(cached_group("H1,P1", 2))) == 16
    with pytest.raises(ValueError):
        engine.diameter(engine.build_cayley(cached_group("P1", 2)), sources="some")


def test_shortest_word_examples():
    mp = cached_group(FULL, 2, MOD_PHASE)
    w = engine.shortest_word(mp, core.word_matrix("C12 H2 C12 P2 C12 P2^3 H2", 2))
    assert str(w) == "P1"
    ex = cached_group("H1,P1", 1)
    assert len(engine.shortest_word(ex, "(H1 P1)^3")) > 0
    assert engine.shortest_word(ex, "H1 H1") == core.GateWord()


def test_shortest_word_minimality_small():
    # brute force over all words up to length 7, evaluated as matrices
    from itertools import product

    g = cached_group("H1,P1", 1)
    best: dict[int, int] = {}
    for length in range(8):
        for letters in product(g.generators, repeat=length):
            idx = g.index_of(core.word_matrix(core.GateWord(letters), 1))
            best.setdefault(idx, length)
    for idx, length in best.items():
        assert len(engine.shortest_word(g, g.matrix(idx))) == length


def test_same_element_set():
    a = cached_group("H1,C21,C12", 2)
    b = cached_group("H1,H2,C12", 2)
    c = cached_group(HC, 2)
    assert engine.same_element_set(a, b) and engine.same_element_set(b, c)
    assert not engine.same_element_set(cached_group("H1,P1,C12", 2), cached_group("H1,P1,C21", 2))
    with pytest.raises(ValueError):
        engine.same_element_set(a, cached_group(HC, 2, MOD_PHASE))


def test_same_element_set_mixed_support():
    assert engine.same_element_set(cached_group("H1", 2), cached_group("H1", 2))
    assert not engine.same_element_set(cached_group("H1", 2), cached_group("C12", 2))


def test_companion_word_on_reversed_cnot():
    # the 32-element group with the reversed CNOT holds (H1 C21)^4 = P2^2 as a closed walk
    g = cached_group("H1,P2,C21", 2)
    assert g.order == 32
    assert core.word_matrix("(H1 C21)^4", 2) == core.word_matrix("P2^2", 2)
    v, p = g.index_of("(H1 C21)^4"), g.index_of("P2^2")
    assert v == p
    hi, ci = g.labels.index("H1"), g.labels.index("C21")
    x = 0
    for _ in range(4):
        x = int(g.table[ci, x])
        x = int(g.table[hi, x])
    assert x == p


def test_survey_catalogue_shape():
    assert len(SURVEY) == 29
    assert [r[1] for r in SURVEY] == sorted(r[1] for r in SURVEY)


def test_table_row_small():
    row = engine.table_row("H1,P1")
    assert (row.order, row.diameter, row.factor, row.mod_phase_diameter) == (192, 16, 8, 6)
    assert row.cells() == ["{H1,P1}", "192", "16", "8", "6"]
    assert engine.table_row("H1").cells()[3:] == ["-", "-"]
