import numpy as np
import pytest

from cliffcayley import core, states
from cliffcayley.engine import EXACT, MOD_PHASE
from cliffcayley.states import orbit_states, preset_state, quotient_graph, stabilizer_subgroup

from conftest import FULL, HC, cached_group


def test_presets():
    assert np.allclose(preset_state("ghz 3").to_complex(), [1, 0, 0, 0, 0, 0, 0, 1])
    d = preset_state("dicke 4 2").to_complex()
    assert [i for i in range(16) if d[i]] == [3, 5, 6, 9, 10, 12]
    assert np.allclose(preset_state("w 3").to_complex(), [0, 1, 1, 0, 1, 0, 0, 0])
    assert preset_state("zeros 2") == core.StateVector.basis(2)
    v = preset_state("apply C32 to |i1+>")
    assert v == core.apply_word("C32", core.parse_state_literal("|i1+>"))


@pytest.mark.parametrize("spec", ["", "ghz", "dicke 3 4", "zeros -1", "foo 2", "w x"])
def test_bad_presets(spec):
    with pytest.raises(ValueError):
        preset_state(spec)


def test_describe_state():
    assert states.describe_state(preset_state("ghz 2")) == "(1,0,0,0)/s2^0|00> + (1,0,0,0)/s2^0|11>"


def test_stabilizer_state_count():
    assert [states.stabilizer_state_count(n) for n in (1, 2, 3)] == [6, 60, 1080]
    with pytest.raises(ValueError):
        states.stabilizer_state_count(0)


def test_single_qubit_zero_stabilizer():
    g = cached_group("H1,P1", 1, MOD_PHASE)
    stab = stabilizer_subgroup(g, core.StateVector.basis(1))
    assert stab.order == 4
    want = {g.index_of(w) for w in ("", "P1", "P1^2", "P1^3")}
    assert set(stab.members.tolist()) == want
    assert quotient_graph(g, core.StateVector.basis(1)).num_vertices == 6


def test_exact_stabilizer_of_zeros():
    g = cached_group(HC, 2)
    assert stabilizer_subgroup(g, preset_state("|00>")).order == 48


def test_stabilizer_mode_checks():
    mp = cached_group(HC, 2, MOD_PHASE)
    with pytest.raises(ValueError):
        stabilizer_subgroup(mp, preset_state("|00>"), EXACT)
    with pytest.raises(ValueError):
        stabilizer_subgroup(cached_group(HC, 2), preset_state("|0>"))


@pytest.mark.parametrize(
    "spec,n,stab,verts",
    [("|00>", 2, 48, 24), ("ghz 3", 3, 8, 144), ("apply C32 to |i1+>", 3, 4, 288), ("w 3", 3, 4, 288), ("dicke 4 2", 4, 2, 576)],
)
def test_quotients_of_hc(spec, n, stab, verts):
    g = cached_group(HC, n, MOD_PHASE)
    v = preset_state(spec)
    q = quotient_graph(g, v)
    assert q.stabilizer.order == stab
    assert q.num_vertices == verts
    assert q.num_vertices * q.stabilizer.order == g.order


def test_stabilizer_is_a_subgroup():
    g = cached_group(HC, 3, MOD_PHASE)
    stab = stabilizer_subgroup(g, preset_state("ghz 3"))
    m = stab.members
    prods = g.multiply_ids(np.repeat(m, len(m)), np.tile(m, len(m)))
    assert set(prods.tolist()) <= set(m.tolist())
    assert set(g.inverse[m].tolist()) <= set(m.tolist())


def test_cosets_are_well_defined():
    g = cached_group(HC, 2, MOD_PHASE)
    v = preset_state("|00>")
    q = quotient_graph(g, v)
    keys = states.state_keys(*states.image_states(g, v), MOD_PHASE)
    # elements in one coset send v to one phase class, and distinct cosets differ
    by_coset: dict[int, set] = {}
    for e, c in enumerate(q.coset_of.tolist()):
        by_coset.setdefault(c, set()).add(keys[e])
    assert all(len(s) == 1 for s in by_coset.values())
    assert len({next(iter(s)) for s in by_coset.values()}) == q.num_vertices


def test_class_transport():
    # edge [g] --s--> [s g] does not depend on the representative
    g = cached_group(HC, 3, MOD_PHASE)
    q = quotient_graph(g, preset_state("ghz 3"))
    for gi in range(len(g.generators)):
        assert np.array_equal(q.coset_of[g.table[gi]], q.table[gi][q.coset_of])


def test_tensor_with_zero_keeps_orbit():
    g = cached_group(HC, 3, MOD_PHASE)
    v = preset_state("|00>").tensor(preset_state("|+>"))
    assert quotient_graph(g, v).num_vertices == 24


def test_thirty_six_vertex_witness():
    g = cached_group(HC, 2, MOD_PHASE)
    assert quotient_graph(g, preset_state("|0,i>")).num_vertices == 36


def test_relabelled_first_stabilizer_set():
    # the listed four-element set fixes the state once qubits 1 and 2 are swapped
    g = cached_group(HC, 3, MOD_PHASE)
    v = preset_state("apply C32 to |i1+>")
    stab = set(stabilizer_subgroup(g, v).members.tolist())
    swapped = ["", "H1 (C21 H2)^4", "(C21 H2)^4 H1", "((C21 H2)^3 C21 H1)^2"]
    assert {g.index_of(w) for w in swapped} == stab


def test_w_state_stabilizer_members():
    g = cached_group(HC, 3, MOD_PHASE)
    stab = set(stabilizer_subgroup(g, preset_state("w 3")).members.tolist())
    for w in ("", "H2 C12 H2", "H2 C12 C21 C12 H1", "H2 C21 C12 H1"):
        assert g.index_of(w) in stab
    assert g.index_of("H1 C12 H2 C21") not in stab


def test_dicke_stabilizer_members():
    g = cached_group(HC, 4, MOD_PHASE)
    stab = set(stabilizer_subgroup(g, preset_state("dicke 4 2")).members.tolist())
    assert stab == {g.index_of(""), g.index_of("H2 C12 C21 C12 H1")}


@pytest.mark.parametrize(
    "gens,n,spec,verts",
    [("H1,P1", 1, "|0>", 6), (HC, 2, "|00>", 24), (HC, 3, "ghz 3", 144), (HC, 3, "w 3", 288), (FULL, 2, "|00>", 60)],
)
def test_oracle_matches_quotient(gens, n, spec, verts):
    g = cached_group(gens, n, MOD_PHASE)
    v = preset_state(spec)
    q = quotient_graph(g, v)
    orbit = orbit_states(gens, v)
    assert orbit.num_vertices == verts
    phi = states.oracle_correspondence(q, orbit)
    assert phi is not None and sorted(phi.tolist()) == list(range(verts))


def test_oracle_detects_mismatch():
    g = cached_group(HC, 2, MOD_PHASE)
    q = quotient_graph(g, preset_state("|00>"))
    orbit = orbit_states(HC, preset_state("|0,i>"))
    assert states.oracle_correspondence(q, orbit) is None


def test_orbit_exact_mode_counts_phases():
    v = core.StateVector.basis(1)
    assert orbit_states("H1,P1", v, EXACT).num_vertices == 48
    assert orbit_states("H1,P1", v).num_vertices == 6


def test_orbit_stabilizer_randomised():
    rng = np.random.default_rng(5)
    for gens, n in [("H1,P1", 2), ("H1,C12", 2), ("P1,P2,C21", 2), (HC, 2)]:
        g = cached_group(gens, n, MOD_PHASE)
        for _ in range(3):
            v = states.random_state(n, rng, bound=1)
            q = quotient_graph(g, v)
            assert q.num_vertices * q.stabilizer.order == g.order


def test_generic_state_seed_zero():
    g = cached_group(HC, 4, MOD_PHASE)
    v, seed = states.find_generic_state(g, 4, seed=0)
    assert seed >= 0
    assert stabilizer_subgroup(g, v).order == 1
    again, seed2 = states.find_generic_state(g, 4, seed=0)
    assert again == v and seed2 == seed


def test_reachability_labeled_graph():
    g = cached_group(HC, 2, MOD_PHASE)
    lg = quotient_graph(g, preset_state("|00>")).to_labeled()
    assert lg.num_vertices == 24 and lg.labels == ["H1", "H2", "C12", "C21"]
    assert len(lg.vertex_states) == 24
