"""Relation catalogue for the one- and two-qubit Clifford groups, checked as exact matrix identities.

Each relation is a template over abstract qubit slots ``i`` and ``j``; it
asserts ``lhs = w**phase_power * rhs``.  ``tags`` lists the subgroup
generator sets whose presentations cite the relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from . import core
from .core import GateWord, parse_word
from .engine import SURVEY


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: str  # word template, e.g. "(C{i}{j} H{j})^4"
    rhs: str
    phase_power: int = 0
    slots: tuple[str, ...] = ("i", "j")
    derived: bool = False  # a consequence of the presentation, not one of its axioms
    tags: tuple[str, ...] = field(default=(), compare=False)

    def instantiate(self, i: int, j: int | None = None) -> tuple[GateWord, GateWord]:
        if "j" in self.slots:
            if j is None or i == j:
                raise ValueError(f"relation {self.name} needs two distinct qubits")
        if i < 1 or (j is not None and j < 1):
            raise ValueError("qubit indices are 1-based")
        # comma form keeps two-digit indices unambiguous
        sub = {"i": str(i), "j": "" if j is None else str(j)}

        def fill(t: str) -> GateWord:
            text = t
            if "j" in self.slots:
                text = text.replace("C{i}{j}", "C{i},{j}").replace("C{j}{i}", "C{j},{i}")
            return parse_word(text.format(**sub))

        return fill(self.lhs), fill(self.rhs)

    def __str__(self) -> str:
        rhs = self.rhs or "1"
        phase = f"w^{self.phase_power} " if self.phase_power % 8 else ""
        return f"{self.lhs} = {phase}{rhs}"


_ONE = ("i",)

# (name, lhs, rhs, phase, slots, derived)
_ENTRIES = (
    ("h_involution", "H{i}^2", "", 0, _ONE, False),
    ("p_order_four", "P{i}^4", "", 0, _ONE, False),
    ("hp_cube_symmetric", "(H{i} P{i})^3", "(P{i} H{i})^3", 0, _ONE, False),
    ("hp_cube_phase", "(H{i} P{i})^3", "", 1, _ONE, False),
    ("c_involution", "C{i}{j}^2", "", 0, ("i", "j"), False),
    ("pp_commute", "P{i}^-1 P{j} P{i}", "P{j}", 0, ("i", "j"), False),
    ("hh_commute", "H{i}^-1 H{j} H{i}", "H{j}", 0, ("i", "j"), False),
    ("hp_commute", "P{i}^-1 H{j} P{i}", "H{j}", 0, ("i", "j"), False),
    ("four_generator", "C{i}{j} H{j} C{i}{j} P{j} C{i}{j} P{j}^3 H{j}", "P{i}", 0, ("i", "j"), False),
    ("cnot_reversal", "H{i} H{j} C{j}{i} H{i} H{j}", "C{i}{j}", 0, ("i", "j"), False),
    ("cp_fourth", "(C{i}{j} P{j})^4", "P{i}^2", 0, ("i", "j"), False),
    ("cc_braid", "C{i}{j}^-1 C{j}{i} C{i}{j}", "C{j}{i}^-1 C{i}{j} C{j}{i}", 0, ("i", "j"), False),
    ("pc_commute", "P{i}^3 C{i}{j} P{i}", "C{i}{j}", 0, ("i", "j"), False),
    ("ch_fourth", "(C{i}{j} H{j})^4", "P{i}^2", 0, ("i", "j"), False),
    ("hpc_sixth", "(H{i} P{j} C{i}{j})^6", "", 6, ("i", "j"), True),
    ("hcp_sixth", "(H{i} C{i}{j} P{j})^6", "", 6, ("i", "j"), True),
    ("phc_sixth", "(P{j} H{i} C{i}{j})^6", "", 6, ("i", "j"), True),
    ("cpcp_commute", "C{i}{j} P{j} C{i}{j} P{j}", "P{j} C{i}{j} P{j} C{i}{j}", 0, ("i", "j"), True),
    ("chp_square", "(C{i}{j} H{i} P{j}^2)^2", "(P{j}^2 H{i} C{i}{j})^2", 0, ("i", "j"), True),
    ("hadamard_transport", "C{j}{i} C{i}{j} C{j}{i} H{i} C{j}{i} C{i}{j} C{j}{i}", "H{j}", 0, ("i", "j"), True),
    ("hc_eighth", "(H{i} C{i}{j})^8", "", 0, ("i", "j"), True),
)

# relations cited for each survey row, in survey order
_AXIOMS_C1 = ("h_involution", "p_order_four", "hp_cube_symmetric", "hp_cube_phase")
_SUBGROUP_CITES: tuple[tuple[str, ...], ...] = (
    ("h_involution",),
    ("c_involution",),
    ("p_order_four",),
    ("h_involution", "hh_commute"),
    ("c_involution", "cc_braid"),
    ("h_involution", "p_order_four", "hp_commute"),
    ("p_order_four", "c_involution", "pc_commute"),
    ("p_order_four", "pp_commute"),
    ("h_involution", "c_involution", "ch_fourth"),
    ("h_involution", "c_involution", "cnot_reversal", "ch_fourth"),
    ("h_involution", "p_order_four", "c_involution", "hp_commute", "pc_commute", "ch_fourth"),
    ("p_order_four", "c_involution", "cp_fourth"),
    ("p_order_four", "c_involution", "pp_commute", "cp_fourth", "pc_commute"),
    ("p_order_four", "c_involution", "pp_commute", "hp_commute", "four_generator", "cnot_reversal",
     "cc_braid", "pc_commute", "ch_fourth"),
    _AXIOMS_C1,
    _AXIOMS_C1 + ("hh_commute", "hp_commute"),
    _AXIOMS_C1 + ("hh_commute", "hp_commute"),
    _AXIOMS_C1 + ("c_involution", "cc_braid", "ch_fourth"),
    _AXIOMS_C1 + ("c_involution", "cc_braid", "ch_fourth"),
    _AXIOMS_C1 + ("c_involution", "cc_braid", "ch_fourth"),
    _AXIOMS_C1 + ("c_involution", "pp_commute", "hp_commute", "four_generator", "cp_fourth", "pc_commute"),
    _AXIOMS_C1 + ("pp_commute", "cpcp_commute", "chp_square"),
    ("p_order_four", "hp_cube_symmetric", "hp_cube_phase", "c_involution", "pp_commute", "hp_commute",
     "four_generator", "cnot_reversal", "cc_braid", "pc_commute", "ch_fourth"),
    _AXIOMS_C1 + ("pp_commute", "hp_commute"),
    ("h_involution", "p_order_four", "c_involution", "pp_commute", "hp_commute", "four_generator",
     "cnot_reversal", "pc_commute", "ch_fourth"),
) + (
    ("hp_cube_symmetric", "hp_cube_phase", "pp_commute", "hh_commute", "hp_commute", "four_generator",
     "cnot_reversal", "cp_fourth", "cc_braid"),
) * 4

SUBGROUP_RELATIONS: dict[str, tuple[str, ...]] = {row[0]: cites for row, cites in zip(SURVEY, _SUBGROUP_CITES)}


def _build() -> tuple[Relation, ...]:
    tags: dict[str, list[str]] = {}
    for gens, cites in SUBGROUP_RELATIONS.items():
        for c in cites:
            tags.setdefault(c, []).append(gens)
    return tuple(
        Relation(name, lhs, rhs, phase, slots, derived, tuple(tags.get(name, ())))
        for name, lhs, rhs, phase, slots, derived in _ENTRIES
    )


_CATALOG = _build()


def relation_catalog() -> list[Relation]:
    return list(_CATALOG)


def get_relation(name: str) -> Relation:
    for r in _CATALOG:
        if r.name == name:
            return r
    raise KeyError(name)


def verify_relation(r: Relation, i: int, j: int | None = None, n: int = 2) -> bool:
    """Exact check of ``lhs = w**phase * rhs`` at the given qubits on ``n`` qubits."""
    lhs, rhs = r.instantiate(i, j)
    top = max(i, j or 0)
    if top > n:
        raise ValueError(f"qubit {top} outside n = {n}")
    return core.word_matrix(lhs, n) == core.word_matrix(rhs, n).scaled_by_omega(r.phase_power)


@dataclass(frozen=True)
class CheckRow:
    name: str
    qubits: tuple[int, ...]
    passed: bool

    def line(self) -> str:
        q = "(" + ",".join(map(str, self.qubits)) + ")"
        return f"{self.name:<20} {q:<7} {'PASS' if self.passed else 'FAIL'}"


@dataclass
class Report:
    n: int
    rows: list[CheckRow]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def text(self) -> str:
        return "\n".join(r.line() for r in self.rows) + "\n"


def verify_all(n: int = 2, *, all_pairs: bool = False, relations=None) -> Report:
    """Check every relation at (1,2) and (2,1), or at every ordered pair when ``all_pairs``."""
    if n < 2:
        raise ValueError("two-qubit relations need n >= 2")
    pairs = list(permutations(range(1, n + 1), 2)) if all_pairs else [(1, 2), (2, 1)]
    rows = []
    for r in relation_catalog() if relations is None else relations:
        for i, j in pairs:
            if "j" in r.slots:
                rows.append(CheckRow(r.name, (i, j), verify_relation(r, i, j, n)))
            else:
                rows.append(CheckRow(r.name, (i, j), verify_relation(r, i, None, n)))
    return Report(n, rows)
