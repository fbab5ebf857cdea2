"""Chemical validity checking with a four-class error taxonomy.

A string is valid when it parses, every atom's explicit bond order fits a
fixed valence table, and the aromatic subsystem admits a kekulized form
(a perfect matching of double bonds over the aromatic atoms that need one).
The first failure encountered classifies the string, checked in the order
lexical -> parentheses -> unclosed_ring -> valence -> unkekulized.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .parser import (
    Atom,
    MoleculeGraph,
    ParenthesesError,
    StructureError,
    UnclosedRingError,
    parse,
)
from .tokenizer import LexicalError


class ErrorClass(str, Enum):
    NONE = "none"
    LEXICAL = "lexical"
    PARENTHESES = "parentheses"
    UNCLOSED_RING = "unclosed_ring"
    VALENCE = "valence"
    UNKEKULIZED = "unkekulized"


@dataclass(frozen=True)
class ValidityVerdict:
    valid: bool
    error_class: ErrorClass = ErrorClass.NONE
    detail: str = ""

    def __post_init__(self):
        assert self.valid == (self.error_class is ErrorClass.NONE)


# Maximum valence per element at zero formal charge. A formal charge shifts
# the allowance by the charge itself (N+ binds 4, O- binds 1). Multi-valent
# P and S use their highest common state; implicit hydrogens only ever fill
# the gap and cannot fail the check on their own.
MAX_VALENCE = {
    "B": 3, "C": 4, "N": 3, "O": 2, "P": 5, "S": 6,
    "F": 1, "Cl": 1, "Br": 1, "I": 1, "H": 1,
}


def check_validity(smiles: str) -> ValidityVerdict:
    """Classify a SMILES string as valid or one of five error classes."""
    if not smiles:
        return ValidityVerdict(False, ErrorClass.LEXICAL, "empty string")
    try:
        graph = parse(smiles)
    except (LexicalError, StructureError) as err:
        return ValidityVerdict(False, ErrorClass.LEXICAL, str(err))
    except ParenthesesError as err:
        return ValidityVerdict(False, ErrorClass.PARENTHESES, str(err))
    except UnclosedRingError as err:
        return ValidityVerdict(False, ErrorClass.UNCLOSED_RING, str(err))

    needs_double = _kekule_demands(graph)

    for idx, atom in enumerate(graph.atoms):
        limit = _allowed_valence(atom)
        if limit is None:
            continue
        order = _explicit_order(graph, idx) + needs_double[idx]
        if atom.in_bracket:
            order += atom.explicit_h or 0
        if order > limit:
            return ValidityVerdict(
                False, ErrorClass.VALENCE,
                f"atom {idx} ({atom.symbol}) carries bond order {order} > {limit}",
            )
        # Aromatic chalcogens donate a lone pair to the ring; without a
        # positive charge they cannot hold a third connection.
        if (atom.aromatic and atom.symbol in ("O", "S", "Se", "Te")
                and atom.charge <= 0
                and graph.degree(idx) + (atom.explicit_h or 0) > 2):
            return ValidityVerdict(
                False, ErrorClass.VALENCE,
                f"aromatic {atom.symbol} at atom {idx} is over-coordinated",
            )

    problem = _check_kekulizable(graph, needs_double)
    if problem is not None:
        return ValidityVerdict(False, ErrorClass.UNKEKULIZED, problem)

    return ValidityVerdict(True)


def classify_error(smiles: str) -> ErrorClass:
    """Error class of a SMILES string (ErrorClass.NONE when valid)."""
    return check_validity(smiles).error_class


def _allowed_valence(atom: Atom) -> int | None:
    base = MAX_VALENCE.get(atom.symbol)
    if base is None:
        return None  # outside the organic subset: accept any coordination
    return base + atom.charge


def _explicit_order(graph: MoleculeGraph, idx: int) -> int:
    total = 0
    for _, bond in graph.neighbors(idx):
        total += 1 if bond.aromatic else bond.order
    return total


def _kekule_demands(graph: MoleculeGraph) -> list[int]:
    """Per atom: 1 if kekulization must assign it one double bond, else 0.

    Aromatic carbon wants a double bond unless an explicit exocyclic double
    bond already consumes its pi electron or it is charged. Aromatic
    nitrogen follows the pyridine/pyrrole split: an explicit hydrogen, a
    third substituent, or a negative charge marks the lone-pair (pyrrole)
    form. Aromatic O/S contribute a lone pair, their cations a double bond.
    """
    demands = [0] * len(graph.atoms)
    for idx, atom in enumerate(graph.atoms):
        if not atom.aromatic:
            continue
        has_exo_double = any(
            bond.order >= 2 and not bond.aromatic for _, bond in graph.neighbors(idx)
        )
        if has_exo_double:
            continue
        symbol = atom.symbol
        if symbol == "C":
            demands[idx] = 0 if atom.charge != 0 else 1
        elif symbol in ("N", "P", "As"):
            if atom.charge > 0:
                demands[idx] = 1
            elif atom.charge < 0:
                demands[idx] = 0
            elif (atom.explicit_h or 0) > 0 or graph.degree(idx) >= 3:
                demands[idx] = 0
            else:
                demands[idx] = 1
        elif symbol in ("O", "S", "Se", "Te"):
            demands[idx] = 1 if atom.charge > 0 else 0
        # aromatic B and anything else: lone-pair donor, no demand
    return demands


def _check_kekulizable(graph: MoleculeGraph, needs_double: list[int]) -> str | None:
    """None when a perfect matching over the demanding atoms exists,
    otherwise a description of the failure."""
    ring_atoms = {a for ring in graph.rings for a in ring}
    for idx, atom in enumerate(graph.atoms):
        if atom.aromatic and idx not in ring_atoms:
            return f"aromatic atom {idx} ({atom.symbol.lower()}) outside any ring"

    targets = [i for i, d in enumerate(needs_double) if d]
    if not targets:
        return None

    adjacency: dict[int, list[int]] = {i: [] for i in targets}
    for bond in graph.bonds:
        if bond.aromatic and needs_double[bond.a] and needs_double[bond.b]:
            adjacency[bond.a].append(bond.b)
            adjacency[bond.b].append(bond.a)

    matched: dict[int, int] = {}

    def extend() -> bool:
        free = [i for i in targets if i not in matched]
        if not free:
            return True
        # Most-constrained atom first keeps the backtracking shallow.
        pivot = min(free, key=lambda i: sum(1 for j in adjacency[i] if j not in matched))
        for partner in adjacency[pivot]:
            if partner in matched:
                continue
            matched[pivot] = partner
            matched[partner] = pivot
            if extend():
                return True
            del matched[pivot]
            del matched[partner]
        return False

    if extend():
        return None
    unmatched = [i for i in targets if i not in matched]
    return f"no kekulized form: atoms {unmatched} cannot pair double bonds"
