"""SMILES parsing into a molecule graph.

The parser resolves branches, ring closures, and bracket atoms into an
atom/bond list. It accepts stereo markers (``/``, ``\\``, ``@``) lexically
without interpreting them. Chemical plausibility (valence, kekulization) is
checked separately in :mod:`molvae.smiles.validity`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tokenizer import LexicalError, tokenize

# Aromatic (lowercase) symbols accepted inside and outside brackets.
AROMATIC_SYMBOLS = {"b", "c", "n", "o", "p", "s", "se", "as", "te"}

# Elements recognized in bracket atoms. Covers the organic subset plus the
# ions and heteroatoms that occur in drug-like corpora; anything else is a
# lexical error.
BRACKET_ELEMENTS = {
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al",
    "Si", "P", "S", "Cl", "Ar", "K", "Ca", "Fe", "Co", "Ni", "Cu", "Zn",
    "As", "Se", "Br", "Kr", "Sn", "Sb", "Te", "I", "Xe", "Pt", "Au", "Hg",
    "Pb", "Bi", "*",
}


class ParenthesesError(ValueError):
    """Unbalanced or misplaced branch parentheses."""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at token {position}")


class UnclosedRingError(ValueError):
    """Ring-closure digit bookkeeping failure (unmatched, duplicated, or
    self-referential closures, or closures with conflicting bond orders)."""

    def __init__(self, digit: int, reason: str = "unclosed ring bond"):
        self.digit = digit
        self.reason = reason
        super().__init__(f"{reason} (ring digit {digit})")


class StructureError(ValueError):
    """Malformed structure that is not a parenthesis or ring problem,
    e.g. a dangling bond symbol or a stray reaction token."""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at token {position}")


@dataclass
class Atom:
    symbol: str  # element symbol, capitalized ("C", "Br"); "*" for wildcard
    aromatic: bool = False
    charge: int = 0
    explicit_h: int | None = None  # None: organic subset, hydrogens implicit
    isotope: int | None = None
    chiral: bool = False
    in_bracket: bool = False


@dataclass
class Bond:
    a: int
    b: int
    order: int  # 1, 2, 3, 4; aromatic bonds carry order 1 plus the flag
    aromatic: bool = False


@dataclass
class MoleculeGraph:
    atoms: list[Atom] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    rings: list[list[int]] = field(default_factory=list)

    def neighbors(self, idx: int) -> list[tuple[int, Bond]]:
        out = []
        for bond in self.bonds:
            if bond.a == idx:
                out.append((bond.b, bond))
            elif bond.b == idx:
                out.append((bond.a, bond))
        return out

    def degree(self, idx: int) -> int:
        return sum(1 for bond in self.bonds if idx in (bond.a, bond.b))


_BOND_ORDERS = {"-": 1, "=": 2, "#": 3, "$": 4, "/": 1, "\\": 1, ":": 1, "~": 1}


def _parse_bracket(token: str, position: int) -> Atom:
    """Parse one ``[...]`` token into an Atom."""
    body = token[1:-1]
    i = 0
    n = len(body)
    if n == 0:
        raise LexicalError(token, position)

    isotope = None
    start = i
    while i < n and body[i].isdigit():
        i += 1
    if i > start:
        isotope = int(body[start:i])

    # Element symbol: one upper + optional lower, or a lowercase aromatic.
    symbol = None
    aromatic = False
    if i < n and body[i] == "*":
        symbol = "*"
        i += 1
    elif i < n and body[i].isupper():
        if i + 1 < n and body[i + 1].islower() and body[i:i + 2] in BRACKET_ELEMENTS:
            symbol = body[i:i + 2]
            i += 2
        else:
            symbol = body[i]
            i += 1
    elif i < n and body[i].islower():
        if i + 1 < n and body[i:i + 2] in AROMATIC_SYMBOLS:
            symbol = body[i:i + 2].capitalize()
            aromatic = True
            i += 2
        elif body[i] in AROMATIC_SYMBOLS:
            symbol = body[i].upper()
            aromatic = True
            i += 1
    if symbol is None or (symbol != "*" and symbol not in BRACKET_ELEMENTS):
        raise LexicalError(token, position)

    chiral = False
    while i < n and body[i] == "@":
        chiral = True
        i += 1
    # Named chirality classes (TH1, SP2, ...) after @: skip letters+digits.
    if chiral and i < n and body[i].isupper():
        while i < n and (body[i].isalnum()):
            if body[i] in "+-H":
                break
            i += 1

    explicit_h = 0
    if i < n and body[i] == "H":
        i += 1
        start = i
        while i < n and body[i].isdigit():
            i += 1
        explicit_h = int(body[start:i]) if i > start else 1

    charge = 0
    if i < n and body[i] in "+-":
        sign = 1 if body[i] == "+" else -1
        run = 0
        while i < n and body[i] == ("+" if sign == 1 else "-"):
            run += 1
            i += 1
        start = i
        while i < n and body[i].isdigit():
            i += 1
        if i > start:
            if run != 1:
                raise LexicalError(token, position)
            charge = sign * int(body[start:i])
        else:
            charge = sign * run

    if i < n and body[i] == ":":  # atom-map class, ignored
        i += 1
        start = i
        while i < n and body[i].isdigit():
            i += 1
        if i == start:
            raise LexicalError(token, position)

    if i != n:
        raise LexicalError(token, position)

    return Atom(
        symbol=symbol,
        aromatic=aromatic,
        charge=charge,
        explicit_h=explicit_h,
        isotope=isotope,
        chiral=chiral,
        in_bracket=True,
    )


def _organic_atom(token: str) -> Atom:
    aromatic = token.islower()
    return Atom(symbol=token.capitalize() if aromatic else token, aromatic=aromatic)


def parse(smiles: str) -> MoleculeGraph:
    """Parse a SMILES string into a MoleculeGraph.

    Raises:
        LexicalError: unmatched characters or malformed bracket atoms.
        ParenthesesError: unbalanced branches.
        UnclosedRingError: unmatched or inconsistent ring-closure digits.
        StructureError: dangling bonds and other malformed structure.
    """
    tokens = tokenize(smiles)
    graph = MoleculeGraph()
    prev: int | None = None  # atom awaiting the next bond
    branch_stack: list[tuple[int, int]] = []  # (return atom, atom count at open)
    pending_bond: str | None = None
    # ring digit -> (atom index, bond symbol or None)
    open_rings: dict[int, tuple[int, str | None]] = {}

    def add_atom(atom: Atom, pos: int) -> None:
        nonlocal prev, pending_bond
        graph.atoms.append(atom)
        idx = len(graph.atoms) - 1
        if prev is not None:
            _add_bond(graph, prev, idx, pending_bond)
        elif pending_bond is not None:
            raise StructureError(pos, "bond with no preceding atom")
        pending_bond = None
        prev = idx

    def close_ring(digit: int, pos: int) -> None:
        nonlocal pending_bond
        if prev is None:
            raise StructureError(pos, "ring digit with no preceding atom")
        if digit in open_rings:
            other, other_bond = open_rings.pop(digit)
            if other == prev:
                raise UnclosedRingError(digit, "ring closure bonds an atom to itself")
            if any({bond.a, bond.b} == {other, prev} for bond in graph.bonds):
                raise UnclosedRingError(digit, "duplicate ring bond")
            symbol = pending_bond or other_bond
            if pending_bond and other_bond and pending_bond != other_bond:
                raise UnclosedRingError(digit, "conflicting ring bond orders")
            _add_bond(graph, other, prev, symbol)
        else:
            open_rings[digit] = (prev, pending_bond)
        pending_bond = None

    for pos, token in enumerate(tokens):
        if token.startswith("["):
            add_atom(_parse_bracket(token, pos), pos)
        elif token in ("B", "C", "N", "O", "S", "P", "F", "Cl", "Br", "I",
                       "b", "c", "n", "o", "s", "p", "*"):
            add_atom(_organic_atom(token), pos)
        elif token in _BOND_ORDERS:
            if pending_bond is not None:
                raise StructureError(pos, "two consecutive bond symbols")
            if prev is None:
                raise StructureError(pos, "bond with no preceding atom")
            pending_bond = token
        elif token == "(":
            if prev is None:
                raise ParenthesesError(pos, "branch opened before any atom")
            if pending_bond is not None:
                raise StructureError(pos, "bond before branch opening")
            branch_stack.append((prev, len(graph.atoms)))
        elif token == ")":
            if not branch_stack:
                raise ParenthesesError(pos, "unmatched closing parenthesis")
            if pending_bond is not None:
                raise StructureError(pos, "dangling bond before closing parenthesis")
            prev, count_at_open = branch_stack.pop()
            if len(graph.atoms) == count_at_open:
                raise ParenthesesError(pos, "empty branch")
        elif token == ".":
            if pending_bond is not None:
                raise StructureError(pos, "dangling bond before dot")
            if prev is None:
                raise StructureError(pos, "dot separator with no preceding atom")
            prev = None
        elif token.isdigit():
            close_ring(int(token), pos)
        elif token.startswith("%"):
            close_ring(int(token[1:]), pos)
        else:
            # Reaction/query leftovers the tokenizer accepts (">", "?").
            raise StructureError(pos, f"unexpected token {token!r}")

    if pending_bond is not None:
        raise StructureError(len(tokens), "dangling bond at end of input")
    if tokens and tokens[-1] == ".":
        raise StructureError(len(tokens) - 1, "trailing dot separator")
    if branch_stack:
        raise ParenthesesError(len(tokens), "unclosed branch")
    if open_rings:
        digit = sorted(open_rings)[0]
        raise UnclosedRingError(digit)

    from .rings import sssr  # local import to avoid a cycle

    graph.rings = sssr(len(graph.atoms), [(b.a, b.b) for b in graph.bonds])
    return graph


def _add_bond(graph: MoleculeGraph, a: int, b: int, symbol: str | None) -> None:
    if symbol is None:
        aromatic = graph.atoms[a].aromatic and graph.atoms[b].aromatic
        graph.bonds.append(Bond(a, b, order=1, aromatic=aromatic))
    elif symbol == ":":
        graph.bonds.append(Bond(a, b, order=1, aromatic=True))
    else:
        graph.bonds.append(Bond(a, b, order=_BOND_ORDERS[symbol]))
