import re

import pytest
from hypothesis import given, strategies as st

from molvae.smiles import TOKEN_PATTERN, LexicalError, detokenize, tokenize


# Independent oracle: findall with the published pattern. tokenize() must
# agree wherever findall loses no characters.
def pattern_oracle(s):
    return re.findall(TOKEN_PATTERN, s)


def test_simple_chain():
    assert tokenize("CCO") == ["C", "C", "O"] == pattern_oracle("CCO")


def test_bracket_atom_is_one_token():
    assert tokenize("[O-]") == ["[O-]"]
    assert tokenize("[O-]C") == ["[O-]", "C"]


def test_empty_string():
    assert tokenize("") == []


def test_benzene():
    assert tokenize("c1ccccc1") == ["c", "1", "c", "c", "c", "c", "c", "1"]
    assert tokenize("c1ccccc1") == pattern_oracle("c1ccccc1")


def test_two_letter_halogens():
    assert tokenize("CCl") == ["C", "Cl"]
    assert tokenize("BrBr") == ["Br", "Br"]
    assert tokenize("ClC(Cl)Br") == ["Cl", "C", "(", "Cl", ")", "Br"]


def test_percent_ring_closure():
    assert tokenize("C%12CC%12") == ["C", "%12", "C", "C", "%12"]


def test_detokenize_concatenates():
    assert detokenize(["C", "Cl"]) == "CCl"
    assert detokenize([]) == ""
    assert detokenize(["[O-]"]) == "[O-]"


def test_lexical_error_position():
    with pytest.raises(LexicalError) as exc:
        tokenize("CxC")
    assert exc.value.position == 1


def test_whitespace_rejected():
    with pytest.raises(LexicalError):
        tokenize("C C")


@pytest.mark.parametrize(
    "smiles",
    [
        "CC(=O)Nc1ccc(O)cc1",
        "O=[N+]([O-])c1ccc(Cl)cc1",
        "C[C@H](N)C(=O)[O-]",
        "C/C=C\\C",
        "c1ccc2ccccc2c1",
        "CC(C)(C)OC(=O)N1CCC(CC1)N",
    ],
)
def test_round_trip_and_oracle_agreement(smiles):
    tokens = tokenize(smiles)
    assert detokenize(tokens) == smiles
    assert tokens == pattern_oracle(smiles)


TOKEN_POOL = [
    "C", "N", "O", "S", "P", "F", "I", "Cl", "Br", "c", "n", "o", "s",
    "(", ")", "=", "#", "-", "+", "1", "2", "9", "%10", "%99",
    "[O-]", "[nH]", "[N+]", "[C@@H]", ".", "/", "\\", "@", "*",
]


@given(st.lists(st.sampled_from(TOKEN_POOL), max_size=40))
def test_round_trip_property(tokens):
    s = detokenize(tokens)
    assert detokenize(tokenize(s)) == s
