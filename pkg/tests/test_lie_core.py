import pytest

from carnot.lie_core import (GroupSpecError, StratifiedAlgebra,
                             hausdorff_dimension, parse_group_spec,
                             serialize_group_spec, validate_stratification)
from carnot.linalg import Q

HEISENBERG = """
# first Heisenberg group
name = heisenberg1
layers = [2, 1]
X1 X2 = 1*X3
"""

ABELIAN = """
name = abelian
layers = [3]
"""

ENGEL = """
name = engel
layers = [2, 1, 1]
X1 X2 = 1*X3
X1 X3 = 1*X4
"""


def test_parse_heisenberg():
    alg = parse_group_spec(HEISENBERG)
    assert alg.n == 3 and alg.s == 2
    assert alg.layer_dims == (2, 1)
    assert alg.weight_of == (1, 1, 2)
    assert alg.bracket(0, 1) == {2: Q(1)}
    assert alg.bracket(1, 0) == {2: Q(-1)}


def test_parse_abelian():
    alg = parse_group_spec(ABELIAN)
    assert alg.n == 3 and alg.s == 1
    assert alg.brackets == {}


def test_parse_engel_and_validate():
    alg = parse_group_spec(ENGEL)
    assert alg.n == 4 and alg.s == 3
    assert validate_stratification(alg).valid


def test_rational_coefficients():
    alg = parse_group_spec("name = t\nlayers = [2, 1]\nX1 X2 = 3/2*X3\n")
    assert alg.bracket(0, 1) == {2: Q(3, 2)}


def test_parse_rejects_floats():
    with pytest.raises(GroupSpecError):
        parse_group_spec("name = t\nlayers = [2, 1]\nX1 X2 = 1.5*X3\n")


def test_parse_duplicate_bracket():
    text = "name = t\nlayers = [2, 1]\nX1 X2 = 1*X3\nX1 X2 = 2*X3\n"
    with pytest.raises(GroupSpecError, match="duplicate"):
        parse_group_spec(text)


def test_parse_reversed_duplicate():
    text = "name = t\nlayers = [2, 1]\nX1 X2 = 1*X3\nX2 X1 = 1*X3\n"
    with pytest.raises(GroupSpecError, match="duplicate|i < j"):
        parse_group_spec(text)


def test_parse_index_out_of_range():
    with pytest.raises(GroupSpecError, match="out of range"):
        parse_group_spec("name = t\nlayers = [2]\nX1 X2 = 1*X3\n")


def test_parse_zero_layer():
    with pytest.raises(GroupSpecError, match="zero-dimensional"):
        parse_group_spec("name = t\nlayers = [2, 0, 1]\n")


def test_parse_reports_line_numbers():
    try:
        parse_group_spec("name = t\nlayers = [2, 1]\nX1 X2 == 1*X3\n")
    except GroupSpecError as exc:
        assert "line 3" in str(exc)
    else:
        raise AssertionError("expected a syntax error")


def test_parse_missing_keys():
    with pytest.raises(GroupSpecError, match="name"):
        parse_group_spec("layers = [1]\n")
    with pytest.raises(GroupSpecError, match="layers"):
        parse_group_spec("name = t\n")


def test_validate_grading_violation():
    alg = StratifiedAlgebra("bad", [2, 1], {(0, 1): {2: Q(1)}, (0, 2): {1: Q(1)}})
    report = validate_stratification(alg)
    assert not report.valid
    assert any("grading" in f for f in report.failures)


def test_validate_generation_failure():
    alg = StratifiedAlgebra("bad", [1, 1], {})
    report = validate_stratification(alg)
    assert not report.valid
    assert any("generation" in f for f in report.failures)


def test_validate_jacobi_failure():
    # [X1,X2]=X4, [X1,X3]=X5, [X2,X3]=X6 is fine; corrupt one second-layer
    # bracket so the Jacobi identity breaks: [X1,[X2,X3]] picks up X7 terms.
    brackets = {(0, 1): {3: Q(1)}, (0, 2): {4: Q(1)}, (1, 2): {5: Q(1)},
                (0, 5): {6: Q(1)}}
    alg = StratifiedAlgebra("bad", [3, 3, 1], brackets)
    report = validate_stratification(alg)
    assert any("Jacobi" in f for f in report.failures)


def test_hausdorff_dimension(corpus):
    expected = {"abelian_r3": 3, "heisenberg1": 4, "heisenberg2": 6,
                "engel": 7, "free32": 9}
    for name, alg in corpus.items():
        assert hausdorff_dimension(alg) == expected[name]


def test_serialize_round_trip(corpus):
    for alg in corpus.values():
        text = serialize_group_spec(alg)
        back = parse_group_spec(text)
        assert back.name == alg.name
        assert back.layer_dims == alg.layer_dims
        assert back.brackets == alg.brackets
        assert serialize_group_spec(back) == text


def test_validate_corpus(corpus):
    for alg in corpus.values():
        assert validate_stratification(alg).valid


def test_bracket_grading_per_entry(corpus):
    for alg in corpus.values():
        for (i, j), comps in alg.brackets.items():
            for k in comps:
                assert alg.weight_of[k] == alg.weight_of[i] + alg.weight_of[j]
