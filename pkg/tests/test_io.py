import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herdkit.errors import ConventionError, ParseError
from herdkit.io import SCHEMA, dumps_report, make_report, parse_diagonal_pair, parse_system, serialize_system


def test_json_star():
    d = parse_system(b'{"n":2,"edges":[[1,2,1.0]],"leaders":[1],"directed":false}', "json")
    assert d.n == 2 and d.leaders == (0,) and d.mode == "float"
    assert d.A.tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert d.input_matrix().tolist() == [[1.0], [0.0]]


def test_edge_list_path():
    d = parse_system(b"# n=3 leaders=1 directed=0\n1 2 1\n2 3 -1", "edges")
    assert d.mode == "exact"
    assert d.A.tolist() == [[0, 1, 0], [1, 0, -1], [0, -1, 0]]


def test_arc_convention():
    d = parse_system("# n=2 leaders=1 directed=1\n1 2 5\n", "edges")
    assert d.A.tolist() == [[0, 0], [5, 0]]


def test_both_b_and_leaders():
    with pytest.raises(ConventionError):
        parse_system('{"n":1,"A":[[0]],"B":[[1]],"leaders":[1]}', "json")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"n":2,\n"A":[[0,1],[1,0]],,}', "line 2"),
        ('{"n":2,"A":[[0,1]],"leaders":[1]}', "field 'A'"),
        ('{"n":2,"edges":[[1,3,1]],"leaders":[1]}', "edges[0]"),
        ('{"n":2,"A":[[0,1],[1,0]]}', "'B' or 'leaders'"),
        ('{"n":2,"A":[[0,1],[1,0]],"leaders":[3]}', "leaders[0]"),
        ('{"n":2,"A":[[0,1],[2,0]],"leaders":[1],"directed":false}', "symmetric"),
        ('{"n":1,"A":[[0.5]],"leaders":[1],"mode":"exact"}', "exact"),
        ('{"n":1,"A":[["x"]],"leaders":[1]}', "A[1][1]"),
        ('{"n":2,"edges":[[1,2,1],[1,2,2]],"leaders":[1]}', "duplicate"),
    ],
)
def test_json_diagnostics(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_system(text, "json")
    assert fragment in str(info.value)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1 2 1\n", "header"),
        ("# n=2 leaders=1 directed=0\n1 2\n", "line 2"),
        ("# n=2 leaders=1 directed=0\n1 3 1\n", "line 2"),
        ("# n=2 leaders=1 directed=0\n\n1 2 x\n", "line 3"),
        ("# n=2 leaders=1 directed=2\n", "directed"),
    ],
)
def test_edge_diagnostics(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_system(text, "edges")
    assert fragment in str(info.value)


def test_mode_override(monkeypatch):
    monkeypatch.setenv("HERD_MODE", "float")
    d = parse_system("# n=2 leaders=1 directed=0\n1 2 1\n", "edges")
    assert d.mode == "float" and d.A.dtype == float
    monkeypatch.setenv("HERD_MODE", "exact")
    with pytest.raises(ParseError):
        parse_system("# n=2 leaders=1 directed=0\n1 2 0.5\n", "edges")


def test_leader_set_from_b():
    d = parse_system('{"n":3,"A":[[0,0,0],[0,0,0],[0,0,0]],"B":[[0],[0],[1]]}', "json")
    assert d.leader_set() == (2,)


@st.composite
def descriptors(draw):
    n = draw(st.integers(1, 5))
    directed = draw(st.booleans())
    use_float = draw(st.booleans())
    weight = st.floats(-5, 5, allow_nan=False).filter(lambda x: x != 0) if use_float else st.integers(-3, 3).filter(bool)
    edges = {}
    for i in range(n):
        for j in range(n):
            if (directed or i <= j) and draw(st.booleans()):
                edges[(i, j)] = draw(weight)
    leaders = draw(st.lists(st.integers(1, n), min_size=1, max_size=n, unique=True))
    doc = {
        "n": n,
        "edges": [[i + 1, j + 1, w] for (i, j), w in edges.items()],
        "leaders": leaders,
        "directed": directed,
        "mode": "float" if use_float else "exact",
    }
    return parse_system(json.dumps(doc), "json")


@settings(max_examples=100, deadline=None)
@given(descriptors(), st.sampled_from(["json", "edges"]))
def test_round_trip(desc, fmt):
    text = serialize_system(desc, fmt)
    again = parse_system(text, fmt)
    assert again == desc
    assert serialize_system(again, fmt) == text


@settings(max_examples=50, deadline=None)
@given(descriptors())
def test_edge_and_dense_forms_agree(desc):
    via_edges = parse_system(serialize_system(desc, "edges"), "edges")
    via_dense = parse_system(serialize_system(desc, "json"), "json")
    assert via_edges == via_dense


def test_report_format():
    text = dumps_report(make_report("Herdable", {"b": 1 / 3, "a": [1, 2]}, certificate=[1.0, -2]))
    doc = json.loads(text)
    assert doc["schema"] == SCHEMA and "arc_convention" in doc
    assert doc["details"]["b"] == 0.333333333333
    assert list(doc) == sorted(doc)
    assert text == dumps_report(make_report("Herdable", {"a": [1, 2], "b": 1 / 3}, certificate=[1.0, -2]))


def test_diagonal_pair_file():
    assert parse_diagonal_pair('{"lambda":[1,2],"gamma":[1,-1]}') == ([1, 2], [1, -1])
    with pytest.raises(ParseError):
        parse_diagonal_pair('{"lambda":[1],"gamma":[1,-1]}')
