import pytest

from mechlab.cli import gallery_dir
from mechlab.dsl import DSLError, parse_system_file, parse_system_text, serialize
from mechlab.exterior import MultiVector

GALLERY = sorted(gallery_dir().glob("*.mech"))


def test_gallery_present():
    names = {p.stem for p in GALLERY}
    assert {"su2", "sb2", "dldd96", "presuno", "central", "gram"} <= names


@pytest.mark.parametrize("path", GALLERY, ids=lambda p: p.stem)
def test_round_trip(path):
    doc = parse_system_file(path)
    text = serialize(doc)
    again = parse_system_text(text)
    assert again == doc
    assert serialize(again) == text


def test_su2_document():
    doc = parse_system_file(gallery_dir() / "su2.mech")
    chart = next(iter(doc.charts.values()))
    biv = [doc.get(n) for n in doc.names("multivector")]
    x1, x2, x3 = chart.coords()[:3]
    su2 = MultiVector(chart, 2, {(0, 1): x3, (1, 2): x1, (2, 0): x2})
    assert any(b == su2 for b in biv)
    lets = [doc.get(n) for n in doc.names("let")]
    assert any(e == x1 * x1 + x2 * x2 + x3 * x3 for e in lets)


def test_empty_file():
    for text in ("", "\n\n", "# comment only\n"):
        doc = parse_system_text(text)
        assert doc.decls == [] and doc.runs == []


@pytest.mark.parametrize("text,line,col,fragment", [
    ("chart P = (q, p)\nlet H @ Q = q^2\n", 2, 9, "unknown chart"),
    ("chart P = (q, p)\nlet H @ P = q^^2\n", 2, 15, "syntax error"),
    ("chart P = (q, p)\nlet H @ P = q\nlet H @ P = p\n", 3, 5, "already defined"),
    ("chart P = (q, p)\nfield X @ P = q: 1; r: 2\n", 2, 21, "not a variable"),
    ("chart P = (q, p)\nsystem s @ P structure=L H=H\n", 2, 24, "undefined name"),
    ("frob x y\n", 1, 1, "unknown declaration"),
    ("chart P = (q, p)\nmatrix M = [[1, 2], [3]]\n", 2, 12, "rows of different lengths"),
    ("chart P = (q, p)\nlet H @ P = foo\n", 2, 13, "unknown identifier"),
])
def test_errors_carry_position(text, line, col, fragment):
    with pytest.raises(DSLError) as ei:
        parse_system_text(text, "bad.mech")
    e = ei.value
    assert (e.line, e.col) == (line, col)
    assert fragment in str(e)
    assert str(e).startswith(f"bad.mech:{line}:{col}:")


def test_comments_and_blank_lines():
    doc = parse_system_text("# header\n\nchart P = (q, p)   # canonical\nlet H @ P = (q^2 + p^2)/2\n")
    P = doc.charts["P"]
    q, p = P.coords()
    assert doc.get("H") == (q * q + p * p) / 2
