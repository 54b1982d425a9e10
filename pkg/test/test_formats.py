"""
Tests for the text exchange formats of models, paths, reports and
properties.
Run with: pytest test/test_formats.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.dipath import make_path
from cubeabs.errors import ArgumentError, LoadError
from cubeabs.fixtures import builtin
from cubeabs.formats import (
    PropertySpec,
    dumps_hda,
    dumps_pcs,
    dumps_property,
    load_model,
    loads_hda,
    loads_paths,
    loads_pcs,
    loads_property,
    read_hda,
    read_paths,
    read_property,
    read_report,
    write_hda,
    write_paths,
    write_report,
)
from cubeabs.precubical import Violation, cube, validate_precubical
from cubeabs.reduce import reduce

INTERVAL = """hda v1
cube 0 dim 0
cube 1 dim 0
cube 2 dim 1
face 2 0 1 0
face 2 1 1 1
name 0 "0"
name 1 "1"
name 2 "[0,1]"
init 0
final 1
label 2 "a"
"""

PROPERTIES_DIR = project_root / "config" / "properties"


def test_dump_interval():
    assert dumps_hda(builtin("interval")) == INTERVAL


def test_load_interval():
    A = loads_hda(INTERVAL)
    assert A == builtin("interval")
    assert A.pcs.name(2) == "[0,1]"


def test_pcs_text():
    text = dumps_pcs(cube(2))
    assert text.startswith("pcs v1\ncube 0 dim 0\n")
    assert "face 8 0 2 6" in text
    assert loads_pcs(text) == cube(2)


def test_pcs_file_reads_as_bare_hda():
    A = loads_hda(dumps_pcs(cube(2)))
    assert not A.init and not A.final and not A.labels


def test_composite_labels_and_quoting(tmp_path):
    A = builtin("peterson-min")
    path = tmp_path / "model.hda"
    write_hda(A, path)
    text = path.read_text()
    assert '"b_0:=_0 1' in text
    assert read_hda(path) == A


def test_comments_are_skipped():
    text = INTERVAL.replace("cube 2 dim 1\n", "# the edge\n\ncube 2 dim 1\n")
    assert loads_hda(text) == builtin("interval")


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("hda v2\n", 1),
        ("pcs v1\ncube 0 dim\n", 2),
        ("pcs v1\ncube 0 dim 0\ncube 0 dim 0\n", 3),
        ("pcs v1\ncube x dim 0\n", 2),
        ("pcs v1\ncube 0 dim 0\nface 1 2 1 0\n", 3),
        ("pcs v1\ncube 0 dim 0\ninit 0\n", 3),
        ('pcs v1\nname 0 "open\n', 2),
        ("hda v1\ncube 0 dim 0\nlabel 0\n", 3),
    ],
)
def test_malformed_records(text, line):
    with pytest.raises(LoadError) as info:
        loads_hda(text)
    assert info.value.line == line


@pytest.mark.parametrize(
    "text",
    [
        "pcs v1\ncube 0 dim 0\ncube 1 dim 1\nface 1 0 1 0\n",
        "pcs v1\ncube 0 dim 0\ncube 1 dim 1\nface 1 0 1 0\nface 1 1 1 7\n",
        "pcs v1\ncube 0 dim 0\nface 0 0 1 0\nface 0 1 1 0\n",
        "hda v1\ncube 0 dim 0\ninit 3\n",
        'hda v1\ncube 0 dim 0\nlabel 4 "a"\n',
    ],
)
def test_structural_errors(text):
    with pytest.raises(LoadError):
        loads_hda(text)


def test_loading_does_not_validate():
    """An edge ending on an edge loads; validation reports it."""
    text = (
        "pcs v1\ncube 0 dim 0\ncube 1 dim 0\ncube 2 dim 1\ncube 3 dim 1\n"
        "face 2 0 1 0\nface 2 1 1 1\nface 3 0 1 0\nface 3 1 1 2\n"
    )
    report = validate_precubical(loads_pcs(text))
    assert not report.ok
    assert report.violations == (Violation("face-degree", 3, (1, 1, 2)),)


def test_load_model(tmp_path):
    assert load_model("builtin:square") == builtin("square")
    with pytest.raises(ArgumentError):
        load_model("builtin:nothing")
    with pytest.raises(ArgumentError, match="not found"):
        load_model(str(tmp_path / "missing.hda"))
    path = tmp_path / "interval.hda"
    path.write_text(INTERVAL)
    assert load_model(str(path)) == builtin("interval")


def test_paths_file(tmp_path):
    P = cube(2)
    paths = [make_path(P, 0, [4, 7]), make_path(P, 2)]
    target = tmp_path / "paths.txt"
    write_paths(paths, target)
    assert target.read_text() == "path 0 : 4 7\npath 2 : \n"
    loaded = read_paths(target)
    assert [(p.start, p.edges) for p in loaded] == [(0, (4, 7)), (2, ())]
    with pytest.raises(LoadError):
        loads_paths("path 0 4 7\n")


def test_report_file(tmp_path):
    _, report = reduce(builtin("square"))
    target = tmp_path / "square.red"
    write_report(report, target)
    assert read_report(target).to_text() == report.to_text()


def test_property_file_round_trip():
    spec = read_property(PROPERTIES_DIR / "mutex.prop")
    assert spec.templates == [
        ("mutual-exclusion", ["crit_0", "crit_1", "b_0:=_0 0", "b_1:=_1 0"])
    ]
    assert not spec.has_automaton
    assert loads_property(dumps_property(spec)) == spec


def test_explicit_automaton_property():
    spec = loads_property(
        "prop v1\n"
        "state p q\n"
        "init p\n"
        "acc p\n"
        "trans p a q\n"
        "trans q a p\n"
        "trans p b p\n"
        "trans q b q\n"
    )
    L = spec.build({"a", "b"})
    assert L.accepts("a;b;a")
    assert not L.accepts("a;b")


def test_templates_and_automaton_are_conjoined():
    spec = loads_property(
        "prop v1\n"
        "template order-pattern a b\n"
        "state p\ninit p\nacc p\n"
        "trans p a p\ntrans p b p\n"
    )
    L = spec.build({"a", "b"})
    assert L.accepts("a;b")
    assert not L.accepts("b")


def test_property_errors():
    with pytest.raises(LoadError):
        loads_property("property\n")
    with pytest.raises(LoadError) as info:
        loads_property("prop v1\ntrans p a\n")
    assert info.value.line == 2
    with pytest.raises(ArgumentError):
        PropertySpec().build({"a"})


@pytest.mark.parametrize("name", ["mutex.prop", "starvation.prop", "progress.prop"])
def test_bundled_properties_build_for_peterson(name):
    A = builtin("peterson")
    L = read_property(PROPERTIES_DIR / name).build(A.letters)
    assert A.letters <= L.alphabet


if __name__ == "__main__":
    pytest.main([__file__])
