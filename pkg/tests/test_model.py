import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckdefect.model import (
    SELF, ClassDecl, ClassModel, DuplicateClassError, InheritanceCycleError, MethodDecl, MethodRef,
    SchemaError, ingest_model, serialize_model, validate,
)


def test_minimal_document():
    model = ingest_model({"classes": [{"name": "A"}]})
    assert list(model.classes) == ["A"]
    assert model.externals == frozenset()
    assert model.classes["A"] == ClassDecl("A", None, ())


def test_two_class_cycle_names_both():
    doc = {"classes": [{"name": "A", "extends": "B"}, {"name": "B", "extends": "A"}]}
    with pytest.raises(InheritanceCycleError) as exc:
        ingest_model(doc)
    assert exc.value.cycle == ["A", "B"]


def test_longer_cycle_starts_at_smallest_name():
    doc = {"classes": [
        {"name": "Z", "extends": "X"}, {"name": "X", "extends": "Y"},
        {"name": "Y", "extends": "Z"}, {"name": "Root"}, {"name": "Leaf", "extends": "Root"},
    ]}
    with pytest.raises(InheritanceCycleError) as exc:
        ingest_model(doc)
    assert exc.value.cycle == ["X", "Y", "Z"]


def test_undeclared_superclass_becomes_external():
    model = ingest_model({"classes": [{"name": "A", "extends": "Framework"}]})
    assert model.externals == {"Framework"}


def test_receivers_resolve_self_and_externals():
    model = ingest_model({"classes": [
        {"name": "A", "methods": [{"name": "m", "arity": 0, "calls": [
            {"receiver": "self", "method": "n", "arity": 0},
            {"receiver": "B", "method": "k", "arity": 2},
            {"receiver": "Sys", "method": "out", "arity": 1},
        ]}]},
        {"name": "B"},
    ]})
    calls = model.classes["A"].methods[0].invocations
    assert calls == {MethodRef(SELF, "n", 0), MethodRef("B", "k", 2), MethodRef("Sys", "out", 1)}
    assert model.externals == {"Sys"}


def test_duplicate_class_rejected():
    with pytest.raises(DuplicateClassError):
        ingest_model({"classes": [{"name": "A"}, {"name": "A"}]})


@pytest.mark.parametrize("doc, path", [
    ({"classes": [{"name": "A", "color": "red"}]}, "$.classes[0].color"),
    ({"klasses": []}, "$.klasses"),
    ({"classes": [{"name": "A", "methods": [{"name": "m"}]}]}, "$.classes[0].methods[0].arity"),
    ({"classes": [{"name": "A", "methods": [{"name": "m", "arity": -1}]}]}, "$.classes[0].methods[0].arity"),
    ({"classes": [{"name": 3}]}, "$.classes[0].name"),
    ({"classes": [{"name": ""}]}, "$.classes[0].name"),
    ({"classes": [{"name": "A", "methods": [{"name": "m", "arity": 0, "calls": [
        {"receiver": "B", "method": "x"}]}]}]}, "$.classes[0].methods[0].calls[0].arity"),
    ({"classes": [{"name": "A", "methods": [{"name": "m", "arity": True}]}]}, "$.classes[0].methods[0].arity"),
    ({"classes": {}}, "$.classes"),
])
def test_schema_violations_name_the_path(doc, path):
    with pytest.raises(SchemaError) as exc:
        ingest_model(doc)
    assert exc.value.path == path


def test_invalid_json_text():
    with pytest.raises(SchemaError):
        ingest_model("{not json")


def test_validate_clean_chain():
    model = ClassModel({
        "A": ClassDecl("A"), "B": ClassDecl("B", "A"), "C": ClassDecl("C", "B"),
    })
    assert validate(model) == []


def test_validate_duplicate_method():
    cls = ClassDecl("A", None, (MethodDecl("m", 1), MethodDecl("m", 1), MethodDecl("m", 2)))
    diags = validate(ClassModel({"A": cls}))
    assert [d.code for d in diags] == ["duplicate-method"]


def test_validate_self_superclass_single_diagnostic():
    diags = validate(ClassModel({"A": ClassDecl("A", "A")}))
    assert [d.code for d in diags] == ["self-superclass"]


def test_validate_reports_cycle_and_unresolved():
    model = ClassModel({
        "A": ClassDecl("A", "B"), "B": ClassDecl("B", "A"), "C": ClassDecl("C", "Missing"),
    })
    codes = sorted(d.code for d in validate(model))
    assert codes == ["inheritance-cycle", "unresolved-superclass"]


def test_validate_does_not_mutate():
    model = ClassModel({"A": ClassDecl("A", "A")})
    before = serialize_model(model)
    validate(model)
    assert serialize_model(model) == before


def test_model_is_immutable():
    model = ingest_model({"classes": [{"name": "A"}]})
    with pytest.raises(AttributeError):
        model.externals = frozenset({"X"})


# -- round-trip property -------------------------------------------------------

names = st.sampled_from(["A", "B", "C", "D", "E", "Ext", "Lib"])


@st.composite
def documents(draw):
    declared = draw(st.lists(st.sampled_from(["A", "B", "C", "D", "E"]), unique=True, min_size=1, max_size=5))
    classes = []
    for i, name in enumerate(declared):
        entry = {"name": name}
        # parent among earlier classes or an external keeps the graph acyclic
        parent = draw(st.one_of(st.none(), st.sampled_from(declared[:i] + ["Ext"])))
        if parent is not None:
            entry["extends"] = parent
        methods = []
        for mname in draw(st.lists(st.sampled_from(["f", "g", "h", "k"]), unique=True, max_size=4)):
            calls = draw(st.lists(st.fixed_dictionaries({
                "receiver": st.one_of(st.just("self"), names),
                "method": st.sampled_from(["f", "g", "x"]),
                "arity": st.integers(0, 3),
            }), max_size=4))
            methods.append({
                "name": mname, "arity": draw(st.integers(0, 3)),
                "decision_points": draw(st.integers(0, 5)), "calls": calls,
            })
        entry["methods"] = methods
        classes.append(entry)
    return {"classes": classes}


@settings(max_examples=200, deadline=None)
@given(documents())
def test_serialize_ingest_round_trip(doc):
    model = ingest_model(doc)
    assert validate(model) == []
    again = ingest_model(json.loads(json.dumps(serialize_model(model))))
    assert again == model


@settings(max_examples=100, deadline=None)
@given(documents())
def test_ingest_is_deterministic(doc):
    assert ingest_model(doc) == ingest_model(json.loads(json.dumps(doc)))
