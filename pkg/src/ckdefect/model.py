"""Language-neutral class model and its JSON interchange document.

A :class:`ClassModel` holds class declarations keyed by name, with single
inheritance links and per-method invocation records.  Names that are
referenced (as superclass or call receiver) but not declared live in
``externals``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

SELF = "<self>"

_DOC_KEYS = {"classes"}
_CLASS_KEYS = {"name", "extends", "methods"}
_METHOD_KEYS = {"name", "arity", "decision_points", "calls"}
_CALL_KEYS = {"receiver", "method", "arity"}


class ModelError(ValueError):
    """Raised when a class-model document or build cannot produce a valid model."""


class SchemaError(ModelError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class DuplicateClassError(ModelError):
    def __init__(self, name: str, locations: Iterable[str] = ()):
        self.name = name
        self.locations = tuple(sorted(locations))
        where = f" (in {', '.join(self.locations)})" if self.locations else ""
        super().__init__(f"duplicate class {name!r}{where}")


class InheritanceCycleError(ModelError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("inheritance cycle: " + " -> ".join(cycle + cycle[:1]))


@dataclass(frozen=True, order=True)
class MethodRef:
    receiver_key: str
    method_name: str
    arity: int


@dataclass(frozen=True)
class MethodDecl:
    name: str
    arity: int = 0
    decision_points: int = 0
    invocations: frozenset[MethodRef] = frozenset()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    superclass: str | None = None
    methods: tuple[MethodDecl, ...] = ()


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


@dataclass(frozen=True)
class ClassModel:
    """Immutable set of classes plus the external names they reference.

    Construction does not validate; use :func:`validate` or build through
    :func:`ingest_model` / the source frontend.
    """

    classes: Mapping[str, ClassDecl] = field(default_factory=dict)
    externals: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        # canonical ordering so equal models compare and serialize identically
        ordered = {k: self.classes[k] for k in sorted(self.classes)}
        object.__setattr__(self, "classes", ordered)
        object.__setattr__(self, "externals", frozenset(self.externals))

    def __hash__(self) -> int:
        return hash((tuple(self.classes.items()), self.externals))

    def superclass_of(self, name: str) -> str | None:
        return self.classes[name].superclass


def find_cycle(parents: Mapping[str, str | None]) -> list[str] | None:
    """Return one inheritance cycle among ``parents`` (self-loops excluded).

    The cycle starts at its lexicographically smallest member.
    """
    state: dict[str, int] = {}
    for start in sorted(parents):
        path: list[str] = []
        node: str | None = start
        while node is not None and node in parents and state.get(node, 0) == 0:
            state[node] = 1
            path.append(node)
            nxt = parents[node]
            node = None if nxt == path[-1] else nxt
        if node is not None and state.get(node) == 1 and node in path:
            cycle = path[path.index(node):]
            if len(cycle) > 1:
                i = cycle.index(min(cycle))
                return cycle[i:] + cycle[:i]
        for n in path:
            state[n] = 2
    return None


def validate(model: ClassModel) -> list[Diagnostic]:
    """Check every ClassModel invariant; one diagnostic per violation."""
    diags: list[Diagnostic] = []
    known = set(model.classes) | set(model.externals)
    for key, cls in model.classes.items():
        if key != cls.name:
            diags.append(Diagnostic("key-mismatch", f"class stored under {key!r} is named {cls.name!r}"))
        if cls.superclass is not None:
            if cls.superclass == cls.name:
                diags.append(Diagnostic("self-superclass", f"class {cls.name!r} extends itself"))
            elif cls.superclass not in known:
                diags.append(Diagnostic(
                    "unresolved-superclass",
                    f"superclass {cls.superclass!r} of {cls.name!r} is neither declared nor external",
                ))
        seen: set[tuple[str, int]] = set()
        for m in cls.methods:
            where = f"{cls.name}.{m.name}/{m.arity}"
            if not m.name:
                diags.append(Diagnostic("empty-name", f"method with empty name in {cls.name!r}"))
            if m.arity < 0:
                diags.append(Diagnostic("negative-arity", f"{where} has negative arity"))
            if m.decision_points < 0:
                diags.append(Diagnostic("negative-decisions", f"{where} has negative decision_points"))
            if (m.name, m.arity) in seen:
                diags.append(Diagnostic("duplicate-method", f"{where} declared more than once"))
            seen.add((m.name, m.arity))
            for ref in sorted(m.invocations):
                if not ref.method_name:
                    diags.append(Diagnostic("empty-name", f"call with empty method name in {where}"))
                if ref.arity < 0:
                    diags.append(Diagnostic("negative-arity", f"call {ref.method_name} in {where} has negative arity"))
                if ref.receiver_key != SELF and ref.receiver_key not in known:
                    diags.append(Diagnostic(
                        "unresolved-receiver",
                        f"receiver {ref.receiver_key!r} in {where} is neither declared nor external",
                    ))
    overlap = set(model.classes) & set(model.externals)
    for name in sorted(overlap):
        diags.append(Diagnostic("external-declared", f"{name!r} is both declared and external"))
    parents = {n: c.superclass for n, c in model.classes.items()}
    cycle = find_cycle(parents)
    if cycle:
        diags.append(Diagnostic("inheritance-cycle", "inheritance cycle: " + " -> ".join(cycle + cycle[:1])))
    return diags


# -- interchange document ----------------------------------------------------

def _expect(obj: Any, kind: type, path: str) -> Any:
    if kind is int:
        ok = isinstance(obj, int) and not isinstance(obj, bool)
    else:
        ok = isinstance(obj, kind)
    if not ok:
        raise SchemaError(path, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def _check_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    for k in obj:
        if k not in allowed:
            raise SchemaError(f"{path}.{k}", "unknown key")
    for k in sorted(required):
        if k not in obj:
            raise SchemaError(f"{path}.{k}", "missing required key")


def _identifier(obj: Any, path: str) -> str:
    s = _expect(obj, str, path)
    if not s:
        raise SchemaError(path, "must be a non-empty string")
    return s


def _count(obj: Any, path: str) -> int:
    n = _expect(obj, int, path)
    if n < 0:
        raise SchemaError(path, "must be non-negative")
    return n


def ingest_model(document: Mapping[str, Any] | str) -> ClassModel:
    """Build a validated :class:`ClassModel` from an interchange document.

    ``document`` is either the parsed JSON object or its text.  Receivers and
    superclasses that name no declared class are recorded as externals.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
    _expect(document, dict, "$")
    _check_keys(document, _DOC_KEYS, _DOC_KEYS, "$")
    raw_classes = _expect(document["classes"], list, "$.classes")

    parsed: list[tuple[str, str | None, list[tuple[str, int, int, list[tuple[str, str, int]]]]]] = []
    for i, entry in enumerate(raw_classes):
        cpath = f"$.classes[{i}]"
        _expect(entry, dict, cpath)
        _check_keys(entry, _CLASS_KEYS, {"name"}, cpath)
        name = _identifier(entry["name"], f"{cpath}.name")
        sup = entry.get("extends")
        if sup is not None:
            sup = _identifier(sup, f"{cpath}.extends")
        methods = []
        for j, m in enumerate(_expect(entry.get("methods", []), list, f"{cpath}.methods")):
            mpath = f"{cpath}.methods[{j}]"
            _expect(m, dict, mpath)
            _check_keys(m, _METHOD_KEYS, {"name", "arity"}, mpath)
            calls = []
            for k, c in enumerate(_expect(m.get("calls", []), list, f"{mpath}.calls")):
                kpath = f"{mpath}.calls[{k}]"
                _expect(c, dict, kpath)
                _check_keys(c, _CALL_KEYS, _CALL_KEYS, kpath)
                calls.append((
                    _identifier(c["receiver"], f"{kpath}.receiver"),
                    _identifier(c["method"], f"{kpath}.method"),
                    _count(c["arity"], f"{kpath}.arity"),
                ))
            methods.append((
                _identifier(m["name"], f"{mpath}.name"),
                _count(m["arity"], f"{mpath}.arity"),
                _count(m.get("decision_points", 0), f"{mpath}.decision_points"),
                calls,
            ))
        parsed.append((name, sup, methods))

    declared: set[str] = set()
    for name, _, _ in parsed:
        if name in declared:
            raise DuplicateClassError(name)
        declared.add(name)

    externals: set[str] = set()
    classes: dict[str, ClassDecl] = {}
    for name, sup, methods in parsed:
        if sup is not None and sup not in declared:
            externals.add(sup)
        decls = []
        for mname, arity, dp, calls in methods:
            refs = set()
            for receiver, callee, carity in calls:
                key = SELF if receiver == "self" else receiver
                if key != SELF and key not in declared:
                    externals.add(key)
                refs.add(MethodRef(key, callee, carity))
            decls.append(MethodDecl(mname, arity, dp, frozenset(refs)))
        classes[name] = ClassDecl(name, sup, tuple(decls))

    model = ClassModel(classes, frozenset(externals))
    cycle = find_cycle({n: c.superclass for n, c in model.classes.items()})
    if cycle:
        raise InheritanceCycleError(cycle)
    diags = validate(model)
    if diags:
        raise ModelError("; ".join(str(d) for d in diags))
    return model


def serialize_model(model: ClassModel) -> dict[str, Any]:
    """Inverse of :func:`ingest_model` (externals are implied by references)."""
    classes = []
    for cls in model.classes.values():
        entry: dict[str, Any] = {"name": cls.name}
        if cls.superclass is not None:
            entry["extends"] = cls.superclass
        entry["methods"] = [
            {
                "name": m.name,
                "arity": m.arity,
                "decision_points": m.decision_points,
                "calls": [
                    {
                        "receiver": "self" if r.receiver_key == SELF else r.receiver_key,
                        "method": r.method_name,
                        "arity": r.arity,
                    }
                    for r in sorted(m.invocations)
                ],
            }
            for m in cls.methods
        ]
        classes.append(entry)
    return {"classes": classes}


def load_model_document(path: str) -> ClassModel:
    with open(path, encoding="utf-8") as fh:
        return ingest_model(fh.read())
