"""Source frontend: Java-like files to a :class:`~ckdefect.model.ClassModel`."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable

from ..model import (
    SELF, ClassDecl, ClassModel, DuplicateClassError, InheritanceCycleError,
    MethodDecl, MethodRef, ModelError, find_cycle, validate,
)
from .lexer import LexError, Token, TokenKind, tokenize
from .parser import ParseError, SourceUnit, parse_unit

__all__ = [
    "LexError", "ParseError", "SourceUnit", "Token", "TokenKind",
    "build_model", "discover_sources", "load_sources", "parse_file", "parse_source", "parse_unit", "tokenize",
]

DEFAULT_SUFFIXES = (".java",)


def parse_source(text: str, path: str = "<string>") -> SourceUnit:
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise ParseError(str(exc).split(": ", 1)[1], Token(TokenKind.EOI, "", exc.line, exc.column), path) from exc
    return parse_unit(tokens, path)


def parse_file(path: str | os.PathLike) -> SourceUnit:
    with open(path, encoding="utf-8") as fh:
        return parse_source(fh.read(), str(path))


def discover_sources(paths: Iterable[str | os.PathLike], suffixes: Iterable[str] = DEFAULT_SUFFIXES) -> list[Path]:
    """Expand files and directories into a sorted list of matching source files."""
    suffixes = tuple(suffixes)
    found: set[Path] = set()
    for p in map(Path, paths):
        if p.is_dir():
            found.update(f for f in p.rglob("*") if f.is_file() and f.name.endswith(suffixes))
        elif p.is_file():
            found.add(p)
        else:
            raise FileNotFoundError(f"no such file or directory: {p}")
    return sorted(found)


def build_model(units: Iterable[SourceUnit]) -> ClassModel:
    """Merge parsed units and resolve names against all declared classes.

    Superclasses and receivers that name no declared class become externals.
    The result does not depend on the order of ``units``.
    """
    owners: dict[str, list[str]] = {}
    decls: dict[str, ClassDecl] = {}
    for unit in units:
        for cls in unit.declared_classes:
            owners.setdefault(cls.name, []).append(unit.path)
            decls[cls.name] = cls
    for name in sorted(owners):
        if len(owners[name]) > 1:
            raise DuplicateClassError(name, owners[name])

    externals: set[str] = set()

    def resolve(name: str) -> str:
        if name != SELF and name not in decls:
            externals.add(name)
        return name

    classes = {}
    for name, cls in decls.items():
        sup = resolve(cls.superclass) if cls.superclass is not None else None
        methods = tuple(
            MethodDecl(
                m.name, m.arity, m.decision_points,
                frozenset(MethodRef(resolve(r.receiver_key), r.method_name, r.arity) for r in m.invocations),
            )
            for m in cls.methods
        )
        classes[name] = ClassDecl(name, sup, methods)
    model = ClassModel(classes, frozenset(externals))
    cycle = find_cycle({n: c.superclass for n, c in model.classes.items()})
    if cycle:
        raise InheritanceCycleError(cycle)
    diags = validate(model)
    if diags:
        raise ModelError("; ".join(str(d) for d in diags))
    return model


def load_sources(paths: Iterable[str | os.PathLike], suffixes: Iterable[str] = DEFAULT_SUFFIXES) -> ClassModel:
    return build_model(parse_file(f) for f in discover_sources(paths, suffixes))
