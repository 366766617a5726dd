"""Recursive-descent parser for class/method structure of the source subset.

Declarations (classes, members, parameter lists) are parsed strictly and a
malformed one raises :class:`ParseError`.  Method bodies are only scanned:
the scanner looks for local declarations, invocations and decision points
and steps over anything else one token at a time, so body noise is never
fatal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import SELF, ClassDecl, MethodDecl, MethodRef
from .lexer import Token, TokenKind

MODIFIERS = frozenset({
    "public", "private", "protected", "static", "final", "abstract", "native",
    "synchronized", "transient", "volatile", "strictfp", "default",
})
PRIMITIVES = frozenset({"boolean", "byte", "char", "short", "int", "long", "float", "double", "void"})
DECISION_KEYWORDS = frozenset({"if", "for", "while", "case", "catch"})
DECISION_OPERATORS = frozenset({"&&", "||"})
_TYPE_DECL_KEYWORDS = frozenset({"class", "interface", "enum"})
_DECL_FOLLOW = frozenset({"=", ";", ",", ":", ")", "["})
_STMT_START = frozenset({"{", "}", ";", ":"})
_OPEN = {"(": ")", "[": "]", "{": "}"}


class ParseError(ValueError):
    def __init__(self, message: str, token: Token, path: str = "<string>"):
        super().__init__(f"{path}:{token.line}:{token.column}: {message}")
        self.path = path
        self.line = token.line
        self.column = token.column


@dataclass
class SourceUnit:
    path: str
    declared_classes: list[ClassDecl]
    # scope ("Class" or "Class.method/arity") -> identifier -> declared type
    local_type_bindings: dict[str, dict[str, str]] = field(default_factory=dict)


@dataclass
class _PendingCall:
    receiver: str | None  # None: look up ``variable`` among fields at class end
    variable: str | None
    method: str
    arity: int


@dataclass
class _PendingMethod:
    name: str
    arity: int
    decision_points: int
    calls: list[_PendingCall]


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        if not tokens or tokens[-1].kind is not TokenKind.EOI:
            raise ValueError("token list must end with end-of-input")
        self.toks = tokens
        self.path = path
        self.pos = 0
        self.bindings: dict[str, dict[str, str]] = {}

    # -- token helpers -------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind is not TokenKind.EOI:
            self.pos += 1
        return tok

    def at_punct(self, text: str, k: int = 0) -> bool:
        return self.peek(k).is_punct(text)

    def at_keyword(self, *words: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind is TokenKind.KEYWORD and tok.text in words

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        found = "end of input" if tok.kind is TokenKind.EOI else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok, self.path)

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        if self.peek().kind is not TokenKind.IDENTIFIER:
            raise self.error(f"expected {what}")
        return self.advance()

    def match_close(self, open_index: int) -> int:
        """Index of the bracket closing the one at ``open_index``."""
        stack = [_OPEN[self.toks[open_index].text]]
        i = open_index + 1
        while stack:
            tok = self.toks[i]
            if tok.kind is TokenKind.EOI:
                raise self.error(f"unbalanced {self.toks[open_index].text!r}", self.toks[open_index])
            if tok.kind is TokenKind.PUNCTUATION:
                if tok.text in _OPEN:
                    stack.append(_OPEN[tok.text])
                elif tok.text == stack[-1]:
                    stack.pop()
                elif tok.text in (")", "]", "}"):
                    # mismatched closer inside a body; only braces delimit bodies
                    if tok.text == "}" and "}" in stack:
                        while stack[-1] != "}":
                            stack.pop()
                        stack.pop()
            i += 1
        return i - 1

    def skip_balanced(self) -> None:
        self.pos = self.match_close(self.pos) + 1

    def skip_type_args(self) -> None:
        """Skip ``<...>`` starting at the current '<'."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOI:
                raise self.error("unterminated type arguments")
            if tok.kind is TokenKind.PUNCTUATION:
                if tok.text == "<":
                    depth += 1
                elif tok.text in (">", ">>", ">>>"):
                    depth -= len(tok.text)
                elif tok.text in (";", "{", "}", ")"):
                    raise self.error("malformed type arguments")
            self.advance()
            if depth <= 0:
                return

    def skip_modifiers(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.KEYWORD and tok.text in MODIFIERS:
                self.advance()
            elif tok.kind is TokenKind.IDENTIFIER and tok.text in ("sealed",) and self.peek(1).kind in (
                TokenKind.KEYWORD, TokenKind.IDENTIFIER
            ):
                self.advance()
            elif tok.is_punct("@") and not self.at_keyword("interface", k=1):
                self.advance()
                self.expect_ident("annotation name")
                while self.at_punct(".") and self.peek(1).kind is TokenKind.IDENTIFIER:
                    self.advance()
                    self.advance()
                if self.at_punct("("):
                    self.skip_balanced()
            else:
                return

    # -- types ---------------------------------------------------------------

    def at_type_start(self) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.IDENTIFIER or (tok.kind is TokenKind.KEYWORD and tok.text in PRIMITIVES)

    def parse_type(self) -> str:
        """Parse a type and return its simple (last-segment) name."""
        if not self.at_type_start():
            raise self.error("expected type")
        name = self.advance().text
        if self.at_punct("<"):
            self.skip_type_args()
        while self.at_punct(".") and self.peek(1).kind is TokenKind.IDENTIFIER:
            self.advance()
            name = self.advance().text
            if self.at_punct("<"):
                self.skip_type_args()
        while self.at_punct("[") and self.at_punct("]", k=1):
            self.advance()
            self.advance()
        return name

    def parse_type_list(self) -> list[str]:
        names = [self.parse_type()]
        while self.at_punct(","):
            self.advance()
            names.append(self.parse_type())
        return names

    # -- declarations --------------------------------------------------------

    def parse_unit(self) -> SourceUnit:
        classes: list[ClassDecl] = []
        seen: dict[str, Token] = {}
        while self.peek().kind is not TokenKind.EOI:
            if self.at_keyword("package", "import"):
                while not self.at_punct(";"):
                    if self.peek().kind is TokenKind.EOI:
                        raise self.error("expected ';'")
                    self.advance()
                self.advance()
                continue
            if self.at_punct(";"):
                self.advance()
                continue
            self.skip_modifiers()
            if self.at_keyword("class"):
                start = self.peek(1)
                cls = self.parse_class()
                if cls.name in seen:
                    raise ParseError(f"duplicate class {cls.name!r} in unit", start, self.path)
                seen[cls.name] = start
                classes.append(cls)
            elif self.at_type_decl_other():
                self.skip_type_decl()
            else:
                raise self.error("expected class declaration")
        return SourceUnit(self.path, classes, self.bindings)

    def at_type_decl_other(self) -> bool:
        if self.at_keyword("interface", "enum"):
            return True
        if self.at_punct("@") and self.at_keyword("interface", k=1):
            return True
        return self.peek().text == "record" and self.peek().kind is TokenKind.IDENTIFIER and (
            self.peek(1).kind is TokenKind.IDENTIFIER
        )

    def skip_type_decl(self) -> None:
        """Skip an interface/enum/record/nested class up to its closing brace."""
        start = self.peek()
        while not self.at_punct("{"):
            if self.peek().kind is TokenKind.EOI or self.at_punct(";") or self.at_punct("}"):
                raise self.error("expected '{' in type declaration", start)
            self.advance()
        self.skip_balanced()

    def parse_class(self) -> ClassDecl:
        self.advance()  # 'class'
        name = self.expect_ident("class name").text
        if self.at_punct("<"):
            self.skip_type_args()
        superclass = None
        if self.at_keyword("extends"):
            self.advance()
            superclass = self.parse_type()
        if self.at_keyword("implements"):
            self.advance()
            self.parse_type_list()
        self.expect_punct("{")

        fields: dict[str, str] = {}
        methods: list[_PendingMethod] = []
        while not self.at_punct("}"):
            if self.peek().kind is TokenKind.EOI:
                raise self.error(f"unterminated class {name!r}")
            self.parse_member(name, superclass, fields, methods)
        self.advance()

        self.bindings[name] = dict(fields)
        decls: list[MethodDecl] = []
        index: dict[tuple[str, int], int] = {}
        for pm in methods:
            refs = frozenset(self.resolve_call(c, fields) for c in pm.calls)
            decl = MethodDecl(pm.name, pm.arity, pm.decision_points, refs)
            key = (pm.name, pm.arity)
            if key in index:
                # overloads that differ only in parameter types share an identity
                prev = decls[index[key]]
                decls[index[key]] = MethodDecl(
                    prev.name, prev.arity,
                    prev.decision_points + decl.decision_points,
                    prev.invocations | decl.invocations,
                )
            else:
                index[key] = len(decls)
                decls.append(decl)
        return ClassDecl(name, superclass, tuple(decls))

    @staticmethod
    def resolve_call(call: _PendingCall, fields: dict[str, str]) -> MethodRef:
        receiver = call.receiver
        if receiver is None:
            receiver = fields.get(call.variable, call.variable)
        return MethodRef(receiver, call.method, call.arity)

    def parse_member(
        self, cls: str, superclass: str | None, fields: dict[str, str], methods: list[_PendingMethod]
    ) -> None:
        if self.at_punct(";"):
            self.advance()
            return
        self.skip_modifiers()
        if self.at_punct("{"):
            self.skip_balanced()  # initializer block
            return
        if self.at_keyword(*_TYPE_DECL_KEYWORDS) or self.at_type_decl_other():
            self.skip_type_decl()
            return
        if self.at_punct("<"):
            self.skip_type_args()
        tok = self.peek()
        if tok.kind is TokenKind.IDENTIFIER and tok.text == cls and self.at_punct("(", k=1):
            self.advance()
            methods.append(self.parse_method_rest(cls, cls, superclass, fields))
            return
        type_name = self.parse_type()
        member = self.expect_ident("member name").text
        if self.at_punct("("):
            methods.append(self.parse_method_rest(member, cls, superclass, fields))
            return
        fields[member] = type_name
        # field declarators: skip initializers, record further names
        while True:
            while self.at_punct("[") and self.at_punct("]", k=1):
                self.advance()
                self.advance()
            if self.at_punct("="):
                self.advance()
                while not (self.at_punct(",") or self.at_punct(";")):
                    if self.peek().kind is TokenKind.EOI or self.at_punct("}"):
                        raise self.error("expected ';' after field declaration")
                    if self.peek().text in _OPEN and self.peek().kind is TokenKind.PUNCTUATION:
                        self.skip_balanced()
                    else:
                        self.advance()
            if self.at_punct(","):
                self.advance()
                fields[self.expect_ident("field name").text] = type_name
                continue
            self.expect_punct(";")
            return

    def parse_method_rest(
        self, name: str, cls: str, superclass: str | None, fields: dict[str, str]
    ) -> _PendingMethod:
        self.expect_punct("(")
        params: dict[str, str] = {}
        arity = 0
        if not self.at_punct(")"):
            while True:
                self.skip_modifiers()
                ptype = self.parse_type()
                if self.at_punct("..."):
                    self.advance()
                pname = self.expect_ident("parameter name").text
                while self.at_punct("[") and self.at_punct("]", k=1):
                    self.advance()
                    self.advance()
                params[pname] = ptype
                arity += 1
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        while self.at_punct("[") and self.at_punct("]", k=1):
            self.advance()
            self.advance()
        if self.at_keyword("throws"):
            self.advance()
            self.parse_type_list()
        scope = f"{cls}.{name}/{arity}"
        if self.at_punct(";"):
            self.advance()
            self.bindings[scope] = params
            return _PendingMethod(name, arity, 0, [])
        if not self.at_punct("{"):
            raise self.error("expected method body or ';'")
        open_index = self.pos
        close_index = self.match_close(open_index)
        scanner = _BodyScanner(self.toks, open_index, close_index, params, superclass)
        scanner.scan()
        self.bindings[scope] = scanner.bindings
        self.pos = close_index + 1
        return _PendingMethod(name, arity, scanner.decision_points, scanner.calls)


class _BodyScanner:
    """Token-by-token scan of one method body (exclusive of its braces)."""

    def __init__(
        self, toks: list[Token], open_index: int, close_index: int,
        params: dict[str, str], superclass: str | None,
    ):
        self.toks = toks
        self.lo = open_index
        self.hi = close_index
        self.bindings = dict(params)
        self.superclass = superclass
        self.decision_points = 0
        self.calls: list[_PendingCall] = []

    def tok(self, i: int) -> Token:
        return self.toks[i]

    def punct(self, i: int, text: str) -> bool:
        return self.lo <= i <= self.hi and self.toks[i].is_punct(text)

    def keyword(self, i: int, text: str) -> bool:
        return self.lo <= i <= self.hi and self.toks[i].is_keyword(text)

    def ident(self, i: int) -> bool:
        return self.lo < i < self.hi and self.toks[i].kind is TokenKind.IDENTIFIER

    def scan(self) -> None:
        i = self.lo + 1
        while i < self.hi:
            tok = self.toks[i]
            if tok.kind is TokenKind.KEYWORD:
                if tok.text in _TYPE_DECL_KEYWORDS and not self.punct(i - 1, "."):
                    i = self.skip_local_type(i)
                    continue
                if tok.text in DECISION_KEYWORDS:
                    self.decision_points += 1
            elif tok.kind is TokenKind.PUNCTUATION and tok.text in DECISION_OPERATORS:
                self.decision_points += 1
            if self.at_statement_start(i):
                self.try_local_declaration(i)
            if tok.kind is TokenKind.IDENTIFIER and self.punct(i + 1, "("):
                self.record_call(i)
            i += 1

    def skip_local_type(self, i: int) -> int:
        j = i
        while j < self.hi and not self.toks[j].is_punct("{"):
            if self.toks[j].is_punct(";"):
                return j + 1
            j += 1
        if j >= self.hi:
            return self.hi
        depth = 0
        while j < self.hi:
            t = self.toks[j]
            if t.is_punct("{"):
                depth += 1
            elif t.is_punct("}"):
                depth -= 1
                if depth == 0:
                    return j + 1
            j += 1
        return self.hi

    def at_statement_start(self, i: int) -> bool:
        prev = self.toks[i - 1]
        if prev.kind is TokenKind.PUNCTUATION and prev.text in _STMT_START:
            return True
        if prev.is_punct("(") and i - 2 >= self.lo:
            before = self.toks[i - 2]
            return before.kind is TokenKind.KEYWORD and before.text in ("for", "catch", "try")
        return False

    def try_local_declaration(self, i: int) -> None:
        j = i
        while j < self.hi:
            t = self.toks[j]
            if t.is_keyword("final"):
                j += 1
            elif t.is_punct("@") and self.ident(j + 1):
                j += 2
                if self.punct(j, "("):
                    return
            else:
                break
        t = self.toks[j]
        if not (t.kind is TokenKind.IDENTIFIER or (t.kind is TokenKind.KEYWORD and t.text in PRIMITIVES)):
            return
        type_name = t.text
        j += 1
        while True:
            if self.punct(j, "<"):
                depth = 0
                while j < self.hi:
                    p = self.toks[j]
                    if p.kind is not TokenKind.PUNCTUATION and p.kind is not TokenKind.IDENTIFIER and not (
                        p.kind is TokenKind.KEYWORD and p.text in PRIMITIVES | {"extends", "super"}
                    ):
                        return
                    if p.is_punct("<"):
                        depth += 1
                    elif p.kind is TokenKind.PUNCTUATION and p.text in (">", ">>", ">>>"):
                        depth -= len(p.text)
                    elif p.kind is TokenKind.PUNCTUATION and p.text not in (",", ".", "?", "[", "]", "&"):
                        return
                    j += 1
                    if depth <= 0:
                        break
                if depth != 0:
                    return
            if self.punct(j, ".") and self.ident(j + 1):
                type_name = self.toks[j + 1].text
                j += 2
                continue
            break
        while self.punct(j, "[") and self.punct(j + 1, "]"):
            j += 2
        if not self.ident(j):
            return
        name = self.toks[j].text
        follow = self.toks[j + 1]
        if follow.kind is TokenKind.PUNCTUATION and follow.text in _DECL_FOLLOW:
            self.bindings[name] = type_name

    def record_call(self, i: int) -> None:
        name = self.toks[i].text
        prev = self.toks[i - 1]
        arity = self.count_args(i + 1)
        if prev.is_punct("."):
            # only the first hop of a receiver chain is resolvable
            recv = self.toks[i - 2]
            chain_start = not self.punct(i - 3, ".")
            if recv.is_keyword("this") and chain_start:
                self.calls.append(_PendingCall(SELF, None, name, arity))
            elif recv.is_keyword("super") and chain_start:
                self.calls.append(_PendingCall(self.superclass or "Object", None, name, arity))
            elif recv.kind is TokenKind.IDENTIFIER and chain_start:
                var = recv.text
                self.calls.append(_PendingCall(self.bindings.get(var), var, name, arity))
            elif (
                recv.kind is TokenKind.IDENTIFIER
                and self.keyword(i - 4, "this")
                and not self.punct(i - 5, ".")
            ):
                # this.field.m(...)
                self.calls.append(_PendingCall(None, recv.text, name, arity))
            return
        if prev.is_keyword("new") or prev.kind is TokenKind.IDENTIFIER:
            return
        if prev.kind is TokenKind.KEYWORD and prev.text in PRIMITIVES:
            return
        if prev.is_punct("]") or prev.is_punct("::"):
            return
        self.calls.append(_PendingCall(SELF, None, name, arity))

    def count_args(self, open_index: int) -> int:
        depth = 0
        commas = 0
        nonempty = False
        j = open_index
        while j < self.hi:
            t = self.toks[j]
            if t.kind is TokenKind.PUNCTUATION and t.text in ("(", "[", "{"):
                depth += 1
                if depth > 1:
                    nonempty = True
            elif t.kind is TokenKind.PUNCTUATION and t.text in (")", "]", "}"):
                depth -= 1
                if depth == 0:
                    break
            elif depth == 1:
                nonempty = True
                if t.is_punct(","):
                    commas += 1
            j += 1
        return commas + 1 if nonempty else 0


def parse_unit(tokens: list[Token], path: str = "<string>") -> SourceUnit:
    """Parse one token stream into its declared classes."""
    return _Parser(tokens, path).parse_unit()
