"""Parsers for the three input languages: view specifications, fact files,
and update programs.

The grammar is line-oriented; statements end with a dot and `#` starts a
comment. Bare lowercase identifiers inside rules and updates are variables;
constants are double-quoted strings or digit-leading tokens. In fact files
every bare identifier is a constant. Every diagnostic carries a source span
pointing inside the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass

from .deps import (
    ConstraintSet,
    DB_CONSTRAINT,
    EGD,
    TGD,
    VIEW_CONSTRAINT,
    ViewSpec,
)
from .errors import ViewlensError
from .model import (
    Atom,
    CQ,
    Const,
    DATABASE,
    Fact,
    Instance,
    Schema,
    SymbolDecl,
    Term,
    VIEW,
    Var,
    make_instance,
)
from .updates import Condition, DELETE, INSERT, REPLACE, UpdateProgram, UpdateStep


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.code}: {self.message}"


class ParseError(ViewlensError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Lexer


_PUNCT_2 = ("->", ":-", "!=")
_PUNCT_1 = "(){},.;=/@:"


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | string | punct | eof
    text: str
    line: int
    column: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.column, max(1, len(self.text)))


def _lex(text: str, file: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diagnostics: list[Diagnostic] = []
    line, column = 1, 1
    i = 0
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, column
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                column = 1
            else:
                column += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start_line, start_column = line, column
        two = text[i : i + 2]
        if two in _PUNCT_2:
            tokens.append(_Token("punct", two, start_line, start_column))
            advance(2)
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                diagnostics.append(
                    Diagnostic(
                        "syntax",
                        "unterminated string constant",
                        SourceSpan(file, start_line, start_column, max(1, j - i)),
                    )
                )
                advance(j - i)
                continue
            tokens.append(_Token("string", text[i : j + 1], start_line, start_column))
            advance(j + 1 - i)
            continue
        if ch.isdigit():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("number", text[i:j], start_line, start_column))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], start_line, start_column))
            advance(j - i)
            continue
        if ch in _PUNCT_1:
            tokens.append(_Token("punct", ch, start_line, start_column))
            advance(1)
            continue
        diagnostics.append(
            Diagnostic("syntax", f"unexpected character {ch!r}", SourceSpan(file, start_line, start_column, 1))
        )
        advance(1)
    tokens.append(_Token("eof", "", line, column))
    return tokens, diagnostics


# ---------------------------------------------------------------------------
# Token stream with recovery


class _Stream:
    def __init__(self, tokens: list[_Token], file: str, diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.file = file
        self.pos = 0
        self.diagnostics = diagnostics

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, code: str, message: str, token: _Token | None = None) -> None:
        tok = token if token is not None else self.peek()
        self.diagnostics.append(Diagnostic(code, message, tok.span(self.file)))

    def expect_punct(self, text: str) -> _Token | None:
        if self.at(text):
            return self.take()
        self.error("syntax", f"expected {text!r}, found {self.peek().text!r}")
        return None

    def expect_ident(self, what: str) -> _Token | None:
        tok = self.peek()
        if tok.kind == "ident":
            return self.take()
        self.error("syntax", f"expected {what}, found {tok.text!r}")
        return None

    def skip_statement(self) -> None:
        """Recover by skipping to just past the next dot (or to end of a
        brace block)."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            self.take()
            if tok.kind == "punct" and tok.text == "{":
                depth += 1
            elif tok.kind == "punct" and tok.text == "}":
                if depth > 0:
                    depth -= 1
                    if depth == 0:
                        return
            elif tok.kind == "punct" and tok.text == "." and depth == 0:
                return


# ---------------------------------------------------------------------------
# Shared pieces


def _parse_rule_term(stream: _Stream) -> tuple[Term | None, _Token]:
    """A term in rule/update position: lowercase identifiers are variables,
    strings and digit-leading tokens are constants."""
    tok = stream.peek()
    if tok.kind == "string":
        stream.take()
        return Const(tok.text[1:-1]), tok
    if tok.kind == "number":
        stream.take()
        return Const(tok.text), tok
    if tok.kind == "ident":
        stream.take()
        if tok.text[0].islower() or tok.text[0] == "_":
            return Var(tok.text), tok
        stream.error(
            "syntax",
            f"bare identifier {tok.text!r} is not a variable; quote constants in rules",
            tok,
        )
        return None, tok
    stream.error("syntax", f"expected a term, found {tok.text!r}")
    return None, tok


def _parse_fact_term(stream: _Stream) -> tuple[Term | None, _Token]:
    """A term in fact position: every bare identifier is a constant."""
    tok = stream.peek()
    if tok.kind == "string":
        stream.take()
        return Const(tok.text[1:-1]), tok
    if tok.kind in ("number", "ident"):
        stream.take()
        return Const(tok.text), tok
    stream.error("syntax", f"expected a constant, found {tok.text!r}")
    return None, tok


def _parse_atom(stream: _Stream, term_parser) -> tuple[Atom | None, _Token | None, list[_Token]]:
    """IDENT '(' terms ')'. Returns (atom, symbol token, term tokens)."""
    symbol = stream.expect_ident("a relation symbol")
    if symbol is None:
        return None, None, []
    if stream.expect_punct("(") is None:
        return None, symbol, []
    args: list[Term] = []
    arg_tokens: list[_Token] = []
    ok = True
    if not stream.at(")"):
        while True:
            term, tok = term_parser(stream)
            arg_tokens.append(tok)
            if term is None:
                ok = False
            else:
                args.append(term)
            if stream.at(","):
                stream.take()
                continue
            break
    if stream.expect_punct(")") is None or not ok:
        return None, symbol, arg_tokens
    return Atom(symbol.text, tuple(args)), symbol, arg_tokens


def _check_atom(stream: _Stream, schema: Schema, atom: Atom, symbol_tok: _Token, expected_kind: str | None = None) -> bool:
    if not schema.has(atom.symbol):
        stream.error("unknown-symbol", f"unknown symbol {atom.symbol!r}", symbol_tok)
        return False
    if len(atom.args) != schema.arity(atom.symbol):
        stream.error(
            "arity-mismatch",
            f"{atom.symbol} expects {schema.arity(atom.symbol)} arguments, got {len(atom.args)}",
            symbol_tok,
        )
        return False
    if expected_kind is not None and schema.kind(atom.symbol) != expected_kind:
        stream.error(
            "unknown-symbol",
            f"{atom.symbol} is a {schema.kind(atom.symbol)} symbol; expected a {expected_kind} symbol",
            symbol_tok,
        )
        return False
    return True


def _parse_atom_list(stream: _Stream, term_parser, stop_texts: tuple[str, ...]):
    """Comma-separated atoms until one of the stop punctuation tokens."""
    atoms: list[tuple[Atom, _Token]] = []
    while True:
        if stream.peek().kind == "eof" or any(stream.at(t) for t in stop_texts):
            break
        atom, symbol_tok, _ = _parse_atom(stream, term_parser)
        if atom is None:
            return None
        atoms.append((atom, symbol_tok))
        if stream.at(","):
            stream.take()
            continue
        break
    return atoms


# ---------------------------------------------------------------------------
# Specification files


def parse_spec(text: str, filename: str = "<spec>") -> ViewSpec:
    """Parse a view specification. Raises ParseError carrying all collected
    diagnostics when the text is not well-formed."""
    tokens, diagnostics = _lex(text, filename)
    stream = _Stream(tokens, filename, diagnostics)

    db_decls: dict[str, tuple[int, _Token]] = {}
    view_decls: dict[str, tuple[int, _Token]] = {}
    raw_defs: list[tuple[CQ, _Token]] = []
    raw_deps: list[tuple[TGD | EGD, str | None, _Token]] = []

    def parse_decl(kind: str) -> None:
        keyword = stream.take()  # schema | view
        name = stream.expect_ident("a relation name")
        if name is None or stream.expect_punct("/") is None:
            stream.skip_statement()
            return
        arity_tok = stream.peek()
        if arity_tok.kind != "number" or not arity_tok.text.isdigit():
            stream.error("syntax", "expected a numeric arity")
            stream.skip_statement()
            return
        stream.take()
        if stream.expect_punct(".") is None:
            stream.skip_statement()
            return
        table = db_decls if kind == DATABASE else view_decls
        if name.text in db_decls or name.text in view_decls:
            stream.error("schema-collision", f"symbol {name.text!r} declared twice", name)
            return
        table[name.text] = (int(arity_tok.text), name)

    def parse_def() -> None:
        stream.take()  # def
        head, head_tok, head_arg_tokens = _parse_atom(stream, _parse_rule_term)
        if head is None or stream.expect_punct(":-") is None:
            stream.skip_statement()
            return
        body = _parse_atom_list(stream, _parse_rule_term, (".",))
        if body is None or stream.expect_punct(".") is None:
            stream.skip_statement()
            return
        body_vars = {v for atom, _ in body for v in atom.variables()}
        for term, tok in zip(head.args, head_arg_tokens):
            if isinstance(term, Var) and term not in body_vars:
                stream.error(
                    "unsafe-rule",
                    f"head variable {term.name!r} does not occur in the body",
                    tok,
                )
                return
        raw_defs.append((CQ(head=head, body=tuple(a for a, _ in body)), head_tok))

    def parse_dep(provenance: str | None) -> None:
        keyword = stream.take()  # tgd | egd
        body = _parse_atom_list(stream, _parse_rule_term, ("->",))
        if body is None or stream.expect_punct("->") is None:
            stream.skip_statement()
            return
        if keyword.text == "tgd":
            explicit_exists: list[tuple[Var, _Token]] = []
            if stream.at_keyword("exists"):
                stream.take()
                while True:
                    term, tok = _parse_rule_term(stream)
                    if not isinstance(term, Var):
                        stream.error("syntax", "expected a variable after 'exists'", tok)
                        stream.skip_statement()
                        return
                    explicit_exists.append((term, tok))
                    if stream.at(","):
                        stream.take()
                        continue
                    break
                if stream.expect_punct(":") is None:
                    stream.skip_statement()
                    return
            head = _parse_atom_list(stream, _parse_rule_term, (".",))
            if head is None or not head or stream.expect_punct(".") is None:
                if head is not None and not head:
                    stream.error("syntax", "a tgd needs at least one head atom")
                stream.skip_statement()
                return
            body_vars = {v for atom, _ in body for v in atom.variables()}
            head_vars = {v for atom, _ in head for v in atom.variables()}
            for var, tok in explicit_exists:
                if var in body_vars or var not in head_vars:
                    stream.error(
                        "unsafe-rule",
                        f"existential variable {var.name!r} must occur in the head only",
                        tok,
                    )
                    return
            dep: TGD | EGD = TGD(
                body=tuple(a for a, _ in body), head=tuple(a for a, _ in head)
            )
            first_tok = body[0][1] if body else head[0][1]
        else:
            lhs, lhs_tok = _parse_rule_term(stream)
            eq_ok = stream.expect_punct("=") is not None
            rhs, rhs_tok = _parse_rule_term(stream) if eq_ok else (None, None)
            if not isinstance(lhs, Var) or not isinstance(rhs, Var):
                stream.error("syntax", "an egd equates two variables", lhs_tok)
                stream.skip_statement()
                return
            if stream.expect_punct(".") is None:
                stream.skip_statement()
                return
            body_vars = {v for atom, _ in body for v in atom.variables()}
            for var, tok in ((lhs, lhs_tok), (rhs, rhs_tok)):
                if var not in body_vars:
                    stream.error(
                        "unsafe-rule",
                        f"equated variable {var.name!r} does not occur in the body",
                        tok,
                    )
                    return
            if not body:
                stream.error("syntax", "an egd needs a nonempty body", keyword)
                return
            dep = EGD(body=tuple(a for a, _ in body), lhs=lhs, rhs=rhs)
            first_tok = body[0][1]
        raw_deps.append((dep, provenance, first_tok))

    while stream.peek().kind != "eof":
        if stream.at("@"):
            at_tok = stream.take()
            prov_tok = stream.expect_ident("a provenance ('db' or 'view')")
            if prov_tok is None or prov_tok.text not in ("db", "view"):
                stream.error("bad-provenance", "provenance must be '@db' or '@view'", prov_tok or at_tok)
                stream.skip_statement()
                continue
            if not (stream.at_keyword("tgd") or stream.at_keyword("egd")):
                stream.error("syntax", "a provenance prefix must be followed by 'tgd' or 'egd'")
                stream.skip_statement()
                continue
            parse_dep(DB_CONSTRAINT if prov_tok.text == "db" else VIEW_CONSTRAINT)
        elif stream.at_keyword("schema"):
            parse_decl(DATABASE)
        elif stream.at_keyword("view"):
            parse_decl(VIEW)
        elif stream.at_keyword("def"):
            parse_def()
        elif stream.at_keyword("tgd") or stream.at_keyword("egd"):
            parse_dep(None)
        else:
            stream.error(
                "syntax",
                f"expected a statement (schema/view/def/tgd/egd), found {stream.peek().text!r}",
            )
            stream.skip_statement()

    # Assemble, running the cross-statement checks.
    db_schema = Schema(tuple(SymbolDecl(n, a, DATABASE) for n, (a, _) in db_decls.items()))
    view_schema = Schema(tuple(SymbolDecl(n, a, VIEW) for n, (a, _) in view_decls.items()))
    combined = Schema(db_schema.symbols + view_schema.symbols)

    definitions: dict[str, CQ] = {}
    for cq, head_tok in raw_defs:
        if cq.head.symbol not in view_decls:
            stream.error(
                "unknown-symbol",
                f"definition head {cq.head.symbol!r} is not a declared view symbol",
                head_tok,
            )
            continue
        if len(cq.head.args) != view_decls[cq.head.symbol][0]:
            stream.error(
                "arity-mismatch",
                f"{cq.head.symbol} expects {view_decls[cq.head.symbol][0]} arguments, got {len(cq.head.args)}",
                head_tok,
            )
            continue
        bad = False
        for atom in cq.body:
            if atom.symbol not in db_decls:
                stream.error(
                    "unknown-symbol",
                    f"definition bodies use database symbols only; {atom.symbol!r} is not one",
                    head_tok,
                )
                bad = True
            elif len(atom.args) != db_decls[atom.symbol][0]:
                stream.error(
                    "arity-mismatch",
                    f"{atom.symbol} expects {db_decls[atom.symbol][0]} arguments, got {len(atom.args)}",
                    head_tok,
                )
                bad = True
        if bad:
            continue
        if cq.head.symbol in definitions:
            stream.error(
                "duplicate-definition",
                f"view symbol {cq.head.symbol!r} already has a definition",
                head_tok,
            )
            continue
        definitions[cq.head.symbol] = cq
    for name, (_, decl_tok) in view_decls.items():
        if name not in definitions:
            stream.error("missing-definition", f"view symbol {name!r} has no definition", decl_tok)

    entries: list[tuple[TGD | EGD, str]] = []
    for dep, provenance, tok in raw_deps:
        kinds = set()
        ok = True
        atoms = list(dep.body) + (list(dep.head) if isinstance(dep, TGD) else [])
        for atom in atoms:
            if not combined.has(atom.symbol):
                stream.error("unknown-symbol", f"unknown symbol {atom.symbol!r}", tok)
                ok = False
            elif len(atom.args) != combined.arity(atom.symbol):
                stream.error(
                    "arity-mismatch",
                    f"{atom.symbol} expects {combined.arity(atom.symbol)} arguments, got {len(atom.args)}",
                    tok,
                )
                ok = False
            else:
                kinds.add(combined.kind(atom.symbol))
        if not ok:
            continue
        if provenance is None:
            if kinds == {DATABASE}:
                provenance = DB_CONSTRAINT
            elif kinds == {VIEW}:
                provenance = VIEW_CONSTRAINT
            else:
                stream.error(
                    "mixed-provenance",
                    "constraint mixes database and view symbols; only definitions may connect the two schemas",
                    tok,
                )
                continue
        expected = DATABASE if provenance == DB_CONSTRAINT else VIEW
        if kinds and kinds != {expected}:
            stream.error(
                "mixed-provenance",
                f"@{provenance} constraint mentions non-{expected} symbols",
                tok,
            )
            continue
        entries.append((dep, provenance))

    if stream.diagnostics:
        raise ParseError(stream.diagnostics)
    return ViewSpec(
        db_schema=db_schema,
        view_schema=view_schema,
        definitions=tuple(definitions.values()),
        constraints=ConstraintSet(tuple(entries)),
    )


# ---------------------------------------------------------------------------
# Fact files


def parse_facts(text: str, schema: Schema, filename: str = "<facts>") -> Instance:
    """Parse a fact file against a schema. Facts are ground; bare identifiers
    are constants."""
    tokens, diagnostics = _lex(text, filename)
    stream = _Stream(tokens, filename, diagnostics)
    facts: set[Fact] = set()
    while stream.peek().kind != "eof":
        atom, symbol_tok, _ = _parse_atom(stream, _parse_fact_term)
        if atom is None or stream.expect_punct(".") is None:
            stream.skip_statement()
            continue
        if not _check_atom(stream, schema, atom, symbol_tok):
            continue
        facts.add(atom.to_fact())
    if stream.diagnostics:
        raise ParseError(stream.diagnostics)
    return make_instance(schema, facts)


# ---------------------------------------------------------------------------
# Update files


def parse_update(text: str, schema: Schema, filename: str = "<update>") -> UpdateProgram:
    """Parse an update program (one `update [name] { ... }` block) against a
    view schema."""
    tokens, diagnostics = _lex(text, filename)
    stream = _Stream(tokens, filename, diagnostics)
    programs: list[UpdateProgram] = []

    def parse_condition() -> Condition | None:
        atoms: list[Atom] = []
        equalities: list[tuple[Term, Term]] = []
        inequalities: list[tuple[Term, Term]] = []
        while True:
            tok = stream.peek()
            if tok.kind == "ident" and stream.tokens[stream.pos + 1].kind == "punct" and stream.tokens[stream.pos + 1].text == "(":
                atom, symbol_tok, _ = _parse_atom(stream, _parse_rule_term)
                if atom is None:
                    return None
                if not _check_atom(stream, schema, atom, symbol_tok, VIEW):
                    return None
                atoms.append(atom)
            else:
                lhs, lhs_tok = _parse_rule_term(stream)
                if lhs is None:
                    return None
                if stream.at("="):
                    stream.take()
                    rhs, _ = _parse_rule_term(stream)
                    if rhs is None:
                        return None
                    equalities.append((lhs, rhs))
                elif stream.at("!="):
                    stream.take()
                    rhs, _ = _parse_rule_term(stream)
                    if rhs is None:
                        return None
                    inequalities.append((lhs, rhs))
                else:
                    stream.error("syntax", "expected '=' or '!=' in condition", lhs_tok)
                    return None
            if stream.at(","):
                stream.take()
                continue
            break
        return Condition(
            atoms=tuple(atoms),
            equalities=tuple(equalities),
            inequalities=tuple(inequalities),
        )

    def parse_step() -> UpdateStep | None:
        tok = stream.peek()
        if tok.kind != "ident" or tok.text not in (INSERT, DELETE, REPLACE):
            stream.error("syntax", f"expected an update step, found {tok.text!r}")
            return None
        kind_tok = stream.take()
        pattern, symbol_tok, _ = _parse_atom(stream, _parse_rule_term)
        if pattern is None:
            return None
        if not _check_atom(stream, schema, pattern, symbol_tok, VIEW):
            return None
        replacement = None
        if kind_tok.text == REPLACE:
            if not stream.at_keyword("with"):
                stream.error("syntax", "replace steps need 'with'")
                return None
            stream.take()
            replacement, rep_tok, _ = _parse_atom(stream, _parse_rule_term)
            if replacement is None:
                return None
            if not _check_atom(stream, schema, replacement, rep_tok, VIEW):
                return None
        condition = Condition()
        if stream.at_keyword("where"):
            stream.take()
            condition = parse_condition()
            if condition is None:
                return None
        try:
            return UpdateStep(
                kind=kind_tok.text,
                pattern=pattern,
                replacement=replacement,
                condition=condition,
            )
        except ValueError as exc:
            stream.error("unsafe-step", str(exc), kind_tok)
            return None

    while stream.peek().kind != "eof":
        if not stream.at_keyword("update"):
            stream.error("syntax", f"expected 'update', found {stream.peek().text!r}")
            stream.skip_statement()
            continue
        update_tok = stream.take()
        name = None
        if stream.peek().kind == "ident":
            name = stream.take().text
        if stream.expect_punct("{") is None:
            stream.skip_statement()
            continue
        steps: list[UpdateStep] = []
        bad = False
        while not stream.at("}") and stream.peek().kind != "eof":
            step = parse_step()
            if step is None:
                bad = True
                stream.skip_statement()
                break
            steps.append(step)
            if stream.at(";"):
                stream.take()
            elif not stream.at("}"):
                stream.error("syntax", "expected ';' after an update step")
                bad = True
                stream.skip_statement()
                break
        if bad:
            continue
        if stream.expect_punct("}") is None:
            stream.skip_statement()
            continue
        if stream.at("."):
            stream.take()
        if not steps:
            stream.error("empty-update", "an update needs at least one step", update_tok)
            continue
        programs.append(UpdateProgram(steps=tuple(steps), name=name))

    if not programs and not stream.diagnostics:
        stream.error(
            "empty-update",
            "expected one update block",
            stream.peek(),
        )
    if len(programs) > 1:
        stream.error("syntax", "expected exactly one update block per file", stream.peek())
    if stream.diagnostics:
        raise ParseError(stream.diagnostics)
    return programs[0]


# ---------------------------------------------------------------------------
# Single dependencies (CLI goals)


def parse_dependency(text: str, schema: Schema, filename: str = "<goal>") -> TGD | EGD:
    """Parse a single tgd/egd statement against a schema (used for
    implication goals)."""
    tokens, diagnostics = _lex(text, filename)
    stream = _Stream(tokens, filename, diagnostics)
    collected: list[TGD | EGD] = []

    def parse_one() -> None:
        keyword = stream.peek()
        if not (stream.at_keyword("tgd") or stream.at_keyword("egd")):
            stream.error("syntax", f"expected 'tgd' or 'egd', found {keyword.text!r}")
            stream.skip_statement()
            return
        kw = stream.take()
        body = _parse_atom_list(stream, _parse_rule_term, ("->",))
        if body is None or stream.expect_punct("->") is None:
            stream.skip_statement()
            return
        if kw.text == "tgd":
            if stream.at_keyword("exists"):
                stream.take()
                while True:
                    term, tok = _parse_rule_term(stream)
                    if not isinstance(term, Var):
                        stream.error("syntax", "expected a variable after 'exists'", tok)
                        return
                    if stream.at(","):
                        stream.take()
                        continue
                    break
                if stream.expect_punct(":") is None:
                    return
            head = _parse_atom_list(stream, _parse_rule_term, (".",))
            if head is None or not head:
                stream.error("syntax", "a tgd needs at least one head atom")
                return
            if stream.at("."):
                stream.take()
            dep: TGD | EGD = TGD(body=tuple(a for a, _ in body), head=tuple(a for a, _ in head))
        else:
            lhs, lhs_tok = _parse_rule_term(stream)
            if stream.expect_punct("=") is None:
                return
            rhs, rhs_tok = _parse_rule_term(stream)
            if stream.at("."):
                stream.take()
            if not isinstance(lhs, Var) or not isinstance(rhs, Var):
                stream.error("syntax", "an egd equates two variables", lhs_tok)
                return
            body_vars = {v for atom, _ in body for v in atom.variables()}
            if lhs not in body_vars or rhs not in body_vars:
                stream.error("unsafe-rule", "equated variables must occur in the body", lhs_tok)
                return
            dep = EGD(body=tuple(a for a, _ in body), lhs=lhs, rhs=rhs)
        for atom, tok in (body + (head if kw.text == "tgd" else [])):
            _check_atom(stream, schema, atom, tok)
        collected.append(dep)

    parse_one()
    if stream.peek().kind != "eof":
        stream.error("syntax", "expected a single dependency")
    if not collected and not stream.diagnostics:
        stream.error("syntax", "expected a dependency", stream.peek())
    if stream.diagnostics:
        raise ParseError(stream.diagnostics)
    return collected[0]
