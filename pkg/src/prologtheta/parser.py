"""Concrete syntax: lexer, module and query parsers, and formatters.

Grammar (also shipped in the README):

    module   ::= header? unknowns? clause*
    header   ::= "module" NAME "."
    unknowns ::= "unknown" VAR ("," VAR)* "."
    clause   ::= prefix* atom (":-" goal)? "."
    prefix   ::= ("all" | "all*") VAR ("," VAR)* ":"
    goal     ::= atom | goal "," goal | "(" goal ")"
               | ("some" | "some*") VAR ":" goal
    atom     ::= NAME | NAME "(" term ("," term)* ")"
    term     ::= VAR | "_" | INT | "*" | NAME | NAME "(" term ("," term)* ")"

Identifiers starting lowercase are constants/functors/predicates, starting
uppercase are variables.  ``%`` starts a line comment.  ``?`` is reserved
(don't-know constants print as ``?k<N>`` but cannot be written in source).
``some``/``all`` binders scope to the end of the enclosing group.  A ``*``
argument is only legal in facts, where loading turns it into a fresh
don't-know constant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Compound, Const, Star, Term, Unknown, Var, fresh_var
from .syntax import Atom, Clause, Conj, ConjD, Exists, Fact, Forall, Goal, Rule

RESERVED_WORDS = {"module", "unknown", "some", "all", "some*", "all*"}


@dataclass(frozen=True)
class ParseIssue:
    message: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    """Raised with the full list of issues found in the input."""

    def __init__(self, issues: list[ParseIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class SourceModule:
    """A parsed module, before Skolemization and variable closure."""

    name: str
    unknown_decls: tuple[str, ...]
    raw_clauses: tuple[Clause, ...]
    source_spans: tuple[tuple[int, int], ...]
    had_header: bool = True


@dataclass
class _Token:
    kind: str  # lower upper anon int star lparen rparen comma period colon turnstile eof
    text: str
    line: int
    col: int


def _lex(text: str) -> tuple[list[_Token], list[ParseIssue]]:
    """Tokenize, collecting lexical issues instead of stopping at the first.

    Offending characters are skipped so the parser can keep reporting
    later problems in the same input.
    """
    tokens: list[_Token] = []
    issues: list[ParseIssue] = []
    line, col, i, n = 1, 1, 0, len(text)

    def advance(k: int = 1) -> None:
        nonlocal line, col, i
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "_":
                tokens.append(_Token("anon", word, start_line, start_col))
            elif word[0] == "_":
                issues.append(
                    ParseIssue(f"invalid identifier {word!r}", start_line, start_col)
                )
            elif word[0].isupper():
                tokens.append(_Token("upper", word, start_line, start_col))
            else:
                # some* / all* lex as single words when the star is adjacent
                if word in ("some", "all") and j < n and text[j] == "*":
                    word += "*"
                    j += 1
                tokens.append(_Token("lower", word, start_line, start_col))
            advance(j - i)
            continue
        if ch == ":" and i + 1 < n and text[i + 1] == "-":
            tokens.append(_Token("turnstile", ":-", start_line, start_col))
            advance(2)
            continue
        simple = {
            "(": "lparen",
            ")": "rparen",
            ",": "comma",
            ".": "period",
            ":": "colon",
            "*": "star",
        }
        if ch in simple:
            tokens.append(_Token(simple[ch], ch, start_line, start_col))
            advance()
            continue
        if ch == "?":
            issues.append(
                ParseIssue("reserved token '?' (don't-know constants cannot be "
                           "written in source)", start_line, start_col)
            )
            advance()
            continue
        issues.append(ParseIssue(f"unexpected character {ch!r}", start_line, start_col))
        advance()
    tokens.append(_Token("eof", "", line, col))
    return tokens, issues


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        # provisional per-input variable table: one Var per name
        self.var_table: dict[str, Var] = {}

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                [ParseIssue(f"expected {what}, found {tok.text or 'end of input'!r}",
                            tok.line, tok.col)]
            )
        return self.take()

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError([ParseIssue(message, tok.line, tok.col)])

    def var_for(self, name: str) -> Var:
        v = self.var_table.get(name)
        if v is None:
            v = fresh_var(name)
            self.var_table[name] = v
        return v

    # -- terms ------------------------------------------------------------

    def parse_term(self, allow_star: bool) -> Term:
        tok = self.peek()
        if tok.kind == "upper":
            self.take()
            return self.var_for(tok.text)
        if tok.kind == "anon":
            self.take()
            return fresh_var("_")
        if tok.kind == "int":
            self.take()
            return Const(tok.text)
        if tok.kind == "star":
            if not allow_star:
                self.fail("placeholder '*' is only allowed in fact arguments")
            self.take()
            return Star()
        if tok.kind == "lower":
            if tok.text in RESERVED_WORDS:
                self.fail(f"reserved word {tok.text!r} cannot be used as a term")
            self.take()
            if self.peek().kind == "lparen":
                self.take()
                args = [self.parse_term(allow_star)]
                while self.peek().kind == "comma":
                    self.take()
                    args.append(self.parse_term(allow_star))
                self.expect("rparen", "')'")
                return Compound(tok.text, tuple(args))
            return Const(tok.text)
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}")

    def parse_atom(self, allow_star: bool) -> Atom:
        tok = self.peek()
        if tok.kind != "lower":
            self.fail(f"expected a predicate name, found {tok.text or 'end of input'!r}")
        if tok.text in RESERVED_WORDS:
            self.fail(f"reserved word {tok.text!r} cannot be used as a predicate")
        self.take()
        args: list[Term] = []
        if self.peek().kind == "lparen":
            self.take()
            args.append(self.parse_term(allow_star))
            while self.peek().kind == "comma":
                self.take()
                args.append(self.parse_term(allow_star))
            self.expect("rparen", "')'")
        return Atom(tok.text, tuple(args))

    # -- goals ------------------------------------------------------------

    def parse_goal_group(self) -> Goal:
        """A comma-separated group; binders swallow the rest of the group."""
        items: list[Goal] = []
        while True:
            tok = self.peek()
            if tok.kind == "lower" and tok.text in ("some", "some*"):
                noisy = tok.text == "some*"
                self.take()
                var_tok = self.expect("upper", "a variable after the binder")
                self.expect("colon", "':'")
                body = self.parse_goal_group()
                items.append(Exists(self.var_for(var_tok.text), body, noisy))
                break
            if tok.kind == "lower" and tok.text in ("all", "all*"):
                self.fail("universal binders are not allowed in goals")
            if tok.kind == "lparen":
                self.take()
                items.append(self.parse_goal_group())
                self.expect("rparen", "')'")
            else:
                items.append(self.parse_atom(allow_star=False))
            if self.peek().kind == "comma":
                self.take()
                continue
            break
        goal = items[-1]
        for item in reversed(items[:-1]):
            goal = Conj(item, goal)
        return goal

    # -- clauses ----------------------------------------------------------

    def parse_clause(self) -> Clause:
        prefixes: list[tuple[Var, bool]] = []
        while (
            self.peek().kind == "lower"
            and self.peek().text in ("all", "all*")
        ):
            noisy = self.take().text == "all*"
            names = [self.expect("upper", "a variable after the prefix")]
            while self.peek().kind == "comma":
                self.take()
                names.append(self.expect("upper", "a variable"))
            self.expect("colon", "':'")
            prefixes.extend((self.var_for(t.text), noisy) for t in names)
        head = self.parse_atom(allow_star=True)
        clause: Clause
        if self.peek().kind == "turnstile":
            if any(isinstance(t, Star) or _term_has_star(t) for t in head.args):
                self.fail("placeholder '*' is only allowed in fact arguments")
            self.take()
            body = self.parse_goal_group()
            clause = Rule(head, body)
        else:
            clause = Fact(head)
        self.expect("period", "'.' at end of clause")
        for var, noisy in reversed(prefixes):
            clause = Forall(var, clause, noisy)
        return clause


def _term_has_star(term: Term) -> bool:
    if isinstance(term, Star):
        return True
    if isinstance(term, Compound):
        return any(_term_has_star(a) for a in term.args)
    return False


def parse_module(text: str, default_name: str = "main") -> SourceModule:
    """Parse module source into raw clauses.

    A malformed clause is reported and parsing resumes after the next
    period, so one pass collects every error in the input.
    """
    tokens, issues = _lex(text)
    parser = _Parser(tokens)
    name = default_name
    had_header = False
    unknown_decls: list[str] = []
    clauses: list[Clause] = []
    spans: list[tuple[int, int]] = []

    def skip_to_next_clause() -> None:
        while parser.peek().kind not in ("period", "eof"):
            parser.take()
        if parser.peek().kind == "period":
            parser.take()

    while parser.peek().kind != "eof":
        tok = parser.peek()
        try:
            if tok.kind == "lower" and tok.text == "module" and parser.peek(1).kind == "lower":
                parser.take()
                name_tok = parser.take()
                parser.expect("period", "'.' after the module header")
                if had_header:
                    raise ParseError(
                        [ParseIssue("duplicate module header", tok.line, tok.col)]
                    )
                if clauses or unknown_decls:
                    raise ParseError(
                        [ParseIssue("module header must come first", tok.line, tok.col)]
                    )
                name = name_tok.text
                had_header = True
                continue
            if tok.kind == "lower" and tok.text == "unknown":
                parser.take()
                decl_toks = [parser.expect("upper", "a name after 'unknown'")]
                while parser.peek().kind == "comma":
                    parser.take()
                    decl_toks.append(parser.expect("upper", "a name"))
                parser.expect("period", "'.' after the unknown declaration")
                if clauses:
                    raise ParseError(
                        [ParseIssue("unknown declaration must precede clauses",
                                    tok.line, tok.col)]
                    )
                for t in decl_toks:
                    if t.text in unknown_decls:
                        raise ParseError(
                            [ParseIssue(f"duplicate unknown name {t.text}", t.line, t.col)]
                        )
                    unknown_decls.append(t.text)
                continue
            # each clause resolves names in its own scope
            parser.var_table = {}
            clauses.append(parser.parse_clause())
            spans.append((tok.line, tok.col))
        except ParseError as err:
            issues.extend(err.issues)
            skip_to_next_clause()
    if issues:
        raise ParseError(issues)
    return SourceModule(
        name=name,
        unknown_decls=tuple(unknown_decls),
        raw_clauses=tuple(clauses),
        source_spans=tuple(spans),
        had_header=had_header,
    )


def parse_query(text: str) -> Goal:
    """Parse a query; the trailing period is optional."""
    tokens, issues = _lex(text)
    if issues:
        raise ParseError(issues)
    parser = _Parser(tokens)
    goal = parser.parse_goal_group()
    if parser.peek().kind == "period":
        parser.take()
    if parser.peek().kind != "eof":
        parser.fail("unexpected input after the query")
    return goal


def parse_term(text: str) -> Term:
    tokens, issues = _lex(text)
    if issues:
        raise ParseError(issues)
    parser = _Parser(tokens)
    term = parser.parse_term(allow_star=False)
    if parser.peek().kind != "eof":
        parser.fail("unexpected input after the term")
    return term


# ---------------------------------------------------------------------------
# Formatting.  parse(format(x)) == x for everything the grammar can write.


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return term.name
    if isinstance(term, Unknown):
        return f"?k{term.id}"
    if isinstance(term, Compound):
        return f"{term.functor}({', '.join(format_term(a) for a in term.args)})"
    if isinstance(term, Star):
        return "*"
    raise TypeError(f"not a term: {term!r}")


def format_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(format_term(t) for t in a.args)})"


def format_goal(goal: Goal) -> str:
    if isinstance(goal, Atom):
        return format_atom(goal)
    if isinstance(goal, Conj):
        left = format_goal(goal.left)
        if isinstance(goal.left, (Conj, Exists)):
            left = f"({left})"
        return f"{left}, {format_goal(goal.right)}"
    if isinstance(goal, Exists):
        binder = "some*" if goal.noisy else "some"
        return f"{binder} {goal.var.name} : {format_goal(goal.body)}"
    raise TypeError(f"not a goal: {goal!r}")


def format_clause(clause: Clause, with_period: bool = False) -> str:
    if isinstance(clause, Fact):
        text = format_atom(clause.head)
    elif isinstance(clause, Rule):
        text = f"{format_atom(clause.head)} :- {format_goal(clause.body)}"
    elif isinstance(clause, Forall):
        binder = "all*" if clause.noisy else "all"
        text = f"{binder} {clause.var.name} : {format_clause(clause.inner)}"
    elif isinstance(clause, ConjD):
        # clause conjunctions have no surface syntax; display only
        text = f"({format_clause(clause.left)} & {format_clause(clause.right)})"
    else:
        raise TypeError(f"not a clause: {clause!r}")
    return text + "." if with_period else text
