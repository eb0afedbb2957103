"""Turn parsed modules into closed programs.

Loading replaces don't-know placeholders during an initialization phase:
every name declared with ``unknown X, Y.`` maps to one shared fresh
Unknown across the whole module, and every ``*`` argument gets its own
fresh Unknown.  Clause variables are then closed as silent universals and
the result is checked for well-formedness.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .terms import Compound, Star, Term, Unknown, Var, fresh_unknown
from .syntax import (
    Atom,
    Clause,
    ConjD,
    Fact,
    Forall,
    Rule,
    binder_names,
    desugar_clause_vars,
    flatten_clause,
    predicate_arities,
    wellformed,
)
from .parser import ParseError, ParseIssue, SourceModule, parse_module


class LoadError(Exception):
    """Aggregated parse / Skolemization / well-formedness failures."""

    def __init__(self, issues: list[ParseIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class Program:
    """An immutable, closed program: safe to share between sessions."""

    name: str
    clauses: tuple[Clause, ...]
    unknown_table: dict

    def arities(self) -> dict:
        return predicate_arities(self.clauses)


def _replace_stars(term: Term, origin: str) -> Term:
    if isinstance(term, Star):
        return fresh_unknown(origin)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(_replace_stars(a, origin) for a in term.args))
    return term


def _replace_stars_clause(clause: Clause, origin: str) -> Clause:
    if isinstance(clause, Fact):
        return Fact(Atom(clause.head.pred,
                         tuple(_replace_stars(t, origin) for t in clause.head.args)))
    if isinstance(clause, Forall):
        return Forall(clause.var, _replace_stars_clause(clause.inner, origin), clause.noisy)
    if isinstance(clause, ConjD):
        return ConjD(_replace_stars_clause(clause.left, origin),
                     _replace_stars_clause(clause.right, origin))
    return clause  # rule bodies/heads were star-checked by the parser


def _replace_named(term: Term, table: dict) -> Term:
    if isinstance(term, Var) and term.name in table:
        return table[term.name]
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(_replace_named(a, table) for a in term.args))
    return term


def _replace_named_clause(clause: Clause, table: dict) -> Clause:
    # Safe as a plain name walk: binder collisions were rejected already.
    from .syntax import Conj, Exists, Goal

    def on_goal(g):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(_replace_named(t, table) for t in g.args))
        if isinstance(g, Conj):
            return Conj(on_goal(g.left), on_goal(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, on_goal(g.body), g.noisy)
        raise TypeError(f"not a goal node: {g!r}")

    if isinstance(clause, Fact):
        return Fact(Atom(clause.head.pred,
                         tuple(_replace_named(t, table) for t in clause.head.args)))
    if isinstance(clause, Rule):
        head = Atom(clause.head.pred,
                    tuple(_replace_named(t, table) for t in clause.head.args))
        return Rule(head, on_goal(clause.body))
    if isinstance(clause, Forall):
        return Forall(clause.var, _replace_named_clause(clause.inner, table), clause.noisy)
    if isinstance(clause, ConjD):
        return ConjD(_replace_named_clause(clause.left, table),
                     _replace_named_clause(clause.right, table))
    raise TypeError(f"not a clause node: {clause!r}")


def skolemize(module: SourceModule) -> Program:
    """Close a source module into a Program.

    Each declared unknown name becomes one shared fresh Unknown; each ``*``
    becomes its own fresh Unknown; remaining free variables are closed
    silently.  Raises LoadError when a declared unknown name collides with
    an explicitly bound clause variable, or when a clause is ill-formed.
    """
    issues: list[ParseIssue] = []
    table = {name: fresh_unknown(module.name) for name in module.unknown_decls}

    spans = list(module.source_spans) + [(0, 0)] * (
        len(module.raw_clauses) - len(module.source_spans)
    )
    closed: list[Clause] = []
    arities: dict[str, int] = {}
    for raw, (line, col) in zip(module.raw_clauses, spans):
        bound = binder_names(raw)
        clash = sorted(bound & set(module.unknown_decls))
        if clash:
            issues.append(
                ParseIssue(f"ambiguous unknown scope: {', '.join(clash)}", line, col)
            )
            continue
        clause = _replace_stars_clause(raw, module.name)
        if table:
            clause = _replace_named_clause(clause, table)
        clause = desugar_clause_vars(clause)
        problems = wellformed(clause, arities=arities, allow_unknowns=True)
        issues.extend(ParseIssue(p, line, col) for p in problems)
        closed.extend(flatten_clause(clause))
    if issues:
        raise LoadError(issues)
    return Program(name=module.name, clauses=tuple(closed), unknown_table=table)


def load(source: Union[str, Path], *, name: Optional[str] = None) -> Program:
    """Parse and Skolemize program text (or a Path to a ``.plt`` file)."""
    if isinstance(source, Path):
        return load_path(source)
    try:
        module = parse_module(source, default_name=name or "main")
    except ParseError as err:
        raise LoadError(err.issues) from None
    if name is not None and not module.had_header:
        module = SourceModule(
            name=name,
            unknown_decls=module.unknown_decls,
            raw_clauses=module.raw_clauses,
            source_spans=module.source_spans,
            had_header=False,
        )
    return skolemize(module)


def load_path(path: Union[str, Path]) -> Program:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise LoadError([ParseIssue(f"cannot read {path}: {err}", 0, 0)]) from None
    default_name = path.stem or "main"
    return load(text, name=default_name)


def combine(programs: Iterable[Program], name: str = "program") -> Program:
    """Concatenate loaded programs in load order.

    Predicate arities must stay consistent across modules; unknowns from
    different modules are already distinct by construction.
    """
    programs = list(programs)
    if len(programs) == 1:
        return programs[0]
    clauses: list[Clause] = []
    table: dict[str, Unknown] = {}
    arities: dict[str, int] = {}
    issues: list[ParseIssue] = []
    for prog in programs:
        for clause in prog.clauses:
            problems = wellformed(clause, arities=arities, allow_unknowns=True)
            issues.extend(
                ParseIssue(f"in module {prog.name}: {p}", 0, 0) for p in problems
            )
        clauses.extend(prog.clauses)
        for decl, unk in prog.unknown_table.items():
            key = decl if decl not in table else f"{prog.name}.{decl}"
            table[key] = unk
    if issues:
        raise LoadError(issues)
    return Program(name=name, clauses=tuple(clauses), unknown_table=table)
