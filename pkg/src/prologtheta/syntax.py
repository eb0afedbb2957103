"""Goal and clause ASTs, variable desugaring, and well-formedness checks.

Goals are atoms, conjunctions, and existentials; clauses are facts, rules,
universals, and clause conjunctions.  Quantifier nodes carry a ``noisy``
flag: noisy binders (surface ``some*`` / ``all*``) record their
instantiation in the answer substitution, silent ones do not.

Raw ASTs coming out of the parser may contain free variables and anonymous
``_`` variables.  Desugaring closes them: in clauses they become silent
universals, in queries ``_`` becomes a silent existential and named free
variables follow the session policy (noisy by default, mirroring how a
conventional top level displays every query binding).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .terms import Compound, Star, Term, Unknown, Var, fresh_var


@dataclass(frozen=True)
class Atom:
    """A predicate applied to zero or more terms."""

    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Conj:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Goal"
    noisy: bool


Goal = Union[Atom, Conj, Exists]


@dataclass(frozen=True)
class Fact:
    head: Atom


@dataclass(frozen=True)
class Rule:
    """``head :- body``: the head holds whenever the body is provable."""

    head: Atom
    body: Goal


@dataclass(frozen=True)
class Forall:
    var: Var
    inner: "Clause"
    noisy: bool


@dataclass(frozen=True)
class ConjD:
    left: "Clause"
    right: "Clause"


Clause = Union[Fact, Rule, Forall, ConjD]


@dataclass(frozen=True)
class QueryPolicy:
    """How free query variables are closed; fixed for a session."""

    default_free_var: str = "noisy-existential"  # or "silent-existential"


def atom(pred: str, *args: Term) -> Atom:
    return Atom(pred, tuple(args))


# ---------------------------------------------------------------------------
# Structural substitution (capture-free because binder ids are unique).


def subst_term(term: Term, mapping: dict) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.id, term)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(subst_term(a, mapping) for a in term.args))
    return term


def subst_atom(a: Atom, mapping: dict) -> Atom:
    return Atom(a.pred, tuple(subst_term(t, mapping) for t in a.args))


def subst_goal(goal: Goal, mapping: dict) -> Goal:
    if isinstance(goal, Atom):
        return subst_atom(goal, mapping)
    if isinstance(goal, Conj):
        return Conj(subst_goal(goal.left, mapping), subst_goal(goal.right, mapping))
    if isinstance(goal, Exists):
        return Exists(goal.var, subst_goal(goal.body, mapping), goal.noisy)
    raise TypeError(f"not a goal node: {goal!r}")


def subst_clause(clause: Clause, mapping: dict) -> Clause:
    if isinstance(clause, Fact):
        return Fact(subst_atom(clause.head, mapping))
    if isinstance(clause, Rule):
        return Rule(subst_atom(clause.head, mapping), subst_goal(clause.body, mapping))
    if isinstance(clause, Forall):
        return Forall(clause.var, subst_clause(clause.inner, mapping), clause.noisy)
    if isinstance(clause, ConjD):
        return ConjD(subst_clause(clause.left, mapping), subst_clause(clause.right, mapping))
    raise TypeError(f"not a clause node: {clause!r}")


# ---------------------------------------------------------------------------
# Desugaring.


class _FreeVars:
    """Free names and anonymous occurrences in first-occurrence order."""

    def __init__(self) -> None:
        self.named: dict[str, Var] = {}
        self.order: list[Var] = []

    def for_name(self, name: str) -> Var:
        v = self.named.get(name)
        if v is None:
            v = fresh_var(name)
            self.named[name] = v
            self.order.append(v)
        return v

    def for_anonymous(self) -> Var:
        v = fresh_var("_")
        self.order.append(v)
        return v


def _desugar_term(term: Term, env: dict, active: set, free: _FreeVars) -> Term:
    if isinstance(term, Var):
        if term.name == "_":
            # an anonymous occurrence already closed by an enclosing binder
            # must stay put; a fresh one gets its own quantifier
            if term.id in active:
                return term
            return free.for_anonymous()
        if term.name in env:
            return env[term.name]
        return free.for_name(term.name)
    if isinstance(term, Compound):
        return Compound(
            term.functor, tuple(_desugar_term(a, env, active, free) for a in term.args)
        )
    return term


def _rebind(var: Var, env: dict, active: set) -> tuple[Var, dict, set]:
    # Keep the parsed binder variable unless an enclosing binder already
    # uses the same id (same-name nesting shares provisional ids).
    v = fresh_var(var.name) if var.id in active else var
    return v, {**env, var.name: v}, active | {v.id}


def _desugar_goal(goal: Goal, env: dict, active: set, free: _FreeVars) -> Goal:
    if isinstance(goal, Atom):
        return Atom(goal.pred, tuple(_desugar_term(t, env, active, free) for t in goal.args))
    if isinstance(goal, Conj):
        return Conj(
            _desugar_goal(goal.left, env, active, free),
            _desugar_goal(goal.right, env, active, free),
        )
    if isinstance(goal, Exists):
        v, env2, active2 = _rebind(goal.var, env, active)
        return Exists(v, _desugar_goal(goal.body, env2, active2, free), goal.noisy)
    raise TypeError(f"not a goal node: {goal!r}")


def _desugar_clause(clause: Clause, env: dict, active: set, free: _FreeVars) -> Clause:
    if isinstance(clause, Fact):
        return Fact(
            Atom(clause.head.pred,
                 tuple(_desugar_term(t, env, active, free) for t in clause.head.args))
        )
    if isinstance(clause, Rule):
        head = Atom(
            clause.head.pred,
            tuple(_desugar_term(t, env, active, free) for t in clause.head.args),
        )
        return Rule(head, _desugar_goal(clause.body, env, active, free))
    if isinstance(clause, Forall):
        v, env2, active2 = _rebind(clause.var, env, active)
        return Forall(v, _desugar_clause(clause.inner, env2, active2, free), clause.noisy)
    if isinstance(clause, ConjD):
        return ConjD(
            _desugar_clause(clause.left, env, active, free),
            _desugar_clause(clause.right, env, active, free),
        )
    raise TypeError(f"not a clause node: {clause!r}")


def desugar_clause_vars(raw_clause: Clause) -> Clause:
    """Close a clause: free and anonymous variables become silent universals.

    Explicit ``all`` / ``all*`` binders are preserved; each ``_`` occurrence
    gets its own quantifier.  Closure wraps the clause in first-occurrence
    order, outermost first.  Already-closed clauses come back unchanged.
    """
    free = _FreeVars()
    out = _desugar_clause(raw_clause, {}, set(), free)
    for v in reversed(free.order):
        out = Forall(v, out, noisy=False)
    return out


def desugar_query_vars(raw_goal: Goal, policy: QueryPolicy = QueryPolicy()) -> Goal:
    """Close a query goal.

    ``_`` occurrences become silent existentials; named free variables
    follow ``policy`` (noisy by default).  Explicit ``some`` / ``some*``
    binders are preserved.
    """
    free = _FreeVars()
    out = _desugar_goal(raw_goal, {}, set(), free)
    noisy_default = policy.default_free_var == "noisy-existential"
    for v in reversed(free.order):
        out = Exists(v, out, noisy=noisy_default and v.name != "_")
    return out


# ---------------------------------------------------------------------------
# Well-formedness.


def wellformed(
    node: Union[Goal, Clause],
    *,
    arities: Optional[dict] = None,
    allow_unknowns: bool = False,
) -> list[str]:
    """Check closedness, arity consistency, and node placement.

    Returns a list of violation messages; empty means ok.  ``arities`` may
    be a shared predicate table so consistency is enforced across a whole
    program (it is extended in place).
    """
    errors: list[str] = []
    if arities is None:
        arities = {}

    def check_term(t: Term, bound: frozenset) -> None:
        if isinstance(t, Var):
            if t.id not in bound:
                errors.append(f"unbound variable {t.name}")
        elif isinstance(t, Unknown):
            if not allow_unknowns:
                errors.append("don't-know constant not allowed here")
        elif isinstance(t, Star):
            errors.append("placeholder '*' not allowed here")
        elif isinstance(t, Compound):
            for a in t.args:
                check_term(a, bound)

    def check_atom(a: Atom, bound: frozenset) -> None:
        seen = arities.get(a.pred)
        if seen is None:
            arities[a.pred] = len(a.args)
        elif seen != len(a.args):
            errors.append(
                f"predicate {a.pred} used with arity {len(a.args)} after arity {seen}"
            )
        for t in a.args:
            check_term(t, bound)

    def check_goal(g, bound: frozenset) -> None:
        if isinstance(g, Atom):
            check_atom(g, bound)
        elif isinstance(g, Conj):
            check_goal(g.left, bound)
            check_goal(g.right, bound)
        elif isinstance(g, Exists):
            check_goal(g.body, bound | {g.var.id})
        elif isinstance(g, (Fact, Rule, Forall, ConjD)):
            errors.append("universal/clause construct not allowed in a goal")
        else:
            errors.append(f"not a goal node: {g!r}")

    def check_clause(c, bound: frozenset) -> None:
        if isinstance(c, Fact):
            check_atom(c.head, bound)
        elif isinstance(c, Rule):
            check_atom(c.head, bound)
            check_goal(c.body, bound)
        elif isinstance(c, Forall):
            check_clause(c.inner, bound | {c.var.id})
        elif isinstance(c, ConjD):
            check_clause(c.left, bound)
            check_clause(c.right, bound)
        elif isinstance(c, (Conj, Exists)):
            errors.append("existential not allowed in a clause")
        else:
            errors.append(f"not a clause node: {c!r}")

    if isinstance(node, (Fact, Rule, Forall, ConjD)):
        check_clause(node, frozenset())
    else:
        check_goal(node, frozenset())
    return errors


def predicate_arities(clauses) -> dict:
    """Predicate arity table inferred from first use."""
    table: dict[str, int] = {}
    for c in clauses:
        wellformed(c, arities=table, allow_unknowns=True)
    return table


# ---------------------------------------------------------------------------
# Small AST utilities shared by the loader, the engine, and tests.


def silent_twin(node: Union[Goal, Clause]) -> Union[Goal, Clause]:
    """Copy with every noisy quantifier replaced by its silent version."""
    if isinstance(node, Atom):
        return node
    if isinstance(node, Conj):
        return Conj(silent_twin(node.left), silent_twin(node.right))
    if isinstance(node, Exists):
        return Exists(node.var, silent_twin(node.body), noisy=False)
    if isinstance(node, Fact):
        return node
    if isinstance(node, Rule):
        return Rule(node.head, silent_twin(node.body))
    if isinstance(node, Forall):
        return Forall(node.var, silent_twin(node.inner), noisy=False)
    if isinstance(node, ConjD):
        return ConjD(silent_twin(node.left), silent_twin(node.right))
    raise TypeError(f"not an AST node: {node!r}")


def flatten_clause(clause: Clause) -> list[Clause]:
    """Split top-level clause conjunctions into an ordered clause list."""
    if isinstance(clause, ConjD):
        return flatten_clause(clause.left) + flatten_clause(clause.right)
    return [clause]


def goal_atoms(goal: Goal) -> Iterator[Atom]:
    if isinstance(goal, Atom):
        yield goal
    elif isinstance(goal, Conj):
        yield from goal_atoms(goal.left)
        yield from goal_atoms(goal.right)
    elif isinstance(goal, Exists):
        yield from goal_atoms(goal.body)


def clause_atoms(clause: Clause) -> Iterator[Atom]:
    if isinstance(clause, Fact):
        yield clause.head
    elif isinstance(clause, Rule):
        yield clause.head
        yield from goal_atoms(clause.body)
    elif isinstance(clause, Forall):
        yield from clause_atoms(clause.inner)
    elif isinstance(clause, ConjD):
        yield from clause_atoms(clause.left)
        yield from clause_atoms(clause.right)


def binder_names(clause: Clause) -> set:
    """Names bound by explicit quantifiers anywhere in the clause."""
    names: set[str] = set()

    def goal_walk(g: Goal) -> None:
        if isinstance(g, Conj):
            goal_walk(g.left)
            goal_walk(g.right)
        elif isinstance(g, Exists):
            names.add(g.var.name)
            goal_walk(g.body)

    def clause_walk(c: Clause) -> None:
        if isinstance(c, Rule):
            goal_walk(c.body)
        elif isinstance(c, Forall):
            names.add(c.var.name)
            clause_walk(c.inner)
        elif isinstance(c, ConjD):
            clause_walk(c.left)
            clause_walk(c.right)

    clause_walk(clause)
    return names
