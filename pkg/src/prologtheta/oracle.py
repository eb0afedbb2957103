"""Brute-force reference prover over finite ground instantiations.

This is the verification oracle: it decides derivability by exhaustively
enumerating, over a finite universe of ground terms, every instantiation
choice each quantifier could make (silent ones too, since they affect
derivability even though they are not reported), and collects the set of
distinct noisy-binding lists of successful derivations.

It deliberately shares nothing with the search engine beyond the term and
formula types, so it can serve as an independent check.  It is not meant
to be fast.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .terms import Compound, Const, Term, Unknown, Var
from .syntax import Atom, Clause, Conj, ConjD, Exists, Fact, Forall, Goal, Rule
from .loader import Program


class OracleOverflow(Exception):
    """The enumeration exceeded its combinatorial work limit."""


@dataclass(frozen=True)
class Universe:
    """Ground terms available for instantiation choices."""

    terms: tuple[Term, ...]
    depth_bound: int


def _collect_ground_leaves(term: Term, consts: list, functors: list) -> None:
    if isinstance(term, (Const, Unknown)):
        if term not in consts:
            consts.append(term)
    elif isinstance(term, Compound):
        key = (term.functor, len(term.args))
        if key not in functors:
            functors.append(key)
        for a in term.args:
            _collect_ground_leaves(a, consts, functors)


def _clause_terms(clause: Clause):
    if isinstance(clause, Fact):
        yield from clause.head.args
    elif isinstance(clause, Rule):
        yield from clause.head.args
        yield from _goal_terms(clause.body)
    elif isinstance(clause, Forall):
        yield from _clause_terms(clause.inner)
    elif isinstance(clause, ConjD):
        yield from _clause_terms(clause.left)
        yield from _clause_terms(clause.right)


def _goal_terms(goal: Goal):
    if isinstance(goal, Atom):
        yield from goal.args
    elif isinstance(goal, Conj):
        yield from _goal_terms(goal.left)
        yield from _goal_terms(goal.right)
    elif isinstance(goal, Exists):
        yield from _goal_terms(goal.body)


_UNIVERSE_CAP = 50_000


def herbrand_universe(program: Program, depth_bound: int = 0) -> Universe:
    """All ground terms over the program's constants, Unknowns, and
    functors, with nesting at most ``depth_bound``.

    Constants appear in first-occurrence order.  A program without
    constants has an empty universe: compounds need arguments, so no depth
    bound can conjure terms from nothing.
    """
    consts: list[Term] = []
    functors: list[tuple[str, int]] = []
    for clause in program.clauses:
        for term in _clause_terms(clause):
            _collect_ground_leaves(term, consts, functors)
    terms: list[Term] = list(consts)
    seen = set(terms)
    frontier = list(terms)
    for _ in range(depth_bound):
        if not functors or not terms:
            break
        new: list[Term] = []
        for functor, arity in functors:
            for args in itertools.product(terms, repeat=arity):
                candidate = Compound(functor, args)
                if candidate not in seen:
                    seen.add(candidate)
                    new.append(candidate)
                if len(seen) > _UNIVERSE_CAP:
                    raise OracleOverflow(
                        f"universe exceeds {_UNIVERSE_CAP} terms at depth {depth_bound}"
                    )
        if not new:
            break
        terms.extend(new)
    return Universe(terms=tuple(terms), depth_bound=depth_bound)


AnswerList = tuple[tuple[str, Term], ...]


def _ground(term: Term, env: Mapping[int, Term]) -> Term:
    if isinstance(term, Var):
        try:
            return env[term.id]
        except KeyError:
            raise ValueError(f"open term: variable {term.name} is not quantified")
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(_ground(a, env) for a in term.args))
    return term


def _ground_atom(a: Atom, env: Mapping[int, Term]) -> Atom:
    return Atom(a.pred, tuple(_ground(t, env) for t in a.args))


class _Enumerator:
    def __init__(self, program: Program, universe: Universe, depth_bound: int, work_limit: int):
        self.program = program
        self.universe = universe
        self.depth_bound = depth_bound
        self.work_limit = work_limit
        self.work = 0
        self.memo: dict[tuple[Atom, int], frozenset] = {}

    def _tick(self) -> None:
        self.work += 1
        if self.work > self.work_limit:
            raise OracleOverflow(f"work limit {self.work_limit} exceeded")

    def prove(self, goal: Goal, env: dict, depth: int) -> frozenset:
        """Set of noisy-binding lists over all derivations of ``goal``."""
        self._tick()
        if depth <= 0:
            return frozenset()
        if isinstance(goal, Atom):
            ground = _ground_atom(goal, env)
            key = (ground, depth)
            cached = self.memo.get(key)
            if cached is not None:
                return cached
            out: set = set()
            for clause in self.program.clauses:
                out |= self.chain(clause, {}, ground, depth - 1)
            result = frozenset(out)
            self.memo[key] = result
            return result
        if isinstance(goal, Conj):
            lefts = self.prove(goal.left, env, depth - 1)
            if not lefts:
                return frozenset()
            rights = self.prove(goal.right, env, depth - 1)
            return frozenset(l + r for l in lefts for r in rights)
        if isinstance(goal, Exists):
            out = set()
            for pick in self.universe.terms:
                sub = self.prove(goal.body, {**env, goal.var.id: pick}, depth - 1)
                if goal.noisy:
                    sub = {ans + ((goal.var.name, pick),) for ans in sub}
                out |= sub
            return frozenset(out)
        raise TypeError(f"not a goal node: {goal!r}")

    def chain(self, clause: Clause, cenv: dict, target: Atom, depth: int) -> frozenset:
        self._tick()
        if depth <= 0:
            return frozenset()
        if isinstance(clause, Fact):
            if _ground_atom(clause.head, cenv) == target:
                return frozenset({()})
            return frozenset()
        if isinstance(clause, Rule):
            if _ground_atom(clause.head, cenv) != target:
                return frozenset()
            return self.prove(clause.body, cenv, depth - 1)
        if isinstance(clause, Forall):
            out = set()
            for pick in self.universe.terms:
                sub = self.chain(clause.inner, {**cenv, clause.var.id: pick}, target, depth - 1)
                if clause.noisy:
                    sub = {ans + ((clause.var.name, pick),) for ans in sub}
                out |= sub
            return frozenset(out)
        if isinstance(clause, ConjD):
            return self.chain(clause.left, cenv, target, depth - 1) | self.chain(
                clause.right, cenv, target, depth - 1
            )
        raise TypeError(f"not a clause node: {clause!r}")


def oracle_solve(
    program: Program,
    goal: Goal,
    universe: Universe,
    *,
    depth_bound: int = 32,
    work_limit: int = 2_000_000,
) -> frozenset:
    """Set of answer lists derivable for a closed goal.

    Enumerates all assignments of universe terms to every quantifier and
    keeps the noisy bindings of each successful derivation, in the same
    premise-first order the engine records them.  Enlarging the universe or
    the depth bound never removes answers.  Raises OracleOverflow past the
    work limit.
    """
    enum = _Enumerator(program, universe, depth_bound, work_limit)
    return enum.prove(goal, {}, depth_bound)
