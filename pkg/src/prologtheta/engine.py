"""Two-phase proof search with per-step recording of instantiations.

Search alternates between goal reduction and backchaining.  Goal reduction
(``reduce_goal``, displayed as ``pv``) simplifies a goal until it is an
atom, then switches to backchaining (``backchain``, displayed as ``bc``),
which decomposes one program clause until its head matches the atom.

Every completed inference contributes one step to the proof; a step
carries a binding exactly when it instantiated a noisy quantifier.  Steps
are emitted in premise-first order, so step 1 is the deepest leaf and the
last step is the root judgment on the whole query; this is the order in
which traces are displayed.

The nondeterministic choice of an instantiation term is realized by logic
variables, unification, and chronological backtracking over a trail.
Clause alternatives are tried in textual order, which makes search
deterministic and Prolog-like: depth first, left to right, first clause
first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .terms import (
    Substitution,
    Term,
    apply,
    fresh_var,
    is_ground,
    unify_into,
)
from .syntax import (
    Atom,
    Clause,
    Conj,
    ConjD,
    Exists,
    Fact,
    Forall,
    Goal,
    Rule,
    subst_clause,
    subst_goal,
    wellformed,
)
from .loader import Program
from .parser import format_atom, format_clause, format_goal, format_term


class EngineError(Exception):
    """A query violated the engine's entry contract (not a proof failure)."""


@dataclass(frozen=True)
class SolveConfig:
    groundness_mode: str = "strict"  # or "lenient"
    max_depth: Optional[int] = None  # None = unlimited
    max_solutions: Optional[int] = 1  # None = unlimited
    occurs_check: bool = True
    trace_enabled: bool = True


Theta = tuple[str, Term]


@dataclass(frozen=True)
class ProofStep:
    """One inference: ``bc`` decomposes a clause, ``pv`` reduces a goal.

    ``focus`` is the clause being decomposed for bc steps and the program
    for pv steps.  ``theta`` is the recorded binding and is present exactly
    when the step instantiated a noisy quantifier; its term is fully
    resolved against the final substitution.
    """

    index: int
    kind: str  # "bc" | "pv"
    focus: Union[Clause, Program]
    goal: Union[Goal, Atom]
    theta: Optional[Theta]


@dataclass(frozen=True)
class ProofTrace:
    steps: tuple[ProofStep, ...]


@dataclass(frozen=True)
class Solution:
    """An answer substitution together with the proof that produced it."""

    answer: tuple[Theta, ...]
    trace: Optional[ProofTrace]
    final_subst: Substitution

    @property
    def has_residual_vars(self) -> bool:
        return any(not is_ground(t) for _, t in self.answer)


class ProofSearch:
    """One in-progress search: owns its bindings, trail, and step list.

    A search is single threaded.  Several searches over the same immutable
    Program may run in parallel.
    """

    def __init__(self, program: Program, config: SolveConfig = SolveConfig()):
        self.program = program
        self.config = config
        self.bindings: dict[int, Term] = {}
        self.trail: list[int] = []
        self.steps: list[tuple] = []  # (kind, focus, goal, theta)
        self.depth_clipped = False

    # -- bookkeeping --------------------------------------------------------

    def _mark(self) -> int:
        return len(self.trail)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            del self.bindings[self.trail.pop()]

    def _emit(self, kind: str, focus, goal, theta) -> None:
        self.steps.append((kind, focus, goal, theta))

    def _retract(self) -> None:
        self.steps.pop()

    def _too_deep(self, depth: int) -> bool:
        limit = self.config.max_depth
        if limit is not None and depth > limit:
            self.depth_clipped = True
            return True
        return False

    def _unify_atoms(self, a: Atom, b: Atom) -> bool:
        if a.pred != b.pred or len(a.args) != len(b.args):
            return False
        return all(
            unify_into(x, y, self.bindings, self.trail, self.config.occurs_check)
            for x, y in zip(a.args, b.args)
        )

    # -- goal reduction -------------------------------------------------

    def reduce_goal(self, goal: Goal, depth: int) -> Iterator[None]:
        """Yield once per derivation of ``goal``; bindings live across yields.

        Atoms switch to backchaining over the whole program; conjunctions
        prove left then right; existentials allocate a fresh variable for
        the bound one and, when noisy, record its final value.
        """
        if self._too_deep(depth):
            return
        if isinstance(goal, Atom):
            for clause in self.program.clauses:  # ordered clause trial
                for _ in self.backchain(clause, goal, depth + 1):
                    self._emit("pv", self.program, goal, None)
                    yield
                    self._retract()
        elif isinstance(goal, Conj):
            for _ in self.reduce_goal(goal.left, depth + 1):
                for _ in self.reduce_goal(goal.right, depth + 1):
                    self._emit("pv", self.program, goal, None)
                    yield
                    self._retract()
        elif isinstance(goal, Exists):
            witness = fresh_var(goal.var.name)
            body = subst_goal(goal.body, {goal.var.id: witness})
            for _ in self.reduce_goal(body, depth + 1):
                theta = (goal.var.name, witness) if goal.noisy else None
                self._emit("pv", self.program, goal, theta)
                yield
                self._retract()
        else:
            raise EngineError(f"not a goal node: {goal!r}")

    # -- backchaining -----------------------------------------------------

    def backchain(self, clause: Clause, goal_atom: Atom, depth: int) -> Iterator[None]:
        """Decompose ``clause`` until its head matches ``goal_atom``.

        Facts unify directly; a rule's head is unified and then its body is
        proved against the full program; universals are stripped by
        renaming the bound variable fresh, recording the instantiation for
        noisy ones; clause conjunctions try both sides in order.
        """
        if self._too_deep(depth):
            return
        if isinstance(clause, Fact):
            mark = self._mark()
            if self._unify_atoms(clause.head, goal_atom):
                self._emit("bc", clause, goal_atom, None)
                yield
                self._retract()
            self._undo(mark)
        elif isinstance(clause, Rule):
            mark = self._mark()
            if self._unify_atoms(clause.head, goal_atom):
                for _ in self.reduce_goal(clause.body, depth + 1):
                    self._emit("bc", clause, goal_atom, None)
                    yield
                    self._retract()
            self._undo(mark)
        elif isinstance(clause, Forall):
            witness = fresh_var(clause.var.name)
            inner = subst_clause(clause.inner, {clause.var.id: witness})
            for _ in self.backchain(inner, goal_atom, depth + 1):
                theta = (clause.var.name, witness) if clause.noisy else None
                self._emit("bc", clause, goal_atom, theta)
                yield
                self._retract()
        elif isinstance(clause, ConjD):
            for side in (clause.left, clause.right):
                for _ in self.backchain(side, goal_atom, depth + 1):
                    self._emit("bc", clause, goal_atom, None)
                    yield
                    self._retract()
        else:
            raise EngineError(f"not a clause node: {clause!r}")

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> tuple[ProofTrace, Substitution]:
        subst = Substitution(self.bindings)
        steps = tuple(
            ProofStep(
                index=i,
                kind=kind,
                focus=focus if isinstance(focus, Program) else _resolve_clause(focus, subst),
                goal=_resolve_goal(goal, subst),
                theta=None if theta is None else (theta[0], subst.resolve(theta[1])),
            )
            for i, (kind, focus, goal, theta) in enumerate(self.steps, 1)
        )
        return ProofTrace(steps), subst


def _resolve_goal(goal: Goal, subst: Substitution) -> Goal:
    if isinstance(goal, Atom):
        return Atom(goal.pred, tuple(subst.resolve(t) for t in goal.args))
    if isinstance(goal, Conj):
        return Conj(_resolve_goal(goal.left, subst), _resolve_goal(goal.right, subst))
    if isinstance(goal, Exists):
        return Exists(goal.var, _resolve_goal(goal.body, subst), goal.noisy)
    return goal


def _resolve_clause(clause: Clause, subst: Substitution) -> Clause:
    if isinstance(clause, Fact):
        return Fact(_resolve_goal(clause.head, subst))
    if isinstance(clause, Rule):
        return Rule(_resolve_goal(clause.head, subst), _resolve_goal(clause.body, subst))
    if isinstance(clause, Forall):
        return Forall(clause.var, _resolve_clause(clause.inner, subst), clause.noisy)
    if isinstance(clause, ConjD):
        return ConjD(_resolve_clause(clause.left, subst), _resolve_clause(clause.right, subst))
    return clause


def collect_answer(
    trace: ProofTrace, final_subst: Substitution, mode: str = "strict"
) -> Optional[list[Theta]]:
    """Gather recorded bindings in step order.

    Strict mode returns None (a backtracking signal, not an error) when any
    recorded term is not ground; lenient mode keeps residual variables.
    """
    out: list[Theta] = []
    for step in trace.steps:
        if step.theta is None:
            continue
        name, term = step.theta
        term = apply(final_subst, term)
        if mode == "strict" and not is_ground(term):
            return None
        out.append((name, term))
    return out


class SolveSession:
    """Lazy solution stream plus the incomplete-search flag.

    Iterate it, or call ``next_solution()`` which returns None when the
    stream ends; ``incomplete`` tells whether any branch was cut by the
    depth limit, distinguishing a bounded search from finite failure.
    """

    def __init__(self, program: Program, goal: Goal, config: SolveConfig):
        issues = wellformed(goal, arities=program.arities(), allow_unknowns=True)
        if issues:
            raise EngineError("; ".join(issues))
        self.program = program
        self.goal = goal
        self.config = config
        self.search = ProofSearch(program, config)
        self.solutions_found = 0
        self._gen = self._run()

    @property
    def incomplete(self) -> bool:
        return self.search.depth_clipped

    def _run(self) -> Iterator[Solution]:
        config = self.config
        for _ in self.search.reduce_goal(self.goal, 1):
            trace, subst = self.search.snapshot()
            answer = collect_answer(trace, subst, config.groundness_mode)
            if answer is None:
                continue  # non-ground noisy witness: reject and backtrack
            yield Solution(
                answer=tuple(answer),
                trace=trace if config.trace_enabled else None,
                final_subst=subst,
            )
            self.solutions_found += 1
            if (
                config.max_solutions is not None
                and self.solutions_found >= config.max_solutions
            ):
                return

    def __iter__(self) -> Iterator[Solution]:
        return self._gen

    def next_solution(self) -> Optional[Solution]:
        return next(self._gen, None)


def solve(program: Program, goal: Goal, config: SolveConfig = SolveConfig()) -> SolveSession:
    """Prove ``goal`` from ``program``, yielding solutions lazily.

    The goal must be closed and well formed (desugar queries first).
    Solutions come in depth-first, left-to-right, clause order; each
    carries the recorded answer bindings, the bottom-up proof trace, and
    the final substitution.
    """
    return SolveSession(program, goal, config)


# ---------------------------------------------------------------------------
# Display.


def display_names(answer) -> list[str]:
    """Answer entry names with repeats suffixed ``#2``, ``#3``, ..."""
    counts: dict[str, int] = {}
    out = []
    for name, _ in answer:
        counts[name] = counts.get(name, 0) + 1
        out.append(name if counts[name] == 1 else f"{name}#{counts[name]}")
    return out


def format_theta(theta: Optional[Theta]) -> str:
    if theta is None:
        return "nil"
    return f"<{theta[0]}, {format_term(theta[1])}>"


def format_proof(trace: ProofTrace, answer) -> str:
    """Render a trace bottom-up: line 1 is the deepest step, the last line
    is the root judgment, followed by the answer substitution."""
    label = "program"
    if trace.steps and isinstance(trace.steps[-1].focus, Program):
        label = trace.steps[-1].focus.name

    def shown_goal(goal) -> str:
        # parenthesize goals with a top-level comma so step arguments stay
        # unambiguous; the parenthesized form reparses to the same goal
        text = format_goal(goal)
        depth = 0
        for ch in text:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return f"({text})"
        return text

    lines = []
    for step in trace.steps:
        theta = format_theta(step.theta)
        if step.kind == "bc":
            lines.append(
                f"{step.index}. bc({format_clause(step.focus)}, {label}, "
                f"{format_atom(step.goal)}, {theta})"
            )
        else:
            lines.append(f"{step.index}. pv({label}, {shown_goal(step.goal)}, {theta})")
    pairs = ", ".join(
        f"{shown} = {format_term(term)}"
        for shown, (_, term) in zip(display_names(answer), answer)
    )
    lines.append(f"answer: {{{pairs}}}")
    return "\n".join(lines)


def validate_trace(program: Program, goal: Goal, trace: ProofTrace) -> list[str]:
    """Structural replay checks used by the test suite."""
    problems = []
    if not trace.steps:
        return ["empty trace"]
    root = trace.steps[-1]
    if root.kind != "pv":
        problems.append("root step is not a goal-reduction step")
    if not (isinstance(root.focus, Program) and root.focus is program):
        problems.append("root step does not carry the program")
    if root.goal != goal:
        problems.append("root step does not carry the original goal")
    for i, step in enumerate(trace.steps, 1):
        if step.index != i:
            problems.append(f"step {i} has index {step.index}")
        noisy_site = (
            step.kind == "pv"
            and isinstance(step.goal, Exists)
            and step.goal.noisy
        ) or (
            step.kind == "bc"
            and isinstance(step.focus, Forall)
            and step.focus.noisy
        )
        if noisy_site and step.theta is None:
            problems.append(f"step {i} should record a binding")
        if not noisy_site and step.theta is not None:
            problems.append(f"step {i} records a binding it should not")
    return problems
