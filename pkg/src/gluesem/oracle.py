"""Exhaustive reference enumeration for cross-checking the search.

This walks the sequent calculus with none of the prover's resource
discipline. Invertible steps are applied outright: a quantified goal gets a
fresh eigenvariable, an implication goal moves its antecedent into the
context, a pair in the context is split in place. At an atomic goal it picks
a hypothesis and commits to it, decomposing it to its atomic head and trying
every partition of the remaining resources at each implication along the
way. The only sharing with the prover is the term and unification substrate;
resource bookkeeping here is eager multiset partitioning, so a bug in the
prover's input-output threading cannot be mirrored on this side.

Cost grows exponentially in the premise count; meant for small scenarios.
"""

from __future__ import annotations

from typing import Iterator, Optional, Sequence, Union

from .errors import GlueFormulaError
from .fstructure import SemProjectionRef
from .glue import (
    Forall,
    Formula,
    GlueAtom,
    Impl,
    MeaningBinder,
    ProjEigen,
    Tensor,
    format_glue,
    instantiate,
)
from .lexicon import Premise
from .prover import (
    Reading,
    SearchLimits,
    SearchStats,
    _prepare_goal,
    _solve_goal_hole,
    _State,
    _Subst,
    _unify_atoms,
    _zonk_final_term,
    prepare_premises,
    zonk_formula,
)
from .terms import MetaVar, Var, canonical_key, normalize


def oracle_enumerate(premises: Sequence[Union[Premise, Formula]],
                     goal: Union[SemProjectionRef, str],
                     depth: int = 64,
                     stats: Optional[SearchStats] = None) -> list[Reading]:
    """All distinct readings for the goal projection, the slow sure way."""
    own_stats = stats if stats is not None else SearchStats()
    state = _State(SearchLimits(max_depth=depth), own_stats)
    goal_formula = _prepare_goal(goal, state)
    if not isinstance(goal_formula, GlueAtom) \
            or not isinstance(goal_formula.meaning, MetaVar):
        raise TypeError("the oracle enumerates readings of a projection")
    ctx = tuple(f for _, f in prepare_premises(premises))
    readings: dict[str, Reading] = {}
    for subst in _enumerate(ctx, goal_formula, _Subst(), 0, state):
        term = normalize(_zonk_final_term(goal_formula.meaning, subst))
        key = canonical_key(term)
        if key not in readings:
            readings[key] = Reading(term, None)
    own_stats.readings = len(readings)
    return [readings[k] for k in sorted(readings)]


def _enumerate(ctx: tuple[Formula, ...], goal: Formula, subst: _Subst,
               depth: int, state: _State) -> Iterator[_Subst]:
    if depth > state.limits.max_depth:
        state.stats.limit_hit = True
        return
    state.stats.nodes += 1
    if isinstance(goal, Forall):
        uid = state.fresh()
        binder = goal.binder
        if isinstance(binder, MeaningBinder):
            eigen: Union[Var, ProjEigen] = Var(f"{binder.name}#{uid}",
                                               binder.ty)
        else:
            eigen = ProjEigen(binder.name, uid, binder.index)
        yield from _enumerate(ctx, instantiate(goal, eigen), subst,
                              depth + 1, state)
        return
    if isinstance(goal, Impl):
        yield from _enumerate(ctx + (goal.left,), goal.right, subst,
                              depth + 1, state)
        return
    if not isinstance(goal, GlueAtom):
        raise TypeError(f"unexpected goal shape: {goal!r}")
    for i, f in enumerate(ctx):
        # splitting a pair loses nothing, so do it before choosing anything
        if isinstance(f, Tensor):
            rest = ctx[:i] + ctx[i + 1:]
            yield from _enumerate(rest + (f.left, f.right), goal, subst,
                                  depth + 1, state)
            return
    for i in range(len(ctx)):
        rest = ctx[:i] + ctx[i + 1:]
        yield from _decide(ctx[i], rest, goal, subst, depth + 1, state)


def _decide(f: Formula, rest: tuple[Formula, ...], goal: GlueAtom,
            subst: _Subst, depth: int, state: _State) -> Iterator[_Subst]:
    """Decompose one chosen hypothesis down to its head atom.

    Quantifiers open into fresh holes, each implication tries every way of
    paying for its antecedent out of the unused resources, and the final
    atom must both match the goal and leave nothing unconsumed.
    """
    if depth > state.limits.max_depth:
        state.stats.limit_hit = True
        return
    state.stats.nodes += 1
    f = zonk_formula(f, subst)
    if isinstance(f, Forall):
        hole = _solve_goal_hole(f.binder, state.fresh())
        yield from _decide(instantiate(f, hole), rest, goal, subst,
                           depth + 1, state)
        return
    if isinstance(f, Impl):
        n = len(rest)
        for mask in range(1 << n):
            gamma1 = tuple(rest[j] for j in range(n) if mask >> j & 1)
            gamma2 = tuple(rest[j] for j in range(n) if not mask >> j & 1)
            for mid in _enumerate(gamma1, f.left, subst, depth + 1, state):
                yield from _decide(f.right, gamma2, goal, mid,
                                   depth + 1, state)
        return
    if isinstance(f, Tensor):
        raise GlueFormulaError(
            "a pair below an implication is not supported here; "
            f"restructure the premise: {format_glue(f)}"
        )
    if rest:
        return
    out = _unify_atoms(goal, f, subst, state)
    if out is not None:
        yield out
