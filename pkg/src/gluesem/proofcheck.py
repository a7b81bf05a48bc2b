"""Independent validation of derivation trees.

check_proof re-derives every rule application from the sequents alone, so a
bug in the search cannot hide: resources must be consumed exactly once,
eigenvariables must be fresh where they are introduced, quantifier
instantiations must typecheck, and axioms must close on genuinely equal
atoms. Nothing here shares state with the search; only the formula and term
layers are reused.
"""

from __future__ import annotations

from collections import Counter
from typing import Optional, Sequence, Union

from .errors import InvalidStep
from .fstructure import SemProjectionRef
from .glue import (
    Forall,
    Formula,
    GlueAtom,
    Impl,
    ProjEigen,
    Tensor,
    atoms,
    formula_key,
    instantiate,
)
from .lexicon import Premise
from .prover import Proof, Sequent, prepare_premises
from .terms import MetaVar, Var, alpha_equal, free_vars, normalize
from .types import T


def _normal_formula(f: Formula) -> Formula:
    """Normalize every meaning so syntactic comparison is up to the laws."""
    if isinstance(f, GlueAtom):
        return GlueAtom(f.proj, normalize(f.meaning), f.result_type)
    if isinstance(f, Impl):
        return Impl(_normal_formula(f.left), _normal_formula(f.right))
    if isinstance(f, Tensor):
        return Tensor(_normal_formula(f.left), _normal_formula(f.right))
    if isinstance(f, Forall):
        return Forall(f.binder, _normal_formula(f.body))
    raise TypeError(f"not a formula: {f!r}")


def _key(f: Formula) -> str:
    return formula_key(_normal_formula(f))


def _multiset(fs: Sequence[Formula]) -> Counter:
    return Counter(_key(f) for f in fs)


def _eigen_occurs(eigen: Union[Var, ProjEigen], f: Formula) -> bool:
    for atom in atoms(f):
        if isinstance(eigen, Var):
            if any(v.name == eigen.name for v in free_vars(atom.meaning)):
                return True
        else:
            if isinstance(atom.proj, ProjEigen) and atom.proj.uid == eigen.uid:
                return True
    return False


def check_proof(proof: Proof,
                sequent: Optional[Sequent] = None,
                premises: Optional[Sequence[Union[Premise, Formula]]] = None,
                goal: Union[Formula, SemProjectionRef, str, None] = None) -> None:
    """Raise InvalidStep at the first rule application that does not hold.

    When a sequent (or premises/goal) is supplied, the root of the proof is
    additionally checked against it. A goal atom whose meaning is a search
    hole matches any meaning at the same projection and index, so the stated
    goal of a reading derivation can be checked before the reading is known.
    """
    if sequent is not None:
        premises = list(sequent.context) if premises is None else premises
        goal = sequent.goal if goal is None else goal
    if isinstance(goal, str):
        goal = SemProjectionRef(goal)
    if isinstance(goal, SemProjectionRef):
        goal = GlueAtom(goal, MetaVar("R", 0, T, 0), T)
    if premises is not None:
        expected = _multiset([f for _, f in prepare_premises(premises)])
        if _multiset(proof.sequent.context) != expected:
            raise InvalidStep(
                (), "root context differs from the stated premises"
            )
    if goal is not None and not _goal_matches(goal, proof.sequent.goal):
        raise InvalidStep((), "root goal differs from the stated goal")
    _check_node(proof, ())


def _goal_matches(stated: Formula, actual: Formula) -> bool:
    if (isinstance(stated, GlueAtom) and isinstance(stated.meaning, MetaVar)
            and isinstance(actual, GlueAtom)):
        return (stated.proj == actual.proj
                and stated.result_type == actual.result_type)
    return _key(stated) == _key(actual)


def _fail(path: tuple[int, ...], reason: str):
    raise InvalidStep(path, reason)


def _check_node(p: Proof, path: tuple[int, ...]) -> None:
    checker = _RULES.get(p.rule)
    if checker is None:
        _fail(path, f"unknown rule {p.rule!r}")
    checker(p, path)
    for i, child in enumerate(p.children):
        _check_node(child, path + (i,))


def _expect_children(p: Proof, path, n: int) -> None:
    if len(p.children) != n:
        _fail(path, f"{p.rule} expects {n} subproofs, found {len(p.children)}")


def _check_axiom(p: Proof, path) -> None:
    _expect_children(p, path, 0)
    ctx = p.sequent.context
    goal = p.sequent.goal
    if not isinstance(goal, GlueAtom):
        _fail(path, "axiom goal is not atomic")
    if len(ctx) != 1:
        _fail(path, "axiom must consume exactly one resource")
    hyp = ctx[0]
    if not isinstance(hyp, GlueAtom):
        _fail(path, "axiom hypothesis is not atomic")
    if hyp.proj != goal.proj:
        _fail(path, "axiom connects different projections")
    if hyp.result_type != goal.result_type:
        _fail(path, "axiom connects resources of different indices")
    if not alpha_equal(normalize(hyp.meaning), normalize(goal.meaning)):
        _fail(path, "axiom meanings differ")


def _check_impl_right(p: Proof, path) -> None:
    _expect_children(p, path, 1)
    goal = p.sequent.goal
    if not isinstance(goal, Impl):
        _fail(path, "impl_right goal is not an implication")
    child = p.children[0]
    if _key(child.sequent.goal) != _key(goal.right):
        _fail(path, "subproof does not conclude the consequent")
    want = _multiset(p.sequent.context)
    want[_key(goal.left)] += 1
    if _multiset(child.sequent.context) != want:
        _fail(path, "subproof context is not the context plus the antecedent")


def _check_forall_right(p: Proof, path) -> None:
    _expect_children(p, path, 1)
    goal = p.sequent.goal
    if not isinstance(goal, Forall):
        _fail(path, "forall_right goal is not quantified")
    eigen = p.eigen
    if eigen is None:
        _fail(path, "forall_right records no eigenvariable")
    for f in p.sequent.context:
        if _eigen_occurs(eigen, f):
            _fail(path, f"eigenvariable {eigen!r} already occurs in context")
    if _eigen_occurs(eigen, goal):
        _fail(path, f"eigenvariable {eigen!r} already occurs in the goal")
    try:
        opened = instantiate(goal, eigen)
    except Exception as exc:
        _fail(path, f"eigenvariable does not fit the binder: {exc}")
    child = p.children[0]
    if _key(child.sequent.goal) != _key(opened):
        _fail(path, "subproof goal is not the opened quantifier body")
    if _multiset(child.sequent.context) != _multiset(p.sequent.context):
        _fail(path, "forall_right may not change the context")


def _check_forall_left(p: Proof, path) -> None:
    _expect_children(p, path, 1)
    if p.instantiation is None:
        _fail(path, "forall_left records no instantiation")
    child = p.children[0]
    parent_ms = _multiset(p.sequent.context)
    child_ms = _multiset(child.sequent.context)
    if _key(child.sequent.goal) != _key(p.sequent.goal):
        _fail(path, "forall_left may not change the goal")
    problem = "no quantified hypothesis opens to the subproof context"
    for f in p.sequent.context:
        if not isinstance(f, Forall):
            continue
        try:
            opened = instantiate(f, p.instantiation)
        except Exception as exc:
            problem = f"instantiation does not fit the binder: {exc}"
            continue
        removed = parent_ms - Counter([_key(f)])
        added = removed + Counter([_key(opened)])
        if added == child_ms:
            return
    _fail(path, problem)


def _check_impl_left(p: Proof, path) -> None:
    _expect_children(p, path, 2)
    left, right = p.children
    if _key(right.sequent.goal) != _key(p.sequent.goal):
        _fail(path, "impl_left right subproof proves a different goal")
    parent_ms = _multiset(p.sequent.context)
    left_ms = _multiset(left.sequent.context)
    right_ms = _multiset(right.sequent.context)
    for f in p.sequent.context:
        if not isinstance(f, Impl):
            continue
        if _key(left.sequent.goal) != _key(f.left):
            continue
        want = left_ms + right_ms - Counter([_key(f.right)]) \
            + Counter([_key(f)])
        if Counter([_key(f.right)]) - right_ms:
            continue  # the consequent must land in the right subproof
        if want == parent_ms:
            return
    _fail(path, "subproofs do not split the context around an implication")


def _check_tensor_left(p: Proof, path) -> None:
    _expect_children(p, path, 1)
    child = p.children[0]
    if _key(child.sequent.goal) != _key(p.sequent.goal):
        _fail(path, "tensor_left may not change the goal")
    parent_ms = _multiset(p.sequent.context)
    child_ms = _multiset(child.sequent.context)
    for f in p.sequent.context:
        if not isinstance(f, Tensor):
            continue
        want = parent_ms - Counter([_key(f)]) \
            + Counter([_key(f.left), _key(f.right)])
        if want == child_ms:
            return
    _fail(path, "no tensor hypothesis splits to the subproof context")


_RULES = {
    "axiom": _check_axiom,
    "impl_right": _check_impl_right,
    "forall_right": _check_forall_right,
    "forall_left": _check_forall_left,
    "impl_left": _check_impl_left,
    "tensor_left": _check_tensor_left,
}
