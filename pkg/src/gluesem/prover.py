"""Backward proof search over glue formulas.

The search is goal directed with an input-output context discipline: proving
a subgoal consumes some of the linear resources and hands the rest back. At
an atomic goal the prover focuses on one context formula, strips its
quantifiers into metavariables, unifies its head with the goal, and then
proves the formula's antecedents left to right.

Quantifier reasoning uses one global counter: every eigenvariable and every
metavariable carries the counter value from its creation. A metavariable's
solution may mention an eigenvariable only if the eigenvariable is older.
That single ordering implements the quantifier side conditions, including the
scope discipline that keeps readings closed.

Meaning unification is higher order over the pattern fragment: a
metavariable applied to distinct newer eigenvariables (or their intensions)
is inverted directly; metavariables nested inside a solution are raised over
the same arguments when their level is too new. Problems outside the
fragment are reported rather than searched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .errors import (
    GlueFormulaError,
    NonPatternUnification,
    NotProvable,
)
from .fstructure import SemProjectionRef
from .glue import (
    Forall,
    Formula,
    GlueAtom,
    Impl,
    MeaningBinder,
    Proj,
    ProjEigen,
    ProjMeta,
    Tensor,
    curry,
    format_glue,
    format_proj,
    instantiate,
)
from .lexicon import Premise
from .terms import (
    App,
    Const,
    Down,
    Lam,
    MetaVar,
    Term,
    Up,
    Var,
    app,
    canonical_key,
    format_term,
    free_meta_vars,
    infer_type,
    normalize,
    spine,
    subst_map,
)
from .types import ArrowType, SimpleType, T


@dataclass
class SearchLimits:
    """Caps and switches for one search.

    max_depth bounds the rule applications along any one branch; the search
    itself terminates structurally, so the bound is a safety valve and
    hitting it is reported, not raised. typed_scope enforces the atom index
    check during unification; turning it off makes the prover attempt
    ill-indexed combinations (they still fail, on the meaning types) and is
    only useful for observing that the index discipline does real work.
    """

    max_depth: int = 64
    typed_scope: bool = True


@dataclass
class SearchStats:
    proofs_found: int = 0
    readings: int = 0
    ill_typed_attempts: int = 0
    limit_hit: bool = False
    nonpattern: Optional[str] = None
    nodes: int = 0


@dataclass(frozen=True)
class Sequent:
    context: tuple[Formula, ...]
    goal: Formula

    def __repr__(self):
        left = ", ".join(format_glue(f) for f in self.context)
        return f"{left} |- {format_glue(self.goal)}"


@dataclass
class Proof:
    """Ground derivation tree; contexts shrink toward the leaves."""

    rule: str
    sequent: Sequent
    children: tuple["Proof", ...] = ()
    eigen: Optional[Union[Var, ProjEigen]] = None
    instantiation: Optional[Union[Term, Proj]] = None

    def conclusion(self) -> Formula:
        return self.sequent.goal


@dataclass
class Reading:
    """One normalized closed meaning with a witnessing derivation.

    The reference enumerator reports readings without reconstructing
    derivation trees, so proof may be None there.
    """

    meaning: Term
    proof: Optional[Proof]

    def __repr__(self):
        return format_term(self.meaning)


# ---------------------------------------------------------------------------
# search state

class _State:
    def __init__(self, limits: SearchLimits, stats: SearchStats):
        self.limits = limits
        self.stats = stats
        self.counter = itertools.count(1)

    def fresh(self) -> int:
        return next(self.counter)


class _Subst:
    """Bindings for meaning and projection metavariables, persistent style."""

    __slots__ = ("meanings", "projs")

    def __init__(self, meanings=None, projs=None):
        self.meanings: dict[int, Term] = meanings or {}
        self.projs: dict[int, Proj] = projs or {}

    def bind_meaning(self, uid: int, value: Term) -> "_Subst":
        meanings = dict(self.meanings)
        meanings[uid] = value
        return _Subst(meanings, self.projs)

    def bind_proj(self, uid: int, value: Proj) -> "_Subst":
        projs = dict(self.projs)
        projs[uid] = value
        return _Subst(self.meanings, projs)


def _is_eigen(v: Var) -> bool:
    return "#" in v.name


def _eigen_level(v: Var) -> int:
    return int(v.name.rsplit("#", 1)[1])


def zonk_term(t: Term, subst: _Subst) -> Term:
    if isinstance(t, MetaVar):
        bound = subst.meanings.get(t.uid)
        return t if bound is None else zonk_term(bound, subst)
    if isinstance(t, App):
        return App(zonk_term(t.fn, subst), zonk_term(t.arg, subst))
    if isinstance(t, Lam):
        return Lam(t.var, zonk_term(t.body, subst))
    if isinstance(t, Up):
        return Up(zonk_term(t.body, subst))
    if isinstance(t, Down):
        return Down(zonk_term(t.body, subst))
    return t


def zonk_proj(p: Proj, subst: _Subst) -> Proj:
    while isinstance(p, ProjMeta):
        bound = subst.projs.get(p.uid)
        if bound is None:
            return p
        p = bound
    return p


def _zonk_final_term(t: Term, subst: _Subst) -> Term:
    """Zonk and replace any unconstrained holes by placeholder constants."""
    t = zonk_term(t, subst)

    def fill(u: Term) -> Term:
        if isinstance(u, MetaVar):
            return Const(f"arb_{u.name}{u.uid}", u.ty)
        if isinstance(u, App):
            return App(fill(u.fn), fill(u.arg))
        if isinstance(u, Lam):
            return Lam(u.var, fill(u.body))
        if isinstance(u, Up):
            return Up(fill(u.body))
        if isinstance(u, Down):
            return Down(fill(u.body))
        return u

    return fill(t)


def _zonk_final_proj(p: Proj, subst: _Subst) -> Proj:
    p = zonk_proj(p, subst)
    if isinstance(p, ProjMeta):
        return SemProjectionRef(f"arb_{p.name}{p.uid}")
    return p


def zonk_formula(f: Formula, subst: _Subst, final: bool = False) -> Formula:
    if isinstance(f, GlueAtom):
        if final:
            meaning = normalize(_zonk_final_term(f.meaning, subst))
            proj = _zonk_final_proj(f.proj, subst)
        else:
            meaning = zonk_term(f.meaning, subst)
            proj = zonk_proj(f.proj, subst)
        return GlueAtom(proj, meaning, f.result_type)
    if isinstance(f, Impl):
        return Impl(zonk_formula(f.left, subst, final),
                    zonk_formula(f.right, subst, final))
    if isinstance(f, Tensor):
        return Tensor(zonk_formula(f.left, subst, final),
                      zonk_formula(f.right, subst, final))
    if isinstance(f, Forall):
        return Forall(f.binder, zonk_formula(f.body, subst, final))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# meaning unification (pattern fragment with raising)

def _unify_meaning(a: Term, b: Term, subst: _Subst,
                   state: _State) -> Optional[_Subst]:
    a = normalize(zonk_term(a, subst))
    b = normalize(zonk_term(b, subst))
    return _unify(a, b, subst, state)


def _unify(a: Term, b: Term, subst: _Subst, state: _State) -> Optional[_Subst]:
    if a == b:
        return subst
    ha, aas = spine(a)
    hb, bas = spine(b)
    a_flex = isinstance(ha, MetaVar)
    b_flex = isinstance(hb, MetaVar)
    if a_flex and b_flex:
        return _unify_flex_flex(ha, aas, hb, bas, subst, state)
    if a_flex:
        return _solve_flex(ha, aas, b, subst, state)
    if b_flex:
        return _solve_flex(hb, bas, a, subst, state)
    # rigid versus rigid
    if isinstance(a, Lam) or isinstance(b, Lam):
        lam = a if isinstance(a, Lam) else b
        uid = state.fresh()
        eigen = Var(f"{lam.var.name}#{uid}", lam.var.ty)
        return _unify(normalize(_apply_one(a, eigen)),
                      normalize(_apply_one(b, eigen)), subst, state)
    if isinstance(a, Up) and isinstance(b, Up):
        return _unify(a.body, b.body, subst, state)
    if isinstance(a, Down) and isinstance(b, Down):
        return _unify(a.body, b.body, subst, state)
    if aas or bas:
        if len(aas) != len(bas):
            return None
        current = _unify_heads(ha, hb, subst, state)
        if current is None:
            return None
        for x, y in zip(aas, bas):
            current = _unify_meaning(x, y, current, state)
            if current is None:
                return None
        return current
    if isinstance(a, Var) and isinstance(b, Var):
        return subst if a.name == b.name else None
    if isinstance(a, Const) and isinstance(b, Const):
        return subst if (a.name, a.ty) == (b.name, b.ty) else None
    return None


def _unify_heads(ha: Term, hb: Term, subst: _Subst,
                 state: _State) -> Optional[_Subst]:
    if type(ha) is type(hb) and isinstance(ha, (Up, Down)):
        # intension or extension wrappers as application heads
        return _unify(ha, hb, subst, state)
    if isinstance(ha, (Var, Const)) and isinstance(hb, (Var, Const)):
        return subst if ha == hb else None
    if free_meta_vars(ha) or free_meta_vars(hb):
        return _record_nonpattern(
            state, "application head mixes a hole with rigid structure"
        )
    return None


def _apply_one(f: Term, arg: Term) -> Term:
    if isinstance(f, Lam):
        return subst_map(f.body, {f.var.name: arg})
    return App(f, arg)


def _record_nonpattern(state: _State, why: str) -> None:
    if state.stats.nonpattern is None:
        state.stats.nonpattern = why
    return None


def _pattern_args(m: MetaVar, args: list[Term],
                  state: _State) -> Optional[list[tuple[Var, bool]]]:
    """Check the pattern condition; each arg is (eigen, is_intension)."""
    seen: set[str] = set()
    out: list[tuple[Var, bool]] = []
    for a in args:
        intension = False
        if isinstance(a, Up):
            a = a.body
            intension = True
        if not (isinstance(a, Var) and _is_eigen(a)):
            return _record_nonpattern(
                state, "metavariable applied to a non-variable argument"
            )
        if _eigen_level(a) <= m.level:
            return _record_nonpattern(
                state, "metavariable applied to an older eigenvariable"
            )
        if a.name in seen:
            return _record_nonpattern(
                state, "metavariable applied to a repeated eigenvariable"
            )
        seen.add(a.name)
        out.append((a, intension))
    return out


def _binder_types(m: MetaVar, n: int) -> Optional[list[SimpleType]]:
    tys = []
    ty = m.ty
    for _ in range(n):
        if not isinstance(ty, ArrowType):
            return None
        tys.append(ty.dom)
        ty = ty.cod
    return tys


def _solve_flex(m: MetaVar, raw_args: list[Term], rhs: Term, subst: _Subst,
                state: _State) -> Optional[_Subst]:
    args = _pattern_args(m, raw_args, state)
    if args is None:
        return None
    doms = _binder_types(m, len(raw_args))
    if doms is None:
        return None
    binders = [Var(f"x#{state.fresh()}", dom) for dom in doms]
    bare_map: dict[str, Term] = {}   # occurrences of the eigenvariable itself
    up_map: dict[str, Term] = {}     # occurrences under an intension
    for (eigen, intension), binder in zip(args, binders):
        if intension:
            bare_map[eigen.name] = Down(binder)
            up_map[eigen.name] = binder
        else:
            bare_map[eigen.name] = binder

    current = subst

    def invert(t: Term, bound: set[str]) -> Optional[Term]:
        nonlocal current
        t = normalize(zonk_term(t, current))
        head, targs = spine(t)
        if isinstance(head, MetaVar):
            if head.uid == m.uid:
                return None  # occurs check
            if head.level > m.level:
                # raise the nested hole over this problem's arguments so its
                # eventual solution can still reach them
                lifted_ty = head.ty
                for dom in reversed(doms):
                    lifted_ty = ArrowType(dom, lifted_ty)
                lifted = MetaVar(head.name, state.fresh(), lifted_ty, m.level)
                current = current.bind_meaning(
                    head.uid, app(lifted, *raw_args)
                )
                head = lifted
                targs = list(raw_args) + targs
            out: Term = head
            for ta in targs:
                inv = invert(ta, bound)
                if inv is None:
                    return None
                out = App(out, inv)
            return out
        if isinstance(t, Var):
            if t.name in bound:
                return t
            if t.name in bare_map:
                return bare_map[t.name]
            if _is_eigen(t):
                return t if _eigen_level(t) < m.level else None
            return t
        if isinstance(t, Const):
            return t
        if isinstance(t, Up):
            if (isinstance(t.body, Var) and t.body.name not in bound
                    and t.body.name in up_map):
                return up_map[t.body.name]
            body = invert(t.body, bound)
            return None if body is None else Up(body)
        if isinstance(t, Down):
            body = invert(t.body, bound)
            return None if body is None else Down(body)
        if isinstance(t, Lam):
            body = invert(t.body, bound | {t.var.name})
            return None if body is None else Lam(t.var, body)
        if isinstance(t, App):
            fn = invert(t.fn, bound)
            arg = invert(t.arg, bound)
            if fn is None or arg is None:
                return None
            return App(fn, arg)
        raise TypeError(f"not a term: {t!r}")

    inverted = invert(rhs, set())
    if inverted is None:
        return None
    solution = inverted
    for binder in reversed(binders):
        solution = Lam(binder, solution)
    solution = normalize(solution)
    if infer_type(solution) != m.ty:
        return None
    return current.bind_meaning(m.uid, solution)


def _unify_flex_flex(ma: MetaVar, aas: list[Term], mb: MetaVar,
                     bas: list[Term], subst: _Subst,
                     state: _State) -> Optional[_Subst]:
    pa = _pattern_args(ma, aas, state)
    if pa is None:
        return None
    pb = _pattern_args(mb, bas, state)
    if pb is None:
        return None
    a_doms = _binder_types(ma, len(aas))
    b_doms = _binder_types(mb, len(bas))
    if a_doms is None or b_doms is None:
        return None
    if ma.uid == mb.uid:
        if len(aas) != len(bas):
            return None
        keep = [i for i, (x, y) in enumerate(zip(aas, bas)) if x == y]
        if len(keep) == len(aas):
            return subst
        binders = [Var(f"x#{state.fresh()}", dom) for dom in a_doms]
        res_ty = _result_type(ma.ty, len(aas))
        fresh_ty = res_ty
        for i in reversed(keep):
            fresh_ty = ArrowType(a_doms[i], fresh_ty)
        fresh = MetaVar(ma.name, state.fresh(), fresh_ty, ma.level)
        body = app(fresh, *[binders[i] for i in keep])
        solution = body
        for binder in reversed(binders):
            solution = Lam(binder, solution)
        return subst.bind_meaning(ma.uid, normalize(solution))
    # different heads: restrict both to their shared arguments
    b_index = {bas[i]: i for i in range(len(bas))}
    shared = [(i, b_index[aas[i]]) for i in range(len(aas))
              if aas[i] in b_index]
    level = min(ma.level, mb.level)
    res_ty = _result_type(ma.ty, len(aas))
    fresh_ty = res_ty
    for i, _ in reversed(shared):
        fresh_ty = ArrowType(a_doms[i], fresh_ty)
    fresh = MetaVar(ma.name, state.fresh(), fresh_ty, level)
    a_binders = [Var(f"x#{state.fresh()}", dom) for dom in a_doms]
    b_binders = [Var(f"x#{state.fresh()}", dom) for dom in b_doms]
    a_sol = app(fresh, *[a_binders[i] for i, _ in shared])
    b_sol = app(fresh, *[b_binders[j] for _, j in shared])
    for binder in reversed(a_binders):
        a_sol = Lam(binder, a_sol)
    for binder in reversed(b_binders):
        b_sol = Lam(binder, b_sol)
    out = subst.bind_meaning(ma.uid, normalize(a_sol))
    return out.bind_meaning(mb.uid, normalize(b_sol))


def _result_type(ty: SimpleType, n: int) -> SimpleType:
    for _ in range(n):
        ty = ty.cod
    return ty


# ---------------------------------------------------------------------------
# projection unification

def _unify_proj(a: Proj, b: Proj, subst: _Subst) -> Optional[_Subst]:
    a = zonk_proj(a, subst)
    b = zonk_proj(b, subst)
    if isinstance(a, ProjMeta) and isinstance(b, ProjMeta):
        if a.uid == b.uid:
            return subst
        if a.index != b.index:
            return None
        if a.level >= b.level:
            return subst.bind_proj(a.uid, b)
        return subst.bind_proj(b.uid, a)
    if isinstance(b, ProjMeta):
        a, b = b, a
    if isinstance(a, ProjMeta):
        if isinstance(b, ProjEigen):
            if b.index != a.index or b.uid >= a.level:
                return None
        return subst.bind_proj(a.uid, b)
    if isinstance(a, ProjEigen) and isinstance(b, ProjEigen):
        return subst if a.uid == b.uid else None
    if isinstance(a, SemProjectionRef) and isinstance(b, SemProjectionRef):
        return subst if a == b else None
    return None


def _unify_atoms(goal: GlueAtom, head: GlueAtom, subst: _Subst,
                 state: _State) -> Optional[_Subst]:
    if goal.result_type != head.result_type:
        if state.limits.typed_scope:
            return None
        state.stats.ill_typed_attempts += 1
    out = _unify_proj(goal.proj, head.proj, subst)
    if out is None:
        return None
    return _unify_meaning(goal.meaning, head.meaning, out, state)


# ---------------------------------------------------------------------------
# focused search

_Ctx = tuple[tuple[int, Formula], ...]


@dataclass
class _SNode:
    kind: str
    consumed: frozenset[int]
    eigen: Optional[Union[Var, ProjEigen]] = None
    hyp_id: Optional[int] = None
    entry_id: Optional[int] = None
    split_ids: Optional[tuple[int, int]] = None
    insts: tuple = ()
    ants: tuple["_SNode", ...] = ()
    child: Optional["_SNode"] = None


def _ids(ctx: _Ctx) -> frozenset[int]:
    return frozenset(i for i, _ in ctx)


def _solve_goal_hole(binder, uid: int) -> Union[MetaVar, ProjMeta]:
    """A fresh hole for instantiating a premise-side quantifier."""
    if isinstance(binder, MeaningBinder):
        return MetaVar(binder.name, uid, binder.ty, uid)
    return ProjMeta(binder.name, uid, uid, binder.index)


def _solve(ctx: _Ctx, goal: Formula, subst: _Subst, depth: int,
           state: _State) -> Iterator[tuple[_Subst, _Ctx, _SNode]]:
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
        body = instantiate(goal, eigen)
        for out, ctx_out, node in _solve(ctx, body, subst, depth + 1, state):
            yield out, ctx_out, _SNode(
                "forall_right", node.consumed, eigen=eigen, child=node
            )
        return
    if isinstance(goal, Impl):
        hyp_id = state.fresh()
        extended = ctx + ((hyp_id, goal.left),)
        for out, ctx_out, node in _solve(extended, goal.right, subst,
                                         depth + 1, state):
            if hyp_id in _ids(ctx_out):
                continue  # the hypothesis must be consumed
            yield out, ctx_out, _SNode(
                "impl_right", node.consumed - {hyp_id}, hyp_id=hyp_id,
                child=node
            )
        return
    if isinstance(goal, Tensor):
        raise GlueFormulaError(
            "tensor goals are not searched; curry the goal first"
        )
    if not isinstance(goal, GlueAtom):
        raise TypeError(f"not a formula: {goal!r}")
    # split any tensor hypothesis first; the rule is invertible
    for i, (fid, f) in enumerate(ctx):
        f = zonk_formula(f, subst)
        if isinstance(f, Tensor):
            left_id, right_id = state.fresh(), state.fresh()
            rest = (ctx[:i] + ((left_id, f.left), (right_id, f.right))
                    + ctx[i + 1:])
            for out, ctx_out, node in _solve(rest, goal, subst, depth + 1,
                                             state):
                consumed = (node.consumed - {left_id, right_id}) | {fid}
                yield out, ctx_out, _SNode(
                    "tensor_left", consumed, entry_id=fid,
                    split_ids=(left_id, right_id), child=node
                )
            return
    for i in range(len(ctx)):
        fid, f = ctx[i]
        rest = ctx[:i] + ctx[i + 1:]
        yield from _focus(fid, f, rest, goal, subst, depth + 1, state)


def _focus(fid: int, f: Formula, ctx: _Ctx, goal: GlueAtom, subst: _Subst,
           depth: int, state: _State) -> Iterator[tuple[_Subst, _Ctx, _SNode]]:
    if depth > state.limits.max_depth:
        state.stats.limit_hit = True
        return
    f = zonk_formula(f, subst)
    insts: list[Union[MetaVar, ProjMeta]] = []
    while isinstance(f, Forall):
        hole = _solve_goal_hole(f.binder, state.fresh())
        insts.append(hole)
        f = instantiate(f, hole)
    antecedents: list[Formula] = []
    while isinstance(f, Impl):
        antecedents.append(f.left)
        f = f.right
    if isinstance(f, Tensor):
        raise GlueFormulaError(
            "a tensor under a quantified antecedent is not supported; "
            f"restructure the premise: {format_glue(f)}"
        )
    unified = _unify_atoms(goal, f, subst, state)
    if unified is None:
        return

    def prove_antecedents(
        index: int, ctx_cur: _Ctx, subst_cur: _Subst,
        done: tuple[_SNode, ...],
    ) -> Iterator[tuple[_Subst, _Ctx, _SNode]]:
        if index == len(antecedents):
            consumed = frozenset({fid}).union(*(n.consumed for n in done)) \
                if done else frozenset({fid})
            yield subst_cur, ctx_cur, _SNode(
                "focus", consumed, entry_id=fid, insts=tuple(insts),
                ants=done
            )
            return
        for out, ctx_out, node in _solve(ctx_cur, antecedents[index],
                                         subst_cur, depth + 1, state):
            yield from prove_antecedents(index + 1, ctx_out, out,
                                         done + (node,))

    yield from prove_antecedents(0, ctx, unified, ())


# ---------------------------------------------------------------------------
# ground proof reconstruction

def _ground_value(v: Union[MetaVar, ProjMeta],
                  subst: _Subst) -> Union[Term, Proj]:
    if isinstance(v, MetaVar):
        return normalize(_zonk_final_term(v, subst))
    return _zonk_final_proj(v, subst)


def _replay(node: _SNode, ctx: dict[int, Formula], goal: Formula,
            subst: _Subst) -> Proof:
    def sequent(ids: frozenset[int], g: Formula) -> Sequent:
        ordered = tuple(ctx[i] for i in sorted(ids))
        return Sequent(ordered, g)

    if node.kind == "forall_right":
        seq = sequent(node.consumed, goal)
        child = _replay(node.child, ctx, instantiate(goal, node.eigen), subst)
        return Proof("forall_right", seq, (child,), eigen=node.eigen)
    if node.kind == "impl_right":
        seq = sequent(node.consumed, goal)
        ctx[node.hyp_id] = zonk_formula(goal.left, subst, final=True)
        child = _replay(node.child, ctx, goal.right, subst)
        return Proof("impl_right", seq, (child,))
    if node.kind == "tensor_left":
        seq = sequent(node.consumed, goal)
        f = ctx[node.entry_id]
        left_id, right_id = node.split_ids
        ctx[left_id] = f.left
        ctx[right_id] = f.right
        child = _replay(node.child, ctx, goal, subst)
        return Proof("tensor_left", seq, (child,))
    if node.kind == "focus":
        f = ctx[node.entry_id]
        chain: list[tuple[str, Union[Term, Proj, None]]] = []
        for hole in node.insts:
            value = _ground_value(hole, subst)
            chain.append(("forall_left", value))
            f = instantiate(f, value)
        remaining = list(node.ants)
        return _replay_chain(node, chain, f, remaining, ctx, goal, subst,
                             node.consumed)
    raise ValueError(f"unknown search node {node.kind}")


def _replay_chain(node: _SNode, chain, f: Formula, ants: list[_SNode],
                  ctx: dict[int, Formula], goal: Formula, subst: _Subst,
                  ids: frozenset[int]) -> Proof:
    def sequent_for(current: Formula, id_set: frozenset[int]) -> Sequent:
        ordered = []
        for i in sorted(id_set):
            if i == node.entry_id:
                ordered.append(current)
            else:
                ordered.append(ctx[i])
        return Sequent(tuple(ordered), goal)

    if chain:
        rule, value = chain[0]
        seq = sequent_for(ctx[node.entry_id], ids)
        lowered = instantiate(ctx[node.entry_id], value)
        saved = ctx[node.entry_id]
        ctx[node.entry_id] = lowered
        child = _replay_chain(node, chain[1:], f, ants, ctx, goal, subst, ids)
        ctx[node.entry_id] = saved
        return Proof("forall_left", seq, (child,), instantiation=value)
    if ants:
        ant_node = ants[0]
        assert isinstance(f, Impl)
        seq = sequent_for(f, ids)
        left_proof = _replay(ant_node, ctx, zonk_formula(f.left, subst,
                                                         final=True), subst)
        rest_ids = (ids - ant_node.consumed) - {node.entry_id}
        saved = ctx[node.entry_id]
        ctx[node.entry_id] = f.right
        right_proof = _replay_chain(node, (), f.right, ants[1:], ctx, goal,
                                    subst, rest_ids | {node.entry_id})
        ctx[node.entry_id] = saved
        return Proof("impl_left", seq, (left_proof, right_proof))
    seq = sequent_for(f, ids)
    return Proof("axiom", seq)


# ---------------------------------------------------------------------------
# public interface

def _split_top(f: Formula) -> Iterator[Formula]:
    if isinstance(f, Tensor):
        yield from _split_top(f.left)
        yield from _split_top(f.right)
    else:
        yield f


def prepare_premises(premises: Sequence[Union[Premise, Formula]]) \
        -> list[tuple[str, Formula]]:
    """Name, curry, and split the premises the way the search consumes them.

    A bare tensor premise is two resources, so it is split before currying;
    tensors in antecedent positions are curried away.
    """
    out = []
    for i, p in enumerate(premises):
        if isinstance(p, Premise):
            name, f = p.name, p.formula
        else:
            name, f = f"premise-{i + 1}", p
        parts = list(_split_top(f))
        for j, part in enumerate(parts):
            label = name if len(parts) == 1 else f"{name}/{j + 1}"
            out.append((label, curry(part)))
    return out


def _prepare_goal(goal: Union[Formula, SemProjectionRef, str],
                  state: _State) -> Formula:
    if isinstance(goal, str):
        goal = SemProjectionRef(goal)
    if isinstance(goal, SemProjectionRef):
        uid = state.fresh()
        return GlueAtom(goal, MetaVar("R", uid, T, uid), T)
    return curry(goal)


def _search(premises: Sequence[Union[Premise, Formula]],
            goal: Union[Formula, SemProjectionRef, str],
            limits: Optional[SearchLimits],
            stats: Optional[SearchStats]):
    limits = limits or SearchLimits()
    stats = stats if stats is not None else SearchStats()
    state = _State(limits, stats)
    goal_formula = _prepare_goal(goal, state)
    pairs = prepare_premises(premises)
    ctx: list[tuple[int, Formula]] = []
    names: dict[int, str] = {}
    initial: dict[int, Formula] = {}
    for name, f in pairs:
        fid = state.fresh()
        ctx.append((fid, f))
        names[fid] = name
        initial[fid] = f
    results = []
    for subst, ctx_out, node in _solve(tuple(ctx), goal_formula, _Subst(),
                                       0, state):
        if ctx_out:
            continue  # linear logic: every premise must be used
        results.append((subst, node))
    return state, goal_formula, initial, names, results


def prove(premises: Sequence[Union[Premise, Formula]],
          goal: Union[Formula, SemProjectionRef, str],
          limits: Optional[SearchLimits] = None,
          stats: Optional[SearchStats] = None) -> list[Proof]:
    """All cut-free derivations of the goal that use every premise once."""
    state, goal_formula, initial, _, results = _search(
        premises, goal, limits, stats
    )
    proofs = []
    for subst, node in results:
        ground_goal = zonk_formula(goal_formula, subst, final=True)
        ctx = {fid: zonk_formula(f, subst, final=True)
               for fid, f in initial.items()}
        proofs.append(_replay(node, ctx, ground_goal, subst))
    state.stats.proofs_found = len(proofs)
    if not proofs and state.stats.nonpattern is not None:
        raise NonPatternUnification(
            "search failed and hit a unification problem outside the "
            f"pattern fragment: {state.stats.nonpattern}"
        )
    return proofs


def derive_readings(premises: Sequence[Union[Premise, Formula]],
                    goal: Union[SemProjectionRef, str],
                    limits: Optional[SearchLimits] = None,
                    stats: Optional[SearchStats] = None) -> list[Reading]:
    """Distinct normalized meanings derivable for a projection."""
    own_stats = stats if stats is not None else SearchStats()
    state, goal_formula, initial, _, results = _search(
        premises, goal, limits, own_stats
    )
    hole = goal_formula.meaning
    by_key: dict[str, Reading] = {}
    for subst, node in results:
        term = normalize(_zonk_final_term(hole, subst))
        key = canonical_key(term)
        if key in by_key:
            continue  # distinct proofs of one normal form are one reading
        ground_goal = zonk_formula(goal_formula, subst, final=True)
        ctx = {fid: zonk_formula(f, subst, final=True)
               for fid, f in initial.items()}
        by_key[key] = Reading(term, _replay(node, ctx, ground_goal, subst))
    own_stats.proofs_found = len(results)
    own_stats.readings = len(by_key)
    if not by_key and own_stats.nonpattern is not None:
        raise NonPatternUnification(
            "search failed and hit a unification problem outside the "
            f"pattern fragment: {own_stats.nonpattern}"
        )
    return [by_key[k] for k in sorted(by_key)]


def prove_theorem(goal: Formula,
                  limits: Optional[SearchLimits] = None,
                  stats: Optional[SearchStats] = None) -> Proof:
    """Prove a closed formula from no premises; the first proof found."""
    own_stats = stats if stats is not None else SearchStats()
    proofs = prove((), goal, limits, own_stats)
    if not proofs:
        raise NotProvable(
            f"not provable: {format_glue(goal)}",
            limit_hit=own_stats.limit_hit,
        )
    return proofs[0]


# ---------------------------------------------------------------------------
# trace serialization


def _trace_value(v: Union[Term, Proj]) -> str:
    return format_term(v) if isinstance(v, Term) else format_proj(v)


def format_proof(proof: Proof) -> str:
    """Indented rule-per-line rendering of a derivation tree."""
    lines: list[str] = []
    _format_proof(proof, 0, lines)
    return "\n".join(lines)


def _format_proof(p: Proof, depth: int, lines: list[str]) -> None:
    note = ""
    if p.eigen is not None:
        note = f"  [fresh {_trace_value(p.eigen)}]"
    elif p.instantiation is not None:
        note = f"  [:= {_trace_value(p.instantiation)}]"
    lines.append(f"{'  ' * depth}{p.rule}: {p.sequent!r}{note}")
    for child in p.children:
        _format_proof(child, depth + 1, lines)


def proof_json(proof: Proof) -> dict:
    """Nested dict mirror of the proof, ready for json.dump."""
    node: dict = {
        "rule": proof.rule,
        "context": [format_glue(f) for f in proof.sequent.context],
        "goal": format_glue(proof.sequent.goal),
    }
    substitution: dict[str, str] = {}
    if proof.eigen is not None:
        substitution["fresh"] = _trace_value(proof.eigen)
    if proof.instantiation is not None:
        substitution["value"] = _trace_value(proof.instantiation)
    if substitution:
        node["substitution"] = substitution
    node["children"] = [proof_json(c) for c in proof.children]
    return node
