"""Linear-logic formulas pairing projections with meaning terms.

The atom ``g.sig ~> M`` states that the semantic projection of node g yields
meaning M. Atoms carry the type of their meaning side as an index, so the
resource expecting a proposition is distinct from the one carrying an entity.

Connectives, loosest to tightest binding:

    forall X:e, H:proj(t). BODY    quantified meanings and projections
    A -o B                         linear implication, right associative
    A * B                          multiplicative conjunction

Projection positions accept a concrete reference ``g.sig`` (facets
``g.sig.VAR`` and ``g.sig.RESTR`` address a quantifier's variable and
restriction slots), a bound projection variable ``H``, or the template forms
``^.sig`` and ``(^ SUBJ).sig`` that lexical entries use before they are
attached to a concrete node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .errors import (
    AtomTypeMismatch,
    GlueSyntaxError,
    OpenVariable,
    TensorInConclusion,
)
from .fstructure import FACETS, SemProjectionRef
from .terms import (
    MetaVar,
    Term,
    Var,
    _IDENT_RE,
    canonical_key,
    format_term,
    infer_type,
    parse_term_prefix,
    subst_map,
    typecheck,
)
from .types import (
    BaseType,
    SimpleType,
    _parse_type_at,
    _skip_ws,
    format_type,
)
from .errors import UnboundVariable


# ---------------------------------------------------------------------------
# projection references

@dataclass(frozen=True)
class ProjVar:
    """Occurrence of a projection variable bound by a quantifier."""

    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class ProjEigen:
    """Arbitrary projection introduced when proving a projection universal."""

    name: str
    uid: int
    index: SimpleType

    def __repr__(self):
        return f"{self.name}#{self.uid}"


@dataclass(frozen=True)
class ProjMeta:
    """Projection hole chosen during search; level gates eigen capture."""

    name: str
    uid: int
    level: int
    index: SimpleType

    def __repr__(self):
        return f"?{self.name}{self.uid}"


@dataclass(frozen=True)
class PathRef:
    """Template projection: a path from the node an entry attaches to."""

    path: tuple[str, ...]
    facet: str = "MAIN"

    def __repr__(self):
        if not self.path:
            base = "^.sig"
        else:
            base = f"(^ {' '.join(self.path)}).sig"
        if self.facet == "MAIN":
            return base
        return f"{base}.{self.facet}"


Proj = Union[SemProjectionRef, ProjVar, ProjEigen, ProjMeta, PathRef]


# ---------------------------------------------------------------------------
# formulas

@dataclass(frozen=True)
class GlueAtom:
    proj: Proj
    meaning: Term
    result_type: SimpleType

    def __repr__(self):
        return format_glue(self)


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"

    def __repr__(self):
        return format_glue(self)


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"

    def __repr__(self):
        return format_glue(self)


@dataclass(frozen=True)
class MeaningBinder:
    name: str
    ty: SimpleType


@dataclass(frozen=True)
class ProjBinder:
    """Binds a projection variable; index is the meaning type it carries."""

    name: str
    index: SimpleType


Binder = Union[MeaningBinder, ProjBinder]


@dataclass(frozen=True)
class Forall:
    binder: Binder
    body: "Formula"

    def __repr__(self):
        return format_glue(self)


Formula = Union[GlueAtom, Impl, Tensor, Forall]


# ---------------------------------------------------------------------------
# structural helpers

def substitute_meaning(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free meaning variables across all atoms."""
    if not mapping:
        return f
    if isinstance(f, GlueAtom):
        return GlueAtom(f.proj, subst_map(f.meaning, mapping), f.result_type)
    if isinstance(f, Impl):
        return Impl(substitute_meaning(f.left, mapping),
                    substitute_meaning(f.right, mapping))
    if isinstance(f, Tensor):
        return Tensor(substitute_meaning(f.left, mapping),
                      substitute_meaning(f.right, mapping))
    if isinstance(f, Forall):
        if isinstance(f.binder, MeaningBinder) and f.binder.name in mapping:
            mapping = {k: v for k, v in mapping.items()
                       if k != f.binder.name}
        return Forall(f.binder, substitute_meaning(f.body, mapping))
    raise TypeError(f"not a formula: {f!r}")


def substitute_proj(f: Formula, mapping: Mapping[str, Proj]) -> Formula:
    """Replace free projection variables."""
    if not mapping:
        return f
    if isinstance(f, GlueAtom):
        if isinstance(f.proj, ProjVar) and f.proj.name in mapping:
            return GlueAtom(mapping[f.proj.name], f.meaning, f.result_type)
        return f
    if isinstance(f, Impl):
        return Impl(substitute_proj(f.left, mapping),
                    substitute_proj(f.right, mapping))
    if isinstance(f, Tensor):
        return Tensor(substitute_proj(f.left, mapping),
                      substitute_proj(f.right, mapping))
    if isinstance(f, Forall):
        if isinstance(f.binder, ProjBinder) and f.binder.name in mapping:
            mapping = {k: v for k, v in mapping.items()
                       if k != f.binder.name}
        return Forall(f.binder, substitute_proj(f.body, mapping))
    raise TypeError(f"not a formula: {f!r}")


def instantiate(f: Forall, value: Union[Term, Proj]) -> Formula:
    """Open one quantifier, substituting value for the bound variable."""
    binder = f.binder
    if isinstance(binder, MeaningBinder):
        if not isinstance(value, Term):
            raise TypeError("meaning binder instantiated with a projection")
        if infer_type(value) != binder.ty:
            raise AtomTypeMismatch(
                f"{binder.name} has type {format_type(binder.ty)}, got "
                f"{format_type(infer_type(value))}"
            )
        return substitute_meaning(f.body, {binder.name: value})
    if isinstance(value, Term):
        raise TypeError("projection binder instantiated with a meaning term")
    declared = getattr(value, "index", None)
    if declared is not None and declared != binder.index:
        raise AtomTypeMismatch(
            f"{binder.name} indexes {format_type(binder.index)} resources, "
            f"got proj({format_type(declared)})"
        )
    return substitute_proj(f.body, {binder.name: value})


def atoms(f: Formula) -> Iterator[GlueAtom]:
    if isinstance(f, GlueAtom):
        yield f
    elif isinstance(f, (Impl, Tensor)):
        yield from atoms(f.left)
        yield from atoms(f.right)
    elif isinstance(f, Forall):
        yield from atoms(f.body)


# ---------------------------------------------------------------------------
# wellformedness

def check_wellformed(f: Formula, signature: Mapping[str, SimpleType]) -> None:
    """Validate a source-level formula.

    Every meaning variable and projection variable must be bound by an
    enclosing quantifier (constants come from the signature); each atom's
    meaning must typecheck at exactly the atom's declared index.
    """
    _check(f, dict(signature), {})


def _check(f: Formula, env: dict[str, SimpleType],
           proj_env: dict[str, SimpleType]) -> None:
    if isinstance(f, GlueAtom):
        if isinstance(f.proj, ProjVar):
            index = proj_env.get(f.proj.name)
            if index is None:
                raise OpenVariable(
                    f"projection variable {f.proj.name} is not bound"
                )
            if index != f.result_type:
                raise AtomTypeMismatch(
                    f"{f.proj.name} carries {format_type(index)} resources "
                    f"but the atom is indexed {format_type(f.result_type)}"
                )
        try:
            ty = typecheck(f.meaning, env)
        except UnboundVariable as exc:
            raise OpenVariable(str(exc)) from None
        if ty != f.result_type:
            raise AtomTypeMismatch(
                f"meaning {format_term(f.meaning)} has type {format_type(ty)} "
                f"but the atom is indexed {format_type(f.result_type)}"
            )
        return
    if isinstance(f, (Impl, Tensor)):
        _check(f.left, env, proj_env)
        _check(f.right, env, proj_env)
        return
    if isinstance(f, Forall):
        if isinstance(f.binder, MeaningBinder):
            saved = env.get(f.binder.name)
            env[f.binder.name] = f.binder.ty
            _check(f.body, env, proj_env)
            if saved is None:
                del env[f.binder.name]
            else:
                env[f.binder.name] = saved
        else:
            saved = proj_env.get(f.binder.name)
            proj_env[f.binder.name] = f.binder.index
            _check(f.body, env, proj_env)
            if saved is None:
                del proj_env[f.binder.name]
            else:
                proj_env[f.binder.name] = saved
        return
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# currying and polarity

def curry(f: Formula) -> Formula:
    """Rewrite tensor antecedents into nested implications.

    A * B -o C becomes A -o B -o C, recursively and on both sides of every
    implication. A tensor in conclusion position has no implication form, so
    it is rejected.
    """
    return _curry(f, True)


def _curry(f: Formula, conclusion: bool) -> Formula:
    if isinstance(f, GlueAtom):
        return f
    if isinstance(f, Forall):
        return Forall(f.binder, _curry(f.body, conclusion))
    if isinstance(f, Impl):
        left = _curry(f.left, not conclusion)
        right = _curry(f.right, conclusion)
        return _peel(left, right)
    if isinstance(f, Tensor):
        if conclusion:
            raise TensorInConclusion(
                f"tensor in conclusion position: {format_glue(f)}"
            )
        return Tensor(_curry(f.left, conclusion), _curry(f.right, conclusion))
    raise TypeError(f"not a formula: {f!r}")


def _peel(antecedent: Formula, conclusion: Formula) -> Formula:
    if isinstance(antecedent, Tensor):
        return _peel(antecedent.left, _peel(antecedent.right, conclusion))
    return Impl(antecedent, conclusion)


def polarity_roles(f: Formula) -> list[tuple[str, str, str]]:
    """Role of each quantified variable when the formula is used as a premise.

    Premise-side quantifiers are instantiated by the prover (existential
    role); each descent into an implication antecedent flips the side, and a
    goal-side quantifier introduces an arbitrary fresh object (eigen role).
    Returned in binding order as (name, meaning|projection, role).
    """
    roles: list[tuple[str, str, str]] = []

    def walk(g: Formula, premise_side: bool) -> None:
        if isinstance(g, Forall):
            kind = ("meaning" if isinstance(g.binder, MeaningBinder)
                    else "projection")
            role = "existential" if premise_side else "eigen"
            roles.append((g.binder.name, kind, role))
            walk(g.body, premise_side)
        elif isinstance(g, Impl):
            walk(g.left, not premise_side)
            walk(g.right, premise_side)
        elif isinstance(g, Tensor):
            walk(g.left, premise_side)
            walk(g.right, premise_side)

    walk(f, True)
    return roles


# ---------------------------------------------------------------------------
# alpha comparison

def formula_key(f: Formula) -> str:
    """Canonical rendering, invariant under renaming of bound variables."""
    return _fkey(f, {}, {}, [0])


def _fkey(f: Formula, m_env: dict[str, Var], p_env: dict[str, ProjVar],
          counter: list[int]) -> str:
    if isinstance(f, GlueAtom):
        meaning = subst_map(f.meaning, m_env)
        proj = f.proj
        if isinstance(proj, ProjVar):
            proj = p_env.get(proj.name, proj)
        return (f"A[{proj!r};{canonical_key(meaning)};"
                f"{format_type(f.result_type)}]")
    if isinstance(f, Impl):
        return (f"({_fkey(f.left, m_env, p_env, counter)} -o "
                f"{_fkey(f.right, m_env, p_env, counter)})")
    if isinstance(f, Tensor):
        return (f"({_fkey(f.left, m_env, p_env, counter)} * "
                f"{_fkey(f.right, m_env, p_env, counter)})")
    if isinstance(f, Forall):
        # the space inside the canonical name keeps it disjoint from any
        # name that could appear in source text
        fresh = f" q{counter[0]}"
        counter[0] += 1
        if isinstance(f.binder, MeaningBinder):
            m_env = dict(m_env)
            m_env[f.binder.name] = Var(fresh, f.binder.ty)
            body = _fkey(f.body, m_env, p_env, counter)
            return f"(all {fresh}:{format_type(f.binder.ty)}.{body})"
        p_env = dict(p_env)
        p_env[f.binder.name] = ProjVar(fresh)
        body = _fkey(f.body, m_env, p_env, counter)
        return f"(allp {fresh}:{format_type(f.binder.index)}.{body})"
    raise TypeError(f"not a formula: {f!r}")


def alpha_equal_formulas(a: Formula, b: Formula) -> bool:
    return formula_key(a) == formula_key(b)


# ---------------------------------------------------------------------------
# parsing

class _GlueParser:
    def __init__(self, text: str, signature: Mapping[str, SimpleType]):
        self.text = text
        self.pos = 0
        self.sig = signature
        self.meaning_env: dict[str, SimpleType] = {}
        self.proj_env: dict[str, SimpleType] = {}

    def error(self, msg: str) -> GlueSyntaxError:
        return GlueSyntaxError(msg, self.pos)

    def skip_ws(self) -> None:
        self.pos = _skip_ws(self.text, self.pos)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_word(self, word: str) -> bool:
        self.skip_ws()
        end = self.pos + len(word)
        if self.text[self.pos:end] != word:
            return False
        return end >= len(self.text) or not (self.text[end].isalnum()
                                             or self.text[end] == "_")

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected an identifier")
        self.pos = m.end()
        return m.group()

    def expect(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def parse(self) -> Formula:
        f = self.formula()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"trailing input {self.text[self.pos:]!r}")
        return f

    def formula(self) -> Formula:
        if self.at_word("forall"):
            self.pos += len("forall")
            binders = [self.binder()]
            while self.peek() == ",":
                self.pos += 1
                binders.append(self.binder())
            self.expect(".")
            shadows = []
            for b in binders:
                if isinstance(b, MeaningBinder):
                    shadows.append((b.name, self.meaning_env.get(b.name)))
                    self.meaning_env[b.name] = b.ty
                else:
                    shadows.append((b.name, self.proj_env.get(b.name)))
                    self.proj_env[b.name] = b.index
            body = self.formula()
            for b, (name, saved) in zip(reversed(binders), reversed(shadows)):
                env = (self.meaning_env if isinstance(b, MeaningBinder)
                       else self.proj_env)
                if saved is None:
                    del env[name]
                else:
                    env[name] = saved
                body = Forall(b, body)
            return body
        return self.impl()

    def binder(self) -> Binder:
        name = self.ident()
        self.expect(":")
        if self.at_word("proj"):
            self.pos += len("proj")
            self.expect("(")
            index, self.pos = _parse_type_at(self.text, self.pos)
            self.expect(")")
            return ProjBinder(name, index)
        ty, self.pos = _parse_type_at(self.text, self.pos)
        return MeaningBinder(name, ty)

    def impl(self) -> Formula:
        left = self.tensor()
        self.skip_ws()
        if self.text.startswith("-o", self.pos):
            self.pos += 2
            return Impl(left, self.impl())
        return left

    def tensor(self) -> Formula:
        left = self.unit()
        while self.peek() == "*":
            self.pos += 1
            left = Tensor(left, self.unit())
        return left

    def unit(self) -> Formula:
        ch = self.peek()
        if ch == "(":
            # a parenthesized formula, unless this is the (^ PATH).sig form
            after = _skip_ws(self.text, self.pos + 1)
            if after < len(self.text) and self.text[after] == "^":
                nxt = after + 1
                if nxt >= len(self.text) or self.text[nxt] != ".":
                    return self.atom()
            self.pos += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> GlueAtom:
        proj = self.proj()
        self.expect("~>")
        self.skip_ws()
        var_types = dict(self.meaning_env)
        meaning, self.pos = parse_term_prefix(
            self.text, self.pos, self.sig, var_types
        )
        result_type = infer_type(meaning)
        if isinstance(proj, ProjVar):
            index = self.proj_env.get(proj.name)
            if index is not None and index != result_type:
                raise AtomTypeMismatch(
                    f"{proj.name} carries {format_type(index)} resources but "
                    f"{format_term(meaning)} has type "
                    f"{format_type(result_type)}"
                )
        return GlueAtom(proj, meaning, result_type)

    def proj(self) -> Proj:
        ch = self.peek()
        if ch == "^":
            self.pos += 1
            return self.proj_suffix(())
        if ch == "(":
            self.pos += 1
            self.skip_ws()
            if self.peek() != "^":
                raise self.error("expected '^' in a projection path")
            self.pos += 1
            path = []
            while self.peek() != ")":
                path.append(self.ident())
            self.pos += 1
            return self.proj_suffix(tuple(path))
        name = self.ident()
        if self.text.startswith(".", self.pos):
            self.pos += 1
            if not self.text.startswith("sig", self.pos):
                raise self.error("expected 'sig' after '.'")
            self.pos += 3
            facet = self.facet()
            return SemProjectionRef(name, facet)
        return ProjVar(name)

    def proj_suffix(self, path: tuple[str, ...]) -> PathRef:
        self.expect(".")
        if not self.text.startswith("sig", self.pos):
            raise self.error("expected 'sig' after '.'")
        self.pos += 3
        return PathRef(path, self.facet())

    def facet(self) -> str:
        if not self.text.startswith(".", self.pos):
            return "MAIN"
        m = _IDENT_RE.match(self.text, self.pos + 1)
        if m and m.group() in FACETS:
            self.pos = m.end()
            return m.group()
        raise self.error("expected facet VAR or RESTR after '.'")


def parse_glue(text: str, signature: Mapping[str, SimpleType],
               check: bool = True) -> Formula:
    """Parse a formula; by default also verify it is closed and well typed.

    Templates (with ^ paths) skip the projection binding check but still get
    their meaning sides validated.
    """
    f = _GlueParser(text, signature).parse()
    if check:
        check_wellformed(f, signature)
    return f


# ---------------------------------------------------------------------------
# printing

_PREC_FORALL = 0
_PREC_IMPL = 1
_PREC_TENSOR = 2


def format_glue(f: Formula) -> str:
    return _fmt(f, 0)


def _fmt(f: Formula, min_prec: int) -> str:
    if isinstance(f, GlueAtom):
        return f"{_fmt_proj(f.proj)} ~> {format_term(f.meaning)}"
    if isinstance(f, Forall):
        binders = []
        body: Formula = f
        while isinstance(body, Forall):
            binders.append(body.binder)
            body = body.body
        rendered = ", ".join(_fmt_binder(b) for b in binders)
        text = f"forall {rendered}. {_fmt(body, _PREC_FORALL)}"
        return f"({text})" if min_prec > _PREC_FORALL else text
    if isinstance(f, Impl):
        text = (f"{_fmt(f.left, _PREC_IMPL + 1)} -o "
                f"{_fmt(f.right, _PREC_IMPL)}")
        return f"({text})" if min_prec > _PREC_IMPL else text
    if isinstance(f, Tensor):
        text = (f"{_fmt(f.left, _PREC_TENSOR)} * "
                f"{_fmt(f.right, _PREC_TENSOR + 1)}")
        return f"({text})" if min_prec > _PREC_TENSOR else text
    raise TypeError(f"not a formula: {f!r}")


def _fmt_binder(b: Binder) -> str:
    if isinstance(b, ProjBinder):
        return f"{b.name}:proj({format_type(b.index)})"
    ty_text = format_type(b.ty)
    if not isinstance(b.ty, BaseType):
        ty_text = f"({ty_text})"
    return f"{b.name}:{ty_text}"


def _fmt_proj(p: Proj) -> str:
    if isinstance(p, ProjEigen):
        return p.name.split("#")[0]
    return repr(p)


def format_proj(p: Proj) -> str:
    return _fmt_proj(p)
