"""F-structures: labeled attribute-value matrices and semantic projection refs.

Bracketed syntax:

    f:[PRED 'seek', SUBJ g:[PRED 'Bill'], OBJ h:[SPEC 'a', PRED 'unicorn']]

Atomic values are quoted symbols; nested nodes carry their own label. A bare
label in value position is a reference to a node defined elsewhere, which
gives re-entrancy (shared structure). Cycles are rejected.

A JSON mirror uses objects {"label": ..., "attrs": {...}} with plain strings
for atomic values and {"ref": label} for re-entrant references; it is chosen
by file extension when loading from disk.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    AtomicValueOnPath,
    CyclicStructure,
    DuplicateAttribute,
    DuplicateLabel,
    FStructureSyntaxError,
    MissingAttribute,
    UnknownLabel,
)

FACETS = ("MAIN", "VAR", "RESTR")


@dataclass(frozen=True)
class SemProjectionRef:
    """Reference to the semantic projection of an f-structure node.

    The VAR and RESTR facets address the variable and restriction slots that
    determiner premises use; MAIN is the projection itself.
    """

    label: str
    facet: str = "MAIN"

    def __post_init__(self):
        if self.facet not in FACETS:
            raise ValueError(f"unknown facet {self.facet!r}")

    def __repr__(self):
        if self.facet == "MAIN":
            return f"{self.label}.sig"
        return f"{self.label}.sig.{self.facet}"


@dataclass
class FStructure:
    label: str
    attrs: dict[str, Union[str, "FStructure"]] = field(default_factory=dict)

    def nodes(self) -> dict[str, "FStructure"]:
        """All reachable nodes by label; validates label uniqueness."""
        seen: dict[str, FStructure] = {}
        self._collect(seen)
        return seen

    def _collect(self, seen: dict[str, "FStructure"]) -> None:
        known = seen.get(self.label)
        if known is self:
            return
        if known is not None:
            raise DuplicateLabel(f"label {self.label} used for two distinct nodes")
        seen[self.label] = self
        for value in self.attrs.values():
            if isinstance(value, FStructure):
                value._collect(seen)

    def node(self, label: str) -> "FStructure":
        found = self.nodes().get(label)
        if found is None:
            raise UnknownLabel(f"no node labeled {label}")
        return found

    def validate(self) -> None:
        """Check label uniqueness and acyclicity."""
        self.nodes()
        _check_acyclic(self)

    def __eq__(self, other):
        if not isinstance(other, FStructure):
            return NotImplemented
        return self.label == other.label and self.attrs == other.attrs

    def __repr__(self):
        return format_fstructure(self)


def _check_acyclic(root: FStructure) -> None:
    on_stack: set[int] = set()
    done: set[int] = set()

    def visit(node: FStructure) -> None:
        if id(node) in done:
            return
        if id(node) in on_stack:
            raise CyclicStructure(f"cycle through node {node.label}")
        on_stack.add(id(node))
        for value in node.attrs.values():
            if isinstance(value, FStructure):
                visit(value)
        on_stack.discard(id(node))
        done.add(id(node))

    visit(root)


def resolve_path(root: FStructure, path: Sequence[str],
                 start: Optional[str] = None) -> str:
    """Label of the node reached from start by following attribute names."""
    node = root if start is None else root.node(start)
    for i, attr in enumerate(path):
        value = node.attrs.get(attr)
        if value is None:
            raise MissingAttribute(
                f"node {node.label} has no attribute {attr}"
            )
        if not isinstance(value, FStructure):
            raise AtomicValueOnPath(
                f"attribute {attr} of {node.label} is atomic ({value!r}); "
                f"cannot follow {' '.join(path[i:])}"
            )
        node = value
    return node.label


# ---------------------------------------------------------------------------
# bracketed text format

_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ATTR_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*")


class _FsParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.defined: dict[str, FStructure] = {}
        self.pending: list[tuple[FStructure, str, str, int]] = []

    def error(self, msg: str) -> FStructureSyntaxError:
        return FStructureSyntaxError(msg, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> FStructure:
        root = self.parse_node()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"trailing input {self.text[self.pos:]!r}")
        self.link_references()
        root.validate()
        return root

    def parse_node(self) -> FStructure:
        self.skip_ws()
        m = _LABEL_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a node label")
        label = m.group()
        self.pos = m.end()
        if self.peek() != ":":
            raise self.error(f"expected ':' after label {label}")
        self.pos += 1
        if self.peek() != "[":
            raise self.error("expected '['")
        self.pos += 1
        if label in self.defined:
            raise DuplicateLabel(f"label {label} defined twice")
        node = FStructure(label)
        self.defined[label] = node
        if self.peek() == "]":
            self.pos += 1
            return node
        while True:
            self.parse_pair(node)
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == "]":
                self.pos += 1
                return node
            # attribute pairs may also be separated by whitespace alone,
            # matching how attribute-value matrices are usually laid out
            if _ATTR_RE.match(self.text, self.pos):
                continue
            raise self.error("expected ',' or ']'")

    def parse_pair(self, node: FStructure) -> None:
        self.skip_ws()
        m = _ATTR_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected an attribute name")
        attr = m.group()
        attr_pos = self.pos
        self.pos = m.end()
        if attr in node.attrs:
            raise DuplicateAttribute(
                f"attribute {attr} repeated on node {node.label}"
            )
        ch = self.peek()
        if ch == "'":
            self.pos += 1
            end = self.text.find("'", self.pos)
            if end < 0:
                raise self.error("unterminated quoted value")
            node.attrs[attr] = self.text[self.pos:end]
            self.pos = end + 1
            return
        m = _LABEL_RE.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected a value for attribute {attr}")
        after = m.end()
        while after < len(self.text) and self.text[after].isspace():
            after += 1
        if after < len(self.text) and self.text[after] == ":":
            node.attrs[attr] = self.parse_node()
        else:
            # bare label: re-entrant reference, resolved after the full parse
            node.attrs[attr] = m.group()
            self.pending.append((node, attr, m.group(), attr_pos))
            self.pos = m.end()

    def link_references(self) -> None:
        for node, attr, label, pos in self.pending:
            target = self.defined.get(label)
            if target is None:
                raise UnknownLabel(
                    f"attribute {attr} of {node.label} references undefined "
                    f"label {label}"
                )
            node.attrs[attr] = target


def parse_fstructure(text: str) -> FStructure:
    return _FsParser(text).parse()


def format_fstructure(fs: FStructure) -> str:
    printed: set[str] = set()

    def render(node: FStructure) -> str:
        if node.label in printed:
            return node.label
        printed.add(node.label)
        parts = []
        for attr, value in node.attrs.items():
            if isinstance(value, FStructure):
                parts.append(f"{attr} {render(value)}")
            else:
                parts.append(f"{attr} '{value}'")
        return f"{node.label}:[{', '.join(parts)}]"

    return render(fs)


# ---------------------------------------------------------------------------
# JSON mirror

def fstructure_to_json(fs: FStructure) -> dict:
    emitted: set[str] = set()

    def render(node: FStructure) -> dict:
        if node.label in emitted:
            return {"ref": node.label}
        emitted.add(node.label)
        attrs = {}
        for attr, value in node.attrs.items():
            if isinstance(value, FStructure):
                attrs[attr] = render(value)
            else:
                attrs[attr] = value
        return {"label": node.label, "attrs": attrs}

    return render(fs)


def fstructure_from_json(data: dict) -> FStructure:
    defined: dict[str, FStructure] = {}
    pending: list[tuple[FStructure, str, str]] = []

    def build(obj: dict) -> FStructure:
        if not isinstance(obj, dict) or "label" not in obj:
            raise FStructureSyntaxError(f"expected a node object, got {obj!r}")
        label = obj["label"]
        if label in defined:
            raise DuplicateLabel(f"label {label} defined twice")
        node = FStructure(label)
        defined[label] = node
        for attr, value in obj.get("attrs", {}).items():
            if attr in node.attrs:
                raise DuplicateAttribute(
                    f"attribute {attr} repeated on node {label}"
                )
            if isinstance(value, str):
                node.attrs[attr] = value
            elif isinstance(value, dict) and set(value) == {"ref"}:
                node.attrs[attr] = value["ref"]
                pending.append((node, attr, value["ref"]))
            else:
                node.attrs[attr] = build(value)
        return node

    root = build(data)
    for node, attr, label in pending:
        target = defined.get(label)
        if target is None:
            raise UnknownLabel(
                f"attribute {attr} of {node.label} references undefined "
                f"label {label}"
            )
        node.attrs[attr] = target
    root.validate()
    return root


def load_fstructure(path: str) -> FStructure:
    """Load from disk; .json selects the JSON mirror, anything else text."""
    with open(path, encoding="utf-8") as handle:
        content = handle.read()
    if str(path).endswith(".json"):
        return fstructure_from_json(json.loads(content))
    return parse_fstructure(content)
