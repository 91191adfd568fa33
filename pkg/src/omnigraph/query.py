"""Declarative query pipelines over workspace graphs.

Grammar (documented in docs/query.md):

    pipeline := source step*
    source   := ("node" | "link") "[" filters? "]" | "root"
    step     := "->" NAME | "<-" NAME | "[" filters "]" | ".parent" | ".children"
    filters  := filter ("," filter)*
    filter   := "type=" NAME | "id=" INT | "label=" VALUE | "attr." KEY "=" VALUE

Results are deterministic: ascending element id, no duplicates. The "root"
source is only meaningful inside generation plans, where it names the entry's
root selection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, QueryError
from .graph import Workspace

_NAME = r"[A-Za-z_][A-Za-z0-9_-]*"
_INT_RE = re.compile(r"-?\d+$")
_REAL_RE = re.compile(r"-?\d+\.\d+$")


def parse_literal(token: str):
    """Shared literal syntax: quoted strings, integers, reals, booleans, bare words."""
    if len(token) >= 2 and token[0] == '"' and token[-1] == '"':
        return token[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    if token == "true":
        return True
    if token == "false":
        return False
    if _INT_RE.match(token):
        return int(token)
    if _REAL_RE.match(token):
        return float(token)
    return token


def literal_token(value) -> str:
    """Inverse of parse_literal, for unparsing."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if re.fullmatch(_NAME, value) and value not in ("true", "false"):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class Filter:
    field: str  # "type" | "id" | "label" | "attr"
    key: str | None  # attribute key when field == "attr"
    value: object

    def matches(self, element) -> bool:
        if self.field == "type":
            return element.type_name == self.value
        if self.field == "id":
            return element.id == self.value
        if self.field == "label":
            return getattr(element, "label", None) == self.value
        actual = element.attrs.get(self.key)
        if actual is None and self.key not in element.attrs:
            return False
        # exact tag match: 1 is not 1.0 is not true
        if isinstance(actual, bool) != isinstance(self.value, bool):
            return False
        if isinstance(actual, float) != isinstance(self.value, float):
            return False
        return actual == self.value

    def unparse(self) -> str:
        if self.field == "attr":
            return f"attr.{self.key}={literal_token(self.value)}"
        if self.field == "id":
            return f"id={self.value}"
        return f"{self.field}={literal_token(self.value)}"


@dataclass(frozen=True)
class Step:
    op: str  # "out" | "in" | "filter" | "parent" | "children"
    link_type: str | None = None
    filters: tuple = ()

    def unparse(self) -> str:
        if self.op == "out":
            return f"-> {self.link_type}"
        if self.op == "in":
            return f"<- {self.link_type}"
        if self.op == "filter":
            return "[" + ", ".join(f.unparse() for f in self.filters) + "]"
        return f".{self.op}"


@dataclass(frozen=True)
class QueryExpr:
    source: str  # "node" | "link" | "root"
    source_filters: tuple = ()
    steps: tuple = ()

    def unparse(self) -> str:
        if self.source == "root":
            head = "root"
        else:
            head = self.source + "[" + ", ".join(f.unparse() for f in self.source_filters) + "]"
        return " ".join([head] + [s.unparse() for s in self.steps])


@dataclass(frozen=True)
class Selection:
    ids: tuple
    kind: str  # "node" | "link"


def _split_filters(body: str) -> list[str]:
    parts, depth, current = [], False, []
    for ch in body:
        if ch == '"':
            depth = not depth
        if ch == "," and not depth:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if current or parts:
        parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def _parse_filter(text: str) -> Filter:
    if "=" not in text:
        raise ParseError(f"filter {text!r} has no '='")
    lhs, rhs = text.split("=", 1)
    lhs, rhs = lhs.strip(), rhs.strip()
    if lhs == "type":
        if not re.fullmatch(_NAME, rhs):
            raise ParseError(f"type filter needs a bare type name, got {rhs!r}")
        return Filter("type", None, rhs)
    if lhs == "id":
        if not _INT_RE.match(rhs):
            raise ParseError(f"id filter needs an integer, got {rhs!r}")
        return Filter("id", None, int(rhs))
    if lhs == "label":
        value = parse_literal(rhs)
        if not isinstance(value, str):
            raise ParseError(f"label filter needs a string, got {rhs!r}")
        return Filter("label", None, value)
    if lhs.startswith("attr."):
        key = lhs[len("attr."):]
        if not key:
            raise ParseError("attr filter is missing its key")
        return Filter("attr", key, parse_literal(rhs))
    raise ParseError(f"unknown filter field {lhs!r}")


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<source>node|link|root)\s*
      | (?P<bracket>\[[^\]]*\])
      | (?P<arrow>->|<-)\s*(?P<ltype>{name})
      | \.(?P<nav>parent|children)
    )""".format(name=_NAME),
    re.VERBOSE,
)


def parse_query(text: str) -> QueryExpr:
    """Parse a pipeline string; raises ParseError on malformed input."""
    text = text.strip()
    if not text:
        raise ParseError("empty query")
    pos = 0
    source = None
    source_filters: tuple = ()
    steps = []
    first = True
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == match.start():
            raise ParseError(f"cannot parse query at {text[pos:]!r}", column=pos + 1)
        pos = match.end()
        if first:
            if not match.group("source"):
                raise ParseError("query must start with node[...], link[...], or root")
            source = match.group("source")
            first = False
            if source != "root":
                bracket = _TOKEN.match(text, pos)
                if bracket is None or not bracket.group("bracket"):
                    raise ParseError(f"{source} source needs a [...] filter block")
                pos = bracket.end()
                source_filters = tuple(
                    _parse_filter(f) for f in _split_filters(bracket.group("bracket")[1:-1])
                )
            continue
        if match.group("source"):
            raise ParseError("unexpected second source in query")
        if match.group("bracket"):
            filters = tuple(
                _parse_filter(f) for f in _split_filters(match.group("bracket")[1:-1])
            )
            steps.append(Step("filter", filters=filters))
        elif match.group("arrow"):
            op = "out" if match.group("arrow") == "->" else "in"
            steps.append(Step(op, link_type=match.group("ltype")))
        else:
            steps.append(Step(match.group("nav")))
    if source is None:
        raise ParseError("query must start with node[...], link[...], or root")
    expr = QueryExpr(source, source_filters, tuple(steps))
    _check_kinds(expr)
    return expr


def _check_kinds(expr: QueryExpr) -> None:
    kind = "link" if expr.source == "link" else "node"
    for step in expr.steps:
        if step.op in ("out", "in", "parent", "children") and kind != "node":
            raise ParseError(f"step {step.unparse()!r} applies to node selections only")
    # filter steps keep the kind; nothing changes it back to link


def run_query(ws: Workspace, expr: QueryExpr, root: Selection | None = None) -> Selection:
    """Evaluate a pipeline; deterministic, never mutates the workspace."""
    if expr.source == "root":
        if root is None:
            raise QueryError("query uses 'root' outside a generation-plan context")
        ids = list(root.ids)
        kind = root.kind
    elif expr.source == "node":
        ids = [n.id for n in ws.nodes.values() if all(f.matches(n) for f in expr.source_filters)]
        kind = "node"
    else:
        ids = [l.id for l in ws.links.values() if all(f.matches(l) for f in expr.source_filters)]
        kind = "link"
    ids = sorted(set(ids))
    for step in expr.steps:
        if step.op == "filter":
            pool = ws.nodes if kind == "node" else ws.links
            ids = [i for i in ids if all(f.matches(pool[i]) for f in step.filters)]
        elif step.op in ("out", "in"):
            if kind != "node":
                raise QueryError("link-follow steps apply to node selections only")
            current = set(ids)
            result = set()
            for link in ws.links.values():
                if link.type_name != step.link_type:
                    continue
                if step.op == "out" and link.from_id in current:
                    result.add(link.to_id)
                elif step.op == "in" and link.to_id in current:
                    result.add(link.from_id)
            ids = sorted(result)
        elif step.op == "parent":
            if kind != "node":
                raise QueryError(".parent applies to node selections only")
            ids = sorted({ws.nodes[i].parent for i in ids if ws.nodes[i].parent is not None})
        elif step.op == "children":
            if kind != "node":
                raise QueryError(".children applies to node selections only")
            current = set(ids)
            ids = sorted(n.id for n in ws.nodes.values() if n.parent in current)
    return Selection(tuple(ids), kind)


def query(ws: Workspace, text: str) -> Selection:
    """Parse and evaluate in one call."""
    return run_query(ws, parse_query(text))
