"""Mutation scripts: small imperative statements applied transactionally.

Statement forms, one per line, `#` comments allowed:

    add node <type> [label=... x=... y=... w=... h=... KEY=VALUE ...]
    add link <type> <from> <to>
    set <id> <key> <value>
    del <id>
    parent <id> <container-id|none>

Ids may be written `$N` to reference the N-th id created earlier in the same
script (1-based), so a script can link nodes it just made. Any statement
failure rolls the workspace back to its pre-script state.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GraphError, OmniGraphError, ParseError
from .graph import Workspace, deserialize, serialize
from .query import parse_literal

_NODE_FIELDS = ("label", "x", "y", "w", "h")


@dataclass(frozen=True)
class Statement:
    op: str  # "add_node" | "add_link" | "set" | "del" | "parent"
    args: tuple
    line: int
    text: str


@dataclass
class MutationReport:
    ok: bool = True
    created_ids: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    error: str | None = None


def parse_script(text: str) -> list:
    """Parse script text into statements; raises ParseError on bad syntax."""
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        if not tokens:
            continue
        statements.append(_parse_statement(tokens, lineno, raw.strip()))
    return statements


def _tokenize(raw: str, lineno: int) -> list:
    """Whitespace split that respects double quotes and keeps them, so
    parse_literal can still tell "5" (a string) from 5 (an integer)."""
    tokens, current, quoted = [], [], False
    for ch in raw:
        if ch == '"':
            quoted = not quoted
            current.append(ch)
        elif ch == "#" and not quoted:
            break
        elif ch.isspace() and not quoted:
            if current:
                tokens.append("".join(current))
                current = []
        else:
            current.append(ch)
    if quoted:
        raise ParseError("unterminated quote", lineno)
    if current:
        tokens.append("".join(current))
    return tokens


def _parse_statement(tokens: list, lineno: int, text: str) -> Statement:
    head = tokens[0]
    if head == "add" and len(tokens) >= 2 and tokens[1] == "node":
        if len(tokens) < 3:
            raise ParseError("add node needs a type name", lineno)
        type_name = tokens[2]
        pairs = []
        for token in tokens[3:]:
            if "=" not in token:
                raise ParseError(f"expected key=value, got {token!r}", lineno)
            key, value = token.split("=", 1)
            pairs.append((key, parse_literal(value)))
        return Statement("add_node", (type_name, tuple(pairs)), lineno, text)
    if head == "add" and len(tokens) >= 2 and tokens[1] == "link":
        if len(tokens) != 5:
            raise ParseError("add link needs: add link <type> <from> <to>", lineno)
        return Statement(
            "add_link", (tokens[2], _parse_id(tokens[3], lineno), _parse_id(tokens[4], lineno)),
            lineno, text,
        )
    if head == "set":
        if len(tokens) != 4:
            raise ParseError("set needs: set <id> <key> <value>", lineno)
        return Statement(
            "set", (_parse_id(tokens[1], lineno), tokens[2], parse_literal(tokens[3])),
            lineno, text,
        )
    if head == "del":
        if len(tokens) != 2:
            raise ParseError("del needs: del <id>", lineno)
        return Statement("del", (_parse_id(tokens[1], lineno),), lineno, text)
    if head == "parent":
        if len(tokens) != 3:
            raise ParseError("parent needs: parent <id> <container-id|none>", lineno)
        target = None if tokens[2] == "none" else _parse_id(tokens[2], lineno)
        return Statement("parent", (_parse_id(tokens[1], lineno), target), lineno, text)
    raise ParseError(f"unknown statement {head!r}", lineno)


def _parse_id(token: str, lineno: int):
    if token.startswith("$"):
        index = token[1:]
        if not index.isdigit() or int(index) < 1:
            raise ParseError(f"bad created-id reference {token!r}", lineno)
        return ("ref", int(index))
    if not token.lstrip("-").isdigit():
        raise ParseError(f"expected an element id or $N reference, got {token!r}", lineno)
    return int(token)


def _resolve_id(value, created: list, lineno: int) -> int | None:
    if value is None:
        return None
    if isinstance(value, tuple):
        index = value[1]
        if index > len(created):
            raise GraphError(f"${index} references an id not yet created (line {lineno})")
        return created[index - 1]
    return value


def execute(ws: Workspace, statements, metamodel=None) -> MutationReport:
    """Apply statements in order; on any failure the workspace is restored
    bit-identically to its pre-script state."""
    if isinstance(statements, str):
        statements = parse_script(statements)
    snapshot = copy.deepcopy(ws.__dict__)
    report = MutationReport()
    try:
        for stmt in statements:
            if stmt.op == "add_node":
                type_name, pairs = stmt.args
                node_id = ws.add_node(type_name, metamodel=metamodel)
                node = ws.nodes[node_id]
                for key, value in pairs:
                    if key == "label":
                        node.label = str(value)
                    elif key in ("x", "y", "w", "h"):
                        setattr(node, key, float(value))
                    else:
                        ws.set_attr(node_id, key, value)
                report.created_ids.append(node_id)
                report.outcomes.append(f"line {stmt.line}: created node {node_id}")
            elif stmt.op == "add_link":
                type_name, from_ref, to_ref = stmt.args
                link_id = ws.add_link(
                    type_name,
                    _resolve_id(from_ref, report.created_ids, stmt.line),
                    _resolve_id(to_ref, report.created_ids, stmt.line),
                )
                report.created_ids.append(link_id)
                report.outcomes.append(f"line {stmt.line}: created link {link_id}")
            elif stmt.op == "set":
                element_ref, key, value = stmt.args
                element_id = _resolve_id(element_ref, report.created_ids, stmt.line)
                ws.set_attr(element_id, key, value)
                report.outcomes.append(f"line {stmt.line}: set {key} on {element_id}")
            elif stmt.op == "del":
                element_id = _resolve_id(stmt.args[0], report.created_ids, stmt.line)
                if element_id in ws.links:
                    ws.remove_link(element_id)
                else:
                    ws.remove_node(element_id)
                report.outcomes.append(f"line {stmt.line}: deleted {element_id}")
            elif stmt.op == "parent":
                element_id = _resolve_id(stmt.args[0], report.created_ids, stmt.line)
                parent_id = _resolve_id(stmt.args[1], report.created_ids, stmt.line)
                ws.set_parent(element_id, parent_id)
                report.outcomes.append(f"line {stmt.line}: parented {element_id}")
    except OmniGraphError as exc:
        ws.__dict__.clear()
        ws.__dict__.update(snapshot)
        report.ok = False
        report.created_ids = []
        report.error = f"line {stmt.line}: {exc}"
        report.outcomes.append(f"line {stmt.line}: FAILED: {exc}")
    return report


@dataclass
class BatchEntry:
    path: str
    ok: bool
    error: str | None = None
    new_version: int | None = None


@dataclass
class BatchReport:
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)


def run_batch(paths, statements) -> BatchReport:
    """Run one script over many workspace files.

    Successful files are rewritten atomically with version + 1; failing files
    are left untouched.
    """
    if isinstance(statements, str):
        statements = parse_script(statements)
    report = BatchReport()
    for path in paths:
        path = Path(path)
        try:
            ws = deserialize(path.read_text(encoding="utf-8"))
        except (OSError, OmniGraphError) as exc:
            report.entries.append(BatchEntry(str(path), False, str(exc)))
            continue
        result = execute(ws, statements)
        if not result.ok:
            report.entries.append(BatchEntry(str(path), False, result.error))
            continue
        ws.version += 1
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(serialize(ws), encoding="utf-8")
        tmp.replace(path)
        report.entries.append(BatchEntry(str(path), True, new_version=ws.version))
    return report
