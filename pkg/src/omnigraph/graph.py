"""Typed attributed graph workspaces with canonical serialization.

A workspace holds nodes and links sharing one monotonically increasing id
counter, plus viewport state and navigation history. The canonical file form
is deterministic JSON: fixed key order, id-sorted element arrays, two-space
indentation, one trailing newline.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field

from .errors import (
    FormatVersionError,
    GraphError,
    IntegrityError,
    ParseError,
    UnknownElementError,
)

FILE_FORMAT = "hgos-workspace"
FILE_FORMAT_VERSION = 1
FILE_EXTENSION = ".hgw.json"

_URL_SAFE = re.compile(r"[A-Za-z0-9._~-]")

PAYLOAD_KINDS = ("inline_text", "file_path", "workspace_link")


@dataclass(frozen=True)
class WorkspaceRef:
    """Attribute value pointing at another workspace by id."""

    workspace_id: str

    def __post_init__(self):
        if not self.workspace_id:
            raise GraphError("workspace reference must name a workspace")


# Attribute values form a closed tagged union. Lists must be homogeneous
# in tag; nesting is allowed (a list of lists is homogeneous at its level).
AttrValue = "str | int | float | bool | list | WorkspaceRef"

_TAG_NAMES = {str: "string", int: "int", float: "real", bool: "bool"}


def attr_tag(value) -> str:
    """Return the union tag of an attribute value. bool is checked before int."""
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "list"
    if isinstance(value, WorkspaceRef):
        return "workspace"
    raise GraphError(f"unsupported attribute value type: {type(value).__name__}")


def check_attr_value(value) -> None:
    """Validate a value against the attribute union (homogeneous lists, finite reals)."""
    tag = attr_tag(value)
    if tag == "real" and not math.isfinite(value):
        raise GraphError("real attribute values must be finite")
    if tag == "list":
        tags = {attr_tag(v) for v in value}
        if len(tags) > 1:
            raise GraphError(
                "heterogeneous list value: mixes " + ", ".join(sorted(tags))
            )
        for item in value:
            check_attr_value(item)


@dataclass(frozen=True)
class PayloadRef:
    """Reference to node content held elsewhere (text, file, or another workspace)."""

    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in PAYLOAD_KINDS:
            raise GraphError(f"unknown payload kind {self.kind!r}")
        if not self.value:
            raise GraphError("payload value must be non-empty")
        if self.kind == "file_path":
            if self.value.startswith(("/", "\\")) or re.match(r"^[A-Za-z]:", self.value):
                raise GraphError("payload file paths must be relative")
            if ".." in self.value.split("/"):
                raise GraphError("payload file paths must not escape upward")


@dataclass
class Node:
    id: int
    type_name: str
    label: str = ""
    parent: int | None = None
    x: float = 0.0
    y: float = 0.0
    w: float = 120.0
    h: float = 60.0
    attrs: dict = field(default_factory=dict)
    payload: PayloadRef | None = None


@dataclass
class Link:
    id: int
    type_name: str
    from_id: int
    to_id: int
    attrs: dict = field(default_factory=dict)


@dataclass
class Viewport:
    cx: float = 0.0
    cy: float = 0.0
    zoom: float = 1.0


@dataclass
class RemovalReport:
    """What a cascading node removal touched."""

    removed_links: list = field(default_factory=list)
    reparented: list = field(default_factory=list)


def _check_finite(value, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise GraphError(f"{what} must be finite, got {value!r}")
    return value


class Workspace:
    """One OmniSpace: a typed graph plus viewport and navigation history.

    Mutating methods require exclusive access; read-only methods are safe to
    run concurrently on a shared snapshot.
    """

    def __init__(self, id: str, name: str, metamodel: str):
        check_workspace_id(id)
        self.id = id
        self.name = name
        self.metamodel = metamodel
        self.next_id = 1
        self.nodes: dict[int, Node] = {}
        self.links: dict[int, Link] = {}
        self.viewport = Viewport()
        self.history: list[str] = []
        self.version = 0

    # -- element access ----------------------------------------------------

    def node(self, element_id: int) -> Node:
        try:
            return self.nodes[element_id]
        except KeyError:
            raise UnknownElementError(element_id, f"no node with id {element_id}") from None

    def link(self, element_id: int) -> Link:
        try:
            return self.links[element_id]
        except KeyError:
            raise UnknownElementError(element_id, f"no link with id {element_id}") from None

    def element(self, element_id: int):
        if element_id in self.nodes:
            return self.nodes[element_id]
        if element_id in self.links:
            return self.links[element_id]
        raise UnknownElementError(element_id)

    def _take_id(self) -> int:
        new_id = self.next_id
        self.next_id += 1
        return new_id

    # -- mutations ----------------------------------------------------------

    def add_node(
        self,
        type_name: str,
        label: str = "",
        position: tuple = (0.0, 0.0),
        size: tuple = (120.0, 60.0),
        metamodel=None,
    ) -> int:
        """Insert a node; returns its freshly drawn id.

        When a metamodel is given, attributes start from that node type's
        declared defaults.
        """
        if not type_name:
            raise GraphError("node type name must be non-empty")
        x = _check_finite(position[0], "node x position")
        y = _check_finite(position[1], "node y position")
        w = _check_finite(size[0], "node width")
        h = _check_finite(size[1], "node height")
        if w <= 0 or h <= 0:
            raise GraphError("node size components must be positive")
        attrs = {}
        if metamodel is not None:
            type_def = metamodel.node_types.get(type_name)
            if type_def is not None:
                for key, spec in type_def.attr_schema.items():
                    if spec.default is not None:
                        attrs[key] = copy.deepcopy(spec.default)
        node_id = self._take_id()
        self.nodes[node_id] = Node(node_id, type_name, label, None, x, y, w, h, attrs)
        return node_id

    def add_link(self, type_name: str, from_id: int, to_id: int) -> int:
        """Insert a link between two existing nodes; id comes from the shared counter."""
        if not type_name:
            raise GraphError("link type name must be non-empty")
        for endpoint in (from_id, to_id):
            if endpoint not in self.nodes:
                raise UnknownElementError(endpoint, f"link endpoint {endpoint} does not exist")
        link_id = self._take_id()
        self.links[link_id] = Link(link_id, type_name, from_id, to_id)
        return link_id

    def remove_node(self, element_id: int) -> RemovalReport:
        """Remove a node, cascade-delete incident links, re-parent its children upward."""
        if element_id in self.links:
            raise GraphError(f"id {element_id} is a link, not a node")
        node = self.node(element_id)
        report = RemovalReport()
        for link_id in sorted(self.links):
            link = self.links[link_id]
            if link.from_id == element_id or link.to_id == element_id:
                report.removed_links.append(link_id)
        for link_id in report.removed_links:
            del self.links[link_id]
        for child in self.nodes.values():
            if child.parent == element_id:
                child.parent = node.parent
                report.reparented.append(child.id)
        del self.nodes[element_id]
        return report

    def remove_link(self, element_id: int) -> None:
        if element_id in self.nodes:
            raise GraphError(f"id {element_id} is a node, not a link")
        self.link(element_id)
        del self.links[element_id]

    def set_attr(self, element_id: int, key: str, value) -> None:
        """Set one attribute; insertion order is kept for new keys."""
        if not key:
            raise GraphError("attribute key must be non-empty")
        check_attr_value(value)
        self.element(element_id).attrs[key] = value

    def set_parent(self, element_id: int, parent_id: int | None) -> None:
        """Reassign containment; rejects cycles and self-parenting."""
        node = self.node(element_id)
        if parent_id is None:
            node.parent = None
            return
        self.node(parent_id)
        ancestor = parent_id
        while ancestor is not None:
            if ancestor == element_id:
                raise GraphError(
                    f"parenting {element_id} under {parent_id} would create a containment cycle"
                )
            ancestor = self.nodes[ancestor].parent
        node.parent = parent_id

    # -- queries --------------------------------------------------------------

    def neighbors(self, element_id: int, direction: str = "both", link_type: str | None = None):
        """Adjacent (link id, node id) pairs in ascending link-id order.

        A self-link contributes one pair under direction "both".
        """
        if direction not in ("out", "in", "both"):
            raise GraphError(f"unknown direction {direction!r}")
        self.node(element_id)
        pairs = []
        for link_id in sorted(self.links):
            link = self.links[link_id]
            if link_type is not None and link.type_name != link_type:
                continue
            outgoing = link.from_id == element_id
            incoming = link.to_id == element_id
            if direction == "out" and outgoing:
                pairs.append((link_id, link.to_id))
            elif direction == "in" and incoming:
                pairs.append((link_id, link.from_id))
            elif direction == "both" and (outgoing or incoming):
                pairs.append((link_id, link.to_id if outgoing else link.from_id))
        return pairs

    def node_count(self) -> int:
        return len(self.nodes)

    def link_count(self) -> int:
        return len(self.links)

    def max_id(self) -> int:
        ids = list(self.nodes) + list(self.links)
        return max(ids) if ids else 0

    # -- invariants -------------------------------------------------------------

    def check(self) -> None:
        """Raise IntegrityError on any violated workspace invariant."""
        check_workspace_id(self.id)
        seen = set(self.nodes)
        overlap = seen & set(self.links)
        if overlap:
            raise IntegrityError(f"ids used by both a node and a link: {sorted(overlap)}")
        if self.max_id() >= self.next_id:
            raise IntegrityError(
                f"next_id {self.next_id} does not exceed the highest element id {self.max_id()}"
            )
        if self.version < 0:
            raise IntegrityError("version must be >= 0")
        if not (self.viewport.zoom > 0 and math.isfinite(self.viewport.zoom)):
            raise IntegrityError("viewport zoom must be positive and finite")
        for coord in (self.viewport.cx, self.viewport.cy):
            if not math.isfinite(coord):
                raise IntegrityError("viewport center must be finite")
        for node in self.nodes.values():
            if node.id not in self.nodes:
                raise IntegrityError(f"node id field mismatch for {node.id}")
            if not node.type_name:
                raise IntegrityError(f"node {node.id} has an empty type name", node.id)
            for value in (node.x, node.y, node.w, node.h):
                if not math.isfinite(value):
                    raise IntegrityError(f"node {node.id} has a non-finite position or size", node.id)
            if node.w <= 0 or node.h <= 0:
                raise IntegrityError(f"node {node.id} has a non-positive size", node.id)
            if node.parent is not None and node.parent not in self.nodes:
                raise IntegrityError(
                    f"node {node.id} has dangling parent {node.parent}", node.id
                )
            for value in node.attrs.values():
                check_attr_value(value)
        for link in self.links.values():
            for endpoint in (link.from_id, link.to_id):
                if endpoint not in self.nodes:
                    raise IntegrityError(
                        f"link {link.id} references missing node {endpoint}", link.id
                    )
            for value in link.attrs.values():
                check_attr_value(value)
        # containment must be a forest
        for node in self.nodes.values():
            slow = node.parent
            seen_path = {node.id}
            while slow is not None:
                if slow in seen_path:
                    raise IntegrityError(f"containment cycle through node {node.id}", node.id)
                seen_path.add(slow)
                slow = self.nodes[slow].parent

    # -- equality / copying ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Workspace):
            return NotImplemented
        return serialize(self) == serialize(other)

    def clone(self) -> "Workspace":
        return copy.deepcopy(self)


def check_workspace_id(workspace_id: str) -> None:
    if not workspace_id:
        raise GraphError("workspace id must be non-empty")
    for ch in workspace_id:
        if not _URL_SAFE.fullmatch(ch):
            raise GraphError(f"workspace id contains non-URL-safe character {ch!r}")


def new_workspace(id: str, name: str, metamodel: str) -> Workspace:
    return Workspace(id, name, metamodel)


# -- canonical serialization -------------------------------------------------


def _encode_attr(value):
    if isinstance(value, WorkspaceRef):
        return {"workspace": value.workspace_id}
    if isinstance(value, list):
        return [_encode_attr(v) for v in value]
    return value


def _decode_attr(raw, where: str):
    if isinstance(raw, dict):
        if set(raw) != {"workspace"} or not isinstance(raw["workspace"], str):
            raise IntegrityError(f"malformed workspace reference in {where}")
        return WorkspaceRef(raw["workspace"])
    if isinstance(raw, list):
        return [_decode_attr(v, where) for v in raw]
    if isinstance(raw, (str, bool, int, float)):
        return raw
    raise IntegrityError(f"unsupported attribute value in {where}: {raw!r}")


def _attrs_doc(attrs: dict) -> dict:
    return {key: _encode_attr(value) for key, value in attrs.items()}


def workspace_to_doc(ws: Workspace) -> dict:
    """Canonical plain-dict form: fixed key order, id-sorted element arrays."""
    nodes = []
    for node_id in sorted(ws.nodes):
        node = ws.nodes[node_id]
        payload = None
        if node.payload is not None:
            payload = {"kind": node.payload.kind, "value": node.payload.value}
        nodes.append(
            {
                "id": node.id,
                "type": node.type_name,
                "label": node.label,
                "parent": node.parent,
                "x": float(node.x),
                "y": float(node.y),
                "w": float(node.w),
                "h": float(node.h),
                "attrs": _attrs_doc(node.attrs),
                "payload": payload,
            }
        )
    links = []
    for link_id in sorted(ws.links):
        link = ws.links[link_id]
        links.append(
            {
                "id": link.id,
                "type": link.type_name,
                "from": link.from_id,
                "to": link.to_id,
                "attrs": _attrs_doc(link.attrs),
            }
        )
    return {
        "format": FILE_FORMAT,
        "fversion": FILE_FORMAT_VERSION,
        "id": ws.id,
        "name": ws.name,
        "metamodel": ws.metamodel,
        "version": ws.version,
        "next_id": ws.next_id,
        "viewport": {
            "cx": float(ws.viewport.cx),
            "cy": float(ws.viewport.cy),
            "zoom": float(ws.viewport.zoom),
        },
        "history": list(ws.history),
        "nodes": nodes,
        "links": links,
    }


def serialize(ws: Workspace) -> str:
    """Canonical text form; byte-identical for equal workspaces."""
    return json.dumps(workspace_to_doc(ws), ensure_ascii=False, indent=2) + "\n"


def _require(doc: dict, key: str, kinds, where: str):
    if key not in doc:
        raise IntegrityError(f"{where} is missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, kinds) or isinstance(value, bool) and bool not in _as_tuple(kinds):
        raise IntegrityError(f"{where} key {key!r} has the wrong type")
    return value


def _as_tuple(kinds):
    return kinds if isinstance(kinds, tuple) else (kinds,)


def workspace_from_doc(doc: dict) -> Workspace:
    if not isinstance(doc, dict):
        raise IntegrityError("workspace document must be a JSON object")
    if doc.get("format") != FILE_FORMAT:
        raise IntegrityError(f"not a {FILE_FORMAT} document")
    fversion = doc.get("fversion")
    if fversion != FILE_FORMAT_VERSION:
        raise FormatVersionError(
            f"unsupported format version {fversion!r}; this build reads version {FILE_FORMAT_VERSION}"
        )
    ws = Workspace(
        _require(doc, "id", str, "workspace"),
        _require(doc, "name", str, "workspace"),
        _require(doc, "metamodel", str, "workspace"),
    )
    ws.version = _require(doc, "version", int, "workspace")
    ws.next_id = _require(doc, "next_id", int, "workspace")
    viewport = _require(doc, "viewport", dict, "workspace")
    ws.viewport = Viewport(
        float(_require(viewport, "cx", (int, float), "viewport")),
        float(_require(viewport, "cy", (int, float), "viewport")),
        float(_require(viewport, "zoom", (int, float), "viewport")),
    )
    history = _require(doc, "history", list, "workspace")
    if not all(isinstance(h, str) for h in history):
        raise IntegrityError("history entries must be workspace-id strings")
    ws.history = list(history)
    for raw in _require(doc, "nodes", list, "workspace"):
        node_id = _require(raw, "id", int, "node")
        if node_id in ws.nodes or node_id in ws.links:
            raise IntegrityError(f"duplicate element id {node_id}", node_id)
        payload = raw.get("payload")
        payload_ref = None
        if payload is not None:
            try:
                payload_ref = PayloadRef(
                    _require(payload, "kind", str, f"node {node_id} payload"),
                    _require(payload, "value", str, f"node {node_id} payload"),
                )
            except GraphError as exc:
                raise IntegrityError(f"node {node_id}: {exc}", node_id) from exc
        parent = raw.get("parent")
        if parent is not None and not isinstance(parent, int):
            raise IntegrityError(f"node {node_id} parent must be an id or null", node_id)
        attrs = _require(raw, "attrs", dict, f"node {node_id}")
        ws.nodes[node_id] = Node(
            node_id,
            _require(raw, "type", str, f"node {node_id}"),
            _require(raw, "label", str, f"node {node_id}"),
            parent,
            float(_require(raw, "x", (int, float), f"node {node_id}")),
            float(_require(raw, "y", (int, float), f"node {node_id}")),
            float(_require(raw, "w", (int, float), f"node {node_id}")),
            float(_require(raw, "h", (int, float), f"node {node_id}")),
            {k: _decode_attr(v, f"node {node_id}") for k, v in attrs.items()},
            payload_ref,
        )
    for raw in _require(doc, "links", list, "workspace"):
        link_id = _require(raw, "id", int, "link")
        if link_id in ws.nodes or link_id in ws.links:
            raise IntegrityError(f"duplicate element id {link_id}", link_id)
        attrs = _require(raw, "attrs", dict, f"link {link_id}")
        ws.links[link_id] = Link(
            link_id,
            _require(raw, "type", str, f"link {link_id}"),
            _require(raw, "from", int, f"link {link_id}"),
            _require(raw, "to", int, f"link {link_id}"),
            {k: _decode_attr(v, f"link {link_id}") for k, v in attrs.items()},
        )
    try:
        ws.check()
    except GraphError as exc:
        raise IntegrityError(str(exc)) from exc
    return ws


def deserialize(text: str) -> Workspace:
    """Parse a canonical workspace document, enforcing every invariant."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return workspace_from_doc(doc)
