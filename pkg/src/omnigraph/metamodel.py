"""DSL definitions: node/link type schemas, palettes, and the integrity checker.

Metamodels are immutable after load and freely shareable across threads.
Validation is a reporting pass: problems come back as Violation values,
never as exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import MetaModelError, ParseError
from .graph import Workspace, attr_tag, check_attr_value

ATTR_KINDS = ("string", "int", "real", "bool", "list", "workspace")

SHAPES = ("box", "rounded", "ellipse", "diamond")
STROKES = ("solid", "dashed", "dotted")
HEADS = ("none", "arrow", "diamond")

VIOLATION_CODES = (
    "UNKNOWN_TYPE",
    "MISSING_ATTR",
    "BAD_ATTR_KIND",
    "BAD_ENUM",
    "BAD_ENDPOINT",
    "CARDINALITY",
    "SELF_LINK",
    "BAD_PARENT",
)
_CODE_ORDER = {code: i for i, code in enumerate(VIOLATION_CODES)}


@dataclass(frozen=True)
class VisualStyle:
    stroke: str = "solid"
    head: str = "arrow"
    color: str = "#000000"

    def __post_init__(self):
        if self.stroke not in STROKES:
            raise MetaModelError(f"unknown stroke {self.stroke!r}")
        if self.head not in HEADS:
            raise MetaModelError(f"unknown head {self.head!r}")


@dataclass(frozen=True)
class VisualTemplate:
    shape: str = "box"
    fill: str = "#ffffff"
    text_fields: tuple = ()

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise MetaModelError(f"unknown shape {self.shape!r}")


@dataclass(frozen=True)
class AttrSpec:
    kind: str
    required: bool = False
    default: object = None
    enum_values: tuple | None = None

    def __post_init__(self):
        if self.kind not in ATTR_KINDS:
            raise MetaModelError(f"unknown attribute kind {self.kind!r}")
        if self.enum_values is not None and self.kind != "string":
            raise MetaModelError("enum constraints apply to string attributes only")
        if self.default is not None:
            check_attr_value(self.default)
            if attr_tag(self.default) != self.kind:
                raise MetaModelError(
                    f"default {self.default!r} does not match declared kind {self.kind}"
                )
            if self.enum_values is not None and self.default not in self.enum_values:
                raise MetaModelError(f"default {self.default!r} not among enum values")


@dataclass(frozen=True)
class NodeTypeDef:
    name: str
    attr_schema: dict = field(default_factory=dict)
    container: bool = False
    visual: VisualTemplate = VisualTemplate()
    palette_label: str = ""

    def __post_init__(self):
        for key in self.visual.text_fields:
            if key not in self.attr_schema:
                raise MetaModelError(
                    f"node type {self.name}: shown field {key!r} is not a declared attribute"
                )


@dataclass(frozen=True)
class LinkTypeDef:
    name: str
    allowed_endpoints: tuple  # of (from-pattern, to-pattern); "*" matches any type
    allow_self: bool = False
    max_out: int | None = None
    max_in: int | None = None
    default_style: VisualStyle = VisualStyle()

    def __post_init__(self):
        if not self.allowed_endpoints:
            raise MetaModelError(f"link type {self.name} declares no endpoint patterns")
        for bound in (self.max_out, self.max_in):
            if bound is not None and bound < 1:
                raise MetaModelError(f"link type {self.name}: cardinality bounds must be >= 1")

    def endpoint_allowed(self, from_type: str, to_type: str) -> bool:
        return any(
            (f == "*" or f == from_type) and (t == "*" or t == to_type)
            for f, t in self.allowed_endpoints
        )


@dataclass(frozen=True)
class MetaModel:
    id: str
    name: str
    node_types: dict  # name -> NodeTypeDef, declaration order
    link_types: dict  # name -> LinkTypeDef, declaration order
    style_table: dict  # (from-type, to-type) -> VisualStyle

    def __post_init__(self):
        shared = set(self.node_types) & set(self.link_types)
        if shared:
            raise MetaModelError(
                "type names used for both nodes and links: " + ", ".join(sorted(shared))
            )
        for from_type, to_type in self.style_table:
            for name in (from_type, to_type):
                if name not in self.node_types:
                    raise MetaModelError(f"style table references undefined node type {name!r}")


@dataclass(frozen=True)
class PaletteEntry:
    label: str
    type_name: str
    visual: VisualTemplate


@dataclass(frozen=True)
class Violation:
    code: str
    element: int
    message: str

    def sort_key(self):
        return (self.element, _CODE_ORDER[self.code], self.message)


# -- metamodel file format ----------------------------------------------------


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that rejects duplicate mapping keys instead of silently merging."""


def _strict_mapping(loader, node, deep=False):
    mapping = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in mapping:
            raise ParseError(
                f"duplicate key {key!r}", key_node.start_mark.line + 1,
                key_node.start_mark.column + 1,
            )
        mapping[key] = loader.construct_object(value_node, deep=deep)
    return mapping


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _strict_mapping
)


def _parse_style(raw, where: str) -> VisualStyle:
    if not isinstance(raw, dict):
        raise MetaModelError(f"{where}: style must be a mapping")
    unknown = set(raw) - {"stroke", "head", "color"}
    if unknown:
        raise MetaModelError(f"{where}: unknown style keys {sorted(unknown)}")
    return VisualStyle(
        stroke=raw.get("stroke", "solid"),
        head=raw.get("head", "arrow"),
        color=raw.get("color", "#000000"),
    )


def _parse_attr_entry(raw, type_name: str):
    if not isinstance(raw, dict):
        raise MetaModelError(f"node type {type_name}: each attr entry must be a mapping")
    meta_keys = {"required", "default", "enum"}
    name_keys = [k for k in raw if k not in meta_keys]
    if len(name_keys) != 1:
        raise MetaModelError(
            f"node type {type_name}: attr entry must name exactly one attribute, got {sorted(raw)}"
        )
    key = name_keys[0]
    enum = raw.get("enum")
    spec = AttrSpec(
        kind=raw[key],
        required=bool(raw.get("required", False)),
        default=raw.get("default"),
        enum_values=tuple(enum) if enum is not None else None,
    )
    return key, spec


def _parse_endpoint(raw: str, link_name: str):
    parts = [p.strip() for p in raw.split("->")]
    if len(parts) != 2 or not all(parts):
        raise MetaModelError(
            f"link type {link_name}: endpoint pattern must look like 'From -> To', got {raw!r}"
        )
    return parts[0], parts[1]


def load_metamodel(text: str) -> MetaModel:
    """Parse a *.mm.yaml definition into an immutable MetaModel."""
    try:
        doc = yaml.load(text, Loader=_StrictLoader)
    except ParseError:
        raise
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            str(getattr(exc, "problem", exc)),
            mark.line + 1 if mark else None,
            mark.column + 1 if mark else None,
        ) from exc
    if not isinstance(doc, dict):
        raise MetaModelError("metamodel document must be a mapping")
    for key in ("id", "name", "nodes"):
        if key not in doc:
            raise MetaModelError(f"metamodel is missing top-level key {key!r}")
    node_types = {}
    for name, raw in (doc["nodes"] or {}).items():
        raw = raw or {}
        attr_schema = {}
        for entry in raw.get("attrs", []) or []:
            key, spec = _parse_attr_entry(entry, name)
            if key in attr_schema:
                raise MetaModelError(f"node type {name}: duplicate attribute {key!r}")
            attr_schema[key] = spec
        node_types[name] = NodeTypeDef(
            name=name,
            attr_schema=attr_schema,
            container=bool(raw.get("container", False)),
            visual=VisualTemplate(
                shape=raw.get("shape", "box"),
                fill=raw.get("fill", "#ffffff"),
                text_fields=tuple(raw.get("show", []) or []),
            ),
            palette_label=raw.get("label", name),
        )
    link_types = {}
    for name, raw in (doc.get("links") or {}).items():
        raw = raw or {}
        if name in link_types:
            raise MetaModelError(f"duplicate link type name {name!r}")
        endpoints = tuple(
            _parse_endpoint(e, name) for e in (raw.get("endpoints") or [])
        )
        link_types[name] = LinkTypeDef(
            name=name,
            allowed_endpoints=endpoints,
            allow_self=bool(raw.get("self", False)),
            max_out=raw.get("max_out"),
            max_in=raw.get("max_in"),
            default_style=_parse_style(raw.get("style", {}), f"link type {name}"),
        )
    style_table = {}
    for entry in doc.get("styles") or []:
        if not isinstance(entry, dict) or "from" not in entry or "to" not in entry:
            raise MetaModelError("each styles entry needs 'from' and 'to' node types")
        pair = (entry["from"], entry["to"])
        if pair in style_table:
            raise MetaModelError(f"duplicate style table entry for {pair}")
        style_table[pair] = _parse_style(
            {k: v for k, v in entry.items() if k in ("stroke", "head", "color")},
            f"style {pair}",
        )
    return MetaModel(
        id=doc["id"],
        name=doc["name"],
        node_types=node_types,
        link_types=link_types,
        style_table=style_table,
    )


def _yaml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return yaml.safe_dump(value, default_flow_style=True).strip().removesuffix("\n...").strip()


def dump_metamodel(mm: MetaModel) -> str:
    """Emit the canonical *.mm.yaml text for a metamodel."""
    out = [f"id: {_yaml_scalar(mm.id)}", f"name: {_yaml_scalar(mm.name)}", "nodes:"]
    for name, nt in mm.node_types.items():
        out.append(f"  {name}:")
        if nt.attr_schema:
            out.append("    attrs:")
            for key, spec in nt.attr_schema.items():
                out.append(f"      - {key}: {spec.kind}")
                if spec.required:
                    out.append("        required: true")
                if spec.default is not None:
                    out.append(f"        default: {_yaml_scalar(spec.default)}")
                if spec.enum_values is not None:
                    out.append(
                        "        enum: [" + ", ".join(spec.enum_values) + "]"
                    )
        out.append(f"    container: {_yaml_scalar(nt.container)}")
        out.append(f"    shape: {nt.visual.shape}")
        out.append(f"    fill: {_yaml_scalar(nt.visual.fill)}")
        if nt.visual.text_fields:
            out.append("    show: [" + ", ".join(nt.visual.text_fields) + "]")
        out.append(f"    label: {_yaml_scalar(nt.palette_label)}")
    if mm.link_types:
        out.append("links:")
        for name, lt in mm.link_types.items():
            out.append(f"  {name}:")
            out.append("    endpoints:")
            for f, t in lt.allowed_endpoints:
                pattern = f"{f} -> {t}"
                if "*" in pattern:
                    pattern = f'"{pattern}"'
                out.append(f"      - {pattern}")
            out.append(f"    self: {_yaml_scalar(lt.allow_self)}")
            if lt.max_out is not None:
                out.append(f"    max_out: {lt.max_out}")
            if lt.max_in is not None:
                out.append(f"    max_in: {lt.max_in}")
            s = lt.default_style
            out.append(
                f"    style: {{stroke: {s.stroke}, head: {s.head}, color: {_yaml_scalar(s.color)}}}"
            )
    if mm.style_table:
        out.append("styles:")
        for (f, t), s in mm.style_table.items():
            out.append(
                f"  - {{from: {f}, to: {t}, stroke: {s.stroke}, head: {s.head}, "
                f"color: {_yaml_scalar(s.color)}}}"
            )
    return "\n".join(out) + "\n"


# -- light DSL creation --------------------------------------------------------


@dataclass(frozen=True)
class LightParams:
    """Parameterized DSL definition: names and kinds only, default visuals."""

    id: str
    name: str
    node_types: tuple  # of (type name, ((attr name, kind), ...))
    link_types: tuple = ()  # of (type name, (pattern string "From -> To", ...))


def light_create(params: LightParams) -> MetaModel:
    """Expand a parameter set into a full metamodel with default visuals."""
    if not params.node_types:
        raise MetaModelError("a DSL must define at least one node type")
    node_types = {}
    for name, attrs in params.node_types:
        if name in node_types:
            raise MetaModelError(f"duplicate node type name {name!r}")
        schema = {}
        for key, kind in attrs:
            if key in schema:
                raise MetaModelError(f"node type {name}: duplicate attribute {key!r}")
            schema[key] = AttrSpec(kind=kind)
        node_types[name] = NodeTypeDef(name=name, attr_schema=schema, palette_label=name)
    link_types = {}
    for name, patterns in params.link_types:
        if name in link_types:
            raise MetaModelError(f"duplicate link type name {name!r}")
        link_types[name] = LinkTypeDef(
            name=name,
            allowed_endpoints=tuple(_parse_endpoint(p, name) for p in patterns),
        )
    return MetaModel(
        id=params.id,
        name=params.name,
        node_types=node_types,
        link_types=link_types,
        style_table={},
    )


def palette(mm: MetaModel) -> list:
    """One entry per node type, in declaration order."""
    return [
        PaletteEntry(nt.palette_label, name, nt.visual)
        for name, nt in mm.node_types.items()
    ]


# -- model integrity checking ---------------------------------------------------


def validate(ws: Workspace, mm: MetaModel) -> list:
    """Check a workspace against a metamodel; returns violations sorted by
    (element id, code). An empty list means the model conforms."""
    violations = []

    def report(code: str, element: int, message: str):
        violations.append(Violation(code, element, message))

    for node in ws.nodes.values():
        type_def = mm.node_types.get(node.type_name)
        if type_def is None:
            report("UNKNOWN_TYPE", node.id, f"node type {node.type_name!r} is not defined")
        else:
            for key, spec in type_def.attr_schema.items():
                if key not in node.attrs:
                    if spec.required:
                        report("MISSING_ATTR", node.id, f"required attribute {key!r} is missing")
                    continue
                value = node.attrs[key]
                if attr_tag(value) != spec.kind:
                    report(
                        "BAD_ATTR_KIND",
                        node.id,
                        f"attribute {key!r} has kind {attr_tag(value)}, expected {spec.kind}",
                    )
                elif spec.enum_values is not None and value not in spec.enum_values:
                    report(
                        "BAD_ENUM",
                        node.id,
                        f"attribute {key!r} value {value!r} not among "
                        + ", ".join(spec.enum_values),
                    )
        if node.parent is not None:
            parent = ws.nodes.get(node.parent)
            if parent is not None:
                parent_def = mm.node_types.get(parent.type_name)
                if parent_def is None or not parent_def.container:
                    report(
                        "BAD_PARENT",
                        node.id,
                        f"parent {parent.id} has non-container type {parent.type_name!r}",
                    )

    for link in ws.links.values():
        type_def = mm.link_types.get(link.type_name)
        if type_def is None:
            report("UNKNOWN_TYPE", link.id, f"link type {link.type_name!r} is not defined")
            continue
        from_node = ws.nodes.get(link.from_id)
        to_node = ws.nodes.get(link.to_id)
        if from_node is None or to_node is None:
            continue  # referential integrity is a structural precondition
        if not type_def.endpoint_allowed(from_node.type_name, to_node.type_name):
            report(
                "BAD_ENDPOINT",
                link.id,
                f"({from_node.type_name} -> {to_node.type_name}) does not match any "
                f"allowed endpoint of link type {link.type_name!r}",
            )
        if link.from_id == link.to_id and not type_def.allow_self:
            report("SELF_LINK", link.id, f"link type {link.type_name!r} forbids self-links")

    for name, type_def in mm.link_types.items():
        if type_def.max_out is None and type_def.max_in is None:
            continue
        out_counts: dict[int, int] = {}
        in_counts: dict[int, int] = {}
        for link in ws.links.values():
            if link.type_name != name:
                continue
            out_counts[link.from_id] = out_counts.get(link.from_id, 0) + 1
            in_counts[link.to_id] = in_counts.get(link.to_id, 0) + 1
        if type_def.max_out is not None:
            for node_id, count in out_counts.items():
                if count > type_def.max_out:
                    report(
                        "CARDINALITY",
                        node_id,
                        f"{count} outgoing {name!r} links exceed max_out {type_def.max_out}",
                    )
        if type_def.max_in is not None:
            for node_id, count in in_counts.items():
                if count > type_def.max_in:
                    report(
                        "CARDINALITY",
                        node_id,
                        f"{count} incoming {name!r} links exceed max_in {type_def.max_in}",
                    )

    return sorted(violations, key=Violation.sort_key)


def resolve_link_style(ws: Workspace, link_id: int, mm: MetaModel) -> VisualStyle:
    """Style for a link from the (from-type, to-type) table, else the link type default."""
    link = ws.link(link_id)
    from_type = ws.node(link.from_id).type_name
    to_type = ws.node(link.to_id).type_name
    for name in (from_type, to_type):
        if name not in mm.node_types:
            raise MetaModelError(f"endpoint type {name!r} is not defined in metamodel {mm.id}")
    mapped = mm.style_table.get((from_type, to_type))
    if mapped is not None:
        return mapped
    type_def = mm.link_types.get(link.type_name)
    if type_def is None:
        raise MetaModelError(f"link type {link.type_name!r} is not defined in metamodel {mm.id}")
    return type_def.default_style
