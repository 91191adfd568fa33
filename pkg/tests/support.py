"""Shared test machinery: random model generators, independent oracles,
and fixture workspace builders.

The oracles here deliberately re-derive results by direct enumeration and
must stay independent of the implementation paths they check.
"""

from __future__ import annotations

import random
import string

from omnigraph import (
    AttrSpec,
    LinkTypeDef,
    MetaModel,
    NodeTypeDef,
    PayloadRef,
    VisualStyle,
    VisualTemplate,
    Workspace,
    WorkspaceRef,
    new_workspace,
)

# --------------------------------------------------------------------------
# random workspaces
# --------------------------------------------------------------------------

TYPE_POOL = ["Alpha", "Beta", "Gamma", "Delta", "Ghost", "Phantom"]
LINK_TYPE_POOL = ["flows", "refers", "owns"]
ATTR_KEY_POOL = ["name", "kind", "count", "weight", "done", "tags"]


def random_attr_value(rng: random.Random, depth: int = 0):
    choices = ["string", "int", "real", "bool", "workspace"]
    if depth < 2:
        choices.append("list")
    tag = rng.choice(choices)
    if tag == "string":
        return "".join(rng.choice(string.printable[:70]) for _ in range(rng.randint(0, 8)))
    if tag == "int":
        return rng.randint(-10**6, 10**6)
    if tag == "real":
        return rng.choice([0.0, -1.5, 3.14159, 1e-9, 12345.6789, rng.random() * 100])
    if tag == "bool":
        return rng.random() < 0.5
    if tag == "workspace":
        return WorkspaceRef("ws-" + rng.choice(string.ascii_lowercase))
    # homogeneous list
    inner_tag_value = random_attr_value(rng, depth=2)
    length = rng.randint(0, 3)
    items = [inner_tag_value]
    for _ in range(length):
        candidate = random_attr_value(rng, depth=2)
        while _tag(candidate) != _tag(inner_tag_value):
            candidate = random_attr_value(rng, depth=2)
        items.append(candidate)
    return items


def _tag(value) -> str:
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
    return "workspace"


def random_workspace(
    rng: random.Random,
    max_nodes: int = 12,
    max_links: int = 16,
    type_pool=TYPE_POOL,
    link_type_pool=LINK_TYPE_POOL,
) -> Workspace:
    ws = new_workspace(
        "ws-" + "".join(rng.choice(string.ascii_lowercase) for _ in range(6)),
        "Random " + rng.choice(string.ascii_uppercase),
        rng.choice(["basic", "dialog", "scratch"]),
    )
    ws.history = ["prev-" + rng.choice(string.ascii_lowercase) for _ in range(rng.randint(0, 3))]
    ws.viewport.cx = rng.choice([0.0, -40.5, 133.25])
    ws.viewport.cy = rng.choice([0.0, 17.0, -2.75])
    ws.viewport.zoom = rng.choice([1.0, 0.5, 2.25])
    for _ in range(rng.randint(0, max_nodes)):
        node_id = ws.add_node(
            rng.choice(type_pool),
            label="".join(rng.choice(string.printable[:60]) for _ in range(rng.randint(0, 6))),
            position=(rng.uniform(-500, 500), rng.uniform(-500, 500)),
            size=(rng.uniform(10, 300), rng.uniform(10, 200)),
        )
        for _ in range(rng.randint(0, 3)):
            ws.set_attr(node_id, rng.choice(ATTR_KEY_POOL), random_attr_value(rng))
        if rng.random() < 0.2:
            ws.nodes[node_id].payload = PayloadRef(
                rng.choice(["inline_text", "file_path", "workspace_link"]),
                rng.choice(["notes.txt", "sub/readme.md", "other-ws"]),
            )
        # parent only among earlier nodes keeps containment a forest
        earlier = [i for i in ws.nodes if i < node_id]
        if earlier and rng.random() < 0.3:
            ws.nodes[node_id].parent = rng.choice(earlier)
    node_ids = list(ws.nodes)
    if node_ids:
        for _ in range(rng.randint(0, max_links)):
            link_id = ws.add_link(
                rng.choice(link_type_pool), rng.choice(node_ids), rng.choice(node_ids)
            )
            if rng.random() < 0.3:
                ws.set_attr(link_id, rng.choice(ATTR_KEY_POOL), random_attr_value(rng))
    # occasional deletions leave id gaps
    for _ in range(rng.randint(0, 2)):
        if ws.nodes and rng.random() < 0.5:
            ws.remove_node(rng.choice(list(ws.nodes)))
        elif ws.links:
            ws.remove_link(rng.choice(list(ws.links)))
    ws.version = rng.randint(0, 9)
    return ws


# --------------------------------------------------------------------------
# random metamodels + brute-force validation oracle
# --------------------------------------------------------------------------


def random_metamodel(rng: random.Random, max_node_types: int = 4) -> MetaModel:
    node_type_names = rng.sample(TYPE_POOL[:4], rng.randint(1, max_node_types))
    node_types = {}
    for name in node_type_names:
        schema = {}
        for key in rng.sample(ATTR_KEY_POOL, rng.randint(0, 3)):
            kind = rng.choice(["string", "int", "real", "bool", "list"])
            enum_values = None
            if kind == "string" and rng.random() < 0.4:
                enum_values = ("red", "green", "blue")
            schema[key] = AttrSpec(kind=kind, required=rng.random() < 0.5, enum_values=enum_values)
        node_types[name] = NodeTypeDef(
            name=name,
            attr_schema=schema,
            container=rng.random() < 0.4,
            visual=VisualTemplate(),
            palette_label=name,
        )
    link_types = {}
    for name in rng.sample(LINK_TYPE_POOL, rng.randint(1, 2)):
        patterns = []
        for _ in range(rng.randint(1, 2)):
            patterns.append(
                (
                    rng.choice(node_type_names + ["*"]),
                    rng.choice(node_type_names + ["*"]),
                )
            )
        link_types[name] = LinkTypeDef(
            name=name,
            allowed_endpoints=tuple(patterns),
            allow_self=rng.random() < 0.5,
            max_out=rng.choice([None, 1, 2]),
            max_in=rng.choice([None, 1, 2]),
            default_style=VisualStyle(),
        )
    return MetaModel(
        id="random-mm",
        name="Random MM",
        node_types=node_types,
        link_types=link_types,
        style_table={},
    )


def oracle_validate(ws: Workspace, mm: MetaModel):
    """Brute-force per-rule enumeration; returns a sorted list of
    (element id, code) pairs, duplicates included."""
    found = []
    for node in ws.nodes.values():
        if node.type_name not in mm.node_types:
            found.append((node.id, "UNKNOWN_TYPE"))
        else:
            schema = mm.node_types[node.type_name].attr_schema
            for key, spec in schema.items():
                if key not in node.attrs:
                    if spec.required:
                        found.append((node.id, "MISSING_ATTR"))
                    continue
                value = node.attrs[key]
                if _tag(value) != spec.kind:
                    found.append((node.id, "BAD_ATTR_KIND"))
                elif spec.enum_values is not None and value not in spec.enum_values:
                    found.append((node.id, "BAD_ENUM"))
        if node.parent is not None and node.parent in ws.nodes:
            parent_type = ws.nodes[node.parent].type_name
            is_container = (
                parent_type in mm.node_types and mm.node_types[parent_type].container
            )
            if not is_container:
                found.append((node.id, "BAD_PARENT"))
    for link in ws.links.values():
        if link.type_name not in mm.link_types:
            found.append((link.id, "UNKNOWN_TYPE"))
            continue
        type_def = mm.link_types[link.type_name]
        from_type = ws.nodes[link.from_id].type_name
        to_type = ws.nodes[link.to_id].type_name
        matched = False
        for pattern_from, pattern_to in type_def.allowed_endpoints:
            from_ok = pattern_from == "*" or pattern_from == from_type
            to_ok = pattern_to == "*" or pattern_to == to_type
            if from_ok and to_ok:
                matched = True
        if not matched:
            found.append((link.id, "BAD_ENDPOINT"))
        if link.from_id == link.to_id and not type_def.allow_self:
            found.append((link.id, "SELF_LINK"))
    for node in ws.nodes.values():
        for type_name, type_def in mm.link_types.items():
            outgoing = sum(
                1
                for link in ws.links.values()
                if link.type_name == type_name and link.from_id == node.id
            )
            incoming = sum(
                1
                for link in ws.links.values()
                if link.type_name == type_name and link.to_id == node.id
            )
            if type_def.max_out is not None and outgoing > type_def.max_out:
                found.append((node.id, "CARDINALITY"))
            if type_def.max_in is not None and incoming > type_def.max_in:
                found.append((node.id, "CARDINALITY"))
    return sorted(found)


# --------------------------------------------------------------------------
# brute-force query oracle
# --------------------------------------------------------------------------


def _oracle_filter_match(element, filt) -> bool:
    if filt.field == "type":
        return element.type_name == filt.value
    if filt.field == "id":
        return element.id == filt.value
    if filt.field == "label":
        return getattr(element, "label", None) == filt.value
    if filt.key not in element.attrs:
        return False
    actual = element.attrs[filt.key]
    if _tag(actual) != _tag(filt.value):
        return False
    return actual == filt.value


def oracle_query(ws: Workspace, expr):
    """Direct set-comprehension evaluation of a parsed query pipeline."""
    if expr.source == "node":
        ids = {
            n.id
            for n in ws.nodes.values()
            if all(_oracle_filter_match(n, f) for f in expr.source_filters)
        }
        kind = "node"
    else:
        ids = {
            l.id
            for l in ws.links.values()
            if all(_oracle_filter_match(l, f) for f in expr.source_filters)
        }
        kind = "link"
    for step in expr.steps:
        if step.op == "filter":
            pool = ws.nodes if kind == "node" else ws.links
            ids = {i for i in ids if all(_oracle_filter_match(pool[i], f) for f in step.filters)}
        elif step.op == "out":
            ids = {
                l.to_id
                for l in ws.links.values()
                if l.type_name == step.link_type and l.from_id in ids
            }
        elif step.op == "in":
            ids = {
                l.from_id
                for l in ws.links.values()
                if l.type_name == step.link_type and l.to_id in ids
            }
        elif step.op == "parent":
            ids = {ws.nodes[i].parent for i in ids} - {None}
        elif step.op == "children":
            ids = {n.id for n in ws.nodes.values() if n.parent in ids}
    return sorted(ids), kind


def random_query_text(rng: random.Random, ws: Workspace) -> str:
    def random_filters() -> str:
        options = []
        if rng.random() < 0.7:
            options.append(f"type={rng.choice(TYPE_POOL + LINK_TYPE_POOL)}")
        if rng.random() < 0.3 and ws.nodes:
            options.append(f"id={rng.choice(list(ws.nodes) + [999])}")
        if rng.random() < 0.4:
            key = rng.choice(ATTR_KEY_POOL)
            value = rng.choice(['"red"', "3", "true", "1.5", "word"])
            options.append(f"attr.{key}={value}")
        return ", ".join(options)

    source_kind = "node" if rng.random() < 0.8 else "link"
    parts = [f"{source_kind}[{random_filters()}]"]
    if source_kind == "node":
        for _ in range(rng.randint(0, 3)):
            roll = rng.random()
            if roll < 0.35:
                parts.append(f"-> {rng.choice(LINK_TYPE_POOL)}")
            elif roll < 0.6:
                parts.append(f"<- {rng.choice(LINK_TYPE_POOL)}")
            elif roll < 0.8:
                parts.append(f"[{random_filters()}]")
            else:
                parts.append(rng.choice([".parent", ".children"]))
    elif rng.random() < 0.5:
        parts.append(f"[{random_filters()}]")
    return " ".join(parts)


# --------------------------------------------------------------------------
# dialog-shaped fixture builders
# --------------------------------------------------------------------------

MODALITIES = ("speech", "text", "motion", "expression")

GEN_ENTRIES = (
    ("dictionaries.js.tpl", "dictionaries.js", "node[type=Miron]"),
    ("weights.js.tpl", "weights.js", "node[type=Rule]"),
    ("intents.js.tpl", "intents.js", "node[type=Miron]"),
)


def add_gen_entries(ws: Workspace, mm=None) -> list:
    ids = []
    for template, output, root_query in GEN_ENTRIES:
        entry = ws.add_node("GenEntry", output, metamodel=mm)
        ws.set_attr(entry, "template", template)
        ws.set_attr(entry, "output", output)
        ws.set_attr(entry, "root_query", root_query)
        ids.append(entry)
    return ids


def build_dialog_workspace(mm, n_mirons: int, n_rules: int | None = None,
                           workspace_id: str = "dialog") -> Workspace:
    """A conforming dialog model with the bundled generation plan inside it."""
    ws = new_workspace(workspace_id, "Avatar Dialog", "dialog")
    if n_rules is None:
        n_rules = max(1, n_mirons // 2)
    add_gen_entries(ws, mm)
    miron_ids = []
    for i in range(n_mirons):
        miron = ws.add_node("Miron", f"miron-{i}", metamodel=mm)
        ws.set_attr(miron, "modality", MODALITIES[i % len(MODALITIES)])
        ws.set_attr(miron, "name", f"miron_{i}")
        ws.set_attr(miron, "type", "outer" if i % 2 == 0 else "inner")
        miron_ids.append(miron)
    rule_ids = []
    for i in range(n_rules):
        rule = ws.add_node("Rule", f"rule-{i}", metamodel=mm)
        ws.set_attr(rule, "conditions", f"cond_{i}")
        rule_ids.append(rule)
    for i, miron in enumerate(miron_ids):
        if rule_ids:
            ws.add_link("condition", miron, rule_ids[i % len(rule_ids)])
    return ws


def build_benchmark_workspace(mm) -> Workspace:
    """The synthetic throughput fixture: exactly 4246 nodes and 3890 links."""
    ws = new_workspace("benchmark", "Dialog benchmark", "dialog")
    add_gen_entries(ws, mm)  # 3 nodes
    mirons, rules, variables, comments = 2000, 1000, 800, 443
    miron_ids, rule_ids, variable_ids = [], [], []
    for i in range(mirons):
        miron = ws.add_node("Miron", f"m{i}", metamodel=mm)
        ws.set_attr(miron, "modality", MODALITIES[i % len(MODALITIES)])
        ws.set_attr(miron, "name", f"miron_{i}")
        ws.set_attr(miron, "type", "outer" if i % 2 == 0 else "inner")
        miron_ids.append(miron)
    for i in range(rules):
        rule = ws.add_node("Rule", f"r{i}", metamodel=mm)
        ws.set_attr(rule, "conditions", f"cond_{i}")
        rule_ids.append(rule)
    for i in range(variables):
        variable = ws.add_node("Variable", f"v{i}", metamodel=mm)
        ws.set_attr(variable, "name", f"var_{i}")
        variable_ids.append(variable)
    for i in range(comments):
        comment = ws.add_node("Comment", f"c{i}", metamodel=mm)
        ws.set_attr(comment, "text", f"note {i}")
    for i in range(2000):  # miron -> rule conditions
        ws.add_link("condition", miron_ids[i], rule_ids[i % rules])
    for i in range(1500):  # rule -> miron actions
        ws.add_link("action", rule_ids[i % rules], miron_ids[(i * 7) % mirons])
    for i in range(390):  # variable -> rule conditions
        ws.add_link("condition", variable_ids[i % variables], rule_ids[(i * 3) % rules])
    assert ws.node_count() == 4246 and ws.link_count() == 3890
    return ws
