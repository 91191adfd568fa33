"""Metamodel loading, light creation, palettes, link styles."""

from __future__ import annotations

import pytest

from omnigraph import (
    LightParams,
    MetaModelError,
    ParseError,
    dump_metamodel,
    light_create,
    load_metamodel,
    new_workspace,
    palette,
    resolve_link_style,
)


class TestLoad:
    def test_basic_fixture_types(self, basic_mm):
        assert list(basic_mm.node_types) == ["Folder", "File", "WorkspaceLink", "Comment"]
        assert basic_mm.node_types["Folder"].container
        assert not basic_mm.node_types["File"].container

    def test_dialog_fixture_miron_attrs(self, dialog_mm):
        assert "Rule" in dialog_mm.node_types and "Miron" in dialog_mm.node_types
        miron = dialog_mm.node_types["Miron"]
        assert {"modality", "name", "type"} <= set(miron.attr_schema)
        assert miron.attr_schema["modality"].required
        assert miron.attr_schema["type"].enum_values == ("inner", "outer")

    def test_duplicate_node_type_rejected(self):
        text = """\
id: dup
name: Dup
nodes:
  Task:
    container: false
  Task:
    container: true
"""
        with pytest.raises(ParseError, match="Task"):
            load_metamodel(text)

    def test_node_and_link_sharing_a_name_rejected(self):
        text = """\
id: x
name: X
nodes:
  Thing: {}
links:
  Thing:
    endpoints: ["* -> *"]
"""
        with pytest.raises(MetaModelError, match="Thing"):
            load_metamodel(text)

    def test_dangling_style_reference_rejected(self):
        text = """\
id: x
name: X
nodes:
  A: {}
styles:
  - {from: A, to: Missing, stroke: solid, head: arrow, color: "#000"}
"""
        with pytest.raises(MetaModelError, match="Missing"):
            load_metamodel(text)

    def test_default_must_match_kind(self):
        text = """\
id: x
name: X
nodes:
  A:
    attrs:
      - count: int
        default: nope
"""
        with pytest.raises(MetaModelError):
            load_metamodel(text)

    def test_enum_only_for_strings(self):
        text = """\
id: x
name: X
nodes:
  A:
    attrs:
      - count: int
        enum: [a, b]
"""
        with pytest.raises(MetaModelError):
            load_metamodel(text)

    def test_empty_endpoints_rejected(self):
        text = """\
id: x
name: X
nodes:
  A: {}
links:
  l:
    endpoints: []
"""
        with pytest.raises(MetaModelError):
            load_metamodel(text)

    def test_shown_field_must_be_declared(self):
        text = """\
id: x
name: X
nodes:
  A:
    show: [ghost]
"""
        with pytest.raises(MetaModelError, match="ghost"):
            load_metamodel(text)

    def test_yaml_syntax_error_reports_location(self):
        with pytest.raises(ParseError):
            load_metamodel("id: [unclosed")


class TestLightCreate:
    def test_minimal_dsl(self):
        mm = light_create(LightParams(
            id="todo", name="Todo",
            node_types=(("Task", (("title", "string"),)),),
            link_types=(("depends", ("Task -> Task",)),),
        ))
        assert list(mm.node_types) == ["Task"]
        assert mm.node_types["Task"].attr_schema["title"].kind == "string"
        assert mm.link_types["depends"].allowed_endpoints == (("Task", "Task"),)
        assert mm.node_types["Task"].visual.shape == "box"
        assert mm.link_types["depends"].default_style.stroke == "solid"

    def test_empty_node_list_rejected(self):
        with pytest.raises(MetaModelError, match="at least one"):
            light_create(LightParams(id="x", name="X", node_types=()))

    def test_expansion_serializes_like_hand_written_file(self):
        mm = light_create(LightParams(
            id="todo", name="Todo",
            node_types=(("Task", (("title", "string"), ("done", "bool"))),),
            link_types=(("depends", ("Task -> Task",)),),
        ))
        hand_written = """\
id: todo
name: Todo
nodes:
  Task:
    attrs:
      - title: string
      - done: bool
    container: false
    shape: box
    fill: '#ffffff'
    label: Task
links:
  depends:
    endpoints:
      - Task -> Task
    self: false
    style: {stroke: solid, head: arrow, color: '#000000'}
"""
        assert dump_metamodel(mm) == hand_written
        assert load_metamodel(hand_written) == mm

    def test_fixture_dump_reload_is_identity(self, dialog_mm):
        assert load_metamodel(dump_metamodel(dialog_mm)) == dialog_mm


class TestPalette:
    def test_dialog_palette_entries(self, dialog_mm):
        entries = palette(dialog_mm)
        by_type = {entry.type_name: entry for entry in entries}
        assert by_type["Rule"].label == "Rule"
        assert by_type["Miron"].label == "Miron"

    def test_declaration_order_and_length(self, dialog_mm):
        entries = palette(dialog_mm)
        assert [e.type_name for e in entries] == list(dialog_mm.node_types)
        assert len(entries) == len(dialog_mm.node_types)

    def test_single_type_single_entry(self):
        mm = light_create(LightParams(id="x", name="X", node_types=(("Only", ()),)))
        assert len(palette(mm)) == 1


class TestResolveLinkStyle:
    def make_ws(self, dialog_mm):
        ws = new_workspace("w", "W", "dialog")
        miron = ws.add_node("Miron")
        rule = ws.add_node("Rule")
        return ws, miron, rule

    def test_mapped_pair_wins(self, dialog_mm):
        ws, miron, rule = self.make_ws(dialog_mm)
        link = ws.add_link("condition", miron, rule)
        style = resolve_link_style(ws, link, dialog_mm)
        assert (style.stroke, style.head) == ("dashed", "diamond")

    def test_unmapped_pair_falls_back_to_link_default(self, dialog_mm):
        ws, miron, rule = self.make_ws(dialog_mm)
        variable = ws.add_node("Variable")
        link = ws.add_link("condition", variable, rule)
        assert resolve_link_style(ws, link, dialog_mm) is dialog_mm.link_types["condition"].default_style

    def test_same_type_pair_uses_mapping_not_default(self, dialog_mm):
        ws, miron, rule = self.make_ws(dialog_mm)
        link = ws.add_link("refers", rule, miron)
        style = resolve_link_style(ws, link, dialog_mm)
        # (Rule, Miron) is mapped even though the link type default is dotted
        assert style.stroke == "solid" and style.head == "arrow"

    def test_endpoint_type_missing_from_metamodel_errors(self, dialog_mm):
        ws = new_workspace("w", "W", "dialog")
        ghost = ws.add_node("Ghost")
        rule = ws.add_node("Rule")
        link = ws.add_link("condition", ghost, rule)
        with pytest.raises(MetaModelError, match="Ghost"):
            resolve_link_style(ws, link, dialog_mm)
