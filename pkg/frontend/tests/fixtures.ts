// Hand-rolled documents for headless tests.

import type { MetamodelDoc, NodeDoc, WorkspaceDoc } from "../src/types.js";

export function emptyWorkspace(id = "w", metamodel = "dialog"): WorkspaceDoc {
  return {
    format: "hgos-workspace",
    fversion: 1,
    id,
    name: id.toUpperCase(),
    metamodel,
    version: 0,
    next_id: 1,
    viewport: { cx: 0.0, cy: 0.0, zoom: 1.0 },
    history: [],
    nodes: [],
    links: [],
  };
}

export function makeNode(id: number, type: string, overrides: Partial<NodeDoc> = {}): NodeDoc {
  return {
    id,
    type,
    label: overrides.label ?? `${type}-${id}`,
    parent: null,
    x: 0,
    y: 0,
    w: 160,
    h: 64,
    attrs: {},
    payload: null,
    ...overrides,
  };
}

/** Trimmed-down dialog metamodel description, as served by the API. */
export function dialogMetamodel(): MetamodelDoc {
  const style = { stroke: "solid", head: "arrow", color: "#000000" };
  return {
    id: "dialog",
    name: "Dialog",
    node_types: {
      Rule: {
        container: false,
        shape: "box",
        fill: "#fff2cc",
        show: ["conditions"],
        label: "Rule",
        attrs: {
          conditions: { kind: "string", required: true, default: null, enum: null },
          priority: { kind: "int", required: false, default: 0, enum: null },
        },
      },
      Miron: {
        container: false,
        shape: "ellipse",
        fill: "#d9ead3",
        show: ["name", "modality"],
        label: "Miron",
        attrs: {
          modality: {
            kind: "string", required: true, default: null,
            enum: ["speech", "text", "motion", "expression"],
          },
          name: { kind: "string", required: true, default: null, enum: null },
          type: { kind: "string", required: true, default: null, enum: ["inner", "outer"] },
        },
      },
      Group: {
        container: true, shape: "box", fill: "#eeeeee", show: [], label: "Group", attrs: {},
      },
      Comment: {
        container: false, shape: "box", fill: "#e5e5e5", show: [], label: "Comment",
        attrs: { text: { kind: "string", required: false, default: null, enum: null } },
      },
    },
    link_types: {
      condition: {
        endpoints: ["Miron -> Rule", "Variable -> Rule", "State -> Rule"],
        self: false, max_out: null, max_in: null, style,
      },
      action: {
        endpoints: ["Rule -> Miron", "Rule -> Variable", "Rule -> State"],
        self: false, max_out: null, max_in: null, style,
      },
      refers: {
        endpoints: ["* -> *"], self: true, max_out: null, max_in: null,
        style: { stroke: "dotted", head: "none", color: "#888888" },
      },
    },
    styles: [
      { from: "Miron", to: "Rule", stroke: "dashed", head: "diamond", color: "#336699" },
      { from: "Rule", to: "Miron", stroke: "solid", head: "arrow", color: "#993333" },
    ],
    palette: [
      { label: "Rule", type: "Rule", shape: "box", fill: "#fff2cc" },
      { label: "Miron", type: "Miron", shape: "ellipse", fill: "#d9ead3" },
      { label: "Group", type: "Group", shape: "box", fill: "#eeeeee" },
      { label: "Comment", type: "Comment", shape: "box", fill: "#e5e5e5" },
    ],
  };
}
