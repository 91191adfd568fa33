// Client-side validation of the in-memory document, so the overlay can
// flag problems (missing required attrs, unknown types, bad endpoints)
// before anything is saved. The server remains the authority; this mirrors
// the checks that matter while editing.

import type {
  AttrValue,
  MetamodelDoc,
  Violation,
  WorkspaceDoc,
} from "./types.js";

const CODE_ORDER = [
  "UNKNOWN_TYPE",
  "MISSING_ATTR",
  "BAD_ATTR_KIND",
  "BAD_ENUM",
  "BAD_ENDPOINT",
  "CARDINALITY",
  "SELF_LINK",
  "BAD_PARENT",
];

function kindOf(value: AttrValue): string {
  if (typeof value === "boolean") return "bool";
  if (typeof value === "number") return Number.isInteger(value) ? "int" : "real";
  if (typeof value === "string") return "string";
  if (Array.isArray(value)) return "list";
  return "workspace";
}

function kindMatches(value: AttrValue, kind: string): boolean {
  const got = kindOf(value);
  if (kind === "real") return got === "real" || got === "int";
  return got === kind;
}

function endpointAllowed(patterns: string[], from: string, to: string): boolean {
  for (const pattern of patterns) {
    const [f, t] = pattern.split("->").map((s) => s.trim());
    if ((f === "*" || f === from) && (t === "*" || t === to)) return true;
  }
  return false;
}

export function validateLocal(ws: WorkspaceDoc, mm: MetamodelDoc): Violation[] {
  const out: Violation[] = [];
  const nodeType = new Map(ws.nodes.map((n) => [n.id, n.type]));

  for (const node of ws.nodes) {
    const def = mm.node_types[node.type];
    if (!def) {
      out.push({ element: node.id, code: "UNKNOWN_TYPE", message: `unknown node type ${node.type}` });
      continue;
    }
    for (const [key, spec] of Object.entries(def.attrs)) {
      const value = node.attrs[key];
      if (value === undefined) {
        if (spec.required) {
          out.push({ element: node.id, code: "MISSING_ATTR", message: `missing required attribute ${key}` });
        }
        continue;
      }
      if (!kindMatches(value, spec.kind)) {
        out.push({ element: node.id, code: "BAD_ATTR_KIND", message: `attribute ${key} must be ${spec.kind}` });
      } else if (spec.enum && typeof value === "string" && !spec.enum.includes(value)) {
        out.push({ element: node.id, code: "BAD_ENUM", message: `attribute ${key} must be one of ${spec.enum.join(", ")}` });
      }
    }
    if (node.parent !== null) {
      const parentType = nodeType.get(node.parent);
      const parentDef = parentType ? mm.node_types[parentType] : undefined;
      if (!parentDef?.container) {
        out.push({ element: node.id, code: "BAD_PARENT", message: `parent ${node.parent} is not a container` });
      }
    }
  }

  for (const link of ws.links) {
    const def = mm.link_types[link.type];
    if (!def) {
      out.push({ element: link.id, code: "UNKNOWN_TYPE", message: `unknown link type ${link.type}` });
      continue;
    }
    const fromType = nodeType.get(link.from);
    const toType = nodeType.get(link.to);
    if (fromType && toType && mm.node_types[fromType] && mm.node_types[toType] &&
        !endpointAllowed(def.endpoints, fromType, toType)) {
      out.push({ element: link.id, code: "BAD_ENDPOINT", message: `${link.type} does not connect ${fromType} -> ${toType}` });
    }
    if (link.from === link.to && !def.self) {
      out.push({ element: link.id, code: "SELF_LINK", message: `${link.type} links may not be self-referential` });
    }
  }

  return out.sort(
    (a, b) =>
      a.element - b.element ||
      CODE_ORDER.indexOf(a.code) - CODE_ORDER.indexOf(b.code) ||
      a.message.localeCompare(b.message),
  );
}
