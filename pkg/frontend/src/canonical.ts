// Canonical client-side form of a workspace document.
//
// The dirty flag compares the current document against the last loaded or
// saved snapshot; both sides go through this function, so what matters is
// determinism (fixed key order, id-sorted arrays), not byte equality with
// the server's own serializer.

import type { LinkDoc, NodeDoc, WorkspaceDoc } from "./types.js";

function nodeDoc(n: NodeDoc): object {
  return {
    id: n.id,
    type: n.type,
    label: n.label,
    parent: n.parent,
    x: n.x,
    y: n.y,
    w: n.w,
    h: n.h,
    attrs: sortedAttrs(n.attrs),
    payload: n.payload ?? null,
  };
}

function linkDoc(l: LinkDoc): object {
  return {
    id: l.id,
    type: l.type,
    from: l.from,
    to: l.to,
    attrs: sortedAttrs(l.attrs),
  };
}

function sortedAttrs(attrs: Record<string, unknown>): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  for (const key of Object.keys(attrs).sort()) out[key] = attrs[key];
  return out;
}

export function canonicalize(ws: WorkspaceDoc): string {
  const doc = {
    format: ws.format,
    fversion: ws.fversion,
    id: ws.id,
    name: ws.name,
    metamodel: ws.metamodel,
    version: ws.version,
    next_id: ws.next_id,
    viewport: { cx: ws.viewport.cx, cy: ws.viewport.cy, zoom: ws.viewport.zoom },
    history: ws.history,
    nodes: [...ws.nodes].sort((a, b) => a.id - b.id).map(nodeDoc),
    links: [...ws.links].sort((a, b) => a.id - b.id).map(linkDoc),
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

export function cloneWorkspace(ws: WorkspaceDoc): WorkspaceDoc {
  return JSON.parse(JSON.stringify(ws)) as WorkspaceDoc;
}
