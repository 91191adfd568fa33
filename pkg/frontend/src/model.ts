// Local-first editor state over a loaded workspace document.
//
// All edits happen on an in-memory copy; the dirty flag is true exactly
// when the copy's canonical form differs from the last loaded/saved
// snapshot, so load -> no edits -> save is suppressed.

import { canonicalize, cloneWorkspace } from "./canonical.js";
import type {
  AttrValue,
  LinkDoc,
  MetamodelDoc,
  NodeDoc,
  WorkspaceDoc,
} from "./types.js";

const DEFAULT_NODE_W = 160;
const DEFAULT_NODE_H = 64;
const MIN_ZOOM = 0.05;
const MAX_ZOOM = 40;

export class EditorState {
  doc: WorkspaceDoc;
  selection: Set<number> = new Set();
  private snapshot: string;

  constructor(doc: WorkspaceDoc) {
    this.doc = cloneWorkspace(doc);
    this.snapshot = canonicalize(this.doc);
  }

  get dirty(): boolean {
    return canonicalize(this.doc) !== this.snapshot;
  }

  /** Re-baseline after a successful save or an explicit reload. */
  markClean(version?: number): void {
    if (version !== undefined) this.doc.version = version;
    this.snapshot = canonicalize(this.doc);
  }

  node(id: number): NodeDoc | undefined {
    return this.doc.nodes.find((n) => n.id === id);
  }

  link(id: number): LinkDoc | undefined {
    return this.doc.links.find((l) => l.id === id);
  }

  private takeId(): number {
    return this.doc.next_id++;
  }

  /** Palette drop: create a node locally with metamodel attribute defaults. */
  addNode(
    type: string,
    at: { x: number; y: number },
    mm?: MetamodelDoc,
  ): NodeDoc {
    const attrs: Record<string, AttrValue> = {};
    const typeDef = mm?.node_types[type];
    if (typeDef) {
      for (const [key, spec] of Object.entries(typeDef.attrs)) {
        if (spec.default !== null) attrs[key] = spec.default;
      }
    }
    const node: NodeDoc = {
      id: this.takeId(),
      type,
      label: typeDef?.label ?? type,
      parent: null,
      x: at.x,
      y: at.y,
      w: DEFAULT_NODE_W,
      h: DEFAULT_NODE_H,
      attrs,
      payload: null,
    };
    this.doc.nodes.push(node);
    return node;
  }

  /** Link drawing requires two existing endpoints — no dangling links. */
  addLink(type: string, from: number, to: number): LinkDoc {
    if (!this.node(from) || !this.node(to)) {
      throw new Error(`link endpoints must be existing nodes (${from} -> ${to})`);
    }
    const link: LinkDoc = { id: this.takeId(), type, from, to, attrs: {} };
    this.doc.links.push(link);
    return link;
  }

  moveNode(id: number, x: number, y: number): void {
    const node = this.node(id);
    if (node) {
      node.x = x;
      node.y = y;
    }
  }

  setAttr(id: number, key: string, value: AttrValue): void {
    const element = this.node(id) ?? this.link(id);
    if (element) element.attrs[key] = value;
  }

  clearAttr(id: number, key: string): void {
    const element = this.node(id) ?? this.link(id);
    if (element) delete element.attrs[key];
  }

  setLabel(id: number, label: string): void {
    const node = this.node(id);
    if (node) node.label = label;
  }

  /** Delete a node with its incident links; children re-attach upward. */
  removeNode(id: number): void {
    const victim = this.node(id);
    if (!victim) return;
    this.doc.links = this.doc.links.filter((l) => l.from !== id && l.to !== id);
    for (const child of this.doc.nodes) {
      if (child.parent === id) child.parent = victim.parent;
    }
    this.doc.nodes = this.doc.nodes.filter((n) => n.id !== id);
    this.selection.delete(id);
  }

  removeLink(id: number): void {
    this.doc.links = this.doc.links.filter((l) => l.id !== id);
    this.selection.delete(id);
  }

  setViewport(cx: number, cy: number, zoom: number): void {
    this.doc.viewport.cx = cx;
    this.doc.viewport.cy = cy;
    this.doc.viewport.zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
  }
}
