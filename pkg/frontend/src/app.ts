// Editor controller: ties the API client to local editor state.
//
// Deliberately DOM-free so the save/conflict flow is testable headlessly;
// main.ts owns the actual widgets.

import { ApiClient, ConflictError } from "./api.js";
import { screenToWorld } from "./canvas.js";
import { EditorState } from "./model.js";
import { validateLocal } from "./validate.js";
import type { MetamodelDoc, NodeDoc, Violation } from "./types.js";

export type SaveOutcome = "saved" | "clean" | "conflict";
export type ConflictChoice = "discard" | "replay";

export interface ConflictInfo {
  expected: number;
  stored: number;
}

export class AppController {
  state: EditorState | null = null;
  version = 0;
  metamodel: MetamodelDoc | null = null;
  violations: Violation[] = [];
  /** Non-null while the conflict dialog should be visible. */
  conflict: ConflictInfo | null = null;

  constructor(private api: ApiClient) {}

  get dirty(): boolean {
    return this.state?.dirty ?? false;
  }

  async open(workspaceId: string): Promise<void> {
    const { doc, version } = await this.api.loadWorkspace(workspaceId);
    this.state = new EditorState(doc);
    this.version = version;
    this.conflict = null;
    this.violations = [];
    this.metamodel = await this.api.getMetamodel(doc.metamodel).catch(() => null);
  }

  /** Palette drop at a screen point: local add, no server round trip. */
  paletteDrop(
    type: string,
    screenPoint: { x: number; y: number },
    width: number,
    height: number,
  ): NodeDoc {
    if (!this.state) throw new Error("no workspace loaded");
    const world = screenToWorld(screenPoint, this.state.doc.viewport, width, height);
    return this.state.addNode(type, world, this.metamodel ?? undefined);
  }

  /** PUT with If-Match; a clean document never issues a request. */
  async save(): Promise<SaveOutcome> {
    if (!this.state) throw new Error("no workspace loaded");
    if (!this.state.dirty) return "clean";
    try {
      const version = await this.api.saveWorkspace(this.state.doc, this.version);
      this.version = version;
      this.state.markClean(version);
      return "saved";
    } catch (err) {
      if (err instanceof ConflictError) {
        this.conflict = { expected: this.version, stored: err.stored };
        return "conflict";
      }
      throw err; // network failures keep the local snapshot; caller retries
    }
  }

  /** Resolve the 409 dialog: drop local edits, or replay them onto the
   * stored version and save again. */
  async resolveConflict(choice: ConflictChoice): Promise<SaveOutcome> {
    if (!this.state || !this.conflict) throw new Error("no conflict pending");
    const stored = this.conflict.stored;
    this.conflict = null;
    if (choice === "discard") {
      await this.open(this.state.doc.id);
      return "clean";
    }
    // replay: keep the local document, adopt the stored version token and
    // make sure locally minted ids cannot collide with the server copy
    const { doc } = await this.api.loadWorkspace(this.state.doc.id);
    this.state.doc.next_id = Math.max(this.state.doc.next_id, doc.next_id);
    this.version = stored;
    return this.save();
  }

  /** Overlay source: local checks while editing (they see unsaved nodes);
   * the server's verdict when the document is clean. */
  async refreshViolations(): Promise<Violation[]> {
    if (!this.state) return [];
    if (this.state.dirty && this.metamodel) {
      this.violations = validateLocal(this.state.doc, this.metamodel);
    } else {
      this.violations = await this.api.validateWorkspace(this.state.doc.id);
    }
    return this.violations;
  }

  /** element id -> violation code, for canvas badges. */
  violationBadges(): Map<number, string> {
    const badges = new Map<number, string>();
    for (const v of this.violations) {
      if (!badges.has(v.element)) badges.set(v.element, v.code);
    }
    return badges;
  }
}
