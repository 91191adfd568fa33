import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { AppController } from "../src/app.js";
import type { WorkspaceDoc } from "../src/types.js";
import { dialogMetamodel, emptyWorkspace } from "./fixtures.js";

/** In-memory fake of the server's workspace endpoints. */
function fakeServer(initial: WorkspaceDoc) {
  let stored: WorkspaceDoc = JSON.parse(JSON.stringify(initial));
  stored.version = 1;
  const fetchFn = vi.fn(async (url: string, init?: RequestInit) => {
    if (url.startsWith("/metamodels/")) {
      return new Response(JSON.stringify(dialogMetamodel()), { status: 200 });
    }
    if (url.endsWith("/validate")) {
      return new Response(JSON.stringify({ version: stored.version, violations: [] }));
    }
    if (init?.method === "PUT") {
      const incoming = JSON.parse(String(init.body)) as WorkspaceDoc;
      const expected = Number(
        (init.headers as Record<string, string>)["If-Match"].replace(/"/g, ""),
      );
      if (expected !== stored.version) {
        return new Response(
          JSON.stringify({
            code: "CONFLICT",
            message: `version conflict: save expected ${expected}, store holds ${stored.version}`,
          }),
          { status: 409 },
        );
      }
      stored = { ...incoming, version: expected + 1 };
      return new Response(JSON.stringify({ id: stored.id, version: stored.version }), {
        headers: { ETag: `"${stored.version}"` },
      });
    }
    return new Response(JSON.stringify(stored), {
      headers: { ETag: `"${stored.version}"` },
    });
  });
  return {
    fetchFn,
    outOfBandSave() {
      stored = { ...stored, name: stored.name + "!", version: stored.version + 1 };
    },
    get doc() {
      return stored;
    },
  };
}

function makeApp(server: ReturnType<typeof fakeServer>): AppController {
  return new AppController(new ApiClient("", server.fetchFn as unknown as typeof fetch));
}

describe("AppController", () => {
  it("load -> no edits -> save issues no PUT", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    expect(app.dirty).toBe(false);
    expect(await app.save()).toBe("clean");
    const puts = server.fetchFn.mock.calls.filter(([, i]) => i?.method === "PUT");
    expect(puts).toHaveLength(0);
  });

  it("palette drop places the node at the world point and saves", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    const node = app.paletteDrop("Rule", { x: 400, y: 300 }, 800, 600);
    // screen center at zoom 1 / center (0,0) is world (0,0)
    expect(node.x).toBe(0);
    expect(node.y).toBe(0);
    expect(node.attrs).toEqual({ priority: 0 });
    expect(app.dirty).toBe(true);
    expect(await app.save()).toBe("saved");
    expect(app.version).toBe(2);
    expect(app.dirty).toBe(false);
    expect(server.doc.nodes).toHaveLength(1);
  });

  it("concurrent save raises the conflict dialog state", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    app.paletteDrop("Rule", { x: 0, y: 0 }, 800, 600);
    server.outOfBandSave();
    expect(await app.save()).toBe("conflict");
    expect(app.conflict).toEqual({ expected: 1, stored: 2 });
  });

  it("conflict resolution: discard drops local edits", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    app.paletteDrop("Rule", { x: 0, y: 0 }, 800, 600);
    server.outOfBandSave();
    await app.save();
    expect(await app.resolveConflict("discard")).toBe("clean");
    expect(app.dirty).toBe(false);
    expect(app.state!.doc.nodes).toHaveLength(0);
    expect(app.version).toBe(2);
  });

  it("conflict resolution: replay keeps edits and saves on the new version", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    app.paletteDrop("Rule", { x: 0, y: 0 }, 800, 600);
    server.outOfBandSave();
    await app.save();
    expect(await app.resolveConflict("replay")).toBe("saved");
    expect(app.version).toBe(3);
    expect(server.doc.nodes).toHaveLength(1);
    expect(app.conflict).toBeNull();
  });

  it("network failure keeps the local snapshot for retry", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    app.paletteDrop("Rule", { x: 0, y: 0 }, 800, 600);
    const flaky = server.fetchFn.getMockImplementation()!;
    server.fetchFn.mockImplementationOnce(async () => {
      throw new TypeError("network down");
    });
    await expect(app.save()).rejects.toThrow(/network down/);
    expect(app.dirty).toBe(true); // nothing lost
    server.fetchFn.mockImplementation(flaky);
    expect(await app.save()).toBe("saved");
  });

  it("local validation overlay flags unsaved problems", async () => {
    const server = fakeServer(emptyWorkspace("w"));
    const app = makeApp(server);
    await app.open("w");
    const node = app.paletteDrop("Rule", { x: 0, y: 0 }, 800, 600);
    const violations = await app.refreshViolations();
    expect(violations.some((v) => v.element === node.id && v.code === "MISSING_ATTR")).toBe(true);
    expect(app.violationBadges().get(node.id)).toBe("MISSING_ATTR");
  });
});
