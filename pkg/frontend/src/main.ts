// Browser bootstrap: widgets, event wiring, render loop.

import { ApiClient } from "./api.js";
import { AppController } from "./app.js";
import { drawScene, hitTestNode, screenToWorld, zoomAt } from "./canvas.js";
import type { AttrValue, NodeDoc } from "./types.js";

const api = new ApiClient("");
const app = new AppController(api);

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const paletteEl = document.getElementById("palette")!;
const inspectorEl = document.getElementById("inspector")!;
const statusEl = document.getElementById("status")!;
const saveBtn = document.getElementById("save") as HTMLButtonElement;
const workspaceSelect = document.getElementById("workspace") as HTMLSelectElement;
const conflictEl = document.getElementById("conflict")!;

let armedPaletteType: string | null = null;
let dragging: { node: NodeDoc; dx: number; dy: number } | null = null;
let panning: { startX: number; startY: number; cx: number; cy: number } | null = null;
let linking: { from: NodeDoc; type: string } | null = null;

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  redraw();
}

function redraw(): void {
  if (!app.state) return;
  drawScene(ctx, app.state.doc, app.metamodel, canvas.width, canvas.height, {
    badges: app.violationBadges(),
    selection: app.state.selection,
  });
  const dirty = app.dirty ? " — unsaved changes" : "";
  statusEl.textContent = `${app.state.doc.name} · v${app.version}${dirty}`;
  saveBtn.disabled = !app.dirty;
}

function renderPalette(): void {
  paletteEl.replaceChildren();
  for (const entry of app.metamodel?.palette ?? []) {
    const button = document.createElement("button");
    button.className = "palette-entry";
    button.textContent = entry.label;
    button.style.borderLeftColor = entry.fill;
    button.title = `click, then click the canvas to place a ${entry.type}`;
    button.addEventListener("click", () => {
      armedPaletteType = armedPaletteType === entry.type ? null : entry.type;
      for (const el of Array.from(paletteEl.children)) el.classList.remove("armed");
      if (armedPaletteType) button.classList.add("armed");
    });
    paletteEl.appendChild(button);
  }
}

function attrInput(node: NodeDoc, key: string, kind: string, enumValues: string[] | null) {
  const current = node.attrs[key];
  if (enumValues) {
    const select = document.createElement("select");
    for (const option of ["", ...enumValues]) {
      const opt = document.createElement("option");
      opt.value = option;
      opt.textContent = option || "(unset)";
      if (current === option) opt.selected = true;
      select.appendChild(opt);
    }
    select.addEventListener("change", () => {
      if (select.value) app.state!.setAttr(node.id, key, select.value);
      else app.state!.clearAttr(node.id, key);
      refreshOverlayAndRedraw();
    });
    return select;
  }
  const input = document.createElement("input");
  input.value = current === undefined ? "" : String(current);
  input.addEventListener("change", () => {
    const raw = input.value;
    if (raw === "") {
      app.state!.clearAttr(node.id, key);
    } else {
      let value: AttrValue = raw;
      if (kind === "int" && /^-?\d+$/.test(raw)) value = parseInt(raw, 10);
      else if (kind === "real" && raw !== "" && !Number.isNaN(Number(raw))) value = Number(raw);
      else if (kind === "bool") value = raw === "true";
      app.state!.setAttr(node.id, key, value);
    }
    refreshOverlayAndRedraw();
  });
  return input;
}

function renderInspector(): void {
  inspectorEl.replaceChildren();
  const selected = [...(app.state?.selection ?? [])];
  if (selected.length !== 1) {
    inspectorEl.textContent = selected.length
      ? `${selected.length} elements selected`
      : "nothing selected";
    return;
  }
  const node = app.state!.node(selected[0]);
  if (!node) return;
  const title = document.createElement("h3");
  title.textContent = `${node.type} #${node.id}`;
  inspectorEl.appendChild(title);

  const labelInput = document.createElement("input");
  labelInput.value = node.label;
  labelInput.addEventListener("change", () => {
    app.state!.setLabel(node.id, labelInput.value);
    refreshOverlayAndRedraw();
  });
  inspectorEl.appendChild(fieldRow("label", labelInput));

  const schema = app.metamodel?.node_types[node.type]?.attrs ?? {};
  for (const [key, spec] of Object.entries(schema)) {
    const row = fieldRow(
      spec.required ? `${key} *` : key,
      attrInput(node, key, spec.kind, spec.enum),
    );
    inspectorEl.appendChild(row);
  }

  const del = document.createElement("button");
  del.textContent = "delete node";
  del.className = "danger";
  del.addEventListener("click", () => {
    app.state!.removeNode(node.id);
    renderInspector();
    refreshOverlayAndRedraw();
  });
  inspectorEl.appendChild(del);
}

function fieldRow(label: string, control: HTMLElement): HTMLElement {
  const row = document.createElement("label");
  row.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  row.append(span, control);
  return row;
}

function refreshOverlayAndRedraw(): void {
  void app.refreshViolations().then(redraw).catch(() => redraw());
}

canvas.addEventListener("mousedown", (event) => {
  if (!app.state) return;
  const point = { x: event.offsetX, y: event.offsetY };
  if (armedPaletteType) {
    const node = app.paletteDrop(armedPaletteType, point, canvas.width, canvas.height);
    armedPaletteType = null;
    for (const el of Array.from(paletteEl.children)) el.classList.remove("armed");
    app.state.selection = new Set([node.id]);
    renderInspector();
    refreshOverlayAndRedraw();
    return;
  }
  const world = screenToWorld(point, app.state.doc.viewport, canvas.width, canvas.height);
  const hit = hitTestNode(app.state.doc.nodes, world);
  if (hit && event.shiftKey) {
    const linkType = Object.keys(app.metamodel?.link_types ?? {})[0];
    if (linkType) linking = { from: hit, type: linkType };
    return;
  }
  if (hit) {
    app.state.selection = new Set([hit.id]);
    dragging = { node: hit, dx: world.x - hit.x, dy: world.y - hit.y };
    renderInspector();
  } else {
    app.state.selection = new Set();
    const vp = app.state.doc.viewport;
    panning = { startX: event.offsetX, startY: event.offsetY, cx: vp.cx, cy: vp.cy };
    renderInspector();
  }
  redraw();
});

canvas.addEventListener("mousemove", (event) => {
  if (!app.state) return;
  if (dragging) {
    const world = screenToWorld(
      { x: event.offsetX, y: event.offsetY },
      app.state.doc.viewport, canvas.width, canvas.height,
    );
    app.state.moveNode(dragging.node.id, world.x - dragging.dx, world.y - dragging.dy);
    redraw();
  } else if (panning) {
    const vp = app.state.doc.viewport;
    app.state.setViewport(
      panning.cx - (event.offsetX - panning.startX) / vp.zoom,
      panning.cy - (event.offsetY - panning.startY) / vp.zoom,
      vp.zoom,
    );
    redraw();
  }
});

canvas.addEventListener("mouseup", (event) => {
  if (linking && app.state) {
    const world = screenToWorld(
      { x: event.offsetX, y: event.offsetY },
      app.state.doc.viewport, canvas.width, canvas.height,
    );
    const target = hitTestNode(app.state.doc.nodes, world);
    if (target && target.id !== linking.from.id) {
      app.state.addLink(linking.type, linking.from.id, target.id);
      refreshOverlayAndRedraw();
    }
  }
  dragging = null;
  panning = null;
  linking = null;
  redraw();
});

canvas.addEventListener("wheel", (event) => {
  if (!app.state) return;
  event.preventDefault();
  const vp = app.state.doc.viewport;
  const next = zoomAt(
    vp, event.deltaY < 0 ? 1.1 : 1 / 1.1,
    { x: event.offsetX, y: event.offsetY },
    canvas.width, canvas.height,
  );
  app.state.setViewport(next.cx, next.cy, next.zoom);
  redraw();
}, { passive: false });

saveBtn.addEventListener("click", async () => {
  const outcome = await app.save();
  if (outcome === "conflict") showConflict();
  refreshOverlayAndRedraw();
});

function showConflict(): void {
  conflictEl.classList.remove("hidden");
  const detail = conflictEl.querySelector(".detail")!;
  detail.textContent =
    `Someone else saved this workspace (your version ${app.conflict?.expected}, ` +
    `server has ${app.conflict?.stored}).`;
}

conflictEl.querySelector("#conflict-discard")!.addEventListener("click", async () => {
  conflictEl.classList.add("hidden");
  await app.resolveConflict("discard");
  renderPalette();
  renderInspector();
  refreshOverlayAndRedraw();
});

conflictEl.querySelector("#conflict-replay")!.addEventListener("click", async () => {
  conflictEl.classList.add("hidden");
  const outcome = await app.resolveConflict("replay");
  if (outcome === "conflict") showConflict();
  refreshOverlayAndRedraw();
});

workspaceSelect.addEventListener("change", async () => {
  if (workspaceSelect.value) {
    await app.open(workspaceSelect.value);
    renderPalette();
    renderInspector();
    refreshOverlayAndRedraw();
  }
});

async function boot(): Promise<void> {
  const summaries = await api.listWorkspaces();
  workspaceSelect.replaceChildren();
  for (const summary of summaries.filter((s) => !s.corrupt)) {
    const option = document.createElement("option");
    option.value = summary.id;
    option.textContent = `${summary.name} (${summary.id})`;
    workspaceSelect.appendChild(option);
  }
  const requested = new URLSearchParams(location.search).get("ws");
  const first = requested ?? summaries.find((s) => !s.corrupt)?.id;
  if (first) {
    workspaceSelect.value = first;
    await app.open(first);
    renderPalette();
    renderInspector();
    refreshOverlayAndRedraw();
  } else {
    statusEl.textContent = "no workspaces in this store yet";
  }
}

window.addEventListener("resize", resize);
resize();
void boot();
