// Infinite-canvas geometry and scene rendering.
//
// The viewport maps world coordinates (node positions in the document) to
// screen pixels: screen = (world - center) * zoom + screenCenter. Pure
// geometry lives in exported functions so it can be tested headlessly.

import type { LinkStyleDoc, MetamodelDoc, NodeDoc, WorkspaceDoc } from "./types.js";

export interface Viewport {
  cx: number;
  cy: number;
  zoom: number;
}

export interface Point {
  x: number;
  y: number;
}

export function worldToScreen(p: Point, vp: Viewport, width: number, height: number): Point {
  return {
    x: (p.x - vp.cx) * vp.zoom + width / 2,
    y: (p.y - vp.cy) * vp.zoom + height / 2,
  };
}

export function screenToWorld(p: Point, vp: Viewport, width: number, height: number): Point {
  return {
    x: (p.x - width / 2) / vp.zoom + vp.cx,
    y: (p.y - height / 2) / vp.zoom + vp.cy,
  };
}

/** Zoom keeping the world point under the cursor fixed on screen. */
export function zoomAt(
  vp: Viewport,
  factor: number,
  cursor: Point,
  width: number,
  height: number,
): Viewport {
  const zoom = Math.min(40, Math.max(0.05, vp.zoom * factor));
  const anchor = screenToWorld(cursor, vp, width, height);
  // solve for the new center so anchor stays under the cursor
  return {
    cx: anchor.x - (cursor.x - width / 2) / zoom,
    cy: anchor.y - (cursor.y - height / 2) / zoom,
    zoom,
  };
}

/** Topmost node whose box contains the world point; later nodes win. */
export function hitTestNode(nodes: NodeDoc[], world: Point): NodeDoc | null {
  for (let i = nodes.length - 1; i >= 0; i--) {
    const n = nodes[i];
    if (
      world.x >= n.x && world.x <= n.x + n.w &&
      world.y >= n.y && world.y <= n.y + n.h
    ) {
      return n;
    }
  }
  return null;
}

export function nodeCenter(n: NodeDoc): Point {
  return { x: n.x + n.w / 2, y: n.y + n.h / 2 };
}

/** Style for one drawn link: exact (from,to) pair mapping wins, else the
 * link type's default. */
export function linkStyle(
  mm: MetamodelDoc | null,
  linkType: string,
  fromType: string,
  toType: string,
): LinkStyleDoc {
  const fallback: LinkStyleDoc = { stroke: "solid", head: "arrow", color: "#444444" };
  if (!mm) return fallback;
  for (const row of mm.styles) {
    if (row.from === fromType && row.to === toType) {
      return { stroke: row.stroke, head: row.head, color: row.color };
    }
  }
  return mm.link_types[linkType]?.style ?? fallback;
}

const FALLBACK_FILL = "#f3d6d6";
const COMMENT_FILL = "#e5e5e5";
const DASH: Record<string, number[]> = { solid: [], dashed: [8, 5], dotted: [2, 4] };

export interface SceneOptions {
  badges?: Map<number, string>; // element id -> short badge text (violations)
  selection?: Set<number>;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  ws: WorkspaceDoc,
  mm: MetamodelDoc | null,
  width: number,
  height: number,
  options: SceneOptions = {},
): void {
  const vp = ws.viewport;
  const byId = new Map(ws.nodes.map((n) => [n.id, n]));
  ctx.clearRect(0, 0, width, height);
  drawGrid(ctx, vp, width, height);

  for (const link of ws.links) {
    const from = byId.get(link.from);
    const to = byId.get(link.to);
    if (!from || !to) continue;
    const style = linkStyle(mm, link.type, from.type, to.type);
    const a = worldToScreen(nodeCenter(from), vp, width, height);
    const b = worldToScreen(nodeCenter(to), vp, width, height);
    ctx.strokeStyle = style.color;
    ctx.lineWidth = options.selection?.has(link.id) ? 3 : 1.5;
    ctx.setLineDash(DASH[style.stroke] ?? []);
    ctx.beginPath();
    if (link.from === link.to) {
      ctx.arc(a.x + 24, a.y - 24, 18, 0, Math.PI * 2);
    } else {
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
    }
    ctx.stroke();
    ctx.setLineDash([]);
    if (link.from !== link.to) drawHead(ctx, a, b, style);
  }

  for (const node of ws.nodes) {
    const typeDef = mm?.node_types[node.type];
    const topLeft = worldToScreen(node, vp, width, height);
    const w = node.w * vp.zoom;
    const h = node.h * vp.zoom;
    const isComment = node.type.toLowerCase() === "comment";
    ctx.fillStyle = typeDef ? (isComment ? COMMENT_FILL : typeDef.fill) : FALLBACK_FILL;
    ctx.strokeStyle = options.selection?.has(node.id) ? "#1a73e8" : "#333333";
    ctx.lineWidth = options.selection?.has(node.id) ? 2.5 : 1;
    if (typeDef?.shape === "ellipse") {
      ctx.beginPath();
      ctx.ellipse(topLeft.x + w / 2, topLeft.y + h / 2, w / 2, h / 2, 0, 0, Math.PI * 2);
      ctx.fill();
      ctx.stroke();
    } else if (typeDef?.shape === "diamond") {
      ctx.beginPath();
      ctx.moveTo(topLeft.x + w / 2, topLeft.y);
      ctx.lineTo(topLeft.x + w, topLeft.y + h / 2);
      ctx.lineTo(topLeft.x + w / 2, topLeft.y + h);
      ctx.lineTo(topLeft.x, topLeft.y + h / 2);
      ctx.closePath();
      ctx.fill();
      ctx.stroke();
    } else {
      ctx.fillRect(topLeft.x, topLeft.y, w, h);
      ctx.strokeRect(topLeft.x, topLeft.y, w, h);
    }
    ctx.fillStyle = "#111111";
    ctx.font = `${Math.max(9, 12 * Math.min(vp.zoom, 1.6))}px sans-serif`;
    ctx.fillText(`${node.id} ${node.label}`, topLeft.x + 6, topLeft.y + 16, w - 12);
    const shown = typeDef?.show ?? [];
    shown.forEach((key, i) => {
      const value = node.attrs[key];
      if (value !== undefined) {
        ctx.fillText(`${key}: ${String(value)}`, topLeft.x + 6, topLeft.y + 32 + i * 14, w - 12);
      }
    });
    const badge = options.badges?.get(node.id) ?? (typeDef ? null : "?");
    if (badge) {
      ctx.fillStyle = "#c62828";
      ctx.beginPath();
      ctx.arc(topLeft.x + w - 4, topLeft.y + 4, 8, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillStyle = "#ffffff";
      ctx.fillText(badge.slice(0, 1), topLeft.x + w - 7, topLeft.y + 8);
    }
  }
}

function drawGrid(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  width: number,
  height: number,
): void {
  const spacing = 96 * vp.zoom;
  if (spacing < 12) return;
  const origin = worldToScreen({ x: 0, y: 0 }, vp, width, height);
  ctx.strokeStyle = "#ececec";
  ctx.lineWidth = 1;
  for (let x = origin.x % spacing; x < width; x += spacing) {
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, height);
    ctx.stroke();
  }
  for (let y = origin.y % spacing; y < height; y += spacing) {
    ctx.beginPath();
    ctx.moveTo(0, y);
    ctx.lineTo(width, y);
    ctx.stroke();
  }
}

function drawHead(
  ctx: CanvasRenderingContext2D,
  a: Point,
  b: Point,
  style: LinkStyleDoc,
): void {
  if (style.head === "none") return;
  const angle = Math.atan2(b.y - a.y, b.x - a.x);
  const size = 9;
  ctx.fillStyle = style.color;
  ctx.beginPath();
  if (style.head === "diamond") {
    ctx.moveTo(b.x, b.y);
    ctx.lineTo(b.x - size * Math.cos(angle - 0.6), b.y - size * Math.sin(angle - 0.6));
    ctx.lineTo(b.x - 1.6 * size * Math.cos(angle), b.y - 1.6 * size * Math.sin(angle));
    ctx.lineTo(b.x - size * Math.cos(angle + 0.6), b.y - size * Math.sin(angle + 0.6));
  } else {
    ctx.moveTo(b.x, b.y);
    ctx.lineTo(b.x - size * Math.cos(angle - 0.4), b.y - size * Math.sin(angle - 0.4));
    ctx.lineTo(b.x - size * Math.cos(angle + 0.4), b.y - size * Math.sin(angle + 0.4));
  }
  ctx.closePath();
  ctx.fill();
}
