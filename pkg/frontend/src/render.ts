/** Canvas painters for the two panels.
 *
 * First-person: the server's semantic/depth raster, one filled cell per ray —
 * hue by label, brightness by depth. Top-down: room rectangles, door gaps,
 * object footprints, and the agent arrow, all read straight from a world
 * document. Both painters draw onto a minimal context interface so tests can
 * substitute a recording fake for a real CanvasRenderingContext2D.
 */

import type { HouseDoc, RasterDoc, StateDoc, WorldDoc } from "./protocol.js";

/** The subset of CanvasRenderingContext2D the painters use. The style
 * properties accept the full canvas union so a real context satisfies the
 * interface; the painters only ever assign strings. */
export interface PaintContext {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
}

const WALL_HSL: [number, number, number] = [0, 0, 55];
const FLOOR_HSL: [number, number, number] = [30, 25, 40];
const EMPTY_HSL: [number, number, number] = [210, 40, 70];

/** Stable hue for an instance label so an object keeps its color as it moves. */
export function hueForLabel(label: string): number {
  let h = 2166136261;
  for (let i = 0; i < label.length; i++) {
    h = Math.imul(h ^ label.charCodeAt(i), 16777619);
  }
  return ((h >>> 0) % 360 + 360) % 360;
}

export function baseColor(label: string): [number, number, number] {
  if (label === "WALL") return WALL_HSL;
  if (label === "FLOOR") return FLOOR_HSL;
  if (label === "EMPTY") return EMPTY_HSL;
  return [hueForLabel(label), 65, 50];
}

/** Brightness factor for a depth reading: near rays paint bright, far dim.
 * Clamped away from zero so distant geometry stays visible. */
export function depthFactor(depth: number, far: number): number {
  if (!(far > 0)) return 1;
  const f = 1 - Math.min(Math.max(depth / far, 0), 1);
  return 0.2 + 0.8 * f;
}

export function cellColor(label: string, depth: number, far: number): string {
  const [h, s, l] = baseColor(label);
  const lit = Math.round(l * depthFactor(depth, far));
  return `hsl(${h}, ${s}%, ${lit}%)`;
}

/** Paint the semantic raster into a width x height pixel viewport. */
export function drawFirstPerson(
  ctx: PaintContext,
  raster: RasterDoc,
  viewWidth: number,
  viewHeight: number,
  far = 20,
): void {
  const cw = viewWidth / raster.width;
  const ch = viewHeight / raster.height;
  for (let r = 0; r < raster.height; r++) {
    for (let c = 0; c < raster.width; c++) {
      ctx.fillStyle = cellColor(raster.labels[r][c], raster.depth[r][c], far);
      // overlap by a fraction of a pixel to avoid seams from rounding
      ctx.fillRect(c * cw, r * ch, cw + 0.5, ch + 0.5);
    }
  }
}

export interface MapTransform {
  sx(x: number): number;
  sz(z: number): number;
  scale: number;
}

/** Fit the house's bounding rectangle into the viewport with a margin. */
export function mapTransform(
  house: HouseDoc,
  viewWidth: number,
  viewHeight: number,
  margin = 10,
): MapTransform {
  let x0 = Infinity,
    z0 = Infinity,
    x1 = -Infinity,
    z1 = -Infinity;
  for (const room of house.rooms) {
    const [rx0, rz0, rx1, rz1] = room.floor_rect;
    x0 = Math.min(x0, rx0);
    z0 = Math.min(z0, rz0);
    x1 = Math.max(x1, rx1);
    z1 = Math.max(z1, rz1);
  }
  const scale = Math.min(
    (viewWidth - 2 * margin) / Math.max(x1 - x0, 1e-9),
    (viewHeight - 2 * margin) / Math.max(z1 - z0, 1e-9),
  );
  return {
    scale,
    sx: (x: number) => margin + (x - x0) * scale,
    // z grows away from the viewer; draw it upward so north is up
    sz: (z: number) => viewHeight - margin - (z - z0) * scale,
  };
}

/** Paint rooms, doors, object footprints, and the agent arrow. */
export function drawTopDown(
  ctx: PaintContext,
  world: Pick<WorldDoc, "house"> & StateDoc,
  viewWidth: number,
  viewHeight: number,
): void {
  const t = mapTransform(world.house, viewWidth, viewHeight);
  ctx.fillStyle = "hsl(210, 15%, 12%)";
  ctx.fillRect(0, 0, viewWidth, viewHeight);

  for (const room of world.house.rooms) {
    const [x0, z0, x1, z1] = room.floor_rect;
    ctx.fillStyle = "hsl(30, 15%, 25%)";
    ctx.fillRect(t.sx(x0), t.sz(z1), (x1 - x0) * t.scale, (z1 - z0) * t.scale);
    ctx.strokeStyle = "hsl(0, 0%, 70%)";
    ctx.lineWidth = 2;
    ctx.strokeRect(t.sx(x0), t.sz(z1), (x1 - x0) * t.scale, (z1 - z0) * t.scale);
  }

  ctx.strokeStyle = "hsl(45, 90%, 60%)";
  ctx.lineWidth = 3;
  for (const door of world.house.doors) {
    const [ax, az] = door.anchor;
    const half = door.width / 2;
    // the anchor sits on the shared wall; draw the gap along its long side
    const vertical = world.house.rooms.some((r) => {
      const [x0, , x1] = [r.floor_rect[0], 0, r.floor_rect[2]];
      return Math.abs(ax - x0) < 1e-9 || Math.abs(ax - x1) < 1e-9;
    });
    ctx.beginPath();
    if (vertical) {
      ctx.moveTo(t.sx(ax), t.sz(az - half));
      ctx.lineTo(t.sx(ax), t.sz(az + half));
    } else {
      ctx.moveTo(t.sx(ax - half), t.sz(az));
      ctx.lineTo(t.sx(ax + half), t.sz(az));
    }
    ctx.stroke();
  }

  const halves = new Map<string, number[]>();
  for (const type of world.house.type_catalog) {
    halves.set(type.type_id, type.half_extents);
  }
  for (const obj of world.objects) {
    const loc = obj.location as { kind?: string; x?: number; z?: number };
    if (typeof loc.x !== "number" || typeof loc.z !== "number") continue;
    const he = halves.get(obj.type) ?? [0.1, 0.1, 0.1];
    const [hx, , hz] = he;
    ctx.fillStyle = `hsl(${hueForLabel(obj.instance_id)}, 65%, 55%)`;
    ctx.fillRect(
      t.sx(loc.x - hx),
      t.sz(loc.z + hz),
      2 * hx * t.scale,
      2 * hz * t.scale,
    );
  }

  const a = world.agent;
  const yawRad = (a.yaw * Math.PI) / 180;
  const ax = t.sx(a.x);
  const az = t.sz(a.z);
  const r = Math.max(4, 0.25 * t.scale);
  ctx.fillStyle = "hsl(140, 80%, 55%)";
  ctx.fillRect(ax - r / 2, az - r / 2, r, r);
  ctx.strokeStyle = "hsl(140, 80%, 70%)";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(ax, az);
  // yaw 0 faces +Z, increasing clockwise when viewed from above
  ctx.lineTo(ax + Math.sin(yawRad) * 2 * r, az - Math.cos(yawRad) * 2 * r);
  ctx.stroke();
}
