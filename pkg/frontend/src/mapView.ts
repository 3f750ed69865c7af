/** Tile-free SVG situation map: task coordinates and the base, no external
 * map API. Scenarios addressed purely by distance matrix have no coordinates,
 * so the map renders only when at least one location is present.
 */

import type { QueuedTask, StateSnapshot } from "./types";

export interface MapPoint {
  id: string;
  x: number;  // SVG coordinates
  y: number;
  priority: number;
  kind: "task" | "base";
}

const SIZE = 480;
const MARGIN = 24;

export function projectPoints(state: StateSnapshot,
                              base?: { lat: number; lon: number }): MapPoint[] {
  const located = state.queue.filter((t: QueuedTask) => t.location);
  const all = [
    ...(base ? [{ id: "base", lat: base.lat, lon: base.lon, priority: 0 }] : []),
    ...located.map(t => ({ id: t.id, lat: t.location!.lat, lon: t.location!.lon,
                           priority: t.priority })),
  ];
  if (all.length === 0) return [];

  const lats = all.map(p => p.lat);
  const lons = all.map(p => p.lon);
  const latSpan = Math.max(Math.max(...lats) - Math.min(...lats), 1e-6);
  const lonSpan = Math.max(Math.max(...lons) - Math.min(...lons), 1e-6);
  const scale = (SIZE - 2 * MARGIN) / Math.max(latSpan, lonSpan);

  return all.map(p => ({
    id: p.id,
    x: MARGIN + (p.lon - Math.min(...lons)) * scale,
    y: SIZE - MARGIN - (p.lat - Math.min(...lats)) * scale,
    priority: p.priority,
    kind: p.id === "base" ? "base" as const : "task" as const,
  }));
}

export function renderMapSvg(points: MapPoint[]): string {
  if (points.length === 0) {
    return `<svg viewBox="0 0 ${SIZE} ${SIZE}"><text x="24" y="40">` +
      `no coordinates in this scenario</text></svg>`;
  }
  const shapes = points.map(p => {
    if (p.kind === "base") {
      return `<rect x="${(p.x - 6).toFixed(1)}" y="${(p.y - 6).toFixed(1)}" ` +
        `width="12" height="12" class="base"><title>base</title></rect>`;
    }
    const r = 4 + p.priority;
    return `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="${r.toFixed(1)}" ` +
      `class="task"><title>${p.id} (priority ${p.priority})</title></circle>`;
  });
  return `<svg viewBox="0 0 ${SIZE} ${SIZE}">${shapes.join("")}</svg>`;
}
