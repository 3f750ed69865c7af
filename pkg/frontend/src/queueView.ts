/** Queue rendering: turns a served schedule snapshot into ordered row views.
 *
 * The display order is exactly the service's row order; the console adds
 * presentation (HH:MM formatting, mission grouping) and nothing else.
 */

import type { ScheduleRow, ScheduleSnapshot } from "./types";

export interface QueueRowView {
  position: number;       // 1-based display position == service row index + 1
  taskId: string;
  unit: string;
  start: string;          // HH:MM
  routeMiles: number;
  routeMinutes: number;
  waiting: number;
  burst: number;
  turnaround: number;
}

export function formatMinutes(total: number): string {
  const hours = Math.floor(total / 60);
  const minutes = total % 60;
  return `${String(hours).padStart(2, "0")}:${String(minutes).padStart(2, "0")}`;
}

export function renderQueue(snapshot: ScheduleSnapshot): QueueRowView[] {
  return snapshot.rows.map((row: ScheduleRow, index: number) => ({
    position: index + 1,
    taskId: row.task_id,
    unit: row.unit,
    start: formatMinutes(row.start_minutes),
    routeMiles: row.route_distance,
    routeMinutes: row.route_duration,
    waiting: row.waiting,
    burst: row.burst,
    turnaround: row.turnaround,
  }));
}

export function renderQueueTable(container: HTMLElement, rows: QueueRowView[]): void {
  const table = document.createElement("table");
  table.className = "queue";
  const head = table.createTHead().insertRow();
  for (const title of ["#", "task", "unit", "start", "route mi", "route min",
                       "waiting", "burst", "turnaround"]) {
    const cell = document.createElement("th");
    cell.textContent = title;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    tr.dataset.taskId = row.taskId;
    for (const value of [row.position, row.taskId, row.unit, row.start,
                         row.routeMiles.toFixed(1), row.routeMinutes,
                         row.waiting, row.burst, row.turnaround]) {
      tr.insertCell().textContent = String(value);
    }
  }
  container.replaceChildren(table);
}
