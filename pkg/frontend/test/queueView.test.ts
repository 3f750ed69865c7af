import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { formatMinutes, renderQueue } from "../src/queueView";
import type { ScheduleSnapshot } from "../src/types";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(join(__dirname, "..", "fixtures", name), "utf-8")) as T;
}

const snapshot = fixture<ScheduleSnapshot>("portarthur_schedule.json");

describe("renderQueue", () => {
  it("keeps exactly the service's row order on the reference snapshot", () => {
    const rows = renderQueue(snapshot);
    expect(rows.map(r => r.taskId)).toEqual(snapshot.rows.map(r => r.task_id));
    // the reference dispatch order of the two-unit scenario
    expect(rows.map(r => r.taskId)).toEqual(
      ["t1", "t3", "t2", "t4", "t7", "t8", "t10", "t9", "t6", "t5"]);
  });

  it("copies every number verbatim from the service response", () => {
    const rows = renderQueue(snapshot);
    rows.forEach((row, i) => {
      const source = snapshot.rows[i]!;
      expect(row.waiting).toBe(source.waiting);
      expect(row.burst).toBe(source.burst);
      expect(row.turnaround).toBe(source.turnaround);
      expect(row.routeMiles).toBe(source.route_distance);
      expect(row.routeMinutes).toBe(source.route_duration);
      expect(row.unit).toBe(source.unit);
      expect(row.position).toBe(i + 1);
    });
  });

  it("renders start times as HH:MM without re-deriving them", () => {
    const rows = renderQueue(snapshot);
    expect(rows[0]!.start).toBe(formatMinutes(snapshot.rows[0]!.start_minutes));
    expect(rows[0]!.start).toBe("14:00");
  });

  it("renders an empty snapshot as an empty list", () => {
    const empty: ScheduleSnapshot = {
      ...snapshot, rows: [], missions: [], unschedulable: [],
    };
    expect(renderQueue(empty)).toEqual([]);
  });

  it("is deterministic across repeated renders of the same snapshot", () => {
    expect(renderQueue(snapshot)).toEqual(renderQueue(snapshot));
  });
});

describe("formatMinutes", () => {
  it("formats minutes since the scenario epoch", () => {
    expect(formatMinutes(840)).toBe("14:00");
    expect(formatMinutes(909)).toBe("15:09");
    expect(formatMinutes(25 * 60 + 5)).toBe("25:05");
  });
});
