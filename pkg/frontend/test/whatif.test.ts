import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import type { WhatIfResponse } from "../src/types";
import {
  diffFromResponse,
  diffSchedules,
  extraUnitsRequest,
  overrideRequest,
  scaleWeightsRequest,
} from "../src/whatif";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(join(__dirname, "..", "fixtures", name), "utf-8")) as T;
}

describe("request builders", () => {
  it("builds a pure scale request", () => {
    expect(scaleWeightsRequest(2.0)).toEqual({ weights_scale: 2.0 });
  });

  it("builds extra-unit requests with distinct ids", () => {
    const req = extraUnitsRequest(2, 840);
    expect(req.extra_units).toHaveLength(2);
    expect(new Set(req.extra_units!.map(u => u.id)).size).toBe(2);
  });

  it("builds override requests", () => {
    expect(overrideRequest("t5", 10)).toEqual({ priority_overrides: { t5: 10 } });
  });
});

describe("weight doubling preview (service fixture)", () => {
  const response = fixture<WhatIfResponse>("portarthur_whatif_double.json");

  it("the service reports an unchanged dispatch order", () => {
    expect(response.delta.order_changed).toBe(false);
  });

  it("the diff model shows identical before/after order", () => {
    const diff = diffFromResponse(response);
    expect(diff.orderChanged).toBe(false);
    expect(diff.orderAfter).toEqual(diff.orderBefore);
    expect(diff.meanWaitDelta).toBe(0);
  });
});

describe("extra-unit preview (service fixture)", () => {
  const response = fixture<WhatIfResponse>("portarthur_whatif_extra_unit.json");

  it("previews a waiting-time reduction toward the larger-fleet figure", () => {
    const diff = diffFromResponse(response);
    expect(diff.meanWaitDelta).toBeLessThan(0);
    expect(response.after.summary.mean_wait_min)
      .toBeLessThan(response.before.summary.mean_wait_min);
  });

  it("per-task deltas come straight from the two served schedules", () => {
    const diff = diffFromResponse(response);
    for (const delta of diff.perTask) {
      const before = response.before.rows.find(r => r.task_id === delta.taskId);
      const after = response.after.rows.find(r => r.task_id === delta.taskId);
      expect(delta.waitingBefore).toBe(before ? before.waiting : null);
      expect(delta.waitingAfter).toBe(after ? after.waiting : null);
    }
  });
});

describe("diffSchedules", () => {
  const response = fixture<WhatIfResponse>("portarthur_whatif_double.json");

  it("no edits produce an empty diff", () => {
    const diff = diffSchedules(response.before, response.before);
    expect(diff.empty).toBe(true);
    expect(diff.orderChanged).toBe(false);
    expect(diff.meanWaitDelta).toBe(0);
  });

  it("flags reordering", () => {
    const reversed = { ...response.before,
                       rows: [...response.before.rows].reverse() };
    const diff = diffSchedules(response.before, reversed);
    expect(diff.orderChanged).toBe(true);
  });
});
