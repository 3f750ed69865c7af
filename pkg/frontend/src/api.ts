/** Thin typed client over the dispatch service HTTP API. */

import type {
  MetricsSnapshot,
  ScheduleSnapshot,
  StateSnapshot,
  WhatIfRequest,
  WhatIfResponse,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export class DispatchApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      // surface the service's validation message verbatim
      throw new ApiError(response.status, body?.detail ?? response.statusText);
    }
    return body as T;
  }

  getSchedule(): Promise<ScheduleSnapshot> {
    return this.request("/schedule");
  }

  getState(): Promise<StateSnapshot> {
    return this.request("/state");
  }

  getMetrics(): Promise<MetricsSnapshot> {
    return this.request("/metrics");
  }

  whatIf(body: WhatIfRequest): Promise<WhatIfResponse> {
    return this.request("/whatif", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  putWeights(weights: StateSnapshot["weights"]): Promise<unknown> {
    return this.request("/config/weights", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(weights),
    });
  }

  overridePriority(taskId: string, priority: number): Promise<unknown> {
    return this.request(`/tasks/${encodeURIComponent(taskId)}/priority-override`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ priority }),
    });
  }

  completeMission(missionId: string, durations: Record<string, number>): Promise<unknown> {
    return this.request(`/missions/${encodeURIComponent(missionId)}/complete`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ durations }),
    });
  }

  dispatchNext(): Promise<unknown> {
    return this.request("/missions/dispatch", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
  }
}
