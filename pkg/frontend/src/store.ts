/** View state and polling: render only confirmed server responses.
 *
 * No optimistic updates: a mutation is reflected only after the follow-up
 * poll returns. On fetch failure the last good snapshot stays visible with a
 * stale-data marker carrying the timestamp of that snapshot.
 */

import type { DispatchApi } from "./api";
import type {
  MetricsSnapshot,
  ScheduleSnapshot,
  StateSnapshot,
  WhatIfResponse,
} from "./types";
import { diffFromResponse, WhatIfDiff } from "./whatif";

export interface ViewState {
  schedule: ScheduleSnapshot | null;
  state: StateSnapshot | null;
  metrics: MetricsSnapshot | null;
  pendingWhatIf: WhatIfDiff | null;
  stale: boolean;
  lastGoodAt: number | null;  // ms epoch of the last successful poll
  lastError: string | null;
}

export type Listener = (view: ViewState) => void;

export class ConsoleStore {
  private view: ViewState = {
    schedule: null,
    state: null,
    metrics: null,
    pendingWhatIf: null,
    stale: false,
    lastGoodAt: null,
    lastError: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: DispatchApi,
              private readonly nowMs: () => number = () => Date.now()) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.view);
    return () => {
      this.listeners = this.listeners.filter(l => l !== listener);
    };
  }

  current(): ViewState {
    return this.view;
  }

  private publish(patch: Partial<ViewState>): void {
    this.view = { ...this.view, ...patch };
    for (const listener of this.listeners) listener(this.view);
  }

  async poll(): Promise<void> {
    try {
      const [schedule, state, metrics] = await Promise.all([
        this.api.getSchedule(),
        this.api.getState(),
        this.api.getMetrics(),
      ]);
      this.publish({ schedule, state, metrics, stale: false,
                     lastGoodAt: this.nowMs(), lastError: null });
    } catch (err) {
      // keep the last good snapshot; just mark it stale
      this.publish({ stale: true, lastError: String(err) });
    }
  }

  startPolling(intervalMs = 2000): () => void {
    void this.poll();
    const handle = setInterval(() => void this.poll(), intervalMs);
    return () => clearInterval(handle);
  }

  async preview(request: Parameters<DispatchApi["whatIf"]>[0]): Promise<WhatIfDiff> {
    const response: WhatIfResponse = await this.api.whatIf(request);
    const diff = diffFromResponse(response);
    this.publish({ pendingWhatIf: diff });
    return diff;
  }

  discardPreview(): void {
    this.publish({ pendingWhatIf: null });
  }
}
