/** Wire types of the dispatch service responses the console consumes.
 *
 * The console never computes schedules, waits, or priorities itself; every
 * number rendered comes verbatim from one of these payloads.
 */

export interface ScheduleRow {
  task_id: string;
  unit: string;
  start_minutes: number;
  route_distance: number;
  route_duration: number;
  waiting: number;
  burst: number;
  turnaround: number;
}

export interface PlannedMission {
  mission_id: string;
  unit_id: string;
  task_ids: string[];
  depart: number;
  return_base: number;
  available_after: number;
}

export interface ScheduleSummary {
  mean_wait_min: number;
  max_wait_min: number;
  mean_turnaround_min: number;
}

export interface ScheduleSnapshot {
  format: string;
  now: number;
  rows: ScheduleRow[];
  missions: PlannedMission[];
  unschedulable: string[];
  summary: ScheduleSummary;
}

export interface QueuedTask {
  id: string;
  arrival: number;
  priority: number;
  burst?: number;
  labels: Record<string, number>;
  env: Record<string, number>;
  location?: { lat: number; lon: number };
}

export interface UnitInfo {
  id: string;
  capabilities: string[];
  capacity: number;
  available_at: number;
}

export interface StateSnapshot {
  seq: number;
  now: number;
  weights: {
    labels: Record<string, number>;
    env: Record<string, number>;
    base_priority: number;
    max_priority: number;
  };
  high_priority_threshold: number;
  queue: QueuedTask[];
  units: UnitInfo[];
  active_missions: { mission_id: string; unit_id: string; task_ids: string[] }[];
}

export interface MetricsSnapshot {
  format: string;
  completed: number;
  mean_wait_min: number;
  mean_turnaround_min: number;
  awt_series: number[];
}

export interface WhatIfDelta {
  mean_wait_min: number;
  mean_turnaround_min: number;
  order_changed: boolean;
}

export interface WhatIfResponse {
  format: string;
  before: ScheduleSnapshot;
  after: ScheduleSnapshot;
  delta: WhatIfDelta;
}

export interface WhatIfRequest {
  weights_scale?: number;
  weights?: StateSnapshot["weights"];
  priority_overrides?: Record<string, number>;
  extra_units?: { id: string; available_at?: number; capacity?: number }[];
}
