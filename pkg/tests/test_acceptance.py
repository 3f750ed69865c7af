"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).
"""

import json
import random
import time
from contextlib import contextmanager

from fastapi.testclient import TestClient

from conftest import data_path, random_scenario
from rescuedispatch.bursttime import BurstPredictor
from rescuedispatch.core import (
    DistanceModel,
    LabelVector,
    LABEL_NAMES,
    WeightConfig,
    parse_hhmm,
)
from rescuedispatch.priority import score
from rescuedispatch.sched import schedule_fcfs, schedule_hybrid, schedule_priority
from rescuedispatch.service import SimClock, create_app
from rescuedispatch.sim import load_bench_spec, replay
from rescuedispatch.textpipe import (
    TrainConfig,
    evaluate,
    featurize,
    head_gradient,
    head_loss,
    train,
)


@contextmanager
def criterion(name):
    started = time.monotonic()
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name} ({time.monotonic() - started:.2f}s)")


# Rescue schedule of the worked two-unit dispatch, used row by row:
# (task, start, route_miles, route_min, waiting, turnaround, unit)
EXPECTED_TWO_UNIT_ROWS = [
    ("t1", "14:00", 5.1, 15, 122, 176, "unit-1"),
    ("t3", "15:09", 2.0, 6, 137, 191, "unit-1"),
    ("t2", "16:09", 2.2, 7, 211, 265, "unit-1"),
    ("t4", "14:07", 7.0, 21, 21, 75, "unit-2"),
    ("t7", "16:13", 1.9, 6, 9, 79, "unit-2"),
    ("t8", "17:55", 7.7, 23, 86, 116, "unit-1"),
    ("t10", "18:05", 2.0, 6, 6, 51, "unit-2"),
    ("t9", "19:32", 1.8, 6, 128, 163, "unit-2"),
    ("t6", "19:41", 4.5, 14, 272, 347, "unit-1"),
    ("t5", "20:49", 3.9, 12, 375, 429, "unit-2"),
]


def test_priority_reproduction():
    with criterion("priority scores 7, 2, 5, 5, 1 reproduced exactly"):
        weights = WeightConfig.default()
        cases = [
            (LabelVector(flood=1, water_needed=1, injured=1),
             {"road_damaged": 1, "forecast_storm": 1}, 7.0),
            (LabelVector(flood=1), {"forecast_storm": 1}, 2.0),
            (LabelVector(water_needed=1, dcew=1),
             {"road_damaged": 1, "forecast_flood": 1}, 5.0),
            (LabelVector(flood=1, injured=1), {"road_damaged": 1}, 5.0),
            (LabelVector(), {"storm": 1}, 1.0),
        ]
        for labels, env, expected in cases:
            assert score(labels, env, weights) == expected


def test_port_arthur_replay_two_units(portarthur):
    with criterion("two-unit replay matches the reference dispatch table"):
        started = time.monotonic()
        run = replay(portarthur, "hybrid", unit_count=2)
        elapsed = time.monotonic() - started
        entries = run.schedule.entries

        by_unit = {}
        for e in entries:
            by_unit.setdefault(e.unit_id, []).append(e.task_id)
        assert by_unit["unit-1"] == ["t1", "t3", "t2", "t8", "t6"]
        assert by_unit["unit-2"] == ["t4", "t7", "t10", "t9", "t5"]

        by_id = {e.task_id: e for e in entries}
        for task_id, start, _, _, waiting, turnaround, unit in EXPECTED_TWO_UNIT_ROWS:
            entry = by_id[task_id]
            assert entry.unit_id == unit
            assert abs(entry.start_time - parse_hhmm(start)) <= 2, task_id
            assert abs(entry.waiting_time - waiting) <= 2, task_id
            assert abs(entry.turnaround_time - turnaround) <= 2, task_id

        # entry arithmetic identities hold across the whole replay
        from test_sched import check_schedule_invariants
        check_schedule_invariants(run.schedule, list(portarthur.tasks),
                                  list(portarthur.units_for(2)))

        assert abs(run.metrics.mean_waiting - 137) <= 3
        assert abs(run.metrics.mean_turnaround - 189) <= 3
        assert elapsed < 1.0


def test_port_arthur_replay_four_units(portarthur):
    with criterion("four-unit replay lands near 49 / 102 minutes"):
        run = replay(portarthur, "hybrid", unit_count=4)
        assert abs(run.metrics.mean_waiting - 49) <= 5
        assert abs(run.metrics.mean_turnaround - 102) <= 5


def test_policy_comparison_direction():
    with criterion("hybrid beats fcfs and priority per seed; more units never hurt"):
        started = time.monotonic()
        spec, seeds, policies, unit_counts = load_bench_spec(
            data_path("bench_clustered.json"))
        assert len(seeds) >= 3 and set(unit_counts) == {10, 20}
        from rescuedispatch.sim import generate_scenario
        for seed in seeds:
            scenario = generate_scenario(spec, seed)
            mean_wt = {}
            for policy in ("fcfs", "priority", "hybrid"):
                for units in (10, 20):
                    run = replay(scenario, policy, unit_count=units)
                    mean_wt[(policy, units)] = run.metrics.mean_avg_wt
            for units in (10, 20):
                assert mean_wt[("hybrid", units)] <= mean_wt[("fcfs", units)], seed
                assert mean_wt[("hybrid", units)] <= mean_wt[("priority", units)], seed
            for policy in ("fcfs", "priority", "hybrid"):
                assert mean_wt[(policy, 20)] <= mean_wt[(policy, 10)], seed
        assert time.monotonic() - started < 30.0


def test_burst_predictor_thousand_step_oracle():
    with criterion("exponential-average estimate tracks the loop oracle to 1e-9"):
        rng = random.Random(2024)
        alpha = rng.random()
        predictor = BurstPredictor(54, alpha=alpha)
        oracle = 54.0
        lo = hi = 54.0
        for _ in range(1000):
            actual = rng.uniform(0.5, 240.0)
            predictor.observe(actual)
            oracle = alpha * actual + (1 - alpha) * oracle
            lo, hi = min(lo, actual), max(hi, actual)
            assert abs(predictor.estimate - oracle) <= 1e-9
            assert lo - 1e-9 <= predictor.estimate <= hi + 1e-9


def test_scheduler_invariant_suite():
    with criterion("200 random scenarios per policy uphold every invariant"):
        from test_sched import check_schedule_invariants
        policies = {
            "fcfs": schedule_fcfs,
            "priority": schedule_priority,
            "hybrid": schedule_hybrid,
        }
        distance = DistanceModel.coordinates()
        for policy, fn in policies.items():
            for seed in range(200):
                tasks, units = random_scenario(seed * 13 + 1,
                                               with_capabilities=seed % 3 == 0)
                result = fn(tasks, units, distance=distance)
                check_schedule_invariants(result, tasks, units)
                rerun = fn(tasks, units, distance=distance)
                assert _result_bytes(result) == _result_bytes(rerun)


def _result_bytes(result) -> bytes:
    doc = {
        "entries": [[e.task_id, e.unit_id, e.start_time, e.route_distance,
                     e.route_duration, e.waiting_time, e.burst_used,
                     e.turnaround_time, e.completion_time]
                    for e in result.entries],
        "missions": [[m.mission_id, m.unit_id, list(m.task_ids), m.depart_base,
                      m.return_base, m.available_after] for m in result.missions],
        "unschedulable": list(result.unschedulable),
    }
    return json.dumps(doc, sort_keys=True).encode()


def test_classifier_properties():
    with criterion("separable corpus: every head >= 95% train accuracy, "
                   "gradients match finite differences, metrics match oracle"):
        from test_textpipe import separable_corpus
        config = TrainConfig(hash_dim=2 ** 16, learning_rate=0.05,
                             epochs=250, seed=0)
        corpus = separable_corpus(17, size=150)
        model = train(corpus, config)
        assert not model.skipped_heads

        predictions = [model.classify(text)[0] for text, _ in corpus]
        for name in LABEL_NAMES:
            hits = sum(getattr(p, name) == getattr(g, name)
                       for p, (_, g) in zip(predictions, corpus))
            assert hits / len(corpus) >= 0.95, name

        rows = [featurize(text, config.hash_dim) for text, _ in corpus[:30]]
        ys = [labels.dcew for _, labels in corpus[:30]]
        rng = random.Random(3)
        weights = {i: rng.uniform(-0.5, 0.5) for row in rows for i, _ in row}
        grad = head_gradient(weights, rows, ys)
        for index in list(grad)[:60]:
            up, down = dict(weights), dict(weights)
            up[index] = weights.get(index, 0.0) + 1e-5
            down[index] = weights.get(index, 0.0) - 1e-5
            fd = (head_loss(up, rows, ys) - head_loss(down, rows, ys)) / 2e-5
            assert abs(fd - grad[index]) / max(1e-8, abs(fd), abs(grad[index])) < 1e-4

        rng = random.Random(23)
        for _ in range(3):
            gold = [LabelVector(**{n: rng.randint(0, 1) for n in LABEL_NAMES})
                    for _ in range(50)]
            pred = [LabelVector(**{n: rng.randint(0, 1) for n in LABEL_NAMES})
                    for _ in range(50)]
            report = evaluate(pred, gold)
            for name in LABEL_NAMES:
                tp = sum(1 for p, g in zip(pred, gold)
                         if getattr(p, name) and getattr(g, name))
                fp = sum(1 for p, g in zip(pred, gold)
                         if getattr(p, name) and not getattr(g, name))
                fn = sum(1 for p, g in zip(pred, gold)
                         if not getattr(p, name) and getattr(g, name))
                tn = 50 - tp - fp - fn
                m = report.per_class[name]
                assert m.precision == (100 * tp / (tp + fp) if tp + fp else 0.0)
                assert m.recall == (100 * tp / (tp + fn) if tp + fn else 0.0)
                assert m.accuracy == 100 * (tp + tn) / 50


def test_service_event_sourcing(tmp_path, portarthur):
    with criterion("50-event session: kill-and-replay is exact; "
                   "served schedule equals the offline scheduler"):
        log = tmp_path / "events.jsonl"
        clock = SimClock(parse_hhmm("14:00"))
        app = create_app(log, clock=clock, scenario=portarthur)
        client = TestClient(app)
        rng = random.Random(99)

        doc = json.loads(open(data_path("portarthur.json")).read())
        template = doc["tasks"][0]
        for i in range(1, 21):  # 20 ingests
            body = dict(template)
            body["id"] = f"s{i}"
            body["arrival"] = parse_hhmm("12:00") + rng.randint(0, 300)
            body["burst"] = rng.randint(20, 90)
            body["distance_from_base"] = round(rng.uniform(0.5, 8.0), 1)
            del body["labels"]
            body["labels"] = {"flood": rng.randint(0, 1),
                              "water_needed": rng.randint(0, 1)}
            body["env"] = {"storm": rng.randint(0, 1)}
            assert client.post("/tasks", json=body).status_code == 201
        for i in range(1, 9):  # 8 env updates
            r = client.post(f"/tasks/s{i}/env",
                            json={"env": {"storm": 1, "road_damaged": 1}})
            assert r.status_code == 200
        for i in range(9, 13):  # 4 overrides
            r = client.post(f"/tasks/s{i}/priority-override",
                            json={"priority": rng.randint(1, 10)})
            assert r.status_code == 200
        for scale_pass in range(2):  # 2 weight changes
            weights = {
                "labels": {"flood": 1.5 + scale_pass, "water_needed": 1.5,
                           "dcew": 2.0, "sick_or_injured": 2.5},
                "env": {"storm": 1.0, "road_damaged": 1.0,
                        "forecast_storm": 0.5, "forecast_flood": 0.5},
                "base_priority": 1.0, "max_priority": 10.0,
            }
            assert client.put("/config/weights", json=weights).status_code == 200
        for _ in range(7):  # 7 dispatch + 7 complete
            mission = client.post("/missions/dispatch", json={})
            assert mission.status_code == 201, mission.text
            mid = mission.json()["mission_id"]
            first = mission.json()["task_ids"][0]
            done = client.post(f"/missions/{mid}/complete",
                               json={"durations": {first: rng.randint(15, 95)}})
            assert done.status_code == 200

        events = [l for l in log.read_text().splitlines() if l.strip()]
        assert len(events) == 50  # 2 bootstrap units + 48 scripted mutations

        snapshot = client.get("/state").json()
        served = client.get("/schedule").json()

        revived = create_app(log, clock=SimClock(parse_hhmm("14:00")),
                             scenario=portarthur)
        replayed_client = TestClient(revived)
        assert replayed_client.get("/state").json() == snapshot

        svc = app.state.service
        offline = schedule_hybrid(
            list(svc.state.queue.values()), svc.state.units_snapshot(),
            svc.state.scheduler_cfg, distance=svc.state.distance,
            weights=svc.state.weights,
            predictor=BurstPredictor(svc.state.predictor.estimate,
                                     svc.state.predictor.alpha),
            start_clock=clock.now())
        assert [r["task_id"] for r in served["rows"]] == \
               [e.task_id for e in offline.entries]
        assert [r["start_minutes"] for r in served["rows"]] == \
               [e.start_time for e in offline.entries]
