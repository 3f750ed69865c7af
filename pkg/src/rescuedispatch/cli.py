"""Command-line front door: replay scenarios, run benchmarks, generate
workloads, extract features, train/classify, and launch the dispatch service.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .core import DispatchError, ScenarioError, format_hhmm
from .scenario import dump_scenario, load_scenario
from .sched import POLICIES
from .sim import (
    bench as run_bench,
    generate as generate_doc,
    load_bench_spec,
    replay as run_replay,
    workload_from_dict,
)
from .textpipe import (
    LinearModel,
    TrainConfig,
    evaluate,
    extract_features,
    load_corpus,
    train as train_model,
)

VALIDATION_EXIT = 2
RUNTIME_EXIT = 1


def _fail(exc: Exception, code: int):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Rescue dispatch scheduling toolkit."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", type=click.Choice(POLICIES), default="hybrid")
@click.option("--units", type=click.IntRange(min=1), default=None,
              help="Override the scenario's unit count.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the machine-readable replay JSON here.")
def replay(scenario_path, policy, units, out):
    """Replay a scenario file and print the schedule table."""
    try:
        scenario = load_scenario(scenario_path)
        result = run_replay(scenario, policy, unit_count=units)
    except (ScenarioError, DispatchError) as exc:
        _fail(exc, VALIDATION_EXIT)
    except Exception as exc:  # noqa: BLE001
        _fail(exc, RUNTIME_EXIT)

    header = f"{'task':>6} {'start':>6} {'dist':>6} {'dur':>4} {'wait':>5} " \
             f"{'burst':>5} {'tat':>5} {'unit':>8}"
    click.echo(header)
    click.echo("-" * len(header))
    for e in result.schedule.entries:
        click.echo(f"{e.task_id:>6} {format_hhmm(e.start_time):>6} "
                   f"{e.route_distance:>6.1f} {e.route_duration:>4d} "
                   f"{e.waiting_time:>5d} {e.burst_used:>5d} "
                   f"{e.turnaround_time:>5d} {e.unit_id:>8}")
    if result.schedule.unschedulable:
        click.echo(f"unschedulable: {', '.join(result.schedule.unschedulable)}")
    s = result.to_dict()["summary"]
    click.echo(f"tasks={s['tasks']} mean_wait_min={s['mean_wait_min']} "
               f"mean_turnaround_min={s['mean_turnaround_min']} "
               f"max_avg_wt_min={s['max_avg_wt_min']} "
               f"mean_avg_wt_min={s['mean_avg_wt_min']}")
    if out:
        Path(out).write_text(result.to_json())
        click.echo(f"wrote {out}")


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--policies", default=None,
              help="Comma-separated subset of fcfs,priority,hybrid.")
@click.option("--units", default=None, help="Comma-separated unit counts.")
@click.option("--seeds", default=None, help="Comma-separated seeds.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Export the running-average waiting series as CSV.")
def bench(spec_path, policies, units, seeds, out, csv_path):
    """Compare scheduling policies on a seeded synthetic workload."""
    try:
        spec, file_seeds, file_policies, file_units = load_bench_spec(spec_path)
        use_policies = tuple(policies.split(",")) if policies else file_policies
        use_units = tuple(int(u) for u in units.split(",")) if units else file_units
        use_seeds = tuple(int(s) for s in seeds.split(",")) if seeds else file_seeds
        result = run_bench(spec, use_policies, use_units, use_seeds)
    except (ScenarioError, DispatchError, ValueError) as exc:
        _fail(exc, VALIDATION_EXIT)
    except Exception as exc:  # noqa: BLE001
        _fail(exc, RUNTIME_EXIT)

    click.echo(f"{'policy':>10} {'units':>6} {'mean_avg_wt_h':>14} {'max_avg_wt_h':>13}")
    for cell in result.cells:
        click.echo(f"{cell.policy:>10} {cell.units:>6d} "
                   f"{cell.mean_avg_wt_hours:>14.3f} {cell.max_avg_wt_hours:>13.3f}")
    if out:
        Path(out).write_text(result.to_json())
        click.echo(f"wrote {out}")
    if csv_path:
        Path(csv_path).write_text(result.series_csv())
        click.echo(f"wrote {csv_path}")


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Workload spec JSON; defaults are used without it.")
@click.option("--seed", type=int, default=None)
@click.option("--count", type=click.IntRange(min=1), default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(spec_path, seed, count, out):
    """Generate a seeded synthetic scenario file."""
    try:
        data = {}
        if spec_path:
            raw = json.loads(Path(spec_path).read_text())
            data = raw.get("workload", raw)
        if seed is not None:
            data["seed"] = seed
        if count is not None:
            data["count"] = count
        spec = workload_from_dict(data)
        doc = generate_doc(spec)
        Path(out).write_text(dump_scenario(doc))
    except (ScenarioError, DispatchError, ValueError) as exc:
        _fail(exc, VALIDATION_EXIT)
    except Exception as exc:  # noqa: BLE001
        _fail(exc, RUNTIME_EXIT)
    click.echo(f"wrote {out} ({spec.count} tasks, seed {spec.seed if seed is None else seed})")


@main.command()
@click.option("--text", default=None)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Read the message text from a file.")
def features(text, in_path):
    """Print the auxiliary feature vector of a message as JSON."""
    if (text is None) == (in_path is None):
        raise click.UsageError("provide exactly one of --text or --in")
    raw = text if text is not None else Path(in_path).read_text()
    vector = extract_features(raw)
    click.echo(json.dumps({"format": "features/1", **vector.as_dict()}, indent=2))


@main.command()
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--epochs", type=click.IntRange(min=1), default=400)
@click.option("--learning-rate", type=float, default=0.05)
@click.option("--hash-dim", type=click.IntRange(min=16), default=2 ** 18)
@click.option("--seed", type=int, default=0)
@click.option("--report/--no-report", default=True,
              help="Print train-set evaluation metrics after training.")
def train(corpus_path, out, epochs, learning_rate, hash_dim, seed, report):
    """Train the multi-headed linear classifier on a labeled CSV corpus."""
    try:
        corpus = load_corpus(corpus_path)
        config = TrainConfig(hash_dim=hash_dim, learning_rate=learning_rate,
                             epochs=epochs, seed=seed)
        model = train_model(corpus, config)
        model.save(out)
    except (DispatchError, ValueError) as exc:
        _fail(exc, VALIDATION_EXIT)
    except Exception as exc:  # noqa: BLE001
        _fail(exc, RUNTIME_EXIT)
    click.echo(f"wrote {out} (skipped heads: {list(model.skipped_heads) or 'none'})")
    if report:
        preds, scores = [], []
        for text, _ in corpus:
            labels, s, _ = model.classify(text)
            preds.append(labels)
            scores.append(s)
        rep = evaluate(preds, [g for _, g in corpus], scores)
        click.echo(f"train weighted: precision={rep.weighted.precision:.1f} "
                   f"recall={rep.weighted.recall:.1f} f1={rep.weighted.f1:.1f} "
                   f"accuracy={rep.weighted.accuracy:.1f}")


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--text", default=None)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
def classify(model_path, text, in_path):
    """Classify a message into the six request labels."""
    if (text is None) == (in_path is None):
        raise click.UsageError("provide exactly one of --text or --in")
    raw = text if text is not None else Path(in_path).read_text()
    try:
        model = LinearModel.load(model_path)
        labels, scores, unavailable = model.classify(raw)
    except (DispatchError, ValueError) as exc:
        _fail(exc, VALIDATION_EXIT)
    except Exception as exc:  # noqa: BLE001
        _fail(exc, RUNTIME_EXIT)
    click.echo(json.dumps({
        "format": "classification/1",
        "labels": labels.as_dict(),
        "scores": scores,
        "unavailable_heads": list(unavailable),
    }, indent=2))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              default="dispatch-events.jsonl")
@click.option("--scenario", "scenario_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Bootstrap units, weights, and distances from a scenario file.")
@click.option("--ingest-tasks", is_flag=True, default=False,
              help="Also ingest the bootstrap scenario's tasks.")
@click.option("--model", "model_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--console-dir", type=click.Path(file_okay=False), default=None,
              help="Serve a built console bundle at /console.")
def serve(host, port, log_path, scenario_path, ingest_tasks, model_path, console_dir):
    """Run the HTTP dispatch service."""
    import uvicorn

    from .service import create_app

    try:
        scenario = load_scenario(scenario_path) if scenario_path else None
        model = LinearModel.load(model_path) if model_path else None
        app = create_app(log_path, scenario=scenario, model=model,
                         ingest_tasks=ingest_tasks, console_dir=console_dir)
    except (DispatchError, ValueError) as exc:
        _fail(exc, VALIDATION_EXIT)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
