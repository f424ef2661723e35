"""Command-line entry point.

Subcommands: run, gen, bench, validate.  Exit codes: 0 ok, 1 usage,
2 input error, 3 internal error.
"""

from __future__ import annotations

import json
import logging
import statistics
import sys
import time

import click
import yaml

from . import synth
from .errors import VekgError
from .ingest import open_stream
from .metrics import score
from .pipeline import run_pipeline
from .rules import register_rules
from .tag import X, edge_series

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def load_rules_file(path) -> list:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise VekgError(f"cannot read rules file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise VekgError(f"bad rules file {path}: {exc}") from exc
    if isinstance(doc, dict) and "rules" in doc:
        return doc["rules"]
    if isinstance(doc, list):
        return doc
    raise VekgError(f"rules file {path} must hold a 'rules' list")


@click.group()
@click.option("--quiet", is_flag=True, help="Suppress progress output.")
@click.pass_context
def cli(ctx, quiet):
    """Spatiotemporal event-pattern matching over detection streams."""
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command("run")
@click.option("--input", "input_path", required=True,
              help="Detection stream file, or - for stdin.")
@click.option("--rules", "rules_path", required=True, help="Rules YAML file.")
@click.option("--window-ms", type=int, default=None,
              help="Window length override in milliseconds.")
@click.option("--out", "out_path", required=True,
              help="Notification output file (JSON lines). Metrics go to "
                   "<out>.metrics.jsonl.")
@click.option("--truth", "truth_path", default=None,
              help="Optional ground-truth file; adds an accuracy report.")
@click.pass_context
def cmd_run(ctx, input_path, rules_path, window_ms, out_path, truth_path):
    """Match rules over a detection stream, streaming notifications out."""
    ruleset = register_rules(load_rules_file(rules_path))
    metrics_path = out_path + ".metrics.jsonl"
    all_notes = []
    with open(out_path, "w", encoding="utf-8") as out_fh, \
            open(metrics_path, "w", encoding="utf-8") as met_fh:
        for result in run_pipeline(open_stream(input_path), ruleset,
                                   window_ms=window_ms, threads=True):
            for note in result.notifications:
                out_fh.write(json.dumps(note.as_dict(),
                                        separators=(",", ":")) + "\n")
            out_fh.flush()   # notifications stream out per window
            all_notes += result.notifications
            met_fh.write(json.dumps(
                {"window": result.index,
                 "start_ms": result.tag.start, "end_ms": result.tag.end,
                 "latency": result.latency.as_dict(),
                 "reduction": result.reduction.as_dict()},
                separators=(",", ":")) + "\n")
        if truth_path:
            truth = synth.load_truth(truth_path)
            report = score(all_notes, truth)
            met_fh.write(json.dumps({"accuracy": report.as_dict()},
                                    separators=(",", ":")) + "\n")
            if not ctx.obj["quiet"]:
                click.echo(f"accuracy: P={report.precision:.3f} "
                           f"R={report.recall:.3f} F={report.f_score:.3f}")
    if not ctx.obj["quiet"]:
        click.echo(f"{len(all_notes)} notification(s) -> {out_path}")


@cli.command("gen")
@click.argument("scenario")
@click.option("--out", "out_path", required=True, help="Stream output file.")
@click.option("--truth", "truth_path", required=True,
              help="Ground-truth output file.")
@click.option("--rules", "rules_path", default=None,
              help="Also write the scenario's rule config here (YAML).")
@click.option("--seed", type=int, default=None)
@click.option("--noise-px", type=float, default=0.0,
              help="Uniform position jitter amplitude in pixels.")
@click.option("--dropout", type=float, default=0.0,
              help="Per-object per-frame dropout probability.")
@click.pass_context
def cmd_gen(ctx, scenario, out_path, truth_path, rules_path, seed,
            noise_px, dropout):
    """Generate a built-in SCENARIO as stream + ground truth."""
    sc = synth.get_scenario(scenario)
    if noise_px or dropout or seed is not None:
        sc = sc.with_noise(noise_px, dropout, seed)
    synth.generate(sc, out_path, truth_path)
    if rules_path:
        with open(rules_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump({"rules": [dict(r) for r in sc.rule_configs]}, fh)
    if not ctx.obj["quiet"]:
        click.echo(f"wrote {out_path} and {truth_path}")


def _bench_queries(tag):
    """The comparison query: fetch one pair's distance series and reduce it."""
    tracks = sorted(tag.nodes)
    u, v = tracks[0], tracks[1]

    def tag_search():
        series = edge_series(tag, u, v, "distance")
        return min(s for s in series if s is not X)

    return u, v, tag_search


@cli.command("bench")
@click.argument("scenario", default="street_10min")
@click.option("--reps", type=int, default=5, help="Timing repetitions.")
@click.option("--window-ms", type=int, default=None)
@click.pass_context
def cmd_bench(ctx, scenario, reps, window_ms):
    """Per-window latency/reduction medians plus a scan-vs-aggregated-search
    comparison on SCENARIO."""
    from .graph import stream_graphs
    from .tag import aggregate
    from .windowing import time_window

    sc = synth.get_scenario(scenario)
    length = window_ms or sc.window_ms
    required = {"distance"}

    windows = list(time_window(
        stream_graphs(synth.generate_frames(sc), required), length))
    report = {"scenario": scenario, "reps": reps, "windows": len(windows)}

    tag_ms, scan_ms, agg_ms, build_ms = [], [], [], []
    for window in windows:
        build_ms.append(sum(g.build_ms for g in window.graphs))
        t0 = time.perf_counter()
        tag = aggregate(window, required)
        agg_ms.append((time.perf_counter() - t0) * 1000.0)
        u, v, tag_search = _bench_queries(tag)

        def frame_scan():
            best = None
            for g in window.graphs:
                val = g.edges.get((u, v))
                if val is None:
                    continue
                d = val["distance"]
                if best is None or d < best:
                    best = d
            return best

        t_tag, t_scan = [], []
        for _ in range(reps):
            t0 = time.perf_counter()
            r1 = tag_search()
            t_tag.append((time.perf_counter() - t0) * 1000.0)
            t0 = time.perf_counter()
            r2 = frame_scan()
            t_scan.append((time.perf_counter() - t0) * 1000.0)
            assert abs(r1 - r2) < 1e-9
        tag_ms.append(statistics.median(t_tag))
        scan_ms.append(statistics.median(t_scan))

    report["vekg_construction_ms_median"] = round(statistics.median(build_ms), 3)
    report["tag_construction_ms_median"] = round(statistics.median(agg_ms), 3)
    report["tag_search_ms_median"] = round(statistics.median(tag_ms), 6)
    report["vekg_scan_ms_median"] = round(statistics.median(scan_ms), 6)
    speedup = (statistics.median(scan_ms) / statistics.median(tag_ms)
               if statistics.median(tag_ms) > 0 else float("inf"))
    report["search_speedup"] = round(speedup, 2)
    click.echo(json.dumps(report, indent=2))


@cli.command("validate")
@click.argument("stream_file")
@click.pass_context
def cmd_validate(ctx, stream_file):
    """Check a detection stream's format invariants."""
    count = 0
    for _frame in open_stream(stream_file):
        count += 1
    click.echo(f"ok: {count} frame(s)")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Exit as exc:
        return EXIT_OK if exc.exit_code == 0 else EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except VekgError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except Exception as exc:   # pragma: no cover - defensive
        log.exception("internal error")
        click.echo(f"internal error: {exc}", err=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
