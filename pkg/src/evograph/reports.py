"""Report emission from stored run directories: mean/SD fitness grids with
rank-sum decisions, validation-rate grids, per-generation trace aggregates
with SEM, mutation degree summaries, and per-call latency stats from gateway
transcripts. Every emitted file round-trips byte-stably through its parser."""

from __future__ import annotations

import json
import os

from PIL import Image, ImageDraw

from evograph.gateway import read_transcript
from evograph.experiment import compute_stats


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def reemit_csv(path: str, out_path: str) -> None:
    """parse -> emit; used to verify byte stability."""
    header, rows = parse_csv(path)
    emit_csv(out_path, header, rows)


def _load_experiment(out_dir: str) -> dict:
    with open(os.path.join(out_dir, "experiment.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_rep_results(out_dir: str, record: dict) -> dict:
    per_arm = {}
    for arm, info in record["arms"].items():
        results = []
        for rep_dir in info["rep_dirs"]:
            with open(os.path.join(out_dir, rep_dir, "result.json"), "r", encoding="utf-8") as fh:
                results.append(json.load(fh))
        per_arm[arm] = results
    return per_arm


def _mean_sem(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    sd = (sum((v - mean) ** 2 for v in values) / (n - 1)) ** 0.5
    return mean, sd / n**0.5


def emit_reports(out_dir: str, report_dir: str | None = None, plots: bool = False) -> list[str]:
    """Build every report CSV (and optional trace plots) from a run directory;
    returns the produced paths."""
    record = _load_experiment(out_dir)
    per_arm = _load_rep_results(out_dir, record)
    report_dir = report_dir or os.path.join(out_dir, "reports")
    os.makedirs(report_dir, exist_ok=True)
    produced: list[str] = []

    def out(name: str) -> str:
        path = os.path.join(report_dir, name)
        produced.append(path)
        return path

    # fitness grid (mean +- sd, decision vs the top-mean arm)
    samples = {a: info["final_fitness"] for a, info in record["arms"].items()}
    summary = compute_stats(samples)
    top = max(summary.arms, key=lambda a: (summary.arms[a]["mean"], a))
    decisions = {(w["a"], w["b"]): w["decision"] for w in summary.wilcoxon}
    flipped = {"+": "-", "-": "+", "≈": "≈"}
    rows = []
    for arm in sorted(summary.arms):
        stats = summary.arms[arm]
        if arm == top:
            decision = "best"
        else:
            d = decisions.get((arm, top))
            if d is None:
                d = flipped.get(decisions.get((top, arm), "≈"), "≈")
            decision = d
        rows.append([arm, stats["mean"], stats["sd"], stats["n"], decision])
    emit_csv(out("fitness_grid.csv"), ["arm", "mean", "sd", "n", "decision_vs_top"], rows)

    # pairwise rank-sum matrix
    emit_csv(
        out("wilcoxon.csv"),
        ["a", "b", "statistic", "p_value", "decision"],
        [[w["a"], w["b"], w["statistic"], w["p_value"], w["decision"]] for w in summary.wilcoxon],
    )
    if summary.anova is not None:
        emit_csv(
            out("anova.csv"),
            ["f_stat", "p_value", "different"],
            [[summary.anova["f_stat"], summary.anova["p_value"], summary.anova["different"]]],
        )
    if summary.average_rank is not None:
        emit_csv(
            out("average_rank.csv"),
            ["arm", "avg_rank"],
            [[a, r] for a, r in sorted(summary.average_rank.items())],
        )

    # per-generation traces: mean and SEM of best-so-far across repetitions
    for arm, results in sorted(per_arm.items()):
        by_gen: dict[int, list[float]] = {}
        by_gen_best: dict[int, list[float]] = {}
        for result in results:
            for row in result["trace"]:
                by_gen.setdefault(row["generation"], []).append(row["best_so_far"])
                by_gen_best.setdefault(row["generation"], []).append(row["best"])
        rows = []
        for gen in sorted(by_gen):
            mean_bsf, sem_bsf = _mean_sem(by_gen[gen])
            mean_best, sem_best = _mean_sem(by_gen_best[gen])
            rows.append([gen, mean_bsf, sem_bsf, mean_best, sem_best, len(by_gen[gen])])
        emit_csv(
            out(f"trace_{arm}.csv"),
            ["generation", "mean_best_so_far", "sem_best_so_far", "mean_best", "sem_best", "runs"],
            rows,
        )
        if plots and rows:
            _plot_trace(
                os.path.join(report_dir, f"trace_{arm}.png"),
                [r[0] for r in rows],
                [r[1] for r in rows],
            )
            produced.append(os.path.join(report_dir, f"trace_{arm}.png"))

    # validation-rate grid (percent passing per check)
    rows = []
    for arm, results in sorted(per_arm.items()):
        totals: dict[str, list[int]] = {}
        for result in results:
            for check, counts in result["validation"].items():
                bucket = totals.setdefault(check, [0, 0])
                bucket[0] += counts["passed"]
                bucket[1] += counts["failed"]
        for check in sorted(totals):
            passed, failed = totals[check]
            rate = 100.0 * passed / (passed + failed) if (passed + failed) else 100.0
            rows.append([arm, check, rate])
    emit_csv(out("validation_grid.csv"), ["arm", "check", "pass_rate_pct"], rows)

    # mutation degree analysis (distribution summary of added vs removed)
    rows = []
    for arm, results in sorted(per_arm.items()):
        by_op: dict[str, tuple[list[int], list[int]]] = {}
        for result in results:
            for entry in result["degree_log"]:
                rem, add = by_op.setdefault(entry["operator"], ([], []))
                rem.append(entry["removed_degree"])
                add.append(entry["added_degree"])
        for op in sorted(by_op):
            rem, add = by_op[op]
            rows.append(
                [arm, op, len(rem), sum(rem) / len(rem), sum(add) / len(add)]
            )
    emit_csv(
        out("degree_summary.csv"),
        ["arm", "operator", "swaps", "mean_removed_degree", "mean_added_degree"],
        rows,
    )

    # per-call latency from transcripts (model x operator)
    samples_lat: dict[tuple[str, str], list[float]] = {}
    for arm, info in record["arms"].items():
        for rep_dir in info["rep_dirs"]:
            path = os.path.join(out_dir, rep_dir, "transcript.jsonl")
            if not os.path.exists(path):
                continue
            for entry in read_transcript(path):
                op = entry.get("operator") or "unknown"
                group = "mutation" if op.startswith("mutation") else (
                    "init" if op.startswith("init") else op
                )
                samples_lat.setdefault((entry["model"], group), []).append(entry["latency_s"])
    rows = []
    for (model, op), values in sorted(samples_lat.items()):
        mean = sum(values) / len(values)
        sd = (sum((v - mean) ** 2 for v in values) / len(values)) ** 0.5
        rows.append([model, op, len(values), mean, sd])
    emit_csv(out("latency.csv"), ["model", "operator", "calls", "mean_s", "sd_s"], rows)
    return produced


def _plot_trace(path: str, xs: list, ys: list, size=(640, 400)) -> None:
    """Minimal polyline plot; reuses the same raster primitives the solution
    renderer is built on."""
    w, h = size
    img = Image.new("RGB", size, (255, 255, 255))
    draw = ImageDraw.Draw(img)
    margin = 40
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0
    x_span = (max(xs) - min(xs)) or 1
    points = [
        (
            margin + (x - min(xs)) / x_span * (w - 2 * margin),
            h - margin - (y - lo) / span * (h - 2 * margin),
        )
        for x, y in zip(xs, ys)
    ]
    draw.line([(margin, h - margin), (w - margin, h - margin)], fill=(0, 0, 0), width=1)
    draw.line([(margin, margin), (margin, h - margin)], fill=(0, 0, 0), width=1)
    if len(points) > 1:
        draw.line(points, fill=(47, 127, 193), width=2)
    for pt in points:
        draw.ellipse([pt[0] - 2, pt[1] - 2, pt[0] + 2, pt[1] + 2], fill=(47, 127, 193))
    img.save(path, format="PNG")
