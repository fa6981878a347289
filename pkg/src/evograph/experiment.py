"""Experiment orchestration: flat-key config files, the per-arm repetition
loop (load, communities, merge, sparsify-if-large, evolve), and the stats
aggregation across arms."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, asdict

from evograph.community import detect_fastgreedy, merge_small, merge_to_target
from evograph.engine import EngineConfig, EvolutionEngine
from evograph.gateway import (
    LiveGateway,
    LiveGatewayConfig,
    MockGateway,
    MockOracleConfig,
    TranscriptWriter,
)
from evograph.graph import Graph, read_edge_list
from evograph.render import SolutionRenderer
from evograph.sparsify import sparsify_if_large
from evograph.stats import anova_oneway, average_ranks, wilcoxon_rank_sum

MOCK_SEED_OFFSET = 7919  # engine and oracle draw from distinct streams


class ExperimentError(ValueError):
    pass


@dataclass
class SparsifyConfig:
    n_v: int = 50
    n_e: int = 100
    policy: str = "random"


@dataclass
class CommunityConfig:
    small_fraction: float = 0.02
    target: int | None = None


@dataclass
class ExperimentConfig:
    network: str = ""
    out: str = "runs/out"
    runs: int = 1
    seed: int = 0
    backend: str = "mock"
    save_images: bool = False
    sparsify: SparsifyConfig = field(default_factory=SparsifyConfig)
    community: CommunityConfig = field(default_factory=CommunityConfig)
    engine: EngineConfig = field(default_factory=lambda: EngineConfig(k=5))
    gateway: LiveGatewayConfig = field(default_factory=LiveGatewayConfig)
    mock: MockOracleConfig = field(default_factory=MockOracleConfig)
    arms: dict = field(default_factory=dict)  # name -> {dotted key: value} engine overrides

    def __post_init__(self):
        if self.runs < 1:
            raise ExperimentError("runs must be >= 1")
        if self.backend not in ("mock", "live"):
            raise ExperimentError(f"unknown backend {self.backend!r}")

    def resolved(self) -> dict:
        out = asdict(self)
        return out

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.resolved(), sort_keys=True).encode()
        ).hexdigest()


# -- flat-key config text ----------------------------------------------------------


def _coerce(value: str):
    value = value.strip()
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    if value.lower() in ("none", ""):
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def parse_config_text(text: str) -> dict:
    """``key = value`` lines with dotted key paths; ``#`` starts a comment."""
    flat: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExperimentError(f"config line {line_no}: expected 'key = value': {raw!r}")
        key, value = line.split("=", 1)
        flat[key.strip()] = _coerce(value)
    return flat


_ENGINE_FIELDS = set(EngineConfig(k=1).__dict__)
_GATEWAY_FIELDS = set(asdict(LiveGatewayConfig()))
_MOCK_FIELDS = set(asdict(MockOracleConfig()))


def config_from_flat(flat: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    arm_overrides: dict[str, dict] = {}
    engine_kwargs: dict = {"k": 5}
    gateway_kwargs: dict = {}
    mock_kwargs: dict = {}
    for key, value in flat.items():
        parts = key.split(".")
        if parts[0] == "arm":
            if len(parts) < 3 or parts[1] == "":
                raise ExperimentError(f"arm override needs 'arm.<name>.<field>': {key!r}")
            arm_overrides.setdefault(parts[1], {})[".".join(parts[2:])] = value
        elif parts[0] == "sparsify" and len(parts) == 2:
            setattr(cfg.sparsify, parts[1], value)
        elif parts[0] == "community" and len(parts) == 2:
            setattr(cfg.community, parts[1], value)
        elif parts[0] == "engine" and len(parts) == 2 and parts[1] in _ENGINE_FIELDS:
            engine_kwargs[parts[1]] = value
        elif parts[0] == "gateway" and len(parts) == 2 and parts[1] in _GATEWAY_FIELDS:
            gateway_kwargs[parts[1]] = value
        elif parts[0] == "mock" and len(parts) == 2 and parts[1] in _MOCK_FIELDS:
            mock_kwargs[parts[1]] = value
        elif len(parts) == 1 and hasattr(cfg, key) and key not in (
            "sparsify", "community", "engine", "gateway", "mock", "arms",
        ):
            setattr(cfg, key, value)
        else:
            raise ExperimentError(f"unknown config key {key!r}")
    cfg.engine = EngineConfig(**engine_kwargs)
    cfg.gateway = LiveGatewayConfig(**gateway_kwargs)
    cfg.mock = MockOracleConfig(**mock_kwargs)
    cfg.arms = arm_overrides
    cfg.__post_init__()
    return cfg


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        flat = parse_config_text(fh.read())
    if overrides:
        flat.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_flat(flat)


# -- pipeline -----------------------------------------------------------------------


def prepare_working_graph(cfg: ExperimentConfig, g: Graph):
    """detect communities -> 2% merge -> optional target merge -> sparsify-if-large."""
    cs = detect_fastgreedy(g)
    communities_initial = len(cs)
    if cfg.community.small_fraction:
        cs = merge_small(g, cs, cfg.community.small_fraction)
    if cfg.community.target is not None:
        cs = merge_to_target(g, cs, int(cfg.community.target))
    sg = sparsify_if_large(
        g,
        cs,
        cfg.sparsify.n_v,
        cfg.sparsify.n_e,
        cfg.sparsify.policy,
        rng_seed=cfg.seed,
    )
    return sg, cs, communities_initial


def _engine_config_for_arm(cfg: ExperimentConfig, arm_overrides: dict, rep_seed: int) -> EngineConfig:
    kwargs = dict(cfg.engine.__dict__)
    for key, value in arm_overrides.items():
        field_name = key.split(".")[-1] if key.startswith("engine.") else key
        if field_name not in _ENGINE_FIELDS:
            raise ExperimentError(f"unknown engine field in arm override: {key!r}")
        kwargs[field_name] = value
    kwargs["rng_seed"] = rep_seed
    return EngineConfig(**kwargs)


def _gateway_for(cfg: ExperimentConfig, working_graph: Graph, rep_seed: int, transcript_path: str):
    transcript = TranscriptWriter(transcript_path)
    if cfg.backend == "mock":
        mock_cfg = MockOracleConfig(
            **{**asdict(cfg.mock), "rng_seed": rep_seed + MOCK_SEED_OFFSET}
        )
        return MockGateway(working_graph, mock_cfg, transcript=transcript)
    return LiveGateway(cfg.gateway, transcript=transcript)


@dataclass
class ArmOutcome:
    name: str
    final_fitness: list
    final_fitness_original: list
    rep_dirs: list
    failed: list


@dataclass
class StatsSummary:
    arms: dict  # name -> {mean, sd, n}
    wilcoxon: list  # [{a, b, statistic, p_value, decision}]
    anova: dict | None
    average_rank: dict | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def _mean_sd(values: list) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    sd = (sum((v - mean) ** 2 for v in values) / n) ** 0.5
    return mean, sd


def compute_stats(samples: dict, alpha: float = 0.05) -> StatsSummary:
    """Per-arm summary, pairwise rank-sum decisions, ANOVA across arms, and
    average ranks by mean fitness."""
    arms = {}
    for name, values in samples.items():
        mean, sd = _mean_sd(values)
        arms[name] = {"mean": mean, "sd": sd, "n": len(values)}
    names = sorted(samples)
    pairwise = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if len(samples[a]) >= 3 and len(samples[b]) >= 3:
                res = wilcoxon_rank_sum(samples[a], samples[b], alpha)
                pairwise.append(
                    {
                        "a": a,
                        "b": b,
                        "statistic": res.statistic,
                        "p_value": res.p_value,
                        "decision": res.decision,
                    }
                )
    anova = None
    if len(names) >= 2 and all(len(samples[n]) >= 2 for n in names):
        res = anova_oneway([samples[n] for n in names])
        anova = {"f_stat": res.f_stat, "p_value": res.p_value, "different": res.different}
    avg_rank = None
    if names:
        avg_rank = average_ranks([{n: arms[n]["mean"] for n in names}])
    return StatsSummary(arms=arms, wilcoxon=pairwise, anova=anova, average_rank=avg_rank)


def run_experiment(cfg: ExperimentConfig) -> StatsSummary:
    """Full protocol: one shared working graph, then every (arm, repetition)
    evolves with its own seed. Writes all artifacts under cfg.out and returns
    the cross-arm statistics."""
    if not cfg.network:
        raise ExperimentError("no network configured")
    g, load_report = read_edge_list(cfg.network)
    sg, cs, communities_initial = prepare_working_graph(cfg, g)
    os.makedirs(cfg.out, exist_ok=True)

    arm_specs = cfg.arms or {"default": {}}
    outcomes: list[ArmOutcome] = []
    produced: list[str] = []
    for arm_name in sorted(arm_specs):
        overrides = arm_specs[arm_name]
        outcome = ArmOutcome(arm_name, [], [], [], [])
        for rep in range(cfg.runs):
            rep_seed = cfg.seed + rep
            rep_dir = os.path.join(cfg.out, arm_name, f"rep{rep:03d}")
            os.makedirs(rep_dir, exist_ok=True)
            try:
                engine_cfg = _engine_config_for_arm(cfg, overrides, rep_seed)
                gateway = _gateway_for(
                    cfg, sg.graph, rep_seed, os.path.join(rep_dir, "transcript.jsonl")
                )
                renderer = SolutionRenderer(
                    sg.graph,
                    engine_cfg.layout_style,
                    rng_seed=cfg.seed,
                    out_dir=rep_dir if cfg.save_images else None,
                )
                engine = EvolutionEngine(sg, g, engine_cfg, gateway, renderer)
                result = engine.run()
            except Exception as exc:  # noqa: BLE001 - a failed rep must not sink the arm
                outcome.failed.append({"rep": rep, "reason": str(exc)})
                continue
            for name, content in (
                ("result.json", result.to_json()),
                ("trace.jsonl", result.trace_jsonl()),
            ):
                path = os.path.join(rep_dir, name)
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(content)
                produced.append(os.path.relpath(path, cfg.out))
            produced.append(os.path.relpath(os.path.join(rep_dir, "transcript.jsonl"), cfg.out))
            outcome.final_fitness.append(result.best_fitness)
            outcome.final_fitness_original.append(result.best_fitness_original)
            outcome.rep_dirs.append(os.path.relpath(rep_dir, cfg.out))
        if not outcome.final_fitness:
            raise ExperimentError(
                f"arm {arm_name!r}: all {cfg.runs} repetitions failed: {outcome.failed}"
            )
        outcomes.append(outcome)

    samples = {o.name: o.final_fitness for o in outcomes}
    summary = compute_stats(samples)

    experiment_record = {
        "config": cfg.resolved(),
        "config_sha256": cfg.config_hash(),
        "network": {
            "nodes": g.n,
            "edges": g.edge_count,
            "communities_initial": communities_initial,
            "communities_final": len(cs),
            "sparsified": sg.sparsified,
            "working_nodes": sg.graph.n,
            "working_edges": sg.graph.edge_count,
            "load_report": asdict(load_report),
        },
        "arms": {
            o.name: {
                "final_fitness": o.final_fitness,
                "final_fitness_original": o.final_fitness_original,
                "rep_dirs": o.rep_dirs,
                "failed": o.failed,
            }
            for o in outcomes
        },
    }
    for name, content in (
        ("experiment.json", json.dumps(experiment_record, sort_keys=True, indent=2) + "\n"),
        ("stats.json", summary.to_json()),
    ):
        path = os.path.join(cfg.out, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
        produced.append(name)

    manifest = {
        "config_sha256": cfg.config_hash(),
        "files": sorted(set(produced)) + ["manifest.json"],
    }
    with open(os.path.join(cfg.out, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return summary


def stats_from_run_dir(out_dir: str) -> StatsSummary:
    """Recompute cross-arm statistics from a stored run directory."""
    with open(os.path.join(out_dir, "experiment.json"), "r", encoding="utf-8") as fh:
        record = json.load(fh)
    samples = {name: arm["final_fitness"] for name, arm in record["arms"].items()}
    return compute_stats(samples)
