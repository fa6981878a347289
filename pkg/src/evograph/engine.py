"""The generational loop: population initialization (five baseline modes plus
three chat agents), binary-tournament selection, normal or image-driven
crossover/mutation, and the validation/repair layer that keeps every
candidate feasible."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, asdict

from evograph import prompts
from evograph.fitness import FitnessEvaluator
from evograph.gateway import (
    GatewayError,
    GatewayRequest,
    OperatorContext,
    ResponseParseError,
    parse_node_list,
    parse_swap_pair,
)
from evograph.graph import Graph, GraphError, betweenness, label_key
from evograph.sparsify import SparsifiedGraph

INIT_MODES = ("random", "refined_random", "high_degree", "high_betweenness", "mllm")
REPRODUCTION_MODES = ("normal", "mllm_oneshot", "mllm_twophase")

# the nine feasibility checks, named by what they test
CHECKS = (
    "init_valid_node",
    "init_size",
    "init_low_degree",
    "crossover_size",
    "crossover_duplicate",
    "crossover_parent_source",
    "mutation_presence",
    "mutation_valid_node",
    "mutation_repeat",
)

_CHECKS_BY_PHASE = {
    "init": ("init_valid_node", "init_size", "init_low_degree"),
    "crossover": ("crossover_size", "crossover_duplicate", "crossover_parent_source"),
    "mutation": ("mutation_presence", "mutation_valid_node", "mutation_repeat"),
}

MLLM_INIT_AGENTS = ("init_intelligent", "init_betweenness_spread", "init_degree_central")


class EngineError(ValueError):
    pass


@dataclass
class EngineConfig:
    k: int
    n_p: int = 15
    p_c: float = 0.2
    p_m: float = 0.1
    generations: int = 10
    objective: str = "edv"
    p: float = 0.05  # propagation probability; source material never states a value
    init_mode: str = "refined_random"
    reproduction_mode: str = "normal"
    layout_style: str = "KK"
    rng_seed: int = 0
    repair_strictness: str = "strict"
    init_retry_cap: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise EngineError("k must be >= 1")
        if self.n_p < 2:
            raise EngineError("population size must be >= 2")
        for name in ("p_c", "p_m", "p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise EngineError(f"{name}={v} outside [0, 1]")
        if self.generations < 0:
            raise EngineError("generations must be >= 0")
        if self.init_mode not in INIT_MODES:
            raise EngineError(f"unknown init mode {self.init_mode!r}")
        if self.reproduction_mode not in REPRODUCTION_MODES:
            raise EngineError(f"unknown reproduction mode {self.reproduction_mode!r}")
        if self.repair_strictness not in ("strict", "lax"):
            raise EngineError(f"unknown repair strictness {self.repair_strictness!r}")
        if self.objective not in ("edv", "dismantling"):
            raise EngineError(f"unknown objective {self.objective!r}")
        if self.layout_style not in ("KK", "FR"):
            raise EngineError(f"unknown layout style {self.layout_style!r}")


@dataclass
class Individual:
    members: tuple
    fitness: float | None = None
    provenance: str = "init"
    parents: tuple = ()


@dataclass
class Population:
    individuals: list
    generation: int = 0


@dataclass
class CandidateReport:
    """Pass/fail flags for the checks applicable to one candidate, plus the
    repairs that were applied."""

    phase: str
    checks: dict = field(default_factory=dict)
    repairs: list = field(default_factory=list)

    def passed_all(self) -> bool:
        return all(self.checks.values())


class ValidationStats:
    """Aggregates candidate reports into per-check pass/fail counts."""

    def __init__(self):
        self.counts = {name: {"passed": 0, "failed": 0} for name in CHECKS}
        self.repairs: list[str] = []

    def add(self, report: CandidateReport) -> None:
        for name, ok in report.checks.items():
            self.counts[name]["passed" if ok else "failed"] += 1
        self.repairs.extend(report.repairs)

    def merged(self) -> dict:
        return {
            name: dict(c) for name, c in self.counts.items()
            if c["passed"] or c["failed"]
        }

    def rates(self) -> dict:
        out = {}
        for name, c in self.counts.items():
            total = c["passed"] + c["failed"]
            if total:
                out[name] = c["passed"] / total
        return out


@dataclass
class ValidationContext:
    phase: str
    k: int
    graph: Graph
    parents: tuple | None = None
    current: tuple | None = None


def _resolver(g: Graph) -> dict:
    """Map string forms back to graph labels so chat output ("12") matches
    int-labeled graphs."""
    return {str(lab): lab for lab in g.nodes()}


def _max_degree_fill(g: Graph, exclude: set, count: int, pool=None) -> list:
    candidates = pool if pool is not None else g.nodes()
    ranked = sorted(
        (lab for lab in candidates if lab not in exclude),
        key=lambda l: (-g.degree(l), label_key(l)),
    )
    return ranked[:count]


def validate_and_repair(
    candidate: list,
    ctx: ValidationContext,
    strictness: str = "strict",
) -> tuple[Individual, CandidateReport]:
    """Flag every applicable check on the raw candidate, then repair to a
    feasible individual. Repair is total: even an empty candidate comes back
    as a fully valid seed set (flagged on all applicable checks)."""
    g = ctx.graph
    resolver = _resolver(g)
    report = CandidateReport(phase=ctx.phase)
    raw = [str(t) for t in candidate]

    if ctx.phase == "mutation":
        return _validate_mutation(raw, ctx, report)

    resolved = [resolver[t] for t in raw if t in resolver]
    valid_all = len(resolved) == len(raw) and len(raw) > 0
    size_ok = len(raw) == ctx.k
    deduped: list = []
    for lab in resolved:
        if lab not in deduped:
            deduped.append(lab)

    if ctx.phase == "init":
        report.checks["init_valid_node"] = valid_all
        report.checks["init_size"] = size_ok
        med = _median_degree(g)
        report.checks["init_low_degree"] = len(raw) > 0 and all(
            g.degree(lab) >= med for lab in deduped
        )
        members = deduped
        fill_pool = None
    else:  # crossover
        union = set(ctx.parents[0]) | set(ctx.parents[1])
        report.checks["crossover_size"] = size_ok
        report.checks["crossover_duplicate"] = len(raw) > 0 and len(set(raw)) == len(raw)
        report.checks["crossover_parent_source"] = len(raw) > 0 and all(
            t in resolver and resolver[t] in union for t in raw
        )
        members = deduped
        if strictness == "strict":
            kept = [lab for lab in members if lab in union]
            if len(kept) != len(members):
                report.repairs.append("replaced_nonparent_nodes")
            members = kept
            fill_pool = sorted(union, key=label_key)
        else:
            fill_pool = None

    if len(members) > ctx.k:
        members = members[: ctx.k]
        report.repairs.append("truncated_to_k")
    if len(members) < ctx.k:
        fill = _max_degree_fill(g, set(members), ctx.k - len(members), pool=fill_pool)
        if len(fill) < ctx.k - len(members):  # pool exhausted, fall back to whole graph
            fill += _max_degree_fill(g, set(members) | set(fill), ctx.k - len(members) - len(fill))
        members = members + fill
        report.repairs.append("filled_to_k")
    if not valid_all and ctx.phase == "init":
        report.repairs.append("dropped_unknown_nodes")
    ind = Individual(members=tuple(members), provenance=ctx.phase)
    return ind, report


def _median_degree(g: Graph) -> float:
    degs = sorted(g.degrees().values())
    mid = len(degs) // 2
    if len(degs) % 2:
        return float(degs[mid])
    return (degs[mid - 1] + degs[mid]) / 2.0


def _validate_mutation(raw: list, ctx: ValidationContext, report: CandidateReport):
    """Candidate is a (remove, add) token pair applied to ctx.current."""
    g = ctx.graph
    resolver = _resolver(g)
    current = list(ctx.current)
    remove_tok = raw[0] if len(raw) >= 1 else None
    add_tok = raw[1] if len(raw) >= 2 else None

    removal = resolver.get(remove_tok) if remove_tok is not None else None
    presence_ok = removal is not None and removal in current
    report.checks["mutation_presence"] = presence_ok
    if not presence_ok:
        # deterministic stand-in: the seed a removal heuristic would pick anyway
        removal = min(current, key=lambda l: (g.degree(l), label_key(l)))
        report.repairs.append("replaced_invalid_removal")

    addition = resolver.get(add_tok) if add_tok is not None else None
    valid_ok = addition is not None
    repeat_ok = addition is None or addition not in current
    report.checks["mutation_valid_node"] = valid_ok
    report.checks["mutation_repeat"] = repeat_ok
    proposed = set(current) - {removal}
    if not valid_ok or not repeat_ok or addition in proposed:
        fill = _max_degree_fill(g, proposed, 1)
        addition = fill[0] if fill else removal
        report.repairs.append("replaced_invalid_addition")

    members = [lab for lab in current if lab != removal] + [addition]
    ind = Individual(members=tuple(members), provenance="mutation")
    return ind, report


# -- run results ----------------------------------------------------------------


@dataclass
class RunResult:
    config: dict
    initial: dict
    trace: list
    best_members_working: list
    best_members_original: list
    best_fitness: float
    best_fitness_original: float
    validation: dict
    repairs: dict
    degree_log: list
    events: list

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(row, sort_keys=True) + "\n" for row in self.trace)


def _population_stats(pop: Population) -> dict:
    values = [ind.fitness for ind in pop.individuals]
    n = len(values)
    mean = sum(values) / n
    sd = (sum((v - mean) ** 2 for v in values) / n) ** 0.5
    return {"best": max(values), "mean": mean, "sd": sd}


# -- the engine -----------------------------------------------------------------


class EvolutionEngine:
    """Binds a working graph, config, backend gateway and renderer into one
    reproducible run. All randomness flows through a single seeded stream."""

    def __init__(
        self,
        working: SparsifiedGraph,
        original: Graph,
        cfg: EngineConfig,
        gateway=None,
        renderer=None,
    ):
        if cfg.k > working.graph.n:
            raise EngineError(
                f"k={cfg.k} exceeds working graph size {working.graph.n}"
            )
        needs_backend = cfg.init_mode == "mllm" or cfg.reproduction_mode != "normal"
        if needs_backend and gateway is None:
            raise EngineError("mllm modes need a gateway")
        if needs_backend and renderer is None:
            raise EngineError("mllm modes need a renderer")
        self.working = working
        self.graph = working.graph
        self.original = original
        self.cfg = cfg
        self.gateway = gateway
        self.renderer = renderer
        self.rng = random.Random(cfg.rng_seed)
        self.evaluator = FitnessEvaluator(self.graph, cfg.objective, cfg.p)
        self.stats = ValidationStats()
        self.degree_log: list[dict] = []
        self.events: list[str] = []
        self._original_degree_pool: list | None = None

    # -- initialization ----------------------------------------------------

    def _sample_distinct(self, pool: list, k: int) -> tuple:
        return tuple(self.rng.sample(pool, k))

    def _metric_pool(self, metric: str) -> list:
        """Top-2k nodes by the metric on the ORIGINAL graph, restricted to
        nodes that survive into the working graph (ranking extended downward
        if the restriction thins the pool below k)."""
        if metric == "degree":
            scores = self.original.degrees()
        else:
            scores = betweenness(self.original)
        ranked = sorted(self.original.nodes(), key=lambda l: (-scores[l], label_key(l)))
        inverse = self.working.inverse_map
        survivors = [inverse[lab] for lab in ranked if lab in inverse]
        pool = [inverse[lab] for lab in ranked[: 2 * self.cfg.k] if lab in inverse]
        if len(pool) < self.cfg.k:
            pool = survivors[: self.cfg.k]
        return pool

    def _one_random_original(self) -> tuple:
        """k distinct original-graph samples that survive the node map;
        absent samples are resampled (fitness always runs on the working
        graph, so unmapped members would be unevaluable)."""
        inverse = self.working.inverse_map
        originals = list(self.original.nodes())
        picked: list = []
        guard = 0
        while len(picked) < self.cfg.k:
            guard += 1
            if guard > 10000 * self.cfg.k:
                raise EngineError("original-graph sampling cannot reach the working graph")
            lab = originals[self.rng.randrange(len(originals))]
            mapped = inverse.get(lab)
            if mapped is not None and mapped not in picked:
                picked.append(mapped)
        return tuple(picked)

    def _mllm_init_individuals(self) -> list:
        per_agent = -(-self.cfg.n_p // len(MLLM_INIT_AGENTS))
        image = self.renderer.render(phase="init")
        out: list[Individual] = []
        for agent in MLLM_INIT_AGENTS:
            system, user = prompts.init_prompt(agent, self.cfg.k)
            for _ in range(per_agent):
                ctx = ValidationContext("init", self.cfg.k, self.graph)
                try:
                    resp = self.gateway.complete(
                        GatewayRequest(
                            system_prompt=system,
                            user_prompt=user,
                            images=(image,),
                            context=OperatorContext(role=agent, k=self.cfg.k),
                        )
                    )
                    tokens = parse_node_list(resp.text, expected_len=self.cfg.k)
                except ResponseParseError:
                    tokens = []
                except GatewayError as exc:
                    self.events.append(f"init agent {agent} fell back to refined_random: {exc}")
                    members = self._sample_distinct(list(self.graph.nodes()), self.cfg.k)
                    out.append(Individual(members=members, provenance="init:refined_random"))
                    continue
                ind, report = validate_and_repair(tokens, ctx, self.cfg.repair_strictness)
                self.stats.add(report)
                ind.provenance = f"init:{agent}"
                out.append(ind)
        return out[: self.cfg.n_p]

    def initialize_population(self) -> Population:
        cfg = self.cfg
        nodes = list(self.graph.nodes())
        mode = cfg.init_mode
        makers = {
            "refined_random": lambda: self._sample_distinct(nodes, cfg.k),
            "random": self._one_random_original,
        }
        if mode == "mllm":
            individuals = self._mllm_init_individuals()
            while len(individuals) < cfg.n_p:
                individuals.append(
                    Individual(
                        members=self._sample_distinct(nodes, cfg.k),
                        provenance="init:refined_random",
                    )
                )
        else:
            if mode in ("high_degree", "high_betweenness"):
                pool = self._metric_pool("degree" if mode == "high_degree" else "betweenness")
                if len(pool) < cfg.k:
                    raise EngineError("metric pool smaller than k")
                maker = lambda: self._sample_distinct(pool, cfg.k)
            else:
                maker = makers[mode]
            individuals = [
                Individual(members=maker(), provenance=f"init:{mode}") for _ in range(cfg.n_p)
            ]

        # dedupe identical solutions by resampling, up to a retry cap
        seen: dict[tuple, int] = {}
        for idx, ind in enumerate(individuals):
            key = tuple(sorted(ind.members, key=label_key))
            retries = 0
            while key in seen and retries < cfg.init_retry_cap:
                retries += 1
                if mode == "mllm":
                    agent = MLLM_INIT_AGENTS[idx % len(MLLM_INIT_AGENTS)]
                    system, user = prompts.init_prompt(agent, cfg.k)
                    try:
                        resp = self.gateway.complete(
                            GatewayRequest(
                                system_prompt=system,
                                user_prompt=user,
                                images=(self.renderer.render(phase="init"),),
                                context=OperatorContext(role=agent, k=cfg.k),
                            )
                        )
                        tokens = parse_node_list(resp.text, expected_len=cfg.k)
                    except GatewayError:
                        tokens = []
                    new_ind, report = validate_and_repair(
                        tokens, ValidationContext("init", cfg.k, self.graph), cfg.repair_strictness
                    )
                    self.stats.add(report)
                    ind.members = new_ind.members
                elif mode in ("high_degree", "high_betweenness"):
                    pool = self._metric_pool("degree" if mode == "high_degree" else "betweenness")
                    ind.members = self._sample_distinct(pool, cfg.k)
                elif mode == "random":
                    ind.members = self._one_random_original()
                else:
                    ind.members = self._sample_distinct(nodes, cfg.k)
                key = tuple(sorted(ind.members, key=label_key))
            if key in seen:
                self.events.append(f"kept duplicate individual at slot {idx} after retry cap")
            seen[key] = idx
        return Population(individuals=individuals, generation=0)

    # -- selection and reproduction ------------------------------------------

    def select_parents(self, pop: Population) -> tuple[int, int]:
        """Two distinct parents by binary tournament (fitness ties go to the
        lower index; identical second winner re-drawn, capped)."""
        n = len(pop.individuals)
        if n < 2:
            raise EngineError("selection needs a population of at least 2")

        def tournament() -> int:
            a, b = self.rng.sample(range(n), 2)
            fa, fb = pop.individuals[a].fitness, pop.individuals[b].fitness
            if fa > fb:
                return a
            if fb > fa:
                return b
            return min(a, b)

        first = tournament()
        for _ in range(100):
            second = tournament()
            if second != first:
                return first, second
        fallback = max(
            (i for i in range(n) if i != first),
            key=lambda i: (pop.individuals[i].fitness, -i),
        )
        return first, fallback

    def _render_request(self, system, user, images, role, **ctx) -> GatewayRequest:
        return GatewayRequest(
            system_prompt=system,
            user_prompt=user,
            images=tuple(images),
            context=OperatorContext(role=role, **ctx),
        )

    def _normal_crossover(self, pa: Individual, pb: Individual) -> Individual:
        k = self.cfg.k
        slots = [
            (pa.members[i] if self.rng.random() < 0.5 else pb.members[i]) for i in range(k)
        ]
        child: list = []
        for lab in slots:
            if lab not in child:
                child.append(lab)
        union = sorted(set(pa.members) | set(pb.members), key=label_key)
        spare = [lab for lab in union if lab not in child]
        self.rng.shuffle(spare)
        while len(child) < k and spare:
            child.append(spare.pop())
        if len(child) < k:
            rest = sorted(set(self.graph.nodes()) - set(child), key=label_key)
            self.rng.shuffle(rest)
            child.extend(rest[: k - len(child)])
        return Individual(members=tuple(child), provenance="crossover:normal")

    def crossover_step(self, pop: Population, idx_a: int, idx_b: int) -> Individual:
        pa, pb = pop.individuals[idx_a], pop.individuals[idx_b]
        if self.rng.random() >= self.cfg.p_c:
            fitter = pa if (pa.fitness, -idx_a) >= (pb.fitness, -idx_b) else pb
            return Individual(
                members=fitter.members, provenance="clone", parents=(idx_a, idx_b)
            )
        if self.cfg.reproduction_mode == "normal":
            child = self._normal_crossover(pa, pb)
            child.parents = (idx_a, idx_b)
            return child
        system, user = prompts.crossover_prompt(self.cfg.k)
        try:
            images = (
                self.renderer.render(pa.members, "crossover"),
                self.renderer.render(pb.members, "crossover"),
            )
            resp = self.gateway.complete(
                self._render_request(
                    system, user, images, "crossover",
                    k=self.cfg.k, parents=(pa.members, pb.members),
                )
            )
            tokens = parse_node_list(resp.text, expected_len=self.cfg.k)
        except ResponseParseError:
            tokens = []
        except GatewayError as exc:
            self.events.append(f"crossover fell back to normal: {exc}")
            child = self._normal_crossover(pa, pb)
            child.parents = (idx_a, idx_b)
            return child
        ctx = ValidationContext(
            "crossover", self.cfg.k, self.graph, parents=(pa.members, pb.members)
        )
        child, report = validate_and_repair(tokens, ctx, self.cfg.repair_strictness)
        self.stats.add(report)
        child.provenance = "crossover:mllm"
        child.parents = (idx_a, idx_b)
        return child

    def _log_swap(self, generation: int, operator: str, removed, added) -> None:
        self.degree_log.append(
            {
                "generation": generation,
                "operator": operator,
                "removed": removed,
                "removed_degree": self.graph.degree(removed),
                "added": added,
                "added_degree": self.graph.degree(added),
            }
        )

    def _normal_mutation(self, ind: Individual, generation: int) -> Individual:
        members = list(ind.members)
        idx = self.rng.randrange(len(members))
        non_seed = sorted(set(self.graph.nodes()) - set(members), key=label_key)
        if not non_seed:
            return ind
        new = non_seed[self.rng.randrange(len(non_seed))]
        removed = members[idx]
        members[idx] = new
        self._log_swap(generation, "normal", removed, new)
        return Individual(members=tuple(members), provenance="mutation:normal", parents=ind.parents)

    def mutation_step(self, ind: Individual, generation: int) -> Individual:
        if self.rng.random() >= self.cfg.p_m:
            return ind
        mode = self.cfg.reproduction_mode
        if mode == "normal":
            return self._normal_mutation(ind, generation)
        try:
            image = self.renderer.render(ind.members, "mutation")
            if mode == "mllm_twophase":
                sys_r, usr_r = prompts.mutation_removal_prompt()
                resp_r = self.gateway.complete(
                    self._render_request(
                        sys_r, usr_r, (image,), "mutation_remove", solution=ind.members
                    )
                )
                sys_a, usr_a = prompts.mutation_addition_prompt()
                resp_a = self.gateway.complete(
                    self._render_request(
                        sys_a, usr_a, (image,), "mutation_add", solution=ind.members
                    )
                )
                raw_pair = []
                for resp in (resp_r, resp_a):
                    try:
                        raw_pair.append(parse_node_list(resp.text)[0])
                    except ResponseParseError:
                        raw_pair.append("")
            else:
                sys_o, usr_o = prompts.mutation_oneshot_prompt()
                resp = self.gateway.complete(
                    self._render_request(
                        sys_o, usr_o, (image,), "mutation_oneshot", solution=ind.members
                    )
                )
                try:
                    raw_pair = list(parse_swap_pair(resp.text))
                except ResponseParseError:
                    raw_pair = []
        except GatewayError as exc:
            self.events.append(f"mutation fell back to normal: {exc}")
            return self._normal_mutation(ind, generation)
        ctx = ValidationContext(
            "mutation", self.cfg.k, self.graph, current=ind.members
        )
        mutated, report = validate_and_repair(raw_pair, ctx, self.cfg.repair_strictness)
        self.stats.add(report)
        removed = next((m for m in ind.members if m not in mutated.members), None)
        added = next((m for m in mutated.members if m not in ind.members), None)
        if removed is not None and added is not None:
            self._log_swap(generation, mode, removed, added)
        mutated.provenance = f"mutation:{mode}"
        mutated.parents = ind.parents
        return mutated

    # -- the loop ------------------------------------------------------------

    def _evaluate(self, pop: Population) -> None:
        # committed in individual-index order for reproducibility
        for ind in pop.individuals:
            ind.fitness = self.evaluator.evaluate(ind.members)

    def run(self) -> RunResult:
        cfg = self.cfg
        pop = self.initialize_population()
        self._evaluate(pop)
        initial = _population_stats(pop)
        best = max(pop.individuals, key=lambda i: i.fitness)
        best_so_far = Individual(
            members=best.members, fitness=best.fitness, provenance=best.provenance
        )
        trace: list[dict] = []
        for gen in range(1, cfg.generations + 1):
            stats_before = {k: dict(v) for k, v in self.stats.counts.items()}
            offspring: list[Individual] = []
            for _ in range(cfg.n_p):
                ia, ib = self.select_parents(pop)
                child = self.crossover_step(pop, ia, ib)
                child = self.mutation_step(child, gen)
                offspring.append(child)
            offspring[0] = Individual(
                members=best_so_far.members,
                fitness=best_so_far.fitness,
                provenance="elite",
            )
            pop = Population(individuals=offspring, generation=gen)
            self._evaluate(pop)
            gen_best = max(pop.individuals, key=lambda i: i.fitness)
            if gen_best.fitness > best_so_far.fitness:
                best_so_far = Individual(
                    members=gen_best.members,
                    fitness=gen_best.fitness,
                    provenance=gen_best.provenance,
                )
            row = _population_stats(pop)
            row["generation"] = gen
            row["best_so_far"] = best_so_far.fitness
            row["validation"] = {
                name: {
                    "passed": self.stats.counts[name]["passed"] - stats_before[name]["passed"],
                    "failed": self.stats.counts[name]["failed"] - stats_before[name]["failed"],
                }
                for name in CHECKS
                if self.stats.counts[name] != stats_before[name]
            }
            trace.append(row)

        originals = list(self.working.to_original(best_so_far.members))
        best_original_fitness = self._score_on_original(originals)
        repairs: dict[str, int] = {}
        for r in self.stats.repairs:
            repairs[r] = repairs.get(r, 0) + 1
        return RunResult(
            config=asdict(cfg),
            initial=initial,
            trace=trace,
            best_members_working=list(best_so_far.members),
            best_members_original=originals,
            best_fitness=best_so_far.fitness,
            best_fitness_original=best_original_fitness,
            validation=self.stats.merged(),
            repairs=repairs,
            degree_log=self.degree_log,
            events=self.events,
        )

    def _score_on_original(self, members: list) -> float:
        evaluator = FitnessEvaluator(self.original, self.cfg.objective, self.cfg.p)
        return evaluator.evaluate(members)


# -- module-level operation wrappers ---------------------------------------------


def initialize_population(
    working: SparsifiedGraph,
    original: Graph,
    cfg: EngineConfig,
    gateway=None,
    renderer=None,
) -> Population:
    engine = EvolutionEngine(working, original, cfg, gateway, renderer)
    return engine.initialize_population()


def evolve(
    working: SparsifiedGraph,
    original: Graph,
    cfg: EngineConfig,
    gateway=None,
    renderer=None,
) -> RunResult:
    return EvolutionEngine(working, original, cfg, gateway, renderer).run()
