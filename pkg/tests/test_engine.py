import json
import random

import pytest

from evograph.engine import (
    EngineConfig,
    EngineError,
    EvolutionEngine,
    Individual,
    Population,
    ValidationContext,
    evolve,
    initialize_population,
    validate_and_repair,
)
from evograph.fitness import edv
from evograph.gateway import GatewayError, MockGateway, MockOracleConfig
from evograph.graph import Graph
from evograph.render import SolutionRenderer
from evograph.sparsify import SparsifiedGraph
from evograph import synth


def hub_graph() -> Graph:
    edges = [(0, i) for i in range(1, 8)] + [(1, i) for i in range(2, 6)]
    edges += [(8, 0), (9, 0), (8, 1), (9, 2), (10, 3)]
    return Graph.from_edges(edges, nodes=range(11))


def make_engine(g=None, *, gateway=True, **cfg_kwargs) -> EvolutionEngine:
    g = g or hub_graph()
    defaults = dict(k=3, n_p=6, generations=2, rng_seed=1)
    defaults.update(cfg_kwargs)
    cfg = EngineConfig(**defaults)
    sg = SparsifiedGraph.passthrough(g)
    gw = MockGateway(g) if gateway else None
    renderer = SolutionRenderer(g, cfg.layout_style) if gateway else None
    return EvolutionEngine(sg, g, cfg, gw, renderer)


class TestEngineConfig:
    def test_validation(self):
        with pytest.raises(EngineError):
            EngineConfig(k=0)
        with pytest.raises(EngineError):
            EngineConfig(k=2, n_p=1)
        with pytest.raises(EngineError):
            EngineConfig(k=2, p_c=1.5)
        with pytest.raises(EngineError):
            EngineConfig(k=2, init_mode="psychic")
        with pytest.raises(EngineError):
            EngineConfig(k=2, objective="happiness")

    def test_k_larger_than_graph_rejected(self):
        with pytest.raises(EngineError):
            make_engine(synth.path_graph(3), k=5)

    def test_mllm_mode_needs_backend(self):
        g = hub_graph()
        sg = SparsifiedGraph.passthrough(g)
        cfg = EngineConfig(k=2, init_mode="mllm")
        with pytest.raises(EngineError):
            EvolutionEngine(sg, g, cfg, None, None)


class TestValidateAndRepair:
    def test_clean_candidate_untouched(self):
        g = hub_graph()
        ind, report = validate_and_repair(["0", "1", "2"], ValidationContext("init", 3, g))
        assert ind.members == (0, 1, 2)
        assert report.passed_all() and report.repairs == []

    def test_unknown_label_repaired(self):
        g = hub_graph()
        ind, report = validate_and_repair(["0", "99", "2"], ValidationContext("init", 3, g))
        assert not report.checks["init_valid_node"]
        assert report.checks["init_size"]
        assert len(ind.members) == 3
        assert all(g.has_node(m) for m in ind.members)

    def test_empty_candidate_fully_repaired_and_flagged(self):
        g = hub_graph()
        ind, report = validate_and_repair([], ValidationContext("init", 3, g))
        assert len(ind.members) == 3
        assert not any(report.checks.values())

    def test_low_degree_soft_flag_never_repaired(self):
        g = hub_graph()
        ind, report = validate_and_repair(["6", "7", "10"], ValidationContext("init", 3, g))
        assert not report.checks["init_low_degree"]
        assert ind.members == (6, 7, 10)  # flag only, members kept

    def test_crossover_strict_replaces_nonparent(self):
        g = hub_graph()
        ctx = ValidationContext("crossover", 3, g, parents=((0, 1, 2), (2, 3, 4)))
        ind, report = validate_and_repair(["0", "1", "9"], ctx, "strict")
        assert not report.checks["crossover_parent_source"]
        union = {0, 1, 2, 3, 4}
        assert set(ind.members) <= union

    def test_crossover_lax_records_only(self):
        g = hub_graph()
        ctx = ValidationContext("crossover", 3, g, parents=((0, 1, 2), (2, 3, 4)))
        ind, report = validate_and_repair(["0", "1", "9"], ctx, "lax")
        assert not report.checks["crossover_parent_source"]
        assert 9 in ind.members

    def test_crossover_duplicate_repaired(self):
        g = hub_graph()
        ctx = ValidationContext("crossover", 3, g, parents=((0, 1, 2), (2, 3, 4)))
        ind, report = validate_and_repair(["0", "0", "1"], ctx)
        assert not report.checks["crossover_duplicate"]
        assert len(set(ind.members)) == 3

    def test_oversized_truncated(self):
        g = hub_graph()
        ind, report = validate_and_repair(
            ["0", "1", "2", "3"], ValidationContext("init", 3, g)
        )
        assert not report.checks["init_size"]
        assert ind.members == (0, 1, 2)

    def test_mutation_valid_swap(self):
        g = hub_graph()
        ctx = ValidationContext("mutation", 3, g, current=(0, 1, 10))
        ind, report = validate_and_repair(["10", "2"], ctx)
        assert report.passed_all()
        assert set(ind.members) == {0, 1, 2}

    def test_mutation_invalid_removal_repaired(self):
        g = hub_graph()
        ctx = ValidationContext("mutation", 3, g, current=(0, 1, 10))
        ind, report = validate_and_repair(["7", "2"], ctx)  # 7 is not a seed
        assert not report.checks["mutation_presence"]
        assert len(ind.members) == 3 and len(set(ind.members)) == 3

    def test_mutation_repeat_addition_repaired(self):
        g = hub_graph()
        ctx = ValidationContext("mutation", 3, g, current=(0, 1, 10))
        ind, report = validate_and_repair(["10", "0"], ctx)
        assert not report.checks["mutation_repeat"]
        assert len(set(ind.members)) == 3

    def test_random_garbage_repair_total(self):
        g = hub_graph()
        rng = random.Random(0)
        for _ in range(100):
            tokens = [str(rng.randint(-5, 30)) for _ in range(rng.randint(0, 6))]
            ind, _ = validate_and_repair(tokens, ValidationContext("init", 3, g))
            assert len(ind.members) == 3
            assert len(set(ind.members)) == 3
            assert all(g.has_node(m) for m in ind.members)


class TestSelection:
    def population(self, fits):
        return Population([Individual(members=(i,), fitness=f) for i, f in enumerate(fits)])

    def test_two_individuals_forced_pair(self):
        engine = make_engine(gateway=False)
        pop = self.population([1.0, 2.0])
        assert set(engine.select_parents(pop)) == {0, 1}

    def test_strictly_fitter_always_wins_its_tournaments(self):
        engine = make_engine(gateway=False)
        pop = self.population([1.0, 5.0, 2.0, 0.5])
        wins = [engine.select_parents(pop)[0] for _ in range(200)]
        # index 1 wins every tournament it enters; it must dominate the firsts
        assert wins.count(1) > 100

    def test_win_rates_monotone_in_fitness_rank(self):
        engine = make_engine(gateway=False, rng_seed=13)
        pop = self.population([1.0, 2.0, 3.0, 4.0, 5.0])
        counts = {i: 0 for i in range(5)}
        for _ in range(10_000):
            a, b = engine.select_parents(pop)
            counts[a] += 1
            counts[b] += 1
        assert counts[4] > counts[3] > counts[2] > counts[1] > counts[0]

    def test_population_of_one_errors(self):
        engine = make_engine(gateway=False)
        with pytest.raises(EngineError):
            engine.select_parents(self.population([1.0]))


class TestCrossoverStep:
    def test_pc_zero_clones_fitter(self):
        engine = make_engine(gateway=False, p_c=0.0)
        pop = Population([
            Individual(members=(0, 1, 2), fitness=1.0),
            Individual(members=(3, 4, 5), fitness=9.0),
        ])
        for _ in range(10):
            child = engine.crossover_step(pop, 0, 1)
            assert child.members == (3, 4, 5)
            assert child.provenance == "clone"

    def test_identical_parents_yield_parent_set(self):
        for mode in ("normal", "mllm_twophase"):
            engine = make_engine(p_c=1.0, reproduction_mode=mode)
            pop = Population([
                Individual(members=(0, 1, 2), fitness=1.0),
                Individual(members=(0, 1, 2), fitness=1.0),
            ])
            child = engine.crossover_step(pop, 0, 1)
            assert set(child.members) == {0, 1, 2}

    def test_mock_crossover_top_degree_subset(self):
        engine = make_engine(p_c=1.0, reproduction_mode="mllm_twophase")
        pop = Population([
            Individual(members=(8, 9, 0), fitness=1.0),
            Individual(members=(0, 1, 10), fitness=2.0),
        ])
        child = engine.crossover_step(pop, 0, 1)
        union = {8, 9, 0, 1, 10}
        assert set(child.members) <= union
        # degrees: 0 -> 9, 1 -> 6, then 8/9 (2) over 10 (1)
        assert set(child.members) == {0, 1, 8}

    def test_normal_crossover_valid_child(self):
        engine = make_engine(gateway=False, p_c=1.0)
        pop = Population([
            Individual(members=(0, 1, 2), fitness=1.0),
            Individual(members=(2, 3, 4), fitness=2.0),
        ])
        for _ in range(25):
            child = engine.crossover_step(pop, 0, 1)
            assert len(child.members) == 3
            assert len(set(child.members)) == 3


class TestMutationStep:
    def test_pm_zero_identity(self):
        engine = make_engine(gateway=False, p_m=0.0)
        ind = Individual(members=(0, 1, 2), fitness=1.0)
        assert engine.mutation_step(ind, 1) is ind

    def test_mock_twophase_removes_min_adds_max(self):
        engine = make_engine(p_m=1.0, reproduction_mode="mllm_twophase")
        ind = Individual(members=(0, 1, 10), fitness=1.0)
        mutated = engine.mutation_step(ind, 1)
        assert 10 not in mutated.members  # min-degree seed removed
        assert 2 in mutated.members  # max-degree non-seed added
        entry = engine.degree_log[-1]
        assert entry["removed"] == 10 and entry["added"] == 2

    def test_fault_repair_keeps_solution_valid(self):
        g = hub_graph()
        cfg = EngineConfig(k=3, n_p=4, p_m=1.0, reproduction_mode="mllm_oneshot", rng_seed=2)
        sg = SparsifiedGraph.passthrough(g)
        gw = MockGateway(g, MockOracleConfig(add_repeat=1.0))
        engine = EvolutionEngine(sg, g, cfg, gw, SolutionRenderer(g, "KK"))
        ind = Individual(members=(0, 1, 10), fitness=1.0)
        mutated = engine.mutation_step(ind, 1)
        assert len(set(mutated.members)) == 3
        assert all(g.has_node(m) for m in mutated.members)
        failures = engine.stats.counts["mutation_repeat"]["failed"]
        assert failures == 1

    def test_gateway_failure_falls_back_to_normal(self):
        class ExplodingGateway:
            def complete(self, req):
                raise GatewayError("backend down")

        g = hub_graph()
        cfg = EngineConfig(k=3, n_p=4, p_m=1.0, reproduction_mode="mllm_twophase", rng_seed=3)
        engine = EvolutionEngine(
            SparsifiedGraph.passthrough(g), g, cfg, ExplodingGateway(), SolutionRenderer(g, "KK")
        )
        ind = Individual(members=(0, 1, 2), fitness=1.0)
        mutated = engine.mutation_step(ind, 1)
        assert mutated.members != ind.members
        assert any("fell back to normal" in e for e in engine.events)


class TestInitialization:
    def test_refined_random_deterministic(self):
        a = make_engine(gateway=False, rng_seed=11).initialize_population()
        b = make_engine(gateway=False, rng_seed=11).initialize_population()
        assert [i.members for i in a.individuals] == [i.members for i in b.individuals]

    def test_high_degree_pool(self):
        g = synth.star_graph(9)
        engine = make_engine(g, gateway=False, k=1, n_p=4, init_mode="high_degree")
        pop = engine.initialize_population()
        pool = {0, 1}  # center plus the smallest-label leaf (top-2k = 2)
        for ind in pop.individuals:
            assert set(ind.members) <= pool

    def test_random_mode_maps_to_working_graph(self):
        g = synth.planted_partition([20, 20], 0.4, 0.05, seed=2)
        from evograph.community import detect_fastgreedy
        from evograph.sparsify import sparsify

        sg = sparsify(g, detect_fastgreedy(g), 12, 20, rng_seed=1)
        cfg = EngineConfig(k=3, n_p=5, init_mode="random", rng_seed=4)
        pop = initialize_population(sg, g, cfg)
        for ind in pop.individuals:
            assert all(sg.graph.has_node(m) for m in ind.members)

    def test_mllm_init_counts_per_agent(self):
        engine = make_engine(n_p=15, init_mode="mllm", k=3)
        pop = engine.initialize_population()
        assert len(pop.individuals) == 15
        by_agent = {}
        for ind in pop.individuals:
            by_agent[ind.provenance] = by_agent.get(ind.provenance, 0) + 1
        assert by_agent == {
            "init:init_intelligent": 5,
            "init:init_betweenness_spread": 5,
            "init:init_degree_central": 5,
        }

    def test_mllm_gateway_failure_falls_back(self):
        class ExplodingGateway:
            def complete(self, req):
                raise GatewayError("backend down")

        g = hub_graph()
        cfg = EngineConfig(k=3, n_p=6, init_mode="mllm", rng_seed=5)
        engine = EvolutionEngine(
            SparsifiedGraph.passthrough(g), g, cfg, ExplodingGateway(), SolutionRenderer(g, "KK")
        )
        pop = engine.initialize_population()
        assert len(pop.individuals) == 6
        assert all(ind.provenance == "init:refined_random" for ind in pop.individuals)
        assert engine.events


class TestEvolve:
    def test_zero_generations_returns_initial(self):
        g = hub_graph()
        cfg = EngineConfig(k=3, n_p=5, generations=0, rng_seed=6)
        result = evolve(SparsifiedGraph.passthrough(g), g, cfg)
        assert result.trace == []
        assert result.best_fitness == result.initial["best"]

    def test_deterministic_json(self):
        g = hub_graph()
        cfg = EngineConfig(k=3, n_p=6, generations=3, reproduction_mode="mllm_twophase", rng_seed=7)
        runs = []
        for _ in range(2):
            sg = SparsifiedGraph.passthrough(g)
            gw = MockGateway(g, MockOracleConfig(rng_seed=70))
            result = evolve(sg, g, cfg, gw, SolutionRenderer(g, "KK"))
            runs.append(result.to_json())
        assert runs[0] == runs[1]

    def test_best_so_far_monotone(self):
        g = synth.barabasi_albert(40, 2, seed=8)
        cfg = EngineConfig(k=4, n_p=8, generations=6, rng_seed=9)
        result = evolve(SparsifiedGraph.passthrough(g), g, cfg)
        series = [result.initial["best"]] + [row["best_so_far"] for row in result.trace]
        assert all(a <= b + 1e-12 for a, b in zip(series, series[1:]))
        assert len(result.trace) == 6

    def test_population_size_constant(self):
        engine = make_engine(gateway=False, generations=3, n_p=7)
        result = engine.run()
        assert all(isinstance(row["mean"], float) for row in result.trace)

    def test_zero_fault_mock_all_checks_pass(self):
        g = hub_graph()
        cfg = EngineConfig(
            k=3, n_p=6, generations=4, p_c=0.9, p_m=0.9,
            init_mode="mllm", reproduction_mode="mllm_twophase", rng_seed=10,
        )
        sg = SparsifiedGraph.passthrough(g)
        engine = EvolutionEngine(sg, g, cfg, MockGateway(g), SolutionRenderer(g, "KK"))
        result = engine.run()
        for check, counts in result.validation.items():
            assert counts["failed"] == 0, check

    def test_mock_added_degree_exceeds_removed(self):
        g = synth.barabasi_albert(30, 2, seed=11)
        cfg = EngineConfig(
            k=4, n_p=8, generations=6, p_c=0.3, p_m=0.6,
            reproduction_mode="mllm_twophase", rng_seed=12,
        )
        sg = SparsifiedGraph.passthrough(g)
        engine = EvolutionEngine(sg, g, cfg, MockGateway(g), SolutionRenderer(g, "KK"))
        result = engine.run()
        swaps = [e for e in result.degree_log if e["operator"] == "mllm_twophase"]
        assert swaps
        added = sum(e["added_degree"] for e in swaps) / len(swaps)
        removed = sum(e["removed_degree"] for e in swaps) / len(swaps)
        assert added >= removed

    def test_fitness_order_invariance(self, monkeypatch):
        # a strictly increasing transform of the fitness must not change the
        # selected winners or the final best individual
        g = synth.barabasi_albert(25, 2, seed=13)
        cfg = EngineConfig(k=3, n_p=6, generations=4, rng_seed=14)
        base = evolve(SparsifiedGraph.passthrough(g), g, cfg)

        import evograph.fitness as fitness_mod
        from evograph.fitness import FitnessValue

        real_edv = fitness_mod.edv

        def transformed(graph, members, p):
            value = real_edv(graph, members, p).value
            return FitnessValue(value**3 + 5.0, "edv")

        monkeypatch.setattr(fitness_mod, "edv", transformed)
        warped = evolve(SparsifiedGraph.passthrough(g), g, cfg)
        assert warped.best_members_working == base.best_members_working

    def test_original_rescore_uses_node_map(self):
        g = synth.planted_partition([25, 25], 0.35, 0.03, seed=15)
        from evograph.community import detect_fastgreedy
        from evograph.sparsify import sparsify

        sg = sparsify(g, detect_fastgreedy(g), 15, 25, rng_seed=3)
        cfg = EngineConfig(k=3, n_p=5, generations=2, rng_seed=16)
        result = evolve(sg, g, cfg)
        mapped = tuple(result.best_members_original)
        assert all(g.has_node(m) for m in mapped)
        assert result.best_fitness_original == pytest.approx(
            edv(g, mapped, cfg.p).value
        )
