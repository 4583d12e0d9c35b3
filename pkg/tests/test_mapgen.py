from __future__ import annotations

import statistics

import pytest

from prospect.mapgen import GeneratorConfig, MapGenerationError, difficulty_sweep_config, generate_map
from prospect.maps import min_path


SMALL = GeneratorConfig(n_holds=16, path_hops=4, decoy_branches=1)


class TestDeterminism:
    def test_same_seed_same_map(self):
        assert generate_map(7, SMALL) == generate_map(7, SMALL)

    def test_different_seeds_differ(self):
        assert generate_map(7, SMALL) != generate_map(8, SMALL)


class TestPostconditions:
    def test_solvable_config_reachable(self):
        for seed in range(12):
            spec = generate_map(seed, SMALL)
            assert min_path(spec).reachable

    def test_backbone_sets_min_hops(self):
        # clearance construction: the backbone is the unique route
        for seed in range(12):
            spec = generate_map(seed, SMALL)
            assert min_path(spec).hop_count == 4

    def test_unsolvable_config(self):
        config = GeneratorConfig(n_holds=6, solvable=False)
        spec = generate_map(3, config)
        assert not min_path(spec).reachable

    def test_map_passes_invariants(self):
        spec = generate_map(5, SMALL)
        assert len(spec.holds) == SMALL.n_holds
        assert len({h.id for h in spec.holds}) == SMALL.n_holds

    def test_unsatisfiable_config_raises(self):
        config = GeneratorConfig(n_holds=2, path_hops=40, max_retries=5)
        with pytest.raises(MapGenerationError):
            generate_map(1, config)


class TestDifficultySweep:
    def test_median_min_hops_increases_across_levels(self):
        medians = []
        for level in range(3):
            config = difficulty_sweep_config(level)
            hops = []
            for seed in range(100):
                spec = generate_map(seed, config)
                solution = min_path(spec)
                assert solution.reachable
                hops.append(solution.hop_count)
            medians.append(statistics.median(hops))
        assert medians[0] < medians[1] < medians[2]


class TestConfigFormat:
    def test_round_trip(self):
        config = GeneratorConfig(n_holds=20, path_hops=5)
        assert GeneratorConfig.from_json(config.to_json()) == config

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            GeneratorConfig.from_json({"bogus": 1})

    def test_bad_gap_fraction_rejected(self):
        with pytest.raises(ValueError):
            GeneratorConfig(gap_fraction=(0.9, 0.2))
