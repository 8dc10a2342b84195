"""Gacs-Korner and Wyner common information."""

import numpy as np
import pytest

from infosep.common_info import (
    gacs_korner,
    gk_via_components,
    wyner_grid_oracle,
    wyner_solve,
)
from infosep.dist import (
    JointDistribution,
    entropy,
    marginals,
    mutual_information,
    pushforward,
)
from infosep.errors import NoFeasiblePoint
from infosep.harness import random_joint, random_refinement, refine_embedding
from infosep.modal import reduce_joint

DSBS01 = np.array([[0.45, 0.05], [0.05, 0.45]])


def binary_entropy(p):
    return -(p * np.log2(p) + (1 - p) * np.log2(1 - p))


# Closed-form Wyner value for DSBS(0.1): the crossover 0.1 factors through
# two identical binary symmetric channels with parameter a, 2a(1-a) = 0.1,
# and the optimum is 1 + h(0.1) - 2 h(a).
WYNER_A = (1.0 - np.sqrt(1.0 - 2.0 * 0.1)) / 2.0
WYNER_DSBS01 = 1.0 + binary_entropy(0.1) - 2.0 * binary_entropy(WYNER_A)


def block_joint(masses, sizes, seed=0):
    """Blocks with given masses; random positive table inside each block."""
    rng = np.random.default_rng(seed)
    nx = sum(s[0] for s in sizes)
    ny = sum(s[1] for s in sizes)
    p = np.zeros((nx, ny))
    ox = oy = 0
    for mass, (bx, by) in zip(masses, sizes):
        cell = rng.dirichlet(np.ones(bx * by)).reshape(bx, by)
        p[ox:ox + bx, oy:oy + by] = mass * cell
        ox += bx
        oy += by
    return JointDistribution(p)


def two_block_uniform():
    p = np.zeros((4, 4))
    p[:2, :2] = 0.125
    p[2:, 2:] = 0.125
    return JointDistribution(p)


class TestGacsKorner:
    def test_product_zero(self):
        j = JointDistribution(np.outer([0.3, 0.7], [0.5, 0.5]))
        r = gacs_korner(j)
        assert r.k == 0
        assert r.value.value == 0.0
        assert r.common_map_x.image_size == 1

    def test_full_support_dsbs_zero(self, dsbs01):
        r = gacs_korner(dsbs01)
        assert r.k == 0
        assert r.value.value == 0.0

    def test_identity_on_four_symbols(self):
        j = JointDistribution(np.eye(4) / 4)
        r = gacs_korner(j)
        assert r.k == 3
        assert r.value.value == pytest.approx(2.0, abs=1e-12)

    def test_two_block_uniform_exactly_one_bit(self):
        r = gacs_korner(two_block_uniform())
        assert r.k == 1
        assert r.value.value == 1.0
        assert r.component_count == 2

    def test_three_blocks(self):
        j = block_joint([0.5, 0.25, 0.25], [(2, 2), (2, 1), (1, 2)], seed=4)
        r = gacs_korner(j)
        assert r.value.value == pytest.approx(1.5, abs=1e-9)
        assert r.k == 2

    def test_common_maps_agree_on_support(self):
        j = block_joint([0.4, 0.6], [(2, 3), (3, 2)], seed=1)
        r = gacs_korner(j)
        fx = r.common_map_x.assignment
        gy = r.common_map_y.assignment
        for x in range(j.nx):
            for y in range(j.ny):
                if j.p[x, y] > 0.0:
                    assert fx[x] == gy[y]

    def test_value_is_entropy_of_common_part(self):
        j = block_joint([0.3, 0.45, 0.25], [(1, 2), (2, 2), (2, 1)], seed=2)
        r = gacs_korner(j)
        px, _ = marginals(j)
        masses = np.zeros(r.common_map_x.image_size)
        np.add.at(masses, r.common_map_x.assignment, px)
        assert r.value.value == pytest.approx(entropy(masses).value, abs=1e-12)

    def test_bounded_by_min_entropy(self):
        for seed in range(10):
            j = block_joint([0.5, 0.5], [(2, 1), (1, 3)], seed=seed)
            r = gacs_korner(j)
            px, py = marginals(j)
            assert r.value.value <= min(entropy(px).value,
                                        entropy(py).value) + 1e-9


class TestComponentOracle:
    def test_dsbs_single_component(self, dsbs01):
        r = gk_via_components(dsbs01)
        assert r.component_count == 1
        assert r.value.value == 0.0

    def test_two_block(self):
        r = gk_via_components(two_block_uniform())
        assert r.component_count == 2
        assert r.value.value == 1.0

    def test_three_block_masses(self):
        j = block_joint([0.5, 0.25, 0.25], [(2, 2), (1, 2), (2, 1)], seed=6)
        r = gk_via_components(j)
        assert r.value.value == pytest.approx(1.5, abs=1e-12)

    def test_agreement_with_spectral_on_random_blocks(self):
        rng = np.random.default_rng(2718)
        for case in range(25):
            nblocks = 1 + case % 4
            masses = rng.dirichlet(np.full(nblocks, 2.0))
            sizes = [(int(rng.integers(1, 4)), int(rng.integers(1, 4)))
                     for _ in range(nblocks)]
            j = block_joint(masses, sizes, seed=case)
            a = gacs_korner(j)
            b = gk_via_components(j)
            assert a.value.value == pytest.approx(b.value.value, abs=1e-9)
            assert a.component_count == b.component_count
            # identical partitions up to relabeling
            pa = a.common_map_x.assignment
            pb = b.common_map_x.assignment
            for i in range(j.nx):
                for k in range(j.nx):
                    assert (pa[i] == pa[k]) == (pb[i] == pb[k])

    def test_invariance_under_refinement(self):
        base = block_joint([0.5, 0.5], [(1, 1), (1, 1)], seed=0)
        refined, s, t = refine_embedding(random_refinement(base, 4, 5, seed=13))
        ra = gacs_korner(refined)
        rb = gacs_korner(reduce_joint(refined, s, t))
        assert ra.k == rb.k
        assert ra.value.value == pytest.approx(rb.value.value, abs=1e-9)


class TestWynerSolve:
    def test_product_near_zero(self):
        j = JointDistribution(np.outer([0.3, 0.7], [0.5, 0.5]))
        r = wyner_solve(j, restarts=4, seed=0)
        assert r.converged
        assert float(r.value) <= 1e-4

    def test_identity_one_bit(self):
        j = JointDistribution(np.eye(2) / 2)
        r = wyner_solve(j, restarts=4, seed=0)
        assert r.converged
        assert float(r.value) == pytest.approx(1.0, abs=1e-6)

    def test_dsbs_closed_form(self, dsbs01):
        r = wyner_solve(dsbs01, card_w=2, restarts=10, seed=0)
        assert r.converged
        assert float(r.value) == pytest.approx(WYNER_DSBS01, abs=5e-3)
        assert float(r.markov_residual) <= 1e-6

    def test_feasibility_of_accepted_result(self, dsbs01):
        r = wyner_solve(dsbs01, card_w=2, restarts=6, seed=1)
        if r.converged:
            assert float(r.markov_residual) <= 1e-6

    def test_kernel_shape_and_rows(self, dsbs01):
        r = wyner_solve(dsbs01, card_w=3, restarts=2, seed=0)
        assert r.kernel.k.shape == (4, 3)
        np.testing.assert_allclose(r.kernel.k.sum(axis=1), 1.0, atol=1e-9)

    def test_value_between_mi_and_min_entropy(self):
        for seed in (0, 1, 2):
            j = random_joint(3, 3, seed=seed)
            r = wyner_solve(j, card_w=3, restarts=2, max_iters=300, seed=0)
            px, py = marginals(j)
            mi = mutual_information(j).value
            cap = min(entropy(px).value, entropy(py).value)
            assert float(r.value) >= mi - max(1e-6, float(r.markov_residual))
            assert float(r.value) <= cap + 5e-3

    def test_deterministic_given_seed(self, dsbs01):
        a = wyner_solve(dsbs01, card_w=2, restarts=3, seed=7)
        b = wyner_solve(dsbs01, card_w=2, restarts=3, seed=7)
        assert float(a.value) == float(b.value)
        np.testing.assert_array_equal(a.kernel.k, b.kernel.k)

    def test_invariance_under_refinement(self):
        base = random_joint(2, 2, alpha=2.0, seed=5)
        refined, s, t = refine_embedding(random_refinement(base, 4, 4, seed=5))
        ra = wyner_solve(refined, card_w=4, restarts=6, seed=0)
        rb = wyner_solve(base, restarts=6, seed=0)
        assert abs(float(ra.value) - float(rb.value)) <= 5e-3


class TestWynerGridOracle:
    def test_identity_binary(self):
        j = JointDistribution(np.eye(2) / 2)
        v = wyner_grid_oracle(j, grid_steps=101)
        assert float(v) == pytest.approx(1.0, abs=0.01)

    def test_product(self):
        j = JointDistribution(np.outer([0.5, 0.5], [0.5, 0.5]))
        v = wyner_grid_oracle(j, grid_steps=101)
        assert float(v) == pytest.approx(0.0, abs=0.01)

    def test_dsbs_cross_check(self, dsbs01):
        v = wyner_grid_oracle(dsbs01, grid_steps=201)
        r = wyner_solve(dsbs01, card_w=2, restarts=10, seed=0)
        assert abs(float(v) - float(r.value)) <= 0.01

    def test_rejects_non_2x2(self):
        from infosep.errors import DimensionError
        j = JointDistribution(np.full((2, 3), 1.0 / 6.0))
        with pytest.raises(DimensionError):
            wyner_grid_oracle(j)

    def test_no_feasible_point(self):
        # generic entries miss every lattice point at an exact-match tolerance
        j = JointDistribution(np.array([[0.4, 0.21], [0.17, 0.22]]))
        with pytest.raises(NoFeasiblePoint):
            wyner_grid_oracle(j, grid_steps=11, match_tol=1e-9)
