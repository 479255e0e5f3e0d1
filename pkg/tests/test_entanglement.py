"""Negativity, classical-quantum blocks and triseparability certificates."""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mediatrix.core.exceptions import BadCut, EmptyEnsemble, NotGClassical, ValidationError
from mediatrix.domain.algebra_core import (
    DensityState,
    canonical_layout,
    classical_state,
    make_layout,
    maximally_mixed,
    partial_trace,
    point_mass,
    product_state,
    pure_state,
    random_distribution,
    random_state,
    single_leg,
)
from mediatrix.domain.channels import (
    StepChannel,
    StepSide,
    apply,
    g_classicalize,
    haar_unitary,
    identity_channel,
    random_channel,
    unitary_channel,
)
from mediatrix.domain.entanglement import (
    CUT_A_B,
    Cut,
    EnsembleTerm,
    TriseparableEnsemble,
    caratheodory_weights,
    cq_decompose,
    ensemble_reconstruct,
    ensemble_residual,
    ensemble_step,
    negativity,
    partial_transpose,
    partial_transpose_matrix,
    product_ensemble,
    reduced_separable_certificate,
    separable_reconstruct,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
sides = st.sampled_from([StepSide.LEFT, StepSide.RIGHT])


def _random_ensemble(seed: int, count: int, dims: tuple[int, int, int] = (2, 3, 2)) -> TriseparableEnsemble:
    d_a, d_g, d_b = dims
    weights = random_distribution(seed, count).probabilities
    return TriseparableEnsemble(
        tuple(
            EnsembleTerm(
                weight,
                random_state(seed + 3 * k + 1, single_leg("A", d_a)),
                classical_state(random_distribution(seed + 3 * k + 2, d_g)),
                random_state(seed + 3 * k + 3, single_leg("B", d_b)),
            )
            for k, weight in enumerate(weights)
        )
    )


def _random_step(seed: int, side: StepSide, dims: tuple[int, int, int] = (2, 3, 2)) -> StepChannel:
    d_a, d_g, d_b = dims
    if side == StepSide.LEFT:
        interaction_layout = make_layout([("A", d_a), ("G", d_g, True)])
        bystander = random_channel(seed + 1, single_leg("B", d_b), 2)
    else:
        interaction_layout = make_layout([("G", d_g, True), ("B", d_b)])
        bystander = random_channel(seed + 1, single_leg("A", d_a), 2)
    return StepChannel(side, g_classicalize(random_channel(seed, interaction_layout, 2)), bystander)


class TestNegativity:
    def test_bell_partial_transpose_spectrum(self, bell_state):
        eigenvalues = np.linalg.eigvalsh(partial_transpose(bell_state, CUT_A_B))
        assert_allclose(eigenvalues, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)
        assert abs(negativity(bell_state, CUT_A_B) - 0.5) <= 1e-12

    def test_product_state_has_zero_negativity(self):
        state = product_state(
            [random_state(1, single_leg("A", 2)), random_state(2, single_leg("B", 3))],
            make_layout([("A", 2), ("B", 3)]),
        )
        assert negativity(state, CUT_A_B) <= 1e-12

    def test_separable_state_reports_positive_zero(self, qubit_pair):
        value = negativity(maximally_mixed(qubit_pair), CUT_A_B)
        assert value == 0.0
        assert math.copysign(1.0, value) == 1.0

    def test_cut_must_partition(self):
        with pytest.raises(BadCut):
            negativity(random_state(0, canonical_layout(2, 2, 2)), CUT_A_B)

    def test_overlapping_cut(self):
        with pytest.raises(BadCut):
            Cut.of({"A", "G"}, {"G", "B"})

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds)
    def test_partial_transpose_is_an_involution(self, seed):
        state = random_state(seed, canonical_layout(2, 3, 2))
        once = partial_transpose_matrix(state.matrix, state.layout.dims, [2])
        twice = partial_transpose_matrix(once, state.layout.dims, [2])
        assert_allclose(twice, state.matrix, atol=1e-15)

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds)
    def test_local_unitaries_keep_negativity(self, seed, bell_state):
        local = np.kron(haar_unitary(seed, 2), haar_unitary(seed + 1, 2))
        rotated = apply(unitary_channel(local, bell_state.layout), bell_state)
        assert abs(negativity(rotated, CUT_A_B) - 0.5) <= 1e-10


class TestClassicalBlocks:
    def test_blocks_of_a_classical_quantum_state(self, left_layout):
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[0, 0] = 0.3
        matrix[3, 3] = 0.7
        blocks = cq_decompose(DensityState(left_layout, matrix), "G")
        assert [block.value for block in blocks] == [0, 1]
        assert_allclose([block.weight for block in blocks], [0.3, 0.7])
        assert_allclose(blocks[1].state.matrix, np.diag([0, 1]), atol=1e-15)

    def test_coherent_mediator_rejected(self, left_layout):
        state = pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2), left_layout)
        with pytest.raises(ValidationError, match="diagonal"):
            cq_decompose(state, "G")


class TestEnsembles:
    def test_empty_ensemble(self):
        with pytest.raises(EmptyEnsemble):
            TriseparableEnsemble(())

    def test_product_ensemble_reconstructs(self):
        a = random_state(1, single_leg("A", 2))
        g = classical_state(random_distribution(2, 3))
        b = random_state(3, single_leg("B", 2))
        ensemble = product_ensemble(a, g, b)
        assert ensemble.layout.labels == ("A", "G", "B")
        expected = product_state([a, g, b], ensemble.layout)
        assert ensemble_residual(ensemble, expected) <= 1e-15

    def test_cnot_step_splits_into_two_branches(self, left_layout, cnot):
        plus = pure_state(np.array([1, 1]) / np.sqrt(2), single_leg("A", 2))
        b = random_state(4, single_leg("B", 2))
        ensemble = product_ensemble(plus, point_mass(2, 0), b)
        step = StepChannel(
            StepSide.LEFT,
            g_classicalize(unitary_channel(cnot, left_layout)),
            identity_channel(single_leg("B", 2)),
        )
        after = ensemble_step(ensemble, step)
        assert len(after) == 2
        for value, term in enumerate(after.terms):
            assert abs(term.weight - 0.5) <= 1e-12
            assert_allclose(term.factor_a.matrix, np.diag(np.eye(2)[value]), atol=1e-12)
            assert_allclose(term.factor_g.matrix, np.diag(np.eye(2)[value]), atol=1e-12)
            assert_allclose(term.factor_b.matrix, b.matrix, atol=1e-12)

    def test_coherent_interaction_refused(self, left_layout, cnot):
        ensemble = product_ensemble(
            random_state(0, single_leg("A", 2)), point_mass(2, 0), random_state(1, single_leg("B", 2))
        )
        step = StepChannel(
            StepSide.LEFT, unitary_channel(cnot, left_layout), identity_channel(single_leg("B", 2))
        )
        with pytest.raises(NotGClassical):
            ensemble_step(ensemble, step)

    def test_quantum_mediator_refused(self, cnot):
        layout = make_layout([("A", 2), ("G", 2)])
        ensemble = product_ensemble(
            random_state(0, single_leg("A", 2)), point_mass(2, 0), random_state(1, single_leg("B", 2))
        )
        step = StepChannel(StepSide.LEFT, unitary_channel(cnot, layout), identity_channel(single_leg("B", 2)))
        with pytest.raises(NotGClassical, match="not classical"):
            ensemble_step(ensemble, step)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, side=st.sampled_from([StepSide.LEFT, StepSide.RIGHT]))
    def test_step_commutes_with_reconstruction(self, seed, side):
        layout = canonical_layout(2, 3, 2)
        a = random_state(seed, single_leg("A", 2))
        g = classical_state(random_distribution(seed + 1, 3))
        b = random_state(seed + 2, single_leg("B", 2))
        ensemble = product_ensemble(a, g, b)
        if side == StepSide.LEFT:
            interaction_layout = make_layout([("A", 2), ("G", 3, True)])
            bystander = random_channel(seed + 3, single_leg("B", 2), 2)
        else:
            interaction_layout = make_layout([("G", 3, True), ("B", 2)])
            bystander = random_channel(seed + 3, single_leg("A", 2), 2)
        interaction = g_classicalize(random_channel(seed + 4, interaction_layout, 2))
        step = StepChannel(side, interaction, bystander)

        after = ensemble_step(ensemble, step)
        expected = apply(step.channel, product_state([a, g, b], layout))
        assert ensemble_residual(after, expected) <= 1e-9
        assert len(after) <= 3

    def test_certificate_reproduces_marginal(self, left_layout, cnot):
        plus = pure_state(np.array([1, 1]) / np.sqrt(2), single_leg("A", 2))
        ensemble = product_ensemble(plus, point_mass(2, 0), random_state(2, single_leg("B", 2)))
        step = StepChannel(
            StepSide.LEFT,
            g_classicalize(unitary_channel(cnot, left_layout)),
            identity_channel(single_leg("B", 2)),
        )
        after = ensemble_step(ensemble, step)
        marginal = partial_trace(ensemble_reconstruct(after), ["A", "B"])
        certificate = separable_reconstruct(reduced_separable_certificate(after))
        assert_allclose(certificate.matrix, marginal.matrix, atol=1e-12)
        assert negativity(certificate, CUT_A_B) <= 1e-12

    def test_five_term_reconstruction(self):
        ensemble = _random_ensemble(11, 5)
        expected = np.zeros((12, 12), dtype=complex)
        for term in reversed(ensemble.terms):
            expected += term.weight * np.kron(
                np.kron(term.factor_a.matrix, term.factor_g.matrix), term.factor_b.matrix
            )
        state = ensemble_reconstruct(ensemble)
        assert state.layout.labels == ("A", "G", "B")
        assert_allclose(state.matrix, expected, atol=1e-12)
        assert abs(np.trace(state.matrix) - 1.0) <= 1e-12

    def test_three_term_certificate_matches_marginal(self):
        ensemble = _random_ensemble(23, 3)
        certificate = reduced_separable_certificate(ensemble)
        assert len(certificate) == 3
        marginal = partial_trace(ensemble_reconstruct(ensemble), ["A", "B"])
        rebuilt = separable_reconstruct(certificate)
        assert_allclose(rebuilt.matrix, marginal.matrix, atol=1e-10)
        assert negativity(rebuilt, CUT_A_B) <= 1e-9

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, side=sides, count=st.integers(min_value=2, max_value=5))
    def test_multi_term_step_commutes_with_reconstruction(self, seed, side, count):
        ensemble = _random_ensemble(seed, count)
        step = _random_step(seed + 100, side)
        after = ensemble_step(ensemble, step)
        expected = apply(step.channel, ensemble_reconstruct(ensemble))
        assert ensemble_residual(after, expected) <= 1e-9
        assert len(after) <= count * 3

    def test_branches_stay_bounded_over_alternating_steps(self):
        dims = (3, 4, 3)
        layout = canonical_layout(*dims)
        a = random_state(5, single_leg("A", 3))
        g = classical_state(random_distribution(6, 4))
        b = random_state(7, single_leg("B", 3))
        ensemble = product_ensemble(a, g, b)
        state = product_state([a, g, b], layout)
        started = time.perf_counter()
        for index in range(10):
            side = StepSide.LEFT if index % 2 == 0 else StepSide.RIGHT
            step = _random_step(1000 + 10 * index, side, dims)
            ensemble = ensemble_step(ensemble, step)
            state = apply(step.channel, state)
            assert len(ensemble) <= 4 * (9 * 9 + 1)
        elapsed = time.perf_counter() - started
        assert ensemble_residual(ensemble, state) <= 1e-9
        assert elapsed < 60.0


class TestCaratheodory:
    @settings(max_examples=20, deadline=None)
    @given(seed=seeds, dim=st.integers(min_value=1, max_value=6))
    def test_reweighting_keeps_the_combination(self, seed, dim):
        rng = np.random.default_rng(seed)
        count = 4 * (dim + 1)
        points = rng.normal(size=(count, dim))
        weights = np.array(random_distribution(seed, count).probabilities)
        reduced = caratheodory_weights(weights, points)
        assert np.all(reduced >= 0)
        assert np.count_nonzero(reduced) <= dim + 1
        assert abs(reduced.sum() - 1.0) <= 1e-12
        assert_allclose(reduced @ points, weights @ points, atol=1e-10)

    def test_few_points_untouched(self):
        weights = np.array([0.25, 0.75])
        points = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert_allclose(caratheodory_weights(weights, points), weights)


@pytest.mark.slow
class TestEnsemblesAtScale:
    @settings(max_examples=100, deadline=None)
    @given(seed=seeds, side=sides, count=st.integers(min_value=1, max_value=5))
    def test_multi_term_step(self, seed, side, count):
        ensemble = _random_ensemble(seed, count)
        step = _random_step(seed + 100, side)
        after = ensemble_step(ensemble, step)
        expected = apply(step.channel, ensemble_reconstruct(ensemble))
        assert ensemble_residual(after, expected) <= 1e-9

    @settings(max_examples=100, deadline=None)
    @given(seed=seeds, count=st.integers(min_value=1, max_value=5))
    def test_certificate_matches_marginal(self, seed, count):
        ensemble = _random_ensemble(seed, count)
        marginal = partial_trace(ensemble_reconstruct(ensemble), ["A", "B"])
        rebuilt = separable_reconstruct(reduced_separable_certificate(ensemble))
        assert_allclose(rebuilt.matrix, marginal.matrix, atol=1e-10)
        assert negativity(rebuilt, CUT_A_B) <= 1e-9
