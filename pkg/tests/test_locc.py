"""LOCC simulation, transcript encoding and compilation onto a classical mediator."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mediatrix.config import settings as app_settings
from mediatrix.core.exceptions import (
    LoccError,
    MediatorOverflow,
    MissingTranscriptInstrument,
    NotTracePreserving,
    ValidationError,
)
from mediatrix.domain.algebra_core import LABEL_G, DensityState, partial_trace, pure_state, random_state, single_leg
from mediatrix.domain.locc import (
    Instrument,
    LoccProtocol,
    LoccRound,
    TranscriptCodec,
    coarse_grain_last_round,
    compile_to_mediator,
    identity_locc_protocol,
    locc_choi,
    measure_and_correct_protocol,
    mediator_dimensions,
    party_layout,
    projective_instrument,
    random_locc_protocol,
    simulate_locc,
)
from mediatrix.domain.protocol import evolve, marginal_channel_choi
from mediatrix.services.locc_service import locc_service
from mediatrix.utils.validators import max_entry_distance

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _unit(dim: int, i: int, j: int) -> np.ndarray:
    unit = np.zeros((dim, dim), dtype=complex)
    unit[i, j] = 1.0
    return unit


def _choi_by_simulation(protocol: LoccProtocol) -> np.ndarray:
    """Assemble the Choi from state inputs only, via polarization of |i><j|."""
    layout = protocol.layout
    dim = layout.total_dim

    def run(vector: np.ndarray) -> np.ndarray:
        return simulate_locc(protocol, pure_state(vector, layout)).matrix

    basis = np.eye(dim, dtype=complex)
    diagonal = [run(basis[i]) for i in range(dim)]
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i, j in itertools.product(range(dim), repeat=2):
        if i == j:
            image = diagonal[i]
        else:
            plus = run((basis[i] + basis[j]) / np.sqrt(2))
            plus_i = run((basis[i] + 1j * basis[j]) / np.sqrt(2))
            image = plus + 1j * plus_i - (1 + 1j) / 2 * (diagonal[i] + diagonal[j])
        choi += np.kron(_unit(dim, i, j), image)
    return choi


class TestInstruments:
    def test_arms_must_sum_to_identity(self, leg_a):
        with pytest.raises(NotTracePreserving):
            Instrument(leg_a, ([np.eye(2) / 2],))

    def test_round_alphabet_must_match(self, leg_a):
        with pytest.raises(ValidationError, match="outcomes"):
            LoccRound("A", 3, default=projective_instrument(leg_a))

    def test_missing_transcript(self, leg_a, leg_b):
        with pytest.raises(MissingTranscriptInstrument):
            LoccProtocol(
                party_layout(2, 2),
                (
                    LoccRound("A", 2, default=projective_instrument(leg_a)),
                    LoccRound("B", 2, {(0,): projective_instrument(leg_b)}),
                ),
            )


class TestTranscriptCodec:
    def test_bijection(self):
        codec = TranscriptCodec((2, 3, 2))
        assert codec.register_dim == 12
        for length in range(4):
            labels = set()
            for transcript in itertools.product(*(range(n) for n in codec.alphabets[:length])):
                label = codec.encode(transcript)
                assert label < codec.weight(length)
                assert codec.decode(label, length) == transcript
                labels.add(label)
            assert len(labels) == codec.weight(length)

    def test_empty_transcript_is_zero(self):
        assert TranscriptCodec((3, 3)).encode(()) == 0

    def test_out_of_range(self):
        codec = TranscriptCodec((2, 2))
        with pytest.raises(LoccError):
            codec.encode((2,))
        with pytest.raises(LoccError):
            codec.decode(2, 1)


class TestDirectChannel:
    def test_identity_protocol(self):
        omega = np.eye(4).reshape(16)
        protocol = identity_locc_protocol(2, 2, rounds=2, alphabet=2)
        assert_allclose(locc_choi(protocol), np.outer(omega, omega), atol=1e-12)

    def test_measure_and_correct_steers_b(self, bell_state):
        out = simulate_locc(measure_and_correct_protocol(), bell_state)
        expected = 0.5 * (np.kron(np.diag([1, 0]), np.diag([1, 0])) + np.kron(np.diag([0, 1]), np.diag([1, 0])))
        assert_allclose(out.matrix, expected, atol=1e-12)

    @settings(max_examples=5, deadline=None)
    @given(seed=seeds)
    def test_choi_matches_simulation(self, seed):
        protocol = random_locc_protocol(seed, rounds=2, alphabet=2)
        assert max_entry_distance(locc_choi(protocol), _choi_by_simulation(protocol)) <= 1e-10

    @settings(max_examples=5, deadline=None)
    @given(seed=seeds)
    def test_coarse_graining_last_round(self, seed):
        protocol = random_locc_protocol(seed, rounds=2, alphabet=3)
        coarse = coarse_grain_last_round(protocol)
        assert coarse.alphabets == (3, 1)
        assert max_entry_distance(locc_choi(protocol), locc_choi(coarse)) <= 1e-10


class TestCompilation:
    def test_single_round_register(self):
        protocol = identity_locc_protocol(2, 2, rounds=1, alphabet=3)
        compiled = compile_to_mediator(protocol)
        assert len(compiled.steps) == 1
        assert compiled.dims == (2, 3, 2)

    def test_register_is_product_of_alphabets(self):
        dims = mediator_dimensions(random_locc_protocol(0, rounds=3, alphabet=2))
        assert dims.transcript_register == 8
        assert dims.separate_registers == 6

    def test_measure_and_correct(self):
        protocol = measure_and_correct_protocol()
        compiled = compile_to_mediator(protocol)
        assert len(compiled.steps) == 2
        assert compiled.layout.is_classical(LABEL_G)
        assert compiled.dims == (2, 2, 2)
        result = locc_service.verify_equivalence(protocol)
        assert result.passed
        assert result.mediator_dim == 2

    def test_identity_equivalence(self):
        result = locc_service.verify_equivalence(identity_locc_protocol(2, 2, rounds=2, alphabet=2))
        assert result.max_choi_deviation <= 1e-12

    @settings(max_examples=5, deadline=None)
    @given(seed=seeds)
    def test_random_protocols_compile_exactly(self, seed):
        protocol = random_locc_protocol(seed, rounds=2, alphabet=2)
        compiled = compile_to_mediator(protocol)
        assert max_entry_distance(locc_choi(protocol), marginal_channel_choi(compiled)) <= 1e-9

    def test_compiled_run_keeps_certificate(self):
        protocol = random_locc_protocol(3, rounds=2, alphabet=2)
        factor_a = random_state(1, single_leg("A", 2))
        factor_b = random_state(2, single_leg("B", 2))
        trajectory = evolve(compile_to_mediator(protocol, factor_a, factor_b))
        assert trajectory.theorem_pass is True
        assert trajectory.final_negativity_ab <= 1e-9
        mediator = partial_trace(trajectory.final.state, [LABEL_G])
        assert isinstance(mediator, DensityState)
        assert abs(np.trace(mediator.matrix) - 1.0) <= 1e-10

    def test_overflow(self, monkeypatch):
        monkeypatch.setattr(app_settings, "mediator_dim_cap", 4)
        with pytest.raises(MediatorOverflow, match="8"):
            compile_to_mediator(identity_locc_protocol(2, 2, rounds=3, alphabet=2))
