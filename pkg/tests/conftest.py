"""Shared fixtures."""

import numpy as np
import pytest

from mediatrix.domain.algebra_core import (
    LABEL_A,
    LABEL_B,
    LABEL_G,
    DensityState,
    SystemLayout,
    make_layout,
    pure_state,
    single_leg,
)


@pytest.fixture
def qubit_pair() -> SystemLayout:
    return make_layout([(LABEL_A, 2), (LABEL_B, 2)])


@pytest.fixture
def bell_state(qubit_pair: SystemLayout) -> DensityState:
    return pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2), qubit_pair)


@pytest.fixture
def leg_a() -> SystemLayout:
    return single_leg(LABEL_A, 2)


@pytest.fixture
def leg_b() -> SystemLayout:
    return single_leg(LABEL_B, 2)


@pytest.fixture
def left_layout() -> SystemLayout:
    """[A:2, G:2c]"""
    return make_layout([(LABEL_A, 2), (LABEL_G, 2, True)])


@pytest.fixture
def right_layout() -> SystemLayout:
    """[G:2c, B:2]"""
    return make_layout([(LABEL_G, 2, True), (LABEL_B, 2)])


@pytest.fixture
def cnot() -> np.ndarray:
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def ket(*amplitudes: complex) -> np.ndarray:
    vector = np.array(amplitudes, dtype=complex)
    return vector / np.linalg.norm(vector)
