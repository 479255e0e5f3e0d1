"""Entanglement detection and triseparability certificates.

Negativity is the numerical detector. The authoritative witness that a state
is unentangled across A|B is a TriseparableEnsemble: an explicit finite convex
decomposition into A (x) G (x) B product terms with diagonal G factors. Such a
decomposition is carried through every classical-mediator step by
`ensemble_step`, and dropping the G factor yields a separable decomposition of
the A-B marginal.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from mediatrix.config import settings
from mediatrix.core.exceptions import (
    BadCut,
    EmptyEnsemble,
    NoClassicalLeg,
    NotGClassical,
    ValidationError,
)
from mediatrix.domain.algebra_core import (
    LABEL_A,
    LABEL_B,
    LABEL_G,
    DensityState,
    SystemLayout,
    is_pinched,
    kron_all,
    product_state,
)
from mediatrix.domain.channels import (
    Channel,
    StepChannel,
    StepSide,
    apply,
    classical_target,
    is_g_classical,
)
from mediatrix.utils.validators import ComplexMatrix, max_entry_distance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cut:
    """Bipartition of a layout's labels."""

    left: frozenset[str]
    right: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if not self.left or not self.right:
            raise BadCut("Both sides of a cut must be non-empty")
        if self.left & self.right:
            raise BadCut(f"Cut sides overlap on {sorted(self.left & self.right)}")

    @classmethod
    def of(cls, left: Iterable[str], right: Iterable[str]) -> Cut:
        return cls(frozenset(left), frozenset(right))

    def check(self, layout: SystemLayout) -> None:
        if self.left | self.right != set(layout.labels):
            raise BadCut(
                f"Cut {sorted(self.left)}|{sorted(self.right)} does not partition {list(layout.labels)}"
            )

    def describe(self) -> str:
        return f"{''.join(sorted(self.left))}|{''.join(sorted(self.right))}"


CUT_A_B = Cut.of({LABEL_A}, {LABEL_B})
CUT_A_GB = Cut.of({LABEL_A}, {LABEL_G, LABEL_B})
CUT_AG_B = Cut.of({LABEL_A, LABEL_G}, {LABEL_B})


def partial_transpose_matrix(
    matrix: ComplexMatrix, dims: Sequence[int], positions: Iterable[int]
) -> ComplexMatrix:
    """Transpose the listed legs of a square operator."""
    n = len(dims)
    tensor = np.asarray(matrix).reshape(tuple(dims) + tuple(dims))
    axes = list(range(2 * n))
    for position in positions:
        axes[position], axes[n + position] = axes[n + position], axes[position]
    total = math.prod(dims)
    return tensor.transpose(axes).reshape(total, total)


def partial_transpose(state: DensityState, cut: Cut) -> ComplexMatrix:
    """Partial transpose on the right side of the cut.

    Raises:
        BadCut: Cut does not partition the state's layout
    """
    cut.check(state.layout)
    positions = [state.layout.index(label) for label in cut.right]
    return partial_transpose_matrix(state.matrix, state.layout.dims, positions)


def negativity(state: DensityState, cut: Cut) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    transposed = partial_transpose(state, cut)
    eigenvalues = np.linalg.eigvalsh((transposed + transposed.conj().T) / 2)
    return max(0.0, float(-np.sum(eigenvalues[eigenvalues < 0])))


# ---------------------------------------------------------------------------
# Classical-quantum block decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalBlock:
    """One classical branch of a classical-quantum state."""

    value: int
    weight: float
    state: DensityState


def cq_decompose(state: DensityState, classical_label: str) -> list[ClassicalBlock]:
    """Split a two-leg state that is diagonal on its classical leg.

    Every such state equals sum_g p_g |g><g| (x) rho_g, so it is separable;
    this returns the (g, p_g, rho_g) with p_g above merge_tol.

    Raises:
        ValidationError: State not two-leg, or not diagonal on the classical leg
    """
    layout = state.layout
    if len(layout.subsystems) != 2:
        raise ValidationError(f"Expected a two-leg state, got {layout.describe()}")
    if not is_pinched(state, classical_label, settings.accumulated_tol):
        raise ValidationError(f"State is not diagonal on classical leg '{classical_label}'")
    c_pos = layout.index(classical_label)
    q_pos = 1 - c_pos
    quantum_layout = SystemLayout((layout.subsystems[q_pos],))
    tensor = state.matrix.reshape(layout.dims + layout.dims)
    blocks = []
    for g in range(layout.dims[c_pos]):
        index: list[object] = [slice(None)] * 4
        index[c_pos] = g
        index[2 + c_pos] = g
        block = tensor[tuple(index)]
        weight = float(np.real(np.trace(block)))
        if weight <= settings.merge_tol:
            continue
        block = block / weight
        blocks.append(ClassicalBlock(g, weight, DensityState(quantum_layout, (block + block.conj().T) / 2)))
    return blocks


# ---------------------------------------------------------------------------
# Triseparable ensembles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleTerm:
    """lambda * omega_A (x) omega_G (x) omega_B."""

    weight: float
    factor_a: DensityState
    factor_g: DensityState
    factor_b: DensityState

    @property
    def matrix(self) -> ComplexMatrix:
        return kron_all([self.factor_a.matrix, self.factor_g.matrix, self.factor_b.matrix])


@dataclass(frozen=True)
class TriseparableEnsemble:
    """Finite convex decomposition of an [A, G, B] state into product terms."""

    terms: tuple[EnsembleTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise EmptyEnsemble()
        total = math.fsum(term.weight for term in self.terms)
        if abs(total - 1.0) > settings.trace_tol:
            raise ValidationError(f"Ensemble weights sum to {total!r}, expected 1")
        first = self.terms[0]
        for term in self.terms:
            if term.weight < 0:
                raise ValidationError(f"Ensemble weight {term.weight!r} is negative")
            if (
                term.factor_a.layout != first.factor_a.layout
                or term.factor_g.layout != first.factor_g.layout
                or term.factor_b.layout != first.factor_b.layout
            ):
                raise ValidationError("Ensemble terms live on different legs")
            if not is_pinched(term.factor_g, term.factor_g.layout.labels[0]):
                raise ValidationError("Ensemble mediator factor is not diagonal")

    @property
    def layout(self) -> SystemLayout:
        first = self.terms[0]
        return first.factor_a.layout.concat(first.factor_g.layout).concat(first.factor_b.layout)

    def __len__(self) -> int:
        return len(self.terms)


def product_ensemble(
    factor_a: DensityState, factor_g: DensityState, factor_b: DensityState
) -> TriseparableEnsemble:
    """Single-term ensemble for a product state."""
    return TriseparableEnsemble((EnsembleTerm(1.0, factor_a, factor_g, factor_b),))


def ensemble_reconstruct(ensemble: TriseparableEnsemble) -> DensityState:
    """sum_i lambda_i omega_A^i (x) omega_G^i (x) omega_B^i."""
    if not ensemble.terms:
        raise EmptyEnsemble()
    matrix = sum(term.weight * term.matrix for term in ensemble.terms)
    return DensityState(ensemble.layout, matrix)


def ensemble_residual(ensemble: TriseparableEnsemble, state: DensityState) -> float:
    """Max-entry distance between the ensemble's reconstruction and a state."""
    return max_entry_distance(ensemble_reconstruct(ensemble).matrix, state.matrix)


def require_g_classical(channel: Channel) -> None:
    """Guard: the channel must respect the classical mediator leg G.

    Raises:
        NotGClassical: G is not classical in the layout, or the channel is not pinch-sandwiched
    """
    try:
        leg = classical_target(channel.in_layout, LABEL_G)
    except NoClassicalLeg as exc:
        raise NotGClassical(f"Mediator is not classical: {exc.detail}") from exc
    if not is_g_classical(channel, leg):
        raise NotGClassical(
            f"Interaction on {channel.in_layout.describe()} is not invariant under pinching of '{leg}'"
        )


def _mix(first: DensityState, w1: float, second: DensityState, w2: float) -> DensityState:
    return DensityState(first.layout, (w1 * first.matrix + w2 * second.matrix) / (w1 + w2))


def _merge_shared_factors(terms: list[EnsembleTerm]) -> list[EnsembleTerm]:
    """Combine terms of one G value that share their A or their B factor exactly.

    Only such pairs combine into a single product term exactly:
    w1 a (x) g (x) b1 + w2 a (x) g (x) b2 = (w1 + w2) a (x) g (x) mix(b1, b2).
    """
    merged: list[EnsembleTerm] = []
    by_a: dict[bytes, int] = {}
    by_b: dict[bytes, int] = {}
    for term in terms:
        key_a, key_b = term.factor_a.matrix.tobytes(), term.factor_b.matrix.tobytes()
        position = by_a.get(key_a, by_b.get(key_b))
        if position is not None:
            existing = merged[position]
            w1, w2 = existing.weight, term.weight
            if np.array_equal(existing.factor_a.matrix, term.factor_a.matrix):
                merged[position] = EnsembleTerm(
                    w1 + w2, existing.factor_a, existing.factor_g, _mix(existing.factor_b, w1, term.factor_b, w2)
                )
            elif np.array_equal(existing.factor_b.matrix, term.factor_b.matrix):
                merged[position] = EnsembleTerm(
                    w1 + w2, _mix(existing.factor_a, w1, term.factor_a, w2), existing.factor_g, existing.factor_b
                )
            else:
                # stale key: the stored term has been mixed since
                position = None
        if position is None:
            merged.append(term)
            position = len(merged) - 1
        kept = merged[position]
        by_a[kept.factor_a.matrix.tobytes()] = position
        by_b[kept.factor_b.matrix.tobytes()] = position
    return merged


def _hermitian_coordinates(matrix: ComplexMatrix) -> NDArray[np.float64]:
    """Real coordinates of a Hermitian matrix: diagonal, then upper triangle real and imaginary parts."""
    upper = np.triu_indices(matrix.shape[0], 1)
    return np.concatenate([matrix.diagonal().real, matrix[upper].real, matrix[upper].imag])


def caratheodory_weights(weights: NDArray[np.float64], points: NDArray[np.float64]) -> NDArray[np.float64]:
    """Reweight a convex combination onto at most points.shape[1] + 1 of its points.

    sum_i w_i p_i and sum_i w_i are unchanged: each pass takes null vectors c of
    the stacked points (with a row of ones) and moves weight along c until a
    term reaches zero.
    """
    weights = np.array(weights, dtype=float)
    lifted = np.hstack([points, np.ones((len(weights), 1))])
    width = lifted.shape[1]
    active = np.flatnonzero(weights > 0)
    while active.size > width:
        chunk = active[: 2 * width]
        _, _, vh = np.linalg.svd(lifted[chunk].T)
        null = vh[width:].T.copy()
        local = weights[chunk]
        for k in range(null.shape[1]):
            direction = null[:, k]
            if direction.max() <= 0:
                direction = -direction
            scale = np.abs(direction).max()
            positive = (direction > 1e-12 * scale) & (local > 0)
            if not positive.any():
                continue
            ratios = np.full(local.shape, np.inf)
            ratios[positive] = local[positive] / direction[positive]
            pivot = int(np.argmin(ratios))
            local = np.clip(local - ratios[pivot] * direction, 0.0, None)
            local[pivot] = 0.0
            # later null vectors must vanish on the dropped term
            rest = null[:, k + 1 :]
            rest -= np.outer(direction / direction[pivot], rest[pivot])
        if np.count_nonzero(local) == chunk.size:
            break
        weights[chunk] = local
        active = np.flatnonzero(weights > 0)
    return weights


def _reduce_branch(terms: list[EnsembleTerm]) -> list[EnsembleTerm]:
    """Exact Caratheodory reduction of one G branch to at most (d_A d_B)^2 + 1 terms."""
    terms = _merge_shared_factors(terms)
    d_ab = terms[0].factor_a.dim * terms[0].factor_b.dim
    if len(terms) <= d_ab * d_ab + 1:
        return terms
    points = np.array(
        [_hermitian_coordinates(np.kron(term.factor_a.matrix, term.factor_b.matrix)) for term in terms]
    )
    weights = caratheodory_weights(np.array([term.weight for term in terms]), points)
    return [
        EnsembleTerm(float(weight), term.factor_a, term.factor_g, term.factor_b)
        for weight, term in zip(weights, terms, strict=True)
        if weight > 0
    ]


def _normalize(terms: list[EnsembleTerm]) -> TriseparableEnsemble:
    kept = [term for term in terms if term.weight >= settings.merge_tol]
    if not kept:
        raise EmptyEnsemble("Every ensemble term fell below the merge tolerance")
    total = math.fsum(term.weight for term in kept)
    return TriseparableEnsemble(
        tuple(
            EnsembleTerm(term.weight / total, term.factor_a, term.factor_g, term.factor_b)
            for term in kept
        )
    )


def _diagonal_factor(template: DensityState, value: int) -> DensityState:
    matrix = np.zeros((template.dim, template.dim), dtype=complex)
    matrix[value, value] = 1.0
    return DensityState(template.layout, matrix)


def ensemble_step(ensemble: TriseparableEnsemble, step: StepChannel) -> TriseparableEnsemble:
    """Carry a triseparability certificate through one g-classical step.

    Each term is a product; the interaction maps its two interacting factors
    to a state that is diagonal on G, whose classical-quantum blocks give the
    new terms. The bystander factor evolves on its own. Terms are grouped by G
    value, and each branch is reduced exactly to at most (d_A d_B)^2 + 1 terms.

    Raises:
        NotGClassical: The interaction does not respect the classical mediator
    """
    require_g_classical(step.interaction)
    interaction = step.interaction
    bystander = step.bystander
    branches: dict[int, list[EnsembleTerm]] = {}
    for term in ensemble.terms:
        if step.side == StepSide.LEFT:
            local, passive = term.factor_a, term.factor_b
            quantum_label = LABEL_A
        else:
            local, passive = term.factor_b, term.factor_a
            quantum_label = LABEL_B
        factors = {quantum_label: local, LABEL_G: term.factor_g}
        joint_in = product_state(
            [factors[label] for label in interaction.in_layout.labels], interaction.in_layout
        )
        joint_out = apply(interaction, joint_in)
        passive_out = apply(bystander, passive)
        for block in cq_decompose(joint_out, LABEL_G):
            factor_g = _diagonal_factor(term.factor_g, block.value)
            weight = term.weight * block.weight
            if step.side == StepSide.LEFT:
                new_term = EnsembleTerm(weight, block.state, factor_g, passive_out)
            else:
                new_term = EnsembleTerm(weight, passive_out, factor_g, block.state)
            branches.setdefault(block.value, []).append(new_term)
    result = _normalize([term for value in sorted(branches) for term in _reduce_branch(branches[value])])
    logger.debug(f"Ensemble step ({step.side.value}): {len(ensemble)} -> {len(result)} terms")
    return result


# ---------------------------------------------------------------------------
# Reduced separability certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparableTerm:
    """weight * omega_A (x) omega_B."""

    weight: float
    factor_a: DensityState
    factor_b: DensityState


def reduced_separable_certificate(ensemble: TriseparableEnsemble) -> tuple[SeparableTerm, ...]:
    """Drop the G factor of every term: a separable decomposition of the A-B marginal."""
    if not ensemble.terms:
        raise EmptyEnsemble()
    return tuple(SeparableTerm(term.weight, term.factor_a, term.factor_b) for term in ensemble.terms)


def separable_reconstruct(terms: Sequence[SeparableTerm]) -> DensityState:
    """sum_i w_i omega_A^i (x) omega_B^i on [A, B]."""
    if not terms:
        raise EmptyEnsemble("Certificate has no terms")
    layout = terms[0].factor_a.layout.concat(terms[0].factor_b.layout)
    matrix = sum(term.weight * np.kron(term.factor_a.matrix, term.factor_b.matrix) for term in terms)
    return DensityState(layout, matrix)
