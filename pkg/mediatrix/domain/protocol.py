"""Mediated interaction protocols on the [A, G, B] legs.

A protocol is a product initial state followed by an arbitrary sequence of
local steps, each coupling one party to the mediator G while the other party
evolves on its own. The engine tracks two things side by side: the density
matrix, and, when the mediator is classical, a triseparable ensemble that
certifies the state carries no A|B entanglement.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from mediatrix.config import settings
from mediatrix.core.exceptions import LayoutMismatch, NotGClassical, ValidationError
from mediatrix.domain.algebra_core import (
    CANONICAL_LABELS,
    LABEL_A,
    LABEL_B,
    LABEL_G,
    DensityState,
    SystemLayout,
    canonical_layout,
    is_pinched,
    partial_trace,
    partial_trace_matrix,
    permute_matrix,
    product_state,
    single_leg,
)
from mediatrix.domain.channels import (
    Channel,
    StepChannel,
    apply,
    apply_kraus,
    g_classicalize,
    is_g_classical,
)
from mediatrix.domain.entanglement import (
    CUT_A_B,
    CUT_A_GB,
    CUT_AG_B,
    EnsembleTerm,
    TriseparableEnsemble,
    ensemble_reconstruct,
    ensemble_residual,
    ensemble_step,
    negativity,
    product_ensemble,
    require_g_classical,
)
from mediatrix.utils.validators import ComplexMatrix

logger = logging.getLogger(__name__)


class MediatorMode(str, Enum):
    """Whether the mediator G is restricted to its diagonal subalgebra."""

    CLASSICAL = "classical"
    QUANTUM = "quantum"


# ---------------------------------------------------------------------------
# Construction guards
# ---------------------------------------------------------------------------


def _relabel(state: DensityState, layout: SystemLayout) -> DensityState:
    if state.layout.dims != layout.dims:
        raise LayoutMismatch(layout.describe(), state.layout.describe())
    if state.layout == layout:
        return state
    return DensityState(layout, state.matrix)


def _mark_mediator(channel: Channel, classical: bool) -> Channel:
    """Same Kraus data with the G leg flagged (or unflagged) classical."""
    if LABEL_G not in channel.in_layout.labels:
        return channel
    in_layout = channel.in_layout.with_classical(LABEL_G, classical)
    out_layout = channel.out_layout.with_classical(LABEL_G, classical)
    if in_layout == channel.in_layout and out_layout == channel.out_layout:
        return channel
    leg = channel.classical_leg if classical else None
    return replace(channel, in_layout=in_layout, out_layout=out_layout, classical_leg=leg)


def _check_step_dims(step: StepChannel, layout: SystemLayout, index: int) -> None:
    for channel in (step.interaction, step.bystander):
        for sub in channel.in_layout.subsystems:
            if layout.dim_of(sub.label) != sub.dim:
                raise LayoutMismatch(
                    f"step {index}: '{sub.label}' of dim {layout.dim_of(sub.label)}",
                    f"dim {sub.dim}",
                )


def assert_g_classical_step(step: StepChannel, index: int) -> None:
    """Raise NotGClassical unless the step's interaction respects the classical mediator."""
    try:
        require_g_classical(step.interaction)
    except NotGClassical as exc:
        raise NotGClassical(f"Step {index}: {exc.detail}") from exc


def prepare_step(
    step: StepChannel, layout: SystemLayout, mode: MediatorMode, index: int, classicalize: bool = True
) -> StepChannel:
    """Fit a step to a protocol: check dims and, for a classical mediator, enforce classicality.

    Raises:
        LayoutMismatch: A step leg disagrees with the protocol layout
        NotGClassical: Classical mode, classicalize=False and the interaction is not g-classical
    """
    _check_step_dims(step, layout, index)
    if mode == MediatorMode.QUANTUM:
        return step
    interaction = _mark_mediator(step.interaction, classical=True)
    if is_g_classical(interaction, LABEL_G):
        if interaction.classical_leg != LABEL_G:
            interaction = replace(interaction, classical_leg=LABEL_G)
    elif classicalize:
        interaction = g_classicalize(interaction, LABEL_G)
    else:
        raise NotGClassical(f"Step {index} interaction is not invariant under pinching of G")
    if interaction is step.interaction:
        return step
    return StepChannel(step.side, interaction, step.bystander)


# ---------------------------------------------------------------------------
# Protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Protocol:
    """Initial [A, G, B] state plus an ordered list of local steps.

    Build through `build_protocol` or `Protocol.from_ensemble`; both enforce the
    classical-mediator invariants.
    """

    layout: SystemLayout
    initial_state: DensityState
    steps: tuple[StepChannel, ...]
    mode: MediatorMode
    initial_ensemble: TriseparableEnsemble | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "mode", MediatorMode(self.mode))
        if self.layout.labels != CANONICAL_LABELS:
            raise LayoutMismatch(list(CANONICAL_LABELS), list(self.layout.labels))
        if self.mode == MediatorMode.CLASSICAL:
            assert_classical_protocol(self)

    @property
    def dims(self) -> tuple[int, int, int]:
        d_a, d_g, d_b = self.layout.dims
        return d_a, d_g, d_b

    @property
    def initial_mediator(self) -> DensityState:
        return partial_trace(self.initial_state, [LABEL_G])

    @classmethod
    def from_ensemble(
        cls,
        ensemble: TriseparableEnsemble,
        steps: Sequence[StepChannel],
        mode: MediatorMode = MediatorMode.CLASSICAL,
        classicalize: bool = True,
    ) -> Protocol:
        """Protocol whose initial state is an arbitrary triseparable ensemble."""
        d_a, d_g, d_b = ensemble.layout.dims
        layout = canonical_layout(d_a, d_g, d_b, classical_mediator=mode == MediatorMode.CLASSICAL)
        prepared = tuple(
            prepare_step(step, layout, MediatorMode(mode), index, classicalize)
            for index, step in enumerate(steps, start=1)
        )
        initial = _relabel(ensemble_reconstruct(ensemble), layout)
        tracked = _relayout_ensemble(ensemble, layout) if mode == MediatorMode.CLASSICAL else None
        return cls(layout, initial, prepared, MediatorMode(mode), tracked)


def _relayout_ensemble(ensemble: TriseparableEnsemble, layout: SystemLayout) -> TriseparableEnsemble:
    legs = [SystemLayout((sub,)) for sub in layout.subsystems]
    return TriseparableEnsemble(
        tuple(
            EnsembleTerm(
                term.weight,
                _relabel(term.factor_a, legs[0]),
                _relabel(term.factor_g, legs[1]),
                _relabel(term.factor_b, legs[2]),
            )
            for term in ensemble.terms
        )
    )


def assert_classical_protocol(protocol: Protocol) -> None:
    """Guard for Classical mode: classical G leg, diagonal initial mediator, g-classical steps.

    Raises:
        ValidationError: G not flagged classical, or the initial state is not diagonal on G
        NotGClassical: A step interaction does not respect the classical mediator
    """
    if not protocol.layout.is_classical(LABEL_G):
        raise ValidationError("Classical mode needs the mediator leg flagged classical")
    if not is_pinched(protocol.initial_state, LABEL_G):
        raise ValidationError("Initial mediator state is not diagonal in Classical mode")
    if protocol.initial_ensemble is None:
        raise ValidationError("Classical mode needs an initial triseparable ensemble")
    for index, step in enumerate(protocol.steps, start=1):
        assert_g_classical_step(step, index)


def build_protocol(
    factor_a: DensityState,
    factor_g: DensityState,
    factor_b: DensityState,
    steps: Sequence[StepChannel],
    mode: MediatorMode | str,
    classicalize: bool = True,
) -> Protocol:
    """Protocol from a product initial state.

    In Classical mode each interaction is g-classicalized, or, with
    classicalize=False, rejected unless it already respects the mediator.

    Raises:
        ValidationError: Classical mode with a non-diagonal initial mediator state
        LayoutMismatch: A step does not fit the factor dimensions
        NotGClassical: See `prepare_step`
    """
    mode = MediatorMode(mode)
    classical = mode == MediatorMode.CLASSICAL
    layout = canonical_layout(factor_a.dim, factor_g.dim, factor_b.dim, classical_mediator=classical)
    a = _relabel(factor_a, single_leg(LABEL_A, factor_a.dim))
    g = _relabel(factor_g, single_leg(LABEL_G, factor_g.dim, classical=classical))
    b = _relabel(factor_b, single_leg(LABEL_B, factor_b.dim))
    if classical and not is_pinched(g, LABEL_G):
        raise ValidationError("Initial mediator state is not diagonal in Classical mode")
    prepared = tuple(
        prepare_step(step, layout, mode, index, classicalize) for index, step in enumerate(steps, start=1)
    )
    initial = product_state([a, g, b], layout)
    ensemble = product_ensemble(a, g, b) if classical else None
    return Protocol(layout, initial, prepared, mode, ensemble)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryRecord:
    """State of the run after `step_index` steps (0 = initial)."""

    step_index: int
    state: DensityState = field(repr=False)
    ensemble: TriseparableEnsemble | None = field(repr=False)
    negativity_ab: float
    negativity_a_gb: float
    negativity_ag_b: float
    marginal_ab: DensityState = field(repr=False)
    certificate_residual: float | None = None

    @property
    def ensemble_terms(self) -> int | None:
        return None if self.ensemble is None else len(self.ensemble)


@dataclass(frozen=True)
class Trajectory:
    mode: MediatorMode
    records: tuple[TrajectoryRecord, ...]

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]

    @property
    def final_negativity_ab(self) -> float:
        return self.final.negativity_ab

    @property
    def max_negativity_ab(self) -> float:
        return max(record.negativity_ab for record in self.records)

    @property
    def max_certificate_residual(self) -> float | None:
        residuals = [r.certificate_residual for r in self.records if r.certificate_residual is not None]
        return max(residuals) if residuals else None

    @property
    def theorem_pass(self) -> bool | None:
        """Classical mode only: final A|B negativity and every certificate residual within theorem_tol."""
        if self.mode != MediatorMode.CLASSICAL:
            return None
        residual = self.max_certificate_residual
        return self.final_negativity_ab <= settings.theorem_tol and (
            residual is not None and residual <= settings.theorem_tol
        )


def _record(index: int, state: DensityState, ensemble: TriseparableEnsemble | None) -> TrajectoryRecord:
    marginal = partial_trace(state, [LABEL_A, LABEL_B])
    residual = None if ensemble is None else ensemble_residual(ensemble, state)
    return TrajectoryRecord(
        step_index=index,
        state=state,
        ensemble=ensemble,
        negativity_ab=negativity(marginal, CUT_A_B),
        negativity_a_gb=negativity(state, CUT_A_GB),
        negativity_ag_b=negativity(state, CUT_AG_B),
        marginal_ab=marginal,
        certificate_residual=residual,
    )


def evolve(protocol: Protocol) -> Trajectory:
    """Run every step on the density track and, in Classical mode, on the ensemble track.

    Raises:
        NotGClassical: Classical mode with a step that cannot carry a certificate
    """
    state = protocol.initial_state
    ensemble = protocol.initial_ensemble if protocol.mode == MediatorMode.CLASSICAL else None
    records = [_record(0, state, ensemble)]
    for index, step in enumerate(protocol.steps, start=1):
        state = _relabel(apply(step.channel, state), protocol.layout)
        if ensemble is not None:
            ensemble = ensemble_step(ensemble, step)
        record = _record(index, state, ensemble)
        if record.certificate_residual is not None and record.certificate_residual > settings.accumulated_tol:
            logger.warning(
                f"Step {index}: ensemble drifted from the density track by {record.certificate_residual:.3e}"
            )
        records.append(record)
    return Trajectory(protocol.mode, tuple(records))


# ---------------------------------------------------------------------------
# Induced A-B channel
# ---------------------------------------------------------------------------


def _run_matrix(protocol: Protocol, matrix: ComplexMatrix) -> ComplexMatrix:
    for step in protocol.steps:
        matrix = apply_kraus(step.channel.kraus, matrix)
    return matrix


def marginal_channel_choi(protocol: Protocol) -> ComplexMatrix:
    """Choi of rho_AB -> Tr_G[run(rho_AB (x) omega_G)] with omega_G the initial mediator state.

    Input leg first, unnormalized, trace d_A * d_B.
    """
    d_a, d_g, d_b = protocol.dims
    d_ab = d_a * d_b
    mediator = protocol.initial_mediator.matrix
    # [A, B, G] -> [A, G, B]
    positions = [0, 2, 1]
    choi = np.zeros((d_ab * d_ab, d_ab * d_ab), dtype=complex)
    for i in range(d_ab):
        for j in range(d_ab):
            unit = np.zeros((d_ab, d_ab), dtype=complex)
            unit[i, j] = 1.0
            joint = permute_matrix(np.kron(unit, mediator), (d_a, d_b, d_g), positions)
            out = partial_trace_matrix(_run_matrix(protocol, joint), (d_a, d_g, d_b), (0, 2))
            choi += np.kron(unit, out)
    return choi
