"""Protocol runs, the BMV-style demonstration circuit and scenario assembly."""

import logging
import time

import numpy as np

from mediatrix.config import settings
from mediatrix.domain.algebra_core import (
    LABEL_A,
    LABEL_B,
    LABEL_G,
    classical_state,
    make_layout,
    pure_state,
    random_distribution,
    random_state,
    single_leg,
)
from mediatrix.domain.channels import (
    StepChannel,
    StepSide,
    channel_from_kraus,
    identity_channel,
    unitary_channel,
)
from mediatrix.domain.protocol import (
    MediatorMode,
    Protocol,
    Trajectory,
    build_protocol,
    evolve,
)
from mediatrix.schemas.report import RunReport, RunSummary, StepRow
from mediatrix.schemas.scenario import ScenarioConfig, StepsConfig
from mediatrix.services.fuzz_service import FuzzConfig, fuzz_service
from mediatrix.utils.seeding import draw_seed, get_generator

logger = logging.getLogger(__name__)

# CNOT with A as control, G as target, on |a g>
CNOT_A_TO_G = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
ZERO = np.array([1, 0], dtype=complex)


class ProtocolService:
    """Run protocols and turn trajectories into reports."""

    def run(self, protocol: Protocol) -> Trajectory:
        """Evolve a protocol on both tracks and log the outcome."""
        start = time.perf_counter()
        trajectory = evolve(protocol)
        duration_ms = (time.perf_counter() - start) * 1000
        logger.info(
            f"Protocol run ({protocol.mode.value}, {len(protocol.steps)} steps): "
            f"final negativity_AB={trajectory.final_negativity_ab:.3e}, duration_ms={duration_ms:.1f}"
        )
        if trajectory.theorem_pass is False:
            logger.warning(
                f"Classical-mode run violates the no-entanglement bound: "
                f"negativity_AB={trajectory.final_negativity_ab!r}, "
                f"max residual={trajectory.max_certificate_residual!r}"
            )
        return trajectory

    def bmv_scenario(self, mode: MediatorMode | str) -> Protocol:
        """Two qubits coupled only through a qubit mediator.

        |+>_A |0>_G |+>_B, then CNOT A->G, CZ on G-B, CNOT A->G. With a quantum
        mediator the final A-B state is maximally entangled and G returns to |0>;
        in Classical mode every interaction is g-classicalized.
        """
        mode = MediatorMode(mode)
        leg_a = single_leg(LABEL_A, 2)
        leg_b = single_leg(LABEL_B, 2)
        left_layout = make_layout([(LABEL_A, 2), (LABEL_G, 2)])
        right_layout = make_layout([(LABEL_G, 2), (LABEL_B, 2)])
        cnot = StepChannel(StepSide.LEFT, unitary_channel(CNOT_A_TO_G, left_layout), identity_channel(leg_b))
        cz = StepChannel(StepSide.RIGHT, unitary_channel(CZ, right_layout), identity_channel(leg_a))
        return build_protocol(
            pure_state(PLUS, leg_a),
            pure_state(ZERO, single_leg(LABEL_G, 2)),
            pure_state(PLUS, leg_b),
            [cnot, cz, cnot],
            mode,
        )

    def build_from_config(self, config: ScenarioConfig) -> Protocol:
        """Protocol described by a validated scenario config."""
        mode = MediatorMode(config.mediator_mode)
        if config.is_bmv:
            return self.bmv_scenario(mode)
        steps = config.steps
        assert isinstance(steps, StepsConfig)
        if steps.generator == "random":
            d_a, d_g, d_b = config.dims
            fuzz_config = FuzzConfig(
                d_a=d_a, d_g=d_g, d_b=d_b, max_steps=steps.count, count=1, mode=mode, env_dim=steps.env_dim
            )
            return fuzz_service.generate(config.seed or 0, fuzz_config, step_count=steps.count)
        return self._explicit_protocol(config, steps, mode)

    def _explicit_protocol(self, config: ScenarioConfig, steps: StepsConfig, mode: MediatorMode) -> Protocol:
        d_a, d_g, d_b = config.dims
        legs = {label: single_leg(label, dim) for label, dim in ((LABEL_A, d_a), (LABEL_G, d_g), (LABEL_B, d_b))}
        built = []
        for entry in steps.explicit or []:
            side = StepSide(entry.side)
            pair = (LABEL_A, LABEL_G) if side == StepSide.LEFT else (LABEL_G, LABEL_B)
            other = LABEL_B if side == StepSide.LEFT else LABEL_A
            interaction_layout = legs[pair[0]].concat(legs[pair[1]])
            interaction = channel_from_kraus([k.to_array() for k in entry.interaction], interaction_layout)
            if entry.bystander is None:
                bystander = identity_channel(legs[other])
            else:
                bystander = channel_from_kraus([k.to_array() for k in entry.bystander], legs[other])
            built.append(StepChannel(side, interaction, bystander))
        if steps.initial == "random":
            rng = get_generator(config.seed or 0)
            factor_a = random_state(draw_seed(rng), legs[LABEL_A])
            factor_b = random_state(draw_seed(rng), legs[LABEL_B])
            if mode == MediatorMode.CLASSICAL:
                factor_g = classical_state(random_distribution(draw_seed(rng), d_g))
            else:
                factor_g = random_state(draw_seed(rng), legs[LABEL_G])
        else:
            factor_a, factor_g, factor_b = (pure_state(np.eye(d)[0], legs[label]) for label, d in (
                (LABEL_A, d_a), (LABEL_G, d_g), (LABEL_B, d_b)
            ))
        return build_protocol(factor_a, factor_g, factor_b, built, mode)

    def run_report(self, name: str, protocol: Protocol, seed: int | None = None) -> RunReport:
        """Run a protocol and tabulate its trajectory."""
        start = time.perf_counter()
        trajectory = self.run(protocol)
        wall_time_ms = (time.perf_counter() - start) * 1000 if settings.report_timing else None
        rows = [
            StepRow(
                step=record.step_index,
                negativity_ab=record.negativity_ab,
                negativity_a_gb=record.negativity_a_gb,
                negativity_ag_b=record.negativity_ag_b,
                ensemble_terms=record.ensemble_terms,
                certificate_residual=record.certificate_residual,
            )
            for record in trajectory.records
        ]
        return RunReport(
            name=name,
            mediator_mode=protocol.mode.value,
            seed=seed,
            rows=rows,
            summary=RunSummary(
                final_negativity_ab=trajectory.final_negativity_ab,
                theorem_pass=trajectory.theorem_pass,
                wall_time_ms=wall_time_ms,
            ),
        )


protocol_service = ProtocolService()
