"""Seeded random protocol generation."""

import logging
from collections.abc import Iterator
from dataclasses import dataclass

from mediatrix.config import settings
from mediatrix.core.exceptions import ConfigOutOfRange
from mediatrix.domain.algebra_core import (
    LABEL_A,
    LABEL_B,
    LABEL_G,
    classical_state,
    make_layout,
    random_distribution,
    random_state,
    single_leg,
)
from mediatrix.domain.channels import StepChannel, StepSide, random_channel
from mediatrix.domain.protocol import MediatorMode, Protocol, build_protocol
from mediatrix.utils.seeding import UINT64_MAX, SeedLike, draw_seed, get_generator, spawn_subseeds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FuzzConfig:
    """Shape of a fuzz campaign. Defaults match the acceptance sweep."""

    d_a: int = 2
    d_g: int = 3
    d_b: int = 2
    max_steps: int = 6
    count: int = 200
    mode: MediatorMode = MediatorMode.CLASSICAL
    env_dim: int = 2


class FuzzService:
    """Random protocols with random initial products and random Stinespring interactions."""

    def check_caps(self, config: FuzzConfig) -> None:
        """Raises ConfigOutOfRange for parameters outside [1, cap] (steps and count from 0)."""
        for name, value, limit in (
            ("dA", config.d_a, settings.fuzz_max_da),
            ("dG", config.d_g, settings.fuzz_max_dg),
            ("dB", config.d_b, settings.fuzz_max_db),
            ("env_dim", config.env_dim, settings.fuzz_max_env),
        ):
            if not 1 <= value <= limit:
                raise ConfigOutOfRange(name, value, limit)
        if not 0 <= config.max_steps <= settings.fuzz_max_steps:
            raise ConfigOutOfRange("max_steps", config.max_steps, settings.fuzz_max_steps)
        if config.count < 0:
            raise ConfigOutOfRange("count", config.count, ">= 0")

    def generate(self, seed: SeedLike, config: FuzzConfig, step_count: int | None = None) -> Protocol:
        """One protocol, fully determined by `seed` and `config`.

        The step count is drawn from 1..max_steps unless given; each step picks a
        side, an interaction from a random dilation of dimension 1..env_dim and
        a random bystander channel.
        """
        rng = get_generator(seed)
        mode = MediatorMode(config.mode)
        leg_a = single_leg(LABEL_A, config.d_a)
        leg_g = single_leg(LABEL_G, config.d_g)
        leg_b = single_leg(LABEL_B, config.d_b)
        factor_a = random_state(draw_seed(rng), leg_a)
        factor_b = random_state(draw_seed(rng), leg_b)
        if mode == MediatorMode.CLASSICAL:
            factor_g = classical_state(random_distribution(draw_seed(rng), config.d_g))
        else:
            factor_g = random_state(draw_seed(rng), leg_g)
        if step_count is None:
            step_count = int(rng.integers(1, config.max_steps + 1)) if config.max_steps > 0 else 0
        left_layout = make_layout([(LABEL_A, config.d_a), (LABEL_G, config.d_g)])
        right_layout = make_layout([(LABEL_G, config.d_g), (LABEL_B, config.d_b)])
        steps = []
        for _ in range(step_count):
            side = StepSide.LEFT if rng.integers(0, 2) == 0 else StepSide.RIGHT
            env_dim = int(rng.integers(1, config.env_dim + 1))
            if side == StepSide.LEFT:
                interaction = random_channel(draw_seed(rng), left_layout, env_dim)
                bystander = random_channel(draw_seed(rng), leg_b, int(rng.integers(1, 3)))
            else:
                interaction = random_channel(draw_seed(rng), right_layout, env_dim)
                bystander = random_channel(draw_seed(rng), leg_a, int(rng.integers(1, 3)))
            steps.append(StepChannel(side, interaction, bystander))
        return build_protocol(factor_a, factor_g, factor_b, steps, mode)

    def fuzz_protocols(self, seed: int, config: FuzzConfig) -> Iterator[tuple[int, Protocol]]:
        """Yield (sub_seed, protocol) pairs; the i-th pair depends only on seed and i.

        Raises:
            ConfigOutOfRange: See `check_caps`
        """
        self.check_caps(config)
        if not 0 <= seed <= UINT64_MAX:
            raise ConfigOutOfRange("seed", seed, UINT64_MAX)
        logger.debug(f"Fuzzing {config.count} {config.mode.value} protocols from seed {seed}")
        return self._stream(seed, config)

    def _stream(self, seed: int, config: FuzzConfig) -> Iterator[tuple[int, Protocol]]:
        for sub_seed in spawn_subseeds(seed, config.count):
            yield sub_seed, self.generate(sub_seed, config)


fuzz_service = FuzzService()
