"""LOCC compilation checks."""

import logging
from dataclasses import dataclass
from typing import Literal

from mediatrix.config import settings
from mediatrix.core.exceptions import ConfigOutOfRange
from mediatrix.domain.algebra_core import LABEL_A, LABEL_B, random_state, single_leg
from mediatrix.domain.locc import (
    LoccProtocol,
    compile_to_mediator,
    identity_locc_protocol,
    locc_choi,
    mediator_dimensions,
    random_locc_protocol,
)
from mediatrix.domain.protocol import evolve, marginal_channel_choi
from mediatrix.utils.seeding import SeedLike, draw_seed, get_generator
from mediatrix.utils.validators import max_entry_distance

logger = logging.getLogger(__name__)

LoccGenerator = Literal["random", "identity"]


@dataclass(frozen=True)
class EquivalenceResult:
    """Direct LOCC Choi vs the compiled protocol's A-B marginal Choi."""

    max_choi_deviation: float
    passed: bool
    mediator_dim: int


class LoccService:
    """Compile LOCC protocols onto a classical mediator and check the result."""

    def check_caps(self, rounds: int, alphabet: int, d_a: int = 2, d_b: int = 2) -> None:
        """Raises ConfigOutOfRange outside the LOCC caps."""
        for name, value, limit in (
            ("rounds", rounds, settings.locc_max_rounds),
            ("alphabet", alphabet, settings.locc_max_alphabet),
            ("dA", d_a, settings.locc_max_local_dim),
            ("dB", d_b, settings.locc_max_local_dim),
        ):
            if not 1 <= value <= limit:
                raise ConfigOutOfRange(name, value, limit)

    def generate(
        self,
        seed: SeedLike,
        generator: LoccGenerator,
        rounds: int,
        alphabet: int,
        d_a: int = 2,
        d_b: int = 2,
    ) -> LoccProtocol:
        if generator == "identity":
            return identity_locc_protocol(d_a, d_b, rounds, alphabet)
        return random_locc_protocol(seed, rounds, alphabet, d_a, d_b)

    def verify_equivalence(self, protocol: LoccProtocol) -> EquivalenceResult:
        """Compare locc_choi with the Choi of rho_AB -> Tr_G[compiled(rho_AB (x) |0><0|_G)].

        Raises:
            MediatorOverflow: Transcript register above the cap
        """
        direct = locc_choi(protocol)
        compiled = compile_to_mediator(protocol)
        deviation = max_entry_distance(direct, marginal_channel_choi(compiled))
        passed = deviation <= settings.theorem_tol
        if not passed:
            logger.warning(f"Compiled LOCC channel deviates from the direct channel by {deviation:.3e}")
        return EquivalenceResult(deviation, passed, mediator_dimensions(protocol).transcript_register)

    def compiled_negativity(self, protocol: LoccProtocol, seed: SeedLike) -> float:
        """Final A|B negativity of the compiled protocol run on a random product input."""
        rng = get_generator(seed)
        d_a, d_b = protocol.layout.dims
        factor_a = random_state(draw_seed(rng), single_leg(LABEL_A, d_a))
        factor_b = random_state(draw_seed(rng), single_leg(LABEL_B, d_b))
        compiled = compile_to_mediator(protocol, factor_a, factor_b)
        return evolve(compiled).final_negativity_ab


locc_service = LoccService()
