"""Fuzz campaigns and LOCC verification sweeps.

Instances run on a thread pool; rows come back in instance order whatever the
completion order, and every instance is driven by its own sub-seed.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor

from mediatrix.config import settings
from mediatrix.core.exceptions import ConfigOutOfRange
from mediatrix.domain.protocol import evolve
from mediatrix.schemas.report import (
    FuzzReport,
    FuzzRow,
    FuzzSummary,
    LoccRow,
    LoccSummary,
    LoccVerifyReport,
)
from mediatrix.services.fuzz_service import FuzzConfig, fuzz_service
from mediatrix.services.locc_service import LoccGenerator, locc_service
from mediatrix.utils.seeding import UINT64_MAX, spawn_subseeds

logger = logging.getLogger(__name__)


class CampaignService:
    """Run many seeded instances and aggregate a pass/fail verdict."""

    def _fuzz_instance(self, index: int, sub_seed: int, config: FuzzConfig) -> FuzzRow:
        protocol = fuzz_service.generate(sub_seed, config)
        trajectory = evolve(protocol)
        residual = trajectory.max_certificate_residual
        return FuzzRow(
            index=index,
            sub_seed=sub_seed,
            steps=len(protocol.steps),
            final_negativity_ab=trajectory.final_negativity_ab,
            max_negativity_ab=trajectory.max_negativity_ab,
            max_certificate_residual=0.0 if residual is None else residual,
            theorem_pass=bool(trajectory.theorem_pass),
        )

    def run_fuzz_campaign(self, seed: int, config: FuzzConfig) -> FuzzReport:
        """Classical-mode theorem sweep.

        Raises:
            ConfigOutOfRange: Parameters above the fuzz caps
        """
        fuzz_service.check_caps(config)
        self._check_seed(seed)
        start = time.perf_counter()
        logger.info(
            f"Fuzz campaign started: seed={seed} count={config.count} "
            f"dims=({config.d_a},{config.d_g},{config.d_b}) max_steps={config.max_steps}"
        )
        sub_seeds = spawn_subseeds(seed, config.count)
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            rows = list(
                pool.map(
                    lambda item: self._fuzz_instance(item[0], item[1], config),
                    enumerate(sub_seeds),
                )
            )

        violators = [row.sub_seed for row in rows if not row.theorem_pass]
        for row in rows:
            if not row.theorem_pass:
                logger.warning(
                    f"Violation at index {row.index} (sub_seed={row.sub_seed}): "
                    f"negativity_AB={row.final_negativity_ab!r}, residual={row.max_certificate_residual!r}"
                )
        duration_ms = (time.perf_counter() - start) * 1000
        logger.info(f"Fuzz campaign finished: {len(rows)} protocols, {len(violators)} violations, duration_ms={duration_ms:.1f}")

        return FuzzReport(
            seed=seed,
            d_a=config.d_a,
            d_g=config.d_g,
            d_b=config.d_b,
            max_steps=config.max_steps,
            rows=rows,
            summary=FuzzSummary(
                count=len(rows),
                max_final_negativity_ab=max((r.final_negativity_ab for r in rows), default=None),
                max_certificate_residual=max((r.max_certificate_residual for r in rows), default=None),
                violator_sub_seeds=violators,
                wall_time_ms=duration_ms if settings.report_timing else None,
            ),
        )

    def _locc_instance(
        self,
        index: int,
        sub_seed: int,
        generator: LoccGenerator,
        rounds: int,
        alphabet: int,
    ) -> LoccRow:
        protocol = locc_service.generate(sub_seed, generator, rounds, alphabet)
        result = locc_service.verify_equivalence(protocol)
        negativity_ab = locc_service.compiled_negativity(protocol, sub_seed)
        return LoccRow(
            index=index,
            sub_seed=sub_seed,
            rounds=rounds,
            alphabet=alphabet,
            mediator_dim=result.mediator_dim,
            max_choi_deviation=result.max_choi_deviation,
            compiled_negativity_ab=negativity_ab,
            passed=result.passed and negativity_ab <= settings.theorem_tol,
        )

    def run_locc_campaign(
        self,
        seed: int,
        count: int,
        rounds: int,
        alphabet: int,
        generator: LoccGenerator = "random",
    ) -> LoccVerifyReport:
        """Compile-and-compare sweep over seeded LOCC protocols on two qubits.

        Raises:
            ConfigOutOfRange: rounds or alphabet above the LOCC caps, negative count
        """
        locc_service.check_caps(rounds, alphabet)
        self._check_seed(seed)
        if count < 0:
            raise ConfigOutOfRange("count", count, ">= 0")
        start = time.perf_counter()
        logger.info(
            f"LOCC sweep started: seed={seed} count={count} rounds={rounds} "
            f"alphabet={alphabet} generator={generator}"
        )
        sub_seeds = spawn_subseeds(seed, count)
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            rows = list(
                pool.map(
                    lambda item: self._locc_instance(item[0], item[1], generator, rounds, alphabet),
                    enumerate(sub_seeds),
                )
            )

        failures = [row.sub_seed for row in rows if not row.passed]
        for row in rows:
            if not row.passed:
                logger.warning(
                    f"Equivalence failure at index {row.index} (sub_seed={row.sub_seed}): "
                    f"deviation={row.max_choi_deviation!r}, negativity_AB={row.compiled_negativity_ab!r}"
                )
        duration_ms = (time.perf_counter() - start) * 1000
        logger.info(f"LOCC sweep finished: {len(rows)} protocols, {len(failures)} failures, duration_ms={duration_ms:.1f}")

        return LoccVerifyReport(
            seed=seed,
            generator=generator,
            rounds=rounds,
            alphabet=alphabet,
            rows=rows,
            summary=LoccSummary(
                count=len(rows),
                max_choi_deviation=max((r.max_choi_deviation for r in rows), default=None),
                max_compiled_negativity_ab=max((r.compiled_negativity_ab for r in rows), default=None),
                failed_sub_seeds=failures,
                wall_time_ms=duration_ms if settings.report_timing else None,
            ),
        )

    def _check_seed(self, seed: int) -> None:
        if not 0 <= seed <= UINT64_MAX:
            raise ConfigOutOfRange("seed", seed, UINT64_MAX)


campaign_service = CampaignService()
