#!/usr/bin/env python3
"""
End-to-end acceptance sweep.

DO NOT ADD SIMULATION LOGIC HERE.
This script only orchestrates package calls.
All rules live in the mediatrix package.

Usage:
    python scripts/acceptance_sweep.py --seed 2024
    python scripts/acceptance_sweep.py --seed 2024 --fuzz-count 50 --locc-count 10

Flow:
    1. Classical-mode fuzz sweep (dA = dB = 2, dG = 3, up to 6 steps)
    2. BMV scenario in both mediator modes
    3. LOCC compilation sweep (2 rounds, binary outcomes, qubits)
    4. Determinism: repeat the fuzz sweep and compare rendered reports
"""

import argparse
import sys
import time

from mediatrix.config import settings
from mediatrix.domain.protocol import MediatorMode
from mediatrix.services.campaign_service import campaign_service
from mediatrix.services.fuzz_service import FuzzConfig
from mediatrix.services.protocol_service import protocol_service
from mediatrix.services.reporting_service import reporting_service


def print_step(step: int, title: str) -> None:
    print(f"\n{'=' * 60}")
    print(f"STEP {step}: {title}")
    print("=" * 60)


def print_check(name: str, passed: bool, detail: str) -> bool:
    print(f"  [{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return passed


def main(seed: int, fuzz_count: int, locc_count: int) -> int:
    results = []

    print_step(1, "Classical-mode fuzz sweep")
    start = time.perf_counter()
    fuzz = campaign_service.run_fuzz_campaign(seed, FuzzConfig(count=fuzz_count))
    results.append(
        print_check(
            "no-go sweep",
            not fuzz.violation,
            f"max negativity_AB={fuzz.summary.max_final_negativity_ab!r}, "
            f"max residual={fuzz.summary.max_certificate_residual!r}, "
            f"{time.perf_counter() - start:.1f}s",
        )
    )

    print_step(2, "BMV scenario")
    quantum = protocol_service.run(protocol_service.bmv_scenario(MediatorMode.QUANTUM))
    classical = protocol_service.run(protocol_service.bmv_scenario(MediatorMode.CLASSICAL))
    results.append(
        print_check(
            "quantum witness",
            abs(quantum.final_negativity_ab - 0.5) <= settings.theorem_tol,
            f"negativity_AB={quantum.final_negativity_ab!r}",
        )
    )
    results.append(
        print_check(
            "classical mediator",
            classical.final_negativity_ab <= 1e-10,
            f"negativity_AB={classical.final_negativity_ab!r}",
        )
    )

    print_step(3, "LOCC compilation sweep")
    start = time.perf_counter()
    locc = campaign_service.run_locc_campaign(seed, locc_count, rounds=2, alphabet=2)
    results.append(
        print_check(
            "compilation",
            not locc.violation,
            f"max Choi deviation={locc.summary.max_choi_deviation!r}, "
            f"max negativity_AB={locc.summary.max_compiled_negativity_ab!r}, "
            f"{time.perf_counter() - start:.1f}s",
        )
    )

    print_step(4, "Determinism")
    repeat = campaign_service.run_fuzz_campaign(seed, FuzzConfig(count=min(fuzz_count, 20)))
    first = campaign_service.run_fuzz_campaign(seed, FuzzConfig(count=min(fuzz_count, 20)))
    results.append(
        print_check(
            "byte-identical reports",
            reporting_service.render_csv(repeat) == reporting_service.render_csv(first),
            f"{len(repeat.rows)} rows",
        )
    )

    print(f"\n{'=' * 60}")
    print(f"ACCEPTANCE {'PASSED' if all(results) else 'FAILED'} ({sum(results)}/{len(results)})")
    print("=" * 60)
    return 0 if all(results) else 2


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the acceptance sweep")
    parser.add_argument("--seed", type=int, default=2024, help="Master seed")
    parser.add_argument("--fuzz-count", type=int, default=200, help="Fuzzed protocols")
    parser.add_argument("--locc-count", type=int, default=50, help="LOCC protocols")

    args = parser.parse_args()

    sys.exit(main(args.seed, args.fuzz_count, args.locc_count))
