"""Finite-round LOCC protocols and their compilation onto a classical mediator.

A round lets one party apply an instrument chosen by the transcript of all
earlier outcomes. Compilation stores the transcript in a single classical
register G: every round becomes one local step that reads G in its canonical
basis, applies the matching instrument arm and writes the extended transcript
back into G.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np

from mediatrix.config import settings
from mediatrix.core.exceptions import (
    LayoutMismatch,
    LoccError,
    MediatorOverflow,
    MissingTranscriptInstrument,
    NotTracePreserving,
    ShapeMismatch,
    ValidationError,
)
from mediatrix.domain.algebra_core import (
    LABEL_A,
    LABEL_B,
    LABEL_G,
    DensityState,
    SystemLayout,
    make_layout,
    maximally_mixed,
    point_mass,
    single_leg,
)
from mediatrix.domain.channels import (
    Channel,
    KrausStack,
    StepChannel,
    StepSide,
    apply_kraus,
    channel_from_kraus,
    identity_channel,
    random_isometry_kraus,
)
from mediatrix.domain.protocol import MediatorMode, Protocol, build_protocol
from mediatrix.utils.seeding import SeedLike, draw_seed, get_generator
from mediatrix.utils.validators import ComplexMatrix, identity_deviation

logger = logging.getLogger(__name__)

Transcript = tuple[int, ...]

PARTIES = (LABEL_A, LABEL_B)


# ---------------------------------------------------------------------------
# Instruments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Instrument:
    """Outcome-indexed CP maps on one party's leg whose sum is trace preserving."""

    layout: SystemLayout
    arms: tuple[KrausStack, ...] = field(repr=False)

    def __post_init__(self) -> None:
        dim = self.layout.total_dim
        stacks = []
        for index, arm in enumerate(self.arms):
            stack = np.array([np.asarray(k, dtype=complex) for k in arm], dtype=complex)
            if stack.ndim != 3 or stack.shape[1:] != (dim, dim):
                raise ShapeMismatch(f"Arm {index} does not act on {self.layout.describe()}")
            stack.flags.writeable = False
            stacks.append(stack)
        if not stacks:
            raise ValidationError("Instrument needs at least one arm")
        object.__setattr__(self, "arms", tuple(stacks))
        gram = sum(np.einsum("kji,kjl->il", s.conj(), s) for s in stacks)
        deviation = identity_deviation(gram)
        if deviation > settings.instrument_tol:
            raise NotTracePreserving(deviation, settings.instrument_tol)

    @property
    def outcome_count(self) -> int:
        return len(self.arms)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def arm_channel_kraus(self) -> KrausStack:
        """All Kraus operators of all arms, outcome-major."""
        return np.concatenate(self.arms, axis=0)

    def coarse_grained(self) -> Instrument:
        """Single-arm instrument: the sum over outcomes."""
        return Instrument(self.layout, (self.arm_channel_kraus(),))


def projective_instrument(layout: SystemLayout) -> Instrument:
    """Measurement in the canonical basis, one arm per basis vector."""
    dim = layout.total_dim
    arms = []
    for index in range(dim):
        projector = np.zeros((dim, dim), dtype=complex)
        projector[index, index] = 1.0
        arms.append([projector])
    return Instrument(layout, tuple(arms))


def unitary_instrument(unitary: object, layout: SystemLayout) -> Instrument:
    return Instrument(layout, ([unitary],))


def uniform_identity_instrument(layout: SystemLayout, outcomes: int) -> Instrument:
    """`outcomes` arms, each sqrt(1/outcomes) * identity."""
    arm = np.eye(layout.total_dim, dtype=complex) / math.sqrt(outcomes)
    return Instrument(layout, tuple([arm] for _ in range(outcomes)))


def random_instrument(seed: SeedLike, layout: SystemLayout, outcomes: int, arm_rank: int = 1) -> Instrument:
    """Arms cut from the Kraus blocks of one Haar-random Stinespring isometry."""
    blocks = random_isometry_kraus(seed, layout.total_dim, outcomes * arm_rank)
    arms = tuple(blocks[i * arm_rank : (i + 1) * arm_rank] for i in range(outcomes))
    return Instrument(layout, arms)


# ---------------------------------------------------------------------------
# Rounds and protocols
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LoccRound:
    """One party acts with an instrument picked by the transcript so far."""

    party: str
    alphabet: int
    instruments: Mapping[Transcript, Instrument] = field(default_factory=dict, repr=False)
    default: Instrument | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.party not in PARTIES:
            raise ValidationError(f"Round party must be one of {list(PARTIES)}, got '{self.party}'")
        if self.alphabet < 1:
            raise ValidationError(f"Round alphabet must be >= 1, got {self.alphabet}")
        object.__setattr__(self, "instruments", {tuple(k): v for k, v in self.instruments.items()})
        for instrument in [*self.instruments.values(), *([self.default] if self.default else [])]:
            if instrument.outcome_count != self.alphabet:
                raise ValidationError(
                    f"Instrument has {instrument.outcome_count} outcomes, round alphabet is {self.alphabet}"
                )

    def lookup(self, transcript: Transcript) -> Instrument | None:
        return self.instruments.get(tuple(transcript), self.default)


@dataclass(frozen=True, eq=False)
class LoccProtocol:
    """Finite sequence of transcript-conditioned local instruments on [A, B]."""

    layout: SystemLayout
    rounds: tuple[LoccRound, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if self.layout.labels != PARTIES:
            raise LayoutMismatch(list(PARTIES), list(self.layout.labels))
        if not self.rounds:
            raise ValidationError("LOCC protocol needs at least one round")
        for index, round_ in enumerate(self.rounds):
            leg_dim = self.layout.dim_of(round_.party)
            for transcript in reachable_transcripts(self, index):
                instrument = round_.lookup(transcript)
                if instrument is None:
                    raise MissingTranscriptInstrument(index, transcript)
                if instrument.dim != leg_dim:
                    raise LayoutMismatch(
                        f"round {index} on '{round_.party}' of dim {leg_dim}", f"dim {instrument.dim}"
                    )

    @property
    def alphabets(self) -> tuple[int, ...]:
        return tuple(round_.alphabet for round_ in self.rounds)

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    def instrument_for(self, round_index: int, transcript: Transcript) -> Instrument:
        """Raises MissingTranscriptInstrument for an uncovered transcript."""
        instrument = self.rounds[round_index].lookup(transcript)
        if instrument is None:
            raise MissingTranscriptInstrument(round_index, tuple(transcript))
        return instrument


def reachable_transcripts(protocol: LoccProtocol, round_index: int) -> Iterator[Transcript]:
    """Every outcome sequence that can precede `round_index`."""
    alphabets = [round_.alphabet for round_ in protocol.rounds[:round_index]]
    return itertools.product(*(range(n) for n in alphabets))


@dataclass(frozen=True)
class TranscriptCodec:
    """Mixed-radix bijection between transcripts and mediator basis labels.

    The first outcome is the least significant digit, so a transcript of
    length k uses labels 0 .. prod(alphabets[:k]) - 1 and the empty
    transcript is label 0.
    """

    alphabets: tuple[int, ...]

    @property
    def register_dim(self) -> int:
        return math.prod(self.alphabets)

    def weight(self, position: int) -> int:
        return math.prod(self.alphabets[:position])

    def encode(self, transcript: Transcript) -> int:
        if len(transcript) > len(self.alphabets):
            raise LoccError(f"Transcript {list(transcript)} is longer than the protocol")
        value = 0
        for position, outcome in enumerate(transcript):
            if not 0 <= outcome < self.alphabets[position]:
                raise LoccError(f"Outcome {outcome} out of range at position {position}")
            value += outcome * self.weight(position)
        return value

    def decode(self, value: int, length: int) -> Transcript:
        if not 0 <= value < self.weight(length):
            raise LoccError(f"Label {value} does not encode a transcript of length {length}")
        digits = []
        for n in self.alphabets[:length]:
            value, digit = divmod(value, n)
            digits.append(digit)
        return tuple(digits)


# ---------------------------------------------------------------------------
# Direct simulation
# ---------------------------------------------------------------------------


def _lift(kraus: KrausStack, party: str, layout: SystemLayout) -> KrausStack:
    d_a, d_b = layout.dims
    if party == LABEL_A:
        return np.einsum("kij,lm->kiljm", kraus, np.eye(d_b)).reshape(len(kraus), d_a * d_b, d_a * d_b)
    return np.einsum("lm,kij->klimj", np.eye(d_a), kraus).reshape(len(kraus), d_a * d_b, d_a * d_b)


def branch_kraus(protocol: LoccProtocol) -> KrausStack:
    """Kraus operators of the coarse-grained LOCC channel: one product per branch on [A, B]."""
    dim = protocol.layout.total_dim
    branches: list[tuple[Transcript, ComplexMatrix]] = [((), np.eye(dim, dtype=complex))]
    for index, round_ in enumerate(protocol.rounds):
        extended = []
        for transcript, product in branches:
            instrument = protocol.instrument_for(index, transcript)
            for outcome, arm in enumerate(instrument.arms):
                for op in _lift(arm, round_.party, protocol.layout):
                    extended.append(((*transcript, outcome), op @ product))
        branches = extended
    return np.array([op for _, op in branches])


def simulate_locc(protocol: LoccProtocol, state: DensityState) -> DensityState:
    """Sum over all transcripts of the branch maps applied in round order.

    Raises:
        LayoutMismatch: Input not on the protocol's [A, B] layout
        MissingTranscriptInstrument: A reachable transcript has no instrument
    """
    if state.layout.dims != protocol.layout.dims or state.layout.labels != protocol.layout.labels:
        raise LayoutMismatch(protocol.layout.describe(), state.layout.describe())
    branches: list[tuple[Transcript, ComplexMatrix]] = [((), state.matrix)]
    for index, round_ in enumerate(protocol.rounds):
        extended = []
        for transcript, matrix in branches:
            instrument = protocol.instrument_for(index, transcript)
            for outcome, arm in enumerate(instrument.arms):
                lifted = _lift(arm, round_.party, protocol.layout)
                extended.append(((*transcript, outcome), apply_kraus(lifted, matrix)))
        branches = extended
    return DensityState(protocol.layout, sum(matrix for _, matrix in branches))


def locc_channel(protocol: LoccProtocol) -> Channel:
    return channel_from_kraus(branch_kraus(protocol), protocol.layout)


def locc_choi(protocol: LoccProtocol) -> ComplexMatrix:
    """Unnormalized Choi of the coarse-grained LOCC channel (trace d_A * d_B)."""
    return locc_channel(protocol).choi


def coarse_grain_last_round(protocol: LoccProtocol) -> LoccProtocol:
    """Sum the final round's arms before branching; the channel is unchanged."""
    *head, last = protocol.rounds
    index = len(head)
    instruments = {
        transcript: protocol.instrument_for(index, transcript).coarse_grained()
        for transcript in reachable_transcripts(protocol, index)
    }
    return LoccProtocol(protocol.layout, (*head, LoccRound(last.party, 1, instruments)))


# ---------------------------------------------------------------------------
# Compilation onto a classical mediator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MediatorDimensions:
    """Transcript register size next to the m * n count of separate n-level registers."""

    rounds: int
    alphabet: int
    transcript_register: int
    separate_registers: int


def mediator_dimensions(protocol: LoccProtocol) -> MediatorDimensions:
    alphabet = max(protocol.alphabets)
    return MediatorDimensions(
        rounds=protocol.round_count,
        alphabet=alphabet,
        transcript_register=TranscriptCodec(protocol.alphabets).register_dim,
        separate_registers=protocol.round_count * alphabet,
    )


def _transition(dim: int, target: int, source: int) -> ComplexMatrix:
    op = np.zeros((dim, dim), dtype=complex)
    op[target, source] = 1.0
    return op


def _pair(party: str, local: ComplexMatrix, flag: ComplexMatrix) -> ComplexMatrix:
    """local (x) flag on [A, G], flag (x) local on [G, B]."""
    return np.kron(local, flag) if party == LABEL_A else np.kron(flag, local)


def compiled_interaction(
    protocol: LoccProtocol, round_index: int, codec: TranscriptCodec
) -> Channel:
    """Read G, apply the transcript's instrument arm, write the extended transcript.

    Kraus operators are K (x) |s + i * w><s| for reachable labels s, arms i and
    Kraus K of that arm; labels that do not encode a transcript of this length
    pass through untouched.
    """
    party = protocol.rounds[round_index].party
    party_dim = protocol.layout.dim_of(party)
    register = codec.register_dim
    # labels below the digit weight are exactly the transcripts of this length
    weight = codec.weight(round_index)
    mediator = single_leg(LABEL_G, register, classical=True)
    leg = SystemLayout((protocol.layout.subsystem(party),))
    layout = leg.concat(mediator) if party == LABEL_A else mediator.concat(leg)
    kraus = []
    for source in range(weight):
        instrument = protocol.instrument_for(round_index, codec.decode(source, round_index))
        for outcome, arm in enumerate(instrument.arms):
            flag = _transition(register, source + outcome * weight, source)
            kraus.extend(_pair(party, op, flag) for op in arm)
    for source in range(weight, register):
        identity = np.eye(party_dim, dtype=complex)
        kraus.append(_pair(party, identity, _transition(register, source, source)))
    return channel_from_kraus(kraus, layout, classical_leg=LABEL_G)


def compile_to_mediator(
    protocol: LoccProtocol,
    factor_a: DensityState | None = None,
    factor_b: DensityState | None = None,
) -> Protocol:
    """Classical-mode protocol with one step per round and G holding the transcript.

    The mediator starts in |0><0|, the empty transcript. Party factors default
    to maximally mixed states; the induced A-B channel does not depend on them.

    Raises:
        MediatorOverflow: Register dimension exceeds settings.mediator_dim_cap
    """
    codec = TranscriptCodec(protocol.alphabets)
    register = codec.register_dim
    if register > settings.mediator_dim_cap:
        raise MediatorOverflow(register, settings.mediator_dim_cap)
    d_a, d_b = protocol.layout.dims
    a = factor_a if factor_a is not None else maximally_mixed(single_leg(LABEL_A, d_a))
    b = factor_b if factor_b is not None else maximally_mixed(single_leg(LABEL_B, d_b))
    steps = []
    for index, round_ in enumerate(protocol.rounds):
        interaction = compiled_interaction(protocol, index, codec)
        if round_.party == LABEL_A:
            bystander = identity_channel(single_leg(LABEL_B, d_b))
            steps.append(StepChannel(StepSide.LEFT, interaction, bystander))
        else:
            bystander = identity_channel(single_leg(LABEL_A, d_a))
            steps.append(StepChannel(StepSide.RIGHT, interaction, bystander))
    logger.debug(f"Compiled {protocol.round_count}-round LOCC protocol onto a {register}-level mediator")
    return build_protocol(a, point_mass(register, 0), b, steps, MediatorMode.CLASSICAL)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def party_layout(d_a: int, d_b: int) -> SystemLayout:
    return make_layout([(LABEL_A, d_a), (LABEL_B, d_b)])


def alternating_parties(rounds: int, first: str = LABEL_A) -> list[str]:
    other = LABEL_B if first == LABEL_A else LABEL_A
    return [first if index % 2 == 0 else other for index in range(rounds)]


def identity_locc_protocol(d_a: int, d_b: int, rounds: int = 1, alphabet: int = 1) -> LoccProtocol:
    """Every arm is sqrt(1/alphabet) * identity; the channel is the identity."""
    layout = party_layout(d_a, d_b)
    rounds_ = []
    for party in alternating_parties(rounds):
        instrument = uniform_identity_instrument(SystemLayout((layout.subsystem(party),)), alphabet)
        rounds_.append(LoccRound(party, alphabet, default=instrument))
    return LoccProtocol(layout, tuple(rounds_))


def measure_and_correct_protocol(dim: int = 2) -> LoccProtocol:
    """A measures in the canonical basis, B shifts |i> back to |0> for outcome i."""
    layout = party_layout(dim, dim)
    leg_a = SystemLayout((layout.subsystem(LABEL_A),))
    leg_b = SystemLayout((layout.subsystem(LABEL_B),))
    shift = np.roll(np.eye(dim, dtype=complex), 1, axis=0)
    corrections = {
        (outcome,): unitary_instrument(np.linalg.matrix_power(shift, (dim - outcome) % dim), leg_b)
        for outcome in range(dim)
    }
    return LoccProtocol(
        layout,
        (
            LoccRound(LABEL_A, dim, default=projective_instrument(leg_a)),
            LoccRound(LABEL_B, 1, corrections),
        ),
    )


def random_locc_protocol(
    seed: SeedLike,
    rounds: int,
    alphabet: int,
    d_a: int = 2,
    d_b: int = 2,
    arm_rank: int = 1,
) -> LoccProtocol:
    """Alternating A, B, A, ... rounds with an independent random instrument per transcript."""
    rng = get_generator(seed)
    layout = party_layout(d_a, d_b)
    rounds_: list[LoccRound] = []
    for index, party in enumerate(alternating_parties(rounds)):
        leg = SystemLayout((layout.subsystem(party),))
        prefixes = itertools.product(*(range(alphabet) for _ in range(index)))
        instruments = {
            prefix: random_instrument(draw_seed(rng), leg, alphabet, arm_rank) for prefix in prefixes
        }
        rounds_.append(LoccRound(party, alphabet, instruments))
    return LoccProtocol(layout, tuple(rounds_))
