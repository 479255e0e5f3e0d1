"""Completely positive trace-preserving maps.

Channels act on states (Schroedinger picture). Kraus operators are stored as a
read-only stack of shape (rank, out_dim, in_dim). The Choi matrix is
unnormalized, C = sum_ij |i><j| (x) T(|i><j|), input leg first, so its trace
equals in_dim and its partial trace over the output leg is the identity.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from mediatrix.config import settings
from mediatrix.core.exceptions import (
    LayoutMismatch,
    NoClassicalLeg,
    NotCP,
    NotGClassical,
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
    basis_projector,
    leg_permutation,
    lift_local,
    partial_trace_matrix,
    single_leg,
)
from mediatrix.utils.seeding import SeedLike, get_generator
from mediatrix.utils.validators import ComplexMatrix, identity_deviation, max_entry_distance

logger = logging.getLogger(__name__)

KrausStack = NDArray[np.complex128]

# Kraus operators with Frobenius norm below this are dropped
_KRAUS_ZERO = 1e-14


def _same_legs(left: SystemLayout, right: SystemLayout) -> bool:
    return left.labels == right.labels and left.dims == right.dims


def _as_kraus_stack(kraus: Sequence[object] | NDArray[np.complex128]) -> KrausStack:
    stack = np.array([np.asarray(k, dtype=complex) for k in kraus], dtype=complex)
    if stack.ndim != 3:
        raise ShapeMismatch("Kraus operators must be a non-empty list of equally shaped matrices")
    if not np.all(np.isfinite(stack)):
        raise ShapeMismatch("Kraus operators have non-finite entries")
    return stack


def _drop_zero_kraus(stack: KrausStack) -> KrausStack:
    norms = np.linalg.norm(stack.reshape(stack.shape[0], -1), axis=1)
    keep = norms > _KRAUS_ZERO
    if not np.any(keep):
        return stack[:1]
    return stack[keep]


def kraus_choi(kraus: KrausStack) -> ComplexMatrix:
    """Unnormalized Choi matrix of a Kraus family (input leg first)."""
    rank, out_dim, in_dim = kraus.shape
    vectors = kraus.transpose(0, 2, 1).reshape(rank, in_dim * out_dim)
    return vectors.T @ vectors.conj()


def apply_kraus(kraus: KrausStack, matrix: ComplexMatrix) -> ComplexMatrix:
    """sum_k K rho K^dagger."""
    return np.einsum("kij,jl,kml->im", kraus, matrix, kraus.conj(), optimize=True)


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map between layouts, in Kraus form with a lazily cached Choi matrix.

    `classical_leg` records that the map is invariant under pinch-sandwiching of
    that leg. Public constructors check it before recording it, and the
    classicality guards re-check the Kraus data instead of reading it.
    """

    in_layout: SystemLayout
    out_layout: SystemLayout
    kraus: KrausStack = field(repr=False)
    classical_leg: str | None = None

    @property
    def in_dim(self) -> int:
        return self.in_layout.total_dim

    @property
    def out_dim(self) -> int:
        return self.out_layout.total_dim

    @property
    def rank(self) -> int:
        return int(self.kraus.shape[0])

    @cached_property
    def choi(self) -> ComplexMatrix:
        choi = kraus_choi(self.kraus)
        choi.flags.writeable = False
        return choi

    def __call__(self, state: DensityState) -> DensityState:
        return apply(self, state)


def _build_channel(
    kraus: Sequence[object] | NDArray[np.complex128],
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    classical_leg: str | None = None,
) -> Channel:
    """Validated channel; `classical_leg` is set as given, without a pinching check."""
    stack = _as_kraus_stack(kraus)
    expected = (out_layout.total_dim, in_layout.total_dim)
    if stack.shape[1:] != expected:
        raise ShapeMismatch(
            f"Kraus operators of shape {stack.shape[1:]} do not map "
            f"{in_layout.describe()} to {out_layout.describe()} {expected}"
        )
    gram = np.einsum("kji,kjl->il", stack.conj(), stack)
    deviation = identity_deviation(gram)
    if deviation > settings.tp_tol:
        raise NotTracePreserving(deviation, settings.tp_tol)
    stack = _drop_zero_kraus(stack)
    stack.flags.writeable = False
    return Channel(in_layout, out_layout, stack, classical_leg)


def _flag_classical(channel: Channel, classical_leg: str | None) -> Channel:
    """Set the classical-leg flag only if the channel really is pinch-invariant on that leg.

    Raises:
        NoClassicalLeg: `classical_leg` is not flagged classical in the layout
        NotGClassical: The channel changes under pinch-sandwiching of `classical_leg`
    """
    if classical_leg is None:
        return channel
    if not is_g_classical(channel, classical_leg):
        raise NotGClassical(
            f"Channel on {channel.in_layout.describe()} is not invariant under pinching of '{classical_leg}'"
        )
    return replace(channel, classical_leg=classical_leg)


def channel_from_kraus(
    kraus: Sequence[object] | NDArray[np.complex128],
    in_layout: SystemLayout,
    out_layout: SystemLayout | None = None,
    classical_leg: str | None = None,
) -> Channel:
    """Build a channel from Kraus operators.

    Args:
        kraus: Matrices of shape (out_dim, in_dim)
        in_layout: Input layout
        out_layout: Output layout (defaults to in_layout)
        classical_leg: Leg the family is pinch-sandwiched on; checked before it is recorded

    Returns:
        Channel: Validated channel

    Raises:
        ShapeMismatch: Inconsistent shapes or non-finite entries
        NotTracePreserving: sum K^dagger K deviates from identity by more than tp_tol
        NotGClassical: `classical_leg` given but the family is not pinch-invariant on it
    """
    out_layout = in_layout if out_layout is None else out_layout
    return _flag_classical(_build_channel(kraus, in_layout, out_layout), classical_leg)


def choi_of(channel: Channel) -> ComplexMatrix:
    """Unnormalized Choi matrix, input leg first."""
    return channel.choi


def channel_from_choi(
    choi: object,
    in_layout: SystemLayout,
    out_layout: SystemLayout | None = None,
    classical_leg: str | None = None,
) -> Channel:
    """Recover a minimal Kraus family from a Choi matrix.

    Raises:
        ShapeMismatch: Choi size differs from in_dim * out_dim, or non-finite entries
        NotCP: Choi eigenvalue below -cp_tol
        NotTracePreserving: Output marginal deviates from identity
        NotGClassical: `classical_leg` given but the map is not pinch-invariant on it
    """
    out_layout = in_layout if out_layout is None else out_layout
    kraus = _choi_kraus(choi, in_layout.total_dim, out_layout.total_dim)
    return _flag_classical(_build_channel(kraus, in_layout, out_layout), classical_leg)


def _choi_kraus(choi: object, in_dim: int, out_dim: int) -> list[ComplexMatrix]:
    matrix = np.asarray(choi, dtype=complex)
    if matrix.shape != (in_dim * out_dim, in_dim * out_dim):
        raise ShapeMismatch(
            f"Choi of shape {matrix.shape} does not fit {in_dim}x{out_dim} legs"
        )
    if not np.all(np.isfinite(matrix)):
        raise ShapeMismatch("Choi matrix has non-finite entries")
    marginal = partial_trace_matrix(matrix, [in_dim, out_dim], [0])
    deviation = identity_deviation(marginal)
    if deviation > settings.tp_tol:
        raise NotTracePreserving(deviation, settings.tp_tol)
    hermitian = (matrix + matrix.conj().T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    if eigenvalues[0] < -settings.cp_tol:
        raise NotCP(float(eigenvalues[0]))
    kraus = [
        np.sqrt(value) * eigenvectors[:, index].reshape(in_dim, out_dim).T
        for index, value in enumerate(eigenvalues)
        if value > _KRAUS_ZERO
    ]
    if not kraus:
        raise NotTracePreserving(1.0, settings.tp_tol)
    return kraus


def _compress(channel: Channel) -> Channel:
    """Re-derive a minimal Kraus family when the stack outgrows in_dim * out_dim."""
    if channel.rank <= channel.in_dim * channel.out_dim:
        return channel
    kraus = _choi_kraus(channel.choi, channel.in_dim, channel.out_dim)
    return _build_channel(kraus, channel.in_layout, channel.out_layout, channel.classical_leg)


def choi_distance(left: Channel, right: Channel) -> float:
    """Max-entry distance between Choi matrices."""
    if left.in_dim != right.in_dim or left.out_dim != right.out_dim:
        raise LayoutMismatch(
            (left.in_layout.describe(), left.out_layout.describe()),
            (right.in_layout.describe(), right.out_layout.describe()),
        )
    return max_entry_distance(left.choi, right.choi)


# ---------------------------------------------------------------------------
# Action and duality
# ---------------------------------------------------------------------------


def apply_matrix(channel: Channel, matrix: ComplexMatrix) -> ComplexMatrix:
    """Action on an arbitrary operator (linear extension)."""
    if matrix.shape != (channel.in_dim, channel.in_dim):
        raise ShapeMismatch(f"Operator of shape {matrix.shape} does not fit {channel.in_layout.describe()}")
    return apply_kraus(channel.kraus, matrix)


def apply(channel: Channel, state: DensityState) -> DensityState:
    """Schroedinger action on a state.

    Raises:
        LayoutMismatch: State not on the channel's input layout
    """
    if not _same_legs(state.layout, channel.in_layout):
        raise LayoutMismatch(channel.in_layout.describe(), state.layout.describe())
    return DensityState(channel.out_layout, apply_kraus(channel.kraus, state.matrix))


@dataclass(frozen=True, eq=False)
class HeisenbergMap:
    """Trace-pairing adjoint of a channel; acts on observables of the output layout."""

    in_layout: SystemLayout
    out_layout: SystemLayout
    kraus: KrausStack = field(repr=False)

    def __call__(self, observable: object) -> ComplexMatrix:
        matrix = np.asarray(observable, dtype=complex)
        if matrix.shape != (self.in_layout.total_dim, self.in_layout.total_dim):
            raise ShapeMismatch(
                f"Observable of shape {matrix.shape} does not fit {self.in_layout.describe()}"
            )
        return apply_kraus(self.kraus, matrix)

    def unitality_deviation(self) -> float:
        identity = np.eye(self.in_layout.total_dim, dtype=complex)
        return identity_deviation(self(identity))

    def is_unital(self, atol: float | None = None) -> bool:
        tolerance = settings.herm_tol if atol is None else atol
        return self.unitality_deviation() <= tolerance


def heisenberg_dual(channel: Channel) -> HeisenbergMap:
    """Adjoint X -> sum_k K^dagger X K; unital because the channel is trace preserving."""
    dual = np.ascontiguousarray(channel.kraus.conj().transpose(0, 2, 1))
    dual.flags.writeable = False
    return HeisenbergMap(channel.out_layout, channel.in_layout, dual)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def identity_channel(layout: SystemLayout) -> Channel:
    return channel_from_kraus([np.eye(layout.total_dim)], layout)


def unitary_channel(unitary: object, layout: SystemLayout) -> Channel:
    """Conjugation rho -> U rho U^dagger."""
    return channel_from_kraus([unitary], layout)


def pinch_channel(layout: SystemLayout, target: str = LABEL_G) -> Channel:
    """Dephasing in the canonical basis of one leg."""
    dim = layout.dim_of(target)
    kraus = [lift_local(basis_projector(dim, g), target, layout).matrix for g in range(dim)]
    return _build_channel(kraus, layout, layout, classical_leg=target)


def replacement_channel(state: DensityState, in_layout: SystemLayout) -> Channel:
    """rho -> Tr[rho] sigma: discard the input and prepare `state`."""
    eigenvalues, eigenvectors = np.linalg.eigh(state.matrix)
    kraus = []
    for value, vector in zip(eigenvalues, eigenvectors.T, strict=True):
        if value <= _KRAUS_ZERO:
            continue
        for index in range(in_layout.total_dim):
            op = np.zeros((state.dim, in_layout.total_dim), dtype=complex)
            op[:, index] = np.sqrt(value) * vector
            kraus.append(op)
    return channel_from_kraus(kraus, in_layout, state.layout)


def compose(second: Channel, first: Channel) -> Channel:
    """second o first.

    Raises:
        LayoutMismatch: first's output legs differ from second's input legs
    """
    if not _same_legs(first.out_layout, second.in_layout):
        raise LayoutMismatch(second.in_layout.describe(), first.out_layout.describe())
    products = np.einsum("aij,bjk->abik", second.kraus, first.kraus).reshape(
        second.rank * first.rank, second.out_dim, first.in_dim
    )
    leg = first.classical_leg if first.classical_leg == second.classical_leg else None
    return _compress(_build_channel(products, first.in_layout, second.out_layout, leg))


def tensor_channels(left: Channel, right: Channel) -> Channel:
    """left (x) right on the concatenated layouts; Kraus set = pairwise products.

    Raises:
        LayoutMismatch: The two channels share a leg label
    """
    overlap = set(left.in_layout.labels) & set(right.in_layout.labels)
    overlap |= set(left.out_layout.labels) & set(right.out_layout.labels)
    if overlap:
        raise LayoutMismatch("disjoint legs", sorted(overlap))
    products = np.einsum("aij,bkl->abikjl", left.kraus, right.kraus).reshape(
        left.rank * right.rank,
        left.out_dim * right.out_dim,
        left.in_dim * right.in_dim,
    )
    leg = left.classical_leg or right.classical_leg
    return _build_channel(
        products,
        left.in_layout.concat(right.in_layout),
        left.out_layout.concat(right.out_layout),
        leg,
    )


def reorder_channel(channel: Channel, order: Sequence[str]) -> Channel:
    """Permute input and output legs into `order`."""
    in_positions, in_layout = leg_permutation(channel.in_layout, order)
    out_positions, out_layout = leg_permutation(channel.out_layout, order)
    n_out = len(channel.out_layout.dims)
    tensor = channel.kraus.reshape(
        (channel.rank,) + channel.out_layout.dims + channel.in_layout.dims
    )
    axes = [0] + [1 + p for p in out_positions] + [1 + n_out + p for p in in_positions]
    kraus = tensor.transpose(axes).reshape(channel.rank, channel.out_dim, channel.in_dim)
    return _build_channel(kraus, in_layout, out_layout, channel.classical_leg)


# ---------------------------------------------------------------------------
# Local interaction steps
# ---------------------------------------------------------------------------


class StepSide(str, Enum):
    """Which party interacts with the mediator in a step."""

    LEFT = "left"
    RIGHT = "right"


STEP_LEGS: dict[StepSide, tuple[frozenset[str], frozenset[str]]] = {
    StepSide.LEFT: (frozenset({LABEL_A, LABEL_G}), frozenset({LABEL_B})),
    StepSide.RIGHT: (frozenset({LABEL_G, LABEL_B}), frozenset({LABEL_A})),
}


@dataclass(frozen=True, eq=False)
class StepChannel:
    """One local step: T_AG (x) phi_B (LEFT) or phi_A (x) T_GB (RIGHT)."""

    side: StepSide
    interaction: Channel
    bystander: Channel

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", StepSide(self.side))
        interaction_legs, bystander_legs = STEP_LEGS[self.side]
        for channel, legs, role in (
            (self.interaction, interaction_legs, "interaction"),
            (self.bystander, bystander_legs, "bystander"),
        ):
            if set(channel.in_layout.labels) != legs or not _same_legs(
                channel.in_layout, channel.out_layout
            ):
                raise LayoutMismatch(
                    f"{role} on {sorted(legs)}", channel.in_layout.describe()
                )

    @cached_property
    def channel(self) -> Channel:
        return step_channel(self)


def step_channel(step: StepChannel) -> Channel:
    """Full channel of a step on the [A, G, B] legs."""
    if step.side == StepSide.LEFT:
        full = tensor_channels(step.interaction, step.bystander)
    else:
        full = tensor_channels(step.bystander, step.interaction)
    return reorder_channel(full, (LABEL_A, LABEL_G, LABEL_B))


# ---------------------------------------------------------------------------
# Classical mediator enforcement
# ---------------------------------------------------------------------------


def classical_target(layout: SystemLayout, target: str | None = None) -> str:
    """Resolve the classical leg a classicality check refers to.

    Raises:
        NoClassicalLeg: Layout has no classical leg, or `target` is not classical
    """
    if target is not None:
        if not layout.is_classical(target):
            raise NoClassicalLeg(f"Leg '{target}' is not flagged classical in {layout.describe()}")
        return target
    labels = layout.classical_labels
    if not labels:
        raise NoClassicalLeg(f"Layout {layout.describe()} has no classical leg")
    return LABEL_G if LABEL_G in labels else labels[0]


def g_classicalize(channel: Channel, target: str | None = None) -> Channel:
    """Sandwich a channel between pinchings of its classical leg: P o T o P."""
    if not _same_legs(channel.in_layout, channel.out_layout):
        raise LayoutMismatch(channel.in_layout.describe(), channel.out_layout.describe())
    leg = classical_target(channel.in_layout, target)
    layout = channel.in_layout
    dim = layout.dim_of(leg)
    projectors = np.array(
        [lift_local(basis_projector(dim, g), leg, layout).matrix for g in range(dim)]
    )
    sandwiched = np.einsum("aij,kjl,blm->abkim", projectors, channel.kraus, projectors).reshape(
        dim * dim * channel.rank, channel.out_dim, channel.in_dim
    )
    result = _build_channel(sandwiched, layout, channel.out_layout, classical_leg=leg)
    return _compress(result)


def classicality_deviation(channel: Channel, target: str | None = None) -> float:
    """Choi max-entry distance between T and P o T o P."""
    return choi_distance(channel, g_classicalize(channel, target))


def _single_block_kraus(channel: Channel, leg: str) -> bool:
    """True if every Kraus operator reads one value of `leg` and writes one value.

    Such a family is pinch-invariant exactly; the converse needs the Choi check.
    """
    layout = channel.in_layout
    if not _same_legs(layout, channel.out_layout):
        return False
    # value of `leg` at every flat basis index
    values = np.indices(layout.dims).reshape(len(layout.dims), -1)[layout.index(leg)]
    for op in channel.kraus:
        rows, cols = np.nonzero(np.abs(op) > _KRAUS_ZERO)
        if np.unique(values[rows]).size > 1 or np.unique(values[cols]).size > 1:
            return False
    return True


def is_g_classical(channel: Channel, target: str | None = None) -> bool:
    """True iff the channel is invariant under pinch-sandwiching of its classical leg."""
    leg = classical_target(channel.in_layout, target)
    if _single_block_kraus(channel, leg):
        return True
    return classicality_deviation(channel, leg) <= settings.classical_tol


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------


def haar_unitary(seed: SeedLike, dim: int) -> ComplexMatrix:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    rng = get_generator(seed)
    ginibre = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(ginibre)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry_kraus(seed: SeedLike, dim: int, env_dim: int) -> KrausStack:
    """Kraus blocks of a Haar-random Stinespring isometry C^dim -> C^env (x) C^dim."""
    unitary = haar_unitary(seed, dim * env_dim)
    isometry = unitary[:, :dim]
    return isometry.reshape(env_dim, dim, dim)


def random_channel(seed: SeedLike, in_layout: SystemLayout, env_dim: int) -> Channel:
    """Random channel from a Haar Stinespring dilation with environment of dim env_dim.

    env_dim = 1 gives a random unitary conjugation.
    """
    if env_dim < 1:
        raise ValidationError(f"env_dim must be >= 1, got {env_dim}")
    kraus = random_isometry_kraus(seed, in_layout.total_dim, env_dim)
    return channel_from_kraus(kraus, in_layout)


def random_stochastic(seed: SeedLike, n: int, label: str = LABEL_G) -> Channel:
    """Classical channel given by a random column-stochastic matrix S[y, x] = P(y | x)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    rng = get_generator(seed)
    transition = rng.dirichlet(np.ones(n), size=n).T
    layout = single_leg(label, n, classical=True)
    kraus = []
    for y in range(n):
        for x in range(n):
            if transition[y, x] > 0:
                op = np.zeros((n, n), dtype=complex)
                op[y, x] = np.sqrt(transition[y, x])
                kraus.append(op)
    return _build_channel(kraus, layout, layout, classical_leg=label)


def transition_matrix(channel: Channel) -> NDArray[np.float64]:
    """S[y, x] = <y| T(|x><x|) |y> for a channel on one leg."""
    dim = channel.in_dim
    columns = [
        np.real(np.diag(apply_matrix(channel, basis_projector(dim, x)))) for x in range(dim)
    ]
    return np.array(columns).T
