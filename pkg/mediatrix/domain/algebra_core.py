"""Finite-dimensional operator algebra: layouts, operators and states.

A layout is an ordered list of subsystems. Matrices on a layout are Kronecker
products in layout order; there is no implicit reordering anywhere, and every
permutation of legs goes through `reorder_legs`.

A classical subsystem of n configurations is the diagonal subalgebra of the
n x n matrices. Its states are probability distributions, embedded as diagonal
density matrices by `classical_state`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from mediatrix.config import settings
from mediatrix.core.exceptions import (
    DimensionMismatch,
    DuplicateLabel,
    EmptyKeepSet,
    NegativeProbability,
    NotAState,
    NotNormalized,
    UnknownLabel,
    ValidationError,
    ZeroDimension,
)
from mediatrix.utils.seeding import SeedLike, get_generator
from mediatrix.utils.validators import (
    ComplexMatrix,
    as_complex_matrix,
    hermiticity_deviation,
    max_entry_distance,
    min_eigenvalue,
)

# Canonical three-party leg labels
LABEL_A = "A"
LABEL_G = "G"
LABEL_B = "B"
CANONICAL_LABELS = (LABEL_A, LABEL_G, LABEL_B)


@dataclass(frozen=True)
class Subsystem:
    """One tensor leg."""

    label: str
    dim: int
    classical: bool = False


@dataclass(frozen=True)
class SystemLayout:
    """Ordered subsystems; fixes tensor-leg ordering for everything downstream."""

    subsystems: tuple[Subsystem, ...]

    def __post_init__(self) -> None:
        if not self.subsystems:
            raise ValidationError("Layout needs at least one subsystem")
        seen: set[str] = set()
        for sub in self.subsystems:
            if sub.dim < 1:
                raise ZeroDimension(sub.label, sub.dim)
            if sub.label in seen:
                raise DuplicateLabel(sub.label)
            seen.add(sub.label)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sub.label for sub in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(sub.dim for sub in self.subsystems)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def classical_labels(self) -> tuple[str, ...]:
        return tuple(sub.label for sub in self.subsystems if sub.classical)

    def index(self, label: str) -> int:
        """Position of a leg, raising UnknownLabel if absent."""
        for position, sub in enumerate(self.subsystems):
            if sub.label == label:
                return position
        raise UnknownLabel(label, self.labels)

    def subsystem(self, label: str) -> Subsystem:
        return self.subsystems[self.index(label)]

    def dim_of(self, label: str) -> int:
        return self.subsystem(label).dim

    def is_classical(self, label: str) -> bool:
        return self.subsystem(label).classical

    def sub_layout(self, labels: Iterable[str]) -> SystemLayout:
        """Restriction to some legs, keeping the original order."""
        wanted = set(labels)
        for label in wanted:
            self.index(label)
        return SystemLayout(tuple(sub for sub in self.subsystems if sub.label in wanted))

    def concat(self, other: SystemLayout) -> SystemLayout:
        return SystemLayout(self.subsystems + other.subsystems)

    def with_classical(self, label: str, classical: bool) -> SystemLayout:
        """Copy with the classical flag of one leg replaced."""
        position = self.index(label)
        subs = list(self.subsystems)
        subs[position] = Subsystem(subs[position].label, subs[position].dim, classical)
        return SystemLayout(tuple(subs))

    def describe(self) -> str:
        legs = ", ".join(
            f"{sub.label}:{sub.dim}{'c' if sub.classical else ''}" for sub in self.subsystems
        )
        return f"[{legs}]"


SubsystemSpec = Subsystem | Mapping[str, object] | tuple[str, int] | tuple[str, int, bool]


def _to_subsystem(spec: SubsystemSpec) -> Subsystem:
    if isinstance(spec, Subsystem):
        return spec
    if isinstance(spec, Mapping):
        return Subsystem(
            label=str(spec["label"]),
            dim=int(spec["dim"]),  # type: ignore[call-overload]
            classical=bool(spec.get("classical", False)),
        )
    return Subsystem(*spec)


def make_layout(specs: Iterable[SubsystemSpec]) -> SystemLayout:
    """Build a layout from subsystem specs.

    Args:
        specs: Subsystem records, mappings {label, dim, classical} or tuples

    Returns:
        SystemLayout: Layout with total_dim = product of dims

    Raises:
        ZeroDimension: A dim below 1
        DuplicateLabel: A label repeated
    """
    return SystemLayout(tuple(_to_subsystem(spec) for spec in specs))


def canonical_layout(d_a: int, d_g: int, d_b: int, classical_mediator: bool = True) -> SystemLayout:
    """The three-party layout [A, G, B]."""
    return make_layout(
        [
            Subsystem(LABEL_A, d_a),
            Subsystem(LABEL_G, d_g, classical_mediator),
            Subsystem(LABEL_B, d_b),
        ]
    )


def single_leg(label: str, dim: int, classical: bool = False) -> SystemLayout:
    return make_layout([Subsystem(label, dim, classical)])


# ---------------------------------------------------------------------------
# Operators and states
# ---------------------------------------------------------------------------


def _coerce(data: object, error: type[ValidationError]) -> ComplexMatrix:
    try:
        return as_complex_matrix(data)
    except ValueError as exc:
        raise error(str(exc)) from exc


def _check_square(matrix: ComplexMatrix, layout: SystemLayout) -> None:
    expected = (layout.total_dim, layout.total_dim)
    if matrix.shape != expected:
        raise DimensionMismatch(
            f"Matrix shape {matrix.shape} does not match layout {layout.describe()} {expected}"
        )


@dataclass(frozen=True)
class Operator:
    """Element of the matrix algebra on a layout."""

    layout: SystemLayout
    matrix: ComplexMatrix = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _coerce(self.matrix, DimensionMismatch))
        _check_square(self.matrix, self.layout)



@dataclass(frozen=True)
class DensityState:
    """Positive unit-trace operator on a layout."""

    layout: SystemLayout
    matrix: ComplexMatrix = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _coerce(self.matrix, NotAState))
        _check_square(self.matrix, self.layout)
        herm = hermiticity_deviation(self.matrix)
        if herm > settings.herm_tol:
            raise NotAState(f"State is not Hermitian: deviation {herm:.3e}")
        trace = complex(np.trace(self.matrix))
        if abs(trace - 1.0) > settings.trace_tol:
            raise NotAState(f"State trace is {trace.real:.12f}, expected 1")
        lowest = min_eigenvalue(self.matrix)
        if lowest < -settings.psd_tol:
            raise NotAState(f"State has negative eigenvalue {lowest:.3e}")

    @property
    def dim(self) -> int:
        return self.layout.total_dim


@dataclass(frozen=True)
class ClassicalDistribution:
    """Probability vector over the configurations of a classical leg."""

    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if not probs:
            raise ValidationError("Distribution needs at least one configuration")
        for index, value in enumerate(probs):
            if not math.isfinite(value):
                raise ValidationError(f"Probability at index {index} is not finite: {value!r}")
            if value < 0:
                raise NegativeProbability(index, value)
        total = math.fsum(probs)
        if abs(total - 1.0) > settings.prob_tol:
            raise NotNormalized(total)

    def __len__(self) -> int:
        return len(self.probabilities)


def basis_projector(dim: int, index: int) -> ComplexMatrix:
    """|index><index| in dimension dim."""
    projector = np.zeros((dim, dim), dtype=complex)
    projector[index, index] = 1.0
    return projector


def kron_all(matrices: Sequence[ComplexMatrix]) -> ComplexMatrix:
    return reduce(np.kron, matrices, np.ones((1, 1), dtype=complex))


def lift_local(op: object, target: str, layout: SystemLayout) -> Operator:
    """Embed a local operator with identities on every other leg.

    Args:
        op: Square matrix acting on the target leg
        target: Label of the target leg
        layout: Full layout

    Returns:
        Operator: op tensored with identities, in layout order

    Raises:
        UnknownLabel: Target not in layout
        DimensionMismatch: op dimension differs from the target dim
    """
    local = np.asarray(op, dtype=complex)
    position = layout.index(target)
    dim = layout.dims[position]
    if local.shape != (dim, dim):
        raise DimensionMismatch(
            f"Operator of shape {local.shape} cannot act on '{target}' of dim {dim}"
        )
    factors = [np.eye(d, dtype=complex) for d in layout.dims]
    factors[position] = local
    return Operator(layout, kron_all(factors))


def expectation(state: DensityState, operator: Operator) -> complex:
    """Trace pairing omega(X) = Tr[rho X]."""
    if operator.layout.dims != state.layout.dims:
        raise DimensionMismatch("Operator and state live on different layouts")
    return complex(np.trace(state.matrix @ operator.matrix))


# ---------------------------------------------------------------------------
# Partial trace, pinching and leg permutations
# ---------------------------------------------------------------------------


def partial_trace_matrix(
    matrix: ComplexMatrix, dims: Sequence[int], keep: Sequence[int]
) -> ComplexMatrix:
    """Trace out every leg not listed in `keep` (leg positions)."""
    n = len(dims)
    kept = sorted(set(keep))
    tensor = np.asarray(matrix).reshape(tuple(dims) + tuple(dims))
    remaining = n
    for position in sorted(set(range(n)) - set(kept), reverse=True):
        tensor = np.trace(tensor, axis1=position, axis2=position + remaining)
        remaining -= 1
    kept_dim = math.prod(dims[i] for i in kept)
    return tensor.reshape(kept_dim, kept_dim)


def partial_trace(state: DensityState, keep: Iterable[str]) -> DensityState:
    """Reduced state on the kept legs (original order preserved).

    Raises:
        EmptyKeepSet: Nothing to keep
        UnknownLabel: A kept label is not in the layout
    """
    keep_labels = set(keep)
    if not keep_labels:
        raise EmptyKeepSet()
    positions = [state.layout.index(label) for label in keep_labels]
    reduced = partial_trace_matrix(state.matrix, state.layout.dims, positions)
    return DensityState(state.layout.sub_layout(keep_labels), reduced)


def pinch_matrix(matrix: ComplexMatrix, dims: Sequence[int], position: int) -> ComplexMatrix:
    """Zero every block off the diagonal of one leg."""
    n = len(dims)
    shape = [1] * (2 * n)
    shape[position] = dims[position]
    shape[n + position] = dims[position]
    mask = np.eye(dims[position]).reshape(shape)
    tensor = np.asarray(matrix).reshape(tuple(dims) + tuple(dims)) * mask
    total = math.prod(dims)
    return tensor.reshape(total, total)


def pinch(state: DensityState, target: str) -> DensityState:
    """Dephase the target leg in its canonical basis.

    The result lies in the diagonal (classical) subalgebra on that leg.
    """
    position = state.layout.index(target)
    return DensityState(state.layout, pinch_matrix(state.matrix, state.layout.dims, position))


def is_pinched(state: DensityState, target: str, atol: float | None = None) -> bool:
    tolerance = settings.equality_tol if atol is None else atol
    return max_entry_distance(pinch(state, target).matrix, state.matrix) <= tolerance


def leg_permutation(layout: SystemLayout, order: Sequence[str]) -> tuple[list[int], SystemLayout]:
    """Positions of `order` in `layout`, and the permuted layout."""
    if sorted(order) != sorted(layout.labels):
        raise DimensionMismatch(
            f"Leg order {list(order)} is not a permutation of {list(layout.labels)}"
        )
    positions = [layout.index(label) for label in order]
    return positions, SystemLayout(tuple(layout.subsystems[p] for p in positions))


def permute_matrix(matrix: ComplexMatrix, dims: Sequence[int], positions: Sequence[int]) -> ComplexMatrix:
    """Permute the legs of a square operator; new leg i is old leg positions[i]."""
    n = len(dims)
    tensor = np.asarray(matrix).reshape(tuple(dims) + tuple(dims))
    axes = list(positions) + [n + p for p in positions]
    total = math.prod(dims)
    return tensor.transpose(axes).reshape(total, total)


def reorder_legs(
    matrix: ComplexMatrix, layout: SystemLayout, order: Sequence[str]
) -> tuple[ComplexMatrix, SystemLayout]:
    """Explicit permutation of tensor legs into `order`."""
    positions, new_layout = leg_permutation(layout, order)
    return permute_matrix(matrix, layout.dims, positions), new_layout


# ---------------------------------------------------------------------------
# State constructors
# ---------------------------------------------------------------------------


def product_state(factors: Sequence[DensityState], layout: SystemLayout) -> DensityState:
    """Tensor product of one state per leg, in layout order.

    Raises:
        DimensionMismatch: Factor count or a factor dimension disagrees with the layout
    """
    if len(factors) != len(layout.subsystems):
        raise DimensionMismatch(
            f"Expected {len(layout.subsystems)} factors for {layout.describe()}, got {len(factors)}"
        )
    for factor, sub in zip(factors, layout.subsystems, strict=True):
        if factor.dim != sub.dim:
            raise DimensionMismatch(
                f"Factor of dim {factor.dim} cannot sit on leg '{sub.label}' of dim {sub.dim}"
            )
    return DensityState(layout, kron_all([factor.matrix for factor in factors]))


def classical_state(
    dist: ClassicalDistribution | Sequence[float],
    label: str = LABEL_G,
) -> DensityState:
    """Diagonal state carrying a probability distribution."""
    if not isinstance(dist, ClassicalDistribution):
        dist = ClassicalDistribution(tuple(dist))
    layout = single_leg(label, len(dist), classical=True)
    return DensityState(layout, np.diag(np.array(dist.probabilities, dtype=complex)))


def point_mass(dim: int, index: int, label: str = LABEL_G) -> DensityState:
    """Classical state concentrated on one configuration."""
    probs = [0.0] * dim
    probs[index] = 1.0
    return classical_state(probs, label)


def pure_state(vector: object, layout: SystemLayout) -> DensityState:
    """|psi><psi| for a normalized vector."""
    ket = np.asarray(vector, dtype=complex).reshape(-1)
    norm = np.linalg.norm(ket)
    if norm == 0:
        raise NotAState("Zero vector has no state")
    ket = ket / norm
    return DensityState(layout, np.outer(ket, ket.conj()))


def maximally_mixed(layout: SystemLayout) -> DensityState:
    dim = layout.total_dim
    return DensityState(layout, np.eye(dim, dtype=complex) / dim)


def random_state(seed: SeedLike, layout: SystemLayout, rank: int | None = None) -> DensityState:
    """Ginibre-sampled density matrix, deterministic in seed."""
    rng = get_generator(seed)
    dim = layout.total_dim
    columns = dim if rank is None else rank
    ginibre = rng.normal(size=(dim, columns)) + 1j * rng.normal(size=(dim, columns))
    rho = ginibre @ ginibre.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityState(layout, rho / np.trace(rho).real)


def random_distribution(seed: SeedLike, dim: int) -> ClassicalDistribution:
    """Flat-Dirichlet probability vector."""
    rng = get_generator(seed)
    probs = rng.dirichlet(np.ones(dim))
    probs = probs / math.fsum(probs)
    return ClassicalDistribution(tuple(float(p) for p in probs))
