"""Multi-variable assembly on the truncated polydisc Hardy space.

Index conventions
-----------------
A scenario with per-slot truncation degrees ``N_1, ..., N_n`` lives on the
monomial basis ``z^alpha`` with ``alpha_i <= N_i``.  Basis index of a
multi-index is its C-order raveling with slot 0 slowest:

    index(alpha) = ravel_multi_index(alpha, dims, order="C"),  dims = (N_i + 1).

Every Kronecker assembly in this package lists slot 0 first, matching that
order.  Slot and pair indices are 0-based everywhere (library, scenario
files and reports).

A scenario attaches one factor per slot: ``Inner`` (a finite Blaschke
product, contributing a finite-dimensional model space to the quotient) or
``FullHardy`` (the zero symbol; the quotient keeps the whole truncated
slot).  The submodule projection is

    P_S = I - (Q_1 tensor ... tensor Q_n),

with ``Q_i`` the slot model-space projector for Inner slots and the identity
for FullHardy slots.  Because each ``Q_i`` comes from re-orthonormalized
columns, ``P_S`` is Hermitian idempotent to float rounding at any
truncation, and all structural identities below hold to rounding as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .defaults import (
    AMBIENT_DIM_BUDGET,
    COMMUTING_TOL,
    FULL_SLOT_DEGREE,
    GRAM_TOL,
    MATRIX_CAP,
    TAIL_WINDOW,
    disc_truncation,
    minimum_truncation,
)
from .disc import (
    BlaschkeProduct,
    ModelSpace1D,
    model_space,
    multiplication_operator,
    truncated_shift,
)
from .errors import ContractError, ScenarioError, SizingError

__all__ = [
    "DiscFactor",
    "FullHardy",
    "Inner",
    "PolydiscScenario",
    "QuotientHandle",
    "SubmoduleHandle",
    "commuting_projection_sum",
    "coordinate_shift",
    "default_degrees",
    "doubly_commuting_check",
    "make_scenario",
    "quotient_assembly",
    "slot_apply",
    "submodule_projection",
]


@dataclass(frozen=True)
class Inner:
    """Tensor slot carrying a finite Blaschke product."""

    product: BlaschkeProduct


@dataclass(frozen=True)
class FullHardy:
    """Tensor slot with the zero symbol: the factor is the whole truncated space."""


DiscFactor = Inner | FullHardy


@dataclass(frozen=True)
class PolydiscScenario:
    """n tensor slots with factors and per-slot truncation degrees."""

    factors: tuple[DiscFactor, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ScenarioError("a polydisc scenario needs at least two variables")
        if len(self.degrees) != len(self.factors):
            raise ScenarioError(
                f"{len(self.degrees)} degrees given for {len(self.factors)} slots"
            )
        for i, (f, n) in enumerate(zip(self.factors, self.degrees)):
            if n < 1:
                raise ScenarioError(f"slot {i}: truncation degree must be >= 1, got {n}")
            if isinstance(f, Inner) and n < minimum_truncation(f.product.degree):
                raise ScenarioError(
                    f"slot {i}: truncation {n} below the floor "
                    f"{minimum_truncation(f.product.degree)} for Blaschke degree "
                    f"{f.product.degree}"
                )

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.degrees)

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)

    @property
    def inner_slots(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Inner))

    @property
    def degenerate(self) -> bool:
        """True when no slot is Inner, so the submodule collapses to {0}."""
        return not self.inner_slots


def default_degrees(
    factors: tuple[DiscFactor, ...] | list[DiscFactor],
    *,
    budget: int = AMBIENT_DIM_BUDGET,
    cap: int = MATRIX_CAP,
) -> tuple[int, ...]:
    """Per-slot truncations: one-variable defaults, shrunk to fit the budget.

    FullHardy slots get FULL_SLOT_DEGREE; Inner slots start from the
    one-variable default and are reduced evenly (never below the model-space
    floor) until the ambient dimension fits ``budget``.
    """
    budget = min(budget, cap)
    degrees = [
        disc_truncation(f.product.degree) if isinstance(f, Inner) else FULL_SLOT_DEGREE
        for f in factors
    ]
    floors = [
        minimum_truncation(f.product.degree) if isinstance(f, Inner) else 2
        for f in factors
    ]
    while math.prod(d + 1 for d in degrees) > budget:
        candidates = [i for i in range(len(degrees)) if degrees[i] > floors[i]]
        if not candidates:
            raise SizingError(
                f"ambient dimension {math.prod(d + 1 for d in degrees)} cannot be "
                f"reduced below the budget {budget} for these factors"
            )
        worst = max(candidates, key=lambda i: degrees[i])
        degrees[worst] -= 1
    return tuple(degrees)


def make_scenario(
    factors,
    degrees=None,
    *,
    budget: int = AMBIENT_DIM_BUDGET,
    cap: int = MATRIX_CAP,
) -> PolydiscScenario:
    """Build a scenario, resolving default degrees and enforcing the cap."""
    factors = tuple(factors)
    if degrees is None:
        degrees = default_degrees(factors, budget=budget, cap=cap)
    scenario = PolydiscScenario(factors=factors, degrees=tuple(int(d) for d in degrees))
    if scenario.dimension > cap:
        raise SizingError(
            f"ambient tensor dimension {scenario.dimension} exceeds the cap {cap}"
        )
    return scenario


@dataclass(frozen=True)
class SlotSpace:
    """One realized tensor slot: basis of the quotient factor plus the shift."""

    dimension: int
    quotient_basis: np.ndarray  # (dim, q): model basis for Inner, identity for FullHardy
    shift: np.ndarray  # truncated one-variable shift on the slot
    model: ModelSpace1D | None  # None for FullHardy and for degree-0 Inner factors

    @property
    def quotient_dimension(self) -> int:
        return self.quotient_basis.shape[1]

    def quotient_projector(self) -> np.ndarray:
        if self.quotient_basis.shape[1] == self.dimension:
            return np.eye(self.dimension, dtype=complex)
        return self.quotient_basis @ self.quotient_basis.conj().T


def slot_spaces(scenario: PolydiscScenario, *, gram_tol: float = GRAM_TOL) -> list[SlotSpace]:
    """Realize every slot of a scenario at its truncation degree."""
    return realize_slots(scenario.factors, scenario.degrees, gram_tol=gram_tol)


def realize_slots(
    factors, degrees, *, gram_tol: float = GRAM_TOL
) -> list[SlotSpace]:
    """Realize an arbitrary list of (factor, degree) slots."""
    out: list[SlotSpace] = []
    for f, n in zip(factors, degrees):
        d = n + 1
        shift = truncated_shift(n)
        if isinstance(f, FullHardy):
            out.append(
                SlotSpace(dimension=d, quotient_basis=np.eye(d, dtype=complex), shift=shift, model=None)
            )
        elif f.product.degree == 0:
            # constant inner factor: its shifted multiples fill the slot, the
            # quotient factor is {0}
            out.append(
                SlotSpace(
                    dimension=d,
                    quotient_basis=np.zeros((d, 0), dtype=complex),
                    shift=shift,
                    model=None,
                )
            )
        else:
            ms = model_space(f.product, n, gram_tol=gram_tol)
            out.append(SlotSpace(dimension=d, quotient_basis=ms.basis, shift=shift, model=ms))
    return out


@dataclass(frozen=True)
class SubmoduleHandle:
    """Realized submodule: its ambient projection plus per-slot data."""

    scenario: PolydiscScenario
    projection: np.ndarray  # P_S on the ambient truncated basis
    inner_slots: tuple[int, ...]
    slots: list[SlotSpace] = field(repr=False)
    degenerate: bool
    gram_tol: float

    @property
    def dimension(self) -> int:
        return self.projection.shape[0]

    @property
    def quotient_dimension(self) -> int:
        return math.prod(s.quotient_dimension for s in self.slots)


@dataclass(frozen=True)
class QuotientHandle:
    """Realized quotient: per-slot factor bases and compressed shifts."""

    scenario: PolydiscScenario
    slots: list[SlotSpace] = field(repr=False)
    factor_bases: list[np.ndarray] = field(repr=False)
    compressed_shift_factors: list[list[np.ndarray]] = field(repr=False)

    @property
    def dimension(self) -> int:
        return math.prod(b.shape[1] for b in self.factor_bases)

    @property
    def factor_dimensions(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.factor_bases)

    def compressed_shift(self, slot: int) -> np.ndarray:
        """Assembled compressed shift for one variable, on the quotient basis."""
        return kernel.kron_all(self.compressed_shift_factors[slot], cap=MATRIX_CAP)


def slot_apply(op: np.ndarray, x: np.ndarray, slot: int, dims: tuple[int, ...]) -> np.ndarray:
    """Apply ``I x ... x op x ... x I`` (op at ``slot``) to the columns of x.

    Equivalent to ``kron_all(identities with op at slot) @ x`` but costs
    O(rows(x) * cols(x) * dims[slot]) instead of a full dense product.
    """
    rows = math.prod(dims)
    if x.shape[0] != rows:
        raise ContractError(f"operand has {x.shape[0]} rows, expected {rows}")
    if op.shape[1] != dims[slot]:
        raise ContractError(
            f"operator acts on dimension {op.shape[1]}, slot {slot} has {dims[slot]}"
        )
    tail = x.shape[1:]
    xr = x.reshape(dims + tail)
    y = np.tensordot(op, xr, axes=([1], [slot]))
    y = np.moveaxis(y, 0, slot)
    return np.ascontiguousarray(y).reshape((op.shape[0] * rows // dims[slot],) + tail)


def apply_quotient_projector(handle_slots: list[SlotSpace], x: np.ndarray) -> np.ndarray:
    """Apply the tensor-product quotient projector slot by slot."""
    dims = tuple(s.dimension for s in handle_slots)
    y = x
    for i, s in enumerate(handle_slots):
        if s.quotient_dimension == s.dimension:
            continue
        b = s.quotient_basis
        y = slot_apply(b @ b.conj().T, y, i, dims)
    return y


def apply_submodule_projector(handle_slots: list[SlotSpace], x: np.ndarray) -> np.ndarray:
    return x - apply_quotient_projector(handle_slots, x)


def coordinate_shift(scenario: PolydiscScenario, slot: int, *, cap: int = MATRIX_CAP) -> np.ndarray:
    """Ambient matrix of multiplication by the slot coordinate (top degree to 0)."""
    if not 0 <= slot < scenario.n:
        raise ContractError(f"slot {slot} out of range for n={scenario.n}")
    mats = [np.eye(d, dtype=complex) for d in scenario.dims]
    mats[slot] = truncated_shift(scenario.degrees[slot])
    return kernel.kron_all(mats, cap=cap)


def commuting_projection_sum(
    projections: list[np.ndarray], *, tol: float = COMMUTING_TOL
) -> np.ndarray:
    """Projector onto the sum of ranges of commuting orthogonal projections.

    Evaluates the two telescoping sums

        P_1(I-P_2)...(I-P_n) + P_2(I-P_3)...(I-P_n) + ... + P_n
        P_n(I-P_{n-1})...(I-P_1) + ... + P_2(I-P_1) + P_1

    and the product form ``I - prod(I - P_i)``, asserts pairwise agreement
    within ``tol``, and returns the product form.
    """
    mats = [kernel.as_complex_matrix(p) for p in projections]
    if not mats:
        raise ContractError("commuting_projection_sum needs at least one projection")
    dim = mats[0].shape[0]
    eye = np.eye(dim, dtype=complex)
    for p in mats:
        kernel.check_projector(p, idem_tol=tol, herm_tol=1e-10)
    worst = 0.0
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            worst = max(worst, float(np.linalg.norm(mats[a] @ mats[b] - mats[b] @ mats[a], 2)))
    if worst > tol:
        raise ContractError(f"projections do not commute: max commutator norm {worst:.3e}")

    comp = [eye - p for p in mats]

    def telescope(order: list[int]) -> np.ndarray:
        total = np.zeros_like(eye)
        for pos, k in enumerate(order):
            term = mats[k]
            for l in order[pos + 1 :]:
                term = term @ comp[l]
            total = total + term
        return total

    forward = telescope(list(range(len(mats))))
    backward = telescope(list(range(len(mats) - 1, -1, -1)))
    prod = eye.copy()
    for c in comp:
        prod = prod @ c
    product_form = eye - prod

    d1 = float(np.linalg.norm(forward - backward, 2))
    d2 = float(np.linalg.norm(forward - product_form, 2))
    d3 = float(np.linalg.norm(backward - product_form, 2))
    if max(d1, d2, d3) > tol:
        raise ContractError(
            f"projection-sum formulas disagree: telescoping {d1:.3e}/{d3:.3e}, "
            f"product {d2:.3e} (tol {tol:g})"
        )
    return product_form


def projection_formula_residuals(projections: list[np.ndarray]) -> dict[str, float]:
    """Pairwise disagreements of the three projection-sum formulas."""
    mats = [kernel.as_complex_matrix(p) for p in projections]
    dim = mats[0].shape[0]
    eye = np.eye(dim, dtype=complex)
    comp = [eye - p for p in mats]

    def telescope(order):
        total = np.zeros_like(eye)
        for pos, k in enumerate(order):
            term = mats[k]
            for l in order[pos + 1 :]:
                term = term @ comp[l]
            total = total + term
        return total

    forward = telescope(list(range(len(mats))))
    backward = telescope(list(range(len(mats) - 1, -1, -1)))
    prod = eye.copy()
    for c in comp:
        prod = prod @ c
    product_form = eye - prod
    return {
        "forward_vs_backward": float(np.linalg.norm(forward - backward, 2)),
        "forward_vs_product": float(np.linalg.norm(forward - product_form, 2)),
        "backward_vs_product": float(np.linalg.norm(backward - product_form, 2)),
    }


def inner_range_projections(
    scenario: PolydiscScenario,
    slots: list[SlotSpace] | None = None,
    *,
    gram_tol: float = GRAM_TOL,
    cap: int = MATRIX_CAP,
) -> list[np.ndarray]:
    """Ambient projectors onto the shifted-multiple ranges, one per Inner slot."""
    if slots is None:
        slots = slot_spaces(scenario, gram_tol=gram_tol)
    family = []
    for i in scenario.inner_slots:
        mats = [np.eye(d, dtype=complex) for d in scenario.dims]
        s = slots[i]
        mats[i] = np.eye(s.dimension, dtype=complex) - s.quotient_projector()
        family.append(kernel.kron_all(mats, cap=cap))
    return family


def submodule_projection(
    scenario: PolydiscScenario,
    *,
    gram_tol: float = GRAM_TOL,
    cap: int = MATRIX_CAP,
) -> SubmoduleHandle:
    """Ambient projection onto the sum of shifted-multiple ranges.

    Computed as ``I - kron(slot quotient projectors)``, the product form of
    the commuting-projection sum (the slotwise factorization is exact for
    tensor slots).  Degenerate scenarios yield the zero projection.
    """
    if scenario.dimension > cap:
        raise SizingError(
            f"ambient tensor dimension {scenario.dimension} exceeds the cap {cap}"
        )
    slots = slot_spaces(scenario, gram_tol=gram_tol)
    dim = scenario.dimension
    if scenario.degenerate:
        projection = np.zeros((dim, dim), dtype=complex)
    else:
        pq = kernel.kron_all([s.quotient_projector() for s in slots], cap=cap)
        projection = np.eye(dim, dtype=complex) - pq
    return SubmoduleHandle(
        scenario=scenario,
        projection=projection,
        inner_slots=scenario.inner_slots,
        slots=slots,
        degenerate=scenario.degenerate,
        gram_tol=gram_tol,
    )


def quotient_assembly(
    scenario: PolydiscScenario,
    *,
    gram_tol: float = GRAM_TOL,
) -> QuotientHandle:
    """Quotient factor bases and per-variable compressed shifts."""
    slots = slot_spaces(scenario, gram_tol=gram_tol)
    bases = [s.quotient_basis for s in slots]
    factors: list[list[np.ndarray]] = []
    for i, s in enumerate(slots):
        row: list[np.ndarray] = []
        for k, t in enumerate(slots):
            if k == i:
                if t.model is not None:
                    row.append(t.model.compressed_shift)
                elif t.quotient_dimension == t.dimension:
                    row.append(t.shift)
                else:
                    row.append(np.zeros((0, 0), dtype=complex))
            else:
                row.append(np.eye(t.quotient_dimension, dtype=complex))
        factors.append(row)
    return QuotientHandle(
        scenario=scenario,
        slots=slots,
        factor_bases=bases,
        compressed_shift_factors=factors,
    )


def quotient_basis(handle: SubmoduleHandle | QuotientHandle, *, cap: int = MATRIX_CAP) -> np.ndarray:
    """Ambient orthonormal basis of the quotient (columns), slot 0 slowest."""
    slots = handle.slots
    return kernel.kron_all([s.quotient_basis for s in slots], cap=cap)


def doubly_commuting_check(q: QuotientHandle) -> float:
    """max over i<j of the cross-commutator norm of the compressed shifts."""
    worst = 0.0
    n = q.scenario.n
    if q.dimension == 0:
        return worst
    for i in range(n):
        ci = q.compressed_shift(i)
        for j in range(i + 1, n):
            cj = q.compressed_shift(j)
            worst = max(
                worst,
                kernel.operator_norm(ci @ cj.conj().T - cj.conj().T @ ci),
            )
    return worst


def interior_mask(scenario: PolydiscScenario, slot: int, *, width: int = 1) -> np.ndarray:
    """Boolean ambient mask selecting multi-indices with alpha_slot <= N_slot - width."""
    keep = np.zeros(scenario.dims[slot], dtype=bool)
    keep[: max(0, scenario.dims[slot] - width)] = True
    full = np.ones(1, dtype=bool)
    for k, d in enumerate(scenario.dims):
        full = np.kron(full, keep if k == slot else np.ones(d, dtype=bool))
    return full.astype(bool)


def shift_invariance_residual(handle: SubmoduleHandle, slot: int) -> float:
    """Norm of (I - P_S) M_slot P_S restricted to interior multi-indices.

    Uses the low-rank identity (I - P_S) = B_Q B_Q* so the spectral norm is
    an SVD of a (quotient dim x ambient dim) matrix.
    """
    scenario = handle.scenario
    bq = quotient_basis(handle)
    if bq.shape[1] == 0:
        return 0.0
    dims = tuple(s.dimension for s in handle.slots)
    x = handle.projection.copy()
    x[:, ~interior_mask(scenario, slot)] = 0.0
    shifted = slot_apply(handle.slots[slot].shift, x, slot, dims)
    small = bq.conj().T @ shifted
    return kernel.operator_norm(small)


def submodule_span_gap(
    handle: SubmoduleHandle,
    *,
    window: int = TAIL_WINDOW,
) -> float:
    """Directional gap from the stacked shifted-multiple columns into ran P_S.

    Columns are truncations of ``z^alpha * theta_i`` with the slot-i index
    kept ``window`` slots below the top; their span should sit inside the
    submodule up to tail products.
    """
    scenario = handle.scenario
    if handle.degenerate:
        return 0.0
    dims = scenario.dims
    cols: list[np.ndarray] = []
    for i in scenario.inner_slots:
        f = scenario.factors[i]
        assert isinstance(f, Inner)
        deg = f.product.degree
        j_max = scenario.degrees[i] - deg - window
        if j_max < 0:
            j_max = 0  # keep at least the theta column itself
        mult_cols = multiplication_operator(f.product, scenario.degrees[i])[:, : j_max + 1]
        mats = [np.eye(d, dtype=complex) for d in dims]
        mats[i] = mult_cols
        block = mats[0]
        for m in mats[1:]:
            block = np.kron(block, m)  # rectangular column stack, no cap needed
        cols.append(block)
    stacked = np.hstack(cols)
    basis = kernel.orthonormal_basis_of_span(stacked, rel_tol=1e-10)
    bq = quotient_basis(handle)
    if bq.shape[1] == 0:
        return 0.0
    return kernel.operator_norm(bq.conj().T @ basis)


def complementarity_residual(handle: SubmoduleHandle) -> float:
    """Norm of P_S + P_Q - I with P_Q assembled independently from slot bases."""
    pq = kernel.kron_all([s.quotient_projector() for s in handle.slots], cap=MATRIX_CAP)
    dim = handle.dimension
    return float(
        np.linalg.norm(handle.projection + pq - np.eye(dim, dtype=complex), 2)
    )
