"""Analysis orchestration and deterministic report emission.

A run executes the requested analyses in order and assembles one
ReportBundle.  The JSON serialization is byte-deterministic for identical
inputs: blocks are built in a fixed order, floats use their shortest
round-trip representation, and wall-clock timings go to a separate sidecar.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import blh as blh_mod
from . import commutator as comm_mod
from . import rigidity as rig_mod
from .defaults import (
    AMBIENT_DIM_BUDGET,
    C0_RESIDUAL_TOL,
    DEFAULT_BOUNDARY_GRID,
    DEFAULT_DECAY_SCHEDULE,
    INNER_DEVIATION_TOL,
    RANGE_GAP_TOL,
    RANK_REL_TOL,
    disc_truncation,
)
from .errors import AnalysisFailure, ScenarioError
from .lattice import (
    PolydiscScenario,
    complementarity_residual,
    doubly_commuting_check,
    inner_range_projections,
    projection_formula_residuals,
    quotient_assembly,
    shift_invariance_residual,
    submodule_projection,
    submodule_span_gap,
)
from .scenario import ScenarioSpec, build_scenario, scenario_echo

TOOL_NAME = "polyhardy"
PF_GENERIC_DIM = 512
SPAN_GAP_DIM = 1024

__all__ = [
    "AnalysisBlock",
    "ReportBundle",
    "RunOptions",
    "decay_csv",
    "execute",
    "report_json",
    "summary_text",
]


@dataclass(frozen=True)
class RunOptions:
    grid: int = DEFAULT_BOUNDARY_GRID
    rank_tol: float = RANK_REL_TOL
    schedule: tuple[int, ...] = DEFAULT_DECAY_SCHEDULE
    budget: int = AMBIENT_DIM_BUDGET


@dataclass
class AnalysisBlock:
    analysis: str
    status: str  # "ok" | "failed"
    tolerances: dict
    results: dict
    failures: list[str] = field(default_factory=list)


@dataclass
class ReportBundle:
    version: str
    scenario: dict
    second_scenario: dict | None
    defaults: dict
    blocks: list[AnalysisBlock]
    decay_profiles: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)  # sidecar only, never in the report

    @property
    def failed_blocks(self) -> list[str]:
        return [b.analysis for b in self.blocks if b.status == "failed"]


def _version() -> str:
    from . import __version__

    return __version__


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def _validate_requests(spec: ScenarioSpec, scenario: PolydiscScenario) -> None:
    if scenario.degenerate and ("blh" in spec.analyses or "c0" in spec.analyses):
        raise ScenarioError(
            "blh and c0 analyses need at least one Inner slot; the scenario is degenerate"
        )
    if "decay" in spec.analyses:
        if spec.pair is None and len(scenario.inner_slots) < 2:
            raise ScenarioError("decay analysis needs two Inner slots for the pair")


def _run_project(scenario: PolydiscScenario, options: RunOptions):
    handle = submodule_projection(scenario)
    tolerances = {
        "complementarity": 1e-9,
        "projection_formulas": 1e-10,
        "shift_invariance": 1e-8,
        "span_gap": 1e-7,
    }
    results: dict = {
        "ambient_dimension": handle.dimension,
        "quotient_dimension": handle.quotient_dimension,
        "degenerate": handle.degenerate,
        "inner_slots": list(handle.inner_slots),
        "degrees": list(scenario.degrees),
    }
    failures: list[str] = []

    comp = complementarity_residual(handle)
    results["complementarity_residual"] = comp
    if comp > tolerances["complementarity"]:
        failures.append(f"complementarity residual {comp:.3e} > 1e-9")

    if handle.degenerate:
        results["projection_formulas"] = {"method": "skipped", "reason": "degenerate scenario"}
    elif handle.dimension <= PF_GENERIC_DIM:
        residuals = projection_formula_residuals(
            inner_range_projections(scenario, handle.slots)
        )
        results["projection_formulas"] = {"method": "generic", **residuals}
        worst = max(residuals.values())
        if worst > tolerances["projection_formulas"]:
            failures.append(f"projection-sum formulas disagree by {worst:.3e} > 1e-10")
    else:
        results["projection_formulas"] = {
            "method": "skipped",
            "reason": f"ambient dimension {handle.dimension} above the "
            f"generic-product bound {PF_GENERIC_DIM}",
        }

    residuals = [shift_invariance_residual(handle, k) for k in range(scenario.n)]
    results["shift_invariance_residuals"] = residuals
    worst = max(residuals) if residuals else 0.0
    if worst > tolerances["shift_invariance"]:
        failures.append(f"interior shift-invariance residual {worst:.3e} > 1e-8")

    if handle.dimension <= SPAN_GAP_DIM:
        gap = submodule_span_gap(handle)
        results["span_gap"] = gap
        if gap > tolerances["span_gap"]:
            failures.append(f"shifted-multiples span gap {gap:.3e} > 1e-7")
    else:
        results["span_gap"] = None
    return results, tolerances, failures


def _run_commutator(scenario: PolydiscScenario, options: RunOptions, pair):
    pairs = [pair] if pair else [
        (i, j) for i in range(scenario.n) for j in range(i + 1, scenario.n)
    ]
    results: dict = {"pairs": []}
    failures: list[str] = []
    for i, j in pairs:
        report = comm_mod.commutator_report(
            scenario, i, j, rank_tol=options.rank_tol, raise_on_failure=False
        )
        results["pairs"].append(
            {
                "pair": [i, j],
                "operator_norm": report.operator_norm,
                "hs_norm": report.hs_norm,
                "numerical_rank": report.numerical_rank,
                "leading_singular_values": list(report.leading_singular_values),
                "structural_vs_oracle_error": report.structural_vs_oracle_error,
                "predicted_norm": report.predicted_norm,
                "closed_form_hs": report.closed_form_hs,
                "identity_factor_dimension": report.identity_factor_dimension,
                "agreement_degrees": list(report.agreement_degrees or ()),
                "precision_degrees": list(report.precision_degrees),
            }
        )
        failures.extend(f"pair ({i},{j}): {msg}" for msg in report.failures)
    tolerances = {
        "structural_agreement": 1e-7,
        "norm_law": 1e-6,
        "rank_tol": options.rank_tol,
    }
    return results, tolerances, failures


def _run_essnorm(scenario: PolydiscScenario, options: RunOptions):
    q = quotient_assembly(scenario)
    report = comm_mod.essential_normality_check(q)
    defect = float(doubly_commuting_check(q))
    results = {
        "verdict": report.verdict,
        "quotient_dimension": report.quotient_dimension,
        "max_cross_commutator_defect": defect,
        "slots": [
            {
                "slot": e.slot,
                "kind": e.kind,
                "self_commutator_norm": e.norm,
                "rank": e.rank,
                "interior_rank": e.interior_rank,
                "factor_dimension": e.factor_dimension,
            }
            for e in report.slots
        ],
    }
    tolerances = {"doubly_commuting": 1e-10}
    failures = []
    if defect > 1e-10:
        failures.append(f"compressed shifts fail to doubly commute: defect {defect:.3e}")
    return results, tolerances, failures


def _run_blh(scenario: PolydiscScenario, options: RunOptions):
    sym = blh_mod.build_blh_symbol(scenario)
    handle = submodule_projection(sym.scenario)
    residuals = blh_mod.pencil_residuals(sym)
    deviation = blh_mod.verify_inner(sym, options.grid)
    gap = blh_mod.verify_range(sym, handle)
    wandering = blh_mod.wandering_subspace(handle, 0)
    results = {
        "permutation": list(sym.permutation),
        "coefficient_dimension": sym.coefficient_dimension,
        "pencil_residuals": residuals,
        "inner_deviation": deviation,
        "boundary_grid": options.grid,
        "range_gap": gap,
        "wandering_dimension": wandering.shape[1],
    }
    tolerances = {
        "pencil": 1e-10,
        "inner_deviation": INNER_DEVIATION_TOL,
        "range_gap": RANGE_GAP_TOL,
    }
    failures = []
    worst_pencil = max(residuals.values())
    if worst_pencil > tolerances["pencil"]:
        failures.append(f"pencil residual {worst_pencil:.3e} > 1e-10")
    if deviation > tolerances["inner_deviation"]:
        failures.append(f"boundary inner deviation {deviation:.3e} > 1e-8")
    if gap > tolerances["range_gap"]:
        failures.append(f"range gap {gap:.3e} > 1e-6")
    return results, tolerances, failures


def _run_c0(scenario: PolydiscScenario, options: RunOptions):
    # slot-level claim, so evaluate on high-precision model spaces rather
    # than the ambient truncation
    entries = []
    failures = []
    for slot in scenario.inner_slots:
        product = scenario.factors[slot].product
        residual = comm_mod.c0_annihilation_precise(product)
        entries.append(
            {
                "slot": slot,
                "residual": residual,
                "truncation": None if product.degree == 0 else disc_truncation(product.degree),
            }
        )
        if residual > C0_RESIDUAL_TOL:
            failures.append(f"slot {slot}: annihilation residual {residual:.3e} > 1e-8")
    results = {"slots": entries}
    tolerances = {"residual": C0_RESIDUAL_TOL}
    return results, tolerances, failures


def _run_rigidity(scenario: PolydiscScenario, second: PolydiscScenario | None, options: RunOptions):
    if second is None:
        raise ScenarioError("rigidity requires two scenarios")
    h1 = submodule_projection(scenario)
    h2 = submodule_projection(second)
    equality = rig_mod.equality_test(h1, h2)
    verdict = rig_mod.equivalence_verdict(h1, h2, rank_tol=options.rank_tol)
    results = {
        "projection_distance": equality.distance,
        "equal": equality.equal,
        "verdict": verdict.verdict,
        "note": verdict.note,
        "certificate": verdict.certificate,
        "thresholds": verdict.thresholds,
    }
    tolerances = {"equal_projection": equality.tolerance}
    return results, tolerances, []


def _run_decay(scenario: PolydiscScenario, options: RunOptions, pair):
    if pair is None:
        inner = scenario.inner_slots
        pair = (inner[0], inner[1])
    profile = comm_mod.essential_dc_diagnostic(
        scenario, pair, options.schedule, rank_tol=options.rank_tol
    )
    results = {
        "pair": list(profile.pair),
        "schedule": list(profile.schedule),
        "verdict": profile.verdict,
        "predicted_norm": profile.predicted_norm,
        "ranks": list(profile.ranks),
        "plateau_fraction": profile.plateau_fraction,
        "leading_singular_values": [list(s[:6]) for s in profile.singular_values],
    }
    tolerances = {"rank_tol": profile.rank_tol, "plateau_fraction": profile.plateau_fraction}
    return results, tolerances, [], profile


def execute(spec: ScenarioSpec, options: RunOptions | None = None) -> ReportBundle:
    """Run all requested analyses in order and assemble the bundle."""
    options = options or RunOptions()
    scenario = build_scenario(spec, budget=options.budget)
    _validate_requests(spec, scenario)

    second_scenario = None
    second_echo = None
    if spec.second is not None:
        second_scenario = build_scenario(spec.second, degrees=scenario.degrees, budget=options.budget)
        second_echo = scenario_echo(spec.second, second_scenario)

    bundle = ReportBundle(
        version=_version(),
        scenario=scenario_echo(spec, scenario),
        second_scenario=second_echo,
        defaults={
            "grid": options.grid,
            "rank_tol": options.rank_tol,
            "schedule": list(options.schedule),
            "dimension_budget": options.budget,
        },
        blocks=[],
    )

    for analysis in spec.analyses:
        started = time.perf_counter()
        try:
            if analysis == "project":
                results, tolerances, failures = _run_project(scenario, options)
            elif analysis == "commutator":
                results, tolerances, failures = _run_commutator(scenario, options, spec.pair)
            elif analysis == "essnorm":
                results, tolerances, failures = _run_essnorm(scenario, options)
            elif analysis == "blh":
                results, tolerances, failures = _run_blh(scenario, options)
            elif analysis == "c0":
                results, tolerances, failures = _run_c0(scenario, options)
            elif analysis == "rigidity":
                results, tolerances, failures = _run_rigidity(scenario, second_scenario, options)
            else:
                results, tolerances, failures, profile = _run_decay(scenario, options, spec.pair)
                bundle.decay_profiles.append(profile)
        except AnalysisFailure as exc:
            results, tolerances, failures = {"error": str(exc)}, {}, [str(exc)]
        bundle.timings[analysis] = time.perf_counter() - started
        bundle.blocks.append(
            AnalysisBlock(
                analysis=analysis,
                status="failed" if failures else "ok",
                tolerances=_jsonable(tolerances),
                results=_jsonable(results),
                failures=list(failures),
            )
        )
    return bundle


def report_json(bundle: ReportBundle) -> str:
    """Deterministic JSON serialization (timings excluded)."""
    doc = {
        "tool": TOOL_NAME,
        "version": bundle.version,
        "scenario": bundle.scenario,
        "second_scenario": bundle.second_scenario,
        "defaults": bundle.defaults,
        "analyses": [
            {
                "analysis": b.analysis,
                "status": b.status,
                "tolerances": b.tolerances,
                "results": b.results,
                "failures": b.failures,
            }
            for b in bundle.blocks
        ],
        "status": "failed" if bundle.failed_blocks else "ok",
        "failed_blocks": bundle.failed_blocks,
    }
    return json.dumps(doc, indent=2) + "\n"


def timing_json(bundle: ReportBundle) -> str:
    doc = {
        "wall_clock_seconds": {k: v for k, v in bundle.timings.items()},
        "total_seconds": sum(bundle.timings.values()),
    }
    return json.dumps(doc, indent=2) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6e")
    return str(value)


def summary_text(bundle: ReportBundle) -> str:
    """Aligned plain-text rendering of the report."""
    lines: list[str] = []
    lines.append(f"{TOOL_NAME} {bundle.version} report")
    slots = bundle.scenario["slots"]
    parts = []
    for k, s in enumerate(slots):
        kind = "full" if s["kind"] == "full" else f"blaschke deg {len(s['zeros'])}"
        parts.append(f"slot {k}: {kind} (N={s['degree']})")
    lines.append(f"scenario: n={bundle.scenario['n']}; " + ", ".join(parts))
    for block in bundle.blocks:
        lines.append("")
        lines.append(f"[{block.analysis}] status: {block.status}")
        for key, value in block.results.items():
            if isinstance(value, (int, float, str, bool)) or value is None:
                lines.append(f"  {key:<32} {_fmt(value)}")
        for key, value in block.tolerances.items():
            lines.append(f"  tol:{key:<28} {_fmt(value)}")
        for failure in block.failures:
            lines.append(f"  FAIL: {failure}")
    lines.append("")
    lines.append(f"overall: {'FAILED (' + ', '.join(bundle.failed_blocks) + ')' if bundle.failed_blocks else 'ok'}")
    return "\n".join(lines) + "\n"


def decay_csv(profile) -> str:
    """CSV rendering 'N,sigma_index,sigma_value', sorted by (N, index)."""
    lines = ["N,sigma_index,sigma_value"]
    for n, svals in zip(profile.schedule, profile.singular_values):
        for idx, value in enumerate(svals):
            lines.append(f"{n},{idx},{value!r}")
    return "\n".join(lines) + "\n"


def emit_decay_csv(profile, path) -> None:
    """Write the decay CSV; byte output is deterministic for identical inputs."""
    from pathlib import Path

    Path(path).write_text(decay_csv(profile), encoding="utf-8")
