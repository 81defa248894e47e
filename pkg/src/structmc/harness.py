"""Experiment orchestration: rate grids, per-cell optimal alpha, trial averaging.

A grid cell is a (rate_zero, rate_nonzero) sampling pair.  Each trial draws
a fresh ground truth and mask, solves the baseline formulation once and the
regularized one once per candidate alpha, and keeps the alpha with the
smallest recovery error (ties break toward the smaller alpha).  Alpha
selection deliberately uses the ground truth; the protocol reports the best
the regularizer could do, not a cross-validated estimate.

Seed schedule: every draw is keyed by
``(base_seed, rate_zero, rate_nonzero, trial, purpose, attempt)`` folded
through :func:`structmc.synth.derive_seed`, with rates keyed by their
IEEE-754 bits.  Adding cells or trials to a grid therefore never perturbs
the draws of existing ones.  Degenerate draws (all-zero matrix, empty mask)
are redrawn with an incremented attempt counter, at most 8 times.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CellError, InvalidSamplingError
from .matrix import as_matrix, frobenius_norm
from .metrics import ratio_from_errors
from .solvers import CompletionProblem, SolverConfig, solve
from .synth import (
    GeneratorSpec,
    SamplingSpec,
    add_noise,
    derive_seed,
    generate_low_rank,
    rho_for_noise,
    sample_structured_mask,
    stream,
)

__all__ = [
    "ExperimentGrid",
    "RealSweep",
    "TrialRecord",
    "GridResult",
    "run_cell",
    "run_grid",
    "run_real_matrix",
]

log = logging.getLogger(__name__)

_MAX_REDRAWS = 8

OUTCOME_OK = "ok"
OUTCOME_BOTH_EXACT = "both-exact"
OUTCOME_INF = "inf"
OUTCOME_FAILED = "failed"


def _as_rate_tuple(values, name):
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError(f"{name} must be nonempty")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} entries must lie in [0, 1], got {v}")
    return values


@dataclass(frozen=True)
class ExperimentGrid:
    """Sweep configuration over sampling-rate cells on synthetic data."""

    zero_rates: tuple[float, ...]
    nonzero_rates: tuple[float, ...]
    alphas: tuple[float, ...]
    trials: int
    generator: GeneratorSpec
    noise_sigma: float = 0.0
    base_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        object.__setattr__(self, "zero_rates", _as_rate_tuple(self.zero_rates, "zero_rates"))
        object.__setattr__(
            self, "nonzero_rates", _as_rate_tuple(self.nonzero_rates, "nonzero_rates")
        )
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or any(a <= 0 for a in alphas):
            raise ValueError(f"alphas must be a nonempty list of positive reals, got {alphas}")
        object.__setattr__(self, "alphas", alphas)
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")


@dataclass(frozen=True)
class RealSweep:
    """Same protocol as :class:`ExperimentGrid` with an ingested ground truth.

    ``row_subsample`` picks that many rows afresh each trial (without
    replacement, original order), mirroring survey-style experiments where
    the full data is too large to solve repeatedly.
    """

    zero_rates: tuple[float, ...]
    nonzero_rates: tuple[float, ...]
    alphas: tuple[float, ...]
    trials: int
    noise_sigma: float = 0.0
    base_seed: int = 0
    row_subsample: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        object.__setattr__(self, "zero_rates", _as_rate_tuple(self.zero_rates, "zero_rates"))
        object.__setattr__(
            self, "nonzero_rates", _as_rate_tuple(self.nonzero_rates, "nonzero_rates")
        )
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or any(a <= 0 for a in alphas):
            raise ValueError(f"alphas must be a nonempty list of positive reals, got {alphas}")
        object.__setattr__(self, "alphas", alphas)
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.row_subsample is not None and self.row_subsample < 1:
            raise ValueError(f"row_subsample must be >= 1, got {self.row_subsample}")


def _float_eq(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        return (math.isnan(a) and math.isnan(b)) or a == b
    return a == b


@dataclass(frozen=True, eq=False)
class TrialRecord:
    """One (cell, trial) outcome."""

    cell: tuple[float, float]
    trial_index: int
    alpha_used: float
    ratio: float
    err_reg: float
    err_nnm: float
    status_baseline: str
    status_reg: str
    attempts: int = 1
    alpha_errors: tuple | None = None
    error: str | None = None

    @property
    def outcome(self) -> str:
        if self.error is not None:
            return OUTCOME_FAILED
        if math.isnan(self.ratio):
            return OUTCOME_BOTH_EXACT
        if math.isinf(self.ratio):
            return OUTCOME_INF
        return OUTCOME_OK

    def __eq__(self, other):
        # NaN-aware: a replayed record must compare equal to the original
        # even when the ratio carries the both-exact sentinel
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return (
            self.cell == other.cell
            and self.trial_index == other.trial_index
            and _float_eq(self.alpha_used, other.alpha_used)
            and _float_eq(self.ratio, other.ratio)
            and _float_eq(self.err_reg, other.err_reg)
            and _float_eq(self.err_nnm, other.err_nnm)
            and self.status_baseline == other.status_baseline
            and self.status_reg == other.status_reg
            and self.attempts == other.attempts
            and self.alpha_errors == other.alpha_errors
            and self.error == other.error
        )


def _failure_record(cell, trial_index, message) -> TrialRecord:
    nan = float("nan")
    return TrialRecord(
        cell=cell,
        trial_index=trial_index,
        alpha_used=nan,
        ratio=nan,
        err_reg=nan,
        err_nnm=nan,
        status_baseline="",
        status_reg="",
        error=message,
    )


def _exact_tol(solver_cfg: SolverConfig, shape) -> float:
    # "both exact" means exact at the solver's own convergence scale
    return max(1e-12, solver_cfg.primal_tol * math.sqrt(shape[0] * shape[1]))


def _score_cell(truth, observed, mask, alphas, noise_sigma, solver_cfg, debug):
    """Solve baseline and per-alpha regularized problems, pick the best alpha."""
    if noise_sigma > 0:
        rho = rho_for_noise(truth.shape[0], truth.shape[1], mask.size, noise_sigma)
        baseline = CompletionProblem(observed, mask, "nnm-noisy", rho=rho)
        reg_formulation = "nnm-noisy-reg"
    else:
        rho = 0.0
        baseline = CompletionProblem(observed, mask, "nnm-exact")
        reg_formulation = "nnm-reg"
    base_res = solve(baseline, solver_cfg)
    err_nnm = frobenius_norm(base_res.completed - truth)
    per_alpha = []
    for alpha in alphas:
        problem = CompletionProblem(observed, mask, reg_formulation, alpha=alpha, rho=rho)
        res = solve(problem, solver_cfg)
        per_alpha.append((frobenius_norm(res.completed - truth), alpha, res))
    best_err, best_alpha, best_res = min(per_alpha, key=lambda t: (t[0], t[1]))
    ratio = ratio_from_errors(best_err, err_nnm, _exact_tol(solver_cfg, truth.shape))
    return dict(
        alpha_used=best_alpha,
        ratio=ratio,
        err_reg=best_err,
        err_nnm=err_nnm,
        status_baseline=base_res.status,
        status_reg=best_res.status,
        alpha_errors=tuple((a, e) for e, a, _ in per_alpha) if debug else None,
    )


def run_cell(grid: ExperimentGrid, cell, trial_index: int, debug: bool = False) -> TrialRecord:
    """Run one synthetic trial of one cell; deterministic in (grid, cell, trial)."""
    rate_zero, rate_nonzero = float(cell[0]), float(cell[1])
    truth = mask = None
    attempt = 0
    for attempt in range(_MAX_REDRAWS):
        gen_seed = derive_seed(
            grid.base_seed, rate_zero, rate_nonzero, trial_index, "matrix", attempt
        )
        candidate = generate_low_rank(replace(grid.generator, seed=gen_seed))
        if not candidate.any():
            log.debug("cell %s trial %d attempt %d: all-zero draw, redrawing",
                      cell, trial_index, attempt)
            continue
        mask_seed = derive_seed(
            grid.base_seed, rate_zero, rate_nonzero, trial_index, "mask", attempt
        )
        try:
            mask = sample_structured_mask(
                candidate, SamplingSpec(rate_zero, rate_nonzero, mask_seed)
            )
        except InvalidSamplingError:
            log.debug("cell %s trial %d attempt %d: empty mask, redrawing",
                      cell, trial_index, attempt)
            continue
        truth = candidate
        break
    if truth is None or mask is None:
        raise CellError(
            (rate_zero, rate_nonzero),
            trial_index,
            f"degenerate draws exhausted {_MAX_REDRAWS} attempts",
        )
    if grid.noise_sigma > 0:
        noise_seed = derive_seed(
            grid.base_seed, rate_zero, rate_nonzero, trial_index, "noise", attempt
        )
        observed = add_noise(truth, grid.noise_sigma, mask, noise_seed)
    else:
        observed = truth
    scored = _score_cell(
        truth, observed, mask, grid.alphas, grid.noise_sigma, grid.solver, debug
    )
    return TrialRecord(
        cell=(rate_zero, rate_nonzero),
        trial_index=trial_index,
        attempts=attempt + 1,
        **scored,
    )


@dataclass(frozen=True, eq=False)
class GridResult:
    """Per-cell aggregates plus the full record list.

    ``mean_ratio[i, j]`` averages the finite ratios of cell
    (zero_rates[i], nonzero_rates[j]); both-exact trials are excluded from
    the mean and counted in ``both_exact``.  An infinite trial ratio makes
    the cell mean infinite rather than being hidden.
    """

    grid: object
    records: tuple[TrialRecord, ...]
    mean_ratio: np.ndarray
    mean_alpha: np.ndarray
    both_exact: np.ndarray
    failures: np.ndarray


def _aggregate(grid, records) -> GridResult:
    nz = len(grid.zero_rates)
    nnz = len(grid.nonzero_rates)
    mean_ratio = np.full((nz, nnz), np.nan)
    mean_alpha = np.full((nz, nnz), np.nan)
    both_exact = np.zeros((nz, nnz), dtype=int)
    failures = np.zeros((nz, nnz), dtype=int)
    by_cell = {}
    for rec in records:
        by_cell.setdefault(rec.cell, []).append(rec)
    for i, rz in enumerate(grid.zero_rates):
        for j, rnz in enumerate(grid.nonzero_rates):
            cell_records = by_cell.get((rz, rnz), [])
            good = [r for r in cell_records if r.error is None]
            failures[i, j] = len(cell_records) - len(good)
            ratios = [r.ratio for r in good if not math.isnan(r.ratio)]
            both_exact[i, j] = sum(1 for r in good if math.isnan(r.ratio))
            if ratios:
                mean_ratio[i, j] = float(np.mean(ratios))
            if good:
                mean_alpha[i, j] = float(np.mean([r.alpha_used for r in good]))
    return GridResult(
        grid=grid,
        records=tuple(records),
        mean_ratio=mean_ratio,
        mean_alpha=mean_alpha,
        both_exact=both_exact,
        failures=failures,
    )


def _grid_tasks(grid):
    return [
        ((rz, rnz), trial)
        for rz in grid.zero_rates
        for rnz in grid.nonzero_rates
        for trial in range(grid.trials)
    ]


def _cell_worker(args):
    grid, cell, trial, debug = args
    return run_cell(grid, cell, trial, debug=debug)


def run_grid(
    grid: ExperimentGrid,
    workers: int = 1,
    strict: bool = True,
    debug: bool = False,
) -> GridResult:
    """Run every (cell, trial) and aggregate.

    Output is a pure function of ``grid`` alone: trials may execute in
    parallel (``workers`` processes) but records are reduced in a fixed
    cell-major order.  With ``strict=False`` hard cell errors become failure
    records instead of raising.
    """
    tasks = _grid_tasks(grid)
    records = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_cell_worker, (grid, cell, trial, debug))
                       for cell, trial in tasks]
            for (cell, trial), fut in zip(tasks, futures):
                try:
                    records.append(fut.result())
                except CellError as exc:
                    if strict:
                        raise
                    records.append(_failure_record(cell, trial, str(exc)))
    else:
        for cell, trial in tasks:
            try:
                records.append(run_cell(grid, cell, trial, debug=debug))
            except CellError as exc:
                if strict:
                    raise
                records.append(_failure_record(cell, trial, str(exc)))
    return _aggregate(grid, records)


def _real_trial(truth, sweep, cell, trial_index, debug):
    rate_zero, rate_nonzero = cell
    mask = None
    attempt = 0
    for attempt in range(_MAX_REDRAWS):
        mask_seed = derive_seed(
            sweep.base_seed, rate_zero, rate_nonzero, trial_index, "mask", attempt
        )
        try:
            mask = sample_structured_mask(
                truth, SamplingSpec(rate_zero, rate_nonzero, mask_seed)
            )
            break
        except InvalidSamplingError:
            continue
    if mask is None:
        raise CellError(cell, trial_index, f"empty masks exhausted {_MAX_REDRAWS} attempts")
    if sweep.noise_sigma > 0:
        noise_seed = derive_seed(
            sweep.base_seed, rate_zero, rate_nonzero, trial_index, "noise", attempt
        )
        observed = add_noise(truth, sweep.noise_sigma, mask, noise_seed)
    else:
        observed = truth
    scored = _score_cell(
        truth, observed, mask, sweep.alphas, sweep.noise_sigma, sweep.solver, debug
    )
    return TrialRecord(
        cell=(rate_zero, rate_nonzero),
        trial_index=trial_index,
        attempts=attempt + 1,
        **scored,
    )


def subsample_rows(m: np.ndarray, count: int, seed: int, trial_index: int) -> np.ndarray:
    """Pick ``count`` distinct rows for a trial, keeping their original order."""
    m = np.asarray(m, dtype=np.float64)
    if count > m.shape[0]:
        raise ValueError(f"cannot subsample {count} rows from {m.shape[0]}")
    rng = stream(seed, "row-subsample", trial_index)
    rows = np.sort(rng.permutation(m.shape[0])[:count])
    return as_matrix(m[rows, :])


def run_real_matrix(
    m: np.ndarray,
    sweep: RealSweep,
    workers: int = 1,
    strict: bool = True,
    debug: bool = False,
) -> GridResult:
    """Run the grid protocol against a fully known ingested matrix."""
    truth_full = as_matrix(m)
    if not truth_full.any():
        raise ValueError("ground-truth matrix has no nonzero entries")
    # per-trial ground truths are fixed across cells, keyed by trial only
    truths = {}
    for trial in range(sweep.trials):
        if sweep.row_subsample is not None:
            truths[trial] = subsample_rows(
                truth_full, sweep.row_subsample, sweep.base_seed, trial
            )
        else:
            truths[trial] = truth_full
    tasks = _grid_tasks(sweep)
    records = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_real_worker, (truths[trial], sweep, cell, trial, debug))
                for cell, trial in tasks
            ]
            for (cell, trial), fut in zip(tasks, futures):
                try:
                    records.append(fut.result())
                except CellError as exc:
                    if strict:
                        raise
                    records.append(_failure_record(cell, trial, str(exc)))
    else:
        for cell, trial in tasks:
            try:
                records.append(_real_trial(truths[trial], sweep, cell, trial, debug))
            except CellError as exc:
                if strict:
                    raise
                records.append(_failure_record(cell, trial, str(exc)))
    return _aggregate(sweep, records)


def _real_worker(args):
    truth, sweep, cell, trial, debug = args
    return _real_trial(truth, sweep, cell, trial, debug)
