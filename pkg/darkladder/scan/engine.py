#!/usr/bin/env python3

"""Parameter scans over the steady-state and Monte-Carlo engines.

Axis values are in rad/us like every SystemParams field. Each grid point is
solved independently; a failed point keeps a sentinel value (NaN) with its
converged flag cleared and the scan moves on.
"""

from dataclasses import dataclass, field
import logging
import multiprocessing

import numpy as np
import scipy.linalg
from scipy.ndimage import maximum_filter
from tqdm import tqdm

from darkladder.errors import DarkLadderError, ParameterError
from darkladder.model.rb87 import build_rb87_model, free_space_variant
from darkladder.model.system import SystemParams, build_model
from darkladder.montecarlo.ensemble import simulate_photon_statistics
from darkladder.solver.liouvillian import build_liouvillian, steady_state
from darkladder.solver.observables import steady_state_observables
from darkladder.utils.io import write_csv
from darkladder.utils.units import rad_us_to_mhz

logger = logging.getLogger(__name__)

STEADY_STATE_OBSERVABLES = ("emission_rate", "g2_zero", "photon_number", "sigma33", "figure_of_merit")
MONTECARLO_OBSERVABLES = ("extrapolated_photons", "mean_detected")
ENGINES = ("steady_state", "montecarlo")

# Axis aliases that set more than one field.
DERIVED_AXES = ("gamma33",)

TRUNCATION_RTOL = 1e-4
PEAK_PROMINENCE = 0.05


@dataclass(frozen=True, eq=False)
class ScanSpec:
    base_params: SystemParams
    axes: tuple
    observable: str = "emission_rate"
    engine: str = "steady_state"
    efficiency: float = 1.0
    truncation_check: bool = False
    montecarlo: dict = field(default_factory=dict)
    seed: int = 1

    def __post_init__(self):
        axes = tuple((str(name), np.asarray(values, dtype=float)) for name, values in self.axes)
        object.__setattr__(self, "axes", axes)
        if not 1 <= len(axes) <= 2:
            raise ParameterError(f"a scan has 1 or 2 axes, got {len(axes)}")
        fields = set(SystemParams.__dataclass_fields__) - {"fock_cutoff"}
        for name, values in axes:
            if name not in fields and name not in DERIVED_AXES:
                raise ParameterError(f"unknown scan axis {name!r}")
            if values.ndim != 1 or values.size == 0:
                raise ParameterError(f"axis {name!r} must be a non-empty 1-D grid")
            if not np.all(np.isfinite(values)):
                raise ParameterError(f"axis {name!r} has non-finite values")
            if values.size > 1 and not (np.all(np.diff(values) > 0) or np.all(np.diff(values) < 0)):
                raise ParameterError(f"axis {name!r} is not strictly monotone")
        if len(axes) == 2 and axes[0][0] == axes[1][0]:
            raise ParameterError("scan axes must differ")
        if self.engine not in ENGINES:
            raise ParameterError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        allowed = STEADY_STATE_OBSERVABLES if self.engine == "steady_state" else MONTECARLO_OBSERVABLES
        if self.observable not in allowed:
            raise ParameterError(f"observable {self.observable!r} not available for {self.engine}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ParameterError(f"efficiency must lie in [0, 1], got {self.efficiency}")

    @property
    def shape(self):
        return tuple(values.size for _, values in self.axes)

    @property
    def axis_names(self):
        return tuple(name for name, _ in self.axes)

    def point_params(self, index):
        changes = {}
        for (name, values), i in zip(self.axes, index):
            changes.update(_axis_change(name, values[i], self.base_params))
        return self.base_params.replace(**changes)

    def transposed(self):
        return ScanSpec(self.base_params, self.axes[::-1], self.observable, self.engine,
                        self.efficiency, self.truncation_check, self.montecarlo, self.seed)


def _axis_change(name, value, base):
    if name == "gamma33":
        # Split in the base ratio, evenly when the base has no decay.
        total = base.gamma33
        share = base.gamma13 / total if total > 0 else 0.5
        return {"gamma13": value * share, "gamma23": value * (1.0 - share)}
    return {name: float(value)}


@dataclass(eq=False)
class ScanResult:
    spec: ScanSpec
    values: np.ndarray
    converged: np.ndarray
    residual: np.ndarray
    truncation_flag: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def n_points(self):
        return int(self.values.size)

    @property
    def n_failed(self):
        return int(np.sum(~self.converged))

    def to_rows(self):
        """Long-format rows: axis values in MHz, value, converged, residual, truncation flag."""
        rows = []
        for index in np.ndindex(*self.spec.shape):
            axes = [rad_us_to_mhz(values[i]) for (_, values), i in zip(self.spec.axes, index)]
            rows.append(axes + [
                float(self.values[index]),
                bool(self.converged[index]),
                float(self.residual[index]),
                bool(self.truncation_flag[index]),
            ])
        return rows

    def columns(self):
        return [f"{name}_mhz" for name in self.spec.axis_names] + [
            self.spec.observable, "converged", "residual", "truncation_flag",
        ]

    def write_csv(self, path, name=None):
        """Column order: <axis>_mhz..., <observable>, converged, residual, truncation_flag."""
        return write_csv(path, name or f"scan-{self.spec.observable}", self.columns(), self.to_rows())


def solve_point(params, observable, efficiency=1.0, check_truncation=False):
    """(value, residual, truncation_flag) of one steady-state point."""
    model = build_model(params)
    rho, diag = steady_state(build_liouvillian(model), return_diagnostics=True)
    value = steady_state_observables(rho, params.kappa, efficiency)[observable]
    flag = False
    if check_truncation:
        flag = truncation_check(params, observable, efficiency=efficiency, reference=value).flagged
    return float(value), diag["residual"], flag


def _solve_job(job):
    index, params, observable, efficiency, check = job
    try:
        return index, solve_point(params, observable, efficiency, check), None
    except DarkLadderError as e:
        return index, None, f"{type(e).__name__}: {e}"


def _empty_result(spec):
    shape = spec.shape
    return ScanResult(
        spec=spec,
        values=np.full(shape, np.nan),
        converged=np.zeros(shape, dtype=bool),
        residual=np.full(shape, np.nan),
        truncation_flag=np.zeros(shape, dtype=bool),
    )


def _record(result, index, outcome, err):
    if err is not None:
        result.errors[index] = err
        logger.warning("scan point %s failed: %s", index, err)
        return
    value, residual, flag = outcome
    result.values[index] = value
    result.residual[index] = residual
    result.truncation_flag[index] = flag
    result.converged[index] = True


def _run_steady_state(spec, threads, disable_progress):
    result = _empty_result(spec)
    jobs = [
        (index, spec.point_params(index), spec.observable, spec.efficiency, spec.truncation_check)
        for index in np.ndindex(*spec.shape)
    ]
    bar = tqdm(total=len(jobs), desc=f"scan {spec.observable}", disable=disable_progress)
    if threads == 1 or len(jobs) == 1:
        for job in jobs:
            _record(result, *_solve_job(job))
            bar.update(1)
    else:
        with multiprocessing.Pool(threads) as pool:
            for out in pool.imap_unordered(_solve_job, jobs, chunksize=max(len(jobs) // (8 * threads), 1)):
                _record(result, *out)
                bar.update(1)
    bar.close()
    return result


def point_seed(master, index, shape):
    flat = int(np.ravel_multi_index(index, shape))
    return int(np.random.SeedSequence([int(master), flat]).generate_state(1)[0])


def _run_montecarlo(spec, threads, disable_progress):
    opts = dict(spec.montecarlo)
    result = _empty_result(spec)
    for index in np.ndindex(*spec.shape):
        params = spec.point_params(index)
        try:
            model = build_rb87_model(
                params,
                zeeman_shift=opts.get("zeeman_shift", 2 * np.pi),
                preparation_fidelity=opts.get("preparation_fidelity", 1.0),
                branching_file=opts.get("branching_file") or None,
            )
            if opts.get("free_space", False):
                model = free_space_variant(model)
            stats = simulate_photon_statistics(
                model,
                n_traj=opts.get("n_traj", 1000),
                t_max=opts.get("t_max", 60.0),
                efficiency=spec.efficiency,
                seed=point_seed(spec.seed, index, spec.shape),
                dt_max=opts.get("dt_max", 0.2),
                threads=threads,
                rate_bin=opts.get("rate_bin", 2.0),
                extrapolate=spec.observable == "extrapolated_photons",
                disable_progress=disable_progress,
            )
            value = stats.extrapolated_total if spec.observable == "extrapolated_photons" else stats.mean_detected
            if np.isnan(value):
                raise ParameterError("count-rate extrapolation failed")
            _record(result, index, (value, stats.standard_error(), False), None)
        except DarkLadderError as e:
            _record(result, index, None, f"{type(e).__name__}: {e}")
    return result


def run_scan(spec, threads=1, disable_progress=False):
    """Solve every grid point of `spec`. Output is independent of `threads`."""
    if spec.engine == "steady_state":
        result = _run_steady_state(spec, threads, disable_progress)
    else:
        result = _run_montecarlo(spec, threads, disable_progress)
    logger.info("scan %s over %s: %d points, %d failed",
                spec.observable, "x".join(spec.axis_names), result.n_points, result.n_failed)
    return result


def one_photon_energies(g, omega23, delta23):
    """Drive detunings delta12 at which |1,0> is resonant with a one-excitation eigenstate.

    Eigenvalues of [[0, O23/2, 0], [O23/2, -D23, g], [0, g, -D23]] in the basis
    (|2,0>, |3,0>, |1,1>), ascending.
    """
    m = np.array([
        [0.0, omega23 / 2, 0.0],
        [omega23 / 2, -delta23, g],
        [0.0, g, -delta23],
    ])
    return scipy.linalg.eigvalsh(m)


def overlay_eigenenergies(params, delta23_grid):
    """Three branches delta12_k(delta23), shape (3, len(delta23_grid))."""
    delta23_grid = np.asarray(delta23_grid, dtype=float)
    curves = np.array([one_photon_energies(params.g, params.omega23, d) for d in delta23_grid])
    return curves.T


def anticrossing_gap(params, delta23_grid):
    """Smallest spacing between adjacent branches over the grid."""
    curves = overlay_eigenenergies(params, delta23_grid)
    return float(np.min(np.diff(curves, axis=0)))


def extract_peaks(values, prominence=PEAK_PROMINENCE):
    """Indices of 8-neighbourhood maxima above prominence * global max.

    NaN points are never peaks.
    """
    v = np.asarray(values, dtype=float)
    if not np.isfinite(v).any():
        return []
    filled = np.where(np.isfinite(v), v, -np.inf)
    top = np.max(filled)
    local = maximum_filter(filled, size=3, mode="nearest")
    mask = (filled == local) & (filled >= prominence * top) & np.isfinite(v)
    return [tuple(int(i) for i in idx) for idx in np.argwhere(mask)]


def peak_curve_colocation(result, params, prominence=PEAK_PROMINENCE):
    """Fraction of scan maxima within one delta12 step of an eigenenergy branch.

    Needs a 2D scan with axes (delta12, delta23) in either order.
    """
    names = result.spec.axis_names
    if set(names) != {"delta12", "delta23"}:
        raise ParameterError("co-location needs a delta12 x delta23 scan")
    values = result.values if names[0] == "delta12" else result.values.T
    d12 = dict(result.spec.axes)["delta12"]
    d23 = dict(result.spec.axes)["delta23"]
    step = abs(d12[1] - d12[0]) if d12.size > 1 else np.inf

    peaks = extract_peaks(values, prominence)
    if not peaks:
        return float("nan"), []
    hits = []
    for i, j in peaks:
        branches = one_photon_energies(params.g, params.omega23, d23[j])
        hits.append(np.min(np.abs(branches - d12[i])) <= step)
    return float(np.mean(hits)), [(d12[i], d23[j]) for i, j in peaks]


def outer_branch_separation(result, prominence=PEAK_PROMINENCE):
    """Distance between the outermost delta12 maxima along the delta23 row nearest 0.

    Maxima are taken within the row, so a ridge peaking at another delta23
    still counts.
    """
    names = result.spec.axis_names
    values = result.values if names[0] == "delta12" else result.values.T
    d12 = dict(result.spec.axes)["delta12"]
    d23 = dict(result.spec.axes)["delta23"]
    row = int(np.argmin(np.abs(d23)))
    peaks = [i for (i,) in extract_peaks(values[:, row], prominence)]
    if len(peaks) < 2:
        return float("nan")
    return float(d12[max(peaks)] - d12[min(peaks)])


@dataclass(frozen=True)
class TruncationReport:
    observable: str
    fock_cutoff: int
    value: float
    value_extended: float
    rel_change: float
    flagged: bool


def truncation_check(params, observable="photon_number", extra=2, rtol=TRUNCATION_RTOL,
                     efficiency=1.0, reference=None):
    """Re-solve at fock_cutoff + extra and flag a relative change above rtol.

    Without the 1-2 drive the system stays in |1,0> and is reported converged
    without solving.
    """
    if params.omega12 == 0:
        return TruncationReport(observable, params.fock_cutoff, 0.0, 0.0, 0.0, False)

    def solve(p):
        rho = steady_state(build_liouvillian(build_model(p)))
        return float(steady_state_observables(rho, p.kappa, efficiency)[observable])

    value = solve(params) if reference is None else float(reference)
    extended = solve(params.replace(fock_cutoff=params.fock_cutoff + extra))
    scale = max(abs(value), abs(extended))
    if not np.isfinite(scale):
        rel = 0.0 if value == extended else float("inf")
    elif scale == 0:
        rel = 0.0
    else:
        rel = abs(extended - value) / scale
    flagged = bool(rel > rtol)
    if flagged:
        logger.warning("fock cutoff %d: %s changes by %.2e at cutoff %d",
                       params.fock_cutoff, observable, rel, params.fock_cutoff + extra)
    return TruncationReport(observable, params.fock_cutoff, value, extended, float(rel), flagged)
