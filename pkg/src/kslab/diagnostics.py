"""Per-step estimate quantities and empirical checks of the decay inequalities.

A run produces a list of TimeSeriesRecord rows (one per recorded time).
Post-processing fits the superlinear decay inequality
d/dt int(u^p) <= -C (int u^p)^(1 + 2/(n(p-1))) + C, measures log-log smoothing
rates against their expected exponents -n(p-1)/2, probes vague continuity at
t = 0, and accumulates the time integrals of grad-u energy and |u grad v|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import gradient
from .grid import GridField, gradient_energy, integrate, lp_norm
from .measures import RadonMeasure, TestDictionary, vague_distance
from .stepper import SimState, regularized_source


@dataclass
class TimeSeriesRecord:
    t: float
    dt: float
    mass: float
    lp_norms: dict
    grad_energy_2: float
    v_w1p_surrogate: float
    vague_dist: float
    ugradv_l1: float
    blowup: bool = False

    def int_u_p(self, p: float) -> float:
        """int(u^p) recovered from the stored L^p norm."""
        return self.lp_norms[p] ** p


@dataclass
class InequalityReport:
    p: float
    coefficient: float
    offset: float
    exponent_expected: float
    violation_count: int
    max_violation: float


def record(
    state: SimState,
    measure: RadonMeasure,
    dictionary: TestDictionary,
    p_list,
    r_star: float = 1.5,
    dt: float = 0.0,
    blowup: bool = False,
) -> TimeSeriesRecord:
    """Compute one diagnostics row from a consistent state."""
    u, v = state.u, state.v
    vgrad_mag = GridField(v.grid, gradient(v).cell_magnitude())
    return TimeSeriesRecord(
        t=state.t,
        dt=dt,
        mass=integrate(u),
        lp_norms={p: lp_norm(u, p) for p in p_list},
        grad_energy_2=gradient_energy(u, 2.0),
        v_w1p_surrogate=lp_norm(v, r_star) + lp_norm(vgrad_mag, r_star),
        vague_dist=vague_distance(u, measure, dictionary),
        ugradv_l1=integrate(GridField(u.grid, np.abs(u.values) * vgrad_mag.values)),
        blowup=blowup,
    )


def _window_indices(series, window) -> np.ndarray:
    ts = np.array([r.t for r in series])
    if window is None:
        return np.arange(len(series))
    lo, hi = window
    return np.nonzero((ts >= lo) & (ts <= hi))[0]


def _nonuniform_derivative(ts: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Centered three-point derivative on a nonuniform grid (exact for quadratics).

    Interior points only; the two endpoints are dropped by the callers.
    """
    d = np.full(len(ts), np.nan)
    h1 = ts[1:-1] - ts[:-2]
    h2 = ts[2:] - ts[1:-1]
    d[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * ys[:-2]
        + (h2 - h1) / (h1 * h2) * ys[1:-1]
        + h1 / (h2 * (h1 + h2)) * ys[2:]
    )
    return d


def central_inequality_check(series, p: float, n: int, window=None) -> InequalityReport:
    """Fit the single-constant decay inequality over a record window.

    The fitted coefficient is the largest C for which
    dy/dt <= -C (y^q - 1), q = 1 + 2/(n(p-1)), holds at every record with
    y > 2 (twice the unit equilibrium of the single-constant form). Records
    with y > 2 whose derivative is not negative are sign-structure violations.
    """
    idx = _window_indices(series, window)
    if len(idx) < 10:
        raise ValueError(f"need at least 10 records in the window, got {len(idx)}")
    if p not in series[0].lp_norms:
        raise ValueError(f"p={p} is not in the recorded p list")
    ts = np.array([series[i].t for i in idx])
    ys = np.array([series[i].int_u_p(p) for i in idx])
    q = 1.0 + 2.0 / (n * (p - 1.0))
    d = _nonuniform_derivative(ts, ys)
    sel = slice(1, -1)
    ts, ys, d = ts[sel], ys[sel], d[sel]

    span = ts[-1] - ts[0]
    tol_d = 1e-6 * np.max(ys) / max(span, 1e-300)
    above = ys > 2.0
    decaying = above & (d < 0.0)
    violations = above & (d > tol_d)
    coefficient = float(np.min(-d[decaying] / (ys[decaying] ** q - 1.0))) if np.any(decaying) else 0.0
    return InequalityReport(
        p=p,
        coefficient=coefficient,
        offset=coefficient,
        exponent_expected=q,
        violation_count=int(np.sum(violations)),
        max_violation=float(np.max(d[violations])) if np.any(violations) else 0.0,
    )


def fit_loglog_slope(ts: np.ndarray, ys: np.ndarray) -> float:
    """Least-squares slope of log(y) against log(t)."""
    if np.any(ts <= 0):
        raise ValueError("log-log fit requires positive times")
    if not np.all(np.isfinite(ys)) or np.any(ys <= 0):
        raise ValueError("log-log fit requires positive finite values")
    return float(np.polyfit(np.log(ts), np.log(ys), 1)[0])


def smoothing_rate_fit(series, p: float, t_range) -> float:
    """Log-log decay slope of int(u^p) over a time range; compare to -n(p-1)/2."""
    idx = _window_indices(series, t_range)
    idx = idx[[series[i].t > 0 for i in idx]]
    if len(idx) < 2:
        raise ValueError("need at least two positive-time records in t_range")
    ts = np.array([series[i].t for i in idx])
    ys = np.array([series[i].int_u_p(p) for i in idx])
    return fit_loglog_slope(ts, ys)


def vague_continuity_check(series, delta_grid, monotone_window=None, ripple: float = 0.05):
    """Probe continuity at t = 0 in the vague topology.

    Returns a dict with, per delta, the first time the vague distance exceeds
    it, plus the earliest positive-time distance and whether the distance is
    non-increasing (up to the ripple factor) as t decreases through the
    monotone window (default: the last decade of recorded times above 0).
    """
    ts = np.array([r.t for r in series])
    dists = np.array([r.vague_dist for r in series])
    if ts[0] > 1e-3:
        raise ValueError(f"series must start at t <= 1e-3, got {ts[0]}")
    pos = ts > 0
    t_min = float(np.min(ts[pos]))
    if monotone_window is None:
        monotone_window = (t_min, 10.0 * t_min)
    lo, hi = monotone_window
    sel = pos & (ts >= lo) & (ts <= hi)
    wt, wd = ts[sel], dists[sel]
    ratios = wd[:-1] / np.maximum(wd[1:], 1e-300)
    max_ripple = float(np.max(ratios - 1.0)) if len(ratios) else 0.0
    first_exceed = {}
    for delta in delta_grid:
        over = np.nonzero(dists > delta)[0]
        first_exceed[delta] = float(ts[over[0]]) if len(over) else None
    return {
        "first_time_exceeding": first_exceed,
        "earliest_t": t_min,
        "earliest_distance": float(dists[pos][np.argmin(ts[pos])]),
        "monotone_ok": bool(max_ripple <= ripple),
        "max_ripple": max_ripple,
        "window": (float(lo), float(hi)),
    }


def grad_flux_time_integrals(series, t0: float, t1: float):
    """Trapezoid time integrals of grad-u energy and |u grad v| over [t0, t1]."""
    ts = np.array([r.t for r in series])
    if not (t0 < t1 and t0 >= ts[0] and t1 <= ts[-1]):
        raise ValueError(f"[{t0}, {t1}] must lie within the recorded times")
    idx = _window_indices(series, (t0, t1))
    ts = np.array([series[i].t for i in idx])
    ge = np.array([series[i].grad_energy_2 for i in idx])
    ug = np.array([series[i].ugradv_l1 for i in idx])
    return float(np.trapezoid(ge, ts)), float(np.trapezoid(ug, ts))


def ugradv_cumulative(series):
    """Cumulative trapezoid of |u grad v|_L1 from the first record onward."""
    ts = np.array([r.t for r in series])
    ug = np.array([r.ugradv_l1 for r in series])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (ug[1:] + ug[:-1]) * np.diff(ts))])
    return ts, cum


# Time-series CSV: fixed leading columns, one lp_<p> column per configured p
# (in configured order), one row per record.


def _p_label(p) -> str:
    if np.isinf(p):
        return "lp_inf"
    return f"lp_{p:g}"


def series_columns(p_list) -> list[str]:
    return (
        ["t", "dt", "mass"]
        + [_p_label(p) for p in p_list]
        + ["grad_energy_p2", "v_w1p_surrogate", "vague_distance", "ugradv_l1", "blowup"]
    )


def write_series_csv(path, series, p_list) -> None:
    ts = [r.t for r in series]
    if any(a >= b for a, b in zip(ts, ts[1:])):
        raise ValueError("record times must be strictly increasing")
    cols = series_columns(p_list)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in series:
            row = [f"{r.t:.17g}", f"{r.dt:.17g}", f"{r.mass:.17g}"]
            row += [f"{r.lp_norms[p]:.17g}" for p in p_list]
            row += [
                f"{r.grad_energy_2:.17g}",
                f"{r.v_w1p_surrogate:.17g}",
                f"{r.vague_dist:.17g}",
                f"{r.ugradv_l1:.17g}",
                "1" if r.blowup else "0",
            ]
            fh.write(",".join(row) + "\n")


def read_series_csv(path):
    """Read a series CSV back into a dict of column name -> numpy array."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"{path}: malformed series CSV")
    return {name: data[:, i] for i, name in enumerate(header)}


def series_from_csv(path) -> list[TimeSeriesRecord]:
    """Rebuild TimeSeriesRecord rows from a series CSV."""
    cols = read_series_csv(path)
    p_values = []
    for name in cols:
        if name == "lp_inf":
            p_values.append(np.inf)
        elif name.startswith("lp_"):
            p_values.append(float(name[3:]))
    n_rows = len(cols["t"])
    return [
        TimeSeriesRecord(
            t=cols["t"][i],
            dt=cols["dt"][i],
            mass=cols["mass"][i],
            lp_norms={p: cols[_p_label(p)][i] for p in p_values},
            grad_energy_2=cols["grad_energy_p2"][i],
            v_w1p_surrogate=cols["v_w1p_surrogate"][i],
            vague_dist=cols["vague_distance"][i],
            ugradv_l1=cols["ugradv_l1"][i],
            blowup=bool(cols["blowup"][i]),
        )
        for i in range(n_rows)
    ]
