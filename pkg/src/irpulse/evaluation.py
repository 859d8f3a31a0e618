"""Error metrics against ground-truth iHR at several time granularities."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import IhrSeries

DEFAULT_GRANULARITIES_S = (1.0, 10.0, 30.0)
RELATIVE_ERROR_GRANULARITY_S = 30.0


@dataclass(frozen=True)
class ErrorReport:
    label: str
    rmse_bpm: dict        # granularity_s -> RMSE
    relative_error_pct: float
    n_points: dict        # granularity_s -> sample count


def resample_mean(series: IhrSeries, granularity_s) -> IhrSeries:
    """Non-overlapping window means, stamped at window centers; a trailing
    partial window is dropped."""
    if granularity_s <= 0:
        raise ValidationError("granularity must be positive")
    t, b = series.timestamps_s, series.bpm
    span = t[-1] - t[0]
    n_win = int(np.floor(span / granularity_s + 1e-12))
    if n_win < 1:
        raise ValidationError(
            f"series span {span:.3f} s shorter than granularity {granularity_s} s"
        )
    out_t, out_b = [], []
    for k in range(n_win):
        w0 = t[0] + k * granularity_s
        w1 = w0 + granularity_s
        mask = (t >= w0) & (t < w1) if k < n_win - 1 else (t >= w0) & (t <= w1)
        if mask.any():
            out_t.append(w0 + granularity_s / 2.0)
            out_b.append(b[mask].mean())
    if not out_t:
        raise ValidationError("no samples fell into any window")
    return IhrSeries(timestamps_s=np.asarray(out_t), bpm=np.asarray(out_b))


def align(a: IhrSeries, b: IhrSeries):
    """Interpolate both series onto a shared grid over the overlap.

    Identical timestamp vectors are used as-is; otherwise a uniform grid at
    the finer of the two native steps is built over the intersection.
    """
    ta, tb = a.timestamps_s, b.timestamps_s
    if len(ta) == len(tb) and np.array_equal(ta, tb):
        return ta, a.bpm, b.bpm
    lo = max(ta[0], tb[0])
    hi = min(ta[-1], tb[-1])
    if hi <= lo:
        raise ValidationError("series have no temporal overlap")
    step = min(np.median(np.diff(ta)), np.median(np.diff(tb)))
    grid = np.arange(lo, hi + step / 2, step)
    grid = grid[grid <= hi]
    return grid, np.interp(grid, ta, a.bpm), np.interp(grid, tb, b.bpm)


def rmse(a: IhrSeries, b: IhrSeries):
    """Root mean square difference in bpm over the aligned overlap."""
    _, va, vb = align(a, b)
    return float(np.sqrt(np.mean((va - vb) ** 2)))


def relative_error(a: IhrSeries, truth: IhrSeries):
    """Mean absolute relative deviation from truth, in percent."""
    _, va, vt = align(a, truth)
    if np.any(vt <= 0):
        raise ValidationError("truth series must be strictly positive")
    return float(np.mean(np.abs(va - vt) / vt) * 100.0)


def evaluate(recovered: IhrSeries, truth: IhrSeries, label="",
             granularities_s=DEFAULT_GRANULARITIES_S) -> ErrorReport:
    """Table-style report: RMSE per granularity plus relative error at 30 s."""
    rmse_map, n_map = {}, {}
    for g in granularities_s:
        ra = resample_mean(recovered, g)
        rt = resample_mean(truth, g)
        grid, _, _ = align(ra, rt)
        rmse_map[g] = rmse(ra, rt)
        n_map[g] = len(grid)
    g_rel = RELATIVE_ERROR_GRANULARITY_S
    if g_rel not in rmse_map:
        g_rel = max(granularities_s)
    rel = relative_error(resample_mean(recovered, g_rel), resample_mean(truth, g_rel))
    return ErrorReport(label=label, rmse_bpm=rmse_map,
                       relative_error_pct=rel, n_points=n_map)


def write_report(reports, path):
    """Delimited table mirroring the per-dataset error layout."""
    reports = list(reports)
    grans = sorted({g for r in reports for g in r.rmse_bpm})
    with open(path, "w") as f:
        header = ["dataset"] + [f"rmse_{g:g}s_bpm" for g in grans] + ["relative_error_pct"]
        f.write("\t".join(header) + "\n")
        for r in reports:
            cells = [r.label or "-"]
            cells += [f"{r.rmse_bpm[g]:.4f}" if g in r.rmse_bpm else "-" for g in grans]
            cells.append(f"{r.relative_error_pct:.4f}")
            f.write("\t".join(cells) + "\n")
