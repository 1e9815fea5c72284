""" Cross-seed summaries of run records: the plot-ready learning curves and
the summary document of an experiment.
"""
import numpy as np

from .lib.datalist import RecordList

FINAL_WINDOW = 500


class NoSuccessfulRuns(RuntimeError):
    """ Every run of an experiment failed """
    pass


def _metric_columns(record):
    return [c for c in record.columns if c not in ["seed", "episode"]]


def successful(records):
    return [r for r in records if not r.failed]


def summarize(records):
    """ Per-episode cross-seed mean and population variance of every
    metric column. Failed runs are left out.

    :returns: a RecordList with columns episode, <metric>_mean, <metric>_var
    """
    ok = successful(records)
    if not ok:
        raise NoSuccessfulRuns(f"All {len(records)} runs failed")
    lengths = {len(r) for r in ok}
    if len(lengths) != 1:
        raise ValueError(f"Runs have different episode counts: {sorted(lengths)}")
    metrics = _metric_columns(ok[0])
    columns = ["episode"]
    for m in metrics:
        columns += [f"{m}_mean", f"{m}_var"]

    curves = RecordList(columns=columns)
    for k in range(lengths.pop()):
        row = {"episode": k}
        for m in metrics:
            values = np.array([r.rows[k][m] for r in ok], dtype=float)
            row[f"{m}_mean"] = float(np.mean(values))
            row[f"{m}_var"] = float(np.var(values))
        curves.append(row)
    return curves


def _cross_seed(values_by_seed):
    """ {metric: [per seed values]} -> {metric: {"mean", "var"}} """
    out = {}
    for k, values in values_by_seed.items():
        values = [v for v in values if v is not None]
        if values:
            out[k] = {"mean": float(np.mean(values)), "var": float(np.var(values))}
    return out


def summary_document(records, config: dict=None, window: int=FINAL_WINDOW):
    """ Config echo, failed runs, and cross-seed statistics of the final
    `window` episodes and of the evaluations.
    """
    ok = successful(records)
    final, evaluation = {}, {}
    for r in ok:
        for k, v in r.summary(window)["final"].items():
            final.setdefault(k, []).append(v)
        if r.evaluation:
            for k, v in r.evaluation["mean"].items():
                evaluation.setdefault(k, []).append(v)
    return {
        "config": config or {},
        "seeds": [r.seed for r in records],
        "successful_runs": len(ok),
        "failed_runs": [{"seed": r.seed, "error": r.error} for r in records if r.failed],
        "final_window": window,
        "final": _cross_seed(final),
        "evaluation": _cross_seed(evaluation),
    }
