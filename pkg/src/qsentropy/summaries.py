"""Distribution summaries shared by the estimators and the benchmark harness."""

from dataclasses import dataclass

import numpy as np

__all__ = ["BoxStats", "box_stats"]


@dataclass(frozen=True)
class BoxStats:
    """Box-plot style summary of a batch of replicate values.

    Quantiles follow the linear-interpolation convention where the
    p-quantile sits at rank 1 + p*(n-1) of the order statistics (numpy's
    default).
    """

    mean: float
    median: float
    q25: float
    q75: float
    iqr: float
    p2_5: float
    p97_5: float
    std: float


def box_stats(values):
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 values to summarize")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    q25, med, q75, p2_5, p97_5 = np.percentile(arr, [25.0, 50.0, 75.0, 2.5, 97.5])
    return BoxStats(
        mean=float(arr.mean()),
        median=float(med),
        q25=float(q25),
        q75=float(q75),
        iqr=float(q75 - q25),
        p2_5=float(p2_5),
        p97_5=float(p97_5),
        std=float(arr.std(ddof=1)),
    )
