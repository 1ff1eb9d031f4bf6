import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.metrics import r2_score

logger = logging.getLogger(__name__)

AXES = ("n", "inv_eps")
CORRECTIONS = ("none", "m2")


class InsufficientPointsError(ValueError):
    pass


@dataclass
class ScalingFit:
    axis: str
    slope: float
    intercept: float
    r2: float
    log_correction: bool
    points: int = 0
    column: str = "queries_total"

    def to_dict(self):
        return dict(self.__dict__)


def scaling_points(rows, axis, column="queries_total", correction="m2"):
    """
    Mean of `column` per axis value, divided by m^2 when `correction` is 'm2'.

    Returns a DataFrame with columns x, y sorted by x.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis}.")
    if correction not in CORRECTIONS:
        raise ValueError(f"correction must be one of {CORRECTIONS}, got {correction}.")
    frame = pd.DataFrame(rows)
    if column not in frame or frame[column].isna().all():
        raise ValueError(f"Rows carry no '{column}' values.")
    frame = frame.dropna(subset=[column])
    x = frame["n"].astype(float) if axis == "n" else 1.0 / frame["eps"].astype(float)
    y = frame[column].astype(float)
    if correction == "m2":
        y = y / frame["m"].astype(float) ** 2
    points = pd.DataFrame({"x": x, "y": y}).groupby("x", as_index=False)["y"].mean()
    return points.sort_values("x").reset_index(drop=True)


def fit_scaling(rows, axis, column="queries_total", correction="m2", min_points=4):
    """
    Least-squares slope of log2(queries) against log2(n) or log2(1/eps).

    Args:
        rows: Sweep rows (DataFrame or list of dicts) with n, eps, m and `column`.
        axis: 'n' or 'inv_eps'.
        correction: 'm2' divides each ledger total by m^2 before fitting, 'none' fits raw totals.
        min_points: Minimum number of distinct axis values.

    Returns:
        ScalingFit
    """
    points = scaling_points(rows, axis, column=column, correction=correction)
    if len(points) < min_points:
        raise InsufficientPointsError(
            f"Need at least {min_points} distinct {axis} values to fit a slope, got {len(points)}."
        )
    log_x = np.log2(points["x"].to_numpy())
    log_y = np.log2(points["y"].to_numpy())
    slope, intercept = np.polyfit(log_x, log_y, 1)
    if np.ptp(log_y) == 0.0:
        slope, r2 = 0.0, 1.0
    else:
        r2 = float(np.clip(r2_score(log_y, slope * log_x + intercept), 0.0, 1.0))
    logger.info(" %s slope vs %s: %.4f (r2 %.4f)", column, axis, slope, r2)
    return ScalingFit(
        axis=axis,
        slope=float(slope),
        intercept=float(intercept),
        r2=r2,
        log_correction=correction != "none",
        points=len(points),
        column=column,
    )
