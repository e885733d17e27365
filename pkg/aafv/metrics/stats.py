import math
from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import betainc

from aafv.core.errors import ParameterError
from aafv.schemas.schemas import (
    SCENARIO_ORDER,
    ModelKind,
    Scenario,
    SeedResult,
    Summary,
    WelchResult,
)

Z_95 = 1.959963984540054


def summarize_values(values: Sequence[float]) -> Tuple[float, float, int, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ParameterError("cannot summarize an empty sample")
    if np.all(arr == arr[0]):
        mean, stddev = float(arr[0]), 0.0
    else:
        mean, stddev = float(arr.mean()), float(arr.std(ddof=1))
    half_width = Z_95 * stddev / math.sqrt(arr.size)
    return mean, stddev, int(arr.size), half_width


def group_results(results: Sequence[SeedResult]) -> "OrderedDict[Tuple[Scenario, ModelKind], List[float]]":
    """Accuracies keyed by (scenario, model kind): scenarios in fixed order, kinds by first appearance."""
    kind_order: Dict[ModelKind, int] = {}
    for r in results:
        kind_order.setdefault(r.model_kind, len(kind_order))
    groups: Dict[Tuple[Scenario, ModelKind], List[float]] = {}
    for r in results:
        groups.setdefault((r.scenario, r.model_kind), []).append(r.accuracy)
    ordered = sorted(groups, key=lambda key: (SCENARIO_ORDER.index(key[0]), kind_order[key[1]]))
    return OrderedDict((key, groups[key]) for key in ordered)


def summarize(results: Sequence[SeedResult]) -> List[Summary]:
    """
    Mean, sample standard deviation and 95% normal half-width per
    scenario x model kind group.

    Raises:
    - ParameterError: If `results` is empty
    """
    if not results:
        raise ParameterError("summarize needs at least one result")
    summaries = []
    for (scenario, kind), values in group_results(results).items():
        mean, stddev, count, half_width = summarize_values(values)
        summaries.append(
            Summary(
                scenario=scenario,
                model_kind=kind,
                mean=mean,
                stddev=stddev,
                count=count,
                ci95_half_width=half_width,
            )
        )
    return summaries


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom, via I_x(df/2, 1/2)."""
    if not df > 0:
        raise ParameterError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(min(1.0, max(0.0, betainc(df / 2.0, 0.5, x))))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    """
    Welch's unequal-variance t test.

    Parameters:
    - a, b: Samples with at least 2 values each

    Returns:
    - WelchResult: t statistic, Welch–Satterthwaite df and two-sided p. With
      zero variance in both samples, p is 1 for equal means and 0 otherwise
      (df is None; t is 0 for equal means and None otherwise).
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise ParameterError("welch_t_test needs at least 2 values per sample")
    if np.all(x == x[0]) and np.all(y == y[0]):
        if x[0] == y[0]:
            return WelchResult(t_statistic=0.0, df=None, p_value=1.0)
        return WelchResult(t_statistic=None, df=None, p_value=0.0)
    mean_x, mean_y = float(x.mean()), float(y.mean())
    se_x = float(x.var(ddof=1)) / x.size
    se_y = float(y.var(ddof=1)) / y.size
    se = se_x + se_y
    t = (mean_x - mean_y) / math.sqrt(se)
    df = se * se / (se_x * se_x / (x.size - 1) + se_y * se_y / (y.size - 1))
    return WelchResult(t_statistic=t, df=df, p_value=t_two_sided_p(t, df))
