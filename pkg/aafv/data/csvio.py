import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from aafv.core.errors import DataError, ReportError
from aafv.data.datasets import LabeledDataset

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _is_number(text: str) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def _to_float(cell) -> float:
    # float() is correctly rounded, so values written with FLOAT_FORMAT load back bit for bit
    try:
        return float(cell)
    except (TypeError, ValueError):
        return np.nan


def load_csv(path: Union[str, Path], label_column: Union[int, str]) -> LabeledDataset:
    """
    Load a numeric CSV with a binary label column.

    Parameters:
    - path: UTF-8, comma-separated file with an optional single header row
    - label_column: Column name (needs a header) or zero-based index

    Returns:
    - LabeledDataset: Features in file order, label column removed

    Raises:
    - DataError: Empty file, a first row mixing text and numbers, ragged or
      non-numeric row (row number is 1-based in the file), unknown label
      column, or labels outside {0, 1}
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"CSV file not found: {path}")
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"empty CSV file: {path}") from exc
    except pd.errors.ParserError as exc:
        raise DataError(f"malformed CSV {path}: {exc}") from exc

    if raw.empty:
        raise DataError(f"empty CSV file: {path}")

    # pandas pads short rows with NaN; empty fields stay ""
    first_row = raw.iloc[0].tolist()
    numeric_cells = [isinstance(cell, str) and _is_number(cell) for cell in first_row]
    if any(numeric_cells) and not all(numeric_cells):
        raise DataError(
            "first row mixes numbers and text: neither a header nor a data row", row=1
        )
    has_header = not any(numeric_cells)
    logger.debug(f"{path}: first row is {'a header' if has_header else 'data'}")
    header: Optional[List[str]] = (
        [str(c).strip() for c in first_row] if has_header else None
    )
    body = raw.iloc[1:] if has_header else raw
    row_offset = 2 if has_header else 1
    if body.empty:
        raise DataError(f"CSV file has a header but no data rows: {path}")
    missing = (body.isna() | body.eq("")).any(axis=1).to_numpy()
    if missing.any():
        bad = int(np.flatnonzero(missing)[0])
        raise DataError("row has missing fields", row=bad + row_offset)

    label_idx = _resolve_label_column(label_column, header, raw.shape[1])

    numeric = body.apply(lambda col: col.map(_to_float))
    bad_mask = numeric.isna().any(axis=1).to_numpy()
    if bad_mask.any():
        bad = int(np.flatnonzero(bad_mask)[0])
        raise DataError("non-numeric value in a feature or label column", row=bad + row_offset)
    values = numeric.to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values).all(axis=1))[0])
        raise DataError("non-finite value", row=bad + row_offset)

    labels = values[:, label_idx]
    bad_label = ~np.isin(labels, (0.0, 1.0))
    if bad_label.any():
        bad = int(np.flatnonzero(bad_label)[0])
        raise DataError(f"label {labels[bad]!r} is not 0 or 1", row=bad + row_offset)
    features = np.delete(values, label_idx, axis=1)
    if features.shape[1] < 1:
        raise DataError(f"CSV file has no feature columns: {path}")

    logger.info(f"Loaded {path}: {features.shape[0]} rows x {features.shape[1]} features")
    return LabeledDataset(features, labels.astype(np.int8))


def _resolve_label_column(
    label_column: Union[int, str], header: Optional[Sequence[str]], n_cols: int
) -> int:
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise DataError(f"label column {label_column!r} given by name but the CSV has no header")
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header {list(header)}")
        return list(header).index(label_column)
    index = int(label_column)
    if not 0 <= index < n_cols:
        raise DataError(f"label column index {index} out of range for {n_cols} columns")
    return index


def write_csv(
    path: Union[str, Path],
    features: np.ndarray,
    labels: Optional[np.ndarray] = None,
    label_name: str = "label",
) -> Path:
    """Write features (and optionally labels as the last column) in the load_csv dialect."""
    path = Path(path)
    frame = pd.DataFrame(features, columns=[f"x{j}" for j in range(features.shape[1])])
    if labels is not None:
        frame[label_name] = np.asarray(labels, dtype=np.int64)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def write_dataset(path: Union[str, Path], data: LabeledDataset) -> Path:
    return write_csv(path, data.features, data.labels)
