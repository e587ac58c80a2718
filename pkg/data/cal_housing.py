"""
California Housing CSV loader.

Expects a header row with eight numeric feature columns, one nominal column
(ocean_proximity, five categories) and the target column
(median_house_value). Rows with any empty field are dropped; the nominal
column becomes five one-hot columns, giving 13 features.
"""

import logging
from typing import List, Optional

import numpy as np
import pandas as pd

from data.dataset import Dataset, fit_stats, normalize
from utils.errors import CsvFieldError, DataParseError

logger = logging.getLogger(__name__)

CATEGORIES = ["<1H OCEAN", "INLAND", "ISLAND", "NEAR BAY", "NEAR OCEAN"]

NUMERIC_COLUMNS = [
    "longitude",
    "latitude",
    "housing_median_age",
    "total_rooms",
    "total_bedrooms",
    "population",
    "households",
    "median_income",
]

# data row i (0-based) sits on file line i + 2 under the header
FIRST_DATA_LINE = 2


def load_cal_housing(
    csv_path: str,
    normalize_features: bool = True,
    target_column: str = "median_house_value",
    nominal_column: str = "ocean_proximity",
    categories: Optional[List[str]] = None,
) -> Dataset:
    """
    Load and encode the housing table.

    Args:
        csv_path: CSV file with a header row
        normalize_features: z-score the numeric columns and the target with
            statistics of every retained row; pass False to normalize after
            splitting instead
        target_column: regression target
        nominal_column: categorical column to one-hot encode
        categories: accepted category values, in one-hot column order

    Returns:
        Regression Dataset with 8 numeric then 5 one-hot columns

    Raises:
        CsvFieldError: non-numeric value or unknown category, naming the file line
        DataParseError: required columns missing
    """
    categories = list(categories or CATEGORIES)
    try:
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise DataParseError(f"{csv_path}: {e}") from e

    frame.columns = [c.strip() for c in frame.columns]
    required = NUMERIC_COLUMNS + [nominal_column, target_column]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise DataParseError(f"{csv_path}: missing column(s) {', '.join(missing)}")

    frame = frame[required].apply(lambda col: col.str.strip())
    complete = ~(frame == "").any(axis=1)
    dropped = int((~complete).sum())
    frame = frame[complete]

    value_columns = NUMERIC_COLUMNS + [target_column]
    values = frame[value_columns].apply(pd.to_numeric, errors="coerce")
    numeric = values.to_numpy(dtype=np.float64)
    bad = ~np.isfinite(numeric)
    unknown = ~frame[nominal_column].isin(categories).to_numpy()
    problems = bad.any(axis=1) | unknown
    if problems.any():
        row = int(np.argmax(problems))
        line = int(frame.index[row]) + FIRST_DATA_LINE
        if bad[row].any():
            column = value_columns[int(np.argmax(bad[row]))]
            raise CsvFieldError(
                f"{csv_path}: non-numeric value '{frame[column].iloc[row]}' in column '{column}'", line
            )
        raise CsvFieldError(
            f"{csv_path}: unknown {nominal_column} category '{frame[nominal_column].iloc[row]}'", line
        )

    nominal = frame[nominal_column].to_numpy()
    one_hot = (nominal[:, None] == np.asarray(categories, dtype=object)[None, :]).astype(np.float64)
    features = np.concatenate([numeric[:, :-1], one_hot], axis=1)
    names = NUMERIC_COLUMNS + [f"{nominal_column}={c}" for c in categories]

    if dropped:
        logger.info(f"{csv_path}: dropped {dropped} row(s) with empty fields")
    logger.info(f"Loaded {features.shape[0]} housing rows with {features.shape[1]} features")

    dataset = Dataset(features=features, labels=numeric[:, -1], task="regression", feature_names=names)
    if normalize_features:
        stats = fit_stats(
            dataset,
            columns=np.arange(len(NUMERIC_COLUMNS)),
            standardize_target=True,
            fitted_on="all",
        )
        dataset = normalize(dataset, stats)
    return dataset
