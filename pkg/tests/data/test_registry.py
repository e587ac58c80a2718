"""Tests for `data.registry`."""

import pytest

from config import settings
from config.schemas import DatasetSpec, RunConfig
from data.dataset import write_table
from data.ixor import gen_ixor
from data.registry import load_datasets, load_run_datasets, resolve_table_path
from utils.errors import DatasetNotFoundError, UsageError


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "DATA_DIR", str(tmp_path))
    return tmp_path


def run_config(dataset, arch, task="binary"):
    return RunConfig.from_dict({"task": task, "dataset": dataset, "arch": arch})


@pytest.mark.unit
class TestLoadDatasets:
    """DatasetSpec to (train, test)."""

    def test_ixor_sizes(self) -> None:
        train, test = load_datasets(DatasetSpec(kind="ixor", n_train=80, n_test=20, seed=2), "binary")

        assert (len(train), len(test)) == (80, 20)

    def test_table_without_test_file_is_split(self, data_dir) -> None:
        write_table(gen_ixor(50, 1), str(data_dir / "ixor.csv"))

        train, test = load_datasets(DatasetSpec(kind="table", train_table="ixor"), "binary")

        assert (len(train), len(test)) == (40, 10)

    def test_source_files_logged(self, data_dir, caplog) -> None:
        write_table(gen_ixor(50, 1), str(data_dir / "ixor.csv"))

        with caplog.at_level("INFO", logger="data.registry"):
            load_datasets(DatasetSpec(kind="table", train_table="ixor"), "binary")
            load_datasets(DatasetSpec(kind="ixor", n_train=8, n_test=2), "binary")

        assert "Dataset 'table' (ixor): 40 train rows" in caplog.text
        assert "Dataset 'ixor' (generated): 8 train rows" in caplog.text

    def test_missing_file_named(self, data_dir) -> None:
        with pytest.raises(DatasetNotFoundError, match="housing.csv"):
            load_datasets(DatasetSpec(kind="cal_housing", csv="housing.csv"), "regression")

    def test_housing_normalized_after_split(self, data_dir, write_housing, housing_lines) -> None:
        write_housing(housing_lines * 2)

        train, test = load_datasets(
            DatasetSpec(kind="cal_housing", csv="housing.csv", normalize_order="after_split"), "regression"
        )

        assert train.stats.fitted_on == "train"
        assert len(train) + len(test) == 12


@pytest.mark.unit
class TestResolveTablePath:
    def test_adds_csv_suffix(self, data_dir) -> None:
        (data_dir / "name.csv").write_text("x1,label\n", encoding="utf-8")

        assert resolve_table_path("name") == str(data_dir / "name.csv")

    def test_missing(self, data_dir) -> None:
        with pytest.raises(DatasetNotFoundError):
            resolve_table_path("nothing")


@pytest.mark.unit
class TestLoadRunDatasets:
    def test_width_mismatch(self) -> None:
        config = run_config({"kind": "ixor", "n_train": 40, "n_test": 10}, [4, 8, 2])

        with pytest.raises(UsageError, match="arch input width 4"):
            load_run_datasets(config)

    def test_task_mismatch(self) -> None:
        config = run_config({"kind": "ixor", "n_train": 40, "n_test": 10}, [3, 8, 1], task="regression")

        with pytest.raises(UsageError):
            load_run_datasets(config)
