import numpy as np
import pytest

from aafv.core.errors import DataError, DimensionMismatchError
from aafv.data import normalize
from aafv.data.csvio import load_csv, write_csv, write_dataset
from aafv.data.datasets import LabeledDataset, SealedLabels, UnlabeledDataset
from aafv.data.normalize import zscore_apply, zscore_fit, zscore_invert
from aafv.data.prepare import normalize_split
from aafv.data.split import shuffled_indices, split, split_indices
from aafv.data.synth import client_positive_rates, part_sizes, synth_biased_shards
from aafv.models import Hyperparameters, LogisticRegression
from aafv.schemas.schemas import SplitPlan, SynthSpec


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_header_and_named_label(self, tmp_path):
        path = _write(tmp_path, "a,b,Outcome\n1,2,0\n3.5,-4,1\n")
        data = load_csv(path, "Outcome")
        np.testing.assert_array_equal(data.features, [[1.0, 2.0], [3.5, -4.0]])
        np.testing.assert_array_equal(data.labels, [0, 1])

    def test_headerless_index_label(self, tmp_path):
        path = _write(tmp_path, "0,1,2\n1,3,4\n")
        data = load_csv(path, 0)
        np.testing.assert_array_equal(data.features, [[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(data.labels, [0, 1])

    def test_label_column_removed_from_middle(self, tmp_path):
        path = _write(tmp_path, "x,y,z\n1,1,7\n2,0,8\n")
        data = load_csv(path, "y")
        assert data.cols == 2
        np.testing.assert_array_equal(data.features[:, 1], [7.0, 8.0])

    def test_short_row_reports_row_number(self, tmp_path):
        path = _write(tmp_path, "a,b,label\n1,2,0\n3,1\n")
        with pytest.raises(DataError) as info:
            load_csv(path, "label")
        assert info.value.row == 3

    def test_non_numeric_row(self, tmp_path):
        path = _write(tmp_path, "1,2,0\n1,abc,1\n")
        with pytest.raises(DataError) as info:
            load_csv(path, 2)
        assert info.value.row == 2

    def test_label_outside_binary(self, tmp_path):
        path = _write(tmp_path, "1,2,0\n1,2,2\n")
        with pytest.raises(DataError) as info:
            load_csv(path, 2)
        assert info.value.row == 2

    def test_empty_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(_write(tmp_path, ""), 0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv", 0)

    def test_unknown_label_name(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(_write(tmp_path, "a,b\n1,0\n"), "Outcome")

    def test_label_index_out_of_range(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(_write(tmp_path, "1,0\n2,1\n"), 5)

    def test_text_in_first_data_row_is_not_a_header(self, tmp_path):
        path = _write(tmp_path, "1,abc,0\n2,3,1\n")
        with pytest.raises(DataError) as info:
            load_csv(path, 2)
        assert info.value.row == 1

    def test_diabetes_layout(self, tmp_path):
        rng = np.random.default_rng(12)
        header = "Pregnancies,Glucose,BloodPressure,SkinThickness,Insulin,BMI,DiabetesPedigreeFunction,Age,Outcome"
        rows = [header]
        for i in range(768):
            counts = rng.integers(0, 200, 5)
            bmi, pedigree = round(float(rng.uniform(18, 60)), 1), round(float(rng.uniform(0.08, 2.4)), 3)
            age, outcome = int(rng.integers(21, 81)), i % 3 == 0
            rows.append(",".join(map(str, [*counts, bmi, pedigree, age, int(outcome)])))
        path = _write(tmp_path, "\n".join(rows) + "\n", "diabetes.csv")
        data = load_csv(path, "Outcome")
        assert (data.rows, data.cols) == (768, 8)
        assert int(data.labels.sum()) == 256
        assert data.features[0, 5] == float(rows[1].split(",")[5])

    def test_written_dataset_loads_back_exactly(self, tmp_path):
        rng = np.random.default_rng(0)
        features = rng.standard_normal((20, 3))
        labels = rng.integers(0, 2, 20)
        path = write_dataset(tmp_path / "out.csv", LabeledDataset(features, labels))
        loaded = load_csv(path, "label")
        np.testing.assert_array_equal(loaded.features, features)
        np.testing.assert_array_equal(loaded.labels, labels)

    def test_extreme_values_load_back_exactly(self, tmp_path):
        features = np.array([[0.1, 1e-300, -2.2250738585072014e-308], [1.0000000000000002, 123456789.12345679, -0.3]])
        path = write_dataset(tmp_path / "edge.csv", LabeledDataset(features, [0, 1]))
        np.testing.assert_array_equal(load_csv(path, "label").features, features)

    def test_write_without_labels(self, tmp_path):
        path = write_csv(tmp_path / "pool.csv", np.ones((2, 3)))
        assert path.read_text(encoding="utf-8").splitlines()[0] == "x0,x1,x2"


class TestDatasets:
    def test_datasets_are_read_only_without_touching_the_caller(self):
        features = np.zeros((3, 2))
        data = LabeledDataset(features, [0, 1, 0])
        assert features.flags.writeable
        with pytest.raises(ValueError):
            data.features[0, 0] = 1.0

    def test_nan_rejected(self):
        with pytest.raises(DataError):
            LabeledDataset([[np.nan, 1.0]], [0])

    def test_label_length_mismatch(self):
        with pytest.raises(DataError):
            LabeledDataset(np.zeros((3, 2)), [0, 1])

    def test_concat_checks_dimensions(self):
        a = LabeledDataset(np.zeros((2, 2)), [0, 1])
        b = LabeledDataset(np.zeros((2, 3)), [0, 1])
        with pytest.raises(DimensionMismatchError):
            LabeledDataset.concat([a, b])

    def test_sealed_labels_do_not_leak_through_repr(self):
        sealed = SealedLabels(np.array([1, 0, 1]))
        assert "1, 0" not in repr(sealed)
        pool = UnlabeledDataset(np.zeros((3, 2)), sealed=sealed)
        assert "sealed" not in repr(pool)
        np.testing.assert_array_equal(pool.sealed.reveal(), [1, 0, 1])


class TestZscore:
    def test_columns_standardized(self):
        rng = np.random.default_rng(1)
        data = rng.normal(5.0, 3.0, (200, 4))
        out = zscore_apply(data, zscore_fit(data))
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-12)

    def test_constant_column_becomes_zero(self):
        data = np.array([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]])
        stats = zscore_fit(data)
        out = zscore_apply(data, stats)
        assert out.shape == (3, 2)
        np.testing.assert_array_equal(out[:, 1], 0.0)
        assert stats.std[1] == 1.0

    def test_invert(self):
        rng = np.random.default_rng(2)
        data = rng.standard_normal((10, 3)) * 4 + 1
        stats = zscore_fit(data)
        np.testing.assert_allclose(zscore_invert(zscore_apply(data, stats), stats), data)

    def test_needs_two_rows(self):
        with pytest.raises(DataError):
            zscore_fit(np.ones((1, 3)))

    def test_dimension_mismatch(self):
        stats = zscore_fit(np.random.default_rng(0).standard_normal((5, 3)))
        with pytest.raises(DimensionMismatchError):
            zscore_apply(np.zeros((2, 4)), stats)


class TestSplit:
    def _data(self, n=100, cols=3):
        rng = np.random.default_rng(3)
        features = np.column_stack([np.arange(n, dtype=float), rng.standard_normal((n, cols - 1))])
        return LabeledDataset(features, rng.integers(0, 2, n))

    def test_parts_are_disjoint_and_sized(self):
        plan = SplitPlan(test_count=20, unlabeled_count=15, client_counts=[20, 20, 20], shuffle_seed=5)
        parts = split_indices(100, plan)
        assert [len(p) for p in parts] == [20, 15, 20, 20, 20]
        combined = np.concatenate(parts)
        assert len(set(combined.tolist())) == combined.size

    def test_split_seals_public_labels(self):
        data = self._data()
        plan = SplitPlan(test_count=20, unlabeled_count=15, client_counts=[20, 20, 20], shuffle_seed=5)
        test, unlabeled, clients = split(data, plan)
        assert test.rows == 20
        assert unlabeled.rows == 15
        assert [c.rows for c in clients] == [20, 20, 20]
        rows = unlabeled.features[:, 0].astype(int)
        np.testing.assert_array_equal(unlabeled.sealed.reveal(), data.labels[rows])

    def test_same_seed_same_split(self):
        plan = SplitPlan(test_count=10, unlabeled_count=10, client_counts=[10, 10], shuffle_seed=9)
        a = split_indices(50, plan)
        b = split_indices(50, plan)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_different_seeds_differ(self):
        assert not np.array_equal(shuffled_indices(50, 1), shuffled_indices(50, 2))

    def test_shuffle_is_a_permutation(self):
        order = shuffled_indices(200, 17)
        np.testing.assert_array_equal(np.sort(order), np.arange(200))

    def test_plan_larger_than_dataset(self):
        plan = SplitPlan(test_count=60, unlabeled_count=30, client_counts=[20], shuffle_seed=0)
        with pytest.raises(DataError):
            split(self._data(), plan)


class TestSynth:
    def test_default_part_sizes(self):
        n_test, n_unlabeled, clients = part_sizes(SynthSpec())
        assert (n_test, n_unlabeled) == (600, 480)
        assert clients == [640, 640, 640]

    def test_shapes_and_client_count(self):
        parts = synth_biased_shards(SynthSpec(n_samples=400, n_features=6, n_clients=5, seed=3))
        assert len(parts.clients) == 5
        assert all(c.cols == 6 for c in parts.clients)
        assert parts.unlabeled.sealed is not None
        total = parts.test.rows + parts.unlabeled.rows + sum(c.rows for c in parts.clients)
        assert total == 400

    def test_same_seed_identical(self):
        spec = SynthSpec(n_samples=3000, n_features=50, n_clients=3, bias_strength=0.5, seed=7)
        a, b = synth_biased_shards(spec), synth_biased_shards(spec)
        np.testing.assert_array_equal(a.test.features, b.test.features)
        np.testing.assert_array_equal(a.unlabeled.features, b.unlabeled.features)
        for x, y in zip(a.clients, b.clients):
            np.testing.assert_array_equal(x.features, y.features)
            np.testing.assert_array_equal(x.labels, y.labels)

    def test_positive_rates_per_client(self):
        assert client_positive_rates(SynthSpec()) == pytest.approx([0.9, 0.5, 0.1])
        five = client_positive_rates(SynthSpec(n_clients=5, bias_strength=1.0))
        assert five == pytest.approx([1.0, 0.75, 0.5, 0.25, 0.0])

    def test_client_shards_are_tilted(self):
        parts = synth_biased_shards(SynthSpec(seed=4))
        rates = [float(c.labels.mean()) for c in parts.clients]
        assert rates == pytest.approx([0.9, 0.5, 0.1], abs=1e-2)
        # test set keeps the global balance
        assert abs(float(parts.test.labels.mean()) - 0.5) < 0.06

    def test_zero_bias_gives_identical_client_distributions(self):
        spec = SynthSpec(n_samples=6000, n_features=5, bias_strength=0.0, seed=8)
        assert client_positive_rates(spec) == [0.5, 0.5, 0.5]
        parts = synth_biased_shards(spec)
        means = np.array([c.features.mean(axis=0) for c in parts.clients])
        stds = np.array([c.features.std(axis=0) for c in parts.clients])
        # 1280 standard-normal rows per shard
        np.testing.assert_allclose(means, 0.0, atol=0.12)
        np.testing.assert_allclose(stds, 1.0, atol=0.08)
        assert [int(c.labels.sum()) for c in parts.clients] == [640, 640, 640]

    def test_pooled_clients_train_an_accurate_logistic_model(self):
        raw = synth_biased_shards(SynthSpec())
        parts, _ = normalize_split(raw)
        pooled = LabeledDataset.concat(list(parts.clients))
        assert abs(float(pooled.labels.mean()) - 0.5) < 0.01
        assert 0.4 < float(parts.test.labels.mean()) < 0.6
        learner = LogisticRegression(pooled.cols, Hyperparameters(learning_rate=0.05)).initialize(
            np.random.default_rng(0)
        )
        learner.fit(pooled, 50, np.random.default_rng(1))
        accuracy = np.mean(learner.predict_label(parts.test.features) == parts.test.labels)
        assert accuracy >= 0.85

    def test_bias_above_one_rejected(self):
        with pytest.raises(ValueError):
            SynthSpec(bias_strength=1.5)

    def test_fractions_validated(self):
        with pytest.raises(ValueError):
            SynthSpec(test_fraction=0.6, unlabeled_fraction=0.5)


class TestNormalizeSplit:
    def test_fit_once_on_pooled_clients(self, monkeypatch):
        calls = []
        original = normalize.zscore_fit

        def counting(data):
            calls.append(data.shape)
            return original(data)

        monkeypatch.setattr(normalize, "zscore_fit", counting)
        raw = synth_biased_shards(SynthSpec(n_samples=240, n_features=4, seed=11))
        parts, stats = normalize_split(raw)
        assert len(calls) == 1
        assert calls[0][0] == sum(c.rows for c in raw.clients)
        pooled = np.concatenate([c.features for c in parts.clients])
        np.testing.assert_allclose(pooled.mean(axis=0), 0.0, atol=1e-12)
        assert parts.unlabeled.sealed is raw.unlabeled.sealed
