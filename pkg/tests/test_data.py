import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression

from swarmtune import (
    Dataset,
    auc,
    class_weights,
    load_csv,
    smote,
    synth_generate,
    write_csv,
    zscore_apply,
    zscore_fit,
)
from swarmtune.errors import (
    CannotOversampleError,
    IngestionError,
    InvalidDataError,
    InvalidWeightsError,
)


def small_dataset(features, labels, subjects):
    return Dataset(
        features=np.asarray(features, dtype=float),
        labels=np.asarray(labels),
        subject_ids=np.asarray(subjects, dtype=object),
    )


class TestDatasetInvariants:
    def test_row_count_mismatch_rejected(self):
        with pytest.raises(InvalidDataError):
            small_dataset([[1.0, 2.0]], [0, 1], ["a"])

    def test_non_finite_features_rejected(self):
        with pytest.raises(InvalidDataError):
            small_dataset([[1.0], [np.inf]], [0, 1], ["a", "b"])

    def test_non_binary_labels_rejected(self):
        with pytest.raises(InvalidDataError):
            small_dataset([[1.0], [2.0]], [0, 2], ["a", "b"])

    def test_mixed_subject_labels_detected(self):
        ds = small_dataset([[1.0], [2.0]], [0, 1], ["a", "a"])
        with pytest.raises(InvalidDataError):
            ds.subject_labels()


class TestCsv:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,label,f1,f2\na,1,0.5,1.5\na,1,0.25,2.5\nb,0,0.75,3.5\n")
        ds = load_csv(path)
        assert ds.n_rows == 3 and ds.n_features == 2
        assert ds.feature_names == ("f1", "f2")
        assert ds.labels.tolist() == [1, 1, 0]

    def test_non_binary_label_names_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,label,f1\na,1,0.5\nb,2,0.5\n")
        with pytest.raises(IngestionError, match="row 3"):
            load_csv(path)

    def test_unparseable_label_names_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,label,f1\na,1,0.5\nb,yes,0.5\n")
        with pytest.raises(IngestionError, match="row 3"):
            load_csv(path)

    def test_duplicate_feature_header_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,label,f1,f1\na,1,0.5,0.5\n")
        with pytest.raises(IngestionError, match="duplicated"):
            load_csv(path)

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,f1\na,0.5\n")
        with pytest.raises(IngestionError, match="label"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(IngestionError, match="empty"):
            load_csv(path)

    def test_non_finite_feature_names_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("subject,label,f1\na,1,0.5\nb,0,nan\n")
        with pytest.raises(IngestionError, match="row 3"):
            load_csv(path)

    def test_write_then_load_roundtrip(self, tmp_path):
        ds = synth_generate(n_subjects=4, windows_per_subject=3, n_features=5,
                            n_informative=2, seed=3)
        path = tmp_path / "round.csv"
        write_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.labels, ds.labels)
        assert back.subject_ids.tolist() == ds.subject_ids.tolist()


class TestZscore:
    def test_train_split_standardizes_itself(self):
        rng = np.random.default_rng(0)
        x = rng.normal(3.0, 2.5, size=(200, 4))
        stats = zscore_fit(x)
        z = zscore_apply(stats, x)
        assert np.all(np.abs(z.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(z.std(axis=0) - 1.0) < 1e-9)

    def test_constant_feature_maps_to_zero_and_flagged(self):
        x = np.column_stack([np.ones(10), np.arange(10.0)])
        stats = zscore_fit(x)
        assert stats.constant.tolist() == [True, False]
        z = zscore_apply(stats, x)
        assert np.all(z[:, 0] == 0.0)

    def test_shifted_validation_keeps_nonzero_mean(self):
        rng = np.random.default_rng(1)
        train = rng.normal(0.0, 1.0, size=(500, 3))
        offset = 2.0  # documented distribution shift
        val = rng.normal(offset, 1.0, size=(500, 3))
        stats = zscore_fit(train)
        z_val = zscore_apply(stats, val)
        assert np.all(z_val.mean(axis=0) > 1.0)

    def test_stats_are_pure_function_of_train(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(50, 3))
        a, b = zscore_fit(x.copy()), zscore_fit(x.copy())
        assert np.array_equal(a.mean, b.mean) and np.array_equal(a.sd, b.sd)


class TestClassWeights:
    def test_imbalanced_example(self):
        w = class_weights(np.array([0] * 8 + [1] * 2))
        assert w[0] == pytest.approx(0.625)
        assert w[1] == pytest.approx(2.5)

    def test_balanced_labels_give_unit_weights(self):
        w = class_weights(np.array([0, 1, 0, 1]))
        assert w.tolist() == [1.0, 1.0]

    def test_weighted_count_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            labels = rng.integers(0, 2, size=int(rng.integers(2, 100)))
            if labels.sum() in (0, labels.size):
                continue
            w = class_weights(labels)
            assert np.sum(w[labels]) == pytest.approx(labels.size, rel=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(InvalidWeightsError):
            class_weights(np.ones(5, dtype=int))


class TestSmote:
    def two_point_minority(self):
        feats = [[0.0, 0.0], [2.0, 2.0]] + [[10.0 + i, -i] for i in range(8)]
        labels = [1, 1] + [0] * 8
        subjects = ["m1", "m2"] + [f"n{i}" for i in range(8)]
        return small_dataset(feats, labels, subjects)

    def test_synthetic_point_on_segment(self):
        ds = self.two_point_minority()
        out = smote(ds, k=1, target_ratio=3 / 8, seed=0)
        assert out.n_rows == ds.n_rows + 1
        new = out.features[-1]
        assert new[0] == pytest.approx(new[1], abs=1e-12)  # segment is the diagonal
        assert 0.0 <= new[0] <= 2.0
        assert out.labels[-1] == 1
        assert out.synthetic[-1] and not out.synthetic[:-1].any()
        assert out.subject_ids[-1] in ("m1", "m2")

    def test_target_already_met_is_noop(self):
        ds = self.two_point_minority()
        out = smote(ds, k=1, target_ratio=0.25, seed=0)
        assert out is ds

    def test_ninety_ten_reaches_parity(self):
        rng = np.random.default_rng(4)
        feats = rng.normal(size=(100, 3))
        labels = np.array([0] * 90 + [1] * 10)
        subjects = np.array([f"s{i}" for i in range(100)], dtype=object)
        ds = Dataset(features=feats, labels=labels, subject_ids=subjects)
        out = smote(ds, k=5, target_ratio=1.0, seed=1)
        assert int((out.labels == 1).sum()) == 90
        assert int((out.labels == 0).sum()) == 90

    def test_minority_singleton_rejected(self):
        ds = small_dataset([[0.0], [1.0], [2.0]], [1, 0, 0], ["a", "b", "c"])
        with pytest.raises(CannotOversampleError):
            smote(ds, k=1, target_ratio=1.0, seed=0)

    def test_synthetic_rows_between_parents_coordinatewise(self):
        rng = np.random.default_rng(5)
        feats = np.vstack([rng.normal(size=(6, 4)), rng.normal(5, 1, size=(30, 4))])
        labels = np.array([1] * 6 + [0] * 30)
        subjects = np.array([f"s{i}" for i in range(36)], dtype=object)
        ds = Dataset(features=feats, labels=labels, subject_ids=subjects)
        out = smote(ds, k=3, target_ratio=1.0, seed=6)
        minority = feats[:6]
        lo, hi = minority.min(axis=0), minority.max(axis=0)
        synth_rows = out.features[out.synthetic]
        assert len(synth_rows) == 24
        assert np.all(synth_rows >= lo - 1e-12) and np.all(synth_rows <= hi + 1e-12)


class TestSynthGenerator:
    def test_rows_inherit_subject_label(self):
        ds = synth_generate(n_subjects=6, windows_per_subject=4, n_features=3,
                            n_informative=1, seed=0)
        for s in ds.subjects():
            rows = ds.split_by_subjects({s})
            assert len(set(rows.labels.tolist())) == 1

    def test_determinism_identical_bytes(self):
        a = synth_generate(n_subjects=5, windows_per_subject=3, n_features=4,
                           n_informative=2, seed=11)
        b = synth_generate(n_subjects=5, windows_per_subject=3, n_features=4,
                           n_informative=2, seed=11)
        assert a.features.tobytes() == b.features.tobytes()
        assert a.labels.tobytes() == b.labels.tobytes()
        assert a.subject_ids.tolist() == b.subject_ids.tolist()

    def test_informative_features_named(self):
        ds = synth_generate(n_subjects=4, windows_per_subject=2, n_features=5,
                            n_informative=2, seed=1)
        assert ds.feature_names[:2] == ("inf_0", "inf_1")
        assert all(n.startswith("noise_") for n in ds.feature_names[2:])

    def test_zero_separation_has_no_signal(self):
        # informative-sum scorer: expected AUC 0.5 when class_sep = 0
        aucs = []
        for seed in range(20):
            ds = synth_generate(n_subjects=12, windows_per_subject=8, n_features=6,
                                n_informative=2, class_sep=0.0, seed=seed)
            scores = ds.features[:, :2].sum(axis=1)
            aucs.append(auc(scores, ds.labels))
        assert abs(np.mean(aucs) - 0.5) <= 0.05

    def test_wide_separation_is_linearly_separable(self):
        # class_sep at 4x the total noise sd; logistic oracle on held-out subjects
        ds = synth_generate(n_subjects=20, windows_per_subject=10, n_features=6,
                            n_informative=2, class_sep=4.5, subject_effect_sd=0.5,
                            seed=2)
        subject_list = ds.subjects()
        train = ds.split_by_subjects(set(subject_list[:14]))
        test = ds.split_by_subjects(set(subject_list[14:]))
        clf = LogisticRegression(max_iter=1000).fit(train.features, train.labels)
        preds = clf.predict(test.features)
        tp = np.sum((preds == 1) & (test.labels == 1))
        fp = np.sum((preds == 1) & (test.labels == 0))
        fn = np.sum((preds == 0) & (test.labels == 1))
        f1 = 2 * tp / (2 * tp + fp + fn)
        assert f1 >= 0.95

    def test_invalid_fractions_rejected(self):
        with pytest.raises(InvalidDataError):
            synth_generate(positive_fraction=0.0)
        with pytest.raises(InvalidDataError):
            synth_generate(n_features=3, n_informative=4)
