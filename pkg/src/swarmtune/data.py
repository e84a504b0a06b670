"""Feature-matrix datasets with subject identity.

Rows are observation windows; every row carries a binary label and the id
of the subject it came from.  Labels are subject-level: all rows of one
subject share the same label, which is what subject-wise cross-validation
presumes.  A synthetic generator with documented ground truth stands in
for restricted clinical corpora.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CannotOversampleError,
    IngestionError,
    InvalidDataError,
    InvalidWeightsError,
)
from .rng import rng_from


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus per-row labels and subject ids."""

    features: np.ndarray
    labels: np.ndarray
    subject_ids: np.ndarray
    feature_names: tuple[str, ...] | None = None
    synthetic: np.ndarray | None = None

    def __post_init__(self) -> None:
        # copy before freezing so caller-owned arrays stay writeable
        feats = np.array(self.features, dtype=float, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        subjects = np.array(self.subject_ids, dtype=object, copy=True)
        if feats.ndim != 2:
            raise InvalidDataError("features must be a 2-d matrix")
        n = feats.shape[0]
        if labels.shape != (n,) or subjects.shape != (n,):
            raise InvalidDataError("row counts of features/labels/subjects disagree")
        if n == 0:
            raise InvalidDataError("dataset is empty")
        if not np.all(np.isfinite(feats)):
            raise InvalidDataError("features contain non-finite values")
        if not np.all((labels == 0) | (labels == 1)):
            raise InvalidDataError("labels must be binary 0/1")
        synth = self.synthetic
        if synth is None:
            synth = np.zeros(n, dtype=bool)
        else:
            synth = np.array(synth, dtype=bool, copy=True)
            if synth.shape != (n,):
                raise InvalidDataError("synthetic flag length mismatch")
        if self.feature_names is not None:
            if len(self.feature_names) != feats.shape[1]:
                raise InvalidDataError("feature_names length mismatch")
            object.__setattr__(self, "feature_names", tuple(self.feature_names))
        feats.setflags(write=False)
        labels.setflags(write=False)
        subjects.setflags(write=False)
        synth.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subject_ids", subjects)
        object.__setattr__(self, "synthetic", synth)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subjects(self) -> list[str]:
        """Distinct subject ids in first-appearance order."""
        seen: dict[str, None] = {}
        for s in self.subject_ids:
            seen.setdefault(s, None)
        return list(seen)

    def subject_labels(self) -> dict[str, int]:
        """Subject-level labels; raises if any subject's rows disagree."""
        out: dict[str, int] = {}
        for s, y in zip(self.subject_ids, self.labels):
            y = int(y)
            if s in out and out[s] != y:
                raise InvalidDataError(f"subject {s!r} carries mixed row labels")
            out[s] = y
        return out

    def rows(self, mask: np.ndarray) -> "Dataset":
        """Row subset (boolean mask or index array)."""
        return Dataset(
            features=self.features[mask],
            labels=self.labels[mask],
            subject_ids=self.subject_ids[mask],
            feature_names=self.feature_names,
            synthetic=self.synthetic[mask],
        )

    def split_by_subjects(self, subject_set) -> "Dataset":
        mask = np.array([s in subject_set for s in self.subject_ids], dtype=bool)
        if not mask.any():
            raise InvalidDataError("subject split selects no rows")
        return self.rows(mask)

    def select_features(self, mask: np.ndarray) -> "Dataset":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.n_features,):
            raise InvalidDataError("feature mask length mismatch")
        if not mask.any():
            raise InvalidDataError("feature mask selects no features")
        names = None
        if self.feature_names is not None:
            names = tuple(n for n, keep in zip(self.feature_names, mask) if keep)
        return Dataset(
            features=self.features[:, mask],
            labels=self.labels,
            subject_ids=self.subject_ids,
            feature_names=names,
            synthetic=self.synthetic,
        )


@dataclass(frozen=True)
class CsvSchema:
    """Column roles for ingestion; every other column is a feature."""

    subject_column: str = "subject"
    label_column: str = "label"


def load_csv(path, schema: CsvSchema | None = None) -> Dataset:
    """Parse a UTF-8 CSV with a header row into a :class:`Dataset`.

    Labels must be literal 0/1; any unparseable or non-finite cell rejects
    the file with an error naming the offending row (1-based, header = 1).
    """
    schema = schema or CsvSchema()
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise IngestionError(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise IngestionError(f"{path}: {exc}") from exc

    header = [h.strip() for h in header]
    for required in (schema.subject_column, schema.label_column):
        if required not in header:
            raise IngestionError(f"{path}: missing required column {required!r}")
    feature_cols = [h for h in header if h not in (schema.subject_column, schema.label_column)]
    if not feature_cols:
        raise IngestionError(f"{path}: no feature columns")
    if len(set(feature_cols)) != len(feature_cols):
        raise IngestionError(f"{path}: duplicated feature column name")
    sub_idx = header.index(schema.subject_column)
    lab_idx = header.index(schema.label_column)
    feat_idx = [i for i, h in enumerate(header) if h not in (schema.subject_column, schema.label_column)]

    subjects: list[str] = []
    labels: list[int] = []
    feats: list[list[float]] = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise IngestionError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
        raw_label = row[lab_idx].strip()
        try:
            lab_val = float(raw_label)
        except ValueError:
            raise IngestionError(
                f"{path}: row {lineno} label {raw_label!r} is not in the binary alphabet"
            ) from None
        if lab_val not in (0.0, 1.0):
            raise IngestionError(
                f"{path}: row {lineno} label {raw_label!r} is not binary 0/1"
            )
        values = []
        for i in feat_idx:
            cell = row[i].strip()
            try:
                v = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: row {lineno} column {header[i]!r} value {cell!r} unparseable"
                ) from None
            if not math.isfinite(v):
                raise IngestionError(
                    f"{path}: row {lineno} column {header[i]!r} value {cell!r} non-finite"
                )
            values.append(v)
        subjects.append(row[sub_idx].strip())
        labels.append(int(lab_val))
        feats.append(values)
    if not feats:
        raise IngestionError(f"{path}: no data rows")
    return Dataset(
        features=np.array(feats, dtype=float),
        labels=np.array(labels),
        subject_ids=np.array(subjects, dtype=object),
        feature_names=tuple(feature_cols),
    )


def write_csv(dataset: Dataset, path, schema: CsvSchema | None = None) -> None:
    """Emit a dataset as CSV in the load_csv layout (full float precision)."""
    schema = schema or CsvSchema()
    names = dataset.feature_names or tuple(f"f{i}" for i in range(dataset.n_features))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([schema.subject_column, schema.label_column, *names])
        for subject, label, row in zip(dataset.subject_ids, dataset.labels, dataset.features):
            writer.writerow([subject, int(label), *(repr(float(v)) for v in row)])


@dataclass(frozen=True)
class NormStats:
    """Per-feature z-score statistics fit on one training split."""

    mean: np.ndarray
    sd: np.ndarray
    constant: np.ndarray  # flags features with zero spread on the fit split


def zscore_fit(train: Dataset | np.ndarray) -> NormStats:
    x = train.features if isinstance(train, Dataset) else np.asarray(train, dtype=float)
    if x.size == 0:
        raise InvalidDataError("cannot fit normalization on an empty split")
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    constant = sd == 0.0
    return NormStats(mean=mean, sd=np.where(constant, 1.0, sd), constant=constant)


def zscore_apply(stats: NormStats, split: Dataset | np.ndarray):
    """(x - mean) / sd per feature; constant features map to 0."""
    if isinstance(split, Dataset):
        z = zscore_apply(stats, split.features)
        return replace(split, features=z)
    x = np.asarray(split, dtype=float)
    z = (x - stats.mean) / stats.sd
    z[:, stats.constant] = 0.0
    return z


def class_weights(labels: np.ndarray) -> np.ndarray:
    """Inverse-frequency weights ``w_c = N / (2 N_c)`` as ``[w_neg, w_pos]``."""
    y = np.asarray(labels)
    n = y.size
    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InvalidWeightsError("class weights need both classes present")
    return np.array([n / (2.0 * n_neg), n / (2.0 * n_pos)])


def smote(train: Dataset, k: int = 5, target_ratio: float = 1.0, seed: int = 0) -> Dataset:
    """Oversample the minority class by segment interpolation.

    New rows are ``x + u * (neighbor - x)`` with ``u ~ U[0, 1]`` and the
    neighbor drawn from the ``k`` nearest minority rows (Euclidean).
    Synthetic rows inherit the source row's subject id and are flagged, so
    fold assignment stays subject-sound when oversampling runs per fold.
    Rows are appended until minority/majority >= ``target_ratio``.
    """
    if k < 1:
        raise CannotOversampleError("k must be >= 1")
    if target_ratio <= 0:
        raise CannotOversampleError("target_ratio must be > 0")
    y = train.labels
    n_pos = int(np.sum(y == 1))
    n_neg = train.n_rows - n_pos
    if n_pos == n_neg:
        minority = 1  # balanced; stopping rule below is already satisfied
    else:
        minority = 1 if n_pos < n_neg else 0
    n_min = n_pos if minority == 1 else n_neg
    n_maj = train.n_rows - n_min
    needed = int(math.ceil(target_ratio * n_maj)) - n_min
    if needed <= 0:
        return train
    if n_min < 2:
        raise CannotOversampleError("minority class needs at least 2 samples")

    rng = rng_from("smote", seed)
    min_idx = np.flatnonzero(y == minority)
    x_min = train.features[min_idx]
    # pairwise distances once; k capped at the available neighbor count
    d2 = np.sum((x_min[:, None, :] - x_min[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    k_eff = min(k, n_min - 1)
    neighbor_ids = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]

    new_rows = np.empty((needed, train.n_features))
    new_subjects = np.empty(needed, dtype=object)
    for j in range(needed):
        i = int(rng.integers(n_min))
        nn = int(neighbor_ids[i, int(rng.integers(k_eff))])
        u = rng.random()
        new_rows[j] = x_min[i] + u * (x_min[nn] - x_min[i])
        new_subjects[j] = train.subject_ids[min_idx[i]]

    return Dataset(
        features=np.vstack([train.features, new_rows]),
        labels=np.concatenate([train.labels, np.full(needed, minority, dtype=np.int64)]),
        subject_ids=np.concatenate([train.subject_ids, new_subjects]),
        feature_names=train.feature_names,
        synthetic=np.concatenate([train.synthetic, np.ones(needed, dtype=bool)]),
    )


def synth_generate(
    n_subjects: int = 40,
    windows_per_subject: int = 20,
    n_features: int = 30,
    n_informative: int = 6,
    class_sep: float = 1.0,
    subject_effect_sd: float = 0.5,
    positive_fraction: float = 0.5,
    seed: int = 0,
) -> Dataset:
    """Subject-structured synthetic binary dataset with known ground truth.

    Construction (all noise unit-variance Gaussian):

    * exactly ``round(positive_fraction * n_subjects)`` subjects are
      positive (clamped so both classes exist); every row of a subject
      carries the subject's label;
    * each subject draws a per-feature latent offset with sd
      ``subject_effect_sd`` shared by all its rows (the within-subject
      correlation that subject-wise splitting must respect);
    * features ``0 .. n_informative-1`` are shifted by ``class_sep`` for
      positive subjects and are the only informative columns; the Bayes
      separator is a threshold on their sum.  Feature names mark them as
      ``inf_*`` versus ``noise_*``.

    With ``class_sep = 0`` no feature carries signal and any classifier's
    expected AUC is 0.5.
    """
    if n_subjects < 2:
        raise InvalidDataError("need at least 2 subjects")
    if windows_per_subject < 1:
        raise InvalidDataError("windows_per_subject must be >= 1")
    if not 1 <= n_informative <= n_features:
        raise InvalidDataError("need 1 <= n_informative <= n_features")
    if not 0.0 < positive_fraction < 1.0:
        raise InvalidDataError("positive_fraction must be inside (0, 1)")
    if class_sep < 0 or subject_effect_sd < 0:
        raise InvalidDataError("class_sep and subject_effect_sd must be >= 0")

    rng = rng_from("synth", seed)
    n_pos = int(round(positive_fraction * n_subjects))
    n_pos = min(max(n_pos, 1), n_subjects - 1)
    subject_label = np.zeros(n_subjects, dtype=np.int64)
    subject_label[rng.permutation(n_subjects)[:n_pos]] = 1

    rows = n_subjects * windows_per_subject
    features = np.empty((rows, n_features))
    labels = np.empty(rows, dtype=np.int64)
    subjects = np.empty(rows, dtype=object)
    width = len(str(n_subjects - 1))
    for s in range(n_subjects):
        offset = rng.normal(0.0, subject_effect_sd, size=n_features)
        noise = rng.normal(0.0, 1.0, size=(windows_per_subject, n_features))
        block = noise + offset
        if subject_label[s] == 1:
            block[:, :n_informative] += class_sep
        sl = slice(s * windows_per_subject, (s + 1) * windows_per_subject)
        features[sl] = block
        labels[sl] = subject_label[s]
        subjects[sl] = f"s{str(s).zfill(width)}"

    names = tuple(
        f"inf_{i}" if i < n_informative else f"noise_{i}" for i in range(n_features)
    )
    return Dataset(
        features=features, labels=labels, subject_ids=subjects, feature_names=names
    )
