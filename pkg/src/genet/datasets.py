"""Dataset container, CSV/binary loaders, and per-class split protocols.

A dataset holds one flattened grayscale image per column (raw pixel values
as float64) plus integer class labels. Two on-disk formats are supported:

* CSV: first line is the metadata header ``label,<height>,<width>``; every
  following row is ``label, p1, ..., pm`` with ``m = height*width``.
* binary: magic ``GEDS\\0``, u16 version, u32 m/N/height/width, then the
  column-major float64 matrix and N u32 labels, all little-endian. The
  layout is documented in docs/file-formats.md and round-trips bit-exactly.

Splits draw a per-class subset of fixed size for one side (train or test)
and put the remainder on the other side; the class RNG is seeded from
(seed, repeat index, class id), so any (dataset, protocol, repeat) triple
always produces the same partition.
"""

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ClassTooSmallError, FormatError, NonFiniteError
from .graphs import LabelSet

DATASET_MAGIC = b"GEDS\x00"
DATASET_VERSION = 1

TRAIN_PER_CLASS = "train_per_class"
TEST_PER_CLASS = "test_per_class"


@dataclass(frozen=True)
class Dataset:
    """Column-sample image matrix with labels and image geometry."""

    X: np.ndarray
    labels: LabelSet
    image_height: int
    image_width: int
    name: str = ""

    def __post_init__(self):
        X = self.X
        if X.ndim != 2:
            raise FormatError("dataset matrix must be 2-D")
        if X.shape[1] != len(self.labels):
            raise FormatError("sample count and label count differ")
        if self.image_height * self.image_width != X.shape[0]:
            raise FormatError(
                f"height*width = {self.image_height * self.image_width}"
                f" does not match feature count {X.shape[0]}"
            )
        if not np.all(np.isfinite(X)):
            raise NonFiniteError("dataset contains NaN or Inf")
        if X.size and X.min() < 0.0:
            raise FormatError("pixel values must be >= 0")

    @property
    def n_samples(self):
        return self.X.shape[1]

    @property
    def n_features(self):
        return self.X.shape[0]

    def subset(self, indices, name=None):
        indices = np.asarray(indices)
        return Dataset(
            X=np.ascontiguousarray(self.X[:, indices]),
            labels=LabelSet(self.labels.labels[indices]),
            image_height=self.image_height,
            image_width=self.image_width,
            name=self.name if name is None else name,
        )


@dataclass(frozen=True)
class SplitProtocol:
    """Per-class split: k samples to the designated side, rest to the other."""

    mode: str  # TRAIN_PER_CLASS or TEST_PER_CLASS
    k: int
    seed: int = 0
    repeats: int = 1

    def __post_init__(self):
        if self.mode not in (TRAIN_PER_CLASS, TEST_PER_CLASS):
            raise ValueError(f"unknown split mode {self.mode!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


def _name_from_path(path):
    name = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] if "." in name else name


def load_csv(path):
    """Read a dataset from the CSV layout described in the module docs."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("empty dataset file") from None
        if len(header) != 3 or header[0].strip().lower() != "label":
            raise FormatError("first line must be the header 'label,<h>,<w>'")
        try:
            height, width = int(header[1]), int(header[2])
        except ValueError as exc:
            raise FormatError(f"bad header dimensions {header[1:]!r}") from exc
        m = height * width
        raw_labels = []
        columns = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != m + 1:
                raise FormatError(
                    f"line {lineno}: expected 1 label + {m} pixels, got {len(row)} fields"
                )
            try:
                raw_labels.append(int(row[0]))
                columns.append(np.array([float(v) for v in row[1:]]))
            except ValueError as exc:
                raise FormatError(f"line {lineno}: non-numeric value") from exc
    if not columns:
        raise FormatError("dataset file has no sample rows")
    X = np.ascontiguousarray(np.stack(columns, axis=1))
    return Dataset(
        X=X,
        labels=LabelSet.from_raw(np.array(raw_labels)),
        image_height=height,
        image_width=width,
        name=_name_from_path(path),
    )


def save_csv(dataset: Dataset, path):
    """Write the CSV layout; floats use repr so a round trip is exact."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", dataset.image_height, dataset.image_width])
        for j in range(dataset.n_samples):
            row = [int(dataset.labels.labels[j])]
            row.extend(repr(float(v)) for v in dataset.X[:, j])
            writer.writerow(row)


def load_binary(path):
    """Read the GEDS binary container."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(DATASET_MAGIC) + 2:
        raise FormatError("dataset file truncated")
    if data[: len(DATASET_MAGIC)] != DATASET_MAGIC:
        raise FormatError("bad dataset magic")
    offset = len(DATASET_MAGIC)
    (version,) = struct.unpack_from("<H", data, offset)
    offset += 2
    if version != DATASET_VERSION:
        raise FormatError(f"unsupported dataset version {version}")
    if len(data) < offset + 16:
        raise FormatError("dataset file truncated")
    m, n, height, width = struct.unpack_from("<IIII", data, offset)
    offset += 16
    expected = offset + 8 * m * n + 4 * n
    if len(data) != expected:
        raise FormatError(
            f"dataset file has {len(data)} bytes, layout implies {expected}"
        )
    X = np.frombuffer(data, dtype="<f8", count=m * n, offset=offset)
    X = X.reshape((m, n), order="F").copy(order="C")
    offset += 8 * m * n
    labels = np.frombuffer(data, dtype="<u4", count=n, offset=offset).astype(np.int64)
    return Dataset(
        X=X,
        labels=LabelSet.from_raw(labels),
        image_height=height,
        image_width=width,
        name=_name_from_path(path),
    )


def save_binary(dataset: Dataset, path):
    """Write the GEDS binary container (bit-exact round trip)."""
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC)
        fh.write(struct.pack("<H", DATASET_VERSION))
        fh.write(
            struct.pack(
                "<IIII",
                dataset.n_features,
                dataset.n_samples,
                dataset.image_height,
                dataset.image_width,
            )
        )
        fh.write(np.asfortranarray(dataset.X, dtype="<f8").tobytes(order="F"))
        fh.write(dataset.labels.labels.astype("<u4").tobytes())


def load_dataset(path, fmt=None):
    """Load a dataset, inferring the format from the suffix when not given."""
    if fmt is None:
        fmt = "csv" if str(path).lower().endswith(".csv") else "bin"
    if fmt == "csv":
        return load_csv(path)
    if fmt == "bin":
        return load_binary(path)
    raise ValueError(f"unknown dataset format {fmt!r}")


def split(dataset: Dataset, protocol: SplitProtocol, repeat_index):
    """Partition a dataset per class into (train, test).

    For every class, a seeded uniform subset of size ``protocol.k`` goes to
    the side named by ``protocol.mode`` and the remainder to the other side;
    sample order within each side follows the original dataset. Every class
    must keep at least one sample on each side.
    """
    if repeat_index < 0:
        raise ValueError("repeat_index must be >= 0")
    labels = dataset.labels
    chosen_mask = np.zeros(dataset.n_samples, dtype=bool)
    for c in range(1, labels.n_classes + 1):
        idx = labels.class_indices(c)
        if idx.size <= protocol.k:
            raise ClassTooSmallError(
                f"class {c} has {idx.size} samples; cannot reserve {protocol.k}"
                f" and keep the other side non-empty"
            )
        rng = np.random.default_rng([protocol.seed, repeat_index, c])
        take = rng.permutation(idx.size)[: protocol.k]
        chosen_mask[idx[take]] = True
    if protocol.mode == TRAIN_PER_CLASS:
        train_mask = chosen_mask
    else:
        train_mask = ~chosen_mask
    train = dataset.subset(np.flatnonzero(train_mask))
    test = dataset.subset(np.flatnonzero(~train_mask))
    return train, test
