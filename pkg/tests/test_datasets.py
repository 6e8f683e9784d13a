import numpy as np
import pytest

from genet import oracle
from genet.datasets import (
    Dataset,
    SplitProtocol,
    TEST_PER_CLASS,
    TRAIN_PER_CLASS,
    load_binary,
    load_csv,
    load_dataset,
    save_binary,
    save_csv,
    split,
)
from genet.errors import ClassTooSmallError, FormatError
from genet.graphs import LabelSet


@pytest.fixture()
def small_dataset():
    rng = np.random.default_rng(91)
    X = rng.uniform(0.0, 255.0, size=(4, 6))
    labels = LabelSet(np.array([1, 1, 2, 2, 3, 3]))
    return Dataset(X=X, labels=labels, image_height=2, image_width=2,
                   name="small")


class TestCsv:
    def test_two_row_file(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("label,2,2\n5,0,1,2,3\n9,4,5,6,7\n")
        ds = load_csv(path)
        assert ds.n_features == 4 and ds.n_samples == 2
        assert list(ds.labels.labels) == [1, 2]
        assert np.allclose(ds.X[:, 0], [0, 1, 2, 3])
        assert ds.name == "tiny"

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,2,2\n5,0,1,2\n")
        with pytest.raises(FormatError):
            load_csv(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,1,2\n5,0,zebra\n")
        with pytest.raises(FormatError):
            load_csv(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("5,0,1,2,3\n")
        with pytest.raises(FormatError):
            load_csv(path)

    def test_round_trip_exact(self, tmp_path, small_dataset):
        path = tmp_path / "ds.csv"
        save_csv(small_dataset, path)
        loaded = load_csv(path)
        assert np.array_equal(loaded.X, small_dataset.X)
        assert np.array_equal(loaded.labels.labels, small_dataset.labels.labels)
        assert (loaded.image_height, loaded.image_width) == (2, 2)

    def test_labels_remapped_first_appearance_no_reorder(self, tmp_path):
        path = tmp_path / "remap.csv"
        path.write_text("label,1,1\n30,7\n10,8\n30,9\n20,11\n")
        ds = load_csv(path)
        assert list(ds.labels.labels) == [1, 2, 1, 3]
        assert list(ds.X[0]) == [7.0, 8.0, 9.0, 11.0]


class TestBinary:
    def test_round_trip_bit_exact(self, tmp_path, small_dataset):
        p1 = tmp_path / "a.geds"
        p2 = tmp_path / "b.geds"
        save_binary(small_dataset, p1)
        save_binary(load_binary(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_rejected(self, tmp_path, small_dataset):
        path = tmp_path / "ds.geds"
        save_binary(small_dataset, path)
        data = path.read_bytes()
        path.write_bytes(data[:-5])
        with pytest.raises(FormatError):
            load_binary(path)

    def test_bad_magic_rejected(self, tmp_path, small_dataset):
        path = tmp_path / "ds.geds"
        save_binary(small_dataset, path)
        data = bytearray(path.read_bytes())
        data[0] = ord("X")
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_binary(path)

    def test_cross_format_equality(self, tmp_path, small_dataset):
        pc = tmp_path / "ds.csv"
        pb = tmp_path / "ds.geds"
        save_csv(small_dataset, pc)
        save_binary(small_dataset, pb)
        from_csv = load_csv(pc)
        from_bin = load_binary(pb)
        assert np.array_equal(from_csv.X, from_bin.X)
        assert np.array_equal(from_csv.labels.labels, from_bin.labels.labels)

    def test_load_dataset_infers_format(self, tmp_path, small_dataset):
        pc = tmp_path / "ds.csv"
        pb = tmp_path / "ds.geds"
        save_csv(small_dataset, pc)
        save_binary(small_dataset, pb)
        assert load_dataset(pc).n_samples == 6
        assert load_dataset(pb).n_samples == 6


class TestDatasetInvariants:
    def test_feature_count_must_match_geometry(self):
        with pytest.raises(FormatError):
            Dataset(X=np.zeros((5, 2)), labels=LabelSet(np.array([1, 2])),
                    image_height=2, image_width=2)

    def test_negative_values_rejected(self):
        with pytest.raises(FormatError):
            Dataset(X=np.array([[-1.0, 1.0]]), labels=LabelSet(np.array([1, 2])),
                    image_height=1, image_width=1)


class TestSplit:
    def test_orl_shaped_five_five(self):
        ds = oracle.grid_faces_dataset(93, n_classes=40, n_per_class=10)
        protocol = SplitProtocol(TRAIN_PER_CLASS, 5, seed=0)
        train, test = split(ds, protocol, 0)
        assert train.n_samples == 200 and test.n_samples == 200
        assert np.all(train.labels.class_sizes == 5)
        assert np.all(test.labels.class_sizes == 5)

    def test_class_too_small(self):
        X = np.abs(np.random.default_rng(5).standard_normal((2, 3)))
        ds = Dataset(X=X, labels=LabelSet(np.array([1, 2, 2])),
                     image_height=1, image_width=2)
        with pytest.raises(ClassTooSmallError):
            split(ds, SplitProtocol(TEST_PER_CLASS, 1), 0)

    def test_counting_per_class(self):
        ds = oracle.grid_faces_dataset(97, n_classes=5, n_per_class=9)
        protocol = SplitProtocol(TEST_PER_CLASS, 3, seed=11)
        train, test = split(ds, protocol, 2)
        assert np.all(test.labels.class_sizes == 3)
        assert np.all(train.labels.class_sizes == 6)

    def test_partition_exact(self):
        ds = oracle.grid_faces_dataset(101, n_classes=4, n_per_class=6)
        train, test = split(ds, SplitProtocol(TRAIN_PER_CLASS, 2, seed=3), 1)
        combined = np.concatenate([np.sort(train.X[0]), np.sort(test.X[0])])
        assert np.array_equal(np.sort(combined), np.sort(ds.X[0]))
        assert train.n_samples + test.n_samples == ds.n_samples

    def test_deterministic_and_repeat_sensitive(self):
        ds = oracle.grid_faces_dataset(103, n_classes=6, n_per_class=10)
        protocol = SplitProtocol(TRAIN_PER_CLASS, 5, seed=7)
        t1, _ = split(ds, protocol, 0)
        t2, _ = split(ds, protocol, 0)
        t3, _ = split(ds, protocol, 1)
        assert np.array_equal(t1.X, t2.X)
        assert not np.array_equal(t1.X, t3.X)

    def test_order_preserved_within_sides(self):
        ds = oracle.grid_faces_dataset(107, n_classes=3, n_per_class=8)
        marked = Dataset(
            X=np.vstack([ds.X, np.arange(ds.n_samples, dtype=float)[None, :] ]),
            labels=ds.labels, image_height=ds.n_features + 1, image_width=1,
            name=ds.name,
        )
        train, test = split(marked, SplitProtocol(TRAIN_PER_CLASS, 4, seed=1), 0)
        assert np.all(np.diff(train.X[-1]) > 0)
        assert np.all(np.diff(test.X[-1]) > 0)
