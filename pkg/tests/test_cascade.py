import numpy as np
import pytest

from conftest import BLOBS_SEED, max_principal_angle
from genet import cascade, oracle
from genet.cascade import (
    fit_cascade,
    format_pipeline,
    load_model,
    parse_pipeline,
    save_model,
    transform_cascade,
)
from genet.errors import DimensionMismatchError, FormatError, ParseError
from genet.layers import LayerSpec, fit_layer, transform_layer


@pytest.fixture(scope="module")
def blobs():
    return oracle.gaussian_blobs(BLOBS_SEED)


@pytest.fixture(scope="module")
def fitted(blobs):
    X, labels = blobs
    spec = parse_pipeline("PCA+MFA(5,2)")
    return fit_cascade(spec, X, labels, mfa_params=(3, 20)), X


class TestParsePipeline:
    def test_two_layers(self):
        spec = parse_pipeline("PCA+MFA(100,40)")
        assert [ls.kind for ls in spec.layers] == ["PCA", "MFA"]
        assert [ls.out_dim for ls in spec.layers] == [100, 40]
        assert spec.layers[1].k1 is None and spec.layers[1].k2 is None

    def test_three_layers(self):
        spec = parse_pipeline("PCA+MFA+MFA(100,70,40)")
        assert len(spec.layers) == 3

    def test_case_and_whitespace_insensitive(self):
        spec = parse_pipeline("  pca + Mfa ( 100 , 40 ) ")
        assert [ls.kind for ls in spec.layers] == ["PCA", "MFA"]

    def test_arity_mismatch(self):
        with pytest.raises(ParseError):
            parse_pipeline("PCA(10,20)")

    def test_unknown_name(self):
        with pytest.raises(ParseError):
            parse_pipeline("PCA+ICA(10,20)")

    def test_non_positive_dim(self):
        with pytest.raises(ParseError):
            parse_pipeline("PCA(0)")

    def test_missing_dims(self):
        with pytest.raises(ParseError):
            parse_pipeline("PCA")

    def test_format_round_trip(self):
        text = "PCA+MFA+MFA(100,70,40)"
        assert format_pipeline(parse_pipeline(text).layers) == text


class TestFitCascade:
    def test_single_layer_matches_fit_layer(self):
        rng = np.random.default_rng(71)
        X = rng.standard_normal((20, 50))
        model = fit_cascade(parse_pipeline("PCA(5)"), X)
        direct = fit_layer(LayerSpec("PCA", 5), X)
        assert np.array_equal(model.layers[0].projection, direct.projection)
        assert np.array_equal(model.layers[0].mean, direct.mean)

    def test_pca_pca_on_low_rank_equals_single_pca(self):
        X = oracle.rank_deficient_data(73, n_features=20, rank=10, n_samples=50)
        double = fit_cascade(parse_pipeline("PCA+PCA(10,10)"), X)
        single = fit_cascade(parse_pipeline("PCA(10)"), X)
        composed = double.layers[0].projection @ double.layers[1].projection
        assert max_principal_angle(composed, single.layers[0].projection) < 1e-6

    def test_layers_chain_dimensions(self, fitted):
        model, _ = fitted
        assert model.layers[1].in_dim == model.layers[0].out_dim_actual

    def test_supervised_first_layer_warns_not_errors(self, blobs):
        X, labels = blobs
        with pytest.warns(UserWarning, match="supervised"):
            model = fit_cascade(parse_pipeline("LDA+MFA(1,1)"), X, labels,
                                mfa_params=(3, 20))
        assert any("supervised" in w for w in model.warnings)

    def test_error_annotated_with_layer_index(self, blobs):
        X, _ = blobs
        from genet.errors import LabelRequiredError

        with pytest.raises(LabelRequiredError, match=r"layer 2 \(MFA\)"):
            fit_cascade(parse_pipeline("PCA+MFA(5,2)"), X, labels=None,
                        mfa_params=(3, 20))

    def test_fit_report_lists_layers_and_clamps(self, blobs):
        X, labels = blobs
        model = fit_cascade(parse_pipeline("PCA+MFA(5,200)"), X, labels,
                            mfa_params=(3, 20))
        report = model.fit_report
        assert report["pipeline"] == "PCA+MFA(5,200)"
        assert [l["kind"] for l in report["layers"]] == ["PCA", "MFA"]
        assert report["layers"][1]["actual_dim"] < 200
        assert any("clamped" in w for w in report["layers"][1]["warnings"])

    def test_mfa_params_fill_in(self, fitted):
        model, _ = fitted
        assert (model.layers[1].spec.k1, model.layers[1].spec.k2) == (3, 20)


class TestTransformCascade:
    def test_empty_input(self, fitted):
        model, X = fitted
        out = transform_cascade(model, np.zeros((X.shape[0], 0)))
        assert out.shape == (model.out_dim, 0)

    def test_rank_bound(self):
        rng = np.random.default_rng(79)
        X = rng.standard_normal((10, 30))
        model = fit_cascade(parse_pipeline("PCA(3)"), X)
        assert np.linalg.matrix_rank(transform_cascade(model, X)) <= 3

    def test_matches_manual_composition(self, fitted):
        model, X = fitted
        Z = X
        for layer in model.layers:
            Z = transform_layer(layer, Z)
        assert np.array_equal(transform_cascade(model, X), Z)

    def test_column_count_preserved(self, fitted):
        model, X = fitted
        for n in (1, 7, X.shape[1]):
            assert transform_cascade(model, X[:, :n]).shape[1] == n

    def test_dimension_mismatch(self, fitted):
        model, _ = fitted
        with pytest.raises(DimensionMismatchError):
            transform_cascade(model, np.zeros((3, 5)))


class TestSerialization:
    def test_round_trip_bit_exact(self, fitted):
        model, _ = fitted
        data = save_model(model)
        again = save_model(load_model(data))
        assert data == again

    def test_round_trip_preserves_fields(self, fitted):
        model, X = fitted
        loaded = load_model(save_model(model))
        assert loaded.spec.source_text == model.spec.source_text
        assert loaded.fit_report == model.fit_report
        for a, b in zip(loaded.layers, model.layers):
            assert np.array_equal(a.projection, b.projection)
            assert np.array_equal(a.mean, b.mean)

    def test_loaded_model_transforms_identically(self, fitted):
        model, X = fitted
        loaded = load_model(save_model(model))
        assert np.array_equal(transform_cascade(loaded, X),
                              transform_cascade(model, X))

    def test_bad_magic(self, fitted):
        model, _ = fitted
        data = bytearray(save_model(model))
        data[:6] = b"NOPE\x00\x00"
        with pytest.raises(FormatError):
            load_model(bytes(data))

    def test_bad_version(self, fitted):
        model, _ = fitted
        data = bytearray(save_model(model))
        data[6:8] = (99).to_bytes(2, "little")
        with pytest.raises(FormatError):
            load_model(bytes(data))

    def test_truncation(self, fitted):
        model, _ = fitted
        data = save_model(model)
        with pytest.raises(FormatError):
            load_model(data[: len(data) // 2])

    def test_trailing_garbage(self, fitted):
        model, _ = fitted
        with pytest.raises(FormatError):
            load_model(save_model(model) + b"x")

    def test_fit_determinism_byte_identical(self, blobs):
        X, labels = blobs
        spec = parse_pipeline("PCA+MFA(5,2)")
        m1 = fit_cascade(spec, X.copy(), labels, mfa_params=(3, 20))
        m2 = fit_cascade(spec, X.copy(), labels, mfa_params=(3, 20))
        assert save_model(m1) == save_model(m2)

    def test_file_round_trip(self, fitted, tmp_path):
        model, _ = fitted
        path = tmp_path / "model.genet"
        cascade.save_model_file(model, path)
        loaded = cascade.load_model_file(path)
        assert save_model(loaded) == save_model(model)
