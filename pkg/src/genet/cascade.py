"""Pipeline parsing, multi-layer fitting, and model (de)serialization.

Pipelines are written ``NAME(+NAME)*(d1,d2,...)``, e.g. ``PCA+MFA+MFA(100,70,40)``:
one dimension per layer name, names case-insensitive in {PCA, LDA, MFA}.
Fitted cascades serialize to a versioned little-endian binary container
(magic ``GENET\\0``); the byte layout is documented in docs/file-formats.md
and round-trips bit-exactly.
"""

import io
import struct
import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, GenetError, ParseError
from .layers import KINDS, LayerModel, LayerSpec, fit_layer, transform_layer
from . import linalg

MODEL_MAGIC = b"GENET\x00"
MODEL_VERSION = 1

_KIND_CODES = {kind: code for code, kind in enumerate(KINDS)}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


@dataclass(frozen=True)
class CascadeSpec:
    """Ordered layer specs plus the pipeline text they came from."""

    layers: tuple
    source_text: str

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ParseError("a cascade needs at least one layer")


def parse_pipeline(text):
    """Parse pipeline text like ``PCA+MFA(100,40)`` into a CascadeSpec.

    MFA neighborhood sizes are left unset here; they are filled from the run
    configuration when the cascade is fitted.
    """
    stripped = text.strip()
    open_idx = stripped.find("(")
    if open_idx < 0 or not stripped.endswith(")"):
        raise ParseError(f"expected NAME(+NAME)*(d1,...) with dimensions: {text!r}")
    head = stripped[:open_idx]
    inner = stripped[open_idx + 1 : -1]
    names = [t.strip().upper() for t in head.split("+")]
    dim_tokens = [t.strip() for t in inner.split(",")]
    for name in names:
        if name not in KINDS:
            raise ParseError(f"unknown layer name {name!r} in {text!r}")
    if len(names) != len(dim_tokens):
        raise ParseError(
            f"{len(names)} layer name(s) but {len(dim_tokens)} dimension(s): {text!r}"
        )
    dims = []
    for tok in dim_tokens:
        try:
            dim = int(tok)
        except ValueError as exc:
            raise ParseError(f"bad dimension {tok!r} in {text!r}") from exc
        if dim < 1:
            raise ParseError(f"dimensions must be positive, got {dim} in {text!r}")
        dims.append(dim)
    specs = tuple(LayerSpec(kind=name, out_dim=dim) for name, dim in zip(names, dims))
    return CascadeSpec(layers=specs, source_text=stripped)


def format_pipeline(layer_specs):
    """Canonical pipeline text for a sequence of layer specs."""
    names = "+".join(spec.kind for spec in layer_specs)
    dims = ",".join(str(spec.out_dim) for spec in layer_specs)
    return f"{names}({dims})"


@dataclass(frozen=True)
class CascadeModel:
    """Fitted cascade: resolved spec, ordered layer models, fit warnings."""

    spec: CascadeSpec
    layers: tuple
    warnings: tuple = ()

    @property
    def fit_report(self):
        """Per-layer dimensions, clamp warnings and eigensolver residuals."""
        report = {
            "pipeline": self.spec.source_text,
            "warnings": list(self.warnings),
            "layers": [],
        }
        for model in self.layers:
            report["layers"].append(
                {
                    "kind": model.spec.kind,
                    "requested_dim": model.spec.out_dim,
                    "actual_dim": model.out_dim_actual,
                    "k1": model.spec.k1,
                    "k2": model.spec.k2,
                    "max_residual": model.max_residual,
                    "residual_scale": model.residual_scale,
                    "warnings": list(model.warnings),
                }
            )
        return report

    @property
    def out_dim(self):
        return self.layers[-1].out_dim_actual


def fit_cascade(spec: CascadeSpec, X, labels=None, mfa_params=(10, 500),
                ridge=linalg.DEFAULT_RIDGE):
    """Fit each layer on the output of the layers before it.

    ``mfa_params`` is the run-level (k1, k2) pair applied to every MFA layer
    that does not carry its own values. A supervised first layer is legal
    but reported as a warning, since unsupervised first layers are the
    recommended construction.
    """
    k1, k2 = mfa_params
    resolved = tuple(ls.with_neighborhoods(k1, k2) for ls in spec.layers)
    cascade_warnings = []
    if resolved[0].supervised:
        msg = f"first layer {resolved[0].kind} is supervised; unsupervised first layers are recommended"
        cascade_warnings.append(msg)
        _warnings.warn(msg, stacklevel=2)

    fitted = []
    Z = X
    for i, layer_spec in enumerate(resolved):
        try:
            model = fit_layer(layer_spec, Z, labels=labels, ridge=ridge)
        except GenetError as exc:
            raise type(exc)(f"layer {i + 1} ({layer_spec.kind}): {exc}") from exc
        fitted.append(model)
        Z = transform_layer(model, Z)

    return CascadeModel(
        spec=CascadeSpec(layers=resolved, source_text=spec.source_text),
        layers=tuple(fitted),
        warnings=tuple(cascade_warnings),
    )


def transform_cascade(model: CascadeModel, X):
    """Apply every layer in order; columns in, columns out."""
    Z = X
    for layer in model.layers:
        Z = transform_layer(layer, Z)
    return Z


def _pack_str(buf, text):
    data = text.encode("utf-8")
    buf.write(struct.pack("<I", len(data)))
    buf.write(data)


def _pack_f64(buf, arr):
    buf.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def save_model(model: CascadeModel):
    """Serialize a fitted cascade to bytes (bit-exact round trip)."""
    buf = io.BytesIO()
    buf.write(MODEL_MAGIC)
    buf.write(struct.pack("<H", MODEL_VERSION))
    _pack_str(buf, model.spec.source_text)
    buf.write(struct.pack("<I", len(model.warnings)))
    for w in model.warnings:
        _pack_str(buf, w)
    buf.write(struct.pack("<I", len(model.layers)))
    for layer in model.layers:
        spec = layer.spec
        buf.write(struct.pack("<BIII", _KIND_CODES[spec.kind], spec.out_dim,
                              spec.k1 or 0, spec.k2 or 0))
        buf.write(struct.pack("<I", layer.mean.size))
        _pack_f64(buf, layer.mean)
        rows, cols = layer.projection.shape
        buf.write(struct.pack("<II", rows, cols))
        _pack_f64(buf, layer.projection)
        buf.write(struct.pack("<ddI", layer.max_residual, layer.residual_scale,
                              layer.out_dim_actual))
        buf.write(struct.pack("<I", len(layer.warnings)))
        for w in layer.warnings:
            _pack_str(buf, w)
    return buf.getvalue()


class _Reader:
    def __init__(self, data):
        self._buf = io.BytesIO(data)

    def exact(self, count):
        data = self._buf.read(count)
        if len(data) != count:
            raise FormatError("model data truncated")
        return data

    def unpack(self, fmt):
        return struct.unpack(fmt, self.exact(struct.calcsize(fmt)))

    def text(self):
        (length,) = self.unpack("<I")
        return self.exact(length).decode("utf-8")

    def f64(self, count):
        return np.frombuffer(self.exact(8 * count), dtype="<f8").copy()

    def at_end(self):
        return self._buf.read(1) == b""


def load_model(data):
    """Deserialize bytes written by :func:`save_model`."""
    reader = _Reader(data)
    if reader.exact(len(MODEL_MAGIC)) != MODEL_MAGIC:
        raise FormatError("bad model magic")
    (version,) = reader.unpack("<H")
    if version != MODEL_VERSION:
        raise FormatError(f"unsupported model version {version}")
    source_text = reader.text()
    (n_warn,) = reader.unpack("<I")
    cascade_warnings = tuple(reader.text() for _ in range(n_warn))
    (n_layers,) = reader.unpack("<I")
    if n_layers < 1:
        raise FormatError("model has no layers")
    layers = []
    for _ in range(n_layers):
        code, out_dim, k1, k2 = reader.unpack("<BIII")
        if code not in _CODE_KINDS:
            raise FormatError(f"unknown layer kind code {code}")
        spec = LayerSpec(kind=_CODE_KINDS[code], out_dim=out_dim,
                         k1=k1 or None, k2=k2 or None)
        (m,) = reader.unpack("<I")
        mean = reader.f64(m)
        rows, cols = reader.unpack("<II")
        projection = reader.f64(rows * cols).reshape(rows, cols)
        max_residual, residual_scale, out_dim_actual = reader.unpack("<ddI")
        (n_lwarn,) = reader.unpack("<I")
        layer_warnings = tuple(reader.text() for _ in range(n_lwarn))
        if rows != m or cols != out_dim_actual:
            raise FormatError("inconsistent layer dimensions in model data")
        layers.append(
            LayerModel(
                spec=spec,
                mean=mean,
                projection=projection,
                out_dim_actual=out_dim_actual,
                max_residual=max_residual,
                residual_scale=residual_scale,
                warnings=layer_warnings,
            )
        )
    if not reader.at_end():
        raise FormatError("trailing bytes after model data")
    spec = CascadeSpec(layers=tuple(l.spec for l in layers), source_text=source_text)
    return CascadeModel(spec=spec, layers=tuple(layers), warnings=cascade_warnings)


def save_model_file(model: CascadeModel, path):
    with open(path, "wb") as fh:
        fh.write(save_model(model))


def load_model_file(path):
    with open(path, "rb") as fh:
        return load_model(fh.read())
