"""Model payload store (format `optbench-model/1`).

Payloads are plain JSON-able dicts validated on insert; the store is frozen
after load so kernels can share it across threads. Numpy views of payload
arrays are cached per model id.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import UnknownModel, ValidationError

MODEL_FORMAT = "optbench-model/1"

PAYLOAD_KINDS = ("tree", "forest", "kmeans", "naive_bayes", "scaler", "encoder", "conv_filters", "llm")


def _validate_tree_nodes(nodes, where: str):
    if not nodes:
        raise ValidationError(f"{where}: tree has no nodes")
    for i, n in enumerate(nodes):
        if len(n) != 5:
            raise ValidationError(f"{where}: node {i} must be [feature, threshold, left, right, value]")
        feat, _, left, right, _ = n
        if feat >= 0 and not (0 <= left < len(nodes) and 0 <= right < len(nodes)):
            raise ValidationError(f"{where}: node {i} child index out of range")


def validate_payload(model_id: str, payload: dict) -> None:
    kind = payload.get("kind")
    if kind not in PAYLOAD_KINDS:
        raise ValidationError(f"model {model_id!r}: unknown payload kind {kind!r}")
    if kind == "tree":
        _validate_tree_nodes(payload["nodes"], model_id)
    elif kind == "forest":
        if payload.get("aggregation", "mean") not in ("mean", "majority", "sum"):
            raise ValidationError(f"model {model_id!r}: bad aggregation")
        if not payload["trees"]:
            raise ValidationError(f"model {model_id!r}: empty forest")
        for t, nodes in enumerate(payload["trees"]):
            _validate_tree_nodes(nodes, f"{model_id}[tree {t}]")
    elif kind == "kmeans":
        cents = payload["centroids"]
        if not cents or len({len(c) for c in cents}) != 1:
            raise ValidationError(f"model {model_id!r}: ragged or empty centroids")
    elif kind == "naive_bayes":
        n_classes = len(payload["log_priors"])
        for tok, lp in payload["token_log_probs"].items():
            if len(lp) != n_classes:
                raise ValidationError(f"model {model_id!r}: token {tok!r} probs do not match classes")
    elif kind == "scaler":
        if len(payload["mins"]) != len(payload["maxs"]):
            raise ValidationError(f"model {model_id!r}: mins/maxs length mismatch")
    elif kind == "encoder":
        vocab = payload["vocabulary"]
        if len(set(map(str, vocab))) != len(vocab):
            raise ValidationError(f"model {model_id!r}: duplicate vocabulary entries")
    elif kind == "conv_filters":
        filters = payload["filters"]
        shapes = {(len(f), len(f[0])) for f in filters}
        if len(shapes) != 1:
            raise ValidationError(f"model {model_id!r}: filter bank shapes differ")
    elif kind == "llm":
        int(payload.get("seed", 0))


class ModelStore:
    """Immutable-after-load mapping of model id -> payload."""

    def __init__(self, models: dict | None = None):
        self._models: dict[str, dict] = {}
        self._arrays: dict[str, dict] = {}
        self._frozen = False
        for mid, payload in (models or {}).items():
            self.add(mid, payload)

    def add(self, model_id: str, payload: dict) -> None:
        if self._frozen:
            raise ValidationError("model store is frozen")
        validate_payload(model_id, payload)
        self._models[model_id] = payload

    def freeze(self) -> "ModelStore":
        self._frozen = True
        return self

    def __contains__(self, model_id: str) -> bool:
        return model_id in self._models

    def ids(self) -> list[str]:
        return sorted(self._models)

    def get(self, model_id: str) -> dict:
        try:
            return self._models[model_id]
        except KeyError:
            raise UnknownModel(model_id) from None

    def arrays(self, model_id: str) -> dict:
        """Numpy materialization of a payload's numeric fields (cached)."""
        if model_id in self._arrays:
            return self._arrays[model_id]
        payload = self.get(model_id)
        kind = payload["kind"]
        out: dict = {"kind": kind}
        if kind == "kmeans":
            out["centroids"] = np.asarray(payload["centroids"], dtype=np.float64)
        elif kind == "scaler":
            out["mins"] = np.asarray(payload["mins"], dtype=np.float64)
            out["maxs"] = np.asarray(payload["maxs"], dtype=np.float64)
        elif kind == "encoder":
            out["index"] = {str(v): i for i, v in enumerate(payload["vocabulary"])}
            out["size"] = len(payload["vocabulary"])
        elif kind == "conv_filters":
            out["filters"] = np.asarray(payload["filters"], dtype=np.float64)
        elif kind == "naive_bayes":
            out["log_priors"] = np.asarray(payload["log_priors"], dtype=np.float64)
            out["token_log_probs"] = {t: np.asarray(lp, dtype=np.float64) for t, lp in payload["token_log_probs"].items()}
            out["default_log_prob"] = np.asarray(
                payload.get("default_log_prob", [-20.0] * len(payload["log_priors"])), dtype=np.float64
            )
        self._arrays[model_id] = out
        return out

    # --- persistence ---

    def to_doc(self) -> dict:
        return {"format": MODEL_FORMAT, "models": dict(sorted(self._models.items()))}

    @classmethod
    def from_doc(cls, doc: dict) -> "ModelStore":
        if doc.get("format") != MODEL_FORMAT:
            raise ValidationError(f"expected format {MODEL_FORMAT!r}, got {doc.get('format')!r}")
        return cls(doc.get("models", {}))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_doc(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "ModelStore":
        return cls.from_doc(json.loads(Path(path).read_text())).freeze()

    @classmethod
    def load_dir(cls, directory: str | Path) -> "ModelStore":
        """Merge every optbench-model/1 file in a directory."""
        store = cls()
        for p in sorted(Path(directory).glob("*.json")):
            doc = json.loads(p.read_text())
            if doc.get("format") == MODEL_FORMAT:
                for mid, payload in doc.get("models", {}).items():
                    store.add(mid, payload)
        return store.freeze()
