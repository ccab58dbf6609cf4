"""JSON persistence for datasets, fitted featurizers and trained models.

Every file is written atomically (temp file + rename) with sorted keys so
that identical inputs give byte-identical files.  Floats are written with
``repr`` precision and read back exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .corpus import LabeledDataset
from .features import FeaturizerConfig, FittedFeaturizer, Vocabulary, english_stop_words
from .models import ForestModel, LinearModel, NbModel, Tree

FORMAT_VERSION = 1


class ArtifactError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False,
                      separators=(",", ":")) + "\n"


def write_json(path, obj) -> None:
    write_text(path, dumps(obj))


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def dataset_to_dict(ds: LabeledDataset) -> dict:
    return {"texts": list(ds.texts), "labels": list(ds.labels)}


def dataset_from_dict(d: dict) -> LabeledDataset:
    return LabeledDataset(d["texts"], d["labels"])


def _vocab_to_dict(v: Vocabulary) -> dict:
    return {"n_docs": v.n_docs,
            "entries": [[t, i, float(w)] for i, (t, w) in enumerate(zip(v.terms, v.idf))]}


def _vocab_from_dict(d: dict) -> Vocabulary:
    entries = d["entries"]
    if [e[1] for e in entries] != list(range(len(entries))):
        raise ArtifactError("vocabulary indices are not 0..V-1 in order")
    return Vocabulary([e[0] for e in entries], [e[2] for e in entries], d["n_docs"])


def featurizer_to_dict(f: FittedFeaturizer) -> dict:
    cfg = f.config
    return {
        "config": {
            "max_features_word": cfg.max_features_word,
            "max_features_char": cfg.max_features_char,
            "word_ngram_range": list(cfg.word_ngram_range),
            "char_ngram_range": list(cfg.char_ngram_range),
            "lowercase": cfg.lowercase,
            "use_stop_words": cfg.use_stop_words,
            "sublinear_tf": cfg.sublinear_tf,
        },
        "stop_words": sorted(english_stop_words()) if cfg.use_stop_words else [],
        "word_vocab": _vocab_to_dict(f.word_vocab),
        "char_vocab": _vocab_to_dict(f.char_vocab),
    }


def featurizer_from_dict(d: dict) -> FittedFeaturizer:
    cfg = FeaturizerConfig(**d["config"])
    # transform uses the packaged list, so it must be the one the model was fitted with
    if cfg.use_stop_words and d.get("stop_words") != sorted(english_stop_words()):
        raise ArtifactError("artifact was fitted with a different stop-word list")
    return FittedFeaturizer(cfg,
                            _vocab_from_dict(d["word_vocab"]),
                            _vocab_from_dict(d["char_vocab"]))


def _floats(a) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def _ints(a) -> list:
    return np.asarray(a, dtype=np.int64).tolist()


def model_to_dict(m) -> dict:
    if isinstance(m, NbModel):
        return {"type": "nb", "alpha": m.alpha, "class_log_prior": _floats(m.class_log_prior),
                "feature_log_prob": _floats(m.feature_log_prob)}
    if isinstance(m, LinearModel):
        return {"type": "linear", "kind": m.kind, "weights": _floats(m.weights),
                "bias": float(m.bias), "meta": m.meta}
    if isinstance(m, ForestModel):
        return {
            "type": "forest", "seed": m.seed, "n_features": m.n_features,
            "max_features": m.max_features, "bootstrap": m.bootstrap,
            "trees": [{"feature": _ints(t.feature), "threshold": _floats(t.threshold),
                       "left": _ints(t.left), "right": _ints(t.right),
                       "counts": _floats(t.counts)} for t in m.trees],
        }
    raise ArtifactError(f"cannot serialize {type(m).__name__}")


def model_from_dict(d: dict):
    kind = d.get("type")
    if kind == "nb":
        return NbModel(np.array(d["class_log_prior"]), np.array(d["feature_log_prob"]), d["alpha"])
    if kind == "linear":
        return LinearModel(np.array(d["weights"], dtype=np.float64), d["bias"], d["kind"], d["meta"])
    if kind == "forest":
        trees = [Tree(np.array(t["feature"], dtype=np.int64),
                      np.array(t["threshold"], dtype=np.float64),
                      np.array(t["left"], dtype=np.int64),
                      np.array(t["right"], dtype=np.int64),
                      np.array(t["counts"], dtype=np.float64).reshape(-1, 2))
                 for t in d["trees"]]
        return ForestModel(trees, d["seed"], d["n_features"], d["max_features"], d["bootstrap"])
    raise ArtifactError(f"unknown model type {kind!r}")


def model_width(m) -> int:
    return m.n_features


def save_model_artifact(path, name: str, featurizer: FittedFeaturizer, model, provenance: dict) -> None:
    if featurizer.total_width != model_width(model):
        raise ArtifactError("featurizer width does not match model input width")
    write_json(path, {
        "format_version": FORMAT_VERSION,
        "name": name,
        "featurizer": featurizer_to_dict(featurizer),
        "model": model_to_dict(model),
        "provenance": provenance,
    })


def load_model_artifact(path):
    """Return ``(name, featurizer, model, provenance)`` from an artifact file."""
    d = read_json(path)
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"{path}: unsupported format_version {version!r} "
                            f"(this build reads version {FORMAT_VERSION})")
    featurizer = featurizer_from_dict(d["featurizer"])
    model = model_from_dict(d["model"])
    if featurizer.total_width != model_width(model):
        raise ArtifactError(f"{path}: featurizer width {featurizer.total_width} "
                            f"!= model width {model_width(model)}")
    return d["name"], featurizer, model, d["provenance"]
