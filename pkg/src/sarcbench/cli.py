"""``sarcbench`` command line: prepare, train, evaluate, plot, run-all.

Output layout under ``--out``::

    data/train.json data/test.json data/manifest.json
    models/<name>.json
    metrics.json metrics.txt
    plots/confusion_matrix_nb.svg plots/roc_curve_nb.svg
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import artifacts, corpus, features, metrics, models, plots

log = logging.getLogger("sarcbench")

TABLE_NAMES = {"logreg": "Logistic Regression", "svm": "Linear SVM",
               "nb": "Naive Bayes", "rf": "Random Forest"}


class CommandError(Exception):
    pass


@dataclass
class RunConfig:
    input_path: Path | None = None
    columns: corpus.ColumnSpec = field(default_factory=corpus.ColumnSpec)
    sampling: corpus.SamplingConfig = field(default_factory=corpus.SamplingConfig)
    models: tuple[str, ...] = models.MODEL_NAMES
    output_dir: Path = Path("sarcbench-out")
    timestamp: bool = True
    jobs: int = 1

    def __post_init__(self):
        if not self.models:
            raise CommandError("--models must name at least one model")
        unknown = [m for m in self.models if m not in models.MODEL_NAMES]
        if unknown:
            raise CommandError(f"unknown model(s) {', '.join(unknown)}; "
                               f"choose from {', '.join(models.MODEL_NAMES)}")

    @property
    def data_dir(self) -> Path:
        return self.output_dir / "data"

    @property
    def models_dir(self) -> Path:
        return self.output_dir / "models"

    @property
    def plots_dir(self) -> Path:
        return self.output_dir / "plots"

    @property
    def metrics_path(self) -> Path:
        return self.output_dir / "metrics.json"

    def stamp(self) -> str | None:
        if not self.timestamp:
            return None
        return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _class_counts(ds: corpus.LabeledDataset) -> dict:
    return {str(c): n for c, n in ds.class_counts().items()}


def cmd_prepare(cfg: RunConfig) -> dict:
    if cfg.input_path is None:
        raise CommandError("prepare needs --input")
    path = Path(cfg.input_path)
    if not path.exists():
        raise CommandError(f"input file {path} does not exist")
    try:
        train, test, stats = corpus.prepare(path, cfg.columns, cfg.sampling)
    except (corpus.CorpusError, ValueError) as e:
        raise CommandError(f"{path}: {e}") from e

    manifest = {
        "input": {"name": path.name, "sha256": artifacts.file_sha256(path)},
        "columns": {"label_col": cfg.columns.label_col, "text_col": cfg.columns.text_col},
        "sampling": {"sample_size": cfg.sampling.sample_size, "seed": cfg.sampling.seed,
                     "test_fraction": cfg.sampling.test_fraction},
        "stats": stats,
        "train": {"count": len(train), "per_class": _class_counts(train)},
        "test": {"count": len(test), "per_class": _class_counts(test)},
        "created_at": cfg.stamp(),
    }
    artifacts.write_json(cfg.data_dir / "train.json", artifacts.dataset_to_dict(train))
    artifacts.write_json(cfg.data_dir / "test.json", artifacts.dataset_to_dict(test))
    artifacts.write_json(cfg.data_dir / "manifest.json", manifest)
    log.info("prepared %d train / %d test rows", len(train), len(test))
    return manifest


def _load_split(cfg: RunConfig, name: str) -> corpus.LabeledDataset:
    p = cfg.data_dir / f"{name}.json"
    if not p.exists():
        raise CommandError(f"{p} is missing; run `sarcbench prepare` first")
    return artifacts.dataset_from_dict(artifacts.read_json(p))


def cmd_train(cfg: RunConfig, train_cfg: models.TrainConfig | None = None) -> dict:
    """Fit features on the training split and train every requested model.

    A model that fails to train is reported and skipped; the others still
    run.  Returns ``{name: artifact path or error message}``.
    """
    if train_cfg is None:
        train_cfg = models.TrainConfig(rf_n_jobs=cfg.jobs)
    train = _load_split(cfg, "train")
    manifest = artifacts.read_json(cfg.data_dir / "manifest.json")

    featurizer, X = features.fit_transform(features.FeaturizerConfig(), train.texts)
    log.info("feature matrix %d x %d, %d stored entries", X.n_rows, X.n_cols, X.nnz)
    provenance = {
        "seed": manifest["sampling"]["seed"],
        "sample_size": manifest["sampling"]["sample_size"],
        "corpus_sha256": manifest["input"]["sha256"],
        "stop_words": features.STOP_WORDS_VERSION,
        "created_at": cfg.stamp(),
    }
    results = {}
    for name in cfg.models:
        log.info("training model: %s", name)
        try:
            model = models.train(name, X, train.labels, train_cfg)
        except Exception as e:  # one failing model must not stop the others
            log.error("training %s failed: %s", name, e)
            results[name] = f"error: {e}"
            continue
        path = cfg.models_dir / f"{name}.json"
        artifacts.save_model_artifact(path, name, featurizer, model, provenance)
        results[name] = str(path)
    return results


def format_table(reports: dict) -> str:
    lines = [f"{'Model':<20}{'Accuracy':>10}{'Precision':>11}{'Recall':>9}{'F1':>8}"]
    for name, rep in reports.items():
        c = rep.per_class[1]
        lines.append(f"{TABLE_NAMES.get(name, name):<20}{rep.accuracy:>10.3f}"
                     f"{c.precision:>11.3f}{c.recall:>9.3f}{c.f1:>8.3f}")
    return "\n".join(lines) + "\n"


def cmd_evaluate(cfg: RunConfig) -> dict:
    """Score the test split with each model and write metrics.json / metrics.txt."""
    test = _load_split(cfg, "test")
    reports = {}
    provenance = None
    for name in cfg.models:
        path = cfg.models_dir / f"{name}.json"
        if not path.exists():
            raise CommandError(f"no artifact for {name} at {path}; "
                               f"run `sarcbench train --models {name}` first")
        try:
            _, featurizer, model, provenance = artifacts.load_model_artifact(path)
        except artifacts.ArtifactError as e:
            raise CommandError(str(e)) from e
        X = featurizer.transform(test.texts)
        y_pred = model.predict(X)
        scores = models.scores(model, X) if name == "nb" else None
        reports[name] = metrics.evaluate(test.labels, y_pred, scores)

    doc = {
        "format_version": artifacts.FORMAT_VERSION,
        "provenance": dict(provenance or {}, created_at=cfg.stamp()),
        "test_count": len(test),
        "models": {name: rep.to_dict() for name, rep in reports.items()},
    }
    table = format_table(reports)
    artifacts.write_json(cfg.metrics_path, doc)
    artifacts.write_text(cfg.output_dir / "metrics.txt", table)
    print(table, end="")
    if "nb" in reports:
        nb = reports["nb"]
        print(f"Confusion matrix (Naive Bayes): {nb.confusion.as_array().tolist()}")
        print(f"AUC (Naive Bayes): {nb.roc.auc:.3f}")
    return doc


def load_reports(path) -> dict:
    doc = artifacts.read_json(path)
    return {name: metrics.EvalReport.from_dict(d) for name, d in doc["models"].items()}


def cmd_plot(cfg: RunConfig) -> list[Path]:
    if not (cfg.models_dir / "nb.json").exists():
        raise CommandError("plots need the Naive Bayes artifact; "
                           "run `sarcbench train --models nb` first")
    if not cfg.metrics_path.exists():
        raise CommandError(f"{cfg.metrics_path} is missing; run `sarcbench evaluate` first")
    reports = load_reports(cfg.metrics_path)
    if "nb" not in reports or reports["nb"].roc is None:
        raise CommandError("metrics.json has no Naive Bayes entry; "
                           "run `sarcbench evaluate --models nb` first")
    nb = reports["nb"]
    cm_path = cfg.plots_dir / "confusion_matrix_nb.svg"
    roc_path = cfg.plots_dir / "roc_curve_nb.svg"
    artifacts.write_text(cm_path, plots.confusion_svg(nb.confusion))
    artifacts.write_text(roc_path, plots.roc_svg(nb.roc))
    return [cm_path, roc_path]


def cmd_run_all(cfg: RunConfig) -> dict:
    cmd_prepare(cfg)
    results = cmd_train(cfg)
    failed = {k: v for k, v in results.items() if v.startswith("error")}
    if failed:
        raise CommandError(f"training failed for {', '.join(failed)}")
    doc = cmd_evaluate(cfg)
    if "nb" in cfg.models:
        cmd_plot(cfg)
    else:
        log.info("skipping plots: they are drawn for Naive Bayes only")
    return doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="SARC TSV export, plain or bz2")
    common.add_argument("--label-col", type=int, default=0)
    common.add_argument("--text-col", type=int, default=9)
    common.add_argument("--sample-size", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--test-fraction", type=float, default=0.2)
    common.add_argument("--models", default=",".join(models.MODEL_NAMES),
                        help="comma-separated subset of logreg,svm,nb,rf")
    common.add_argument("--out", type=Path, default=Path("sarcbench-out"))
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit creation times so reruns are byte-identical")
    common.add_argument("--jobs", type=int, default=1, help="threads for forest training")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sarcbench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("prepare", "train", "evaluate", "plot", "run-all"):
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args) -> RunConfig:
    try:
        return RunConfig(
            input_path=args.input,
            columns=corpus.ColumnSpec(args.label_col, args.text_col),
            sampling=corpus.SamplingConfig(args.sample_size, args.seed, args.test_fraction),
            models=tuple(m.strip() for m in args.models.split(",") if m.strip()),
            output_dir=args.out,
            timestamp=not args.no_timestamp,
            jobs=args.jobs,
        )
    except ValueError as e:
        raise CommandError(str(e)) from e


COMMANDS = {"prepare": cmd_prepare, "train": cmd_train, "evaluate": cmd_evaluate,
            "plot": cmd_plot, "run-all": cmd_run_all}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        result = COMMANDS[args.command](cfg)
    except CommandError as e:
        print(f"sarcbench {args.command}: {e}", file=sys.stderr)
        return 2
    if args.command == "train":
        for name, outcome in result.items():
            print(f"{name}: {outcome}")
        if any(v.startswith("error") for v in result.values()):
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
