"""Loading and splitting the SARC balanced export.

The export is a headerless, tab-separated file (optionally bz2-compressed)
with the label in one column and the reply text in another.  Everything
random here draws from a PCG64 generator seeded with the run seed, so a
given (file, seed) pair always produces the same subsample and split.
"""

from __future__ import annotations

import bz2
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

BZ2_MAGIC = b"BZh"


class CorpusError(ValueError):
    pass


class EmptyCorpusError(CorpusError):
    pass


class StratificationError(CorpusError):
    pass


@dataclass(frozen=True)
class ColumnSpec:
    label_col: int = 0
    text_col: int = 9

    def __post_init__(self):
        if self.label_col < 0 or self.text_col < 0:
            raise ValueError("column indices must be >= 0")
        if self.label_col == self.text_col:
            raise ValueError("label_col and text_col must differ")

    @property
    def min_fields(self) -> int:
        return max(self.label_col, self.text_col) + 1


@dataclass(frozen=True)
class SamplingConfig:
    sample_size: int = 100_000
    seed: int = 42
    test_fraction: float = 0.2

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError("test_fraction must be in (0, 1)")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")


@dataclass
class RawRecordTable:
    rows: list[list[str]]
    skipped_count: int = 0
    # 1-based source line number of each retained row
    line_numbers: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class LabeledDataset:
    texts: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if len(self.texts) != len(self.labels):
            raise ValueError("texts and labels differ in length")
        if any(v not in (0, 1) for v in self.labels):
            raise ValueError("labels must be 0 or 1")

    def __len__(self):
        return len(self.texts)

    def take(self, indices) -> "LabeledDataset":
        return LabeledDataset([self.texts[i] for i in indices],
                              [self.labels[i] for i in indices])

    def class_counts(self) -> dict[int, int]:
        return {c: self.labels.count(c) for c in (0, 1)}


def read_text(path) -> str:
    """Decode a plain or bz2 file as UTF-8, replacing invalid bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:3] == BZ2_MAGIC:
        raw = bz2.decompress(raw)
    return raw.decode("utf-8", errors="replace")


def load_sarc_tsv(path, spec: ColumnSpec = ColumnSpec()) -> RawRecordTable:
    """Split every line on tabs, dropping lines with too few fields.

    No quote handling is done: a ``"`` is an ordinary character.
    """
    text = read_text(path)
    table = RawRecordTable(rows=[])
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        fields = line.split("\t")
        if len(fields) < spec.min_fields:
            table.skipped_count += 1
            continue
        table.rows.append(fields)
        table.line_numbers.append(lineno)
    if not table.rows:
        raise EmptyCorpusError(f"{path}: no line has {spec.min_fields} or more tab-separated fields")
    if table.skipped_count:
        log.info("%s: skipped %d malformed lines", path, table.skipped_count)
    return table


def extract_labeled(table: RawRecordTable, spec: ColumnSpec = ColumnSpec()) -> tuple[LabeledDataset, int]:
    """Pick (text, label) pairs; rows whose label is not "0" or "1" are dropped.

    Returns the dataset and the number of dropped rows.
    """
    texts, labels = [], []
    dropped = 0
    for row in table.rows:
        lab = row[spec.label_col].strip()
        if lab not in ("0", "1"):
            dropped += 1
            continue
        texts.append(row[spec.text_col])
        labels.append(int(lab))
    if not texts:
        raise EmptyCorpusError("no row carries a 0/1 label")
    return LabeledDataset(texts, labels), dropped


def clean(ds: LabeledDataset) -> LabeledDataset:
    """Drop rows whose text is empty or whitespace only."""
    keep = [i for i, t in enumerate(ds.texts) if t.strip()]
    if not keep:
        raise EmptyCorpusError("every text is blank")
    return ds.take(keep)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def subsample(ds: LabeledDataset, cfg: SamplingConfig) -> LabeledDataset:
    """Uniform sample without replacement, in the order drawn."""
    if cfg.sample_size > len(ds):
        raise ValueError(f"sample_size {cfg.sample_size} exceeds dataset size {len(ds)}")
    idx = make_rng(cfg.seed).permutation(len(ds))[: cfg.sample_size]
    return ds.take(idx)


def per_class_test_counts(class_counts: dict[int, int], test_fraction: float) -> dict[int, int]:
    """Per-class test-set sizes by the largest-remainder method.

    The total is ``ceil(n * test_fraction)``; each class gets the floor of
    its share and leftover slots go to the largest fractional remainders,
    ties to the lower label.
    """
    n = sum(class_counts.values())
    # round away float noise such as 15 * 0.2 == 3.0000000000000004
    total = math.ceil(round(n * test_fraction, 9))
    exact = {c: round(k * test_fraction, 9) for c, k in class_counts.items()}
    counts = {c: math.floor(v) for c, v in exact.items()}
    leftover = total - sum(counts.values())
    by_remainder = sorted(exact, key=lambda c: (-(exact[c] - counts[c]), c))
    for c in by_remainder[:leftover]:
        counts[c] += 1
    return counts


def stratified_split_indices(labels, cfg: SamplingConfig) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    small = classes[counts < 2]
    if len(small):
        raise StratificationError(f"classes {small.tolist()} have fewer than 2 members")
    wanted = per_class_test_counts(dict(zip(classes.tolist(), counts.tolist())), cfg.test_fraction)

    perm = make_rng(cfg.seed).permutation(len(labels))
    in_test = np.zeros(len(labels), dtype=bool)
    for c, k in wanted.items():
        members = perm[labels[perm] == c]
        in_test[members[:k]] = True
    return perm[~in_test[perm]], perm[in_test[perm]]


def stratified_split(ds: LabeledDataset, cfg: SamplingConfig) -> tuple[LabeledDataset, LabeledDataset]:
    train_idx, test_idx = stratified_split_indices(ds.labels, cfg)
    return ds.take(train_idx), ds.take(test_idx)


def prepare(path, spec: ColumnSpec = ColumnSpec(), cfg: SamplingConfig = SamplingConfig()):
    """Load, subsample, clean and split, in the order of the original experiment.

    Returns ``(train, test, stats)`` where ``stats`` records what was dropped
    along the way.
    """
    table = load_sarc_tsv(path, spec)
    ds, bad_labels = extract_labeled(table, spec)
    sampled = subsample(ds, cfg)
    cleaned = clean(sampled)
    train, test = stratified_split(cleaned, cfg)
    stats = {
        "lines_skipped": table.skipped_count,
        "bad_labels": bad_labels,
        "labeled_rows": len(ds),
        "sampled": len(sampled),
        "blank_removed": len(sampled) - len(cleaned),
    }
    return train, test, stats
