import bz2

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarcbench.corpus import (ColumnSpec, EmptyCorpusError, LabeledDataset, SamplingConfig,
                              StratificationError, clean, extract_labeled, load_sarc_tsv,
                              per_class_test_counts, prepare, stratified_split,
                              stratified_split_indices, subsample)


def line(label, text, n_fields=10):
    fields = [label] + [f"f{i}" for i in range(1, n_fields - 1)] + [text]
    return "\t".join(fields)


def test_load_minimal_line(tmp_path):
    p = tmp_path / "a.tsv"
    p.write_text(line("1", "reply text") + "\n")
    table = load_sarc_tsv(p)
    assert len(table.rows) == 1 and table.skipped_count == 0
    assert table.rows[0][9] == "reply text"


def test_short_line_only(tmp_path):
    p = tmp_path / "a.tsv"
    p.write_text("1\ta\tb\n")
    with pytest.raises(EmptyCorpusError):
        load_sarc_tsv(p)


def test_malformed_middle_line(tmp_path):
    p = tmp_path / "a.tsv"
    p.write_text("\n".join([line("1", "x"), "0\ta\tb\tc", line("0", "y")]) + "\n")
    table = load_sarc_tsv(p)
    assert len(table.rows) == 2
    assert table.skipped_count == 1
    assert table.line_numbers == [1, 3]


def test_bz2_and_plain_agree(tmp_path):
    body = "\n".join([line("1", 'she said "great" twice'), line("0", "ok then")]) + "\n"
    plain = tmp_path / "a.tsv"
    plain.write_text(body)
    packed = tmp_path / "a.tsv.bz2"
    packed.write_bytes(bz2.compress(body.encode()))
    assert load_sarc_tsv(plain).rows == load_sarc_tsv(packed).rows
    # quotes are ordinary characters
    assert load_sarc_tsv(plain).rows[0][9] == 'she said "great" twice'


def test_invalid_utf8_is_replaced(tmp_path):
    p = tmp_path / "a.tsv"
    p.write_bytes(line("1", "caf").encode() + b"\xff\n")
    assert load_sarc_tsv(p).rows[0][9] == "caf�"


def test_extract_labeled():
    from sarcbench.corpus import RawRecordTable
    rows = [line(l, t).split("\t") for l, t in [("0", "a"), ("1", "Great job."), ("x", "b"), ("1", "c")]]
    ds, dropped = extract_labeled(RawRecordTable(rows))
    assert ds.texts == ("a", "Great job.", "c")
    assert ds.labels == (0, 1, 1)
    assert dropped == 1


def test_column_spec_validation():
    with pytest.raises(ValueError):
        ColumnSpec(3, 3)
    with pytest.raises(ValueError):
        ColumnSpec(-1, 2)
    assert ColumnSpec(0, 1).min_fields == 2


def test_clean_examples():
    out = clean(LabeledDataset(["hi", "   ", ""], [1, 0, 1]))
    assert out.texts == ("hi",) and out.labels == (1,)
    ds = LabeledDataset(["a", "b c"], [0, 1])
    assert clean(ds) == ds
    assert clean(LabeledDataset(["x", "\t\n "], [0, 1])).texts == ("x",)
    with pytest.raises(EmptyCorpusError):
        clean(LabeledDataset([" "], [1]))


def test_subsample_full_is_permutation():
    ds = LabeledDataset([str(i) for i in range(10)], [i % 2 for i in range(10)])
    out = subsample(ds, SamplingConfig(10, 42))
    assert sorted(out.texts) == sorted(ds.texts)


def test_subsample_deterministic_and_golden():
    ds = LabeledDataset([str(i) for i in range(10)], [i % 2 for i in range(10)])
    assert subsample(ds, SamplingConfig(3, 42)) == subsample(ds, SamplingConfig(3, 42))
    # recorded from the first run of this implementation (PCG64 permutation)
    assert subsample(ds, SamplingConfig(3, 7)).texts == ("8", "0", "7")
    assert subsample(ds, SamplingConfig(3, 8)).texts == ("0", "7", "3")


def test_subsample_too_large():
    ds = LabeledDataset(["a", "b"], [0, 1])
    with pytest.raises(ValueError):
        subsample(ds, SamplingConfig(3, 1))


def test_split_five_and_five():
    ds = LabeledDataset([f"t{i}" for i in range(10)], [0] * 5 + [1] * 5)
    train, test = stratified_split(ds, SamplingConfig(10, 42, 0.2))
    assert test.class_counts() == {0: 1, 1: 1}
    assert train.class_counts() == {0: 4, 1: 4}


def test_split_half_on_two_and_two():
    ds = LabeledDataset(["a", "b", "c", "d"], [0, 0, 1, 1])
    train, test = stratified_split(ds, SamplingConfig(4, 3, 0.5))
    assert test.class_counts() == {0: 1, 1: 1} == train.class_counts()


def test_split_needs_two_per_class():
    ds = LabeledDataset(["a", "b", "c"], [0, 0, 1])
    with pytest.raises(StratificationError):
        stratified_split(ds, SamplingConfig(3, 0, 0.5))


def test_largest_remainder_counts():
    # 7 * 0.3 = 2.1, 5 * 0.3 = 1.5; total ceil(3.6) = 4 -> leftover goes to class 1
    assert per_class_test_counts({0: 7, 1: 5}, 0.3) == {0: 2, 1: 2}
    # 0.5 + 0.5 floors to 0 + 0; total ceil(1.0) = 1 slot for class 0
    assert per_class_test_counts({0: 5, 1: 5}, 0.1) == {0: 1, 1: 0}
    # float noise: 15 * 0.2 must be 3, not 4
    assert sum(per_class_test_counts({0: 8, 1: 7}, 0.2).values()) == 3


def test_tie_goes_to_lower_label():
    # 3 * 0.5 = 1.5 for both; total ceil(3.0) = 3 -> one extra slot, to class 0
    assert per_class_test_counts({0: 3, 1: 3}, 0.5) == {0: 2, 1: 1}


def test_balanced_split_stays_balanced():
    ds = LabeledDataset([f"t{i}" for i in range(1000)], [i % 2 for i in range(1000)])
    _, test = stratified_split(ds, SamplingConfig(1000, 42, 0.2))
    c = test.class_counts()
    assert abs(c[0] - c[1]) <= 1


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 60), st.integers(2, 60), st.floats(0.05, 0.95), st.integers(0, 2**32 - 1))
def test_split_properties(n0, n1, fraction, seed):
    labels = [0] * n0 + [1] * n1
    np.random.default_rng(seed).shuffle(labels)
    train_idx, test_idx = stratified_split_indices(labels, SamplingConfig(1, seed, fraction))
    assert set(train_idx).isdisjoint(test_idx)
    assert sorted([*train_idx, *test_idx]) == list(range(len(labels)))
    test_labels = np.asarray(labels)[test_idx]
    for c, n in ((0, n0), (1, n1)):
        assert abs((test_labels == c).sum() / n - fraction) <= 1 / n
    again = stratified_split_indices(labels, SamplingConfig(1, seed, fraction))
    assert np.array_equal(again[0], train_idx) and np.array_equal(again[1], test_idx)


def test_prepare_on_fixture(fixture_corpus):
    train, test, stats = prepare(fixture_corpus, ColumnSpec(), SamplingConfig(200, 42, 0.2))
    assert stats["blank_removed"] == 3
    assert len(train) + len(test) == 197
    assert all(t.strip() for t in train.texts + test.texts)
    # ceil(197 * 0.2) = 40
    assert len(test) == 40
