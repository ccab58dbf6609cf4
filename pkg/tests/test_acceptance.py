"""Acceptance checks, one test per numbered criterion.

Criteria 1-6 need the SARC balanced export and read its path from the
``SARC_PATH`` environment variable; without it they are reported as SKIP.
Criteria 7-14 run on synthetic data and the bundled fixture corpus.

Each test records a PASS/FAIL line; ``conftest.py`` prints the table at the
end of the pytest run.  Run this file directly for the same table.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

from sarcbench import cli, corpus, features, metrics, models
from sarcbench.corpus import SamplingConfig, stratified_split_indices
from sarcbench.models import (logistic_objective, squared_hinge_objective, train_linear_svm,
                              train_logreg, train_nb)
from sarcbench.sparse import to_csr

from conftest import FIXTURE, random_sparse
from test_linear import central_difference, dense_logistic, dense_sq_hinge
from test_metrics import pair_count_auc
from test_naive_bayes import direct_bayes
from tfidf_oracle import brute_force_tfidf

RESULTS: dict[int, tuple[str, str]] = {}

# published targets and tolerances: (accuracy, precision, recall, f1)
TARGETS = {
    "nb": ((0.565, 0.566, 0.574, 0.569), 0.02),
    "logreg": ((0.564, None, None, 0.569), 0.02),
    "svm": ((0.541, None, None, 0.538), 0.025),
    "rf": ((0.558, None, None, 0.563), 0.03),
}
AUC_TARGET, AUC_TOL = 0.59, 0.03


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = ("PASS" if ok else "FAIL", detail)
    assert ok, detail


def skip(n: int, why: str):
    RESULTS[n] = ("SKIP", why)
    pytest.skip(why)


# ---- full-scale reproduction ------------------------------------------------

@pytest.fixture(scope="module")
def full_reports(tmp_path_factory):
    path = os.environ.get("SARC_PATH")
    if not path or not Path(path).exists():
        return None
    out = tmp_path_factory.mktemp("fullscale")
    cfg = cli.RunConfig(input_path=Path(path), output_dir=out, timestamp=False,
                        jobs=os.cpu_count() or 1)
    cli.cmd_run_all(cfg)
    return cli.load_reports(cfg.metrics_path)


def need(reports, n):
    if reports is None:
        skip(n, "SARC_PATH not set; full-scale criterion not run")
    return reports


def check_row(n, reports, name):
    (acc, p, r, f1), tol = TARGETS[name]
    rep = need(reports, n)[name]
    c = rep.per_class[1]
    got = {"accuracy": (rep.accuracy, acc), "precision": (c.precision, p),
           "recall": (c.recall, r), "f1": (c.f1, f1)}
    parts, ok = [], True
    for k, (v, want) in got.items():
        if want is None:
            continue
        ok &= abs(v - want) <= tol
        parts.append(f"{k} {v:.3f} vs {want:.3f}")
    record(n, ok, f"{name}: " + ", ".join(parts) + f" (tol {tol})")


@pytest.mark.fullscale
def test_01_nb_table_row(full_reports):
    check_row(1, full_reports, "nb")


@pytest.mark.fullscale
def test_02_logreg_table_row(full_reports):
    check_row(2, full_reports, "logreg")


@pytest.mark.fullscale
def test_03_svm_table_row(full_reports):
    check_row(3, full_reports, "svm")


@pytest.mark.fullscale
def test_04_rf_table_row(full_reports):
    check_row(4, full_reports, "rf")


@pytest.mark.fullscale
def test_05_nb_auc(full_reports):
    auc = need(full_reports, 5)["nb"].roc.auc
    record(5, abs(auc - AUC_TARGET) <= AUC_TOL, f"AUC {auc:.3f} vs {AUC_TARGET} (tol {AUC_TOL})")


@pytest.mark.fullscale
def test_06_model_ordering(full_reports):
    f1 = {k: r.per_class[1].f1 for k, r in need(full_reports, 6).items()}
    close = abs(f1["nb"] - f1["logreg"]) <= 0.005
    lowest = all(f1["svm"] < f1[k] for k in ("nb", "logreg", "rf"))
    record(6, close and lowest, "F1 " + ", ".join(f"{k} {v:.3f}" for k, v in f1.items()))


# ---- desk-scale properties --------------------------------------------------

def test_07_tfidf_oracle():
    rng = np.random.default_rng(2718)
    worst = 0.0
    for _ in range(50):
        n_terms = int(rng.integers(1, 51))
        pool = [f"w{k}" for k in range(n_terms)]
        docs = [[pool[k] for k in rng.integers(0, n_terms, size=rng.integers(0, 15))]
                for _ in range(int(rng.integers(1, 11)))]
        cap = int(rng.integers(1, n_terms + 1))
        terms, _, rows = brute_force_tfidf(docs, docs, cap)
        vocab = features.fit_vocabulary(docs, cap)
        if list(vocab.terms) != terms:
            record(7, False, "vocabulary differs from the oracle")
        got = features.transform_tfidf(vocab, docs).toarray()
        worst = max(worst, float(np.max(np.abs(got - np.array(rows).reshape(got.shape)), initial=0)))
    record(7, worst <= 1e-10, f"50 corpora, max abs error {worst:.2e} (tol 1e-10)")


def test_08_nb_oracle():
    rng = np.random.default_rng(314)
    worst = 0.0
    for _ in range(100):
        n, D = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        X = rng.integers(0, 4, (n, D)).astype(float)
        y = rng.integers(0, 2, n)
        y[:2] = [0, 1]
        m = train_nb(to_csr(X), y)
        q = rng.integers(0, 3, (2, D)).astype(float)
        for row, got in zip(q, m.predict_proba(to_csr(q))):
            want = direct_bayes(X.tolist(), y.tolist(), row.tolist())
            worst = max(worst, float(np.max(np.abs(got - want))))
    record(8, worst <= 1e-10, f"100 fixtures <=4x3, max abs error {worst:.2e} (tol 1e-10)")


def test_09_linear_gradients_and_optimum():
    from scipy.optimize import minimize
    rng = np.random.default_rng(1618)
    worst_grad = worst_obj = 0.0
    for objective in (logistic_objective, squared_hinge_objective):
        for _ in range(10):
            _, X = random_sparse(rng, 10, 4, nonneg=False)
            ys = rng.choice([-1.0, 1.0], 10)
            theta = rng.normal(size=5)
            g = objective(theta, X, ys, 1.0)[1]
            fd = central_difference(lambda th: objective(th, X, ys, 1.0)[0], theta)
            worst_grad = max(worst_grad, np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12))
    for train, dense in ((train_logreg, dense_logistic), (train_linear_svm, dense_sq_hinge)):
        for _ in range(5):
            n, D = int(rng.integers(6, 21)), int(rng.integers(1, 6))
            d, X = random_sparse(rng, n, D, density=0.6, nonneg=False)
            y = rng.integers(0, 2, n)
            y[:2] = [0, 1]
            m = train(X, y)
            ours = dense(np.append(m.weights, m.bias), d, y, 1.0)
            ref = minimize(dense, np.zeros(D + 1), args=(d, y, 1.0), method="BFGS",
                           options={"gtol": 1e-10, "maxiter": 10000}).fun
            worst_obj = max(worst_obj, abs(ours - ref) / abs(ref))
    record(9, worst_grad < 1e-4 and worst_obj <= 1e-3,
           f"gradient rel error {worst_grad:.1e} (tol 1e-4), objective rel gap {worst_obj:.1e} (tol 1e-3)")


def test_10_auc_mann_whitney():
    rng = np.random.default_rng(1729)
    worst, invariant = 0.0, True
    for _ in range(100):
        n = int(rng.integers(2, 21))
        y = rng.integers(0, 2, n)
        y[:2] = [0, 1]
        s = rng.integers(0, 5, n) / 4.0 if rng.random() < 0.5 else rng.random(n)
        curve = metrics.roc(y, s)
        worst = max(worst, abs(curve.auc - pair_count_auc(y.tolist(), s.tolist())))
        moved = metrics.roc(y, np.exp(3 * s) + 1)
        invariant &= moved.points == curve.points and moved.auc == curve.auc
    record(10, worst <= 1e-10 and invariant,
           f"100 score sets, max |trapezoid - pair count| {worst:.1e}, transform invariant {invariant}")


def test_11_stratified_split():
    rng = np.random.default_rng(4242)
    ok = True
    for k in range(100):
        n0, n1 = int(rng.integers(2, 80)), int(rng.integers(2, 80))
        frac = float(rng.uniform(0.05, 0.95))
        labels = rng.permutation([0] * n0 + [1] * n1)
        tr, te = stratified_split_indices(labels, SamplingConfig(1, k, frac))
        ok &= set(tr).isdisjoint(te) and sorted([*tr, *te]) == list(range(n0 + n1))
        for c, n in ((0, n0), (1, n1)):
            ok &= abs((labels[te] == c).sum() / n - frac) <= 1 / n
    record(11, bool(ok), "100 random datasets: fractions within 1/class_count, disjoint, complete")


def test_12_run_all_determinism(tmp_path):
    def go(out):
        code = cli.main(["run-all", "--input", str(FIXTURE), "--sample-size", "200",
                         "--out", str(out), "--no-timestamp"])
        assert code == 0
        return {p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*"))
                if p.is_file()}

    a, b = go(tmp_path / "a"), go(tmp_path / "b")
    diff = sorted(k for k in a.keys() | b.keys() if a.get(k) != b.get(k))
    record(12, not diff and len(a) == 11,
           f"{len(a)} files compared, differing: {', '.join(diff) or 'none'}")


def test_13_non_negative_features():
    train, test, _ = corpus.prepare(FIXTURE, corpus.ColumnSpec(), SamplingConfig(200, 42, 0.2))
    f, X = features.fit_transform(features.FeaturizerConfig(), train.texts)
    Xt = f.transform(test.texts)
    low = min(X.values.min(), Xt.values.min())
    # the pipeline guard refuses to emit a negative entry
    try:
        train_nb(to_csr([[-1.0, 1.0], [1.0, 0.0]]), [0, 1])
        guarded = False
    except ValueError:
        guarded = True
    record(13, low >= 0 and guarded, f"min entry {low:.3g} over {X.nnz + Xt.nnz} stored values, "
                                      f"negative input rejected {guarded}")


def test_14_stylometrics():
    got = features.stylometrics(["WOW!! Really??"])[0]
    want = [14, 3, 0.666667, 0.666667, 0.285714]
    rounded = np.round(got, 6).tolist()
    record(14, rounded == want, f"{rounded} vs {want}")


def summary_lines() -> list[str]:
    lines = []
    for n in range(1, 15):
        status, detail = RESULTS.get(n, ("NOT RUN", ""))
        lines.append(f"criterion {n:>2}: {status:<7} {detail}")
    return lines


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(summary_lines()))
    sys.exit(code)
