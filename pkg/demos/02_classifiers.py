# Train the four classifiers on the bundled fixture corpus and compare them.
from pathlib import Path

import numpy as np

from sarcbench import corpus, features, models
from sarcbench.metrics import evaluate

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "data" / "fixture_200.tsv"

train, test, stats = corpus.prepare(FIXTURE, corpus.ColumnSpec(), corpus.SamplingConfig(200, 42, 0.2))
print(stats)
print(len(train), len(test), test.class_counts())

feat, X = features.fit_transform(features.FeaturizerConfig(), train.texts)
Xt = feat.transform(test.texts)
print("features:", feat.block_widths)

for name in models.MODEL_NAMES:
    m = models.train(name, X, train.labels)
    rep = evaluate(test.labels, m.predict(Xt))
    print(f"{name:7s} acc={rep.accuracy:.3f} f1={rep.per_class[1].f1:.3f}")

# logistic regression records how the optimizer finished
lr = models.train("logreg", X, train.labels)
print(lr.meta)

# the forest is reproducible from its seed
rf1 = models.train_random_forest(X, train.labels, n_trees=20, seed=3)
rf2 = models.train_random_forest(X, train.labels, n_trees=20, seed=3, n_jobs=4)
print(np.array_equal(rf1.predict_proba(Xt), rf2.predict_proba(Xt)))

# naive bayes: most indicative style features per class
nb = models.train("nb", X, train.labels)
style = slice(feat.total_width - len(features.STYLE_FEATURES), feat.total_width)
print(dict(zip(features.STYLE_FEATURES, np.round(nb.feature_log_prob[1, style] - nb.feature_log_prob[0, style], 3))))
