# Metrics, ROC/AUC and the SVG renderings, then the whole pipeline via the CLI.
import sys
import tempfile
from pathlib import Path

import numpy as np

from sarcbench import cli, metrics, plots

y = np.array([1, 0, 1, 0])
s = np.array([0.8, 0.7, 0.6, 0.5])
curve = metrics.roc(y, s)
print(curve.points, curve.auc)                     # AUC 0.75
print(metrics.mann_whitney_auc(y, s))

rep = metrics.evaluate([1, 0, 1], [1, 0, 0])
print(rep.confusion, rep.accuracy)
print(rep.per_class[1])

out = Path(tempfile.mkdtemp())
(out / "cm.svg").write_text(plots.confusion_svg(rep.confusion))
(out / "roc.svg").write_text(plots.roc_svg(curve))
print(sorted(p.name for p in out.iterdir()))

fixture = Path(__file__).resolve().parents[1] / "tests" / "data" / "fixture_200.tsv"
code = cli.main(["run-all", "--input", str(fixture), "--sample-size", "200",
                 "--out", str(out / "run"), "--no-timestamp"])
print("exit", code)
for p in sorted((out / "run").rglob("*")):
    if p.is_file():
        print(p.relative_to(out / "run"), p.stat().st_size)
sys.exit(code)
