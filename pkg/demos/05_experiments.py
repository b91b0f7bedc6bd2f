"""Seeded experiments and reports.

Each experiment pins (algorithm, family, trials, seed) and is exactly
reproducible; reports are written as 12-column CSV or mirrored JSON.
"""

import tempfile
from pathlib import Path

from secmatch.bench import ExperimentConfig, InstanceFamily, run_experiment, write_report

rows = []
for algorithm, fam, kw in [
    ("vertex", InstanceFamily(kind="uniform-complete", n=30), {}),
    ("vertex-ordinal-greedy", InstanceFamily(kind="uniform-complete", n=30), {}),
    ("edge", InstanceFamily(kind="disjoint-pairs", n=12), {}),
    ("ordinal", InstanceFamily(kind="hard-ordinal", n=200), {"ell": 100}),
]:
    cfg = ExperimentConfig(algorithm=algorithm, family=fam, trials=2000, seed=42, **kw)
    est, r = run_experiment(cfg)
    rows += r
    print(f"{algorithm:24s} mean ratio {est.mean_ratio:.4f} ± {est.stderr:.4f}")

out = Path(tempfile.mkdtemp()) / "report.csv"
write_report(rows, "csv", str(out))
print(f"\n{out}:")
print(out.read_text())
