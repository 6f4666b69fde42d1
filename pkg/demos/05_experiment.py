"""The full J-sweep protocol: trials x feature counts, boxplot summary, SVGs.

Equivalent command line:

    rffuq run --config small.cfg --out out/ --workers 2
    rffuq summarize out/results.csv --out out/
    rffuq plot out/summary.csv --out out/

Run:  python demos/05_experiment.py [out_dir]
"""

import sys
from pathlib import Path

from rffuq.harness import (
    ExperimentConfig,
    format_config,
    render_boxplots,
    run_experiment,
    summarize,
    write_results,
    write_summary,
)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

# A few-second version of the desk protocol; ExperimentConfig() is the desk
# scale itself and ExperimentConfig.full_scale() the full one.
config = ExperimentConfig(n=60, n_train=48, trials=4, j_values=(10, 30), m=5, l=10, outer_iters=10, seed=1)
(out / "config.txt").write_text(format_config(config))

results = run_experiment(config, workers=2, progress=lambda r: print(f"trial {r.trial} J={r.J} done"))
write_results(results, out / "results.csv")

summaries = summarize(results)
write_summary(summaries, out / "summary.csv")
for s in summaries:
    if s.j == 30:
        print(f"J={s.j} y{s.dim} {s.type:<9} median {s.median:.3f}  IQR [{s.q1:.3f}, {s.q3:.3f}]  outliers {s.n_outliers}")

for path in render_boxplots(summaries, out):
    print("wrote", path)
