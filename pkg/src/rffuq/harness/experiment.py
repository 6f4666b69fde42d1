"""Leave-one-output-out experiment over trials and feature counts.

Every ``(trial, J)`` pair is an independent unit of work. Its randomness
comes from streams derived off ``RngStream(seed)``:

* ``("trial", t) / ("data", 0)``            synthetic dataset (weights, latents, noise)
* ``("trial", t) / ("basis", J)``           RFF frequencies
* ``("trial", t) / ("train", J)``           training-latent samples
* ``("trial", t) / ("test", J) / ("row", i) / ("dim", d)``
  restarts and latent draws for test row ``i`` with output ``d`` held out

so results do not depend on how units are spread across worker processes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .. import latent, synthgen, uq
from ..errors import InvalidConfig, TrialFailed
from ..numkit import RngStream
from ..rff import sample_basis
from .config import ExperimentConfig

__all__ = [
    "TrialResult",
    "RESULTS_HEADER",
    "trial_data",
    "trial_dataset",
    "evaluate_test_set",
    "run_unit",
    "run_experiment",
    "results_rows",
    "format_results",
    "write_results",
    "read_results",
]

RESULTS_HEADER = ("trial", "j", "dim", "type", "value")
UNCERTAINTY_TYPES = ("aleatoric", "epistemic")
D_Y = 4

# Upper bound on (points x features) per batched test-inference call.
_CHUNK_BUDGET = 2_000_000


@dataclass(frozen=True)
class TrialResult:
    """Per-dimension test-set averages for one ``(trial, J)`` unit.

    ``avg_aleatoric[d]`` / ``avg_epistemic[d]`` average the reports of every
    test row in which output ``d`` (0-based) was the missing one. The last
    three fields are audit counters over all reports of the unit.
    """

    trial: int
    J: int
    avg_aleatoric: tuple[float, ...]
    avg_epistemic: tuple[float, ...]
    n_reports: int
    additivity_violations: int
    min_component: float

    def __post_init__(self):
        for name in ("avg_aleatoric", "avg_epistemic"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != D_Y:
                raise InvalidConfig(f"{name} needs {D_Y} entries, got {len(vals)}")
            object.__setattr__(self, name, vals)

    def value(self, kind: str, d: int) -> float:
        return {"aleatoric": self.avg_aleatoric, "epistemic": self.avg_epistemic}[kind][d]


def trial_data(config: ExperimentConfig, trial: int) -> synthgen.SyntheticDataset:
    """The full synthetic dataset of ``trial`` (train rows first)."""
    stream = RngStream(config.seed).derive("trial", trial)
    return synthgen.generate(config.n, config.sigma_x, config.sigma_w, config.sigma_eps, rng=stream.derive("data", 0))


def trial_dataset(config: ExperimentConfig, trial: int) -> synthgen.Split:
    return synthgen.split(trial_data(config, trial), config.n_train)


def _leave_one_out(Y: np.ndarray):
    """Rows ``(i, d)`` in order i-major: values, masks (d unobserved), row and dim indices."""
    B = Y.shape[0]
    rows = np.repeat(np.arange(B), D_Y)
    dims = np.tile(np.arange(D_Y), B)
    masks = np.ones((B * D_Y, D_Y))
    masks[np.arange(B * D_Y), dims] = 0.0
    return Y[rows], masks, rows, dims


def evaluate_test_set(model: latent.TrainedModel, Y_test, stream: RngStream, config: latent.ModelConfig | None = None):
    """Hold out each output of each test row in turn and build its report.

    Returns a list of ``(row, dim, UncertaintyReport)`` in row-major order
    (``dim`` 0-based). ``stream`` is the ``("test", J)`` stream of the unit.
    """
    config = config or model.config
    Y, masks, rows, dims = _leave_one_out(np.asarray(Y_test, dtype=float))
    rngs = [stream.derive("row", int(i)).derive("dim", int(d)) for i, d in zip(rows, dims)]
    per_chunk = max(1, _CHUNK_BUDGET // (config.M * config.restarts * model.basis.J))
    out = []
    for lo in range(0, len(Y), per_chunk):
        hi = min(lo + per_chunk, len(Y))
        draws = latent.sample_test_latents_batch(model, Y[lo:hi], masks[lo:hi], config, rngs[lo:hi])
        for k, dr in enumerate(draws):
            i, d = int(rows[lo + k]), int(dims[lo + k])
            out.append((i, d, uq.report(model, dr, [d])))
    return out


def run_unit(config: ExperimentConfig, trial: int, J: int) -> TrialResult:
    """Generate, train and evaluate one ``(trial, J)`` unit."""
    try:
        stream = RngStream(config.seed).derive("trial", trial)
        sp = trial_dataset(config, trial)
        mcfg = config.model_config(J)
        basis = sample_basis(mcfg.d_x, J, mcfg.lengthscale, stream.derive("basis", J))
        model = latent.train(sp.train.observations, mcfg, stream.derive("train", J), basis=basis)
        reports = evaluate_test_set(model, sp.test.observations, stream.derive("test", J), mcfg)
    except Exception as exc:
        raise TrialFailed(trial, J, exc) from exc

    ale = np.zeros(D_Y)
    epi = np.zeros(D_Y)
    counts = np.zeros(D_Y)
    violations = 0
    lowest = np.inf
    for _, d, rep in reports:
        e = rep[d]
        ale[d] += e.aleatoric
        epi[d] += e.epistemic_total
        counts[d] += 1
        if e.total != (e.epistemic_param + e.epistemic_latent) + e.aleatoric:
            violations += 1
        lowest = min(lowest, e.epistemic_param, e.epistemic_latent, e.aleatoric)
    return TrialResult(
        trial=trial,
        J=J,
        avg_aleatoric=tuple(ale / counts),
        avg_epistemic=tuple(epi / counts),
        n_reports=len(reports),
        additivity_violations=violations,
        min_component=float(lowest),
    )


def _unit_worker(args):
    config, trial, J = args
    with threadpool_limits(limits=1):
        return run_unit(config, trial, J)


def run_experiment(config: ExperimentConfig, workers: int = 1, progress=None) -> list[TrialResult]:
    """Run every ``(trial, J)`` unit; results come back sorted by ``(trial, J)``.

    BLAS is pinned to one thread in every process, so the output is
    bit-identical for any ``workers``. The first failing unit aborts the run
    with :class:`~rffuq.errors.TrialFailed`.

    Parameters
    ----------
    progress : callable, optional
        Called with each finished :class:`TrialResult` (in completion order).
    """
    if workers < 1:
        raise InvalidConfig(f"workers must be positive, got {workers}")
    units = [(config, t, J) for t in range(config.trials) for J in config.j_values]
    results = []
    if workers == 1:
        for unit in units:
            res = _unit_worker(unit)
            results.append(res)
            if progress:
                progress(res)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_unit_worker, units):
                results.append(res)
                if progress:
                    progress(res)
    return sorted(results, key=lambda r: (r.trial, r.J))


# ---------------------------------------------------------------------------
# Serialization


def results_rows(results) -> list[tuple[int, int, int, str, float]]:
    """Long-format rows ``(trial, j, dim, type, value)``, dim 1-based, sorted."""
    rows = [
        (r.trial, r.J, d + 1, kind, r.value(kind, d)) for r in results for d in range(D_Y) for kind in UNCERTAINTY_TYPES
    ]
    return sorted(rows, key=lambda row: row[:4])


def format_results(results, fmt: str = "csv") -> str:
    rows = results_rows(results)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for trial, j, dim, kind, value in rows:
            writer.writerow([trial, j, dim, kind, f"{value:.9g}"])
        return buf.getvalue()
    if fmt == "json":
        records = [dict(zip(RESULTS_HEADER, row)) for row in rows]
        audit = [
            {k: v for k, v in asdict(r).items() if k in ("trial", "J", "n_reports", "additivity_violations", "min_component")}
            for r in results
        ]
        return json.dumps({"results": records, "audit": audit}, indent=1) + "\n"
    raise InvalidConfig(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def write_results(results, path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.write_text(format_results(results, fmt))
    return path


def read_results(path) -> list[tuple[int, int, int, str, float]]:
    """Read long-format rows back from a results CSV or JSON file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        records = json.loads(text)["results"]
        return [(int(r["trial"]), int(r["j"]), int(r["dim"]), str(r["type"]), float(r["value"])) for r in records]
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != RESULTS_HEADER:
        raise InvalidConfig(f"{path}: expected header {','.join(RESULTS_HEADER)}, got {','.join(header)}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        trial, j, dim, kind, value = rec
        if kind not in UNCERTAINTY_TYPES:
            raise InvalidConfig(f"{path}: unknown uncertainty type {kind!r}")
        rows.append((int(trial), int(j), int(dim), kind, float(value)))
    return rows
