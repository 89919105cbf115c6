"""Monte Carlo comparison of the four scatter estimators.

For every trial a ground-truth invariant scatter is drawn, one elliptical
sample stream is generated, and each sample size in the grid uses the leading
``n`` draws of that stream. Errors are relative Frobenius distances between
trace-normalized matrices.
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .errors import DimMismatch, InvalidInput, IoError
from .estimators import ESTIMATOR_NAMES, FixedPointConfig, estimate_all_four
from .objectives import RhoObjective
from .sampling import EllipticalModel, derive_seed, random_invariant_spd, sample_elliptical
from .spd_manifold import trace_normalize
from .symmetry import make_group

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "Record",
    "Failure",
    "SummaryRow",
    "estimation_error",
    "METRICS",
    "run_experiment",
    "summarize",
    "write_report",
    "read_report",
    "worker_count",
]

RECORDS_HEADER = "estimator,n,trial,error"
SUMMARY_HEADER = "estimator,n,mean_error,std_error,trials"
FAILURES_HEADER = "estimator,n,trial,reason"


def estimation_error(estimate, truth):
    """``||tn(estimate) - tn(truth)||_F / ||tn(truth)||_F`` with ``tn`` the
    trace normalization. Invariant to rescaling either argument."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise DimMismatch(f"estimate {estimate.shape} vs truth {truth.shape}")
    T = trace_normalize(truth)
    return float(np.linalg.norm(trace_normalize(estimate) - T) / np.linalg.norm(T))


METRICS = {"frobenius_normalized": estimation_error}


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise InvalidInput(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment grid and data model.

    ``quaternion_p`` is the size parameter handed to the group builder; for
    the default ``proper_quaternion`` group the real dimension is
    ``4 * quaternion_p``.
    """

    quaternion_p: int = 10
    sample_sizes: tuple = (150, 300, 450, 600)
    trials: int = 100
    tau_dof: int = 1
    objective: str = "tyler"
    beta: float = 1.0
    seed: int = 0
    group: str = "proper_quaternion"
    truth: str = "per_trial"
    metric: str = "frobenius_normalized"
    texture: str = "chi2"
    normalize_texture: bool = False
    tol: float = 1e-8
    max_iter: int = 500

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        object.__setattr__(self, "sample_sizes", sizes)
        if not sizes or any(n < 1 for n in sizes) or list(sizes) != sorted(set(sizes)):
            raise InvalidInput(f"sample_sizes must be nonempty, positive and ascending: {sizes}")
        if self.trials < 1:
            raise InvalidInput("trials must be at least 1")
        if self.truth not in ("per_trial", "fixed"):
            raise InvalidInput(f"truth must be 'per_trial' or 'fixed', got {self.truth!r}")
        if self.metric not in METRICS:
            raise InvalidInput(f"unknown metric {self.metric!r}")
        # fail early on bad group / objective parameters
        self.make_objective()

    def make_group(self):
        return make_group(self.group, self.quaternion_p)

    def make_objective(self):
        dim = self.make_group().dim
        if self.objective == "tyler":
            return RhoObjective.tyler(dim)
        return RhoObjective(self.objective, dim, self.beta)

    def fixed_point_config(self):
        return FixedPointConfig(tol=self.tol, max_iter=self.max_iter)

    @classmethod
    def from_text(cls, text):
        """Parse flat ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep:
                raise InvalidInput(f"line {lineno}: expected 'key = value'")
            if key not in types:
                raise InvalidInput(f"line {lineno}: unknown key {key!r}")
            try:
                if key == "sample_sizes":
                    values[key] = tuple(int(v) for v in value.replace(",", " ").split())
                elif types[key] in (int, "int"):
                    values[key] = int(value)
                elif types[key] in (float, "float"):
                    values[key] = float(value)
                elif types[key] in (bool, "bool"):
                    values[key] = _parse_bool(value)
                else:
                    values[key] = value
            except ValueError as exc:
                raise InvalidInput(f"line {lineno}: bad value for {key}: {exc}") from None
        return cls(**values)

    @classmethod
    def from_file(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise IoError(path, exc.strerror or str(exc)) from exc
        return cls.from_text(text)

    def to_text(self):
        lines = []
        for k, v in asdict(self).items():
            if k == "sample_sizes":
                v = ", ".join(str(n) for n in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


class Record(NamedTuple):
    estimator: str
    n: int
    trial: int
    error: float


class Failure(NamedTuple):
    estimator: str
    n: int
    trial: int
    reason: str


class SummaryRow(NamedTuple):
    estimator: str
    n: int
    mean_error: float
    std_error: float
    trials: int


@dataclass
class ExperimentReport:
    records: list
    summary: list
    metadata: dict
    failures: list = field(default_factory=list)

    def summary_for(self, estimator, n):
        for row in self.summary:
            if row.estimator == estimator and row.n == n:
                return row
        raise KeyError((estimator, n))

    def errors(self, estimator, n):
        """Per-trial errors for one cell, indexed by trial (NaN where failed)."""
        trials = self.metadata.get("config", {}).get("trials")
        if trials is None:
            trials = 1 + max((r.trial for r in self.records), default=-1)
        out = np.full(trials, np.nan)
        for r in self.records:
            if r.estimator == estimator and r.n == n:
                out[r.trial] = r.error
        return out


def _order_key(name):
    return (ESTIMATOR_NAMES.index(name) if name in ESTIMATOR_NAMES else len(ESTIMATOR_NAMES), name)


def _run_trial(cfg, trial):
    group = cfg.make_group()
    obj = cfg.make_objective()
    fp = cfg.fixed_point_config()
    metric = METRICS[cfg.metric]
    truth_seed = derive_seed(cfg.seed, 1, trial) if cfg.truth == "per_trial" else derive_seed(cfg.seed, 0)
    truth = random_invariant_spd(group.dim, group, truth_seed)
    model = EllipticalModel(
        truth,
        tau_dof=cfg.tau_dof,
        seed=derive_seed(cfg.seed, 2, trial),
        texture=cfg.texture,
        normalize_texture=cfg.normalize_texture,
    )
    stream = sample_elliptical(model, cfg.sample_sizes[-1])
    records, failures = [], []
    for n in cfg.sample_sizes:
        result = estimate_all_four(stream[:n], group, fp, obj)
        for name, est in result.estimates.items():
            records.append(Record(name, n, trial, metric(est, truth)))
        for name, fail in result.failures.items():
            failures.append(Failure(name, n, trial, fail.reason))
    return records, failures


def worker_count():
    """Worker processes for trials: ``SYMCOV_THREADS`` if set and positive,
    otherwise the machine's CPU count."""
    env = os.environ.get("SYMCOV_THREADS", "").strip()
    try:
        value = int(env) if env else 0
    except ValueError:
        value = 0
    return value if value > 0 else (os.cpu_count() or 1)


def summarize(records, estimators, sample_sizes):
    """Mean and standard error of the error per (estimator, n) cell."""
    cells = {}
    for r in records:
        cells.setdefault((r.estimator, r.n), []).append(r.error)
    rows = []
    for name in estimators:
        for n in sample_sizes:
            errs = np.array(cells.get((name, n), []), dtype=float)
            k = errs.size
            mean = float(errs.mean()) if k else float("nan")
            se = float(errs.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
            rows.append(SummaryRow(name, n, mean, se, k))
    return rows


def run_experiment(cfg, workers=None):
    """Run every trial and collect records, failures and a summary.

    Trials are independent and seeded from ``(cfg.seed, trial)``; they are
    dispatched to worker processes when more than one worker is available.
    Output is sorted, so it does not depend on the worker count.
    """
    workers = worker_count() if workers is None else max(1, int(workers))
    trials = range(cfg.trials)
    if workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=min(workers, cfg.trials)) as pool:
            outcomes = list(pool.map(_run_trial, [cfg] * cfg.trials, trials))
    else:
        outcomes = [_run_trial(cfg, t) for t in trials]

    records = sorted(
        (r for recs, _ in outcomes for r in recs),
        key=lambda r: (_order_key(r.estimator), r.n, r.trial),
    )
    failures = sorted(
        (f for _, fails in outcomes for f in fails),
        key=lambda f: (_order_key(f.estimator), f.n, f.trial),
    )
    metadata = {
        "artifact": "symcov",
        "version": __version__,
        "config": asdict(cfg),
        "dim": cfg.make_group().dim,
        "estimators": list(ESTIMATOR_NAMES),
    }
    summary = summarize(records, ESTIMATOR_NAMES, cfg.sample_sizes)
    return ExperimentReport(records, summary, metadata, failures)


def _fmt(x):
    return format(float(x), ".17g")


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def write_report(report, path):
    """Write ``<path>.records.csv`` and ``<path>.summary.csv``.

    Per-cell failures go to ``<path>.failures.csv`` and the config echo to
    ``<path>.meta.json``. Floats are written with 17 significant digits, so
    reading them back is exact.
    """
    path = str(path)
    rec = [RECORDS_HEADER] + [f"{r.estimator},{r.n},{r.trial},{_fmt(r.error)}" for r in report.records]
    summ = [SUMMARY_HEADER] + [
        f"{s.estimator},{s.n},{_fmt(s.mean_error)},{_fmt(s.std_error)},{s.trials}" for s in report.summary
    ]
    fail = [FAILURES_HEADER] + [
        f"{f.estimator},{f.n},{f.trial},{json.dumps(f.reason)}" for f in report.failures
    ]
    _write(path + ".records.csv", "\n".join(rec) + "\n")
    _write(path + ".summary.csv", "\n".join(summ) + "\n")
    _write(path + ".failures.csv", "\n".join(fail) + "\n")
    _write(path + ".meta.json", json.dumps(report.metadata, indent=2, sort_keys=True) + "\n")


def _read_rows(path, header):
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    if not lines or lines[0] != header:
        raise InvalidInput(f"{path}: expected header {header!r}")
    return [ln.split(",", len(header.split(",")) - 1) for ln in lines[1:] if ln]


def read_report(path):
    """Inverse of :func:`write_report`."""
    path = str(path)
    records = [Record(e, int(n), int(t), float(x)) for e, n, t, x in _read_rows(path + ".records.csv", RECORDS_HEADER)]
    summary = [
        SummaryRow(e, int(n), float(m), float(s), int(k))
        for e, n, m, s, k in _read_rows(path + ".summary.csv", SUMMARY_HEADER)
    ]
    failures = []
    meta = {}
    if Path(path + ".failures.csv").exists():
        failures = [
            Failure(e, int(n), int(t), json.loads(r))
            for e, n, t, r in _read_rows(path + ".failures.csv", FAILURES_HEADER)
        ]
    if Path(path + ".meta.json").exists():
        meta = json.loads(Path(path + ".meta.json").read_text())
    return ExperimentReport(records, summary, meta, failures)
