"""Benchmark campaigns: configuration, the outer cross-validation loop and result files.

A campaign evaluates every (dataset, base classifier) pair with repeated
stratified k-fold cross-validation.  Inside each outer fold the features
are scaled on the training part, optionally reduced by CFS, the SCM
hyper-parameters are tuned by inner cross-validation, and the raw base
classifier plus its two SCM-corrected versions are scored on the test part.
"""

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import baseclf
from .baseclf import Kind
from .core import lowest_argmax, make_rng, fit_scaling
from .datasets import resolve
from .evaluation import BETA_GRID, GAMMA_GRID, INNER_FOLDS, K_GRID, losses_of, tune_knn, tune_scm
from .folds import stratified_kfold
from .rrc import Variant
from .scm import build_scm
from .selection import cfs_select

log = logging.getLogger(__name__)

VARIANTS = ("raw", "beta", "truncnorm")
RESULT_COLUMNS = ("dataset", "kind", "variant", "rep", "fold", "beta", "gamma", "K",
                  "zero_one", "ma_fdr", "ma_fnr", "ma_f1", "mi_fdr", "mi_fnr", "mi_f1", "millis")
LOSS_COLUMNS = RESULT_COLUMNS[8:15]

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    datasets: tuple
    seed: int
    kinds: tuple = ("nc",)
    variants: tuple = VARIANTS
    betas: tuple = BETA_GRID
    gammas: tuple = GAMMA_GRID
    ks: tuple = K_GRID
    repetitions: int = 10
    folds: int = 5
    inner_folds: int = INNER_FOLDS
    feature_selection: bool = False
    output: str = "results"
    workers: int = 1
    record_timings: bool = False

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; choose from {VARIANTS}")
        for k in self.kinds:
            try:
                Kind.parse(k)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.repetitions < 1 or self.folds < 2 or self.inner_folds < 2:
            raise ConfigError("need repetitions >= 1, folds >= 2 and inner_folds >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not self.betas or not self.gammas or not self.ks:
            raise ConfigError("hyper-parameter grids must not be empty")

    @classmethod
    def from_mapping(cls, data):
        known = {f.name: f for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "seed" not in data:
            raise ConfigError("the config must set a seed")
        if "datasets" not in data:
            raise ConfigError("the config must list datasets")
        values = {}
        try:
            for name, value in data.items():
                default = known[name].default
                if name in ("datasets", "kinds", "variants"):
                    values[name] = tuple(str(v) for v in _as_list(value))
                elif name in ("betas", "gammas"):
                    values[name] = tuple(float(v) for v in _as_list(value))
                elif name == "ks":
                    values[name] = tuple(int(v) for v in _as_list(value))
                elif isinstance(default, bool):
                    values[name] = _as_bool(value)
                elif name == "seed" or isinstance(default, int):
                    values[name] = int(_single(value))
                else:
                    values[name] = str(_single(value))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {name}: {exc}") from None
        return cls(**values)

    @classmethod
    def parse(cls, text):
        """JSON object, or ``key = value`` lines (repeat a key to build a list)."""
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                return cls.from_mapping(json.loads(stripped))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON config: {exc}") from None
        data = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            parts = [p.strip() for p in value.split(",") if p.strip()]
            data.setdefault(key, []).extend(parts)
        return cls.from_mapping(data)

    @classmethod
    def load(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(str(exc)) from None
        return cls.parse(text)

    def to_dict(self):
        return asdict(self)


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _single(value):
    items = _as_list(value)
    if len(items) != 1:
        raise ValueError("expected a single value")
    return items[0]


def _as_bool(value):
    v = _single(value)
    if isinstance(v, bool):
        return v
    text = str(v).lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


@dataclass(frozen=True)
class ResultRecord:
    dataset: str
    kind: str
    variant: str
    rep: int
    fold: int
    beta: float = None
    gamma: float = None
    k: int = None
    losses: tuple = ()
    millis: float = 0.0

    @property
    def key(self):
        return (self.dataset, self.kind, VARIANTS.index(self.variant), self.rep, self.fold)

    def row(self, with_timing=False):
        def num(v):
            return "" if v is None else repr(float(v))
        return [self.dataset, self.kind, self.variant, str(self.rep), str(self.fold),
                num(self.beta), num(self.gamma), "" if self.k is None else str(self.k),
                *(repr(float(v)) for v in self.losses),
                str(int(round(self.millis))) if with_timing else "0"]


@dataclass
class CampaignResult:
    records: list
    failures: list = field(default_factory=list)

    @property
    def exit_code(self):
        return EXIT_PARTIAL if self.failures else EXIT_OK


def dataset_name(spec):
    path = Path(spec)
    return path.stem if path.suffix.lower() in (".arff", ".csv") else str(spec)


def _evaluate_fold(config, name, dataset, kind, rep, fold, train_rows, test_rows):
    """All configured variants on one outer fold."""
    kind = Kind.parse(kind)
    scaling = fit_scaling(dataset.features[train_rows])
    data = scaling.apply(dataset)
    train, test = data.subset(train_rows), data.subset(test_rows)
    if config.feature_selection:
        keep = cfs_select(train)
        train, test = train.subset(columns=keep), test.subset(columns=keep)

    records = []
    for variant in config.variants:
        started = time.perf_counter()
        rng = make_rng(config.seed, "fold", name, kind.value, variant, rep, fold)
        beta = gamma = k = None
        if variant == "raw":
            hyper = {}
            if kind is Kind.KNN:
                k = tune_knn(train, rng, config.ks, config.inner_folds)
                hyper = {"k": k}
            model = baseclf.train(kind, train, **hyper)
            pred = lowest_argmax(model.predict_support(test.features))
        else:
            ks = config.ks if kind is Kind.KNN else None
            best = tune_scm(kind, train, variant, rng, config.betas, config.gammas, ks,
                            config.inner_folds)
            beta, k = best.beta, best.k
            gamma = best.gamma
            hyper = {} if k is None else {"k": k}
            scm = build_scm(kind, train, variant, beta, 0.5 if gamma is None else gamma, rng,
                            **hyper)
            pred = scm.decide(test.features)
        losses = losses_of(test.labels, pred, dataset.class_count)
        millis = 1000.0 * (time.perf_counter() - started)
        records.append(ResultRecord(name, kind.value, variant, rep, fold, beta, gamma, k,
                                    tuple(losses), millis))
    return records


def _dataset_tasks(config, spec):
    name = dataset_name(spec)
    dataset = resolve(spec)
    tasks = []
    for rep in range(config.repetitions):
        splits = stratified_kfold(dataset.labels, config.folds, make_rng(config.seed, "outer", name, rep))
        for kind in config.kinds:
            for fold, (tr, te) in enumerate(splits):
                tasks.append((name, dataset, kind, rep, fold, tr, te))
    return tasks


def _run_task(config, task):
    name, dataset, kind, rep, fold, tr, te = task
    return _evaluate_fold(config, name, dataset, kind, rep, fold, tr, te)


def run_campaign(config, write=True, progress=None):
    """Execute a campaign; returns a CampaignResult (records sorted by key).

    Failures are collected per dataset and the remaining datasets still
    run.  With ``write`` the result files go to ``config.output``.
    """
    records, failures = [], []
    jobs = []
    for spec in config.datasets:
        try:
            jobs.append((spec, _dataset_tasks(config, spec)))
        except Exception as exc:                      # noqa: BLE001 - reported, not raised
            log.error("dataset %s failed to load: %s", spec, exc)
            failures.append({"dataset": dataset_name(spec), "error": f"{type(exc).__name__}: {exc}"})

    executor = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for spec, tasks in jobs:
            name = dataset_name(spec)
            try:
                if executor is None:
                    chunks = [_run_task(config, t) for t in tasks]
                else:
                    chunks = list(executor.map(_run_task, [config] * len(tasks), tasks))
            except Exception as exc:                  # noqa: BLE001
                log.error("dataset %s failed: %s", name, exc)
                failures.append({"dataset": name, "error": f"{type(exc).__name__}: {exc}"})
                continue
            for chunk in chunks:
                records.extend(chunk)
            if progress is not None:
                progress(name)
    finally:
        if executor is not None:
            executor.shutdown()

    records.sort(key=lambda r: r.key)
    result = CampaignResult(records, failures)
    if write:
        write_outputs(config, result)
    return result


# -- persistence ----------------------------------------------------------------

def write_results(records, path, with_timing=False):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in records:
            w.writerow(r.row(with_timing))


def write_outputs(config, result):
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    write_results(result.records, out / "results.csv", config.record_timings)
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "kind", "variant", "rep", "fold", "millis"])
        for r in result.records:
            w.writerow([r.dataset, r.kind, r.variant, r.rep, r.fold, f"{r.millis:.1f}"])
    summary = {
        "config": config.to_dict(),
        "records": len(result.records),
        "failures": result.failures,
        "mean_losses": mean_losses(result.records),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def read_results(path):
    """Records from a results CSV (a directory means its results.csv)."""
    path = Path(path)
    if path.is_dir():
        path = path / "results.csv"
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESULT_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            def opt(key, cast):
                return cast(row[key]) if row[key] else None
            records.append(ResultRecord(
                row["dataset"], row["kind"], row["variant"], int(row["rep"]), int(row["fold"]),
                opt("beta", float), opt("gamma", float), opt("K", int),
                tuple(float(row[c]) for c in LOSS_COLUMNS), float(row["millis"])))
    return records


def mean_losses(records):
    """{kind: {dataset: {variant: [7 mean losses]}}}, averaged over repetitions and folds."""
    groups = {}
    for r in records:
        groups.setdefault((r.kind, r.dataset, r.variant), []).append(r.losses)
    out = {}
    for (kind, name, variant), rows in sorted(groups.items()):
        out.setdefault(kind, {}).setdefault(name, {})[variant] = \
            [float(v) for v in np.mean(np.array(rows), axis=0)]
    return out
