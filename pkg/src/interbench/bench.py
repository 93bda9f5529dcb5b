"""Replicated split -> train -> predict -> score experiments and their tabular reports."""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import models, simgen
from .errors import ConfigError, ExperimentError, InterbenchError
from .interval import IntervalDataset, SplitSpec, load_csv, split_indices
from .metrics import METRIC_NAMES, MetricsReport, evaluate
from .nn import TrainConfig

MODEL_ORDER = ("rann", "imlp", "ccrm", "ikrcr")
MODEL_LABELS = {"rann": "RANN", "imlp": "iMLP", "ccrm": "CCRM", "ikrcr": "IKRCR"}
METRIC_LABELS = {"mhd": "MHD", "rmse_l": "RMSE_L", "rmse_u": "RMSE_U", "cr": "CR"}
DATA_SOURCES = ("scenario1", "scenario2", "csv")

# 500 passes at batch size 32 over 240 training rows is 4000 Adam updates;
# full-batch training needs the same number of updates to converge.
DEFAULT_EPOCHS = 4000

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(*parts: int) -> int:
    """Hash a tuple of non-negative integers into one 64-bit seed."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & _MASK64))
    return h


def _default_rann():
    return TrainConfig(hidden_units=5, lam=1.0, learning_rate=0.001, epochs=DEFAULT_EPOCHS,
                       hidden_activation="sigmoid")


def _default_imlp():
    return TrainConfig(hidden_units=5, lam=0.0, learning_rate=0.001, epochs=DEFAULT_EPOCHS,
                       hidden_activation="tanh")


@dataclass(frozen=True)
class ExperimentConfig:
    data_source: str = "scenario1"
    n_samples: int = 300
    csv_path: str | None = None
    csv_target: str | None = None
    time_ordered: bool = False
    models: tuple = MODEL_ORDER
    replications: int = 30
    split: SplitSpec = field(default_factory=SplitSpec)
    rann_cfg: TrainConfig = field(default_factory=_default_rann)
    imlp_cfg: TrainConfig = field(default_factory=_default_imlp)
    ikrcr_bandwidth: float = 0.1
    master_seed: int = 0
    output_format: str = "markdown"
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.data_source not in DATA_SOURCES:
            raise ConfigError(f"data_source must be one of {DATA_SOURCES}, got {self.data_source!r}")
        if self.data_source == "csv" and not (self.csv_path and self.csv_target):
            raise ConfigError("csv data_source requires csv_path and csv_target")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.models:
            raise ConfigError("select at least one model")
        unknown = set(self.models) - set(MODEL_ORDER)
        if unknown:
            raise ConfigError(f"unknown model(s) {sorted(unknown)}; choose from {MODEL_ORDER}")
        if len(set(self.models)) != len(self.models):
            raise ConfigError("duplicate model names")
        if self.output_format not in ("csv", "markdown"):
            raise ConfigError("output_format must be csv or markdown")
        if self.master_seed < 0 or self.master_seed > _MASK64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if not self.ikrcr_bandwidth > 0:
            raise ConfigError("ikrcr_bandwidth must be > 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.imlp_cfg.hidden_activation != "tanh":
            raise ConfigError("the iMLP uses tanh hidden units")
        # canonical model order keeps reports independent of how the list was written
        object.__setattr__(self, "models", tuple(m for m in MODEL_ORDER if m in self.models))

    @property
    def split_mode(self) -> str:
        if self.data_source == "csv" and self.time_ordered:
            return "sequential"
        return self.split.mode


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _coerce(raw: str, typ, key: str):
    raw = raw.strip()
    try:
        if typ is bool:
            return _BOOL[raw.lower()]
        if typ is int:
            return int(raw, 0)
        if typ is float:
            return float(raw)
        if typ is tuple:
            return tuple(t.strip() for t in raw.replace(",", " ").split() if t.strip())
        if typ == "optstr":
            return raw or None
        return raw
    except (KeyError, ValueError):
        raise ConfigError(f"bad value {raw!r} for {key!r}") from None


_TOP_TYPES = {
    "data_source": str, "n_samples": int, "csv_path": "optstr", "csv_target": "optstr",
    "time_ordered": bool, "models": tuple, "replications": int, "ikrcr_bandwidth": float,
    "master_seed": int, "output_format": str, "output_path": "optstr", "workers": int,
}
_SPLIT_TYPES = {"train_fraction": float, "mode": str}
_TRAIN_TYPES = {
    "hidden_units": int, "lambda": float, "learning_rate": float, "epochs": int,
    "hidden_activation": str, "output_activation": str,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines.

    Nested settings use dotted keys (``rann_cfg.hidden_units = 4``,
    ``split.train_fraction = 0.6``). ``#`` and ``;`` start comments. An
    optional ``[experiment]`` header is accepted.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[experiment]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    if parser.sections() != ["experiment"]:
        raise ConfigError("config must be a single flat [experiment] block")

    top, split_kw, nested = {}, {}, {"rann_cfg": {}, "imlp_cfg": {}}
    for key, raw in parser.items("experiment"):
        if key in _TOP_TYPES:
            top[key] = _coerce(raw, _TOP_TYPES[key], key)
        elif key.startswith("split.") and key[6:] in _SPLIT_TYPES:
            split_kw[key[6:]] = _coerce(raw, _SPLIT_TYPES[key[6:]], key)
        elif "." in key and key.split(".", 1)[0] in nested and key.split(".", 1)[1] in _TRAIN_TYPES:
            head, name = key.split(".", 1)
            nested[head]["lam" if name == "lambda" else name] = _coerce(raw, _TRAIN_TYPES[name], key)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    try:
        if split_kw:
            top["split"] = SplitSpec(**split_kw)
        if nested["rann_cfg"]:
            top["rann_cfg"] = replace(_default_rann(), **nested["rann_cfg"])
        if nested["imlp_cfg"]:
            top["imlp_cfg"] = replace(_default_imlp(), **nested["imlp_cfg"])
        return ExperimentConfig(**top)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def config_items(cfg: ExperimentConfig) -> list[tuple[str, str]]:
    """Flatten ``cfg`` back to the key/value form ``parse_config`` reads."""
    items = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "split":
            items += [("split.train_fraction", repr(value.train_fraction)), ("split.mode", value.mode)]
        elif isinstance(value, TrainConfig):
            for name in _TRAIN_TYPES:
                v = getattr(value, "lam" if name == "lambda" else name)
                items.append((f"{f.name}.{name}", repr(v) if isinstance(v, float) else str(v)))
        elif isinstance(value, tuple):
            items.append((f.name, ", ".join(value)))
        elif value is None:
            items.append((f.name, ""))
        elif isinstance(value, bool):
            items.append((f.name, str(value).lower()))
        else:
            items.append((f.name, repr(value) if isinstance(value, float) else str(value)))
    return items


def dump_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config_items(cfg))


# ---------------------------------------------------------------- running


@dataclass(frozen=True)
class ReplicationResult:
    index: int
    seed: int
    split_hash: str
    reports: dict  # model name -> MetricsReport
    train_hashes: dict  # model name -> hash of the train rows it was fitted on


def _rows_hash(train_rows, test_rows) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(train_rows, dtype=np.int64).tobytes())
    h.update(b"|")
    h.update(np.asarray(test_rows, dtype=np.int64).tobytes())
    return h.hexdigest()[:16]


def load_data(cfg: ExperimentConfig, seed: int) -> IntervalDataset:
    if cfg.data_source == "csv":
        return load_csv(cfg.csv_path, cfg.csv_target)
    return simgen.generate(int(cfg.data_source[-1]), cfg.n_samples, seed)


def fit_model(name: str, train: IntervalDataset, cfg: ExperimentConfig, seed: int):
    if name == "rann":
        return models.train_rann(train, replace(cfg.rann_cfg, seed=seed))
    if name == "imlp":
        return models.train_imlp(train, replace(cfg.imlp_cfg, seed=seed))
    if name == "ccrm":
        return models.train_ccrm(train)
    if name == "ikrcr":
        return models.train_ikrcr(train, cfg.ikrcr_bandwidth)
    raise ConfigError(f"unknown model {name!r}")


def run_replication(cfg: ExperimentConfig, index: int, data: IntervalDataset | None = None) -> ReplicationResult:
    """One replication: data, one shared split, then every selected model."""
    seed = derive_seed(cfg.master_seed, index)
    if data is None:
        data = load_data(cfg, derive_seed(seed, 0))
    spec = SplitSpec(cfg.split.train_fraction, cfg.split_mode, derive_seed(seed, 1))
    train_rows, test_rows = split_indices(data.n_samples, spec)
    train, test = data.subset(train_rows), data.subset(test_rows)
    split_hash = _rows_hash(train_rows, test_rows)

    reports, hashes = {}, {}
    for name in cfg.models:
        model_seed = derive_seed(seed, 2, MODEL_ORDER.index(name))
        try:
            model = fit_model(name, train, cfg, model_seed)
            reports[name] = evaluate(test.y, model.predict(test))
        except InterbenchError as exc:
            raise ExperimentError(name, index, exc) from exc
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            raise ExperimentError(name, index, exc) from exc
        hashes[name] = split_hash
    return ReplicationResult(index, seed, split_hash, reports, hashes)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    replications: list  # ReplicationResult, ordered by index
    wall_time: float = 0.0

    @property
    def models(self) -> tuple:
        return self.config.models

    def per_model(self, name: str) -> list[MetricsReport]:
        return [r.reports[name] for r in self.replications]

    def values(self, name: str, metric: str) -> np.ndarray:
        return np.array([getattr(m, metric) for m in self.per_model(name)], dtype=float)

    def mean(self, name: str, metric: str) -> float:
        return float(np.mean(self.values(name, metric)))

    def std(self, name: str, metric: str) -> float:
        v = self.values(name, metric)
        return float(np.std(v, ddof=1)) if len(v) > 1 else float("nan")

    def crossed_total(self, name: str) -> tuple[int, int]:
        ms = self.per_model(name)
        return sum(m.crossed_count for m in ms), sum(m.n for m in ms)


def run_experiment(cfg: ExperimentConfig, replication_order=None) -> ExperimentReport:
    """Run every replication and collect results keyed by replication index.

    ``replication_order`` only changes execution order (used to check that
    the report does not depend on it). With ``cfg.workers > 1`` replications
    run in separate processes.
    """
    start = time.perf_counter()
    order = list(range(cfg.replications)) if replication_order is None else list(replication_order)
    if sorted(order) != list(range(cfg.replications)):
        raise ValueError("replication_order must be a permutation of range(replications)")
    shared = load_csv(cfg.csv_path, cfg.csv_target) if cfg.data_source == "csv" else None

    results = {}
    if cfg.workers > 1 and len(order) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {i: pool.submit(run_replication, cfg, i, shared) for i in order}
            for i in order:
                results[i] = futures[i].result()
    else:
        for i in order:
            results[i] = run_replication(cfg, i, shared)
    return ExperimentReport(cfg, [results[i] for i in range(cfg.replications)],
                            wall_time=time.perf_counter() - start)


# ---------------------------------------------------------------- rendering


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.3f}"


def render_markdown(report: ExperimentReport) -> str:
    cfg = report.config
    reps = cfg.replications
    lines = ["| Model | " + " | ".join(METRIC_LABELS[m] for m in METRIC_NAMES) + " |",
             "|---" * (len(METRIC_NAMES) + 1) + "|"]
    for name in report.models:
        cells = []
        for metric in METRIC_NAMES:
            cell = _fmt(report.mean(name, metric))
            if reps > 1:
                cell += f" ({_fmt(report.std(name, metric))})"
            cells.append(cell)
        lines.append(f"| {MODEL_LABELS[name]} | " + " | ".join(cells) + " |")

    source = cfg.data_source if cfg.data_source != "csv" else f"csv:{Path(cfg.csv_path).name}:{cfg.csv_target}"
    lines += [
        "",
        f"data: {source}; replications: {reps}; split: {cfg.split.train_fraction:g} train, "
        f"{cfg.split_mode}, shared by all models; master_seed: {cfg.master_seed}",
    ]
    crossed = []
    for name in report.models:
        c, n = report.crossed_total(name)
        crossed.append(f"{MODEL_LABELS[name]} {c}/{n}")
    lines.append("crossed test predictions: " + ", ".join(crossed))
    if any(report.crossed_total(name)[0] for name in report.models):
        lines.append("note: crossed predictions are scored with swapped bounds for MHD and zero overlap for CR")
    skipped = sum(m.zero_width_truth for name in report.models for m in report.per_model(name))
    if skipped:
        lines.append(f"note: {skipped} zero-width true interval(s) excluded from CR")
    return "\n".join(lines) + "\n"


CSV_FIELDS = ("model", "replication", "metric", "value")
_PER_REP_FIELDS = METRIC_NAMES + ("n", "crossed_count")


def render_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for name in report.models:
        for rep in report.replications:
            m = rep.reports[name]
            for metric in _PER_REP_FIELDS:
                v = getattr(m, metric)
                w.writerow([name, rep.index, metric, repr(float(v)) if isinstance(v, float) else v])
    for name in report.models:
        for metric in METRIC_NAMES:
            w.writerow([name, "mean", metric, repr(report.mean(name, metric))])
            if report.config.replications > 1:
                w.writerow([name, "std", metric, repr(report.std(name, metric))])
    return buf.getvalue()


def render_report(report: ExperimentReport, fmt: str = "markdown") -> str:
    if not report.replications or not report.models:
        raise ValueError("empty report")
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")


def read_csv_report(text: str) -> dict:
    """Parse ``render_csv`` output into ``{(model, replication, metric): value}``."""
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        rep = row["replication"]
        out[(row["model"], int(rep) if rep.isdigit() else rep, row["metric"])] = float(row["value"])
    return out
