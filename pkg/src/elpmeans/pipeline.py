"""End-to-end community detection: embed, score, pick centers, cluster, evaluate."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import output
from .centrality import (
    CenterSet,
    DecisionPoint,
    laplacian_centralities,
    minimum_distances,
    pairwise_distances,
    select_centers,
    similarity_weights,
)
from .clustering import KMeansResult, kmeans_random_init, kmeans_seeded
from .embedding import Embedding, SkipGramParams, format_embedding, generate_walks, train_skipgram
from .errors import ConfigError, DataError, DegenerateInputError
from .graph import Graph, GroundTruth, parse_edge_list, parse_labels
from .metrics import MetricsReport, evaluate

log = logging.getLogger(__name__)

DATASET_DIR = Path(__file__).parent / "datasets"

STAGES = ("embed", "distances", "centrality", "minimum_distance", "centers", "kmeans")


@dataclass(frozen=True)
class Preset:
    name: str
    k: int
    dim: int
    walks_per_node: int
    walk_length: int

    @property
    def edges_file(self) -> str:
        return f"{self.name}.edges"

    @property
    def labels_file(self) -> str:
        return f"{self.name}.labels"


# per-dataset parameters reported for the method
PRESETS = {
    p.name: p
    for p in (
        Preset("karate", k=2, dim=5, walks_per_node=100, walk_length=10),
        Preset("dolphins", k=2, dim=7, walks_per_node=50, walk_length=10),
        Preset("football", k=2, dim=7, walks_per_node=115, walk_length=10),
        Preset("polbooks", k=3, dim=5, walks_per_node=105, walk_length=13),
        Preset("emails", k=42, dim=7, walks_per_node=500, walk_length=10),
    )
}


def find_fixture(filename: str, data_dirs: Sequence[os.PathLike] = ()) -> Path | None:
    for d in [*map(Path, data_dirs), DATASET_DIR]:
        candidate = d / filename
        if candidate.is_file():
            return candidate
    return None


@dataclass
class RunConfig:
    edges_path: str
    labels_path: str | None = None
    dim: int = 5
    walks_per_node: int = 100
    walk_length: int = 10
    k: int | None = None
    auto_k: bool = False
    window: int = 5
    epochs: int = 5
    negative: int = 5
    lr: float = 0.025
    min_lr: float = 0.0001
    sigma_multiplier: float = 0.3
    max_iter: int = 300
    tol: float = 1e-6
    seed: int = 0
    out_dir: str | None = None
    baseline: bool = False
    svg: bool = True
    dump_walks: bool = False
    dump_embedding: bool = False

    def validate(self) -> "RunConfig":
        if (self.k is None) == (not self.auto_k):
            raise ConfigError("give exactly one of k or auto_k")
        for name in ("dim", "walks_per_node", "walk_length", "window", "epochs", "negative", "max_iter"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if not (self.lr > 0 and self.sigma_multiplier > 0 and self.tol >= 0 and self.min_lr >= 0):
            raise ConfigError("lr and sigma_multiplier must be positive, tol and min_lr nonnegative")
        return self

    @property
    def skipgram(self) -> SkipGramParams:
        return SkipGramParams(
            window=self.window,
            epochs=self.epochs,
            negative_samples=self.negative,
            learning_rate=self.lr,
            min_learning_rate=self.min_lr,
            seed=self.seed,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = data.get("config", data)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_preset(cls, name: str, data_dirs: Sequence[os.PathLike] = (), **overrides) -> "RunConfig":
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        p = PRESETS[name]
        edges = find_fixture(p.edges_file, data_dirs)
        labels = find_fixture(p.labels_file, data_dirs)
        if edges is None:
            raise DataError(f"no fixture {p.edges_file} in {[*map(str, data_dirs), str(DATASET_DIR)]}")
        fields = dict(
            edges_path=str(edges),
            labels_path=str(labels) if labels else None,
            dim=p.dim,
            walks_per_node=p.walks_per_node,
            walk_length=p.walk_length,
            k=p.k,
        )
        fields.update(overrides)
        return cls(**fields)


@dataclass(eq=False)
class Detection:
    """Every intermediate of one run, in pipeline order."""

    embedding: Embedding
    distances: np.ndarray
    centrality: np.ndarray
    points: list[DecisionPoint]
    centers: CenterSet
    kmeans: KMeansResult
    stages: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def assignment(self) -> np.ndarray:
        return self.kmeans.partition.assignment


class _Stages:
    def __init__(self):
        self.order: list[str] = []
        self.timings: dict[str, float] = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except DegenerateInputError as exc:
            if exc.stage is None:
                raise DegenerateInputError(str(exc), stage=name) from exc
            raise
        self.order.append(name)
        self.timings[name] = time.perf_counter() - t0
        log.debug("stage %s took %.3fs", name, self.timings[name])
        return result


def detect(
    graph: Graph,
    dim: int,
    walks_per_node: int,
    walk_length: int,
    k: int | None = None,
    params: SkipGramParams | None = None,
    sigma_multiplier: float = 0.3,
    max_iter: int = 300,
    tol: float = 1e-6,
    max_auto_k: int | None = None,
) -> Detection:
    """Run the detector on an in-memory graph; ``k=None`` picks K automatically."""
    params = params or SkipGramParams()
    if graph.node_count < 2:
        raise ConfigError("community detection needs at least two nodes")
    st = _Stages()

    def embed():
        corpus = generate_walks(graph, walks_per_node, walk_length, params.seed)
        return train_skipgram(corpus, dim, params)

    embedding = st.run("embed", embed)
    if not np.all(np.isfinite(embedding.vectors)):
        raise DegenerateInputError("embedding has non-finite entries", stage="embed")
    distances = st.run("distances", pairwise_distances, embedding)
    cent = st.run("centrality", lambda: laplacian_centralities(similarity_weights(distances, sigma_multiplier)))
    points = st.run("minimum_distance", minimum_distances, cent.c, distances)
    centers = st.run("centers", select_centers, points, embedding, k, max_auto_k)
    km = st.run("kmeans", kmeans_seeded, embedding, centers.centroids, max_iter, tol)
    return Detection(embedding, distances, cent.c, points, centers, km, st.order, st.timings)


@dataclass(eq=False)
class RunReport:
    config: RunConfig
    graph: Graph
    detection: Detection
    metrics: MetricsReport | None = None
    baseline: KMeansResult | None = None
    baseline_metrics: MetricsReport | None = None
    files: dict[str, str] = field(default_factory=dict)

    @property
    def partition(self):
        return self.detection.kmeans.partition

    @property
    def center_names(self) -> list[str]:
        return [self.graph.node_names[c] for c in self.detection.centers.centers]

    def metrics_dict(self) -> dict:
        out = {"elpmeans": self.metrics.to_dict() if self.metrics else None}
        if self.config.baseline:
            out["kmeans_random_init"] = self.baseline_metrics.to_dict() if self.baseline_metrics else None
            if self.metrics and self.baseline_metrics:
                out["acc_comparison"] = {
                    "elpmeans_acc_pairwise": self.metrics.acc,
                    "kmeans_random_init_acc_pairwise": self.baseline_metrics.acc,
                }
        return out

    def run_dict(self) -> dict:
        det = self.detection
        return {
            "config": self.config.to_dict(),
            "graph": {"nodes": self.graph.node_count, "edges": self.graph.edge_count},
            "k": det.centers.k,
            "centers": self.center_names,
            "stages": det.stages,
            "kmeans": {"iterations": det.kmeans.iterations, "converged": det.kmeans.converged, "inertia": det.kmeans.inertia},
            "timings": det.timings,
        }


def load_inputs(config: RunConfig) -> tuple[Graph, GroundTruth | None]:
    with open(config.edges_path, encoding="utf-8") as fh:
        graph = parse_edge_list(fh)
    truth = None
    if config.labels_path:
        with open(config.labels_path, encoding="utf-8") as fh:
            truth = parse_labels(fh, graph)
    return graph, truth


def run_pipeline(config: RunConfig, write: bool = True) -> RunReport:
    """Load the inputs named in ``config``, detect communities and write artifacts.

    With ``write`` and ``config.out_dir`` set, the directory receives
    ``communities.tsv``, ``decision_graph.csv``, ``metrics.json``,
    ``run.json`` and (unless disabled) ``decision_graph.svg``.
    """
    config.validate()
    graph, truth = load_inputs(config)
    det = detect(
        graph,
        config.dim,
        config.walks_per_node,
        config.walk_length,
        k=None if config.auto_k else config.k,
        params=config.skipgram,
        sigma_multiplier=config.sigma_multiplier,
        max_iter=config.max_iter,
        tol=config.tol,
    )
    report = RunReport(config, graph, det)
    if truth is not None:
        report.metrics = evaluate(det.kmeans.partition, truth)
    if config.baseline:
        report.baseline = kmeans_random_init(det.embedding, det.centers.k, config.seed, config.max_iter, config.tol)
        if truth is not None:
            report.baseline_metrics = evaluate(report.baseline.partition, truth)
    if write and config.out_dir:
        _write_run(report)
    return report


def _write_run(report: RunReport) -> None:
    cfg, graph, det = report.config, report.graph, report.detection
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = graph.node_names
    files = {
        "communities.tsv": output.format_communities(names, det.assignment),
        "decision_graph.csv": output.format_decision_graph(det.points, det.centers.centers, names),
        "metrics.json": output.dump_json(report.metrics_dict()),
        "run.json": output.dump_json(report.run_dict()),
    }
    if cfg.svg:
        files["decision_graph.svg"] = output.emit_decision_graph_svg(det.points, det.centers.centers, node_names=names)
    if cfg.dump_walks:
        corpus = generate_walks(graph, cfg.walks_per_node, cfg.walk_length, cfg.seed)
        files["walks.txt"] = corpus.to_text(names)
    if cfg.dump_embedding:
        files["embedding.tsv"] = format_embedding(det.embedding, names)
    for fname, text in files.items():
        output.write_text(out / fname, text)
        report.files[fname] = str(out / fname)


def _iqr(values) -> float:
    q1, q3 = np.percentile(values, [25, 75])
    return float(q3 - q1)


BENCH_COLUMNS = (
    "dataset",
    "nodes",
    "edges",
    "communities",
    "k",
    "dim",
    "num_walks",
    "walk_length",
    "seeds",
    "acc_median",
    "acc_iqr",
    "nmi_median",
    "nmi_iqr",
    "baseline_acc_median",
)


def run_benchmark(
    registry: dict[str, Preset] | Sequence[str] | None,
    seeds: Sequence[int],
    out_dir=None,
    data_dirs: Sequence[os.PathLike] = (),
    **overrides,
) -> list[dict]:
    """Multi-seed evaluation of each preset dataset against its labels.

    Datasets whose fixtures are missing are skipped with a warning; it is an
    error when nothing at all can be run. Writes ``results.md`` and
    ``results.csv`` to ``out_dir`` when given.
    """
    seeds = list(seeds)
    if not seeds:
        raise ConfigError("seed list is empty")
    if registry is None:
        registry = PRESETS
    if not isinstance(registry, dict):
        unknown = [n for n in registry if n not in PRESETS]
        if unknown:
            raise ConfigError(f"unknown preset(s) {unknown}")
        registry = {n: PRESETS[n] for n in registry}

    rows = []
    for name, preset in registry.items():
        edges = find_fixture(preset.edges_file, data_dirs)
        labels = find_fixture(preset.labels_file, data_dirs)
        if edges is None or labels is None:
            log.warning("skipping %s: fixture %s not found", name, preset.edges_file if edges is None else preset.labels_file)
            continue
        base = RunConfig.from_preset(name, data_dirs, baseline=True, **overrides)
        accs, nmis, base_accs = [], [], []
        graph = None
        communities = 0
        for seed in seeds:
            report = run_pipeline(dataclasses.replace(base, seed=seed), write=False)
            graph = report.graph
            accs.append(report.metrics.acc)
            nmis.append(report.metrics.nmi)
            base_accs.append(report.baseline_metrics.acc)
            communities = report.metrics.contingency.shape[1]
        rows.append(
            {
                "dataset": name,
                "nodes": graph.node_count,
                "edges": graph.edge_count,
                "communities": communities,
                "k": base.k,
                "dim": base.dim,
                "num_walks": base.walks_per_node,
                "walk_length": base.walk_length,
                "seeds": len(seeds),
                "acc_median": float(np.median(accs)),
                "acc_iqr": _iqr(accs),
                "nmi_median": float(np.median(nmis)),
                "nmi_iqr": _iqr(nmis),
                "baseline_acc_median": float(np.median(base_accs)),
            }
        )
    if not rows:
        raise DataError("no benchmark fixtures found")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        output.write_text(out / "results.csv", format_results_csv(rows))
        output.write_text(out / "results.md", format_results_markdown(rows))
    return rows


def format_results_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def format_results_markdown(rows: list[dict]) -> str:
    def cell(v):
        return f"{v:.4f}" if isinstance(v, float) else str(v)

    lines = ["| " + " | ".join(BENCH_COLUMNS) + " |", "|" + "---|" * len(BENCH_COLUMNS)]
    lines += ["| " + " | ".join(cell(r[c]) for c in BENCH_COLUMNS) + " |" for r in rows]
    return "\n".join(lines) + "\n"
