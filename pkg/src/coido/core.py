"""Domain types, dataset ingestion and validation, feature fusion, seeded
subsampling, and selection-file output.

Dataset files are JSON Lines: one self-describing record per line with fields
id, task, clip_embedding, llm_score, clip_score, image_reward, label.
Selection files are tab-separated ``id<TAB>task<TAB>score`` lines in canonical
order (task, score ascending, id ascending).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    EmptyDataset,
    IoFailure,
    LengthMismatch,
    MalformedRecord,
    NonFiniteInput,
)

_SCALAR_FIELDS = ("llm_score", "clip_score", "image_reward")
# round-off excursions of a cosine are clamped; anything worse is malformed
_CLIP_SCORE_SLACK = 1e-6


@dataclass(frozen=True)
class FeatureRecord:
    """One candidate datum: identity, task pool, features, and proxy label."""

    id: str
    task: str
    clip_embedding: np.ndarray
    llm_score: float
    clip_score: float
    image_reward: float
    label: int


@dataclass(frozen=True)
class FeatureVector:
    """Fused input to scorer/clustering: unit-normalized embedding + z-scored scores."""

    values: np.ndarray


@dataclass(frozen=True)
class Dataset:
    samples: list[FeatureRecord]
    tasks: frozenset[str]

    @property
    def N(self) -> int:
        return len(self.samples)

    @property
    def dim(self) -> int:
        return int(self.samples[0].clip_embedding.shape[0])

    @property
    def num_classes(self) -> int:
        return int(max(s.label for s in self.samples)) + 1


@dataclass(frozen=True)
class NormStats:
    """Per-scalar mean/std fitted on the training subset only."""

    means: np.ndarray  # order: llm_score, clip_score, image_reward
    stds: np.ndarray

    @staticmethod
    def fit(dataset: Dataset, indices) -> "NormStats":
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            raise EmptyDataset("cannot fit normalization stats on an empty subset")
        rows = np.array(
            [[getattr(dataset.samples[i], f) for f in _SCALAR_FIELDS] for i in idx]
        )
        return NormStats(means=rows.mean(axis=0), stds=rows.std(axis=0))


@dataclass(frozen=True)
class SelectionResult:
    """Chosen ids and raw scores, grouped per task."""

    gamma: float
    chosen: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def all_ids(self) -> set[str]:
        return {i for pairs in self.chosen.values() for i, _ in pairs}

    def total(self) -> int:
        return sum(len(p) for p in self.chosen.values())


def _parse_record(obj: dict, line_no: int, dim: int | None) -> FeatureRecord:
    rid = obj.get("id")
    label = f"id {rid!r}" if isinstance(rid, str) else f"line {line_no}"
    if not isinstance(rid, str) or not rid or "\t" in rid or "\n" in rid:
        raise MalformedRecord(f"{label}: missing or invalid 'id'")
    task = obj.get("task")
    if not isinstance(task, str) or not task or "\t" in task or "\n" in task:
        raise MalformedRecord(f"{label}: missing or invalid 'task'")
    emb = obj.get("clip_embedding")
    if not isinstance(emb, list) or not emb:
        raise MalformedRecord(f"{label}: missing or invalid 'clip_embedding'")
    embedding = np.asarray(emb, dtype=np.float64)
    if embedding.ndim != 1 or not np.all(np.isfinite(embedding)):
        raise MalformedRecord(f"{label}: clip_embedding must be a finite 1-d array")
    if dim is not None and embedding.shape[0] != dim:
        raise DimensionMismatch(
            f"{label}: embedding length {embedding.shape[0]} differs from {dim}"
        )
    scalars = {}
    for name in _SCALAR_FIELDS:
        v = obj.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise MalformedRecord(f"{label}: missing or non-finite '{name}'")
        scalars[name] = float(v)
    cs = scalars["clip_score"]
    if abs(cs) > 1.0 + _CLIP_SCORE_SLACK:
        raise MalformedRecord(f"{label}: clip_score {cs} outside [-1, 1]")
    scalars["clip_score"] = min(1.0, max(-1.0, cs))
    lab = obj.get("label")
    if not isinstance(lab, int) or isinstance(lab, bool) or lab < 0:
        raise MalformedRecord(f"{label}: 'label' must be a non-negative integer")
    return FeatureRecord(
        id=rid,
        task=task,
        clip_embedding=embedding,
        llm_score=scalars["llm_score"],
        clip_score=scalars["clip_score"],
        image_reward=scalars["image_reward"],
        label=lab,
    )


def load_dataset(path) -> Dataset:
    """Read and validate a JSONL dataset file, preserving record order."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    samples: list[FeatureRecord] = []
    seen: set[str] = set()
    dim: int | None = None
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"line {line_no}: invalid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise MalformedRecord(f"line {line_no}: record must be a JSON object")
        rec = _parse_record(obj, line_no, dim)
        if rec.id in seen:
            raise DuplicateId(rec.id)
        seen.add(rec.id)
        dim = rec.clip_embedding.shape[0] if dim is None else dim
        samples.append(rec)
    if not samples:
        raise EmptyDataset(f"no records in {path}")
    return Dataset(samples=samples, tasks=frozenset(s.task for s in samples))


def dump_dataset(dataset: Dataset, path) -> None:
    """Write a dataset back to JSONL (inverse of load_dataset)."""
    payload = []
    for s in dataset.samples:
        payload.append(
            json.dumps(
                {
                    "id": s.id,
                    "task": s.task,
                    "clip_embedding": [float(x) for x in s.clip_embedding],
                    "llm_score": s.llm_score,
                    "clip_score": s.clip_score,
                    "image_reward": s.image_reward,
                    "label": s.label,
                },
                sort_keys=True,
            )
        )
    _atomic_write(path, "\n".join(payload) + ("\n" if payload else ""))


def fuse_features(record: FeatureRecord, stats: NormStats) -> FeatureVector:
    """Unit-normalized embedding concatenated with z-scored scalar scores.

    A zero embedding stays zero; a zero-variance scalar z-scores to 0.
    """
    if not np.all(np.isfinite(stats.means)) or not np.all(np.isfinite(stats.stds)):
        raise NonFiniteInput("non-finite normalization stats")
    emb = record.clip_embedding
    if not np.all(np.isfinite(emb)):
        raise NonFiniteInput(f"id {record.id!r}: non-finite embedding")
    norm = float(np.linalg.norm(emb))
    head = emb / norm if norm > 0.0 else np.zeros_like(emb)
    raw = np.array([getattr(record, f) for f in _SCALAR_FIELDS])
    if not np.all(np.isfinite(raw)):
        raise NonFiniteInput(f"id {record.id!r}: non-finite scalar score")
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stats.stds > 0.0, (raw - stats.means) / stats.stds, 0.0)
    return FeatureVector(values=np.concatenate([head, z]))


def fuse_matrix(dataset: Dataset, indices, stats: NormStats) -> np.ndarray:
    """Stacked fused features for the given sample indices."""
    return np.stack(
        [fuse_features(dataset.samples[int(i)], stats).values for i in indices]
    )


def sample_training_subset(dataset: Dataset, p: float, seed: int) -> np.ndarray:
    """Uniform sample of max(1, floor(p% of N)) distinct indices, sorted."""
    if dataset.N == 0:
        raise EmptyDataset("cannot sample from an empty dataset")
    if not (0.0 < p <= 100.0):
        raise ValueError(f"p={p} outside (0, 100]")
    count = max(1, int(math.floor(p * dataset.N / 100.0)))
    rng = np.random.default_rng(int(seed))
    idx = rng.choice(dataset.N, size=count, replace=False)
    return np.sort(idx)


def selection_lines(result: SelectionResult) -> list[str]:
    rows = []
    for task in sorted(result.chosen):
        for rid, score in result.chosen[task]:
            rows.append((task, float(score), rid))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return [f"{rid}\t{task}\t{score!r}" for task, score, rid in rows]


def write_selection(result: SelectionResult, path) -> None:
    """Write the canonical selection file; byte-identical for identical inputs."""
    lines = selection_lines(result)
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_selection(path) -> list[tuple[str, str, float]]:
    """Parse a selection file into (id, task, score) rows."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    rows = []
    for line in raw.splitlines():
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MalformedRecord(f"bad selection line: {line!r}")
        rows.append((parts[0], parts[1], float(parts[2])))
    return rows


def _atomic_write(path, text: str) -> None:
    """Write via a temp file and rename so failures leave no partial output."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            if os.path.exists(tmp):
                os.unlink(tmp)
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def scores_by_task(dataset: Dataset, scores) -> dict[str, list[tuple[str, float]]]:
    """Group (id, score) pairs by task, aligned with dataset order."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (dataset.N,):
        raise LengthMismatch(f"{scores.shape[0]} scores for {dataset.N} samples")
    grouped: dict[str, list[tuple[str, float]]] = {}
    for rec, sc in zip(dataset.samples, scores):
        grouped.setdefault(rec.task, []).append((rec.id, float(sc)))
    return grouped
