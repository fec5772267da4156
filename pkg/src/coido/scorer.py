"""The lightweight scorer: a four-layer MLP mapping a fused feature vector to
a raw scalar score. Batch softmax of raw scores yields the weights that enter
the coupled objective; full-dataset inference yields selection scores.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .core import Dataset, NormStats, fuse_matrix
from .errors import DimensionMismatch, InconsistentBatch, ShapeMismatch
from .numerics import batch_softmax


@dataclass
class ScorerParams:
    """Four (weight, bias) pairs chained (D -> h -> h -> h -> 1), rectifier
    nonlinearities between layers, linear output."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def dim_in(self) -> int:
        return self.weights[0].shape[1]

    @property
    def hidden(self) -> int:
        return self.weights[0].shape[0]

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "ScorerParams":
        return ScorerParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def validate(self) -> None:
        if len(self.weights) != 4 or len(self.biases) != 4:
            raise ShapeMismatch("scorer must have exactly four layers")
        h = self.weights[0].shape[0]
        shapes = [
            (h, self.weights[0].shape[1]),
            (h, h),
            (h, h),
            (1, h),
        ]
        for k, (w, b, want) in enumerate(zip(self.weights, self.biases, shapes)):
            if w.shape != want or b.shape != (want[0],):
                raise ShapeMismatch(f"layer {k}: weight {w.shape}, bias {b.shape}, expected {want}")


def init_scorer(dim_in: int, hidden: int, rng: np.random.Generator) -> ScorerParams:
    """Uniform fan-in initialization, deterministic from the generator state."""
    dims = [(hidden, dim_in), (hidden, hidden), (hidden, hidden), (1, hidden)]
    weights, biases = [], []
    for out_d, in_d in dims:
        bound = 1.0 / np.sqrt(in_d)
        weights.append(rng.uniform(-bound, bound, size=(out_d, in_d)))
        biases.append(rng.uniform(-bound, bound, size=out_d))
    return ScorerParams(weights=weights, biases=biases)


def scorer_forward(params: ScorerParams, x) -> float:
    """Raw score of one fused feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.dim_in,):
        raise DimensionMismatch(f"input shape {x.shape} vs dim_in {params.dim_in}")
    a = x
    for k in range(3):
        a = np.maximum(params.weights[k] @ a + params.biases[k], 0.0)
    return float(params.weights[3] @ a + params.biases[3])


def scorer_forward_batch(params: ScorerParams, xs: np.ndarray):
    """Raw scores for a batch plus the activation cache needed by backward."""
    if xs.ndim != 2 or xs.shape[1] != params.dim_in:
        raise DimensionMismatch(f"batch shape {xs.shape} vs dim_in {params.dim_in}")
    acts = [xs]
    a = xs
    for k in range(3):
        a = np.maximum(a @ params.weights[k].T + params.biases[k], 0.0)
        acts.append(a)
    raw = a @ params.weights[3].T + params.biases[3]
    return raw[:, 0], acts


def softmax_weight_chain(weights: np.ndarray, d_weights: np.ndarray) -> np.ndarray:
    """Apply the softmax Jacobian: dL/dr_l = w_l (dL/dw_l - sum_k dL/dw_k w_k)."""
    inner = float(d_weights @ weights)
    return weights * (d_weights - inner)


def scorer_backward_raw(params: ScorerParams, acts: list[np.ndarray], d_raw: np.ndarray):
    """Backprop d(total)/d(raw score) through the network; returns grads
    aligned with params.arrays()."""
    d_raw = np.asarray(d_raw, dtype=np.float64)
    s = acts[0].shape[0]
    if d_raw.shape != (s,):
        raise DimensionMismatch(f"upstream shape {d_raw.shape} vs batch {s}")
    g_w = [np.zeros_like(w) for w in params.weights]
    g_b = [np.zeros_like(b) for b in params.biases]
    delta = d_raw[:, None]  # (s, 1)
    g_w[3] = delta.T @ acts[3]
    g_b[3] = delta.sum(axis=0)
    back = delta @ params.weights[3]
    for k in (2, 1, 0):
        dz = back * (acts[k + 1] > 0.0)
        g_w[k] = dz.T @ acts[k]
        g_b[k] = dz.sum(axis=0)
        if k > 0:
            back = dz @ params.weights[k]
    grads = []
    for w, b in zip(g_w, g_b):
        grads.append(w)
        grads.append(b)
    return grads


def scorer_backward(params: ScorerParams, acts: list[np.ndarray], weights: np.ndarray, d_weights: np.ndarray):
    """Gradients of the loss with respect to scorer parameters, composing the
    batch-softmax Jacobian with per-sample backprop."""
    d_weights = np.asarray(d_weights, dtype=np.float64)
    if d_weights.shape != weights.shape:
        raise DimensionMismatch(f"dL/dw shape {d_weights.shape} vs weights {weights.shape}")
    return scorer_backward_raw(params, acts, softmax_weight_chain(weights, d_weights))


def make_batch_weights(raw_scores) -> np.ndarray:
    """Softmax of raw scores over the batch."""
    return batch_softmax(raw_scores)


@dataclass(frozen=True)
class BatchState:
    """Everything the coupled objective needs about one minibatch."""

    indices: np.ndarray
    raw_scores: np.ndarray
    weights: np.ndarray
    ces: np.ndarray
    cluster_ids: np.ndarray
    present: np.ndarray  # sorted distinct cluster ids in this batch
    counts: np.ndarray  # per-present-cluster member counts

    @property
    def s(self) -> int:
        return int(self.raw_scores.shape[0])

    @property
    def m(self) -> int:
        return int(self.present.shape[0])

    @staticmethod
    def build(indices, raw_scores, ces, cluster_ids) -> "BatchState":
        indices = np.asarray(indices, dtype=np.int64)
        raw = np.asarray(raw_scores, dtype=np.float64)
        ces = np.asarray(ces, dtype=np.float64)
        cids = np.asarray(cluster_ids, dtype=np.int64)
        if not (indices.shape == raw.shape == ces.shape == cids.shape):
            raise InconsistentBatch(
                f"mismatched batch arrays: {indices.shape}, {raw.shape}, {ces.shape}, {cids.shape}"
            )
        if raw.size == 0:
            raise InconsistentBatch("empty batch")
        weights = batch_softmax(raw)
        present, counts = np.unique(cids, return_counts=True)
        return BatchState(
            indices=indices,
            raw_scores=raw,
            weights=weights,
            ces=ces,
            cluster_ids=cids,
            present=present,
            counts=counts,
        )


def infer_all_scores(params: ScorerParams, dataset: Dataset, stats: NormStats) -> np.ndarray:
    """Raw score per sample, aligned with dataset order; no softmax applied."""
    xs = fuse_matrix(dataset, range(dataset.N), stats)
    raw, _ = scorer_forward_batch(params, xs)
    return raw


CHECKPOINT_FORMAT = "coido-scorer-v1"


def save_checkpoint(path, params: ScorerParams, stats: NormStats, fingerprint: str) -> None:
    """Self-describing JSON dump of layer shapes, parameters, normalization
    stats, and the config fingerprint."""
    from .core import _atomic_write

    params.validate()
    payload = {
        "format": CHECKPOINT_FORMAT,
        "dim_in": params.dim_in,
        "hidden": params.hidden,
        "layers": [
            {"weight": w.tolist(), "bias": b.tolist()}
            for w, b in zip(params.weights, params.biases)
        ],
        "norm_stats": {"means": stats.means.tolist(), "stds": stats.stds.tolist()},
        "config_fingerprint": fingerprint,
    }
    _atomic_write(path, json.dumps(payload, sort_keys=True))


def load_checkpoint(path) -> tuple[ScorerParams, NormStats, str]:
    from .errors import IoFailure, MalformedRecord

    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"checkpoint {path} is not valid JSON: {exc}") from exc
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise MalformedRecord(f"unknown checkpoint format {payload.get('format')!r}")
    layers = payload["layers"]
    params = ScorerParams(
        weights=[np.asarray(l["weight"], dtype=np.float64) for l in layers],
        biases=[np.asarray(l["bias"], dtype=np.float64) for l in layers],
    )
    params.validate()
    if params.dim_in != payload["dim_in"] or params.hidden != payload["hidden"]:
        raise ShapeMismatch("checkpoint header disagrees with stored layer shapes")
    ns = payload["norm_stats"]
    stats = NormStats(
        means=np.asarray(ns["means"], dtype=np.float64),
        stds=np.asarray(ns["stds"], dtype=np.float64),
    )
    return params, stats, str(payload.get("config_fingerprint", ""))


def config_fingerprint(text: str) -> str:
    """Stable fingerprint of a canonical config rendering."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
