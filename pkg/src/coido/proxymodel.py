"""Differentiable stand-in for the target model: a linear softmax classifier
producing per-sample cross-entropy losses and taking weighted gradient steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LabelOutOfRange, ShapeMismatch


@dataclass
class ProxyParams:
    """Weights of the linear classifier: logits = W x + b."""

    weight: np.ndarray  # (C, D)
    bias: np.ndarray  # (C,)

    @property
    def num_classes(self) -> int:
        return self.weight.shape[0]

    @property
    def dim(self) -> int:
        return self.weight.shape[1]

    def copy(self) -> "ProxyParams":
        return ProxyParams(self.weight.copy(), self.bias.copy())


def init_proxy(num_classes: int, dim: int, rng: np.random.Generator) -> ProxyParams:
    bound = 1.0 / np.sqrt(dim)
    return ProxyParams(
        weight=rng.uniform(-bound, bound, size=(num_classes, dim)),
        bias=rng.uniform(-bound, bound, size=num_classes),
    )


def proxy_forward(params: ProxyParams, x) -> np.ndarray:
    """Logits W x + b for one fused feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.dim,):
        raise DimensionMismatch(f"input dim {x.shape} vs weight {params.weight.shape}")
    return params.weight @ x + params.bias


def proxy_forward_batch(params: ProxyParams, xs: np.ndarray) -> np.ndarray:
    if xs.ndim != 2 or xs.shape[1] != params.dim:
        raise DimensionMismatch(f"batch shape {xs.shape} vs dim {params.dim}")
    return xs @ params.weight.T + params.bias


def per_sample_ce(logits, label: int) -> float:
    """Cross entropy -f_c + log sum_j exp(f_j), max-shifted for stability."""
    f = np.asarray(logits, dtype=np.float64)
    if not (0 <= int(label) < f.shape[0]):
        raise LabelOutOfRange(f"label {label} outside [0, {f.shape[0]})")
    m = float(np.max(f))
    return float(-f[int(label)] + m + np.log(np.sum(np.exp(f - m))))


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def batch_ce(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    m = logits.max(axis=1)
    lse = m + np.log(np.exp(logits - m[:, None]).sum(axis=1))
    return lse - logits[np.arange(logits.shape[0]), labels]


def proxy_weighted_grad(
    params: ProxyParams,
    xs: np.ndarray,
    labels,
    weights,
    sigma_i_sq_inv: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of (1/sigma_I^2) * sum_k w_k CE_k with respect to (W, b)."""
    labels = np.asarray(labels, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != params.dim:
        raise DimensionMismatch(f"batch shape {xs.shape} vs dim {params.dim}")
    if labels.shape[0] != xs.shape[0] or weights.shape[0] != xs.shape[0]:
        raise DimensionMismatch("batch, labels, and weights must have equal length")
    if labels.min() < 0 or labels.max() >= params.num_classes:
        raise LabelOutOfRange(f"labels outside [0, {params.num_classes})")
    probs = softmax_rows(proxy_forward_batch(params, xs))
    probs[np.arange(xs.shape[0]), labels] -= 1.0
    scaled = probs * (sigma_i_sq_inv * weights)[:, None]
    return scaled.T @ xs, scaled.sum(axis=0)


@dataclass
class AdamState:
    """First/second moment accumulators over a list of parameter arrays."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def for_arrays(arrays) -> "AdamState":
        return AdamState(
            m=[np.zeros_like(a) for a in arrays],
            v=[np.zeros_like(a) for a in arrays],
        )


def adam_step(arrays: list[np.ndarray], grads: list[np.ndarray], state: AdamState, lr: float) -> None:
    """In-place Adam update (bias-corrected, no weight decay)."""
    if len(arrays) != len(grads) or len(arrays) != len(state.m):
        raise ShapeMismatch("parameter/gradient/state arity mismatch")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.step
    bc2 = 1.0 - b2**state.step
    for a, g, m, v in zip(arrays, grads, state.m, state.v):
        if a.shape != g.shape:
            raise ShapeMismatch(f"gradient shape {g.shape} vs parameter {a.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        a -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
