"""Numeric building blocks: initialization, log-softmax, Adagrad, and a
finite-difference gradient checker.

Parameters live in float64; checkpoints downcast to float32 on disk.
"""

from __future__ import annotations

import numpy as np


class NumericError(Exception):
    pass


class DimensionError(Exception):
    pass


def make_rng(seed: int) -> np.random.Generator:
    """The project-wide seeded generator (PCG64, portable across platforms)."""
    return np.random.Generator(np.random.PCG64(seed))


def glorot_init(rows: int, cols: int, rng_seed: int) -> np.ndarray:
    """Uniform Glorot/Xavier init in +-sqrt(6 / (rows + cols))."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"non-positive dims ({rows}, {cols})")
    bound = np.sqrt(6.0 / (rows + cols))
    rng = make_rng(rng_seed)
    return rng.uniform(-bound, bound, size=(rows, cols))


def log_softmax(v: np.ndarray) -> np.ndarray:
    """Numerically stable log-softmax: shifts by the max before exponentiating."""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 1:
        raise DimensionError("empty input")
    if not np.all(np.isfinite(v)):
        raise NumericError("non-finite input to log_softmax")
    shifted = v - np.max(v)
    return shifted - np.log(np.sum(np.exp(shifted)))


class ParamStore:
    """Named parameters with parallel gradient and Adagrad accumulator slots."""

    def __init__(self):
        self.values: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.accums: dict[str, np.ndarray] = {}

    def add(self, name: str, value: np.ndarray):
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise NumericError(f"non-finite initial value for {name}")
        self.values[name] = value
        self.grads[name] = np.zeros_like(value)
        self.accums[name] = np.zeros_like(value)

    def names(self) -> list[str]:
        return list(self.values)

    def zero_grads(self):
        for g in self.grads.values():
            g[...] = 0.0

    def reset_accumulators(self):
        for a in self.accums.values():
            a[...] = 0.0

    def copy(self) -> "ParamStore":
        other = ParamStore()
        for name, value in self.values.items():
            other.add(name, value.copy())
            other.accums[name][...] = self.accums[name]
        return other

    def flat_size(self) -> int:
        return sum(v.size for v in self.values.values())


def adagrad_step(params: ParamStore, lr: float, eps: float = 1e-8):
    """One Adagrad update over every parameter; zeroes gradients afterwards."""
    for name, value in params.values.items():
        g = params.grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {name}")
        acc = params.accums[name]
        acc += g * g
        value -= lr * g / (np.sqrt(acc) + eps)
        g[...] = 0.0


def gradient_check(loss_fn, params: ParamStore, analytic: dict[str, np.ndarray],
                   h: float = 1e-5, samples_per_tensor: int | None = None,
                   rng: np.random.Generator | None = None) -> float:
    """Compare analytic gradients against central finite differences.

    ``loss_fn`` is a pure function of the current parameter values.
    Checks every scalar, or ``samples_per_tensor`` random scalars per
    tensor. Returns the worst relative error
    ``|a - n| / max(|a|, |n|, 1e-8)``.

    The finite differences are evaluated with the parameters held in
    extended precision (``np.longdouble``) so that round-off in the
    loss evaluation, rather than the gradients under test, does not
    dominate the difference quotient at small ``h``.
    """
    worst = 0.0
    originals = dict(params.values)
    try:
        for name, value in originals.items():
            params.values[name] = np.asarray(value, dtype=np.longdouble)
        for name in originals:
            grad = np.asarray(analytic[name])
            flat = params.values[name].reshape(-1)
            gflat = grad.reshape(-1)
            if samples_per_tensor is not None and flat.size > samples_per_tensor:
                if rng is None:
                    rng = make_rng(0)
                idxs = rng.choice(flat.size, size=samples_per_tensor,
                                  replace=False)
            else:
                idxs = range(flat.size)
            for i in idxs:
                orig = flat[i]
                flat[i] = orig + h
                up = loss_fn()
                flat[i] = orig - h
                down = loss_fn()
                flat[i] = orig
                numeric = float((up - down) / (2.0 * np.longdouble(h)))
                a = float(gflat[i])
                err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
                worst = max(worst, err)
    finally:
        params.values.update(originals)
    return worst
