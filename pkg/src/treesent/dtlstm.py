"""Child-sum dependency tree-LSTM.

Per-node cell math, tree forward passes with a 3-class prediction at
every node, root-supervised training with hand-derived backpropagation
through structure, and binary checkpoint persistence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from treesent.corpus import DepTree, EmbeddingTable, SstExample
from treesent.labels import LABELS, argmax_index, argmax_label
from treesent.nncore import (
    DimensionError,
    NumericError,
    ParamStore,
    adagrad_step,
    glorot_init,
    log_softmax,
    make_rng,
)

# Fixed tensor order; also the checkpoint payload order.
PARAM_ORDER = (
    "W_i", "W_f", "W_o", "W_u",
    "U_i", "U_f", "U_o", "U_u",
    "b_i", "b_f", "b_o", "b_u",
    "P", "b_p",
)

CHECKPOINT_MAGIC = b"TASTE001"


class CheckpointError(Exception):
    pass


class TrainingError(Exception):
    pass


class ModelParams:
    """All tree-LSTM weights plus the classifier projection."""

    def __init__(self, hidden_dim: int, embed_dim: int, store: ParamStore,
                 candidate_activation: str = "tanh", embedding_hash: str = ""):
        if candidate_activation not in ("tanh", "sigmoid"):
            raise ValueError(f"bad candidate_activation: {candidate_activation}")
        self.hidden_dim = hidden_dim
        self.embed_dim = embed_dim
        self.store = store
        self.candidate_activation = candidate_activation
        self.embedding_hash = embedding_hash
        self._check_shapes()

    def _check_shapes(self):
        h, e = self.hidden_dim, self.embed_dim
        expected = {name: (h, e) for name in ("W_i", "W_f", "W_o", "W_u")}
        expected.update({name: (h, h) for name in ("U_i", "U_f", "U_o", "U_u")})
        expected.update({name: (h,) for name in ("b_i", "b_f", "b_o", "b_u")})
        expected["P"] = (len(LABELS), h)
        expected["b_p"] = (len(LABELS),)
        for name, shape in expected.items():
            if name not in self.store.values:
                raise DimensionError(f"missing parameter {name}")
            if self.store.values[name].shape != shape:
                raise DimensionError(
                    f"{name}: expected shape {shape}, got {self.store.values[name].shape}"
                )

    def __getitem__(self, name: str) -> np.ndarray:
        return self.store.values[name]

    def copy(self) -> "ModelParams":
        return ModelParams(self.hidden_dim, self.embed_dim, self.store.copy(),
                           self.candidate_activation, self.embedding_hash)


def init_params(hidden_dim: int, embed_dim: int, seed: int,
                candidate_activation: str = "tanh") -> ModelParams:
    """Glorot-initialized weights, zero biases; deterministic per seed."""
    store = ParamStore()
    for k, name in enumerate(("W_i", "W_f", "W_o", "W_u")):
        store.add(name, glorot_init(hidden_dim, embed_dim, seed * 101 + k))
    for k, name in enumerate(("U_i", "U_f", "U_o", "U_u")):
        store.add(name, glorot_init(hidden_dim, hidden_dim, seed * 101 + 10 + k))
    for name in ("b_i", "b_f", "b_o", "b_u"):
        store.add(name, np.zeros(hidden_dim))
    store.add("P", glorot_init(len(LABELS), hidden_dim, seed * 101 + 20))
    store.add("b_p", np.zeros(len(LABELS)))
    return ModelParams(hidden_dim, embed_dim, store, candidate_activation)


@dataclass
class NodeState:
    h: np.ndarray
    c: np.ndarray
    h_tilde: np.ndarray
    i: np.ndarray
    o: np.ndarray
    u: np.ndarray
    forgets: list[np.ndarray]
    x: np.ndarray = None   # cached input vector, needed by the backward pass


@dataclass
class NodePrediction:
    log_probs: np.ndarray  # (negative, neutral, positive)

    @property
    def argmax_label(self) -> str:
        return argmax_label(self.log_probs)

    @property
    def argmax_index(self) -> int:
        return argmax_index(self.log_probs)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def node_forward(params: ModelParams, x_j: np.ndarray,
                 children: list[NodeState]) -> NodeState:
    """One cell step: gates on the summed child hidden states, one
    forget gate per child, candidate through tanh (or sigmoid when
    configured)."""
    x_j = np.asarray(x_j, dtype=np.float64)
    if x_j.shape != (params.embed_dim,):
        raise DimensionError(f"input width {x_j.shape} != embed_dim {params.embed_dim}")
    p = params
    h_tilde = np.zeros(p.hidden_dim)
    for child in children:
        h_tilde = h_tilde + child.h
    i = _sigmoid(p["W_i"] @ x_j + p["U_i"] @ h_tilde + p["b_i"])
    o = _sigmoid(p["W_o"] @ x_j + p["U_o"] @ h_tilde + p["b_o"])
    a_u = p["W_u"] @ x_j + p["U_u"] @ h_tilde + p["b_u"]
    u = np.tanh(a_u) if p.candidate_activation == "tanh" else _sigmoid(a_u)
    forgets = [_sigmoid(p["W_f"] @ x_j + p["U_f"] @ child.h + p["b_f"])
               for child in children]
    c = i * u
    for f, child in zip(forgets, children):
        c = c + f * child.c
    h = o * np.tanh(c)
    return NodeState(h=h, c=c, h_tilde=h_tilde, i=i, o=o, u=u,
                     forgets=forgets, x=x_j)


def classify(params: ModelParams, h: np.ndarray) -> NodePrediction:
    return NodePrediction(log_probs=log_softmax(params["P"] @ h + params["b_p"]))


def _forward_nodes(params, X, children, order):
    """Forward over an arbitrary tree given rows of X per node and a
    children-before-parents order. Returns per-node states and predictions."""
    n = len(order)
    states: list[NodeState | None] = [None] * n
    preds: list[NodePrediction | None] = [None] * n
    for j in order:
        try:
            kids = [states[k] for k in children[j]]
            states[j] = node_forward(params, X[j], kids)
            preds[j] = classify(params, states[j].h)
        except (DimensionError, NumericError) as exc:
            raise type(exc)(f"node {j}: {exc}") from exc
    return states, preds


def tree_forward(params: ModelParams, tree: DepTree, emb: EmbeddingTable
                 ) -> dict[int, tuple[NodeState, NodePrediction]]:
    """Post-order forward over a dependency tree; every node gets a
    state and a 3-class prediction."""
    if emb.dim != params.embed_dim:
        raise DimensionError(f"embedding dim {emb.dim} != model embed_dim {params.embed_dim}")
    X = [emb.lookup(t.surface) for t in tree.tokens]
    states, preds = _forward_nodes(params, X, tree.children, tree.postorder())
    return {j: (states[j], preds[j]) for j in range(len(tree))}


def _backward_nodes(params, states, preds, children, order, root, label):
    """Backprop through structure for the root NLL; accumulates into
    ``params.store.grads`` and returns the loss."""
    p = params
    grads = p.store.grads
    n = len(order)
    dh = [np.zeros(p.hidden_dim) for _ in range(n)]
    dc = [np.zeros(p.hidden_dim) for _ in range(n)]

    loss = -preds[root].log_probs[label]
    dlogits = np.exp(preds[root].log_probs)
    dlogits[label] -= 1.0
    grads["P"] += np.outer(dlogits, states[root].h)
    grads["b_p"] += dlogits
    dh[root] += p["P"].T @ dlogits

    for j in reversed(order):
        s = states[j]
        tc = np.tanh(s.c)
        do = dh[j] * tc
        dcj = dc[j] + dh[j] * s.o * (1.0 - tc * tc)
        da_o = do * s.o * (1.0 - s.o)
        di = dcj * s.u
        da_i = di * s.i * (1.0 - s.i)
        du = dcj * s.i
        if p.candidate_activation == "tanh":
            da_u = du * (1.0 - s.u * s.u)
        else:
            da_u = du * s.u * (1.0 - s.u)

        grads["W_i"] += np.outer(da_i, s.x)
        grads["W_o"] += np.outer(da_o, s.x)
        grads["W_u"] += np.outer(da_u, s.x)
        grads["b_i"] += da_i
        grads["b_o"] += da_o
        grads["b_u"] += da_u
        grads["U_i"] += np.outer(da_i, s.h_tilde)
        grads["U_o"] += np.outer(da_o, s.h_tilde)
        grads["U_u"] += np.outer(da_u, s.h_tilde)

        dh_tilde = p["U_i"].T @ da_i + p["U_o"].T @ da_o + p["U_u"].T @ da_u
        for slot, k in enumerate(children[j]):
            f = s.forgets[slot]
            df = dcj * states[k].c
            da_f = df * f * (1.0 - f)
            grads["W_f"] += np.outer(da_f, s.x)
            grads["b_f"] += da_f
            grads["U_f"] += np.outer(da_f, states[k].h)
            dh[k] += dh_tilde + p["U_f"].T @ da_f
            dc[k] += dcj * f
    return loss


def example_loss_and_grads(params: ModelParams, example: SstExample,
                           emb: EmbeddingTable) -> float:
    """Root negative log-likelihood of one example; gradients are
    accumulated into the parameter store."""
    children = example.children()
    root = example.root()
    order = _postorder(children, root)
    X = [emb.lookup(t) for t in example.tokens]
    states, preds = _forward_nodes(params, X, children, order)
    return _backward_nodes(params, states, preds, children, order, root,
                           example.label)


def _postorder(children, root):
    order = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
        else:
            stack.append((node, True))
            for child in reversed(children[node]):
                stack.append((child, False))
    return order


def predict_root(params: ModelParams, example: SstExample,
                 emb: EmbeddingTable) -> int:
    children = example.children()
    root = example.root()
    order = _postorder(children, root)
    X = [emb.lookup(t) for t in example.tokens]
    _, preds = _forward_nodes(params, X, children, order)
    return preds[root].argmax_index


@dataclass
class TrainConfig:
    epochs: int = 10
    lr: float = 0.05
    eps: float = 1e-8
    seed: int = 0
    shuffle: bool = True


@dataclass
class TrainReport:
    params: ModelParams          # best-dev snapshot
    dev_curve: list[float] = field(default_factory=list)
    train_losses: list[float] = field(default_factory=list)
    best_epoch: int | None = None   # 1-based; None when epochs == 0


def dev_accuracy(params: ModelParams, dev_set, emb) -> float:
    if not dev_set:
        return 0.0
    correct = sum(predict_root(params, ex, emb) == ex.label for ex in dev_set)
    return correct / len(dev_set)


def train(params: ModelParams, train_set: list[SstExample],
          dev_set: list[SstExample], emb: EmbeddingTable,
          config: TrainConfig) -> TrainReport:
    """Root-supervised training with per-example Adagrad updates.

    After each epoch the dev root accuracy is recorded; the returned
    parameters are the snapshot from the best dev epoch (ties keep the
    earlier epoch).
    """
    if not train_set:
        raise TrainingError("empty training set")
    if config.epochs == 0:
        return TrainReport(params=params.copy())

    rng = make_rng(config.seed)
    best = params.copy()
    best_acc = -1.0
    best_epoch = None
    curve = []
    losses = []
    indices = np.arange(len(train_set))

    for epoch in range(1, config.epochs + 1):
        if config.shuffle:
            rng.shuffle(indices)
        total = 0.0
        for idx in indices:
            loss = example_loss_and_grads(params, train_set[idx], emb)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at example {idx} (epoch {epoch})")
            total += loss
            adagrad_step(params.store, config.lr, config.eps)
        losses.append(total / len(train_set))
        acc = dev_accuracy(params, dev_set, emb)
        curve.append(acc)
        if acc > best_acc:
            best_acc = acc
            best = params.copy()
            best_epoch = epoch
    return TrainReport(params=best, dev_curve=curve, train_losses=losses,
                       best_epoch=best_epoch)


def save_checkpoint(params: ModelParams, path):
    """Binary checkpoint: magic, JSON header, float32 little-endian payload."""
    import json

    header = {
        "hidden_dim": params.hidden_dim,
        "embed_dim": params.embed_dim,
        "classes": list(LABELS),
        "candidate_activation": params.candidate_activation,
        "param_order": list(PARAM_ORDER),
        "embedding_hash": params.embedding_hash,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(len(header_bytes).to_bytes(4, "little"))
        f.write(header_bytes)
        for name in PARAM_ORDER:
            f.write(params[name].astype("<f4").tobytes(order="C"))


def load_checkpoint(path) -> ModelParams:
    import json

    with open(path, "rb") as f:
        blob = f.read()
    if blob[:8] != CHECKPOINT_MAGIC:
        raise CheckpointError("bad magic: not a model checkpoint")
    if len(blob) < 12:
        raise CheckpointError("truncated checkpoint header")
    header_len = int.from_bytes(blob[8:12], "little")
    if len(blob) < 12 + header_len:
        raise CheckpointError("truncated checkpoint header")
    try:
        header = json.loads(blob[12:12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError("corrupt checkpoint header") from exc
    if header.get("classes") != list(LABELS):
        raise CheckpointError(f"unexpected class order: {header.get('classes')}")
    if header.get("param_order") != list(PARAM_ORDER):
        raise CheckpointError("unexpected parameter order in checkpoint")
    h, e = header["hidden_dim"], header["embed_dim"]
    shapes = {
        "W_i": (h, e), "W_f": (h, e), "W_o": (h, e), "W_u": (h, e),
        "U_i": (h, h), "U_f": (h, h), "U_o": (h, h), "U_u": (h, h),
        "b_i": (h,), "b_f": (h,), "b_o": (h,), "b_u": (h,),
        "P": (len(LABELS), h), "b_p": (len(LABELS),),
    }
    payload = blob[12 + header_len:]
    expected = sum(int(np.prod(s)) for s in shapes.values()) * 4
    if len(payload) != expected:
        raise CheckpointError(
            f"corrupt payload: expected {expected} bytes, got {len(payload)}"
        )
    store = ParamStore()
    offset = 0
    for name in PARAM_ORDER:
        shape = shapes[name]
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        offset += count * 4
        store.add(name, arr.astype(np.float64).reshape(shape))
    return ModelParams(h, e, store,
                       candidate_activation=header.get("candidate_activation", "tanh"),
                       embedding_hash=header.get("embedding_hash", ""))
