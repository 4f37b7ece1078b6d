"""The child-sum tree-LSTM cell, one node at a time.

Builds a three-token dependency tree by hand, runs the structural
forward pass, and verifies two things numerically: the cell identity
c_j = i_j*u_j + sum_k f_jk*c_k at every node, and that the hand-coded
backward pass agrees with central finite differences.

Run: python demos/01_tree_lstm_cell.py
"""

import numpy as np

from treesent import DepTree, EmbeddingTable, Token, init_params, tree_forward
from treesent.dtlstm import example_loss_and_grads
from treesent.corpus import SstExample, ROOT
from treesent.nncore import gradient_check, make_rng

HIDDEN, EMBED = 6, 4

# "great tiny place": both modifiers attach to the noun, which is root.
tokens = [
    Token(index=1, surface="great", lemma="great", upos="ADJ",
          deprel="amod", head=2),
    Token(index=2, surface="tiny", lemma="tiny", upos="ADJ",
          deprel="amod", head=2),
    Token(index=3, surface="place", lemma="place", upos="NOUN",
          deprel="ROOT", head=ROOT),
]
tree = DepTree(tokens)
print(f"tree: {' '.join(t.surface for t in tokens)}")
print(f"postorder (leaves before their head): {tree.postorder()}")

rng = make_rng(7)
emb = EmbeddingTable(dim=EMBED, entries={
    t.surface: rng.standard_normal(EMBED) for t in tokens})
params = init_params(HIDDEN, EMBED, seed=3)

states = tree_forward(params, tree, emb)
for j, (state, pred) in states.items():
    # leaves have no children, so their summed child state is exactly zero
    residual = state.c - state.i * state.u - sum(
        (state.forgets[k] * states[k][0].c for k in tree.children[j]),
        np.zeros(HIDDEN))
    print(f"node {j} ({tokens[j].surface:>5}): |h|={np.linalg.norm(state.h):.3f}"
          f"  cell identity residual={np.abs(residual).max():.2e}"
          f"  prediction={pred.argmax_label}")

print("\nchecking the hand-derived backward pass against finite differences")
example = SstExample(tokens=[t.surface for t in tokens],
                     parents=[3, 3, 0], label=2)
params.store.zero_grads()
loss = example_loss_and_grads(params, example, emb)
analytic = {k: g.copy() for k, g in params.store.grads.items()}
params.store.zero_grads()


def loss_fn():
    snapshot = {k: g.copy() for k, g in params.store.grads.items()}
    value = example_loss_and_grads(params, example, emb)
    params.store.grads.update(snapshot)
    return value


worst = gradient_check(loss_fn, params.store, analytic, h=1e-5)
print(f"root NLL = {loss:.4f}; worst relative gradient error = {worst:.2e}")
assert worst < 1e-4
print("gradients verified.")
