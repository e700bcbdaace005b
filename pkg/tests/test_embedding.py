import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embtransfer.dynamics import DynamicsTracker
from embtransfer.embedding import (
    EmbeddingTable, FrozenEmbeddingError, embedding_losses, export_embedding_csv,
    neighbor_margin, separation_loss, separation_loss_grad, similarity_loss,
    similarity_loss_grad, train_embedding_step,
)
from embtransfer.nn import numeric_grad, relative_error


def brute_similarity(Phi, W):
    k = len(Phi)
    total = 0.0
    for i in range(k):
        for j in range(k):
            dot = sum(Phi[i][t] * Phi[j][t] for t in range(len(Phi[i])))
            total += (dot - W[i][j]) ** 2
    return total / (k * k)


def brute_separation(Phi, w, form="text"):
    k = len(Phi)
    vals = []
    for i in range(k):
        for j in range(i + 1, k):
            dist = sum((Phi[i][t] - Phi[j][t]) ** 2 for t in range(len(Phi[i]))) ** 0.5
            vals.append(max(w - dist, 0.0) if form == "text" else max(dist - w, 0.0))
    return sum(vals) / len(vals) if vals else 0.0


def test_embed_shape_and_determinism():
    table = EmbeddingTable(25, 10, rng=np.random.default_rng(0))
    v = table.embed(3)
    assert v.shape == (10,)
    np.testing.assert_array_equal(v, table.embed(3))
    with pytest.raises(IndexError):
        table.embed(25)
    with pytest.raises(ValueError):
        EmbeddingTable(5, 1)


def test_embed_matches_forward_of_one_hot():
    rng = np.random.default_rng(4)
    table = EmbeddingTable(6, 3, hidden=5, rng=rng)
    W1, b1, W2, b2 = table.net.params()
    for s in range(6):
        # a one-hot input selects row s of the first weight matrix
        expected = np.maximum(W1[s] + b1, 0) @ W2 + b2
        np.testing.assert_allclose(table.embed(s), expected, rtol=1e-12)


def test_similarity_examples():
    assert similarity_loss(np.array([[1.0, 0], [1, 0]]), np.ones((2, 2))) == 0.0
    assert similarity_loss(np.eye(2), np.ones((2, 2))) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 8), d=st.integers(2, 5))
def test_similarity_matches_brute_force(seed, k, d):
    rng = np.random.default_rng(seed)
    Phi = rng.normal(size=(k, d))
    W = rng.choice([-1.0, 1.0], size=(k, k))
    assert similarity_loss(Phi, W) == pytest.approx(brute_similarity(Phi.tolist(), W.tolist()), rel=1e-10)


def test_separation_examples():
    assert separation_loss(np.zeros((2, 3)), 0.5) == pytest.approx(0.5)
    assert separation_loss(np.array([[0.0, 0], [1, 0]]), 0.5) == 0.0
    assert separation_loss(np.ones((1, 4)), 0.5) == 0.0
    with pytest.raises(ValueError):
        separation_loss(np.zeros((2, 2)), 0.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), k=st.integers(2, 8), w=st.floats(0.1, 3.0),
       form=st.sampled_from(["text", "printed"]))
def test_separation_matches_brute_force(seed, k, w, form):
    Phi = np.random.default_rng(seed).normal(scale=0.7, size=(k, 3))
    assert separation_loss(Phi, w, form) == pytest.approx(brute_separation(Phi.tolist(), w, form), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_loss_gradients_finite_difference(seed):
    rng = np.random.default_rng(seed)
    k, d = 6, 4
    Phi = rng.normal(scale=0.4, size=(k, d))
    W = rng.choice([-1.0, 1.0], size=(k, k))
    W = np.triu(W) + np.triu(W, 1).T
    g = similarity_loss_grad(Phi, W)
    assert relative_error(g, numeric_grad(lambda: similarity_loss(Phi, W), Phi)) < 1e-4
    for form in ("text", "printed"):
        g = separation_loss_grad(Phi, 0.6, form)
        num = numeric_grad(lambda: separation_loss(Phi, 0.6, form), Phi)
        assert relative_error(g, num) < 1e-4


def two_room_tracker():
    """Two 3-cliques joined by a single bridge edge 2 -- 3."""
    tr = DynamicsTracker()
    for room in ([0, 1, 2], [3, 4, 5]):
        for a in room:
            for b in room:
                if a != b:
                    tr.observe(a, b)
    tr.observe(2, 3)
    tr.observe(3, 2)
    return tr


def full_loss(table, tracker, w=0.5):
    states = tracker.buffer
    Phi = table.embed_batch(states)
    rep, _ = embedding_losses(Phi, tracker.build_w_matrix(states), w)
    return rep.total


def test_training_reduces_loss_on_toy_graph():
    tr = two_room_tracker()
    table = EmbeddingTable(6, 4, hidden=16, rng=np.random.default_rng(0))
    from embtransfer.nn import OptimizerState
    opt = OptimizerState(lr=0.05)
    rng = np.random.default_rng(1)
    before = full_loss(table, tr)
    for _ in range(500):
        rep = train_embedding_step(table, tr, 4, 0.5, rng, opt)
        assert rep.L_s >= 0 and rep.L_csc >= 0 and rep.total == rep.L_s + rep.L_csc
    assert full_loss(table, tr) < before


def test_single_state_batch():
    tr = DynamicsTracker()
    tr.visit(2)
    table = EmbeddingTable(4, 3, rng=np.random.default_rng(0))
    phi = table.embed(2)
    rep = train_embedding_step(table, tr, 1, 0.5, np.random.default_rng(0))
    assert rep.L_csc == 0.0
    assert rep.L_s == pytest.approx((phi @ phi - 1.0) ** 2)


def test_repeated_states_excluded_from_separation():
    tr = DynamicsTracker()
    tr.visit(0)
    table = EmbeddingTable(3, 2, rng=np.random.default_rng(0))
    rep = train_embedding_step(table, tr, 5, 0.5, np.random.default_rng(0))
    assert rep.L_csc == 0.0


def test_frozen_table_rejects_training():
    tr = two_room_tracker()
    table = EmbeddingTable(6, 3, rng=np.random.default_rng(0))
    table.frozen = True
    before = table.net.flat().copy()
    with pytest.raises(FrozenEmbeddingError):
        train_embedding_step(table, tr, 4, 0.5, np.random.default_rng(0))
    np.testing.assert_array_equal(table.net.flat(), before)


def test_training_path_reads_only_buffer_and_neighbors():
    """The embedding step touches the tracker only through the buffer and neighbor sets."""

    class Spy(DynamicsTracker):
        def __init__(self):
            super().__init__()
            self.calls = set()

        def __getattribute__(self, name):
            if not name.startswith("_") and name != "calls":
                object.__getattribute__(self, "calls").add(name)
            return object.__getattribute__(self, name)

    tr = Spy()
    for a, b in [(0, 1), (1, 2), (2, 2)]:
        tr.observe(a, b)
    tr.calls.clear()
    table = EmbeddingTable(3, 2, rng=np.random.default_rng(0))
    train_embedding_step(table, tr, 3, 0.5, np.random.default_rng(0))
    assert tr.calls <= {"sample_state_batch", "build_w_matrix", "neighbors"}


def test_neighbor_margin_sign_for_hand_embedding():
    # a path 0-1-2-3 embedded on a line: neighbors are closer in inner product than ends
    table = EmbeddingTable(4, 2, hidden=0, rng=np.random.default_rng(0))
    table.net.layers[0].W[:] = [[1, 0], [0.7, 0.7], [0, 1], [-0.7, 0.7]]
    table.invalidate()
    oracle = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2}}
    assert neighbor_margin(table, oracle) > 0


def test_export_csv(tmp_path):
    table = EmbeddingTable(4, 3, rng=np.random.default_rng(0))
    path = tmp_path / "emb.csv"
    export_embedding_csv(table, path, cells=[(1, 1), (2, 1), (1, 2), (2, 2)])
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["state_id", "x", "y", "phi_1", "phi_2", "phi_3"]
    assert len(rows) == 5
    np.testing.assert_array_equal([float(v) for v in rows[2][3:]], table.embed(1))
