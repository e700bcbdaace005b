"""Network agents built on an embedding module and a separate value/policy module.

Gradients stop at the embedding boundary: TD and policy losses update only
the value/policy networks, and the embedding is trained (if at all) by the
dynamics losses in :mod:`embtransfer.embedding`.  With
``learn_embedding=False`` the embedding stays at its random initialization,
which is the plain deep baseline.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..embedding import EmbeddingTable, FrozenEmbeddingError, train_embedding_step
from ..nn import DenseNet, OptimizerState, sgd_step
from .base import Agent, AgentParams
from .replay import Batch, ExperienceRecord, ReplayBuffer


def td_value_update(agent: "DeepQAgent", batch: Batch, use_ir: Optional[bool] = None) -> float:
    """One step on the Q network toward ``r + gamma * max_a' Q_target(s', a')``.

    Returns the mean squared TD error measured before the step.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    use_ir = agent.use_ir if use_ir is None else use_ir
    feats = agent.features()
    r = batch.rewards(agent.beta, use_ir)
    q_next = agent.target_net.forward(feats[batch.s_next], cache=False).max(axis=1)
    y = r + agent.params.gamma * q_next * (~batch.done)
    q = agent.q_net.forward(feats[batch.s])
    rows = np.arange(len(batch))
    err = q[rows, batch.a] - y
    upstream = np.zeros_like(q)
    upstream[rows, batch.a] = 2.0 * err / len(batch)
    grads, _ = agent.q_net.backward(upstream)
    sgd_step(agent.q_net, grads, agent.q_opt)
    return float(np.mean(err * err))


class DeepQAgent(Agent):
    """Replay-based Q learner over ``phi(s)`` with a target network."""

    name = "dqn"

    def __init__(self, n_states, n_actions, tracker, params: AgentParams, seed=0,
                 use_ir=False, learn_embedding=False):
        super().__init__(n_states, n_actions, tracker, params, seed, use_ir)
        self.learn_embedding = learn_embedding
        self._embedding = EmbeddingTable(n_states, params.embedding_dim, params.hidden,
                                         rng=self.init_rng)
        emb_lr = params.lr if params.embedding_lr is None else params.embedding_lr
        self.emb_opt = OptimizerState(lr=emb_lr, kind=params.optimizer)
        self.replay = ReplayBuffer(params.replay_capacity)
        self._init_value_module()
        self.last_embedding_loss = None

    @property
    def embedding(self):
        return self._embedding

    def features(self) -> np.ndarray:
        return self._embedding.table()

    @property
    def feature_dim(self) -> int:
        return self._embedding.dim

    def _init_value_module(self) -> None:
        p = self.params
        self.q_net = DenseNet.build([self.feature_dim, p.hidden, self.n_actions], self.init_rng)
        self.target_net = self.q_net.copy()
        self.q_opt = OptimizerState(lr=p.lr, kind=p.optimizer)

    def action_values(self, s):
        return self.q_net.forward(self.features()[s], cache=False)

    def observe(self, rec: ExperienceRecord):
        self.replay.push(rec)
        if self.total_steps % self.params.target_sync == 0:
            self.target_net.load_params_from(self.q_net)

    def train(self):
        p = self.params
        out = {}
        if len(self.replay) >= p.batch_size:
            out["td_loss"] = td_value_update(self, self.replay.sample(p.batch_size, self.replay_rng))
        if self.learn_embedding and not self._embedding.frozen and len(self.tracker):
            rep = self.train_embedding()
            out["L_s"], out["L_csc"] = rep.L_s, rep.L_csc
        return out

    def freeze_for_transfer(self) -> None:
        """Freeze the embedding and restart value learning for a new task."""
        self._embedding.frozen = True
        self._init_value_module()
        self.replay.clear()

    def start_task(self, task_index):
        super().start_task(task_index)
        if task_index > 0:
            self.freeze_for_transfer()

    def train_embedding(self):
        if self._embedding.frozen:
            raise FrozenEmbeddingError("embedding table is frozen")
        p = self.params
        rep = train_embedding_step(self._embedding, self.tracker, p.state_batch_size,
                                   p.w_margin, self.embed_rng, self.emb_opt,
                                   loss_weight=p.embedding_loss_weight, form=p.separation_form)
        self.last_embedding_loss = rep
        return rep


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def actor_critic_update(agent: "ActorCriticAgent", batch: Batch, use_ir: Optional[bool] = None):
    """One-step TD actor-critic step; returns ``(policy_loss, value_loss)``.

    The TD error is computed once, before either network moves, and is
    treated as a constant in the policy gradient.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    use_ir = agent.use_ir if use_ir is None else use_ir
    feats = agent.features()
    n = len(batch)
    r = batch.rewards(agent.beta, use_ir)
    v_next = agent.critic.forward(feats[batch.s_next], cache=False)[:, 0]
    v = agent.critic.forward(feats[batch.s])[:, 0]
    delta = r + agent.params.gamma * v_next * (~batch.done) - v
    value_loss = float(np.mean(delta * delta))
    c_grads, _ = agent.critic.backward((-2.0 * delta / n)[:, None])

    logits = agent.actor.forward(feats[batch.s])
    pi = softmax(logits)
    rows = np.arange(n)
    logp = np.log(pi[rows, batch.a])
    policy_loss = float(-np.mean(delta * logp))
    onehot = np.zeros_like(pi)
    onehot[rows, batch.a] = 1.0
    a_grads, _ = agent.actor.backward(-(delta / n)[:, None] * (onehot - pi))

    sgd_step(agent.critic, c_grads, agent.critic_opt)
    sgd_step(agent.actor, a_grads, agent.actor_opt)
    return policy_loss, value_loss


class ActorCriticAgent(DeepQAgent):
    """Softmax policy and state-value critic, both reading ``phi(s)``.

    Exploration mixes epsilon-uniform actions with sampling from the policy.
    Updates use the most recent ``ac_replay_capacity`` transitions.
    """

    name = "ac"

    def __init__(self, n_states, n_actions, tracker, params: AgentParams, seed=0,
                 use_ir=False, learn_embedding=False):
        super().__init__(n_states, n_actions, tracker, params, seed, use_ir, learn_embedding)
        self.replay = ReplayBuffer(params.ac_replay_capacity)

    def _init_value_module(self):
        p = self.params
        self.actor = DenseNet.build([self.feature_dim, p.hidden, self.n_actions], self.init_rng)
        self.critic = DenseNet.build([self.feature_dim, p.hidden, 1], self.init_rng)
        self.actor_opt = OptimizerState(lr=p.lr, kind=p.optimizer)
        self.critic_opt = OptimizerState(lr=p.lr, kind=p.optimizer)

    def policy(self, s: int) -> np.ndarray:
        return softmax(self.actor.forward(self.features()[s], cache=False))

    def action_values(self, s):
        return self.actor.forward(self.features()[s], cache=False)

    def act(self, s, epsilon):
        rng = self.act_rng
        if rng.random() < epsilon:
            return int(rng.integers(self.n_actions))
        pi = self.policy(s)
        return int(min(np.searchsorted(np.cumsum(pi), rng.random(), side="right"),
                       self.n_actions - 1))

    def observe(self, rec):
        self.replay.push(rec)

    def train(self):
        p = self.params
        out = {}
        if len(self.replay) >= min(p.batch_size, self.replay.capacity):
            out["policy_loss"], out["value_loss"] = actor_critic_update(self, self.replay.all())
        if self.learn_embedding and not self._embedding.frozen and len(self.tracker):
            rep = self.train_embedding()
            out["L_s"], out["L_csc"] = rep.L_s, rep.L_csc
        return out
