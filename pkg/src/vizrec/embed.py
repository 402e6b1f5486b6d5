"""Embedding learning over the knowledge graph.

Two scorers (translation and complex rotation), two losses (self-adversarial
negative sampling, the default, and the margin-ranking baseline), trained
with Adam on uniformly sampled triple batches. All gradients are exact and
analytic; the loss functions return them for every touched embedding so they
can be checked against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.special import expit as _sigmoid

from .kg import KnowledgeGraph, Triple

SCORERS = ("transe", "rotate")
NORMS = ("L1", "L2")
LOSSES = ("self_adversarial", "margin_ranking")


class EmbeddingError(ValueError):
    pass


class TrainingDiverged(RuntimeError):
    """Non-finite loss during training; carries the last good checkpoint."""

    def __init__(self, step: int, checkpoint: "EmbeddingModel | None"):
        super().__init__("training diverged at step %d" % step)
        self.step = step
        self.checkpoint = checkpoint


@dataclass
class TrainConfig:
    dim: int = 1000
    batch_size: int = 1024
    steps: int = 30000
    learning_rate: float = 0.001
    margin: float = 12.0
    temperature: float = 1.0
    n_neg: int = 64
    norm: str = "L2"
    seed: int = 0
    loss: str = "self_adversarial"
    scorer: str = "transe"
    project_entities: bool = False

    def __post_init__(self):
        if min(self.dim, self.batch_size, self.steps, self.n_neg) <= 0:
            raise EmbeddingError("dim/batch_size/steps/n_neg must be positive")
        if self.learning_rate <= 0 or self.margin <= 0 or self.temperature <= 0:
            raise EmbeddingError("learning_rate/margin/temperature must be positive")
        if self.norm not in NORMS:
            raise EmbeddingError("norm must be one of %s" % (NORMS,))
        if self.loss not in LOSSES:
            raise EmbeddingError("loss must be one of %s" % (LOSSES,))
        if self.scorer not in SCORERS:
            raise EmbeddingError("scorer must be one of %s" % (SCORERS,))
        if self.scorer == "rotate" and self.dim % 2:
            raise EmbeddingError("rotate needs an even dimension")


@dataclass
class EmbeddingModel:
    entity_vecs: np.ndarray  # (n_entities, d)
    relation_vecs: np.ndarray  # (n_relations, d) or (n_relations, d/2) phases
    scorer: str = "transe"
    norm: str = "L2"

    @property
    def dim(self) -> int:
        return self.entity_vecs.shape[1]

    def copy(self) -> "EmbeddingModel":
        return replace(
            self,
            entity_vecs=self.entity_vecs.copy(),
            relation_vecs=self.relation_vecs.copy(),
        )


@dataclass
class TrainBatch:
    positives: list[Triple]
    negatives: list[list[Triple]]

    def __post_init__(self):
        if len(self.positives) != len(self.negatives):
            raise EmbeddingError("one negative list per positive required")
        sizes = {len(ns) for ns in self.negatives}
        if len(sizes) > 1:
            raise EmbeddingError("negative lists must share one length")
        for pos, negs in zip(self.positives, self.negatives):
            for neg in negs:
                if neg.relation != pos.relation:
                    raise EmbeddingError("negative changed the relation")
                if (neg.head != pos.head) == (neg.tail != pos.tail):
                    raise EmbeddingError(
                        "negative must differ in exactly the head or the tail"
                    )


class Gradients(NamedTuple):
    entity: np.ndarray
    relation: np.ndarray


# ---------------------------------------------------------------------------
# scoring: g plus the terms every derivative reuses
# ---------------------------------------------------------------------------

def _transe_terms(E, R, h, r, t, norm):
    u = E[h] + R[r] - E[t]
    if norm == "L2":
        dist = np.sqrt(np.einsum("...d,...d->...", u, u))
        safe = np.where(dist == 0.0, 1.0, dist)
        uhat = u / safe[..., None]
        uhat[dist == 0.0] = 0.0
    else:
        dist = np.abs(u).sum(axis=-1)
        uhat = np.sign(u)
    return -dist, uhat


def _rotate_terms(E, R, h, r, t, norm):
    d2 = R.shape[1]
    eh, et = E[h], E[t]
    hre, him = eh[..., :d2], eh[..., d2:]
    tre, tim = et[..., :d2], et[..., d2:]
    theta = R[r]
    c, s = np.cos(theta), np.sin(theta)
    ure = hre * c - him * s - tre
    uim = hre * s + him * c - tim
    if norm == "L2":
        dist = np.sqrt(
            np.einsum("...d,...d->...", ure, ure)
            + np.einsum("...d,...d->...", uim, uim)
        )
        safe = np.where(dist == 0.0, 1.0, dist)[..., None]
        wre = ure / safe
        wim = uim / safe
        wre[dist == 0.0] = 0.0
        wim[dist == 0.0] = 0.0
    else:
        dist = np.abs(ure).sum(axis=-1) + np.abs(uim).sum(axis=-1)
        wre, wim = np.sign(ure), np.sign(uim)
    grads = {
        "hre": -(wre * c + wim * s),
        "him": -(-wre * s + wim * c),
        "tre": wre,
        "tim": wim,
        "theta": -(wre * (-hre * s - him * c) + wim * (hre * c - him * s)),
    }
    return -dist, grads


def _terms(E, R, h, r, t, scorer, norm):
    if scorer == "transe":
        return _transe_terms(E, R, h, r, t, norm)
    return _rotate_terms(E, R, h, r, t, norm)


def _scores(E, R, h, r, t, scorer, norm):
    g, _ = _terms(E, R, h, r, t, scorer, norm)
    return g


def score(model: EmbeddingModel, h: int, r: int, t: int) -> float:
    """Plausibility of one triple: 0 on exact placement, negative otherwise."""
    nE = model.entity_vecs.shape[0]
    nR = model.relation_vecs.shape[0]
    if not (0 <= h < nE and 0 <= t < nE and 0 <= r < nR):
        raise EmbeddingError("invalid id in (%d, %d, %d)" % (h, r, t))
    g = _scores(
        model.entity_vecs,
        model.relation_vecs,
        np.asarray([h]),
        np.asarray([r]),
        np.asarray([t]),
        model.scorer,
        model.norm,
    )
    return float(g[0])


def _index_add(acc: np.ndarray, idx: np.ndarray, rows: np.ndarray) -> None:
    """acc[idx[i]] += rows[i], duplicates accumulated (bincount-backed)."""
    d = acc.shape[1]
    flat_idx = idx.reshape(-1)
    flat_rows = rows.reshape(-1, d)
    offsets = (flat_idx[:, None] * d + np.arange(d)).reshape(-1)
    acc += np.bincount(
        offsets, weights=flat_rows.reshape(-1), minlength=acc.size
    ).reshape(acc.shape).astype(acc.dtype, copy=False)


def _relation_rows(rows: np.ndarray, r: np.ndarray):
    """Collapse the negatives axis when every negative shares its positive's
    relation (r has one fewer axis), so relation gradients scatter one row
    per positive."""
    if r.ndim == rows.ndim - 2:
        return rows.sum(axis=-2), r
    return rows, r


def _scatter(gradE, gradR, h, r, t, coef, terms, scorer):
    """Add coef * dg/d(embedding) into the dense gradient matrices."""
    if scorer == "transe":
        rows = coef[..., None] * terms
        _index_add(gradE, h, -rows)
        _index_add(gradE, t, rows)
        rrows, ridx = _relation_rows(rows, r)
        _index_add(gradR, ridx, -rrows)
    else:
        c = coef[..., None]
        _index_add(gradE, h, np.concatenate([c * terms["hre"], c * terms["him"]], axis=-1))
        _index_add(gradE, t, np.concatenate([c * terms["tre"], c * terms["tim"]], axis=-1))
        rrows, ridx = _relation_rows(c * terms["theta"], r)
        _index_add(gradR, ridx, rrows)


# ---------------------------------------------------------------------------
# negative sampling
# ---------------------------------------------------------------------------

def sample_negatives(
    triple: Triple, kg: KnowledgeGraph | int, n_neg: int, rng: np.random.Generator
) -> list[Triple]:
    """Corrupt the head or the tail (fair coin) with a uniform random entity.

    The replacement is redrawn while it equals the entity it replaces; no
    class-compatibility or false-negative filtering is applied.
    """
    n_entities = kg if isinstance(kg, int) else kg.n_entities
    if n_neg < 1:
        raise EmbeddingError("n_neg must be >= 1")
    if n_entities < 2:
        raise EmbeddingError("need at least 2 entities to corrupt triples")
    out = []
    for _ in range(n_neg):
        corrupt_head = bool(rng.integers(0, 2))
        original = triple.head if corrupt_head else triple.tail
        replacement = int(rng.integers(0, n_entities))
        while replacement == original:
            replacement = int(rng.integers(0, n_entities))
        if corrupt_head:
            out.append(Triple(replacement, triple.relation, triple.tail))
        else:
            out.append(Triple(triple.head, triple.relation, replacement))
    return out


def adversarial_weights(
    model: EmbeddingModel, negatives: list[Triple], alpha: float
) -> np.ndarray:
    """Softmax of alpha-scaled scores over one negative set."""
    if not negatives:
        raise EmbeddingError("empty negative set")
    h = np.asarray([n.head for n in negatives])
    r = np.asarray([n.relation for n in negatives])
    t = np.asarray([n.tail for n in negatives])
    g = _scores(model.entity_vecs, model.relation_vecs, h, r, t, model.scorer, model.norm)
    return _softmax(alpha * g)


def _softmax(x: np.ndarray) -> np.ndarray:
    z = np.exp(x - x.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# losses with analytic gradients
# ---------------------------------------------------------------------------

def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def _batch_arrays(batch: TrainBatch):
    ph = np.asarray([p.head for p in batch.positives])
    pr = np.asarray([p.relation for p in batch.positives])
    pt = np.asarray([p.tail for p in batch.positives])
    nh = np.asarray([[n.head for n in ns] for ns in batch.negatives])
    nt = np.asarray([[n.tail for n in ns] for ns in batch.negatives])
    return ph, pr, pt, nh, nt


def _selfadv_loss_grads(E, R, ph, pr, pt, nh, nt, scorer, norm, margin, alpha):
    # Distance form -log sig(margin - d(pos)) - sum w log sig(d(neg) - margin),
    # written with g = -d: positives pulled to exact placement, weighted
    # negatives pushed outside the margin.
    n_pos = ph.shape[0]
    nr = pr[:, None]
    gp, terms_p = _terms(E, R, ph, pr, pt, scorer, norm)
    gn, terms_n = _terms(E, R, nh, nr, nt, scorer, norm)
    w = _softmax(alpha * gn)  # treated as constant in the gradients
    loss_terms = _softplus(-(margin + gp)) + (w * _softplus(gn + margin)).sum(axis=-1)
    loss = float(loss_terms.mean())
    coef_p = -_sigmoid(-(margin + gp)) / n_pos
    coef_n = w * _sigmoid(gn + margin) / n_pos
    gradE = np.zeros_like(E)
    gradR = np.zeros_like(R)
    _scatter(gradE, gradR, ph, pr, pt, coef_p, terms_p, scorer)
    _scatter(gradE, gradR, nh, pr, nt, coef_n, terms_n, scorer)
    return loss, gradE, gradR


def _margin_loss_grads(E, R, ph, pr, pt, nh, nt, scorer, norm, margin):
    nr = pr[:, None]
    gp, terms_p = _terms(E, R, ph, pr, pt, scorer, norm)
    gn, terms_n = _terms(E, R, nh, nr, nt, scorer, norm)
    act = margin + gp[:, None] - gn
    active = act > 0
    loss = float(np.where(active, act, 0.0).sum())
    coef_p = active.sum(axis=1).astype(E.dtype)
    coef_n = -active.astype(E.dtype)
    gradE = np.zeros_like(E)
    gradR = np.zeros_like(R)
    _scatter(gradE, gradR, ph, pr, pt, coef_p, terms_p, scorer)
    _scatter(gradE, gradR, nh, pr, nt, coef_n, terms_n, scorer)
    return loss, gradE, gradR


def selfadv_loss(model: EmbeddingModel, batch: TrainBatch, cfg) -> tuple[float, Gradients]:
    """Self-adversarial negative-sampling loss, mean over positives.

    Per positive: -log sigmoid(margin + g(pos)) minus the weighted sum of
    log sigmoid(-g(neg) - margin) over its negatives, the weights being the
    adversarial softmax (constants under differentiation). In distance terms
    this is -log sigmoid(margin - d(pos)) - sum w log sigmoid(d(neg) - margin).
    """
    ph, pr, pt, nh, nt = _batch_arrays(batch)
    loss, gE, gR = _selfadv_loss_grads(
        model.entity_vecs, model.relation_vecs, ph, pr, pt, nh, nt,
        model.scorer, model.norm, cfg.margin, cfg.temperature,
    )
    if not math.isfinite(loss):
        raise EmbeddingError("non-finite loss in selfadv_loss")
    return loss, Gradients(gE, gR)


def margin_loss(model: EmbeddingModel, batch: TrainBatch, cfg) -> tuple[float, Gradients]:
    """Margin-ranking criterion: sum of ReLU(margin + g(pos) - g(neg))."""
    ph, pr, pt, nh, nt = _batch_arrays(batch)
    loss, gE, gR = _margin_loss_grads(
        model.entity_vecs, model.relation_vecs, ph, pr, pt, nh, nt,
        model.scorer, model.norm, cfg.margin,
    )
    if not math.isfinite(loss):
        raise EmbeddingError("non-finite loss in margin_loss")
    return loss, Gradients(gE, gR)


# ---------------------------------------------------------------------------
# optimizer and training loop
# ---------------------------------------------------------------------------

class Adam:
    def __init__(self, shapes, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _init_model(n_entities: int, n_relations: int, cfg: TrainConfig, rng) -> EmbeddingModel:
    bound = 6.0 / math.sqrt(cfg.dim)
    rel_dim = cfg.dim // 2 if cfg.scorer == "rotate" else cfg.dim
    E = rng.uniform(-bound, bound, size=(n_entities, cfg.dim))
    R = rng.uniform(-bound, bound, size=(n_relations, rel_dim))
    return EmbeddingModel(E, R, scorer=cfg.scorer, norm=cfg.norm)


def _sample_negative_arrays(ph, pt, n_entities, n_neg, rng):
    shape = (ph.shape[0], n_neg)
    corrupt_head = rng.integers(0, 2, size=shape).astype(bool)
    repl = rng.integers(0, n_entities, size=shape)
    original = np.where(corrupt_head, ph[:, None], pt[:, None])
    clash = repl == original
    while clash.any():
        repl[clash] = rng.integers(0, n_entities, size=int(clash.sum()))
        clash = repl == original
    nh = np.where(corrupt_head, repl, ph[:, None])
    nt = np.where(corrupt_head, pt[:, None], repl)
    return nh, nt


def train(
    kg: KnowledgeGraph,
    cfg: TrainConfig,
    rng: np.random.Generator,
    telemetry: list | None = None,
    telemetry_every: int = 100,
    checkpoint_every: int = 500,
) -> EmbeddingModel:
    """Run the full training loop and return the learned model.

    Deterministic for a fixed generator state. Appends (step, loss) pairs to
    ``telemetry`` when given. Aborts with the last checkpoint attached if the
    loss goes non-finite.
    """
    if kg.triples.shape[0] == 0:
        raise EmbeddingError("cannot train on an empty graph")
    if kg.n_entities < 2:
        raise EmbeddingError("need at least 2 entities to corrupt triples")
    model = _init_model(kg.n_entities, kg.n_relations, cfg, rng)
    E, R = model.entity_vecs, model.relation_vecs
    adam = Adam([E.shape, R.shape], lr=cfg.learning_rate)
    triples = kg.triples
    n_triples = triples.shape[0]
    checkpoint: EmbeddingModel | None = None

    for step in range(1, cfg.steps + 1):
        idx = rng.integers(0, n_triples, size=cfg.batch_size)
        ph, pr, pt = triples[idx, 0], triples[idx, 1], triples[idx, 2]
        nh, nt = _sample_negative_arrays(ph, pt, kg.n_entities, cfg.n_neg, rng)
        if cfg.loss == "self_adversarial":
            loss, gE, gR = _selfadv_loss_grads(
                E, R, ph, pr, pt, nh, nt, cfg.scorer, cfg.norm, cfg.margin, cfg.temperature
            )
        else:
            loss, gE, gR = _margin_loss_grads(
                E, R, ph, pr, pt, nh, nt, cfg.scorer, cfg.norm, cfg.margin
            )
        if not math.isfinite(loss):
            raise TrainingDiverged(step, checkpoint)
        adam.step([E, R], [gE, gR])
        if cfg.project_entities:
            norms = np.linalg.norm(E, axis=1, keepdims=True)
            np.divide(E, norms, out=E, where=norms > 0)
        if telemetry is not None and (step % telemetry_every == 0 or step == cfg.steps):
            telemetry.append((step, loss))
        if step % checkpoint_every == 0:
            checkpoint = model.copy()
    return model
