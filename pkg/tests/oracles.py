"""Independent reference implementations used to verify the engine.

Everything here is deliberately written the slow, obvious way (scalar loops,
Counter-based entropies, exhaustive search) and shares no code with the
package internals it checks.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


# ---------------------------------------------------------------------------
# MDLP: exhaustive recursive discretization
# ---------------------------------------------------------------------------

def _ent(labels) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    return -sum((c / n) * math.log2(c / n) for c in Counter(labels).values())


def mdlp_cuts_oracle(values, labels, min_split_fraction=0.1, min_interval_fraction=0.05):
    """Exhaustive-search MDLP: every boundary candidate evaluated from scratch."""
    pairs = sorted(zip(values, labels), key=lambda p: p[0])
    n_total = len(pairs)
    eps = 1e-9

    def candidates(segment):
        # midpoints between adjacent distinct values whose label sets differ
        groups = []
        for v, lab in segment:
            if groups and groups[-1][0] == v:
                groups[-1][1].add(lab)
            else:
                groups.append((v, {lab}))
        cands = []
        pos = 0
        counts = []
        for v, labs in groups:
            size = sum(1 for q, _ in segment if q == v)
            counts.append(size)
        for gi in range(len(groups) - 1):
            pos += counts[gi]
            if groups[gi][1] != groups[gi + 1][1]:
                cands.append(((groups[gi][0] + groups[gi + 1][0]) / 2.0, pos))
        return cands

    def recurse(segment, out):
        n = len(segment)
        if n < min_split_fraction * n_total - eps:
            return
        best = None
        for cut_value, split in candidates(segment):
            left = [lab for _, lab in segment[:split]]
            right = [lab for _, lab in segment[split:]]
            weighted = (len(left) * _ent(left) + len(right) * _ent(right)) / n
            if best is None or weighted < best[0] or (weighted == best[0] and cut_value < best[1]):
                best = (weighted, cut_value, split)
        if best is None:
            return
        _, cut_value, split = best
        left_labels = [lab for _, lab in segment[:split]]
        right_labels = [lab for _, lab in segment[split:]]
        if len(left_labels) < min_interval_fraction * n_total - eps:
            return
        if len(right_labels) < min_interval_fraction * n_total - eps:
            return
        all_labels = [lab for _, lab in segment]
        gain = _ent(all_labels) - (
            len(left_labels) * _ent(left_labels) + len(right_labels) * _ent(right_labels)
        ) / n
        k = len(set(all_labels))
        k1, k2 = len(set(left_labels)), len(set(right_labels))
        delta = math.log2(3**k - 2) - (
            k * _ent(all_labels) - k1 * _ent(left_labels) - k2 * _ent(right_labels)
        )
        if gain <= (math.log2(n - 1) + delta) / n:
            return
        out.append(cut_value)
        recurse(segment[:split], out)
        recurse(segment[split:], out)

    out: list[float] = []
    recurse(pairs, out)
    return sorted(out)


# ---------------------------------------------------------------------------
# scoring and losses, scalar form
# ---------------------------------------------------------------------------

def scalar_score(E, R, h, r, t, scorer, norm) -> float:
    if scorer == "transe":
        u = E[h] + R[r] - E[t]
        if norm == "L2":
            return -math.sqrt(float((u * u).sum()))
        return -float(np.abs(u).sum())
    d2 = R.shape[1]
    hre, him = E[h][:d2], E[h][d2:]
    c, s = np.cos(R[r]), np.sin(R[r])
    ure = hre * c - him * s - E[t][:d2]
    uim = hre * s + him * c - E[t][d2:]
    if norm == "L2":
        return -math.sqrt(float((ure * ure).sum() + (uim * uim).sum()))
    return -float(np.abs(ure).sum() + np.abs(uim).sum())


def neg_log_sigmoid(x: float) -> float:
    # -log sigmoid(x) = log(1 + exp(-x)), stable on both sides
    if x > 0:
        return math.log1p(math.exp(-x))
    return -x + math.log1p(math.exp(x))


def selfadv_loss_frozen(E, R, batch, weights, margin, scorer, norm) -> float:
    """Self-adversarial loss with the given (frozen) negative weights."""
    total = 0.0
    for i, (pos, negs) in enumerate(zip(batch.positives, batch.negatives)):
        gp = scalar_score(E, R, pos.head, pos.relation, pos.tail, scorer, norm)
        term = neg_log_sigmoid(margin + gp)
        for j, neg in enumerate(negs):
            gn = scalar_score(E, R, neg.head, neg.relation, neg.tail, scorer, norm)
            term += weights[i][j] * neg_log_sigmoid(-gn - margin)
        total += term
    return total / len(batch.positives)


def margin_loss_scalar(E, R, batch, margin, scorer, norm) -> float:
    total = 0.0
    for pos, negs in zip(batch.positives, batch.negatives):
        gp = scalar_score(E, R, pos.head, pos.relation, pos.tail, scorer, norm)
        for neg in negs:
            gn = scalar_score(E, R, neg.head, neg.relation, neg.tail, scorer, norm)
            total += max(0.0, margin + gp - gn)
    return total


def central_difference(fn, mat, i, j, eps=1e-4) -> float:
    orig = mat[i, j]
    mat[i, j] = orig + eps
    up = fn()
    mat[i, j] = orig - eps
    down = fn()
    mat[i, j] = orig
    return (up - down) / (2 * eps)


# ---------------------------------------------------------------------------
# ranking
# ---------------------------------------------------------------------------

def rank_by_sort(scores: dict[str, float], truth: str) -> float:
    """Mean-rank-of-ties via explicit descending sort."""
    ordered = sorted(scores.values(), reverse=True)
    s = scores[truth]
    positions = [i + 1 for i, v in enumerate(ordered) if v == s]
    return sum(positions) / len(positions)


def mean_by_fsum(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)
