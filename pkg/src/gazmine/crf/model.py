"""Linear-chain CRF over the seven character tags.

Everything is computed exactly: log-domain forward-backward for the
partition function and marginals, Viterbi for decoding, and an analytic
gradient of the L2-regularized conditional log-likelihood.  Training starts
from zero weights and runs a deterministic batch quasi-Newton optimizer, so
identical inputs always yield identical models.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize

from ..kb import CharStats
from .features import FeatureConfig

MODEL_FORMAT_VERSION = 1


class Tag(enum.IntEnum):
    NB = 0
    NI = 1
    NE = 2
    AB = 3
    AI = 4
    AE = 5
    O = 6


N_TAGS = len(Tag)


class CrfError(Exception):
    pass


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = a.max(axis=axis, keepdims=True)
    return np.squeeze(m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True)),
                      axis=axis)


@dataclass
class CrfModel:
    feature_dict: dict[str, int]
    emissions: np.ndarray      # (n_features, N_TAGS)
    transitions: np.ndarray    # (N_TAGS, N_TAGS)
    start: np.ndarray          # (N_TAGS,)
    end: np.ndarray            # (N_TAGS,)
    config: FeatureConfig
    l2_lambda: float = 1.0
    # training-corpus character statistics travel with the model so tag-time
    # group-4 features reproduce the training-time ones
    char_stats: CharStats | None = None

    @classmethod
    def zeros(cls, features, config: FeatureConfig,
              l2_lambda: float = 1.0) -> "CrfModel":
        feature_dict = {f: i for i, f in enumerate(sorted(set(features)))}
        return cls(feature_dict=feature_dict,
                   emissions=np.zeros((len(feature_dict), N_TAGS)),
                   transitions=np.zeros((N_TAGS, N_TAGS)),
                   start=np.zeros(N_TAGS), end=np.zeros(N_TAGS),
                   config=config, l2_lambda=l2_lambda)

    @property
    def n_features(self) -> int:
        return len(self.feature_dict)

    def encode(self, x) -> list[np.ndarray]:
        """Feature-id arrays per position; unknown features are dropped."""
        return [np.array(sorted(self.feature_dict[f] for f in feats
                                if f in self.feature_dict), dtype=np.intp)
                for feats in x]

    def params_vector(self) -> np.ndarray:
        return np.concatenate([self.emissions.ravel(), self.transitions.ravel(),
                               self.start, self.end])

    def with_params(self, theta: np.ndarray) -> "CrfModel":
        nf = self.n_features
        e = nf * N_TAGS
        t = e + N_TAGS * N_TAGS
        return CrfModel(
            feature_dict=self.feature_dict,
            emissions=theta[:e].reshape(nf, N_TAGS).copy(),
            transitions=theta[e:t].reshape(N_TAGS, N_TAGS).copy(),
            start=theta[t:t + N_TAGS].copy(),
            end=theta[t + N_TAGS:t + 2 * N_TAGS].copy(),
            config=self.config, l2_lambda=self.l2_lambda,
            char_stats=self.char_stats)

    def emission_scores(self, x_ids: list[np.ndarray]) -> np.ndarray:
        scores = np.zeros((len(x_ids), N_TAGS))
        for t, ids in enumerate(x_ids):
            if len(ids):
                scores[t] = self.emissions[ids].sum(axis=0)
        return scores


def _forward(scores: np.ndarray, trans: np.ndarray, start: np.ndarray,
             end: np.ndarray) -> tuple[np.ndarray, float]:
    alpha = np.empty_like(scores)
    alpha[0] = start + scores[0]
    for t in range(1, len(scores)):
        alpha[t] = _logsumexp(alpha[t - 1][:, None] + trans, axis=0) + scores[t]
    return alpha, float(_logsumexp(alpha[-1] + end, axis=0))


def _backward(scores: np.ndarray, trans: np.ndarray,
              end: np.ndarray) -> np.ndarray:
    beta = np.empty_like(scores)
    beta[-1] = end
    for t in range(len(scores) - 2, -1, -1):
        beta[t] = _logsumexp(trans + (scores[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def log_partition(model: CrfModel, x) -> float:
    x_ids = model.encode(x)
    _, log_z = _forward(model.emission_scores(x_ids), model.transitions,
                        model.start, model.end)
    return log_z


def marginals(model: CrfModel, x) -> np.ndarray:
    """Exact per-position posterior distribution over the tags, shape (T, 7)."""
    if len(x) < 1:
        raise CrfError("cannot compute marginals of an empty sequence")
    x_ids = model.encode(x)
    scores = model.emission_scores(x_ids)
    alpha, log_z = _forward(scores, model.transitions, model.start, model.end)
    beta = _backward(scores, model.transitions, model.end)
    post = np.exp(alpha + beta - log_z)
    post /= post.sum(axis=1, keepdims=True)
    return post


def decode(model: CrfModel, x) -> tuple[list[Tag], float]:
    """Viterbi path and its unnormalized log score.

    Ties fall to the smaller tag index at every choice, so decoding is a
    pure function of the inputs.
    """
    if len(x) < 1:
        raise CrfError("cannot decode an empty sequence")
    x_ids = model.encode(x)
    scores = model.emission_scores(x_ids)
    n = len(scores)
    delta = np.empty_like(scores)
    backptr = np.zeros((n, N_TAGS), dtype=np.intp)
    delta[0] = model.start + scores[0]
    for t in range(1, n):
        grown = delta[t - 1][:, None] + model.transitions
        backptr[t] = grown.argmax(axis=0)
        delta[t] = grown[backptr[t], np.arange(N_TAGS)] + scores[t]
    final = delta[-1] + model.end
    best = int(final.argmax())
    path = [best]
    for t in range(n - 1, 0, -1):
        best = int(backptr[t, best])
        path.append(best)
    path.reverse()
    return [Tag(i) for i in path], float(final.max())


def _sequence_ll_grad(model: CrfModel, x_ids, y: list[int],
                      grad_em: np.ndarray, grad_trans: np.ndarray,
                      grad_start: np.ndarray, grad_end: np.ndarray) -> float:
    """Unregularized log-likelihood of one sequence; accumulates its
    gradient (empirical minus expected feature counts) in place."""
    scores = model.emission_scores(x_ids)
    trans = model.transitions
    n = len(scores)
    alpha, log_z = _forward(scores, trans, model.start, model.end)
    beta = _backward(scores, trans, model.end)
    post = np.exp(alpha + beta - log_z)
    post /= post.sum(axis=1, keepdims=True)

    path_score = model.start[y[0]] + scores[0, y[0]] + model.end[y[-1]]
    for t in range(1, n):
        path_score += trans[y[t - 1], y[t]] + scores[t, y[t]]

    for t, ids in enumerate(x_ids):
        if len(ids):
            grad_em[ids, y[t]] += 1.0
            grad_em[ids] -= post[t]
    for t in range(1, n):
        grad_trans[y[t - 1], y[t]] += 1.0
        pair = np.exp(alpha[t - 1][:, None] + trans
                      + (scores[t] + beta[t])[None, :] - log_z)
        grad_trans -= pair / pair.sum()
    grad_start[y[0]] += 1.0
    grad_start -= post[0]
    grad_end[y[-1]] += 1.0
    grad_end -= post[-1]
    return path_score - log_z


def log_likelihood_and_gradient(model: CrfModel, x, y) -> tuple[float, np.ndarray]:
    """Regularized conditional log-likelihood of one tagged sequence and its
    exact gradient over the packed parameter vector."""
    if len(x) != len(y):
        raise CrfError(f"sequence length mismatch: {len(x)} features vs "
                       f"{len(y)} tags")
    if len(x) < 1:
        raise CrfError("empty sequence")
    y_idx = [int(t) for t in y]
    grad_em = np.zeros_like(model.emissions)
    grad_trans = np.zeros_like(model.transitions)
    grad_start = np.zeros_like(model.start)
    grad_end = np.zeros_like(model.end)
    ll = _sequence_ll_grad(model, model.encode(x), y_idx,
                           grad_em, grad_trans, grad_start, grad_end)
    theta = model.params_vector()
    grad = np.concatenate([grad_em.ravel(), grad_trans.ravel(),
                           grad_start, grad_end]) - model.l2_lambda * theta
    return ll - 0.5 * model.l2_lambda * float(theta @ theta), grad


def train(examples, cfg: FeatureConfig, l2_lambda: float = 1.0,
          max_iter: int = 200, tol: float = 1e-4) -> CrfModel:
    """Fit weights by maximizing the regularized log-likelihood over all
    examples, starting from zero."""
    if not examples:
        raise CrfError("no training examples")
    for x, y in examples:
        if len(x) != len(y):
            raise CrfError("example with mismatched feature/tag lengths")
        if any(not isinstance(t, Tag) and t not in set(range(N_TAGS)) for t in y):
            raise CrfError("tag sequence uses values outside the tagset")
    features = sorted({f for x, _ in examples for feats in x for f in feats})
    model = CrfModel.zeros(features, cfg, l2_lambda)
    encoded = [(model.encode(x), [int(t) for t in y]) for x, y in examples]
    n_evals = 0

    def objective(theta: np.ndarray):
        nonlocal n_evals
        n_evals += 1
        m = model.with_params(theta)
        grad_em = np.zeros_like(m.emissions)
        grad_trans = np.zeros_like(m.transitions)
        grad_start = np.zeros_like(m.start)
        grad_end = np.zeros_like(m.end)
        total = 0.0
        for x_ids, y in encoded:
            total += _sequence_ll_grad(m, x_ids, y, grad_em, grad_trans,
                                       grad_start, grad_end)
        total -= 0.5 * l2_lambda * float(theta @ theta)
        grad = np.concatenate([grad_em.ravel(), grad_trans.ravel(),
                               grad_start, grad_end]) - l2_lambda * theta
        if not np.isfinite(total) or not np.all(np.isfinite(grad)):
            raise CrfError(f"non-finite objective at evaluation {n_evals}")
        return -total, -grad

    result = optimize.minimize(
        objective, model.params_vector(), jac=True, method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": tol, "ftol": 1e-12})
    return model.with_params(result.x)


# -- persistence ---------------------------------------------------------------


def save_model(model: CrfModel, path: str | Path) -> None:
    features = [f for f, _ in sorted(model.feature_dict.items(),
                                     key=lambda kv: kv[1])]
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "config": {
            "k": model.config.k,
            "ne_window": model.config.ne_window,
            "bins": model.config.bins,
            "groups": sorted(model.config.groups),
        },
        "l2_lambda": model.l2_lambda,
        "features": features,
        "emissions": model.emissions.tolist(),
        "transitions": model.transitions.tolist(),
        "start": model.start.tolist(),
        "end": model.end.tolist(),
    }
    if model.char_stats is not None:
        payload["char_stats"] = {
            "total": model.char_stats.total,
            "in_person": model.char_stats.in_person,
            "in_location": model.char_stats.in_location,
        }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False),
                          encoding="utf-8")


def load_model(path: str | Path) -> CrfModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise CrfError(f"model file {path} has format version {version}, "
                       f"expected {MODEL_FORMAT_VERSION}")
    cfg = FeatureConfig(k=payload["config"]["k"],
                        ne_window=payload["config"]["ne_window"],
                        bins=payload["config"]["bins"],
                        groups=frozenset(payload["config"]["groups"]))
    stats = None
    if "char_stats" in payload:
        raw = payload["char_stats"]
        stats = CharStats(total=raw["total"], in_person=raw["in_person"],
                          in_location=raw["in_location"])
    return CrfModel(
        feature_dict={f: i for i, f in enumerate(payload["features"])},
        emissions=np.array(payload["emissions"], dtype=float).reshape(
            len(payload["features"]), N_TAGS),
        transitions=np.array(payload["transitions"], dtype=float),
        start=np.array(payload["start"], dtype=float),
        end=np.array(payload["end"], dtype=float),
        config=cfg, l2_lambda=payload["l2_lambda"], char_stats=stats)
