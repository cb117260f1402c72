"""Numerical training kernels: deterministic full-batch gradient descent,
multinomial Naive Bayes statistics, and max-abs scaling.

All losses are means over the batch plus an L2 term on the weights (never
the intercept). Weights start at zero, the step size is fixed, and exactly
maxIter iterations run, so fitting twice on the same data is bit-identical.
"""

from __future__ import annotations

import numpy as np

from ..errors import DynamicError


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(w, b, X, y, reg) -> float:
    """Mean log-loss with labels in {0,1} plus (reg/2)*||w||^2."""
    z = X @ w + b
    s = 2.0 * y - 1.0
    return float(np.mean(np.logaddexp(0.0, -s * z)) + 0.5 * reg * float(w @ w))


def logistic_gradient(w, b, X, y, reg):
    n = X.shape[0]
    z = X @ w + b
    p = sigmoid(z)
    gw = X.T @ (p - y) / n + reg * w
    gb = float(np.mean(p - y))
    return gw, gb


def hinge_loss(w, b, X, y, reg) -> float:
    """Mean hinge loss with labels mapped {0 -> -1, 1 -> +1}."""
    s = 2.0 * y - 1.0
    margins = 1.0 - s * (X @ w + b)
    return float(np.mean(np.maximum(margins, 0.0)) + 0.5 * reg * float(w @ w))


def hinge_gradient(w, b, X, y, reg):
    n = X.shape[0]
    s = 2.0 * y - 1.0
    viol = s * (X @ w + b) < 1.0
    gw = -(X[viol].T @ s[viol]) / n + reg * w
    gb = float(-np.sum(s[viol]) / n)
    return gw, gb


_GRADIENTS = {"logistic": logistic_gradient, "hinge": hinge_gradient}


def gd_fit(
    X: np.ndarray,
    y: np.ndarray,
    loss: str,
    max_iter: int,
    step: float,
    reg: float,
    fit_intercept: bool = True,
    lower: "np.ndarray | None" = None,
    upper: "np.ndarray | None" = None,
):
    """Full-batch (sub)gradient descent from zero init, optionally projecting
    the weights into [lower, upper] after each step."""
    gradient = _GRADIENTS[loss]
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(max_iter):
        gw, gb = gradient(w, b, X, y, reg)
        w = w - step * gw
        if fit_intercept:
            b = b - step * gb
        if lower is not None:
            w = np.maximum(w, lower)
        if upper is not None:
            w = np.minimum(w, upper)
    return w, b


def naive_bayes_fit(X: np.ndarray, y: np.ndarray, smoothing: float):
    """Multinomial NB with additive smoothing.

    Returns (classes, class log-priors, per-class feature log-likelihoods);
    each likelihood row sums to one in probability space.
    """
    if np.any(X < 0):
        raise DynamicError("NEGATIVE_FEATURE", "naive bayes requires nonnegative features")
    classes = np.unique(y.astype(np.int64))
    n, d = X.shape
    priors = np.empty(len(classes))
    theta = np.empty((len(classes), d))
    for idx, cls in enumerate(classes):
        rows = X[y == cls]
        priors[idx] = np.log(rows.shape[0] / n)
        sums = rows.sum(axis=0) + smoothing
        theta[idx] = np.log(sums / sums.sum())
    return classes, priors, theta


def naive_bayes_predict(X, classes, priors, theta, thresholds=None) -> np.ndarray:
    scores = priors + X @ theta.T
    if thresholds is not None:
        scores = scores - np.log(np.asarray(thresholds))
    return classes[np.argmax(scores, axis=1)]


def max_abs_fit(X: np.ndarray) -> np.ndarray:
    return np.max(np.abs(X), axis=0)


def max_abs_transform(X: np.ndarray, scale: np.ndarray) -> np.ndarray:
    divisor = np.where(scale == 0.0, 1.0, scale)
    return X / divisor
