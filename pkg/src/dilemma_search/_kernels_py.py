"""Pure-Python kernels, used when the compiled extension is unavailable.

Integer counting goes through numpy (exact); the floating-point reductions are
scalar loops whose operation order matches ``_kernels.pyx`` exactly, so both
backends return bit-identical floats.
"""
from math import log2

import numpy as np

NAME = "python"


def _entropy(counts, total):
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * log2(p)
    return h


def label_entropy(y, rows, n_classes):
    """Class entropy (bits) of ``y[rows]``."""
    n = len(rows)
    if n == 0:
        return 0.0
    counts = np.bincount(y[rows], minlength=n_classes).tolist()
    return _entropy(counts, n)


def split_gains(X, y, rows, attrs, n_values, n_classes):
    """Information gain of every attribute in ``attrs`` on the subset ``rows``."""
    n = len(rows)
    out = []
    if n == 0:
        return [0.0] * len(attrs)
    labels = y[rows]
    h = _entropy(np.bincount(labels, minlength=n_classes).tolist(), n)
    for a in attrs:
        nv = int(n_values[a])
        joint = np.bincount(X[rows, a] * n_classes + labels, minlength=nv * n_classes)
        joint = joint.reshape(nv, n_classes).tolist()
        rem = 0.0
        for counts in joint:
            nx = sum(counts)
            if nx:
                rem += (nx / n) * _entropy(counts, nx)
        gain = h - rem
        out.append(gain if gain > 0.0 else 0.0)
    return out


def fitting_items(order, weights, blocked, room):
    """Ids from ``order`` that are not blocked and weigh at most ``room``."""
    return [i for i in order.tolist() if not blocked[i] and weights[i] <= room]
