"""Brute-force reference implementations used to check the fast paths."""

import math

import numpy as np

GAUSS = (2.0 * math.pi * math.e) ** 3


def pairwise(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))


def radius_members(points, query, r):
    d = np.sqrt(((np.asarray(points) - np.asarray(query)) ** 2).sum(axis=1))
    return {int(i) for i in np.flatnonzero(d <= r)}


def kth_distance(points, i, k):
    d = np.sort(np.delete(pairwise(points[i:i + 1], points)[0], i))
    return float(d[k - 1])


def covariance(points):
    """Two-pass population covariance with explicit loops."""
    pts = [list(map(float, p)) for p in points]
    k = len(pts)
    mean = [sum(p[a] for p in pts) / k for a in range(3)]
    return np.array([
        [sum((p[a] - mean[a]) * (p[b] - mean[b]) for p in pts) / k for b in range(3)]
        for a in range(3)
    ])


def cofactor_det(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def entropy(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len({tuple(p) for p in pts.tolist()}) < 4:
        return 0.0
    return 0.5 * math.log(GAUSS * max(cofactor_det(covariance(pts)), 0.0) + 1.0)


def q_vector(p1, p2, r):
    """q_i for the joint cloud [p1; p2] straight from the definition."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    joint = np.concatenate([p1, p2])
    q = []
    for i, p in enumerate(joint):
        own = p1 if i < len(p1) else p2
        h_joint = entropy(joint[pairwise([p], joint)[0] <= r])
        h_own = entropy(own[pairwise([p], own)[0] <= r])
        q.append(h_joint - h_own)
    return np.array(q)


def r4th(points):
    points = np.asarray(points, dtype=float)
    return sum(kth_distance(points, i, 4) for i in range(len(points))) / len(points)


def rmse(source, target):
    d = pairwise(source, target).min(axis=1)
    return math.sqrt((d ** 2).mean())


def chamfer(a, b):
    d = pairwise(a, b)
    return 0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean())


def hausdorff(a, b):
    d = pairwise(a, b)
    return max(d.min(axis=1).max(), d.min(axis=0).max())
