"""Brute-force minimum enclosing ball, independent of the package code."""
import itertools

import numpy as np


def circumcenter(S):
    p0 = S[0]
    if len(S) == 1:
        return p0
    A = S[1:] - p0
    G = A @ A.T
    if abs(np.linalg.det(G)) < 1e-14:
        return None
    lam = np.linalg.solve(G, 0.5 * np.diag(G))
    return p0 + lam @ A


def brute_force_meb(P, tol=1e-10):
    """Smallest radius over balls circumscribing subsets of <= n+1 points
    that also contain every point."""
    P = np.asarray(P, dtype=float)
    n = P.shape[1]
    best = (None, np.inf)
    for k in range(1, min(n + 1, len(P)) + 1):
        for idx in itertools.combinations(range(len(P)), k):
            c = circumcenter(P[list(idx)])
            if c is None:
                continue
            r = np.linalg.norm(P[idx[0]] - c)
            if np.all(np.linalg.norm(P - c, axis=1) <= r + tol) and r < best[1]:
                best = (c, r)
    return best
