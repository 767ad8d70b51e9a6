"""Pure-numpy kernel implementations.

Reference semantics for the hot scans. Every kernel reports the same
witness the numba backend reports: the first hit in lexicographic
(i, j, k) order with i < j, so backends are interchangeable bit for bit.
"""
from __future__ import annotations

import numpy as np

NAME = "numpy"


def _first_index(mask: np.ndarray):
    """First True coordinate of a boolean array in C order, or None."""
    flat = np.flatnonzero(mask)
    if flat.size == 0:
        return None
    return np.unravel_index(flat[0], mask.shape)


def _triple_mask_frame(n: int):
    # i < j, k distinct from both
    i = np.arange(n)
    upper = i[:, None] < i[None, :]
    frame = np.ones((n, n, n), dtype=bool)
    frame &= upper[:, :, None]
    frame &= i[None, None, :] != i[:, None, None]
    frame &= i[None, None, :] != i[None, :, None]
    return frame


def triangle_witness(d: np.ndarray, tol: float):
    """First (i, j, k) with d[i,j] > d[i,k] + d[k,j] + tol, else (-1,-1,-1)."""
    n = d.shape[0]
    if n < 3:
        return (-1, -1, -1)
    via = d[:, None, :] + d.T[None, :, :]          # via[i,j,k] = d[i,k] + d[k,j]
    bad = (d[:, :, None] > via + tol) & _triple_mask_frame(n)
    hit = _first_index(bad)
    if hit is None:
        return (-1, -1, -1)
    return (int(hit[0]), int(hit[1]), int(hit[2]))


def strong_triangle_witness(d: np.ndarray, tol: float):
    """First (i, j, k) with d[i,j] > max(d[i,k], d[k,j]) + tol, else (-1,-1,-1)."""
    n = d.shape[0]
    if n < 3:
        return (-1, -1, -1)
    legs = np.maximum(d[:, None, :], d.T[None, :, :])   # legs[i,j,k] = max(d[i,k], d[k,j])
    bad = (d[:, :, None] > legs + tol) & _triple_mask_frame(n)
    hit = _first_index(bad)
    if hit is None:
        return (-1, -1, -1)
    return (int(hit[0]), int(hit[1]), int(hit[2]))


def isosceles_witness(d: np.ndarray, tol: float):
    """First isosceles violation as (i, j, k, orient), else (-1,-1,-1,-1).

    orient 0: d[i,j] < d[i,k] yet d[j,k] != d[i,k]
    orient 1: d[i,j] < d[j,k] yet d[i,k] != d[j,k]
    Both orientations are needed: a triple can violate in only one of them.
    """
    n = d.shape[0]
    if n < 3:
        return (-1, -1, -1, -1)
    frame = _triple_mask_frame(n)
    dik = np.broadcast_to(d[:, None, :], (n, n, n))
    djk = np.broadcast_to(d.T[None, :, :], (n, n, n))
    base = d[:, :, None]
    bad_a = (base < dik - tol) & (np.abs(djk - dik) > tol) & frame
    bad_b = (base < djk - tol) & (np.abs(dik - djk) > tol) & frame
    hit_a = _first_index(bad_a)
    hit_b = _first_index(bad_b)
    if hit_a is None and hit_b is None:
        return (-1, -1, -1, -1)
    if hit_b is None or (hit_a is not None and hit_a <= hit_b):
        return (int(hit_a[0]), int(hit_a[1]), int(hit_a[2]), 0)
    return (int(hit_b[0]), int(hit_b[1]), int(hit_b[2]), 1)


def isometry_mismatch(entries: np.ndarray, sched: np.ndarray, d: np.ndarray):
    """First pair (i, j), i < j, where the branch distance disagrees with d.

    entries[k, i] is the label of point i's ball at branch entry k; the
    branch distance of a pair is sched[first k where the labels differ]
    (0.0 if they never differ). Comparison is exact, no tolerance.
    """
    n = d.shape[0]
    if n < 2:
        return (-1, -1)
    diff = entries[:, :, None] != entries[:, None, :]    # (K, n, n)
    any_diff = diff.any(axis=0)
    first_k = diff.argmax(axis=0)
    dt = np.where(any_diff, sched[first_k], 0.0)
    bad = (dt != d) & (np.arange(n)[:, None] < np.arange(n)[None, :])
    hit = _first_index(bad)
    if hit is None:
        return (-1, -1)
    return (int(hit[0]), int(hit[1]))


def doubling_cover_worst(d: np.ndarray, radii: np.ndarray):
    """Worst-case minimal cover count over all centers and probe radii.

    For each x and r, counts the d <= r/2 classes inside the closed ball
    B(x, r); in an ultrametric each class needs its own half-radius ball,
    and one per class suffices. Returns (count, x, radius_index) for the
    maximising probe, first probe in (radius_index, x) order on ties.
    """
    n = d.shape[0]
    best, bx, bri = 0, -1, -1
    idx = np.arange(n)
    for ri in range(radii.shape[0]):
        r = float(radii[ri])
        half = r * 0.5
        rep = (d <= half).argmax(axis=1) == idx          # y is min-index in its class
        counts = ((d <= r) & rep[None, :]).sum(axis=1)   # per center x
        x = int(counts.argmax())
        c = int(counts[x])
        if c > best:
            best, bx, bri = c, x, ri
    return (best, bx, bri)
