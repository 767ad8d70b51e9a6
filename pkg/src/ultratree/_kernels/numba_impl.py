"""Numba kernel implementations.

Same contracts and the same lexicographic witness order as numpy_impl;
flat loops compiled with @njit. Importing this module requires numba.
"""
from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _triangle_witness(d, tol):
    n = d.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            dij = d[i, j]
            for k in range(n):
                if k == i or k == j:
                    continue
                if dij > d[i, k] + d[k, j] + tol:
                    return i, j, k
    return -1, -1, -1


@njit(cache=True)
def _strong_triangle_witness(d, tol):
    n = d.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            dij = d[i, j]
            for k in range(n):
                if k == i or k == j:
                    continue
                a = d[i, k]
                b = d[k, j]
                m = a if a > b else b
                if dij > m + tol:
                    return i, j, k
    return -1, -1, -1


@njit(cache=True)
def _isosceles_witness(d, tol):
    n = d.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            dij = d[i, j]
            for k in range(n):
                if k == i or k == j:
                    continue
                a = d[i, k]
                b = d[j, k]
                if dij < a - tol and abs(b - a) > tol:
                    return i, j, k, 0
                if dij < b - tol and abs(a - b) > tol:
                    return i, j, k, 1
    return -1, -1, -1, -1


@njit(cache=True)
def _isometry_mismatch(entries, sched, d):
    levels = entries.shape[0]
    n = d.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            dt = 0.0
            for k in range(levels):
                if entries[k, i] != entries[k, j]:
                    dt = sched[k]
                    break
            if dt != d[i, j]:
                return i, j
    return -1, -1


@njit(cache=True)
def _doubling_cover_worst(d, radii):
    n = d.shape[0]
    best = 0
    bx = -1
    bri = -1
    for ri in range(radii.shape[0]):
        r = radii[ri]
        half = r * 0.5
        for x in range(n):
            count = 0
            for y in range(n):
                if d[x, y] <= r:
                    is_rep = True
                    for z in range(y):
                        if d[y, z] <= half:
                            is_rep = False
                            break
                    if is_rep:
                        count += 1
            if count > best:
                best = count
                bx = x
                bri = ri
    return best, bx, bri


def triangle_witness(d, tol):
    i, j, k = _triangle_witness(d, tol)
    return (int(i), int(j), int(k))


def strong_triangle_witness(d, tol):
    i, j, k = _strong_triangle_witness(d, tol)
    return (int(i), int(j), int(k))


def isosceles_witness(d, tol):
    i, j, k, o = _isosceles_witness(d, tol)
    return (int(i), int(j), int(k), int(o))


def isometry_mismatch(entries, sched, d):
    i, j = _isometry_mismatch(entries, sched, d)
    return (int(i), int(j))


def doubling_cover_worst(d, radii):
    c, x, ri = _doubling_cover_worst(d, radii)
    return (int(c), int(x), int(ri))
