"""Dense linear algebra over the prime field F_p on small integer matrices."""
from __future__ import annotations

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def inv_mod(a: int, p: int) -> int:
    """Multiplicative inverse of ``a`` modulo prime ``p``."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in F_p")
    return pow(a, p - 2, p)


def as_matrix(m, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce to an int64 array reduced mod ``p``."""
    arr = np.array(m, dtype=np.int64)
    if shape is not None:
        if arr.size == 0:
            arr = np.zeros(shape, dtype=np.int64)
        arr = arr.reshape(shape)
    return arr % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def row_reduce(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod ``p`` and the pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv_mod(int(a[r, c]), p)) % p
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, p: int) -> int:
    a = np.asarray(m)
    if a.size == 0:
        return 0
    return len(row_reduce(a, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel as columns of the returned matrix."""
    a = np.asarray(m, dtype=np.int64)
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    red, pivots = row_reduce(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-red[i, f]) % p
    return basis


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix mod ``p``; raises ``ValueError`` when singular."""
    a = np.asarray(m, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix is not square")
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    red, pivots = row_reduce(np.hstack([a % p, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular over F_p")
    return red[:, n:] % p


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution ``x`` of ``a x = b`` mod ``p`` (``b`` may be a matrix), or ``None``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    rows, cols = a.shape
    if rows == 0:
        x = np.zeros((cols, b.shape[1]), dtype=np.int64)
        return x[:, 0] if vec else x
    red, pivots = row_reduce(np.hstack([a % p, b % p]), p)
    if any(pc >= cols for pc in pivots):
        return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = red[i, cols:]
    return x[:, 0] if vec else x


def in_column_span(a: np.ndarray, v: np.ndarray, p: int) -> bool:
    a = np.asarray(a, dtype=np.int64)
    if a.shape[1] == 0:
        return not np.any(np.asarray(v) % p)
    return rank(np.hstack([a, np.asarray(v).reshape(-1, 1)]), p) == rank(a, p)
