"""
Smith normal form over the integers with tracked unimodular transforms.

Arithmetic uses Python integers inside numpy object arrays, so no entry ever
overflows. Pivots are chosen by smallest nonzero magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._logger import logger

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "SmithForm",
    "as_int_matrix",
    "identity",
    "rank_mod_p",
    "smith_normal_form",
]


def identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    for j in range(n):
        eye[j, j] = 1
    return eye


def as_int_matrix(
    M: Union[np.ndarray, Sequence[Sequence[int]]], shape=None
) -> np.ndarray:
    """Copy into an object array of Python ints."""
    A = np.array(M, dtype=object)
    if shape is not None:
        A = A.reshape(shape)
    if A.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    out = np.zeros(A.shape, dtype=object)
    for idx, value in np.ndenumerate(A):
        out[idx] = int(value)
    return out


@dataclass
class SmithForm:
    """
    ``U @ M @ V == D`` with U, V unimodular and D diagonal; ``diagonal``
    lists the nonzero invariant factors (positive, each dividing the next).
    """

    D: np.ndarray
    U: np.ndarray
    U_inv: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray
    diagonal: list[int]

    @property
    def rank(self) -> int:
        return len(self.diagonal)


class _Reducer:
    def __init__(self, M: np.ndarray):
        self.A = M.copy()
        m, n = self.A.shape
        self.U, self.U_inv = identity(m), identity(m)
        self.V, self.V_inv = identity(n), identity(n)

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        for X in (self.A, self.U):
            X[[i, j], :] = X[[j, i], :]
        self.U_inv[:, [i, j]] = self.U_inv[:, [j, i]]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for X in (self.A, self.V):
            X[:, [i, j]] = X[:, [j, i]]
        self.V_inv[[i, j], :] = self.V_inv[[j, i], :]

    def add_row(self, target: int, source: int, c: int) -> None:
        """Row ``target += c * row source``."""
        self.A[target, :] += c * self.A[source, :]
        self.U[target, :] += c * self.U[source, :]
        self.U_inv[:, source] -= c * self.U_inv[:, target]

    def add_col(self, target: int, source: int, c: int) -> None:
        """Column ``target += c * column source``."""
        self.A[:, target] += c * self.A[:, source]
        self.V[:, target] += c * self.V[:, source]
        self.V_inv[source, :] -= c * self.V_inv[target, :]

    def negate_row(self, i: int) -> None:
        self.A[i, :] = -self.A[i, :]
        self.U[i, :] = -self.U[i, :]
        self.U_inv[:, i] = -self.U_inv[:, i]

    def smallest(self, t: int) -> tuple[int, int] | None:
        best, where = 0, None
        m, n = self.A.shape
        for i in range(t, m):
            for j in range(t, n):
                a = abs(self.A[i, j])
                if a and (not best or a < best):
                    best, where = a, (i, j)
                    if a == 1:
                        return where
        return where

    def reduce(self) -> list[int]:
        A = self.A
        m, n = A.shape
        diagonal = []
        t = 0
        while t < min(m, n):
            where = self.smallest(t)
            if where is None:
                break
            self.swap_rows(t, where[0])
            self.swap_cols(t, where[1])
            while True:
                for i in range(t + 1, m):
                    if A[i, t]:
                        self.add_row(i, t, -(A[i, t] // A[t, t]))
                for j in range(t + 1, n):
                    if A[t, j]:
                        self.add_col(j, t, -(A[t, j] // A[t, t]))
                leftover = [(i, t) for i in range(t + 1, m) if A[i, t]] + [
                    (t, j) for j in range(t + 1, n) if A[t, j]
                ]
                if leftover:
                    i, j = min(leftover, key=lambda ij: abs(A[ij]))
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                bad = next(
                    (
                        (i, j)
                        for i in range(t + 1, m)
                        for j in range(t + 1, n)
                        if A[i, j] % A[t, t]
                    ),
                    None,
                )
                if bad is None:
                    break
                self.add_row(t, bad[0], 1)
            if A[t, t] < 0:
                self.negate_row(t)
            diagonal.append(int(A[t, t]))
            t += 1
        return diagonal


def smith_normal_form(
    M: Union[np.ndarray, Sequence[Sequence[int]]], shape=None
) -> SmithForm:
    """
    Smith normal form of an integer matrix.

    Args:
        M: integer matrix (any array-like).
        shape: optional shape, needed for matrices with a zero dimension
            given as nested lists.
    """
    A = as_int_matrix(M, shape)
    reducer = _Reducer(A)
    diagonal = reducer.reduce()
    return SmithForm(
        D=reducer.A,
        U=reducer.U,
        U_inv=reducer.U_inv,
        V=reducer.V,
        V_inv=reducer.V_inv,
        diagonal=diagonal,
    )


def rank_mod_p(diagonal: Sequence[int], p: int) -> int:
    """Rank over the prime field F_p from the invariant factors."""
    return sum(1 for d in diagonal if d % p)
