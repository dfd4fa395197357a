"""Dense linear algebra over a small prime field GF(q).

Matrices are 2-D ``int64`` numpy arrays holding residues in ``[0, q)``. The
field object carries the modulus so call sites never mix fields.
"""

from __future__ import annotations

import numpy as np


class NoSolutionError(ValueError):
    """The linear system ``a @ x = b`` is inconsistent."""


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % p for p in range(2, int(q**0.5) + 1))


class PrimeField:
    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError(f"field order must be prime, got {q}")
        # dot products of residues must stay well inside int64
        if q > 2**20:
            raise ValueError(f"field order {q} too large for int64 arithmetic")
        self.q = q

    def __repr__(self):
        return f"PrimeField({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("PrimeField", self.q))

    def array(self, rows) -> np.ndarray:
        a = np.asarray(rows, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
        return np.mod(a, self.q)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def inv(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(int(x), -1, self.q)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
        return np.mod(a @ b, self.q)

    def random(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        return rng.integers(0, self.q, size=(rows, cols), dtype=np.int64)

    def _rref(self, m: np.ndarray, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form; pivots are searched only in the first
        ``ncols`` columns (all columns by default)."""
        q = self.q
        a = np.mod(np.array(m, dtype=np.int64), q)
        rows, cols = a.shape
        ncols = cols if ncols is None else ncols
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            p = r + nz[0]
            if p != r:
                a[[r, p]] = a[[p, r]]
            a[r] = np.mod(a[r] * self.inv(a[r, c]), q)
            col = a[:, c].copy()
            col[r] = 0
            a = np.mod(a - np.outer(col, a[r]), q)
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        return len(self._rref(m)[1])

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """One solution ``x`` of ``a @ x = b`` (free variables set to zero).

        Raises :class:`NoSolutionError` when the system is inconsistent.
        """
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"dimension mismatch: a is {a.shape}, b is {b.shape}")
        n = a.shape[1]
        red, pivots = self._rref(np.hstack([a, b]), ncols=n)
        rank = len(pivots)
        if np.any(red[rank:, n:]):
            raise NoSolutionError("inconsistent linear system")
        x = np.zeros((n, b.shape[1]), dtype=np.int64)
        for i, c in enumerate(pivots):
            x[c] = red[i, n:]
        return x

    def inverse(self, m: np.ndarray) -> np.ndarray:
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"cannot invert non-square {m.shape}")
        if self.rank(m) < m.shape[0]:
            raise NoSolutionError("singular matrix")
        return self.solve(m, self.identity(m.shape[0]))

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        """Columns spanning the right kernel of ``m``."""
        cols = m.shape[1]
        red, pivots = self._rref(m)
        free = [c for c in range(cols) if c not in pivots]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        for j, f in enumerate(free):
            basis[f, j] = 1
            for i, p in enumerate(pivots):
                basis[p, j] = (-red[i, f]) % self.q
        return basis
