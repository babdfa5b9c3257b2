"""Geometric row insertion and triangular arrays.

The finite side: insertion of a word into a word, and of a word into a
fully triangular array, carried out exactly in the log domain.  The column
entries z_{k1} of the evolving array are polymer partition functions with
the initial weight included.

The sequence side: the insertion network's column step, and the triangular
array of windows built from the update maps, whose diagonal reproduces the
intertwining tuple map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seqmaps import LogSeqWindow, SeqTuple, update

__all__ = [
    "Word",
    "FullArray",
    "TriangularArray",
    "row_insert",
    "array_insert",
    "array_network_step",
    "build_triangular",
]


@dataclass(frozen=True)
class Word:
    """Finite word (b_start, ..., b_end) of positive reals stored as logs."""

    start: int
    entries: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.entries, dtype=np.float64)
        object.__setattr__(self, "entries", vals)
        if vals.ndim != 1:
            raise ValueError("word entries must be a 1-d array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("word entries must be finite logs")

    def __len__(self) -> int:
        return self.entries.shape[0]

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @classmethod
    def empty(cls, start: int) -> "Word":
        return cls(start=start, entries=np.empty(0))


@dataclass(frozen=True)
class FullArray:
    """Fully triangular array z_{k ell}, 1 <= ell <= k <= n, in logs.

    Column ell is stored as the array (z_{ell,ell}, ..., z_{n,ell}).
    """

    n: int
    cols: tuple[np.ndarray, ...]

    def __post_init__(self):
        cols = tuple(np.asarray(c, dtype=np.float64) for c in self.cols)
        object.__setattr__(self, "cols", cols)
        if len(cols) != self.n:
            raise ValueError(f"need {self.n} columns, got {len(cols)}")
        for ell, c in enumerate(cols, start=1):
            if c.shape != (self.n - ell + 1,):
                raise ValueError(f"column {ell} must have length {self.n - ell + 1}")
            if not np.all(np.isfinite(c)):
                raise ValueError("array cells must be finite logs")

    def cell(self, k: int, ell: int) -> float:
        """Log of z_{k ell}."""
        if not (1 <= ell <= k <= self.n):
            raise ValueError(f"cell ({k}, {ell}) outside the triangle")
        return float(self.cols[ell - 1][k - ell])

    def first_column(self) -> np.ndarray:
        """Logs of (z_{11}, ..., z_{n1})."""
        return self.cols[0].copy()


@dataclass(frozen=True)
class TriangularArray:
    """Windows X^{i,j} and V^{i,j} for 1 <= j <= i <= N on a shared range."""

    x_cells: dict[tuple[int, int], LogSeqWindow]
    v_cells: dict[tuple[int, int], LogSeqWindow]

    @property
    def size(self) -> int:
        return max(i for i, _ in self.x_cells)


def row_insert(xi: Word, b: Word) -> tuple[Word, Word]:
    """Insert word b into word xi.

    Writing ell for the common start index and N for the last index:
    xi'_ell = b_ell xi_ell; xi'_k = b_k (xi'_{k-1} + xi_k) for k > ell;
    b'_k = b_k xi_k xi'_{k-1} / (xi_{k-1} xi'_k) for k > ell.  The output
    word b' starts at ell + 1 and is one entry shorter (empty for
    length-1 inputs).
    """
    if xi.start != b.start or len(xi) != len(b):
        raise ValueError(
            f"word mismatch: ({xi.start}, len {len(xi)}) vs ({b.start}, len {len(b)})"
        )
    if xi.is_empty:
        raise ValueError("cannot insert into an empty word")
    n = len(xi)
    out = np.empty(n)
    out[0] = b.entries[0] + xi.entries[0]
    for k in range(1, n):
        out[k] = b.entries[k] + np.logaddexp(out[k - 1], xi.entries[k])
    bumped = (
        b.entries[1:] + xi.entries[1:] + out[:-1] - xi.entries[:-1] - out[1:]
    )
    return Word(xi.start, out), Word(xi.start + 1, bumped)


def array_insert(z: FullArray, b: Word) -> FullArray:
    """Insert a length-n word into a fully triangular array.

    The word is row-inserted into the first column; the bumped word is
    inserted into the second column, and so on until the bumped word is
    empty.  With all-ones inputs the first column counts lattice paths.
    """
    if b.start != 1 or len(b) != z.n:
        raise ValueError(f"word must start at 1 with length {z.n}")
    cur = b
    new_cols = []
    for ell in range(1, z.n + 1):
        col = Word(ell, z.cols[ell - 1])
        new_col, cur = row_insert(col, cur)
        new_cols.append(new_col.entries)
    if not cur.is_empty:
        raise ValueError("insertion did not terminate with an empty word")
    return FullArray(z.n, tuple(new_cols))


def array_network_step(
    z_col: np.ndarray, boundary_i: float, w_col: Word
) -> tuple[np.ndarray, Word]:
    """One column step of the insertion network with boundary.

    z_col holds log Z at heights 0..M of the previous column; boundary_i
    is the log boundary weight at height 0 and w_col the bulk log weights
    at heights 1..M.  Returns the new column, satisfying
    Z_new(0) = Z(0) I and Z_new(t) = (Z_new(t-1) + Z(t)) W_t, together
    with the dual weight word at heights 1..M.
    """
    z_col = np.asarray(z_col, dtype=np.float64)
    m = len(w_col)
    if z_col.shape != (m + 1,):
        raise ValueError(f"need {m + 1} partition values for {m} bulk weights")
    xi = Word(0, z_col)
    b = Word(0, np.concatenate(([float(boundary_i)], w_col.entries)))
    new_z, dual = row_insert(xi, b)
    return new_z.entries, dual


def build_triangular(inputs: SeqTuple, burn_in: int | None = None) -> TriangularArray:
    """Build the update-map triangular array over a tuple of windows.

    X^{i,1} = I^i; X^{i,j} = D(V^{i-1,j-1}, X^{i,j-1}) and V^{i,j-1} =
    R(V^{i-1,j-1}, X^{i,j-1}) for 2 <= j <= i; V^{i,i} = X^{i,i}.  The
    diagonal X^{i,i} reproduces component i of the intertwining tuple map.
    Windows shrink by one burn-in per column step; all cells are returned
    restricted to the final common range.
    """
    n = len(inputs)
    x: dict[tuple[int, int], LogSeqWindow] = {}
    v: dict[tuple[int, int], LogSeqWindow] = {}
    x[1, 1] = inputs.windows[0]
    v[1, 1] = inputs.windows[0]
    for i in range(2, n + 1):
        x[i, 1] = inputs.windows[i - 1]
        for j in range(2, i + 1):
            w_win = v[i - 1, j - 1]
            i_win = x[i, j - 1]
            lo = max(w_win.lo, i_win.lo)
            try:
                out = update(
                    w_win.restrict(lo, w_win.hi),
                    i_win.restrict(lo, i_win.hi),
                    burn_in=burn_in,
                )
            except ValueError as exc:
                if "window too short" in str(exc):
                    raise ValueError(
                        f"window exhausted while filling cell ({i}, {j})"
                    ) from exc
                raise
            x[i, j] = out.i_tilde
            v[i, j - 1] = out.w_tilde
        v[i, i] = x[i, i]
    lo = max(w.lo for w in list(x.values()) + list(v.values()))
    hi = inputs.hi
    x = {k: w.restrict(lo, hi) for k, w in x.items()}
    v = {k: w.restrict(lo, hi) for k, w in v.items()}
    return TriangularArray(x_cells=x, v_cells=v)
