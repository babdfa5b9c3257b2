"""Truncated sequence calculus for the update maps.

Bi-infinite sequences are represented by finite windows of log-values.  The
map update computes the three outputs D (the updated sequence), S (the
running ratio sequence) and R (the dual weight sequence) from a weight
window W and an input window I.  Truncation is handled by a burn-in: the
seed of the S recursion is forgotten geometrically at rate given by the gap
of Cesaro means, so outputs are only reported past a left margin.

Also provided: the inverse H of the update, the iterated map and the
intertwining tuple map with its inverse, and the parallel and sequential
one-step transformations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LogSeqWindow",
    "SeqTuple",
    "UpdateOutput",
    "cesaro_mean",
    "default_burn_in",
    "update",
    "update_raw",
    "inverse_h",
    "d_iterated",
    "daop",
    "haop",
    "parallel_step",
    "sequential_step",
]

# Gaps below this are treated as a violated Cesaro ordering.
_GAP_TOL = 1e-8
# Seed errors decay like exp(-2 k gap); 40 / gap pushes them below 1e-17.
_BURN_IN_RATE = 40.0


@dataclass(frozen=True)
class LogSeqWindow:
    """Window of log-values of a positive sequence on indices [lo, hi]."""

    lo: int
    hi: int
    values: np.ndarray
    cesaro_hint: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if self.hi < self.lo:
            raise ValueError(f"empty window: [{self.lo}, {self.hi}]")
        if vals.shape != (self.hi - self.lo + 1,):
            raise ValueError(
                f"values length {vals.shape} does not match [{self.lo}, {self.hi}]"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("window values must be finite")

    def restrict(self, lo: int, hi: int) -> "LogSeqWindow":
        if lo < self.lo or hi > self.hi:
            raise ValueError(f"[{lo}, {hi}] is not inside [{self.lo}, {self.hi}]")
        return LogSeqWindow(
            lo=lo,
            hi=hi,
            values=self.values[lo - self.lo : hi - self.lo + 1],
            cesaro_hint=self.cesaro_hint,
        )

    def shift(self, by: int) -> "LogSeqWindow":
        return LogSeqWindow(self.lo + by, self.hi + by, self.values, self.cesaro_hint)


@dataclass(frozen=True)
class SeqTuple:
    """Ordered tuple of windows sharing one index range."""

    windows: tuple[LogSeqWindow, ...]

    def __post_init__(self):
        wins = tuple(self.windows)
        object.__setattr__(self, "windows", wins)
        if not wins:
            raise ValueError("need at least one window")
        lo, hi = wins[0].lo, wins[0].hi
        for w in wins[1:]:
            if (w.lo, w.hi) != (lo, hi):
                raise ValueError("tuple components must share one index range")

    @property
    def lo(self) -> int:
        return self.windows[0].lo

    @property
    def hi(self) -> int:
        return self.windows[0].hi

    def __len__(self) -> int:
        return len(self.windows)

    def restrict(self, lo: int, hi: int) -> "SeqTuple":
        return SeqTuple(tuple(w.restrict(lo, hi) for w in self.windows))


@dataclass(frozen=True)
class UpdateOutput:
    """The three update outputs, valid on the common range [valid_lo, hi]."""

    i_tilde: LogSeqWindow
    j: LogSeqWindow
    w_tilde: LogSeqWindow
    valid_lo: int


def cesaro_mean(i: LogSeqWindow) -> float:
    """Window estimate of the Cesaro mean of the log-sequence."""
    if i.hi - i.lo + 1 < 2:
        raise ValueError("window length must be at least 2")
    return float(np.mean(i.values))


def _cesaro(i: LogSeqWindow) -> float:
    if i.cesaro_hint is not None:
        return float(i.cesaro_hint)
    return cesaro_mean(i)


def _gap(w: LogSeqWindow, i: LogSeqWindow) -> float:
    gap = _cesaro(i) - _cesaro(w)
    if gap <= _GAP_TOL:
        raise ValueError(
            f"Cesaro order violated: c(I) - c(W) = {gap:.3e} must be positive"
        )
    return gap


def default_burn_in(w: LogSeqWindow, i: LogSeqWindow) -> int:
    """Left margin after which the S-seed has been forgotten to roundoff."""
    return math.ceil(_BURN_IN_RATE / _gap(w, i))


def update_raw(
    log_w: np.ndarray, log_i: np.ndarray, log_j_seed: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One-pass update recursion without windowing or burn-in handling.

    Given log W_k and log I_k for k = 0..n-1 and the seed log J_{-1},
    returns log J_k for k = 0..n-1 together with log I~_k and log W~_k,
    which use J_{k-1} and therefore also cover k = 0..n-1 (k = 0 uses the
    seed).  The identity 1/I~_k + 1/J_k = 1/W_k holds exactly.
    """
    log_w = np.asarray(log_w, dtype=np.float64)
    log_i = np.asarray(log_i, dtype=np.float64)
    n = log_w.shape[0]
    if log_i.shape != (n,):
        raise ValueError("weight and input arrays must have equal length")
    log_j = np.empty(n)
    log_it = np.empty(n)
    prev = float(log_j_seed)
    for k in range(n):
        wk, ik = log_w[k], log_i[k]
        log_j[k] = wk + math.log1p(math.exp(min(prev - ik, 700.0)))
        log_it[k] = wk + math.log1p(math.exp(min(ik - prev, 700.0)))
        prev = log_j[k]
    log_wt = -np.logaddexp(-log_i, -np.concatenate(([log_j_seed], log_j[:-1])))
    return log_j, log_it, log_wt


def _seed(policy: str, w: LogSeqWindow, i: LogSeqWindow) -> float:
    if policy == "start_at_weight":
        return float(w.values[0])
    if policy == "start_at_mean":
        # Fixed point J = W I / (I - W) of the recursion at the Cesaro means.
        cw, ci = _cesaro(w), _cesaro(i)
        return float(w.values[0]) + ci - (ci + math.log1p(-math.exp(cw - ci)))
    raise ValueError(f"unknown j_seed policy: {policy!r}")


def update(
    w: LogSeqWindow,
    i: LogSeqWindow,
    j_seed: str = "start_at_mean",
    burn_in: int | None = None,
) -> UpdateOutput:
    """Apply the update map to a weight window and an input window.

    The S recursion is J_k = W_k (1 + J_{k-1} / I_k), seeded at index lo
    according to the j_seed policy ("start_at_mean" or "start_at_weight");
    the D and R outputs are I~_k = W_k (1 + I_k / J_{k-1}) and
    1/W~_k = 1/I_k + 1/J_{k-1}.  All three are reported on
    [valid_lo, hi] with valid_lo = lo + burn_in, past which the seed's
    influence is below roundoff.
    """
    if (w.lo, w.hi) != (i.lo, i.hi):
        raise ValueError("weight and input windows must share one index range")
    if burn_in is None:
        burn_in = default_burn_in(w, i)
    else:
        _gap(w, i)
        burn_in = int(burn_in)
    if burn_in < 1:
        raise ValueError("burn_in must be at least 1")
    if burn_in >= w.hi - w.lo:
        raise ValueError(
            f"window too short: burn-in {burn_in} leaves no valid range in "
            f"[{w.lo}, {w.hi}]"
        )
    # The seed plays the role of J at index lo - 1, so outputs at index lo
    # already use it; J at lo is the first recursion output.
    seed = _seed(j_seed, w, i)
    log_j, log_it, log_wt = update_raw(w.values, i.values, seed)
    valid_lo = w.lo + burn_in
    cut = burn_in
    ci = _cesaro(i)
    cw = _cesaro(w)
    return UpdateOutput(
        i_tilde=LogSeqWindow(valid_lo, w.hi, log_it[cut:], cesaro_hint=ci),
        j=LogSeqWindow(valid_lo, w.hi, log_j[cut:], cesaro_hint=None),
        w_tilde=LogSeqWindow(valid_lo, w.hi, log_wt[cut:], cesaro_hint=cw),
        valid_lo=valid_lo,
    )


def inverse_h(w: LogSeqWindow, i_tilde: LogSeqWindow) -> LogSeqWindow:
    """Invert the D output given the weight window.

    Recovers I_k = ((I~_k - W_k) / W_k) (W_{k-1} I~_{k-1} / (I~_{k-1} -
    W_{k-1})) on [lo + 1, hi]; requires I~_k > W_k everywhere.
    """
    if (w.lo, w.hi) != (i_tilde.lo, i_tilde.hi):
        raise ValueError("windows must share one index range")
    diff = i_tilde.values - w.values
    if np.any(diff <= 0.0):
        raise ValueError("not in image: need I~ > W at every index")
    # log(I~ - W) = log I~ + log1p(-exp(log W - log I~))
    log_gap = i_tilde.values + np.log1p(-np.exp(-diff))
    vals = (
        log_gap[1:]
        - w.values[1:]
        + w.values[:-1]
        + i_tilde.values[:-1]
        - log_gap[:-1]
    )
    return LogSeqWindow(w.lo + 1, w.hi, vals, cesaro_hint=i_tilde.cesaro_hint)


def _check_increasing(inputs: SeqTuple) -> None:
    means = [_cesaro(w) for w in inputs.windows]
    for a, b in zip(means, means[1:]):
        if b - a <= _GAP_TOL:
            raise ValueError(
                "Cesaro order violated: component means must be strictly increasing"
            )


def d_iterated(inputs: SeqTuple, burn_in: int | None = None) -> LogSeqWindow:
    """Right-fold of the update map's D output over the tuple components."""
    _check_increasing(inputs)
    acc = inputs.windows[-1]
    for w in reversed(inputs.windows[:-1]):
        out = update(w.restrict(acc.lo, acc.hi), acc, burn_in=burn_in)
        acc = out.i_tilde
    return acc


def daop(inputs: SeqTuple, burn_in: int | None = None) -> SeqTuple:
    """Intertwining tuple map: component i is the i-fold iterated D.

    Components are restricted to the common valid range of the deepest
    composition.
    """
    _check_increasing(inputs)
    comps = [
        d_iterated(SeqTuple(inputs.windows[: i + 1]), burn_in=burn_in)
        for i in range(len(inputs))
    ]
    lo = max(c.lo for c in comps)
    return SeqTuple(tuple(c.restrict(lo, inputs.hi) for c in comps))


def haop(inputs: SeqTuple) -> SeqTuple:
    """Left inverse of daop: peels components with inverse_h recursively."""
    if len(inputs) == 1:
        return inputs
    head = inputs.windows[0]
    peeled = [inverse_h(head, x) for x in inputs.windows[1:]]
    rest = haop(SeqTuple(tuple(peeled)))
    return SeqTuple((head.restrict(rest.lo, rest.hi),) + rest.windows)


def parallel_step(
    w: LogSeqWindow, state: SeqTuple, burn_in: int | None = None
) -> SeqTuple:
    """Apply the update with one common weight window to every component."""
    outs = [
        update(w.restrict(state.lo, state.hi), comp, burn_in=burn_in)
        for comp in state.windows
    ]
    lo = max(o.valid_lo for o in outs)
    return SeqTuple(tuple(o.i_tilde.restrict(lo, state.hi) for o in outs))


def sequential_step(
    w: LogSeqWindow, state: SeqTuple, burn_in: int | None = None
) -> SeqTuple:
    """Apply the update with weights passed along the components.

    Component 1 is updated with W itself; component i + 1 is updated with
    the R output of the i-th update.
    """
    cur_w = w
    outs = []
    for comp in state.windows:
        out = update(cur_w, comp.restrict(cur_w.lo, cur_w.hi), burn_in=burn_in)
        outs.append(out.i_tilde)
        cur_w = out.w_tilde
    lo = max(o.lo for o in outs)
    return SeqTuple(tuple(o.restrict(lo, state.hi) for o in outs))
