"""Command-line front end: named experiments with seeded reproducibility.

Each experiment runs a set of deterministic or statistical checks and
writes a machine-readable report (JSON or CSV).  Exit code 0 means all
checks passed, 1 means a numerical check failed, 2 means the
configuration was invalid.  The environment variable
BUSEMANN_LAB_THREADS caps the worker count for replica-parallel
experiments; results do not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import busemann as bu
from . import cif as cifmod
from . import grsk
from . import igamma_process as ig
from . import lattice as lat
from . import seqmaps as sm
from .special_functions import Rng, digamma, reg_inc_gamma, sample_inverse_gamma
from .stats import ks_one_sample, ks_two_sample, pearson, poisson_dispersion

P_THRESHOLD = 0.001


def _n_workers() -> int:
    raw = os.environ.get("BUSEMANN_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise click.UsageError(f"BUSEMANN_LAB_THREADS must be an integer, got {raw!r}")


def _check(name: str, ref: str, value: float, threshold: float, ok: bool) -> dict:
    return {
        "name": name,
        "paper_ref": ref,
        "value": float(value),
        "threshold": float(threshold),
        "pass": bool(ok),
    }


def _below(name: str, ref: str, value: float, threshold: float) -> dict:
    return _check(name, ref, value, threshold, value < threshold)


def _pvalue(name: str, ref: str, p: float) -> dict:
    return _check(name, ref, p, P_THRESHOLD, p > P_THRESHOLD)


def _parse_rhos(raw: str) -> list[float]:
    try:
        vals = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse rho list {raw!r}")
    if not vals:
        raise click.UsageError("empty rho list")
    return vals


def _finish(config: dict, checks: list[dict], output: str, fmt: str, t0: float):
    summary = {
        "total": len(checks),
        "passed": sum(1 for c in checks if c["pass"]),
        "failed": sum(1 for c in checks if not c["pass"]),
        "wall_time_s": round(time.time() - t0, 3),
    }
    report = {"config": config, "checks": checks, "summary": summary}
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=["name", "paper_ref", "value", "threshold", "pass"]
        )
        writer.writeheader()
        for c in checks:
            writer.writerow(c)
        text = buf.getvalue()
    if output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w") as fh:
            fh.write(text)
    for c in checks:
        status = "pass" if c["pass"] else "FAIL"
        click.echo(f"{status}  {c['name']}: {c['value']:.6g}", err=True)
    if summary["failed"]:
        sys.exit(1)


def _common(f):
    import functools

    inner = f

    @functools.wraps(inner)
    def wrapped(*args, **kwargs):
        try:
            return inner(*args, **kwargs)
        except ValueError as exc:
            # Invalid parameter combinations surface as configuration errors.
            raise click.UsageError(str(exc))

    f = wrapped
    f = click.option("--seed", type=int, default=7, show_default=True)(f)
    f = click.option("--output", default="-", show_default=True,
                     help="Report path, '-' for stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                     default="json", show_default=True)(f)
    return f


@click.group()
def main():
    """Experiments for the inverse-gamma polymer's Busemann process."""


def _ig_windows(rhos, alpha, window, seed):
    lams = sorted((alpha - r for r in rhos), reverse=True)
    if lams[-1] <= 0 or lams[0] >= alpha or len(set(lams)) != len(lams):
        raise click.UsageError("rhos must be distinct and inside (0, alpha)")
    rng = Rng(master_seed=seed)
    wins = []
    for i, lam in enumerate(lams):
        vals = np.log(sample_inverse_gamma(rng.spawn(i + 1), lam, size=window + 1))
        wins.append(sm.LogSeqWindow(0, window, vals, cesaro_hint=-digamma(lam)))
    w_vals = np.log(sample_inverse_gamma(rng.spawn(0), alpha, size=window + 1))
    weight = sm.LogSeqWindow(0, window, w_vals, cesaro_hint=-digamma(alpha))
    return weight, sm.SeqTuple(tuple(wins))


def run_check_intertwine(n, alpha, rhos, window, margin, seed) -> list[dict]:
    if len(rhos) != n:
        raise click.UsageError(f"need {n} rhos, got {len(rhos)}")
    weight, tup = _ig_windows(rhos, alpha, window, seed)
    lhs = sm.parallel_step(weight, sm.daop(tup))
    rhs = sm.daop(sm.sequential_step(weight, tup))
    lo = max(lhs.lo, rhs.lo, margin)
    if lo >= window:
        raise click.UsageError("window too small for the requested burn-in")
    gap = max(
        float(np.max(np.abs(
            a.restrict(lo, window).values - b.restrict(lo, window).values
        )))
        for a, b in zip(lhs.windows, rhs.windows)
    )
    return [_below(
        "intertwine-max-gap", "parallel-sequential-intertwining", gap, 1e-10
    )]


def run_check_inverse(n, alpha, rhos, window, seed) -> list[dict]:
    if len(rhos) != n:
        raise click.UsageError(f"need {n} rhos, got {len(rhos)}")
    weight, tup = _ig_windows(rhos, alpha, window, seed)
    checks = []
    out = sm.update(weight, tup.windows[0])
    inv = sm.inverse_h(weight.restrict(out.valid_lo, window), out.i_tilde)
    ref = tup.windows[0].restrict(inv.lo, inv.hi)
    checks.append(_below(
        "single-inverse-max-gap", "update-map-inverse",
        float(np.max(np.abs(inv.values - ref.values))), 1e-10,
    ))
    d_gap = float(np.min(out.i_tilde.values
                         - weight.restrict(out.valid_lo, window).values))
    checks.append(_check(
        "d-dominates-weight", "update-output-strictly-above-weight",
        d_gap, 0.0, d_gap > 0.0,
    ))
    da = sm.daop(tup)
    ha = sm.haop(da)
    err = max(
        float(np.max(np.abs(
            ha.windows[i].values
            - tup.windows[i].restrict(ha.lo, ha.hi).values
        )))
        for i in range(n)
    )
    checks.append(_below(
        "tuple-inverse-max-gap", "iterated-map-inverse", err, 1e-10
    ))
    return checks


def _paths_between(start, end):
    import itertools

    (r0, c0), (r1, c1) = start, end
    if r1 < r0 or c1 < c0:
        return []
    out = []
    for comb in itertools.combinations(range((r1 - r0) + (c1 - c0)), r1 - r0):
        cells = [(r0, c0)]
        rr, cc = r0, c0
        for s in range((r1 - r0) + (c1 - c0)):
            if s in comb:
                rr += 1
            else:
                cc += 1
            cells.append((rr, cc))
        out.append(tuple(cells))
    return out


def brute_force_ratio_array(weights: np.ndarray, n: int) -> grsk.FullArray:
    """Initial triangular array from disjoint-path partition functions.

    Cell (k, ell) is the ratio of the ell- and (ell-1)-tuple disjoint
    path sums from starting points (1, r) to endpoints (n, k - ell + r).
    Exponential cost; intended for n <= 4.
    """
    import itertools

    def tau(k, ell):
        if ell == 0:
            return 1.0
        groups = [
            _paths_between((1, r), (n, k - ell + r)) for r in range(1, ell + 1)
        ]
        total = 0.0
        for combo in itertools.product(*groups):
            cells = [c for p in combo for c in p]
            if len(set(cells)) != len(cells):
                continue
            prod = 1.0
            for (rr, cc) in cells:
                prod *= weights[rr - 1, cc - 1]
            total += prod
        return total

    cols = []
    for ell in range(1, n + 1):
        col = [
            math.log(tau(k, ell)) - math.log(tau(k, ell - 1))
            for k in range(ell, n + 1)
        ]
        cols.append(np.array(col))
    return grsk.FullArray(n, tuple(cols))


def brute_force_log_partition(weights: np.ndarray, m: int, k: int) -> float:
    """log of the path sum from (1,1) to (m,k), initial weight included."""
    lw = np.log(weights[:m, :k])
    z = np.full((m, k), -np.inf)
    z[0, 0] = lw[0, 0]
    for i in range(m):
        for j in range(k):
            if i == 0 and j == 0:
                continue
            acc = -np.inf
            if i > 0:
                acc = np.logaddexp(acc, z[i - 1, j])
            if j > 0:
                acc = np.logaddexp(acc, z[i, j - 1])
            z[i, j] = acc + lw[i, j]
    return float(z[m - 1, k - 1])


def run_grsk_verify(alpha, window, seed) -> list[dict]:
    checks = []
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (3, 4):
        weights = 1.0 / rng.gamma(alpha, size=(n + 3, n))
        arr = brute_force_ratio_array(weights, n)
        for m in range(n + 1, n + 4):
            arr = grsk.array_insert(arr, grsk.Word(1, np.log(weights[m - 1])))
            for k in range(1, n + 1):
                worst = max(worst, abs(
                    arr.cell(k, 1) - brute_force_log_partition(weights, m, k)
                ))
    checks.append(_below(
        "partition-identity-max-gap", "insertion-array-partition-function",
        worst, 1e-10,
    ))
    n = 3
    arr = brute_force_ratio_array(np.ones((n, n)), n)
    count_err = 0.0
    for m in range(n + 1, n + 6):
        arr = grsk.array_insert(arr, grsk.Word(1, np.zeros(n)))
        for k in range(1, n + 1):
            count_err = max(count_err, abs(
                math.exp(arr.cell(k, 1)) - math.comb(m + k - 2, k - 1)
            ))
    checks.append(_below(
        "all-ones-path-counts", "insertion-counts-lattice-paths",
        count_err, 1e-9,
    ))
    # Unit shape gaps keep the iterated maps well conditioned.
    _, tup = _ig_windows([0.5, 1.5, 2.5], alpha + 1.5, window, seed)
    tri = grsk.build_triangular(tup)
    da = sm.daop(tup)
    lo = max(tri.x_cells[1, 1].lo, da.lo)
    diag_err = max(
        float(np.max(np.abs(
            tri.x_cells[i, i].restrict(lo, window).values
            - da.windows[i - 1].restrict(lo, window).values
        )))
        for i in range(1, 4)
    )
    checks.append(_below(
        "array-diagonal-vs-iterated-map", "triangular-array-diagonal", diag_err, 1e-10
    ))
    return checks


def _invgamma_cdf(shape: float):
    def cdf(v: float) -> float:
        if v <= 0.0:
            return 0.0
        return 1.0 - reg_inc_gamma(shape, 1.0 / v)

    return cdf


def run_stationary_cocycle(alpha, rho, window, levels, seed) -> list[dict]:
    field = lat.WeightField(alpha, seed)
    rng = Rng(master_seed=seed, stream_id=1)
    grid = bu.stationary_cocycle(
        field, lat.RhoParam(rho, alpha), (0, window, levels), rng
    )
    i_blk, j_blk, w_blk = grid.bulk()
    rec = float(np.max(np.abs(
        np.exp(-i_blk) + np.exp(-j_blk) - np.exp(-w_blk)
    )))
    c = grid.bulk_k_lo - grid.k_lo
    add = 0.0
    for t in range(1, grid.t_max + 1):
        lhs = grid.j_vals[t, c + 1:] + grid.i_vals[t - 1, c + 1:]
        rhs = grid.i_vals[t, c + 1:] + grid.j_vals[t, c:-1]
        add = max(add, float(np.max(np.abs(lhs - rhs))))
    checks = [
        _below("recovery-residual", "cocycle-recovery", rec, 1e-12),
        _below("additivity-residual", "cocycle-additivity", add, 1e-12),
    ]
    cdf_i = _invgamma_cdf(alpha - rho)
    top = ks_one_sample(np.exp(grid.i_vals[grid.t_max, c:]), cdf_i)
    checks.append(_pvalue(
        "top-row-marginal-ks", "stationary-horizontal-law", top.p_value
    ))
    j_sp = np.exp(grid.j_vals[grid.t_max, c::16])
    jks = ks_one_sample(j_sp, _invgamma_cdf(rho))
    checks.append(_pvalue(
        "vertical-marginal-ks", "stationary-vertical-law", jks.p_value
    ))
    return checks


def run_parallel_chain(alpha, rhos, window, seed) -> list[dict]:
    if len(rhos) < 2:
        raise click.UsageError("need at least two rhos")
    if any(b >= a for a, b in zip(rhos, rhos[1:])):
        raise click.UsageError("rhos must be strictly decreasing")
    field = lat.WeightField(alpha, seed)
    rng = Rng(master_seed=seed, stream_id=1)
    grids = bu.parallel_chain(
        field, [lat.RhoParam(r, alpha) for r in rhos], (0, window, 1), rng
    )
    c = grids[0].bulk_k_lo - grids[0].k_lo
    order_gap = min(
        float(np.min(hi.i_vals[:, c:] - lo.i_vals[:, c:]))
        for hi, lo in zip(grids, grids[1:])
    )
    checks = [_check(
        "monotone-ordering", "coupled-direction-monotonicity",
        order_gap, 0.0, order_gap >= 0.0,
    )]
    g_small = grids[-1]
    ratio = np.exp(g_small.w_vals[1, c::16] - g_small.i_vals[1, c::16])
    rho2 = rhos[-1]

    def beta_cdf(a, b):
        def cdf(v):
            if v <= 0.0:
                return 0.0
            if v >= 1.0:
                return 1.0
            from .special_functions import reg_inc_beta

            return reg_inc_beta(a, b, v)

        return cdf

    r = ks_one_sample(ratio, beta_cdf(alpha - rho2, rho2))
    checks.append(_pvalue(
        "weight-ratio-beta-ks", "two-direction-joint-law", r.p_value
    ))
    g_hi, g_lo = grids[0], grids[-1]
    d_hi = g_hi.i_vals[1, c::16] - g_lo.i_vals[1, c::16]
    d_lo = g_lo.i_vals[1, c::16] - g_lo.w_vals[1, c::16]
    corr = pearson(d_hi, d_lo)
    bound = 3.0 / math.sqrt(d_hi.shape[0])
    checks.append(_check(
        "increment-independence", "independent-direction-increments",
        abs(corr), bound, abs(corr) < bound,
    ))
    return checks


def run_ppp_busemann(alpha, lam, rho, samples, seed) -> list[dict]:
    if not (0.0 < lam < rho < alpha):
        raise click.UsageError("need 0 < lambda < rho < alpha")
    rng = Rng(master_seed=seed)
    inc = ig.batch_increment_sums(alpha, [lam, rho], samples, rng.spawn(1))
    from .special_functions import reg_inc_beta

    def beta_cdf(v, a=alpha - rho, b=rho - lam):
        if v <= 0.0:
            return 0.0
        if v >= 1.0:
            return 1.0
        return reg_inc_beta(a, b, v)

    checks = []
    r = ks_one_sample(np.exp(-inc[:, 1]), beta_cdf)
    checks.append(_pvalue("increment-beta-ks", "busemann-profile-increments", r.p_value))
    mres = ig.marginal_check(alpha, rho, samples, rng.spawn(2))
    checks.append(_pvalue("marginal-ks", "busemann-edge-marginal", mres.p_value))
    corr = pearson(inc[:, 0], inc[:, 1])
    bound = 3.0 / math.sqrt(samples)
    checks.append(_check(
        "adjacent-increment-independence", "profile-independent-increments",
        abs(corr), bound, abs(corr) < bound,
    ))
    m = min(20000, samples)
    field = lat.WeightField(alpha, seed + 1)
    grids = bu.parallel_chain(
        field,
        [lat.RhoParam(rho, alpha), lat.RhoParam(lam, alpha)],
        (0, 16 * m, 1),
        Rng(master_seed=seed, stream_id=3),
    )
    c = grids[0].bulk_k_lo - grids[0].k_lo
    lattice_inc = grids[0].i_vals[1, c::16] - grids[1].i_vals[1, c::16]
    r2 = ks_two_sample(inc[:, 1], lattice_inc)
    checks.append(_pvalue(
        "cross-sampler-ks", "edge-law-equals-jump-process", r2.p_value
    ))
    return checks


def run_jump_count(alpha, delta, s_lo, s_hi, samples, seed) -> list[dict]:
    if delta <= 0:
        raise click.UsageError("delta must be positive")
    rng = Rng(master_seed=seed)
    counts = ig.batch_jump_counts(alpha, delta, (s_lo, s_hi), samples, rng)
    mu = ig.expected_jump_count(alpha, delta, (s_lo, s_hi))
    dev = abs(float(counts.mean()) - mu)
    sig3 = 3.0 * float(counts.std()) / math.sqrt(samples)
    checks = [
        _check("mean-count-vs-quadrature", "jump-intensity-measure",
               dev, sig3, dev < sig3),
        _pvalue("poisson-dispersion", "jump-process-poisson-law",
                poisson_dispersion(counts, mu)),
    ]
    return checks


def run_zero_temp(rho, samples, seed) -> list[dict]:
    if not (0.0 < rho < 1.0):
        raise click.UsageError("need 0 < rho < 1")
    rng = Rng(master_seed=seed)
    inc = ig.batch_increment_sums(
        1.0, [rho], samples, rng.spawn(1), thinning=ig.zero_temp_keep_prob
    )[:, 0]
    z0 = -np.log1p(-rng.spawn(2).uniforms(samples)) + inc
    rate = 1.0 - rho
    r = ks_one_sample(z0, lambda v: -math.expm1(-rate * v) if v > 0 else 0.0)
    checks = [_pvalue(
        "zero-temp-marginal-ks", "exponential-limit-marginal", r.p_value
    )]
    alphas = (0.5, 0.2, 0.1)
    n_rep = min(samples, 400)
    sums = {a: 0.0 for a in alphas}
    sub = rng.spawn(3)
    for i in range(n_rep):
        samp = ig.sample_ppp(1.0, rho, rng=sub.spawn(i))
        for a in alphas:
            _, za, zz = ig.zero_temp_couple(samp, a)
            sums[a] += float(np.max(za - zz))
    means = [sums[a] / n_rep for a in alphas]
    mono = all(x > y for x, y in zip(means, means[1:])) and means[-1] >= 0.0
    checks.append(_check(
        "coupling-gap-monotone", "zero-temperature-coupling-gap",
        means[0] - means[-1], 0.0, mono,
    ))
    worst = 0.0
    for a in (1.0, 0.5, 0.1, 0.01):
        bound = (math.pi ** 2 / 3.0) * a * a
        worst = max(worst, ig.reparam_bound(a) / bound)
    checks.append(_check(
        "reparametrization-bound", "direction-reparametrization-gap",
        worst, 1.0, worst <= 1.0,
    ))
    return checks


def _parallel_replicas(fn, replicas: int, workers: int):
    """Deterministic merge of per-chunk replica results."""
    if workers <= 1:
        return fn(0, replicas)
    chunk = (replicas + workers - 1) // workers
    spans = [
        (lo, min(lo + chunk, replicas)) for lo in range(0, replicas, chunk)
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: fn(*s), spans))
    return np.concatenate(parts)


def run_cif_eta(alpha, rho, replicas, seed) -> list[dict]:
    workers = _n_workers()

    def chunk(lo, hi):
        return cifmod._ratio_samples(
            alpha, rho, hi - lo, Rng(master_seed=seed, stream_id=1),
            indicator=True, start=lo,
        )

    hits = _parallel_replicas(chunk, replicas, workers)
    p = float(np.mean(hits))
    se = float(np.std(hits)) / math.sqrt(replicas)
    target = (alpha - rho) / alpha
    dev = abs(p - target)
    return [_check(
        "separating-direction-cdf", "interface-direction-law",
        dev, 3.0 * se, dev < 3.0 * se,
    )]


def run_cif_xi(alpha, rho, replicas, seed) -> list[dict]:
    workers = _n_workers()

    def chunk_r(lo, hi):
        return cifmod._ratio_samples(
            alpha, rho, hi - lo, Rng(master_seed=seed, stream_id=1),
            indicator=False, start=lo,
        )

    ratios = _parallel_replicas(chunk_r, replicas, workers)
    est = float(np.mean(ratios))
    se_x = float(np.std(ratios)) / math.sqrt(replicas)
    target = (alpha - rho) / alpha
    dev = abs(est - target)
    checks = [_check(
        "finite-interface-cdf", "finite-volume-interface-law",
        dev, 3.0 * se_x, dev < 3.0 * se_x,
    )]

    def chunk_h(lo, hi):
        return cifmod._ratio_samples(
            alpha, rho, hi - lo,
            Rng(master_seed=seed + 1, stream_id=1), indicator=True, start=lo,
        )

    hits = _parallel_replicas(chunk_h, replicas, workers)
    p = float(np.mean(hits))
    se_h = float(np.std(hits)) / math.sqrt(replicas)
    gap = abs(est - p)
    sig = 3.0 * math.hypot(se_x, se_h)
    checks.append(_check(
        "interface-law-agreement", "finite-and-semi-infinite-interface-laws",
        gap, sig, gap < sig,
    ))
    return checks


def run_she_check(alpha, rho, size, seed) -> list[dict]:
    field = lat.WeightField(alpha, seed)
    rng = Rng(master_seed=seed, stream_id=1)
    margin = bu._margin(alpha, rho)
    grid = bu.stationary_cocycle(
        field, lat.RhoParam(rho, alpha), (0, margin + size, size), rng
    )
    base = (grid.bulk_k_lo + size // 2, size // 2)
    es = bu.eternal_from_cocycle(grid, base)
    c = grid.bulk_k_lo - grid.k_lo
    lz = es.log_z
    worst = 0.0
    for r in range(1, lz.shape[0]):
        resid = np.abs(lz[r, 1:] - (
            np.logaddexp(lz[r, :-1], lz[r - 1, 1:])
            + grid.w_vals[es.t0 + r, c + 1:]
        ))
        worst = max(worst, float(np.max(resid)))
    checks = [_below(
        "heat-recursion-residual", "eternal-solution-recursion", worst, 1e-12
    )]
    i_blk, j_blk, w_blk = grid.bulk()
    psum = np.exp(w_blk - i_blk) + np.exp(w_blk - j_blk)
    perr = float(np.max(np.abs(psum - 1.0)))
    checks.append(_below(
        "backward-probability-normalization", "backward-walk-kernel", perr, 1e-12
    ))
    return checks


def run_calibrate_stats(trials, samples, seed) -> list[dict]:
    rng = Rng(master_seed=seed)
    checks = []
    u = rng.spawn(1).uniforms(trials * samples).reshape(trials, samples)
    p_one = np.array([
        ks_one_sample(u[t], lambda v: min(1.0, max(0.0, v))).p_value
        for t in range(trials)
    ])
    a = rng.spawn(2).uniforms(trials * samples).reshape(trials, samples)
    b = rng.spawn(3).uniforms(trials * samples).reshape(trials, samples)
    p_two = np.array([
        ks_two_sample(a[t], b[t]).p_value for t in range(trials)
    ])
    for name, pvals in (("one-sample-ks", p_one), ("two-sample-ks", p_two)):
        for level in (0.05, 0.01):
            rate = float(np.mean(pvals < level))
            ok = rate <= 3.0 * level
            checks.append(_check(
                f"{name}-fpr-at-{level}", "test-calibration", rate,
                3.0 * level, ok,
            ))
    corr = np.array([
        pearson(a[t], b[t]) for t in range(trials)
    ])
    rate = float(np.mean(np.abs(corr) > 3.0 / math.sqrt(samples)))
    checks.append(_check(
        "pearson-3sigma-fpr", "test-calibration", rate, 3 * 0.0027,
        rate <= 3 * 0.0027,
    ))
    from .special_functions import sample_poisson

    mu = 5.0
    counts = sample_poisson(rng.spawn(4), mu, size=trials * 50).reshape(trials, 50)
    p_disp = np.array([
        poisson_dispersion(counts[t], mu) for t in range(trials)
    ])
    for level in (0.05, 0.01):
        rate = float(np.mean(p_disp < level))
        checks.append(_check(
            f"dispersion-fpr-at-{level}", "test-calibration", rate,
            3.0 * level, rate <= 3.0 * level,
        ))
    return checks


@main.command("check-intertwine")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", "rho_raw", default="0.5,1.0,1.5", show_default=True)
@click.option("--window", type=int, default=4000, show_default=True)
@click.option("--burn-in", "margin", type=int, default=600, show_default=True,
              help="Left comparison margin.")
@_common
def cmd_check_intertwine(n, alpha, rho_raw, window, margin, seed, output, fmt):
    """Parallel and sequential one-step maps agree through the tuple map."""
    t0 = time.time()
    rhos = _parse_rhos(rho_raw)
    checks = run_check_intertwine(n, alpha, rhos, window, margin, seed)
    _finish({"experiment": "check-intertwine", "n": n, "alpha": alpha,
             "rho": rhos, "window": window, "burn_in": margin, "seed": seed},
            checks, output, fmt, t0)


@main.command("check-inverse")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", "rho_raw", default="0.5,1.0,1.5", show_default=True)
@click.option("--window", type=int, default=4000, show_default=True)
@_common
def cmd_check_inverse(n, alpha, rho_raw, window, seed, output, fmt):
    """Inverse maps undo the update and tuple maps."""
    t0 = time.time()
    rhos = _parse_rhos(rho_raw)
    checks = run_check_inverse(n, alpha, rhos, window, seed)
    _finish({"experiment": "check-inverse", "n": n, "alpha": alpha,
             "rho": rhos, "window": window, "seed": seed},
            checks, output, fmt, t0)


@main.command("grsk-verify")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--window", type=int, default=3000, show_default=True)
@_common
def cmd_grsk_verify(alpha, window, seed, output, fmt):
    """Row insertion reproduces partition functions and the tuple map."""
    t0 = time.time()
    checks = run_grsk_verify(alpha, window, seed)
    _finish({"experiment": "grsk-verify", "alpha": alpha, "window": window,
             "seed": seed}, checks, output, fmt, t0)


@main.command("stationary-cocycle")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--window", type=int, default=20000, show_default=True)
@click.option("--levels", type=int, default=3, show_default=True)
@_common
def cmd_stationary_cocycle(alpha, rho, window, levels, seed, output, fmt):
    """Exact cocycle identities and stationary marginals on a grid."""
    t0 = time.time()
    if not (0.0 < rho < alpha):
        raise click.UsageError("need 0 < rho < alpha")
    checks = run_stationary_cocycle(alpha, rho, window, levels, seed)
    _finish({"experiment": "stationary-cocycle", "alpha": alpha, "rho": rho,
             "window": window, "levels": levels, "seed": seed},
            checks, output, fmt, t0)


@main.command("parallel-chain")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", "rho_raw", default="1.2,0.4", show_default=True,
              help="Strictly decreasing list.")
@click.option("--window", type=int, default=50000, show_default=True)
@_common
def cmd_parallel_chain(alpha, rho_raw, window, seed, output, fmt):
    """Coupled multi-direction stationary chain and its joint laws."""
    t0 = time.time()
    rhos = _parse_rhos(rho_raw)
    checks = run_parallel_chain(alpha, rhos, window, seed)
    _finish({"experiment": "parallel-chain", "alpha": alpha, "rho": rhos,
             "window": window, "seed": seed}, checks, output, fmt, t0)


@main.command("ppp-busemann")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--lam", type=float, default=0.4, show_default=True)
@click.option("--rho", type=float, default=1.2, show_default=True)
@click.option("--samples", type=int, default=100000, show_default=True)
@_common
def cmd_ppp_busemann(alpha, lam, rho, samples, seed, output, fmt):
    """Jump-process sampler reproduces the Busemann edge laws."""
    t0 = time.time()
    checks = run_ppp_busemann(alpha, lam, rho, samples, seed)
    _finish({"experiment": "ppp-busemann", "alpha": alpha, "lambda": lam,
             "rho": rho, "samples": samples, "seed": seed},
            checks, output, fmt, t0)


@main.command("jump-count")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--s-lo", type=float, default=0.0, show_default=True)
@click.option("--s-hi", type=float, default=1.0, show_default=True)
@click.option("--samples", type=int, default=10000, show_default=True)
@_common
def cmd_jump_count(alpha, delta, s_lo, s_hi, samples, seed, output, fmt):
    """Counts of large jumps match the intensity quadrature."""
    t0 = time.time()
    checks = run_jump_count(alpha, delta, s_lo, s_hi, samples, seed)
    _finish({"experiment": "jump-count", "alpha": alpha, "delta": delta,
             "s_interval": [s_lo, s_hi], "samples": samples, "seed": seed},
            checks, output, fmt, t0)


@main.command("zero-temp")
@click.option("--rho", type=float, default=0.5, show_default=True)
@click.option("--samples", type=int, default=10000, show_default=True)
@_common
def cmd_zero_temp(rho, samples, seed, output, fmt):
    """Zero-temperature thinning coupling and its reparametrization bound."""
    t0 = time.time()
    checks = run_zero_temp(rho, samples, seed)
    _finish({"experiment": "zero-temp", "rho": rho, "samples": samples,
             "seed": seed}, checks, output, fmt, t0)


@main.command("cif-eta")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--replicas", type=int, default=10000, show_default=True)
@_common
def cmd_cif_eta(alpha, rho, replicas, seed, output, fmt):
    """Annealed law of the semi-infinite separating direction."""
    t0 = time.time()
    if not (0.0 < rho < alpha):
        raise click.UsageError("need 0 < rho < alpha")
    checks = run_cif_eta(alpha, rho, replicas, seed)
    _finish({"experiment": "cif-eta", "alpha": alpha, "rho": rho,
             "replicas": replicas, "seed": seed}, checks, output, fmt, t0)


@main.command("cif-xi")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--replicas", type=int, default=10000, show_default=True)
@_common
def cmd_cif_xi(alpha, rho, replicas, seed, output, fmt):
    """Annealed law of the finite-volume separating direction."""
    t0 = time.time()
    if not (0.0 < rho < alpha):
        raise click.UsageError("need 0 < rho < alpha")
    checks = run_cif_xi(alpha, rho, replicas, seed)
    _finish({"experiment": "cif-xi", "alpha": alpha, "rho": rho,
             "replicas": replicas, "seed": seed}, checks, output, fmt, t0)


@main.command("she-check")
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--size", type=int, default=200, show_default=True)
@_common
def cmd_she_check(alpha, rho, size, seed, output, fmt):
    """Eternal solutions solve the discrete heat recursion exactly."""
    t0 = time.time()
    if not (0.0 < rho < alpha):
        raise click.UsageError("need 0 < rho < alpha")
    checks = run_she_check(alpha, rho, size, seed)
    _finish({"experiment": "she-check", "alpha": alpha, "rho": rho,
             "size": size, "seed": seed}, checks, output, fmt, t0)


@main.command("calibrate-stats")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--samples", type=int, default=10000, show_default=True)
@_common
def cmd_calibrate_stats(trials, samples, seed, output, fmt):
    """False-positive rates of the statistical tests at fixed seeds."""
    t0 = time.time()
    checks = run_calibrate_stats(trials, samples, seed)
    _finish({"experiment": "calibrate-stats", "trials": trials,
             "samples": samples, "seed": seed}, checks, output, fmt, t0)


if __name__ == "__main__":
    main()
