"""Derivative-free minimization over products of probability simplices and intervals.

Two tiers are provided.  ``grid_search`` enumerates every lattice point with
a common denominator and is the ground-truth oracle for small problems.
``multistart_search`` runs seeded random restarts of a compass (coordinate
mass-transfer) descent and handles the larger parametrizations.  Hard
constraints are handled by exact rejection of infeasible incumbents plus a
linear penalty on constraint violation while probing, so kinky objectives
(positive parts, entropy caps) do not stall the search.

All searches are deterministic functions of their inputs and the seed:
evaluation and reduction happen in index order, so a parallel driver that
preserves that order reproduces the sequential result bit for bit.
Objectives must be pure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_FEAS_TOL = 1e-12          # violation below this counts as feasible
_DRIFT_TOL = 2.5e-13       # simplex sum drift that triggers exact rescaling


@dataclass(frozen=True)
class Simplex:
    """A probability vector block of the given dimension."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("simplex dimension must be >= 1")


@dataclass(frozen=True)
class Box:
    """A scalar block constrained to [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("box needs lower <= upper")


@dataclass(frozen=True)
class SearchDomain:
    """Ordered product of simplex and box blocks."""

    blocks: tuple

    def __init__(self, blocks):
        object.__setattr__(self, "blocks", tuple(blocks))
        for b in self.blocks:
            if not isinstance(b, (Simplex, Box)):
                raise TypeError(f"unsupported block type: {type(b).__name__}")

    @property
    def n_params(self) -> int:
        return sum(b.dim if isinstance(b, Simplex) else 1 for b in self.blocks)

    def slices(self):
        """Per-block slices into the flat parameter vector."""
        out, at = [], 0
        for b in self.blocks:
            w = b.dim if isinstance(b, Simplex) else 1
            out.append(slice(at, at + w))
            at += w
        return out

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One uniform point: Dirichlet(1) per simplex, uniform per box."""
        parts = []
        for b in self.blocks:
            if isinstance(b, Simplex):
                e = rng.exponential(size=b.dim)
                parts.append(e / e.sum())
            else:
                parts.append(np.array([b.lower + (b.upper - b.lower) * rng.random()]))
        return np.concatenate(parts)

    def grid_arrays(self, resolution: int):
        """Per-block lattice points with denominator ``resolution``, lex ordered."""
        if resolution < 2:
            raise ValueError("grid resolution must be >= 2")
        out = []
        for b in self.blocks:
            if isinstance(b, Simplex):
                out.append(simplex_grid(b.dim, resolution))
            else:
                frac = np.arange(resolution + 1, dtype=np.float64) / resolution
                out.append((b.lower + (b.upper - b.lower) * frac)[:, None])
        return out


@dataclass(frozen=True)
class SolverConfig:
    """Every under-specified numeric choice of the solvers lives here."""

    grid_resolution: int = 12
    starts: int = 200
    max_iterations: int = 5000
    step_tolerance: float = 1e-6
    seed: int = 0
    penalty_weight: float = 64.0

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be >= 2")
        if self.starts < 1 or self.max_iterations < 1:
            raise ValueError("starts and max_iterations must be positive")
        if not self.step_tolerance > 0.0:
            raise ValueError("step_tolerance must be positive")
        if self.penalty_weight <= 0.0:
            raise ValueError("penalty_weight must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Outcome of a search; ``argmin is None`` marks an infeasible problem."""

    argmin: np.ndarray | None
    value: float
    evaluations: int
    converged: bool

    @property
    def infeasible(self) -> bool:
        return self.argmin is None


# ---------------------------------------------------------------------------
# lattice generation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``,
    in ascending lexicographic order."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    level = {m: np.array([[m]], dtype=np.int64) for m in range(total + 1)}
    for width in range(2, parts + 1):
        top = total if width < parts else total
        nxt = {}
        for m in range(top + 1):
            rows = []
            for first in range(m + 1):
                sub = level[m - first]
                rows.append(
                    np.hstack([np.full((sub.shape[0], 1), first, dtype=np.int64), sub])
                )
            nxt[m] = np.vstack(rows)
        if width == parts:
            return nxt[total]
        level = nxt
    return level[total]


def simplex_grid(dim: int, resolution: int) -> np.ndarray:
    """Lattice of the (dim-1)-simplex with denominator ``resolution``.

    Rows are in ascending lexicographic order and each sums to 1 within a
    few ulps.
    """
    counts = _compositions(int(resolution), int(dim))
    return counts.astype(np.float64) / float(resolution)


def _cartesian_rows(arrays):
    rows = arrays[0]
    for a in arrays[1:]:
        rows = np.hstack(
            [np.repeat(rows, len(a), axis=0), np.tile(a, (len(rows), 1))]
        )
    return rows


def _grid_chunks(block_arrays, target=1 << 18):
    """Yield the lex-ordered cartesian product of row blocks in bounded chunks."""
    sizes = [len(a) for a in block_arrays]
    k = len(block_arrays)
    split, suffix = k, 1
    while split > 0 and suffix * sizes[split - 1] <= target:
        suffix *= sizes[split - 1]
        split -= 1
    if split == k:
        split = k - 1
    trailing = _cartesian_rows(block_arrays[split:])
    lead_width = sum(a.shape[1] for a in block_arrays[:split])
    if split == 0:
        yield trailing
        return
    buf = np.empty((len(trailing), lead_width + trailing.shape[1]))
    buf[:, lead_width:] = trailing
    for combo in itertools.product(*(range(s) for s in sizes[:split])):
        at = 0
        for i, idx in enumerate(combo):
            w = block_arrays[i].shape[1]
            buf[:, at : at + w] = block_arrays[i][idx]
            at += w
        yield buf


# ---------------------------------------------------------------------------
# evaluation adapters
# ---------------------------------------------------------------------------

def _as_batch(point_fn, batch_fn):
    if batch_fn is not None:
        return batch_fn
    if point_fn is None:
        return None

    def batched(points):
        return np.array([point_fn(p) for p in points], dtype=np.float64)

    return batched


def _as_batch_mask(point_fn, batch_fn):
    if batch_fn is not None:
        return batch_fn
    if point_fn is None:
        return None

    def batched(points):
        return np.array([bool(point_fn(p)) for p in points])

    return batched


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def grid_search(
    domain: SearchDomain,
    objective=None,
    feasible=None,
    resolution: int | None = None,
    *,
    batch_objective=None,
    batch_feasible=None,
) -> SearchResult:
    """Exact minimum over every lattice point with the given denominator.

    Infeasible points and +inf objective values are skipped.  Ties break to
    the lexicographically smallest point because enumeration is lex ordered
    and only strict improvements replace the incumbent.  Returns the
    infeasible marker result when no lattice point is feasible.
    """
    if resolution is None:
        raise ValueError("grid_search needs an explicit resolution")
    obj = _as_batch(objective, batch_objective)
    if obj is None:
        raise ValueError("grid_search needs an objective")
    feas = _as_batch_mask(feasible, batch_feasible)

    best_val = math.inf
    best_pt = None
    evaluations = 0
    for chunk in _grid_chunks(domain.grid_arrays(resolution)):
        if feas is not None:
            mask = np.asarray(feas(chunk), dtype=bool)
            if not mask.any():
                continue
            pts = chunk[mask]
        else:
            pts = chunk
        vals = np.asarray(obj(pts), dtype=np.float64)
        evaluations += len(vals)
        vals = np.where(np.isnan(vals), math.inf, vals)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_pt = pts[i].copy()
    if best_pt is None or not math.isfinite(best_val):
        return SearchResult(None, math.inf, evaluations, False)
    return SearchResult(best_pt, best_val, evaluations, True)


# ---------------------------------------------------------------------------
# compass descent
# ---------------------------------------------------------------------------

def _probe_points(domain, slices, x, step):
    probes = []
    for block, sl in zip(domain.blocks, slices):
        if isinstance(block, Simplex):
            seg = x[sl]
            d = block.dim
            for j in range(d):
                avail = seg[j]
                if avail <= 0.0:
                    continue
                delta = min(step, avail)
                for i in range(d):
                    if i == j:
                        continue
                    y = x.copy()
                    y[sl.start + j] -= delta
                    y[sl.start + i] += delta
                    probes.append(y)
        else:
            width = block.upper - block.lower
            if width <= 0.0:
                continue
            v = x[sl.start]
            for delta in (step * width, -step * width):
                nv = min(max(v + delta, block.lower), block.upper)
                if nv != v:
                    y = x.copy()
                    y[sl.start] = nv
                    probes.append(y)
    return probes


def _renormalize_simplexes(domain, slices, x):
    for block, sl in zip(domain.blocks, slices):
        if isinstance(block, Simplex):
            s = x[sl].sum()
            if abs(s - 1.0) > _DRIFT_TOL and s > 0.0:
                x[sl] /= s


def compass_refine(
    domain: SearchDomain,
    objective=None,
    start=None,
    config: SolverConfig = DEFAULT_CONFIG,
    *,
    feasible=None,
    violation=None,
    batch_objective=None,
    batch_violation=None,
    batch_evaluate=None,
) -> SearchResult:
    """Local compass descent from one start point.

    Probes transfer mass between simplex coordinates (or step box scalars,
    clipped to the bounds), so every evaluated point stays inside the
    domain exactly.  Probe ranking adds ``penalty_weight`` per unit of
    constraint violation; only feasible points can become the incumbent.

    ``batch_evaluate(points) -> (values, violations)`` computes both maps
    in one pass and takes precedence over the separate callables.
    """
    obj = _as_batch(objective, batch_objective)
    if (obj is None and batch_evaluate is None) or start is None:
        raise ValueError("compass_refine needs an objective and a start point")
    viol = _as_batch(violation, batch_violation)
    feas_mask = _as_batch_mask(feasible, None) if feasible is not None else None
    slices = domain.slices()

    def score_of(points):
        pts = np.asarray(points, dtype=np.float64)
        if batch_evaluate is not None:
            raw_vals, raw_viol = batch_evaluate(pts)
            vals = np.asarray(raw_vals, dtype=np.float64)
            violations = np.maximum(np.asarray(raw_viol, dtype=np.float64), 0.0)
        else:
            vals = np.asarray(obj(pts), dtype=np.float64)
            if viol is not None:
                violations = np.maximum(np.asarray(viol(pts), float), 0.0)
            elif feas_mask is not None:
                violations = np.where(np.asarray(feas_mask(pts), bool), 0.0, math.inf)
            else:
                violations = np.zeros(len(pts))
        vals = np.where(np.isnan(vals), math.inf, vals)
        with np.errstate(invalid="ignore"):
            scores = vals + config.penalty_weight * violations
        scores = np.where(np.isnan(scores), math.inf, scores)
        return vals, violations, scores

    x = np.array(start, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        return SearchResult(None, math.inf, 0, False)
    vals, violations, scores = score_of(x[None, :])
    evaluations = 1
    cur_score = scores[0]
    best_pt, best_val = None, math.inf
    if violations[0] <= _FEAS_TOL and vals[0] < best_val:
        best_pt, best_val = x.copy(), float(vals[0])

    step = 0.25
    converged = False
    for _ in range(config.max_iterations):
        if step < config.step_tolerance:
            converged = True
            break
        probes = _probe_points(domain, slices, x, step)
        if not probes:
            converged = True
            break
        pts = np.asarray(probes)
        vals, violations, scores = score_of(pts)
        evaluations += len(pts)
        feasible_here = violations <= _FEAS_TOL
        if feasible_here.any():
            vf = np.where(feasible_here, vals, math.inf)
            j = int(np.argmin(vf))
            if vf[j] < best_val:
                best_pt, best_val = pts[j].copy(), float(vf[j])
        k = int(np.argmin(scores))
        if scores[k] < cur_score - 1e-15:
            x = pts[k].copy()
            _renormalize_simplexes(domain, slices, x)
            cur_score = scores[k]
        else:
            step *= 0.5
    if best_pt is None:
        return SearchResult(None, math.inf, evaluations, converged)
    return SearchResult(best_pt, best_val, evaluations, converged)


def multistart_search(
    domain: SearchDomain,
    objective=None,
    feasible=None,
    config: SolverConfig = DEFAULT_CONFIG,
    *,
    violation=None,
    batch_objective=None,
    batch_violation=None,
    batch_evaluate=None,
) -> SearchResult:
    """Best of ``config.starts`` seeded compass descents.

    Start points are drawn up front from ``config.seed`` (Dirichlet(1) per
    simplex block, uniform per box), so the result is a deterministic
    function of the inputs.  The returned value never exceeds the best
    value seen from any single start.  Returns the infeasible marker when
    no start produces a feasible point.
    """
    rng = np.random.default_rng(config.seed)
    starts = [domain.sample(rng) for _ in range(config.starts)]
    best = None
    evaluations = 0
    for s in starts:
        res = compass_refine(
            domain,
            objective,
            s,
            config,
            feasible=feasible,
            violation=violation,
            batch_objective=batch_objective,
            batch_violation=batch_violation,
            batch_evaluate=batch_evaluate,
        )
        evaluations += res.evaluations
        if not res.infeasible and (best is None or res.value < best.value):
            best = res
    if best is None:
        return SearchResult(None, math.inf, evaluations, False)
    return SearchResult(best.argmin, best.value, evaluations, best.converged)


# ---------------------------------------------------------------------------
# one-dimensional maximization
# ---------------------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_1d(f, grid):
    """Exact maximum over a monotone grid, then golden-section refinement.

    The grid winner (leftmost on ties, in ascending orientation) brackets
    the refinement interval; the grid point is kept unless an interior
    probe is strictly better.  Returns ``(argmax, value)``.
    """
    xs = np.asarray(list(grid), dtype=np.float64)
    if xs.size == 0:
        raise ValueError("maximize_1d needs a nonempty grid")
    if xs.size > 1:
        diffs = np.diff(xs)
        if np.all(diffs < 0):
            xs = xs[::-1]
        elif not np.all(diffs > 0):
            raise ValueError("grid must be strictly monotone")
    vals = np.array([f(x) for x in xs], dtype=np.float64)
    i = int(np.argmax(vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    a = float(xs[i - 1]) if i > 0 else best_x
    b = float(xs[i + 1]) if i + 1 < xs.size else best_x
    if a < b:
        c = b - _INVPHI * (b - a)
        d = a + _INVPHI * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(80):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - _INVPHI * (b - a)
                fc = f(c)
                probe_x, probe_v = c, fc
            else:
                a, c, fc = c, d, fd
                d = a + _INVPHI * (b - a)
                fd = f(d)
                probe_x, probe_v = d, fd
            if probe_v > best_v:
                best_x, best_v = float(probe_x), float(probe_v)
            if b - a <= 1e-12 * max(1.0, abs(a), abs(b)):
                break
    return best_x, best_v
