"""Special-case exponents and the comparison lower bound.

Covers the exponent when the side information is not encoded (r2 at least
log2 |Y|), the single-user exponent in both its divergence-minimization and
parametric tilted forms, the parametric comparison bound restricted to the
same single-user network, and the general-network version of that bound.
The two single-user forms agree (that equivalence is acceptance-tested),
while the comparison bound is strictly smaller whenever r1 < H(X); the gap
report packages that difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .probkit import DomainError, JointPmf2, Pmf, entropy_bits
from .simplex_optim import (
    SearchDomain,
    Simplex,
    SolverConfig,
    compass_refine,
    grid_search,
    maximize_1d,
    multistart_search,
)

THETA_FLOOR = -1e4
MU_ALPHA_GRID = 41

# small simplex problems: lattice oracle first, local descent after
NE_DEFAULT = SolverConfig(grid_resolution=60, starts=24, seed=0)
SINGLE_DEFAULT = SolverConfig(grid_resolution=64, starts=16, seed=0)
OOHAMA_DEFAULT = SolverConfig(
    grid_resolution=12, starts=8, max_iterations=600, step_tolerance=1e-5, seed=0
)

_GRID_POINT_CAP = 1_600_000


def _default_theta_values() -> tuple:
    exps = np.arange(-80, 81) * 0.05
    return (0.0,) + tuple(-np.power(10.0, exps))


@dataclass(frozen=True)
class ThetaGrid:
    """Descending nonpositive tilt abscissae, log-spaced down to -1e4.

    Contains 0 and -1 exactly; the floor bounds the truncation error of the
    parametric supremum by (log2 |X| - r1) / 1e4.
    """

    abscissae: tuple = field(default_factory=_default_theta_values)

    def __post_init__(self):
        t = tuple(float(v) for v in self.abscissae)
        object.__setattr__(self, "abscissae", t)
        if any(v > 0.0 for v in t):
            raise DomainError("theta grid must be nonpositive")
        if any(b >= a for a, b in zip(t, t[1:])):
            raise DomainError("theta grid must be strictly descending")
        if 0.0 not in t or -1.0 not in t:
            raise DomainError("theta grid must contain 0 and -1")

    def restricted_to_unit(self) -> tuple:
        """The sub-grid inside [-1, 0]."""
        return tuple(v for v in self.abscissae if v >= -1.0)


DEFAULT_THETA_GRID = ThetaGrid()


def s_theta(p: Pmf, theta: float) -> float:
    """Tilted log-sum log2 sum_x p(x)^(1-theta) for theta <= 0.

    Evaluated in log space so that tilts as deep as the -1e4 grid floor do
    not underflow; null atoms contribute nothing.
    """
    if theta > 0.0:
        raise DomainError("theta must be nonpositive")
    probs = p.probs[p.probs > 0.0]
    exponents = (1.0 - theta) * np.log2(probs)
    top = exponents.max()
    return float(top + math.log2(np.exp2(exponents - top).sum()))


# ---------------------------------------------------------------------------
# divergence-minimization forms
# ---------------------------------------------------------------------------

def _capped_resolution(k: int, resolution: int) -> int:
    res = resolution
    while res > 2 and math.comb(res + k - 1, k - 1) > _GRID_POINT_CAP:
        res -= 1
    return res


def _simplex_min(k, batch_objective, config, candidates, use_grid=True):
    """Shared driver: lattice oracle (when enumerable), refined candidates,
    then multistart; returns (value, argmin, evaluations)."""
    domain = SearchDomain([Simplex(k)])
    runs = []
    if use_grid:
        res = _capped_resolution(k, config.grid_resolution)
        g = grid_search(domain, resolution=res, batch_objective=batch_objective)
        runs.append(g)
        if not g.infeasible:
            candidates = list(candidates) + [g.argmin]
    for c in candidates:
        runs.append(
            compass_refine(
                domain,
                start=np.asarray(c, dtype=np.float64),
                config=config,
                batch_objective=batch_objective,
            )
        )
    runs.append(multistart_search(domain, config=config, batch_objective=batch_objective))
    best = None
    evaluations = 0
    for r in runs:
        evaluations += r.evaluations
        if not r.infeasible and (best is None or r.value < best.value):
            best = r
    return best.value, best.argmin, evaluations


def exponent_ne(src: JointPmf2, r1: float, config: SolverConfig | None = None) -> float:
    """Exponent with non-encoded side information.

    Minimum over joints m of D(m || src) + max(H(X|Y under m) - r1, 0);
    zero exactly when r1 >= H(X|Y).
    """
    if r1 < 0.0:
        raise DomainError("r1 must be nonnegative")
    config = NE_DEFAULT if config is None else config
    k = src.nx * src.ny
    flat = src.probs.ravel()
    with np.errstate(divide="ignore"):
        log_src = np.log2(flat)

    def batch_objective(pts):
        m = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        with np.errstate(divide="ignore", invalid="ignore"):
            kl = np.nansum(m * (np.log2(m) - log_src), axis=1)
        h_xy = _entropy_rows(m)
        h_y = _entropy_rows(m.reshape(-1, src.nx, src.ny).sum(axis=1))
        return kl + np.maximum(h_xy - h_y - r1, 0.0)

    candidates = [flat.copy()]
    for i in range(k):
        if flat[i] > 0.0:
            e = np.zeros(k)
            e[i] = 1.0
            candidates.append(e)
    px = src.probs.sum(axis=1)
    for x in range(src.nx):
        if px[x] > 0.0:
            row = np.zeros((src.nx, src.ny))
            row[x] = src.probs[x] / px[x]
            candidates.append(row.ravel())
    value, _, _ = _simplex_min(k, batch_objective, config, candidates, use_grid=k <= 9)
    return float(value)


def _entropy_rows(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(m.shape[0], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = flat * np.log2(flat)
    return -np.nansum(t, axis=1)


def _entropy_matched_tilts(probs: np.ndarray, r1: float) -> list:
    """Tilted laws q ~ p^c on each top-m support with H(q) = r1.

    The minimizer of D(q||p) + max(H(q) - r1, 0) lies in this family: on
    the branch H >= r1 the objective is linear in q and touches the
    entropy boundary, on the other branch it is the divergence projection;
    both pick a power tilt of p restricted to the largest atoms.
    """
    order = np.argsort(-probs, kind="stable")
    order = [i for i in order if probs[i] > 0.0]
    out = []

    def tilt(support, c):
        # log-space so that deep tilts saturate to a point mass, never 0/0
        logs = np.log(probs[support])
        q = np.zeros_like(probs)
        q[support] = np.exp(c * (logs - logs.max()))
        return q / q[support].sum()

    def ent(q):
        qp = q[q > 0.0]
        return float(-(qp * np.log2(qp)).sum())

    for m in range(1, len(order) + 1):
        support = np.array(order[:m])
        if r1 > math.log2(m) + 1e-12 and m > 1:
            continue
        if m == 1:
            out.append(tilt(support, 1.0))
            continue
        lo, hi = 0.0, 1.0
        while ent(tilt(support, hi)) > r1 and hi < 1e7:
            hi *= 2.0
        if ent(tilt(support, hi)) > r1:
            # tied top atoms: the entropy floor of this support sits above r1
            out.append(tilt(support, hi))
            continue
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if ent(tilt(support, mid)) > r1:
                lo = mid
            else:
                hi = mid
        out.append(tilt(support, 0.5 * (lo + hi)))
    return out


def exponent_single_direct(p: Pmf, r1: float, config: SolverConfig | None = None) -> float:
    """Single-user exponent: min over q of D(q || p) + max(H(q) - r1, 0)."""
    if r1 < 0.0:
        raise DomainError("r1 must be nonnegative")
    config = SINGLE_DEFAULT if config is None else config
    k = p.alphabet_size
    with np.errstate(divide="ignore"):
        log_p = np.log2(p.probs)

    def batch_objective(pts):
        q = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        with np.errstate(divide="ignore", invalid="ignore"):
            kl = np.nansum(q * (np.log2(q) - log_p), axis=1)
        return kl + np.maximum(_entropy_rows(q) - r1, 0.0)

    candidates = [p.probs.copy(), np.full(k, 1.0 / k)]
    for i in range(k):
        if p.probs[i] > 0.0:
            e = np.zeros(k)
            e[i] = 1.0
            candidates.append(e)
    candidates.extend(_entropy_matched_tilts(p.probs, r1))
    value, _, _ = _simplex_min(k, batch_objective, config, candidates)
    return float(value)


# ---------------------------------------------------------------------------
# parametric forms
# ---------------------------------------------------------------------------

def _parametric_max(p: Pmf, r1: float, thetas, denominator_shift: float):
    """max over the grid of (-s(theta) + theta*r1) / (shift - theta)."""

    def f(theta):
        return (-s_theta(p, theta) + theta * r1) / (denominator_shift - theta)

    return maximize_1d(f, thetas)


def exponent_single_parametric(p: Pmf, r1: float, grid: ThetaGrid | None = None) -> float:
    """Parametric single-user exponent max_{theta<=0} (-s+theta*r1)/(1-theta).

    Agrees with :func:`exponent_single_direct` up to the grid-floor
    truncation; for low rates the supremum is approached only as the tilt
    goes to -infinity.
    """
    if r1 < 0.0:
        raise DomainError("r1 must be nonnegative")
    grid = DEFAULT_THETA_GRID if grid is None else grid
    _, value = _parametric_max(p, r1, grid.abscissae, 1.0)
    return float(value)


def oohama_single(p: Pmf, r1: float, grid=None) -> float:
    """Parametric comparison bound max_{theta in [-1,0]} (-s+theta*r1)/(2-theta)."""
    if r1 < 0.0:
        raise DomainError("r1 must be nonnegative")
    thetas = DEFAULT_THETA_GRID.restricted_to_unit() if grid is None else tuple(grid)
    if any(t < -1.0 or t > 0.0 for t in thetas):
        raise DomainError("the comparison-bound grid must lie in [-1, 0]")
    _, value = _parametric_max(p, r1, thetas, 2.0)
    return float(value)


@dataclass(frozen=True)
class GapReport:
    """Side-by-side parametric values and their strict difference."""

    f_oohama: float
    f_tight: float
    gap: float
    argmax_theta_oohama: float
    argmax_theta_tight: float

    def __post_init__(self):
        if abs(self.gap - (self.f_tight - self.f_oohama)) > 1e-12:
            raise ValueError("gap must equal f_tight - f_oohama")

    def to_dict(self) -> dict:
        return {
            "f_oohama": self.f_oohama,
            "f_tight": self.f_tight,
            "gap": self.gap,
            "argmax_theta_oohama": self.argmax_theta_oohama,
            "argmax_theta_tight": self.argmax_theta_tight,
        }


def gap_check(p: Pmf, r1: float, grid: ThetaGrid | None = None) -> GapReport:
    """Compare the two single-user parametric forms below entropy rate.

    Requires r1 < H(p); the tight form strictly exceeds the comparison
    bound there.
    """
    if r1 < 0.0:
        raise DomainError("r1 must be nonnegative")
    if r1 >= entropy_bits(p.probs):
        raise DomainError("gap_check requires r1 < H(p)")
    grid = DEFAULT_THETA_GRID if grid is None else grid
    theta_t, f_t = _parametric_max(p, r1, grid.abscissae, 1.0)
    theta_o, f_o = _parametric_max(p, r1, grid.restricted_to_unit(), 2.0)
    return GapReport(
        f_oohama=float(f_o),
        f_tight=float(f_t),
        gap=float(f_t - f_o),
        argmax_theta_oohama=float(theta_o),
        argmax_theta_tight=float(theta_t),
    )


# ---------------------------------------------------------------------------
# the general-network comparison bound
# ---------------------------------------------------------------------------

def _scaled(coef: float, arr: np.ndarray) -> np.ndarray:
    # 0 * (+-inf) means "term absent", not nan
    if coef == 0.0:
        return np.zeros_like(arr)
    return coef * arr


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: float, b: float, iters: int = 24):
    """Iteration-capped golden-section maximization on [a, b].

    The refinement of the tilt grid calls this with an expensive inner
    minimization behind ``f``, so the full-precision 1-d routine would be
    wasteful; two dozen shrinks already beat the grid spacing by 1e4.
    """
    if not a < b:
        return a, f(a)
    best_x, best_v = a, f(a)
    fb = f(b)
    if fb > best_v:
        best_x, best_v = b, fb
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
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
            best_x, best_v = probe_x, probe_v
    return float(best_x), float(best_v)


class OohamaEvaluator:
    """Computes the general comparison bound for one source.

    The inner tilted minimization runs over the free parameters of the
    constraint set (an output-marginal candidate and test-channel rows; the
    Markov chain and the matched conditional are enforced by construction)
    and is memoized per tilt pair, so sweeping many rate pairs against one
    source reuses the expensive part.
    """

    def __init__(self, src: JointPmf2, nu: int | None = None, config: SolverConfig | None = None):
        if nu is None:
            nu = src.ny
        if nu < 1 or nu > src.ny:
            raise DomainError("auxiliary size for the comparison bound must be in [1, |Y|]")
        self.src = src
        self.nu = nu
        self.config = OOHAMA_DEFAULT if config is None else config
        self.py = src.probs.sum(axis=0)
        with np.errstate(divide="ignore"):
            self.log_py = np.log2(self.py)
        cond = np.zeros_like(src.probs)
        pos = self.py > 0.0
        cond[:, pos] = src.probs[:, pos] / self.py[pos]
        self.cond_x_given_y = cond
        self.domain = SearchDomain([Simplex(src.ny)] + [Simplex(nu)] * src.ny)
        self._omega_cache: dict = {}

    def _omega_rows(self, mu: float, alpha: float, pts: np.ndarray) -> np.ndarray:
        ny, nu, nx = self.src.ny, self.nu, self.src.nx
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        pyt = pts[:, :ny]
        w = pts[:, ny:].reshape(-1, ny, nu)
        pt_uy = pyt[:, None, :] * w.transpose(0, 2, 1)          # (B, nu, ny)
        pt_u = pt_uy.sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            py_given_u = pt_uy / pt_u[:, :, None]
        px_given_u = np.einsum("buy,xy->bux", np.nan_to_num(py_given_u), self.cond_x_given_y)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_pyt = np.log2(pyt)
            log_pygu = np.log2(py_given_u)
            log_pxgu = np.log2(px_given_u)
            tau = (
                _scaled(1.0 - alpha, (log_pyt - self.log_py)[:, None, None, :])
                + _scaled(alpha * mu, (log_pygu - self.log_py[None, None, :])[:, :, None, :])
                + _scaled(alpha * (1.0 - mu), -log_pxgu[:, :, :, None])
            )
        weight = pt_uy[:, :, None, :] * self.cond_x_given_y[None, None, :, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            exponents = np.where(weight > 0.0, np.log2(weight) - tau, -math.inf)
        z = np.exp2(exponents).sum(axis=(1, 2, 3))
        with np.errstate(divide="ignore"):
            return -np.log2(z)

    def omega(self, mu: float, alpha: float) -> float:
        """Inner minimum of the tilted log-sum at one (mu, alpha)."""
        key = (round(float(mu), 12), round(float(alpha), 12))
        hit = self._omega_cache.get(key)
        if hit is not None:
            return hit

        def batch_objective(pts):
            return self._omega_rows(mu, alpha, pts)

        candidates = []
        base = np.concatenate([self.py, np.full(self.src.ny * self.nu, 1.0 / self.nu)])
        candidates.append(base)
        if self.nu >= 2:
            rows = np.zeros((self.src.ny, self.nu))
            for y in range(self.src.ny):
                rows[y, y % self.nu] = 1.0
            candidates.append(np.concatenate([self.py, rows.ravel()]))
        runs = [
            grid_search(
                self.domain,
                resolution=self.config.grid_resolution,
                batch_objective=batch_objective,
            )
        ]
        if not runs[0].infeasible:
            candidates.append(runs[0].argmin)
        for c in candidates:
            runs.append(
                compass_refine(
                    self.domain,
                    start=np.asarray(c, dtype=np.float64),
                    config=self.config,
                    batch_objective=batch_objective,
                )
            )
        best = min(r.value for r in runs if not r.infeasible)
        self._omega_cache[key] = float(best)
        return float(best)

    def bound(self, r1: float, r2: float) -> float:
        """sup over tilts of the normalized comparison exponent.

        The sup includes the (0, 0) corner, whose value is exactly zero, so
        the result is clamped to be nonnegative.
        """
        if r1 < 0.0 or r2 < 0.0:
            raise DomainError("rates must be nonnegative")

        def f(mu, alpha):
            return (self.omega(mu, alpha) - alpha * ((1.0 - mu) * r1 + mu * r2)) / (
                2.0 + alpha * (1.0 - mu)
            )

        axis = np.linspace(0.0, 1.0, MU_ALPHA_GRID)
        best_val = -math.inf
        best_ij = (0, 0)
        for i, mu in enumerate(axis):
            for j, alpha in enumerate(axis):
                v = f(mu, alpha)
                if v > best_val:
                    best_val = v
                    best_ij = (i, j)
        i, j = best_ij
        mu_lo = axis[max(i - 1, 0)]
        mu_hi = axis[min(i + 1, MU_ALPHA_GRID - 1)]
        mu_star, v1 = _golden_max(lambda m: f(m, axis[j]), mu_lo, mu_hi)
        if v1 < best_val:
            mu_star = axis[i]
        best_val = max(best_val, v1)
        a_lo = axis[max(j - 1, 0)]
        a_hi = axis[min(j + 1, MU_ALPHA_GRID - 1)]
        _, v2 = _golden_max(lambda a: f(mu_star, a), a_lo, a_hi)
        best_val = max(best_val, v2)
        return max(float(best_val), 0.0)


def oohama_wak_bound(
    src: JointPmf2,
    rates,
    nu: int | None = None,
    config: SolverConfig | None = None,
) -> float:
    """One-shot general comparison bound; see :class:`OohamaEvaluator`."""
    from .wak_exponent import RatePair

    rates = rates if isinstance(rates, RatePair) else RatePair(*rates)
    return OohamaEvaluator(src, nu=nu, config=config).bound(rates.r1, rates.r2)
