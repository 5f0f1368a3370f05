"""Finite-difference elliptic solvers on lattice regions.

All operators use homogeneous Dirichlet data on every node outside the
region.  The stiffness of ``-div(sigma grad u) + V u`` is the 5-point flux
stencil with harmonic averaging of ``sigma`` on the cell faces, so the
discrete Rayleigh quotient inherits the coefficient bounds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy import ndimage
from scipy.sparse.linalg import cg, eigsh, splu

from . import _kernels
from .errors import BadExponents, NoConvergence, NotEnoughModes, SolverDiverged
from .grid import FOUR_CONNECTED


@dataclass(frozen=True)
class SolverConfig:
    pde_tol: float = 1e-8
    eig_tol: float = 1e-6
    ps_tol: float = 1e-5
    plap_eps: float = 1e-10
    seed: int = 0
    max_iter: int = 20000
    ps_max_iter: int = 5000
    dense_cutoff: int = 500


DEFAULT_CONFIG = SolverConfig()


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------

def _eval_field(f, pts):
    if callable(f):
        return np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float) * np.ones(len(pts))
    return np.full(len(pts), float(f))


@dataclass(frozen=True, eq=False)
class Coefficients:
    """Scalar fields sigma (diffusion), rho (mass density) and V (potential).

    Each field is a constant or a vectorized callable ``f(x, y)``.  Bounds are
    taken from the declaration when given, otherwise from the nodal values
    on the grid being solved.
    """

    sigma: object = 1.0
    rho: object = 1.0
    potential: object = 0.0
    sigma_bounds: tuple | None = None
    rho_bounds: tuple | None = None
    v_max: float | None = None
    label: str = "laplacian"

    @classmethod
    def laplacian(cls):
        return cls()

    @classmethod
    def constant(cls, sigma=1.0, rho=1.0, potential=0.0):
        return cls(sigma, rho, potential, (sigma, sigma), (rho, rho), potential,
                   label=f"constant(sigma={sigma}, rho={rho}, V={potential})")

    @classmethod
    def checkerboard(cls, values=(1.0, 2.0), cells=4, box=((0.0, 0.0), (1.0, 1.0))):
        (x0, y0), (x1, y1) = box
        lo, hi = values

        def sigma(x, y):
            i = np.floor((np.asarray(x) - x0) / (x1 - x0) * cells).astype(int)
            j = np.floor((np.asarray(y) - y0) / (y1 - y0) * cells).astype(int)
            return np.where((i + j) % 2 == 0, lo, hi)

        return cls(sigma, 1.0, 0.0, (min(values), max(values)), (1.0, 1.0), 0.0,
                   label=f"checkerboard{tuple(values)}x{cells}")

    @classmethod
    def random(cls, seed, sigma_range=(0.5, 3.0), rho_range=(0.5, 2.0), v_max=5.0,
               cells=5, box=((0.0, 0.0), (1.0, 1.0))):
        """Piecewise-constant random fields on a ``cells x cells`` partition of ``box``."""
        rng = np.random.default_rng(seed)
        (x0, y0), (x1, y1) = box
        tables = (rng.uniform(*sigma_range, (cells, cells)),
                  rng.uniform(*rho_range, (cells, cells)),
                  rng.uniform(0.0, v_max, (cells, cells)))

        def lookup(table):
            def f(x, y):
                i = np.clip(np.floor((np.asarray(x) - x0) / (x1 - x0) * cells).astype(int), 0, cells - 1)
                j = np.clip(np.floor((np.asarray(y) - y0) / (y1 - y0) * cells).astype(int), 0, cells - 1)
                return table[i, j]
            return f

        return cls(lookup(tables[0]), lookup(tables[1]), lookup(tables[2]),
                   tuple(sigma_range), tuple(rho_range), float(v_max), label=f"random(seed={seed})")

    @property
    def is_laplacian(self):
        return (not callable(self.sigma) and not callable(self.rho) and not callable(self.potential)
                and self.sigma == 1.0 and self.rho == 1.0 and self.potential == 0.0)

    def nodal(self, grid):
        pts = grid.node_points()
        sig = _eval_field(self.sigma, pts).reshape(grid.shape)
        rho = _eval_field(self.rho, pts).reshape(grid.shape)
        V = _eval_field(self.potential, pts).reshape(grid.shape)
        return sig, rho, V

    def bounds(self, grid=None, mask=None):
        """``(sigma1, sigma2, rho1, rho2, V2)``."""
        if self.sigma_bounds is not None and self.rho_bounds is not None and self.v_max is not None:
            return (*map(float, self.sigma_bounds), *map(float, self.rho_bounds), float(self.v_max))
        if not callable(self.sigma) and not callable(self.rho) and not callable(self.potential):
            s, r, v = float(self.sigma), float(self.rho), float(self.potential)
            return (s, s, r, r, v)
        if grid is None:
            raise ValueError("bounds of field coefficients need a grid")
        sig, rho, V = self.nodal(grid)
        m = mask if mask is not None else grid.free
        return (float(sig[m].min()), float(sig[m].max()), float(rho[m].min()), float(rho[m].max()),
                float(V[m].max()))

    def check(self, grid, mask=None):
        """Verify positivity and the declared bounds at the region's nodes."""
        sig, rho, V = self.nodal(grid)
        m = mask if mask is not None else grid.free
        s1, s2, r1, r2, v2 = self.bounds(grid, m)
        ok = (s1 > 0 and r1 > 0 and np.all(sig[m] >= s1 - 1e-12) and np.all(sig[m] <= s2 + 1e-12)
              and np.all(rho[m] >= r1 - 1e-12) and np.all(rho[m] <= r2 + 1e-12)
              and np.all(V[m] >= -1e-12) and np.all(V[m] <= v2 + 1e-12))
        if not ok:
            raise ValueError(f"coefficients {self.label} violate their bounds on the grid")


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def assemble(grid, mask, coeff=None):
    """Stiffness matrix, diagonal mass and node list for the nodes in ``mask``.

    Returns ``(A, mass, nodes)`` with ``A`` in CSR format, scaled so that
    ``A u = lambda * mass * u`` approximates the continuous eigenproblem.
    """
    mask = np.asarray(mask, dtype=bool)
    nx, ny = grid.shape
    nodes = np.flatnonzero(mask.ravel())
    n = len(nodes)
    index = np.full(nx * ny, -1, dtype=np.int64)
    index[nodes] = np.arange(n)
    h2 = grid.h * grid.h
    if coeff is None or coeff.is_laplacian:
        sig = None
        rho = np.ones(n)
        V = np.zeros(n)
    else:
        s_all, r_all, v_all = coeff.nodal(grid)
        sig = s_all.ravel()
        rho = r_all.ravel()[nodes]
        V = v_all.ravel()[nodes]

    diag = np.zeros(n)
    rows, cols, vals = [], [], []
    flat_mask = mask.ravel()
    for stride in (ny, 1):  # x-neighbour, y-neighbour
        if stride == ny:
            left = np.arange((nx - 1) * ny)
        else:
            left = (np.arange(nx)[:, None] * ny + np.arange(ny - 1)[None, :]).ravel()
        right = left + stride
        live = flat_mask[left] | flat_mask[right]
        a, b = left[live], right[live]
        if sig is None:
            face = np.ones(len(a))
        else:
            face = 2 * sig[a] * sig[b] / (sig[a] + sig[b])
        face = face / h2
        ia, ib = index[a], index[b]
        np.add.at(diag, ia[ia >= 0], face[ia >= 0])
        np.add.at(diag, ib[ib >= 0], face[ib >= 0])
        both = (ia >= 0) & (ib >= 0)
        rows.extend([ia[both], ib[both]])
        cols.extend([ib[both], ia[both]])
        vals.extend([-face[both], -face[both]])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag + V)
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return A, rho, nodes


# ---------------------------------------------------------------------------
# Torsion
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TorsionSolution:
    w: np.ndarray
    max_value: float
    max_location: tuple | None
    l1_value: float
    grad_max: float
    residual: float = 0.0

    @property
    def M(self):
        return self.max_value

    @property
    def T(self):
        return self.l1_value

    @property
    def tau(self):
        return self.grad_max


def _cg_solve(A, b, cfg):
    x, info = cg(A, b, rtol=cfg.pde_tol, atol=0.0, maxiter=cfg.max_iter)
    res = float(np.linalg.norm(b - A @ x) / max(np.linalg.norm(b), 1e-300))
    if info != 0 or not np.isfinite(res) or res > 10 * cfg.pde_tol:
        raise SolverDiverged(f"CG stopped with relative residual {res:.3e} (info={info})")
    return x, res


def solve_torsion(region, config=DEFAULT_CONFIG, componentwise=True):
    """Solve ``-Δw = 1`` on the region with zero Dirichlet data.

    With ``componentwise`` each connected component is its own linear
    system; otherwise one system spans the whole region.
    """
    grid = region.grid
    w = np.zeros(grid.nx * grid.ny)
    if region.is_empty:
        return TorsionSolution(w.reshape(grid.shape), 0.0, None, 0.0, 0.0)
    masks = ([region.component_mask(c) for c in range(region.n_components)]
             if componentwise else [region.mask])
    worst = 0.0
    for m in masks:
        A, _, nodes = assemble(grid, m)
        x, res = _cg_solve(A, np.ones(len(nodes)), config)
        w[nodes] = x
        worst = max(worst, res)
    W = w.reshape(grid.shape)
    flat = region.mask.ravel()
    vals = np.where(flat, w, -np.inf)
    k = int(np.argmax(vals))
    loc = tuple(map(float, grid.node_points([k])[0]))
    gx = np.zeros_like(W)
    gy = np.zeros_like(W)
    gx[1:-1, :] = (W[2:, :] - W[:-2, :]) / (2 * grid.h)
    gy[:, 1:-1] = (W[:, 2:] - W[:, :-2]) / (2 * grid.h)
    tau = float(np.hypot(gx, gy)[region.mask].max())
    return TorsionSolution(W, float(w[k]), loc, float(grid.h ** 2 * w.sum()), tau, worst)


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    residuals: np.ndarray
    fields: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)

    def to_dict(self):
        return {"values": [float(v) for v in self.values], "residuals": [float(r) for r in self.residuals]}


def _lowest_modes(A, mass, k, cfg):
    """Lowest ``k`` eigenpairs of ``A u = lambda diag(mass) u``."""
    n = A.shape[0]
    k = min(k, n)
    s = 1.0 / np.sqrt(mass)
    B = sp.diags(s) @ A @ sp.diags(s)
    if n <= cfg.dense_cutoff or k >= n - 1:
        vals, ys = scipy.linalg.eigh(B.toarray(), subset_by_index=[0, k - 1])
    else:
        v0 = np.random.default_rng(cfg.seed).standard_normal(n)
        try:
            vals, ys = eigsh(B.tocsc(), k=k, sigma=0.0, which="LM", v0=v0, tol=0.0)
        except Exception as exc:  # ARPACK failures surface as several types
            raise SolverDiverged(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals, kind="stable")
    vals, ys = vals[order], ys[:, order]
    us = ys * s[:, None]
    res = np.empty(k)
    for j in range(k):
        u = us[:, j]
        res[j] = np.linalg.norm(A @ u - vals[j] * mass * u) / np.linalg.norm(u)
    return vals, us, res


def eigenvalues(region, coeff=None, k=1, config=DEFAULT_CONFIG, componentwise=True, vectors=False):
    """Lowest ``k`` Dirichlet eigenvalues of ``-div(sigma grad) + V`` against ``rho``.

    Component spectra are merged into one ascending list; an empty region
    has the spectrum ``+inf, ..., +inf``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    grid = region.grid
    if region.is_empty:
        return Spectrum(np.full(k, np.inf), np.zeros(k))
    if coeff is not None and not coeff.is_laplacian:
        coeff.check(grid, region.mask)
    masks = ([region.component_mask(c) for c in range(region.n_components)]
             if componentwise else [region.mask])
    entries = []  # (value, residual, field)
    for m in masks:
        A, mass, nodes = assemble(grid, m, coeff)
        vals, us, res = _lowest_modes(A, mass, k, config)
        for j in range(len(vals)):
            f = None
            if vectors:
                f = np.zeros(grid.nx * grid.ny)
                f[nodes] = us[:, j]
                f = f.reshape(grid.shape)
            entries.append((float(vals[j]), float(res[j]), f))
    if len(entries) < k:
        raise NotEnoughModes(f"region has {len(entries)} discrete modes, {k} requested")
    entries.sort(key=lambda t: t[0])
    entries = entries[:k]
    values = np.array([e[0] for e in entries])
    residuals = np.array([e[1] for e in entries])
    bad = residuals > config.eig_tol * np.maximum(1.0, np.abs(values))
    if np.any(bad):
        raise SolverDiverged(f"eigenpair residuals {residuals[bad]} exceed eig_tol")
    return Spectrum(values, residuals, [e[2] for e in entries] if vectors else [])


def ede_bounds_check(region, coeff, k, config=DEFAULT_CONFIG):
    """Check sigma1/rho2 lam^D <= lam <= sigma2/rho1 lam^D + V2/rho1 index by index."""
    lam = eigenvalues(region, coeff, k, config).values
    lamD = eigenvalues(region, None, k, config).values
    s1, s2, r1, r2, v2 = coeff.bounds(region.grid, region.mask)
    lower = s1 / r2 * lamD
    upper = s2 / r1 * lamD + v2 / r1
    low_margin = lam - lower
    up_margin = upper - lam
    tol = config.eig_tol * np.maximum(1.0, np.abs(lam))
    return {
        "coefficients": coeff.label,
        "bounds": {"sigma1": s1, "sigma2": s2, "rho1": r1, "rho2": r2, "V2": v2},
        "lambda": lam.tolist(),
        "lambda_dirichlet": lamD.tolist(),
        "lower": lower.tolist(),
        "upper": upper.tolist(),
        "lower_margin": low_margin.tolist(),
        "upper_margin": up_margin.tolist(),
        "tolerance": tol.tolist(),
        "pass": bool(np.all(low_margin >= -tol) and np.all(up_margin >= -tol)),
    }


# ---------------------------------------------------------------------------
# Poincaré-Sobolev constants
# ---------------------------------------------------------------------------

def critical_exponent(p):
    return 2 * p / (2 - p) if p < 2 else math.inf


def check_exponents(p, q):
    if not (p > 1 and p <= q and q < critical_exponent(p)):
        raise BadExponents(f"need 1 < p <= q < p* (p*={critical_exponent(p)}), got p={p}, q={q}")


class _RatioEvaluator:
    """Discrete ratio (h^2 sum|u|^q)^(p/q) / (h^2 sum_cells mean_corners |grad u|^p).

    The energy is summed component by component, each on its own window of
    the lattice.  Two components can meet diagonally across a thin curve, and
    a cell holding nodes of both would otherwise couple them for p != 2.
    """

    def __init__(self, grid, nodes, p, q, eps):
        self.grid, self.nodes, self.p, self.q = grid, nodes, p, q
        self.h = grid.h
        self.eps = eps * self.h * self.h  # kernel works on undivided differences
        self.scale = self.h ** (2 - p)
        mask = np.zeros(grid.nx * grid.ny, dtype=bool)
        mask[nodes] = True
        labels, _ = ndimage.label(mask.reshape(grid.shape), structure=FOUR_CONNECTED)
        ii, jj = np.unravel_index(nodes, grid.shape)
        lab = labels[ii, jj]
        self.parts = []
        for c, box in enumerate(ndimage.find_objects(labels), start=1):
            pos = np.flatnonzero(lab == c)
            i0, j0 = max(box[0].start - 1, 0), max(box[1].start - 1, 0)
            shape = (min(box[0].stop + 1, grid.nx) - i0, min(box[1].stop + 1, grid.ny) - j0)
            self.parts.append((pos, ii[pos] - i0, jj[pos] - j0, shape))

    def energy(self, u):
        E, gD = 0.0, np.empty_like(u)
        for pos, li, lj, shape in self.parts:
            buf = np.zeros(shape)
            buf[li, lj] = u[pos]
            e, g = _kernels.plap_energy_grad(buf, self.p, self.eps)
            E += e
            gD[pos] = g[li, lj]
        return self.scale * E, self.scale * gD

    def __call__(self, u, grad=True):
        p, q, h2 = self.p, self.q, self.h * self.h
        D, gD = self.energy(u)
        au = np.abs(u)
        S = h2 * np.sum(au ** q)
        N = S ** (p / q)
        R = N / D
        if not grad:
            return R, None
        gN = (p / q) * S ** (p / q - 1) * h2 * q * au ** (q - 1) * np.sign(u)
        return R, (gN * D - N * gD) / (D * D)

    def normalize(self, u):
        u = np.abs(u)
        return u / (self.h * self.h * np.sum(u ** self.q)) ** (1 / self.q)


def _ps_ascent(grid, mask, p, q, cfg, start=None):
    A, _, nodes = assemble(grid, mask)
    solve = splu((A * grid.h ** 2).tocsc()).solve
    ev = _RatioEvaluator(grid, nodes, p, q, cfg.plap_eps)
    if start is None:
        # torsion-like start, positive on every component; a seeded positive
        # jitter breaks symmetric critical points of disconnected regions
        jitter = np.random.default_rng(cfg.seed).uniform(0.5, 1.5, len(nodes))
        start = solve(np.ones(len(nodes))) * jitter
    u = ev.normalize(start)
    R, g = ev(u)
    pg = solve(g)
    d = pg
    step = None
    stalls = 0
    for it in range(cfg.ps_max_iter):
        slope = float(g @ d)
        if slope <= 0:  # lost ascent: restart along the preconditioned gradient
            d = pg
            slope = float(g @ d)
            if slope <= 0:
                return R, u
        if step is None:
            step = 0.5 * np.abs(u).max() / max(np.abs(d).max(), 1e-300)
        for _ in range(60):
            cand = ev.normalize(u + step * d)
            Rc, _ = ev(cand, grad=False)
            if Rc > R:
                break
            step *= 0.5
        else:
            return R, u
        rel = (Rc - R) / R
        u = cand
        R, g_new = ev(u)
        pg_new = solve(g_new)
        # Polak-Ribiere with restart, in the inner product induced by the preconditioner
        beta = max(0.0, float(g_new @ (pg_new - pg)) / float(g @ pg))
        if (it + 1) % 50 == 0:
            beta = 0.0
        d = pg_new + beta * d
        g, pg = g_new, pg_new
        step *= 2.0
        if rel <= cfg.ps_tol:
            stalls += 1
            if stalls >= 3:
                return R, u
        else:
            stalls = 0
    raise NoConvergence(f"Poincaré-Sobolev ascent did not settle in {cfg.ps_max_iter} iterations")


def poincare_sobolev(region, p, q, config=DEFAULT_CONFIG, componentwise=True):
    """Best constant of the W0^{1,p} -> L^q embedding on the region.

    ``p = q = 2`` is the reciprocal first Dirichlet eigenvalue.  Otherwise the
    discrete ratio is maximized by a preconditioned ascent: the gradient is
    mapped through the inverse discrete Laplacian, steps are backtracked, and
    iterates are renormalized to unit L^q norm.
    """
    check_exponents(p, q)
    if region.is_empty:
        return 0.0
    if p == 2 and q == 2:
        lam = eigenvalues(region, None, 1, config, componentwise=componentwise).values[0]
        return float(1.0 / lam)
    masks = ([region.component_mask(c) for c in range(region.n_components)]
             if componentwise else [region.mask])
    return float(max(_ps_ascent(region.grid, m, p, q, config)[0] for m in masks))
