"""Seeded stochastic local search for min F(Ω∖Σ) over connected networks of length L.

Candidates are produced by local moves, repaired back onto the constraint
set (connected, inside the closed domain, length L) and scored on the
rasterized complement.  Each generation draws a fixed number of candidates
from independent per-candidate random streams, scores them (optionally in a
thread pool), keeps the best by index-stable order and applies a Metropolis
test.  The outcome never depends on the number of threads.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import functionals as FN
from . import grid as G
from .errors import (ConfigError, DisconnectedResult, InfeasibleLength, InvalidNetwork, MaxshapeError,
                     MoveInapplicable, NoRoom, RepairFailed, TargetTooSmall)
from .geometry import (Ball, CurveNetwork, NetworkBuilder, ball_surgery, clamp_network, enlarge_to_length,
                       total_length)
from .pde import DEFAULT_CONFIG, SolverConfig

log = logging.getLogger(__name__)

MOVES = ("PerturbVertex", "SplitEdge", "SlideBranch", "BallSurgery", "EnlargeSpur", "PruneSpur")
DEFAULT_WEIGHTS = {"PerturbVertex": 4.0, "SplitEdge": 1.0, "SlideBranch": 1.0, "BallSurgery": 0.5,
                   "EnlargeSpur": 1.0, "PruneSpur": 1.0}


@dataclass(frozen=True)
class Schedule:
    initial_temperature: float = 0.05
    cooling: float = 0.995
    iterations: int = 2000
    generation_size: int = 4


@dataclass(frozen=True, eq=False)
class OptConfig:
    domain: object
    L: float
    functional: object
    coeff: object = None
    grid_h: float = 1 / 64
    moves: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    schedule: Schedule = Schedule()
    seed: int = 0
    length_tol: float = 1e-6
    step_scale: float = 0.03
    capacity_fraction: float = 0.25
    solver: SolverConfig = DEFAULT_CONFIG

    def __post_init__(self):
        unknown = set(self.moves) - set(MOVES)
        if unknown:
            raise ConfigError(f"unknown moves {sorted(unknown)}")
        w = np.array([self.moves.get(m, 0.0) for m in MOVES], dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ConfigError("move weights must be >= 0 and not all zero")
        if not self.grid_h > 0:
            raise ConfigError("grid_h must be positive")
        if not self.functional.increasing:
            raise ConfigError(f"{self.functional.name} decreases under inclusion; minimize a "
                              "SpectralComposite of the eigenvalues instead")
        if self.schedule.generation_size < 1 or self.schedule.iterations < 0:
            raise ConfigError("bad schedule")
        check_length(self.domain, self.L, self.grid_h, self.capacity_fraction)

    @property
    def weights(self):
        w = np.array([self.moves.get(m, 0.0) for m in MOVES], dtype=float)
        return w / w.sum()


def length_capacity(domain, h):
    """Length of curve that would fill the lattice: area / h."""
    return domain.area / h


def check_length(domain, L, h, fraction=0.25):
    cap = length_capacity(domain, h)
    if not (L > 0 and L < fraction * cap):
        raise InfeasibleLength(f"L={L} must lie in (0, {fraction} * {cap:.6g}) for h={h}")


@dataclass
class OptState:
    current: CurveNetwork
    value: float
    best: tuple
    trace: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class OptResult:
    best: CurveNetwork
    best_value: float
    initial: CurveNetwork
    initial_value: float
    trace: list
    audit: dict
    r0: float
    evaluations: int
    cache_hits: int

    def to_dict(self):
        return {
            "best_value": self.best_value,
            "best_length": total_length(self.best),
            "best_network": self.best.to_dict(),
            "initial_value": self.initial_value,
            "initial_network": self.initial.to_dict(),
            "r0": self.r0,
            "evaluations": self.evaluations,
            "cache_hits": self.cache_hits,
            "audit": self.audit,
        }


# ---------------------------------------------------------------------------
# Initial guess and repair
# ---------------------------------------------------------------------------

def _axis_segment(domain, center, direction, half):
    c = np.asarray(center, float)
    d = np.asarray(direction, float)
    return c - half * d, c + half * d


def _max_half_chord(domain, center, direction):
    """Largest half-length of a centered segment that stays in the closed domain."""
    (x0, y0), (x1, y1) = domain.bounding_box
    lo, hi = 0.0, math.hypot(x1 - x0, y1 - y0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        a, b = _axis_segment(domain, center, direction, mid)
        ok = bool(np.all(domain.inside(np.array([a, b])))) and not domain.crosses_boundary(a, b)
        lo, hi = (mid, hi) if ok else (lo, mid)
    return lo


def initial_guess(domain, L, seed=0, h=1 / 64, fraction=0.25):
    """Segment through the centroid along the longer bounding-box side, grown to L if needed."""
    check_length(domain, L, h, fraction)
    (x0, y0), (x1, y1) = domain.bounding_box
    direction = (1.0, 0.0) if (x1 - x0) >= (y1 - y0) else (0.0, 1.0)
    center = domain.centroid
    if not bool(domain.inside(np.array([center]))[0]):
        center = G.inradius_center(G.components(G.rasterize(domain, None, h)))[1]
    half_max = _max_half_chord(domain, center, direction)
    half = min(L / 2, 0.98 * half_max)
    a, b = _axis_segment(domain, center, direction, half)
    net = CurveNetwork.segment(tuple(a), tuple(b))
    if total_length(net) < L:
        try:
            net = enlarge_to_length(net, domain, L, rng_seed=seed, h=h)
        except (NoRoom, TargetTooSmall) as exc:
            raise InfeasibleLength(str(exc)) from exc
    return net


def _leaf_edges(net):
    deg = net.degrees()
    out = []
    for k, (i, j) in enumerate(net.edges):
        if deg[i] == 1:
            out.append((k, int(i), int(j)))
        elif deg[j] == 1:
            out.append((k, int(j), int(i)))
    return out


def _trim(net, excess):
    """Remove ``excess`` length from leaf edges, longest first."""
    b = NetworkBuilder(net)
    lengths = net.edge_lengths()
    for k, leaf, anchor in sorted(_leaf_edges(net), key=lambda t: (-lengths[t[0]], t[0])):
        if excess <= 0:
            break
        ln = lengths[k]
        if ln <= excess and sum(e is not None for e in b.e) > 1:
            b.e[k] = None
            excess -= ln
        else:
            cut = min(excess, ln * (1 - 1e-9))
            a = np.array(b.v[anchor])
            p = np.array(b.v[leaf])
            b.v[leaf] = tuple(a + (p - a) * (ln - cut) / ln)
            excess -= cut
    b.e = [e for e in b.e if e is not None]
    return b.build(net.tolerance), excess


def _scale_to(net, domain, L):
    w = net.edge_lengths()
    mids = 0.5 * (net.vertices[net.edges[:, 0]] + net.vertices[net.edges[:, 1]])
    c = (mids * w[:, None]).sum(axis=0) / w.sum()
    s = L / total_length(net)
    moved = CurveNetwork(c + s * (net.vertices - c), net.edges, net.tolerance)
    return clamp_network(moved, domain)


def _inside_closed(net, domain):
    if not np.all(domain.inside(net.vertices)):
        return False
    return not any(domain.crosses_boundary(net.vertices[i], net.vertices[j]) for i, j in net.edges)


def repair(net, domain, L, h=1 / 64, length_tol=1e-6, rng_seed=0, rounds=4):
    """Project ``net`` onto {connected, inside the closed domain, length L}."""
    try:
        net = clamp_network(net, domain)
        for _ in range(rounds):
            if not net.is_connected():
                raise RepairFailed("network is disconnected")
            cur = total_length(net)
            if abs(cur - L) <= length_tol:
                break
            if cur < L:
                net = enlarge_to_length(net, domain, L, rng_seed=rng_seed, h=h)
            else:
                net, left = _trim(net, cur - L)
                if left > length_tol:
                    net = _scale_to(net, domain, L)
    except (InvalidNetwork, NoRoom, TargetTooSmall, DisconnectedResult) as exc:
        raise RepairFailed(str(exc)) from exc
    if abs(total_length(net) - L) > length_tol or not net.is_connected() or not _inside_closed(net, domain):
        raise RepairFailed("constraints not restored")
    return net


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

def _perturb_vertex(net, cfg, rng, ctx):
    b = NetworkBuilder(net)
    i = int(rng.integers(net.n_vertices))
    step = cfg.step_scale * ctx["scale"] * rng.standard_normal(2)
    p = np.array(b.v[i]) + step
    b.v[i] = tuple(cfg.domain.clamp(p[None, :])[0])
    return b.build(net.tolerance)


def _split_edge(net, cfg, rng, ctx):
    w = net.edge_lengths()
    k = int(rng.choice(len(w), p=w / w.sum()))
    i, j = net.edges[k]
    a, c = net.vertices[i], net.vertices[j]
    t = rng.uniform(0.25, 0.75)
    d = c - a
    normal = np.array([-d[1], d[0]]) / np.hypot(*d)
    p = a + t * d + normal * rng.normal(0.0, 0.25) * np.hypot(*d)
    b = NetworkBuilder(net)
    m = b.split_edge(k, tuple(a + t * d))
    b.v[m] = tuple(cfg.domain.clamp(p[None, :])[0])
    return b.build(net.tolerance)


def _spur_path(net, leaf):
    """Vertices from ``leaf`` to the first vertex of degree != 2 (inclusive)."""
    adj = [[] for _ in range(net.n_vertices)]
    for i, j in net.edges:
        adj[i].append(int(j))
        adj[j].append(int(i))
    path = [leaf]
    prev, cur = -1, leaf
    while True:
        nxt = [v for v in adj[cur] if v != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        path.append(cur)
        if len(adj[cur]) != 2:
            break
    return path


def _slide_branch(net, cfg, rng, ctx):
    deg = net.degrees()
    leaves = [int(i) for i in np.nonzero(deg == 1)[0]]
    rng.shuffle(leaves)
    for leaf in leaves:
        path = _spur_path(net, leaf)
        junction = path[-1]
        if deg[junction] < 3:
            continue
        drop = set(path[:-1])
        b = NetworkBuilder()
        keep = [v for v in range(net.n_vertices) if v not in drop]
        idx = {v: b.add_vertex(net.vertices[v], merge=False) for v in keep}
        for i, j in net.edges:
            if int(i) in drop or int(j) in drop:
                continue
            b.add_edge(idx[int(i)], idx[int(j)])
        rest = b.build(net.tolerance)
        w = rest.edge_lengths()
        k = int(rng.choice(len(w), p=w / w.sum()))
        i, j = rest.edges[k]
        anchor = rest.vertices[i] + rng.uniform(0.05, 0.95) * (rest.vertices[j] - rest.vertices[i])
        shift = anchor - net.vertices[junction]
        b2 = NetworkBuilder(rest)
        base = b2.split_edge(k, tuple(anchor))
        prev = base
        for v in reversed(path[:-1]):
            p = cfg.domain.clamp((net.vertices[v] + shift)[None, :])[0]
            cur = b2.add_vertex(p, merge=False)
            b2.add_edge(prev, cur)
            prev = cur
        return b2.build(net.tolerance)
    raise MoveInapplicable("no spur attached at a junction")


def _ball_surgery(net, cfg, rng, ctx):
    r0 = ctx["r0"]
    h = cfg.grid_h
    if r0 <= h:
        raise MoveInapplicable("r0 below grid spacing")
    w = net.edge_lengths()
    k = int(rng.choice(len(w), p=w / w.sum()))
    i, j = net.edges[k]
    x = net.vertices[i] + rng.uniform() * (net.vertices[j] - net.vertices[i])
    r = rng.uniform(h, r0)
    try:
        out = ball_surgery(net, Ball((float(x[0]), float(x[1])), float(r)), arcs=32)
    except DisconnectedResult as exc:
        raise MoveInapplicable(str(exc)) from exc
    return clamp_network(out, cfg.domain)


def _enlarge_spur(net, cfg, rng, ctx):
    extra = rng.uniform(2 * cfg.grid_h, max(0.1 * cfg.L, 3 * cfg.grid_h))
    try:
        return enlarge_to_length(net, cfg.domain, total_length(net) + extra,
                                 rng_seed=int(rng.integers(2 ** 31)), h=cfg.grid_h)
    except (NoRoom, TargetTooSmall) as exc:
        raise MoveInapplicable(str(exc)) from exc


def _prune_spur(net, cfg, rng, ctx):
    leaves = _leaf_edges(net)
    if not leaves or net.n_edges < 2:
        raise MoveInapplicable("no prunable spur")
    k, leaf, anchor = leaves[int(rng.integers(len(leaves)))]
    path = _spur_path(net, leaf)
    b = NetworkBuilder(net)
    if net.degrees()[path[-1]] >= 3 and rng.uniform() < 0.5:
        drop = set(path[:-1])
        b.e = [e for e in b.e if e[0] not in drop and e[1] not in drop]
    else:
        b.e = [e for n, e in enumerate(b.e) if n != k]
    if not b.e:
        raise MoveInapplicable("pruning would remove every edge")
    return b.build(net.tolerance)


_MOVE_FUNCS = {"PerturbVertex": _perturb_vertex, "SplitEdge": _split_edge, "SlideBranch": _slide_branch,
               "BallSurgery": _ball_surgery, "EnlargeSpur": _enlarge_spur, "PruneSpur": _prune_spur}


def propose(net, cfg, rng, ctx, move=None):
    move = move or MOVES[int(rng.choice(len(MOVES), p=cfg.weights))]
    try:
        return move, _MOVE_FUNCS[move](net, cfg, rng, ctx)
    except InvalidNetwork as exc:
        raise MoveInapplicable(str(exc)) from exc


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def geometry_key(net):
    """Exact cache key: vertex coordinates and the canonically ordered edge list."""
    edges = np.sort(net.edges, axis=1)
    return net.vertices.tobytes(), edges[np.lexsort(edges.T[::-1])].tobytes()


def score(net, cfg):
    region = G.components(G.rasterize(cfg.domain, net, cfg.grid_h))
    return float(cfg.functional.evaluate(region, cfg.coeff, cfg.solver))


def _candidate(state_net, cfg, ctx, seed_seq, cache):
    rng = np.random.default_rng(seed_seq)
    for _ in range(8):
        try:
            move, cand = propose(state_net, cfg, rng, ctx)
            cand = repair(cand, cfg.domain, cfg.L, cfg.grid_h, cfg.length_tol, int(rng.integers(2 ** 31)))
        except (MoveInapplicable, RepairFailed):
            continue
        key = geometry_key(cand)
        if key in cache:
            return move, cand, cache[key], key, True
        try:
            return move, cand, score(cand, cfg), key, False
        except MaxshapeError as exc:
            log.debug("candidate scoring failed: %s", exc)
            continue
    return None


def _thread_count(threads):
    if threads is None:
        env = os.environ.get("MAXSHAPE_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _r0(net, cfg):
    r = net.diameter() / 2
    if cfg.functional.spectral:
        try:
            region = G.components(G.rasterize(cfg.domain, net, cfg.grid_h))
            if not region.is_empty:
                r = min(r, FN.certified_radius(region, cfg.coeff, cfg.functional.k)[0])
        except (MaxshapeError, ValueError):
            pass
    return r


def minimize(cfg, threads=None, initial=None, progress=None):
    """Simulated annealing over networks; deterministic given ``cfg`` (seed included)."""
    net0 = initial if initial is not None else initial_guess(cfg.domain, cfg.L, cfg.seed, cfg.grid_h,
                                                             cfg.capacity_fraction)
    net0 = repair(net0, cfg.domain, cfg.L, cfg.grid_h, cfg.length_tol, cfg.seed)
    v0 = score(net0, cfg)
    state = OptState(net0, v0, (net0, v0))
    cache = {geometry_key(net0): v0}
    sched = cfg.schedule
    scale = max(np.ptp(cfg.domain.boundary[:, 0]), np.ptp(cfg.domain.boundary[:, 1]))
    ctx = {"scale": scale, "r0": _r0(net0, cfg)}
    n_threads = _thread_count(threads)
    temperature = sched.initial_temperature
    evaluations = hits = 0
    iteration = 0
    generation = 0
    pool = ThreadPoolExecutor(n_threads) if n_threads > 1 else None
    try:
        while iteration < sched.iterations:
            size = min(sched.generation_size, sched.iterations - iteration)
            seeds = [np.random.SeedSequence([int(cfg.seed), generation, i]) for i in range(size)]
            frozen = dict(cache)
            args = [(state.current, cfg, ctx, s, frozen) for s in seeds]
            if pool is None:
                results = [_candidate(*a) for a in args]
            else:
                results = list(pool.map(lambda a: _candidate(*a), args))
            u = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), generation, 0xACC])).uniform()
            best_idx = None
            for i, res in enumerate(results):
                if res is None:
                    continue
                move, cand, val, key, hit = res
                evaluations += not hit
                hits += hit
                cache.setdefault(key, val)
                if best_idx is None or val < results[best_idx][2]:
                    best_idx = i
            accepted = False
            if best_idx is not None:
                move, cand, val, _, _ = results[best_idx]
                delta = (val - state.value) / max(abs(state.value), 1e-12) if math.isfinite(state.value) else -1.0
                if delta <= 0 or (temperature > 0 and u < math.exp(-delta / temperature)):
                    accepted = True
                    state.current, state.value = cand, val
                    ctx["r0"] = _r0(cand, cfg)
                    if val < state.best[1]:
                        state.best = (cand, val)
            for i, res in enumerate(results):
                rec = {"iteration": iteration + i, "generation": generation, "candidate": i,
                       "move": res[0] if res else "none", "value": res[2] if res else math.nan,
                       "accepted": bool(accepted and i == best_idx), "current": state.value,
                       "best": state.best[1], "temperature": temperature,
                       "length": total_length(res[1]) if res else math.nan}
                state.trace.append(rec)
            iteration += size
            generation += 1
            temperature *= sched.cooling ** size
            if progress is not None:
                progress(iteration, state)
    finally:
        if pool is not None:
            pool.shutdown()
    from .audit import ahlfors_profile, default_radii, profile_summary

    best = state.best[0]
    profiles = ahlfors_profile(best, None, default_radii(best, cfg.grid_h), 1.0, 2 * math.pi, cfg.grid_h)
    audit = profile_summary(profiles, 1.0, 2 * math.pi, cfg.grid_h)
    return OptResult(best, state.best[1], net0, v0, state.trace, audit, ctx["r0"], evaluations, hits)


def config_from_dict(data, domain):
    """Build an OptConfig from the ``optimizer`` section of a run config."""
    sched = Schedule(**data.get("schedule", {}))
    return OptConfig(
        domain=domain,
        L=float(data["L"]),
        functional=FN.from_spec(data["functional"]),
        coeff=None,
        grid_h=float(data.get("grid_h", 1 / 64)),
        moves=dict(data.get("moves", DEFAULT_WEIGHTS)),
        schedule=sched,
        seed=int(data.get("seed", 0)),
        length_tol=float(data.get("length_tol", 1e-6)),
        step_scale=float(data.get("step_scale", 0.03)),
        capacity_fraction=float(data.get("capacity_fraction", 0.25)),
        solver=SolverConfig(**data.get("solver", {})),
    )


# ---------------------------------------------------------------------------
# Parametric-family oracle
# ---------------------------------------------------------------------------

def parametric_family(domain, L, step=0.01, angle_step=1.0, square_symmetry=True):
    """Centered segments and four-arm plus shapes of total length L.

    Segments pass through the centroid at every ``angle_step`` degrees.  Plus
    shapes have axis-aligned arms from the centroid with lengths on a lattice
    of spacing ``step * L`` (each arm at most L/2).  With ``square_symmetry``
    shapes equal up to a symmetry of the square are listed once.  Shapes
    leaving the closed domain are skipped.  Yields ``(label, network)``.
    """
    c = np.asarray(domain.centroid)
    for k in range(int(round(180 / angle_step))):
        a = math.radians(k * angle_step)
        d = 0.5 * L * np.array([math.cos(a), math.sin(a)])
        net = CurveNetwork.segment(tuple(c - d), tuple(c + d))
        if _inside_closed(net, domain):
            yield f"segment angle={k * angle_step:g}", net
    n = int(round(1 / step))
    half = n // 2
    for a in range(half + 1):
        for b in range(half + 1):
            for cc in range(half + 1):
                d = n - a - b - cc
                if d < 0 or d > half:
                    continue
                if square_symmetry and (a < max(b, cc, d) or b < d):
                    continue
                arms = [(x * step * L, q * math.pi / 2) for q, x in enumerate((a, b, cc, d)) if x > 0]
                net = CurveNetwork.star(tuple(c), arms)
                if _inside_closed(net, domain):
                    yield f"plus arms={a},{b},{cc},{d}", net
