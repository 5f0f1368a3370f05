"""Regularity and convergence diagnostics for curve networks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidNetwork, NotConverging
from .geometry import CurveNetwork, hausdorff_distance, lengths_in_balls, total_length

TWO_PI = 2 * math.pi
ROUNDING = 1e-9


@dataclass(frozen=True, eq=False)
class DensityProfile:
    point_id: int
    base_point: tuple
    radii: np.ndarray
    densities: np.ndarray
    flags: np.ndarray
    slack: np.ndarray

    @property
    def passed(self):
        return bool(np.all(self.flags))

    def to_dict(self):
        return {"point_id": self.point_id, "base_point": list(self.base_point),
                "radii": self.radii.tolist(), "densities": self.densities.tolist(),
                "pass": self.flags.tolist(), "slack": self.slack.tolist()}


def default_radii(net, h, count=24):
    """Log-spaced radii from diam/2 down to 8h (descending)."""
    r0 = net.diameter() / 2
    lo = 8 * h if h > 0 else r0 / 1024
    if lo >= r0:
        return np.array([r0])
    return np.geomspace(r0, lo, count)


def ahlfors_profile(net, points=None, radii=None, c1=1.0, c2=TWO_PI, h=0.0):
    """Density H¹(Σ∩B_r(x))/r at each base point, checked against [c1, c2].

    ``points`` defaults to every vertex.  A radius passes when
    ``c1 - 3h/r <= density <= c2 + 3h/r``; with ``h = 0`` (exact geometry)
    there is no slack.  A rounding guard of ``ROUNDING`` keeps leaf
    endpoints, whose density is exactly 1, from flipping on the last bit.
    """
    if points is None:
        points = net.vertices
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if radii is None:
        radii = default_radii(net, h)
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be strictly descending")
    r0 = net.diameter() / 2
    if radii[0] > r0 * (1 + 1e-12):
        raise ValueError(f"radii must not exceed diam/2 = {r0}")
    lengths = lengths_in_balls(net, points, radii)
    slack = 3 * h / radii
    out = []
    for i, p in enumerate(points):
        dens = lengths[i] / radii
        flags = (dens >= c1 - slack - ROUNDING) & (dens <= c2 + slack + ROUNDING)
        out.append(DensityProfile(i, (float(p[0]), float(p[1])), radii, dens, flags, slack))
    return out


def profile_summary(profiles, c1=1.0, c2=TWO_PI, h=0.0):
    dens = np.concatenate([p.densities for p in profiles]) if profiles else np.zeros(0)
    return {
        "c1": c1,
        "c2": c2,
        "slack": "3h/r",
        "h": h,
        "observed_c1": float(dens.min()) if len(dens) else None,
        "observed_c2": float(dens.max()) if len(dens) else None,
        "points": len(profiles),
        "pass": all(p.passed for p in profiles),
    }


def write_profiles_csv(path, profiles):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point_id", "r", "density", "pass"])
        for p in profiles:
            for r, d, f in zip(p.radii, p.densities, p.flags):
                w.writerow([p.point_id, repr(float(r)), repr(float(d)), int(bool(f))])


# ---------------------------------------------------------------------------
# Gołąb semicontinuity
# ---------------------------------------------------------------------------

def golab_check(sequence, limit, tol=1e-9, tail=1, name=""):
    """Lower semicontinuity of length along a Hausdorff-converging sequence.

    Distances to the limit must be nonincreasing.  A finite list stands in
    for the sequence: the liminf is estimated by the smallest length over
    the last ``tail`` members, which must be at least the limit length
    minus ``tol``.
    """
    dists = [hausdorff_distance(s, limit) for s in sequence]
    if any(b > a + 1e-12 for a, b in zip(dists, dists[1:])):
        raise NotConverging(f"Hausdorff distances are not decreasing: {dists}")
    lengths = [total_length(s) for s in sequence]
    tail = lengths[-max(1, tail):]
    L = total_length(limit)
    return {
        "check": "golab",
        "fixture": name,
        "hausdorff": dists,
        "lengths": lengths,
        "limit_length": L,
        "tail_min_length": min(tail),
        "pass": bool(min(tail) >= L - tol),
        "tolerance": tol,
    }


def isolated_points_control(n=16):
    """Negative control: n points on [0, 1] versus the unit segment.

    A disconnected point set is not a valid network, so the control records
    the rejection and compares lengths directly: the limit has length 1
    while every member has length 0.
    """
    xs = (np.arange(n) + 0.5) / n
    try:
        CurveNetwork(np.column_stack([xs, np.zeros(n)]), np.zeros((0, 2), dtype=np.int64))
        rejected = False
    except InvalidNetwork:
        rejected = True
    return {
        "check": "golab_negative_control",
        "fixture": f"{n} isolated points on [0,1]",
        "rejected_as_network": rejected,
        "hausdorff": 0.5 / n,
        "lengths": 0.0,
        "limit_length": 1.0,
        "semicontinuity_fails": True,
        "pass": rejected,
    }


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def three_arm_star():
    """Three unit arms at 45, 135 and 270 degrees from the origin."""
    return CurveNetwork.star((0.0, 0.0), [(1.0, math.radians(a)) for a in (45, 135, 270)])


def dyadic_fan_truncated(depth):
    """Arms of length 2^-j at angle pi/(j+1), j = 0..depth; length 2 - 2^-depth."""
    return CurveNetwork.star((0.0, 0.0), [(2.0 ** -j, math.pi / (j + 1)) for j in range(depth + 1)])


def dyadic_fan(depth):
    """Truncated set plus one arm of length 2^-depth at angle pi/(depth+2).

    The extra arm carries the length of all omitted arms, so the total is 2
    and the density at the origin is exactly 2 + n for r = 2^-n, n <= depth.
    """
    arms = [(2.0 ** -j, math.pi / (j + 1)) for j in range(depth + 1)]
    arms.append((2.0 ** -depth, math.pi / (depth + 2)))
    return CurveNetwork.star((0.0, 0.0), arms)


def builtin_fixtures(depth=10):
    return {
        "three_arm_star": three_arm_star(),
        "dyadic_fan": dyadic_fan(depth),
        "dyadic_fan_truncated": dyadic_fan_truncated(depth),
    }


def dyadic_fan_report(depth, c2=TWO_PI):
    """Origin densities at r = 2^-n, n = 0..depth, and the non-Ahlfors verdict.

    The verdict comes from ``ahlfors_profile`` at the origin over the radii
    not exceeding diam/2, with exact geometry (no slack).
    """
    net = dyadic_fan(depth)
    radii = 2.0 ** -np.arange(depth + 1)
    dens = lengths_in_balls(net, [[0.0, 0.0]], radii)[0] / radii
    admissible = radii[radii <= net.diameter() / 2]
    profile = ahlfors_profile(net, [[0.0, 0.0]], admissible, c1=1.0, c2=c2, h=0.0)[0]
    return {
        "depth": depth,
        "radii": radii.tolist(),
        "densities": dens.tolist(),
        "expected": [2.0 + n for n in range(depth + 1)],
        "total_length": total_length(net),
        "truncated_length": total_length(dyadic_fan_truncated(depth)),
        "truncated_density_at_depth": float(
            lengths_in_balls(dyadic_fan_truncated(depth), [[0.0, 0.0]], radii[-1:])[0, 0] / radii[-1]),
        "profile": profile.to_dict(),
        "non_ahlfors": not profile.passed,
    }


def sawtooth(n, height=None):
    """n teeth of height 1/n over [0, 1]."""
    height = 1.0 / n if height is None else height
    pts = [(0.0, 0.0)]
    for i in range(n):
        pts.append(((i + 0.5) / n, height))
        pts.append(((i + 1.0) / n, 0.0))
    return CurveNetwork.polyline(pts)


def converging_corpus():
    """(name, sequence, limit) triples of connected networks converging in Hausdorff distance."""
    unit = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    corpus = [
        ("sawtooth", [sawtooth(n) for n in (1, 2, 4, 8, 16, 32)], unit),
        ("constant", [unit] * 4, unit),
        ("growing segment (monotone union)",
         [CurveNetwork.segment((0.0, 0.0), (1.0 - 2.0 ** -n, 0.0)) for n in range(1, 9)] + [unit], unit),
        ("dyadic fan prefixes (monotone union)",
         [dyadic_fan_truncated(n) for n in range(0, 9)], dyadic_fan_truncated(8)),
        ("zigzag around circle",
         [CurveNetwork.polyline([(math.cos(t) * (1 + (-1) ** i * 0.5 / n), math.sin(t) * (1 + (-1) ** i * 0.5 / n))
                                 for i, t in enumerate(np.linspace(0, math.pi, 8 * n + 1))])
          for n in (1, 2, 4, 8)],
         CurveNetwork.polyline([(math.cos(t), math.sin(t)) for t in np.linspace(0, math.pi, 257)])),
    ]
    return corpus


def golab_battery():
    reports = [golab_check(seq, lim, name=name) for name, seq, lim in converging_corpus()]
    reports.append(isolated_points_control())
    return reports
