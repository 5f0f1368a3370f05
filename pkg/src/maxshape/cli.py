"""Batch entry point.

    maxshape --config run.json [--seed N] [--out DIR] [--quiet] [COMMAND]

COMMAND is one of solve, evaluate, audit, properties, fixtures (overriding the
config's ``command``) or validate, which only reports config diagnostics.
Exit codes: 0 success, 2 a constraint or property violation was detected,
1 error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import audit as AU
from . import functionals as FN
from . import grid as G
from . import optimizer as OPT
from . import pde
from . import svg
from .errors import ConfigError, InfeasibleLength, MaxshapeError
from .geometry import CurveNetwork, DomainSpec, total_length

log = logging.getLogger("maxshape")

COMMANDS = ("solve", "evaluate", "audit", "properties", "fixtures")
TOP_KEYS = {"command", "domain", "functional", "optimizer", "solver", "coefficients", "network", "grid_h",
            "audit", "properties", "fixtures", "output", "render", "seed"}
OPTIMIZER_KEYS = {"L", "grid_h", "moves", "schedule", "seed", "length_tol", "step_scale", "capacity_fraction"}
SCHEDULE_KEYS = {"initial_temperature", "cooling", "iterations", "generation_size"}
SOLVER_KEYS = set(pde.SolverConfig.__dataclass_fields__)
AUDIT_KEYS = {"radii", "c1", "c2", "h", "points"}
PROPERTIES_KEYS = {"h", "include_ps"}
FIXTURES_KEYS = {"depth"}
EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


# ---------------------------------------------------------------------------
# Config loading
# ---------------------------------------------------------------------------

def _resolve(ref, base):
    """Inline JSON object, or a path relative to the config file."""
    if isinstance(ref, dict):
        return ref
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    return json.loads(path.read_text())


def load_domain(ref, base):
    data = _resolve(ref, base)
    kind = data.get("kind", "polygon")
    if kind == "unit_square":
        return DomainSpec.unit_square()
    if kind == "rectangle":
        return DomainSpec.rectangle(*data["corners"])
    if kind == "disk":
        return DomainSpec.disk(tuple(data.get("center", (0.0, 0.0))), float(data.get("radius", 1.0)),
                               int(data.get("n", 1024)))
    if kind == "polygon":
        return DomainSpec.from_dict(data)
    raise ConfigError(f"unknown domain kind {kind!r}")


def load_network(ref, base):
    data = _resolve(ref, base)
    if "best_network" in data:  # a result.json from solve
        data = data["best_network"]
    return CurveNetwork.from_dict(data)


def load_coefficients(spec):
    if spec is None:
        return None
    kind = spec.get("kind", "laplacian")
    if kind == "laplacian":
        return None
    if kind == "constant":
        return pde.Coefficients.constant(spec.get("sigma", 1.0), spec.get("rho", 1.0), spec.get("potential", 0.0))
    if kind == "checkerboard":
        return pde.Coefficients.checkerboard(tuple(spec.get("values", (1.0, 2.0))), int(spec.get("cells", 4)))
    if kind == "random":
        return pde.Coefficients.random(int(spec.get("seed", 0)))
    raise ConfigError(f"unknown coefficients kind {kind!r}")


def _unknown(section, allowed, where):
    return [("error", f"{where}.{k}" if where else k, "unknown key") for k in sorted(set(section) - allowed)]


def validate_config(path):
    """Diagnostics ``(level, key, message)`` for the config at ``path``; nothing is executed."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        return [("fatal", "", f"cannot read config: {exc}")]
    if not text.strip():
        return [("fatal", "", "config file is empty")]
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        return [("fatal", "", f"invalid JSON: {exc}")]
    if not isinstance(cfg, dict):
        return [("fatal", "", "config must be a JSON object")]
    diags = _unknown(cfg, TOP_KEYS, "")
    base = path.parent
    command = cfg.get("command")
    if command is None:
        diags.append(("error", "command", "missing field"))
    elif command not in COMMANDS:
        diags.append(("error", "command", f"must be one of {COMMANDS}"))
    domain = None
    if command in ("solve", "evaluate"):
        if "domain" not in cfg:
            diags.append(("error", "domain", "missing field"))
        if "functional" not in cfg:
            diags.append(("error", "functional", "missing field"))
    if "domain" in cfg:
        try:
            domain = load_domain(cfg["domain"], base)
        except (OSError, ValueError, KeyError, MaxshapeError) as exc:
            diags.append(("error", "domain", f"cannot load: {exc}"))
    if "functional" in cfg:
        try:
            F = FN.from_spec(cfg["functional"])
            if command == "solve" and not F.increasing:
                diags.append(("error", "functional", f"{F.name} decreases under inclusion; "
                                                     "use a SpectralComposite for solve"))
        except (ValueError, KeyError, TypeError, MaxshapeError) as exc:
            diags.append(("error", "functional", str(exc)))
    if "solver" in cfg:
        diags += _unknown(cfg["solver"], SOLVER_KEYS, "solver")
    for key, allowed in (("audit", AUDIT_KEYS), ("properties", PROPERTIES_KEYS), ("fixtures", FIXTURES_KEYS)):
        if key in cfg:
            diags += _unknown(cfg[key], allowed, key)
    if "coefficients" in cfg:
        try:
            load_coefficients(cfg["coefficients"])
        except (ConfigError, ValueError, TypeError) as exc:
            diags.append(("error", "coefficients", str(exc)))
    if command in ("evaluate", "audit") and "network" in cfg:
        try:
            load_network(cfg["network"], base)
        except (OSError, ValueError, KeyError, MaxshapeError) as exc:
            diags.append(("error", "network", f"cannot load: {exc}"))
    if command == "audit" and "network" not in cfg:
        diags.append(("error", "network", "missing field"))
    if command == "solve":
        opt = cfg.get("optimizer")
        if opt is None:
            diags.append(("error", "optimizer", "missing field"))
        else:
            diags += _unknown(opt, OPTIMIZER_KEYS, "optimizer")
            diags += _unknown(opt.get("schedule", {}), SCHEDULE_KEYS, "optimizer.schedule")
            unknown_moves = set(opt.get("moves", {})) - set(OPT.MOVES)
            for m in sorted(unknown_moves):
                diags.append(("error", f"optimizer.moves.{m}", "unknown move"))
            if "L" not in opt:
                diags.append(("error", "optimizer.L", "missing field"))
            elif domain is not None:
                h = float(opt.get("grid_h", 1 / 64))
                try:
                    OPT.check_length(domain, float(opt["L"]), h, float(opt.get("capacity_fraction", 0.25)))
                except InfeasibleLength as exc:
                    diags.append(("error", "optimizer.L", f"InfeasibleLength: {exc}"))
    return diags


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_trace_csv(path, trace):
    cols = ["iteration", "generation", "candidate", "move", "value", "accepted", "current", "best",
            "temperature", "length"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for rec in trace:
            w.writerow([repr(rec[c]) if isinstance(rec[c], float) else rec[c] for c in cols])


def _field_for(functional, region, coeff, config):
    """Nodal field to draw: torsion function, first eigenfunction or distance."""
    if region.is_empty:
        return None
    if functional.spectral:
        spec = pde.eigenvalues(region, coeff, 1, config, vectors=True)
        return np.abs(spec.fields[0])
    if isinstance(functional, FN.Inradius):
        return np.where(region.mask, region.grid.wall_distance, 0.0)
    return pde.solve_torsion(region, config).w


def _constraints(net, domain, L, tol):
    return {
        "connected": bool(net.is_connected()),
        "inside_domain": bool(OPT._inside_closed(net, domain)),
        "length": total_length(net),
        "length_ok": bool(abs(total_length(net) - L) <= tol),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_solve(cfg, base, out, render):
    domain = load_domain(cfg["domain"], base)
    opt_section = dict(cfg["optimizer"])
    opt_section["functional"] = cfg["functional"]
    if "solver" in cfg:
        opt_section["solver"] = cfg["solver"]
    if "seed" in cfg:
        opt_section["seed"] = cfg["seed"]
    oc = OPT.config_from_dict(opt_section, domain)
    coeff = load_coefficients(cfg.get("coefficients"))
    if coeff is not None:
        oc = OPT.OptConfig(**{**{f: getattr(oc, f) for f in oc.__dataclass_fields__}, "coeff": coeff})
    res = OPT.minimize(oc)
    cons = _constraints(res.best, domain, oc.L, oc.length_tol)
    result = {"command": "solve", "functional": oc.functional.to_dict(), "L": oc.L, "grid_h": oc.grid_h,
              "seed": oc.seed, "iterations": oc.schedule.iterations, "domain": domain.to_dict(),
              "constraints": cons, **res.to_dict()}
    write_json(out / "result.json", result)
    write_trace_csv(out / "trace.csv", res.trace)
    profiles = AU.ahlfors_profile(res.best, None, AU.default_radii(res.best, oc.grid_h), 1.0, AU.TWO_PI, oc.grid_h)
    AU.write_profiles_csv(out / "density.csv", profiles)
    if render:
        region = G.components(G.rasterize(domain, res.best, oc.grid_h))
        svg.write(out / "network.svg", svg.network_svg(domain, res.best, title=oc.functional.name))
        fld = _field_for(oc.functional, region, coeff, oc.solver)
        svg.write(out / "field.svg", svg.network_svg(domain, res.best, fld, region.grid, "field"))
        svg.write(out / "density.svg", svg.density_chart_svg(profiles))
    ok = cons["connected"] and cons["inside_domain"] and cons["length_ok"] and res.audit["pass"]
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_evaluate(cfg, base, out, render):
    domain = load_domain(cfg["domain"], base)
    F = FN.from_spec(cfg["functional"])
    h = float(cfg.get("grid_h", 1 / 64))
    net = load_network(cfg["network"], base) if "network" in cfg else None
    coeff = load_coefficients(cfg.get("coefficients"))
    solver = pde.SolverConfig(**cfg.get("solver", {}))
    region = G.components(G.rasterize(domain, net, h))
    value = F.evaluate(region, coeff, solver)
    result = {"command": "evaluate", "functional": F.to_dict(), "value": value, "grid_h": h,
              "components": region.n_components, "free_nodes": region.node_count}
    if F.spectral and not region.is_empty:
        result["spectrum"] = pde.eigenvalues(region, coeff, F.k, solver).to_dict()
    if isinstance(F, (FN.TorsionMax, FN.TorsionalRigidity)) and not region.is_empty:
        ts = pde.solve_torsion(region, solver)
        result["torsion"] = {"M": ts.max_value, "max_location": ts.max_location, "T": ts.l1_value,
                             "tau": ts.grad_max}
    write_json(out / "result.json", result)
    fld = _field_for(F, region, coeff, solver)
    if fld is not None:
        G.write_field_csv(out / "field.csv", fld)
    if render:
        svg.write(out / "field.svg", svg.network_svg(domain, net, fld, region.grid, F.name))
    return EXIT_OK


def cmd_audit(cfg, base, out, render):
    net = load_network(cfg["network"], base)
    a = cfg.get("audit", {})
    h = float(a.get("h", 0.0))
    c1, c2 = float(a.get("c1", 1.0)), float(a.get("c2", AU.TWO_PI))
    radii = a.get("radii")
    profiles = AU.ahlfors_profile(net, a.get("points"), radii, c1, c2, h)
    summary = AU.profile_summary(profiles, c1, c2, h)
    AU.write_profiles_csv(out / "density.csv", profiles)
    write_json(out / "audit.json", {"command": "audit", "summary": summary,
                                    "profiles": [p.to_dict() for p in profiles]})
    if render:
        svg.write(out / "density.svg", svg.density_chart_svg(profiles, c1, c2))
    return EXIT_OK if summary["pass"] else EXIT_VIOLATION


def cmd_properties(cfg, base, out, render):
    p = cfg.get("properties", {})
    solver = pde.SolverConfig(**cfg.get("solver", {}))
    records = FN.property_battery(solver, float(p.get("h", 1 / 48)), bool(p.get("include_ps", True)))
    records += AU.golab_battery()
    write_json(out / "properties.json", {"command": "properties", "records": records,
                                         "all_pass": all(r["pass"] for r in records)})
    return EXIT_OK if all(r["pass"] for r in records) else EXIT_VIOLATION


def cmd_fixtures(cfg, base, out, render):
    depth = int(cfg.get("fixtures", {}).get("depth", 10))
    fixtures = AU.builtin_fixtures(depth)
    summary = {}
    for name, net in fixtures.items():
        write_json(out / f"{name}.json", net.to_dict())
        radii = 2.0 ** -np.arange(1, depth + 1)
        radii = radii[radii <= net.diameter() / 2]
        profiles = AU.ahlfors_profile(net, [[0.0, 0.0]], radii)
        AU.write_profiles_csv(out / f"{name}_density.csv", profiles)
        summary[name] = {"length": total_length(net), **AU.profile_summary(profiles)}
        if render:
            lo, hi = net.vertices.min(axis=0), net.vertices.max(axis=0)
            pad = 0.05 * float(max(hi - lo))
            frame = DomainSpec.rectangle(lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)
            svg.write(out / f"{name}.svg", svg.network_svg(frame, net, title=name))
            svg.write(out / f"{name}_density.svg", svg.density_chart_svg(profiles, title=name))
    summary["dyadic_fan_report"] = AU.dyadic_fan_report(depth)
    write_json(out / "fixtures.json", {"command": "fixtures", "depth": depth, "fixtures": summary})
    return EXIT_OK


HANDLERS = {"solve": cmd_solve, "evaluate": cmd_evaluate, "audit": cmd_audit,
            "properties": cmd_properties, "fixtures": cmd_fixtures}


def run(config_path, command=None, seed=None, out=None, quiet=False):
    """Execute the pipeline described by the config; returns the exit code."""
    config_path = Path(config_path)
    diags = validate_config(config_path)
    if command is not None and command in COMMANDS:
        diags = [d for d in diags if d[1] != "command"]
    bad = [d for d in diags if d[0] in ("fatal", "error")]
    if bad:
        for level, key, msg in bad:
            print(f"{level}: {key}: {msg}", file=sys.stderr)
        return EXIT_ERROR
    cfg = json.loads(config_path.read_text())
    command = command or cfg["command"]
    if seed is not None:
        cfg["seed"] = int(seed)
    out = Path(out or cfg.get("output", "out"))
    out.mkdir(parents=True, exist_ok=True)
    try:
        code = HANDLERS[command](cfg, config_path.parent, out, bool(cfg.get("render", True)))
    except (MaxshapeError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not quiet:
        print(f"{command}: wrote {out} (exit {code})")
    return code


def main(argv=None):
    ap = argparse.ArgumentParser(prog="maxshape", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS + ("validate",))
    ap.add_argument("--config", required=True, help="run configuration (JSON)")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    if args.command == "validate":
        diags = validate_config(args.config)
        for level, key, msg in diags:
            print(f"{level}: {key or '<config>'}: {msg}")
        if not args.quiet:
            print(f"{len(diags)} diagnostic(s)")
        return EXIT_OK if not diags else EXIT_ERROR
    return run(args.config, args.command, args.seed, args.out, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
