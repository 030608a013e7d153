"""Command-line entry point: ``galois-sat <command> [flags]``.

Commands: ``simulate``, ``classify``, ``monodromy``, ``section`` and
``solution-check``.  Values come from flags, then a flat ``key = value``
config file (``--config``), then per-command defaults.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .dynamics import SatelliteParams, integrate, random_leaf_state
from .errors import GaloisSatError
from .jsonio import dumps17

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

DEFAULTS = {
    "simulate": {"C": 1.7, "xi": 0.3, "t_final": 100.0, "tol": 1e-12, "seed": 0,
                 "n_out": 1001, "out": "trajectory.csv", "from_particular": False, "k": 0.5},
    "classify": {"C": 1.5, "xi": 0.2, "k": 0.5, "tol": 1e-9, "json": False, "no_monodromy": False,
                 "out": None},
    "monodromy": {"C": 1.5, "xi": 0.2, "k": 0.5, "tol": 1e-12, "out": None},
    "section": {"C": 1.7, "xi": 0.1, "h": 0.5, "tol": 1e-12, "max_crossings": 100,
                "t_max": 5000.0, "seeds": "0:1,0.3:1,0.6:1,0.9:1,0:0.5", "out": "section.csv"},
    "solution-check": {"C": 1.5, "xi": 0.2, "k": 0.5, "tol": 1e-12, "n_out": 401,
                       "out": None},
}

TYPES = {"C": float, "xi": float, "k": float, "tol": float, "t_final": float, "h": float,
         "t_max": float, "seed": int, "n_out": int, "max_crossings": int, "out": str,
         "seeds": str, "from_particular": bool, "json": bool, "no_monodromy": bool}


class ConfigError(ValueError):
    pass


def _parse_bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; dashes in keys
    are read as underscores."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in TYPES:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        typ = TYPES[key]
        try:
            out[key] = _parse_bool(val) if typ is bool else typ(val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: bad value for {key}: {val!r}") from exc
    return out


def resolve(command: str, flags: dict, config_path=None) -> dict:
    """Merge flags > config file > defaults for ``command``."""
    cfg = dict(DEFAULTS[command])
    if config_path:
        file_vals = read_config(config_path)
        cfg.update({k: v for k, v in file_vals.items() if k in cfg})
    cfg.update({k: v for k, v in flags.items() if v is not None and k in cfg})
    return cfg


def _check_C(C: float) -> None:
    if C == 1.0:
        raise ConfigError("C = 1 gives omega = sqrt(3|C - 1|) = 0: the particular-solution "
                          "family degenerates (omega = 0); choose C != 1")
    if not (0.0 < C < 2.0):
        raise ConfigError(f"C={C} violates the triangle inequalities for A = B = 1 (need 0 < C < 2)")


def _check_k(k: float) -> None:
    if not (0.0 < k < 1.0):
        raise ConfigError(f"k={k} outside (0, 1)")


def _emit(text: str, out=None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_simulate(cfg: dict) -> int:
    from .dynamics import first_integrals
    from .solutions import ParticularSolution

    _check_C(cfg["C"])
    params = SatelliteParams(C=cfg["C"], xi=cfg["xi"])
    if cfg["from_particular"]:
        _check_k(cfg["k"])
        x0 = ParticularSolution.from_params(cfg["k"], cfg["C"]).state(0.0)
    else:
        x0 = random_leaf_state(np.random.default_rng(cfg["seed"]))
    t_eval = np.linspace(0.0, cfg["t_final"], cfg["n_out"])
    traj = integrate(x0, params, (0.0, cfg["t_final"]), tol=cfg["tol"], t_eval=t_eval)
    traj.to_csv(cfg["out"])
    I0 = first_integrals(traj.x[0], params)
    drift = {}
    for name in ("H", "H2", "H3", "H4", "H5"):
        v0 = getattr(I0, name)
        vals = np.array([getattr(first_integrals(row, params), name) for row in traj.x])
        drift[name] = float(np.max(np.abs(vals - v0)) / max(abs(v0), 1.0))
    summary = {"schema": 1, "command": "simulate", "params": {"C": cfg["C"], "xi": cfg["xi"]},
               "t_final": cfg["t_final"], "tol": cfg["tol"], "csv": str(cfg["out"]),
               "x0": x0.tolist(), "relative_drift": drift}
    _emit(dumps17(summary))
    return EXIT_OK


def cmd_classify(cfg: dict) -> int:
    from .kovacic import classify
    from .monodromy import group_relations
    from .nve import satellite_problem

    _check_C(cfg["C"])
    _check_k(cfg["k"])
    fp = satellite_problem(cfg["C"], cfg["xi"], cfg["k"])
    rep = classify(fp, tol=cfg["tol"])
    d = rep.to_dict()
    if not cfg["no_monodromy"]:
        g = group_relations(fp)
        d["monodromy"] = g.to_dict()
    if cfg["json"]:
        _emit(dumps17(d))
    else:
        print(rep.verdict)
    if cfg.get("out"):
        _emit(dumps17(d), cfg["out"])
    return EXIT_OK


def cmd_monodromy(cfg: dict) -> int:
    from .monodromy import group_relations
    from .nve import satellite_problem

    _check_C(cfg["C"])
    _check_k(cfg["k"])
    rep = group_relations(satellite_problem(cfg["C"], cfg["xi"], cfg["k"]), tol=cfg["tol"])
    _emit(dumps17(rep.to_dict()), cfg.get("out"))
    return EXIT_OK


def _parse_seeds(text: str):
    seeds = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            q, p = item.split(":")
            seeds.append((float(q), float(p)))
        except ValueError as exc:
            raise ConfigError(f"seed {item!r} is not 'q1:p1'") from exc
    if not seeds:
        raise ConfigError("no seeds given")
    return tuple(seeds)


def cmd_section(cfg: dict) -> int:
    from .poincare import SectionSpec, run_section

    _check_C(cfg["C"])
    spec = SectionSpec(C=cfg["C"], xi=cfg["xi"], h=cfg["h"], seeds=_parse_seeds(cfg["seeds"]),
                       max_crossings=cfg["max_crossings"], t_max=cfg["t_max"])
    res = run_section(spec, tol=cfg["tol"])
    res.to_csv(cfg["out"])
    summary = {"schema": 1, "command": "section", "csv": str(cfg["out"]),
               "seeds": [{"seed_id": s.seed_id, "status": s.status, "n_points": len(s.points),
                          "section_residual": s.section_residual,
                          "energy_residual": s.energy_residual} for s in res.seeds]}
    _emit(dumps17(summary))
    return EXIT_OK


def cmd_solution_check(cfg: dict) -> int:
    from .dynamics import hamiltonian
    from .solutions import ParticularSolution

    _check_C(cfg["C"])
    _check_k(cfg["k"])
    sol = ParticularSolution.from_params(cfg["k"], cfg["C"])
    params = SatelliteParams(C=cfg["C"], xi=cfg["xi"])
    T = sol.periods()[0]
    t = np.linspace(0.0, T, cfg["n_out"])
    traj = integrate(sol.state(0.0), params, (0.0, T), tol=cfg["tol"], t_eval=t)
    exact = np.array([sol.state(ti) for ti in t])
    err = float(np.max(np.abs(traj.x - exact)))
    H = float(hamiltonian(sol.state(0.0), params))
    H_expected = sol.energy_level()
    rep = {"schema": 1, "command": "solution-check",
           "params": {"C": cfg["C"], "xi": cfg["xi"], "k": cfg["k"]},
           "branch": sol.branch.value, "omega": sol.omega, "period": T,
           "sup_error": err, "H": H, "H_expected": H_expected,
           "H_error": abs(H - H_expected), "ok": bool(err < 1e-7 and abs(H - H_expected) < 1e-12)}
    _emit(dumps17(rep), cfg.get("out"))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "classify": cmd_classify, "monodromy": cmd_monodromy,
            "section": cmd_section, "solution-check": cmd_solution_check}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="galois-sat",
                                 description="Integrability analysis of a satellite with "
                                             "gravity-gradient and magnetic torques.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--C", type=float)
        p.add_argument("--xi", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        if name != "section":
            p.add_argument("--k", type=float)
        if name == "simulate":
            p.add_argument("--t-final", dest="t_final", type=float)
            p.add_argument("--seed", type=int)
            p.add_argument("--n-out", dest="n_out", type=int)
            p.add_argument("--from-particular", dest="from_particular",
                           action="store_true", default=None)
        if name == "solution-check":
            p.add_argument("--n-out", dest="n_out", type=int)
        if name == "classify":
            p.add_argument("--json", action="store_true", default=None)
            p.add_argument("--no-monodromy", dest="no_monodromy", action="store_true",
                           default=None)
        if name == "section":
            p.add_argument("--h", type=float)
            p.add_argument("--seeds", help="comma-separated q1:p1 pairs")
            p.add_argument("--max-crossings", dest="max_crossings", type=int)
            p.add_argument("--t-max", dest="t_max", type=float)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    try:
        cfg = resolve(ns.command, flags, ns.config)
        if "tol" in cfg and not (1e-14 <= cfg["tol"] <= 1e-4):
            raise ConfigError(f"tol={cfg['tol']} outside [1e-14, 1e-4]")
        return COMMANDS[ns.command](cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GaloisSatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc, RuntimeError) else EXIT_INVALID
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
