"""``qdiss`` command-line scenario runner.

    qdiss <evolve|probe|scan|classify|track> --config FILE --out DIR [--seed N]

Exit codes: 0 success, 2 configuration error, 3 numerical or validation
failure (including a classification that disagrees with the golden table).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import entanglement as ent
from .config import ConfigError, load_config, shipped_configs, time_grid
from .density import InvalidStateError, parse_parties, purity
from .entropy import DEFAULT_Q_GRID
from .lindblad import DiagonalModel, diagonalize_gks, evolve, positivity_probe, step_euler
from .linalg import eigvalsh_desc
from .serialization import model_from_json, operator_from_json, state_from_json, vector_from_json
from .states import TABLE_LABELS, WernerParams, canonical_label, werner, werner_threshold

log = logging.getLogger("qdiss")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class NumericalError(RuntimeError):
    pass


def fmt(x) -> str:
    """12 significant digits; booleans and ints pass through."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    return obj


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_round(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _build(cfg: dict, seed: int):
    try:
        model = model_from_json(cfg["model"])
        rng = np.random.default_rng(seed)
        rho0 = state_from_json(cfg["initial_state"], model.dims, rng)
        times = time_grid(cfg["times"])
        if times[0] != 0 or np.any(np.diff(times) <= 0):
            raise ValueError("time grid must start at 0 and increase strictly")
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    return model, rho0, times


def _observables(cfg: dict, dim: int):
    obs = []
    for o in cfg.get("observables", []):
        if "element" in o:
            i, j = o["element"]
            if not (0 <= i < dim and 0 <= j < dim):
                raise ConfigError(f"observable {o['name']!r} element out of range")
            part = o.get("part", "re")
            fn = {"re": np.real, "im": np.imag, "abs": np.abs}[part]
            obs.append((o["name"], lambda r, i=i, j=j, fn=fn: float(fn(r[i, j]))))
        elif "operator" in o:
            try:
                op = operator_from_json(o["operator"], dim)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            obs.append((o["name"], lambda r, op=op: float(np.trace(r @ op).real)))
        else:
            raise ConfigError(f"observable {o['name']!r} needs element or operator")
    return obs


def run_evolve(cfg: dict, out: Path, seed: int = 0) -> dict:
    model, rho0, times = _build(cfg, seed)
    obs = _observables(cfg, model.dim)
    try:
        traj = evolve(model, rho0, times, method=cfg.get("method", "rk4"),
                      h_max=cfg.get("h_max", 1e-3))
    except InvalidStateError as exc:
        raise NumericalError(str(exc)) from None
    rows = []
    for t, rho in traj:
        r = rho.data
        rows.append([t, np.trace(r).real, purity(rho), eigvalsh_desc(r)[-1]]
                    + [f(r) for _, f in obs])
    header = ["t", "trace_re", "purity", "min_eig"] + [name for name, _ in obs]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "trajectory.csv", header, rows)
    summary = {
        "final_purity": rows[-1][2],
        "max_trace_deviation": max(abs(r[1] - 1.0) for r in rows),
        "min_eigenvalue": min(r[3] for r in rows),
        "n_times": len(rows),
        "method": cfg.get("method", "rk4"),
    }
    write_json(out / "summary.json", summary)
    return summary


def run_probe(cfg: dict, out: Path, seed: int = 0) -> dict:
    try:
        model = model_from_json(cfg["model"])
        diag = diagonalize_gks(model) if not isinstance(model, DiagonalModel) else model
        psi0 = vector_from_json(cfg["psi0"], model.dim)
        psi1 = vector_from_json(cfg["psi1"], model.dim)
        value = positivity_probe(diag, psi0, psi1, cfg["dt"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rho0 = np.outer(psi0, psi0.conj())
    euler = step_euler(diag, rho0, cfg["dt"])
    report = {
        "probe": value,
        "completely_positive": diag.completely_positive,
        "rates": diag.rates.tolist(),
        "euler_population": float(np.vdot(psi1, euler @ psi1).real),
        "dt": cfg["dt"],
    }
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "probe.json", report)
    return report


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QDISS_THREADS", "1")))
    except ValueError:
        return 1


def run_scan(cfg: dict, out: Path, seed: int = 0) -> dict:
    levels = cfg.get("levels", 2)
    parties = cfg.get("parties", 2)
    cond = cfg.get("condition_on", list(range(parties - 1)))
    q_grid = tuple(cfg.get("q_grid", DEFAULT_Q_GRID))
    tol = cfg.get("tol", ent.DEFAULT_SCAN_TOL)
    try:
        cond = parse_parties(cond)
        if not cond or cond[-1] >= parties or len(cond) == parties:
            raise ValueError(f"invalid condition_on {cfg.get('condition_on')!r}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        x_star = ent.threshold_scan(levels, parties, cond, q_grid, tol)
    except ValueError as exc:
        raise NumericalError(str(exc)) from None

    xs = np.linspace(0.0, 1.0, cfg.get("x_steps", 20) + 1)

    def row(x):
        v = ent.detect(werner(WernerParams(float(x), levels, parties)), cond, q_grid)
        return [x, v.min_conditional_value, v.witness_q, v.infinity_sign, v.detected_by_q_criterion]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(row, xs))
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "scan.csv",
              ["x", "min_conditional_value", "witness_q", "infinity_sign", "detected"], rows)
    expected = werner_threshold(levels, parties)
    result = {
        "levels": levels,
        "parties": parties,
        "condition_on": cond,
        "threshold": x_star,
        "expected": expected,
        "abs_error": abs(x_star - expected),
        "tol": tol,
        "q_grid": list(q_grid),
    }
    write_json(out / "threshold.json", result)
    return result


def run_classify(cfg: dict, out: Path, seed: int = 0) -> dict:
    try:
        labels = [canonical_label(l) for l in cfg.get("labels", TABLE_LABELS)]
        if any(l[:-1] not in ent.REFERENCE_TABLE for l in labels):
            raise ValueError("only reference-table states (GHZ, GFR, WRr, WRR with +/-) can be classified")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    tau = cfg.get("robust_threshold", ent.ROBUST_THRESHOLD)
    rows = [ent.classify_three_qubit(l, tau) for l in labels]
    matches = [ent.matches_table(r) for r in rows]
    out.mkdir(parents=True, exist_ok=True)
    (out / "table.txt").write_text(ent.format_table(rows) + "\n")
    result = {
        "rows": [dict(r.to_json(), matches_golden=m) for r, m in zip(rows, matches)],
        "golden_match": all(matches),
        "robust_threshold": tau,
    }
    write_json(out / "classification.json", result)
    if not all(matches):
        raise NumericalError("classification disagrees with the golden table")
    return result


def run_track(cfg: dict, out: Path, seed: int = 0) -> dict:
    model, rho0, times = _build(cfg, seed)
    q_grid = tuple(cfg.get("q_grid", DEFAULT_Q_GRID))
    try:
        cond = parse_parties(cfg["condition_on"])
        if not cond or cond[-1] >= rho0.n_parties or len(cond) == rho0.n_parties:
            raise ValueError(f"invalid condition_on {cfg['condition_on']!r}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        tl = ent.track(model, rho0, times, cond, q_grid, method=cfg.get("method", "exact"),
                       h_max=cfg.get("h_max", 1e-3))
    except InvalidStateError as exc:
        raise NumericalError(str(exc)) from None
    rows = [[t, v.min_conditional_value, v.witness_q, v.infinity_sign, v.ppt_min_eigenvalue,
             v.detected_by_q_criterion] for t, v in zip(tl.times, tl.verdicts)]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "timeline.csv",
              ["t", "min_conditional_value", "witness_q", "infinity_sign", "ppt_min_eig", "detected"],
              rows)
    result = {
        "condition_on": cond,
        "initially_detected": bool(tl.verdicts[0].detected_by_q_criterion),
        "transitions": [{"t_before": tr.t_before, "t_after": tr.t_after, "kind": tr.kind}
                        for tr in tl.transitions],
    }
    write_json(out / "transitions.json", result)
    return result


COMMANDS = {
    "evolve": run_evolve,
    "probe": run_probe,
    "scan": run_scan,
    "classify": run_classify,
    "track": run_track,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdiss", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True,
                        help="JSON config file, or the name of a shipped config")
        sp.add_argument("--out", required=True, type=Path, help="output directory")
        sp.add_argument("--seed", type=int, default=0)
    sub.add_parser("list-configs", help="print the names of shipped configs")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "list-configs":
        print("\n".join(shipped_configs()))
        return EXIT_OK
    try:
        cfg, _ = load_config(args.command, args.config)
        result = COMMANDS[args.command](cfg, args.out, args.seed)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    print(json.dumps(_round(result), sort_keys=True) if args.command != "classify"
          else (args.out / "table.txt").read_text().rstrip())
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
