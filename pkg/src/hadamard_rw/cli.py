"""Command-line front end: ``simulate``, ``preset`` and ``verify``.

Exit codes: 0 success, 1 configuration error, 2 invariant failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, engine, verify
from .errors import ConfigError, GuardViolation
from .kernels import BACKEND
from .presets import PRESETS, parse_init_spec
from .scalar import ScalarMode, format_exact
from .state import LatticeSpec, project

log = logging.getLogger("hadamard_rw")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3

QUANTUM_COLUMNS = ("prob_ket0", "prob_ket1", "prob_total")
RW_COLUMNS = ("row_0", "row_1", "row_m1", "row_m0", "total")


def _quantum_columns(dist: analysis.Distribution) -> dict[str, list]:
    return {
        "prob_ket0": list(dist.rows["ket0"]),
        "prob_ket1": list(dist.rows["ket1"]),
        "prob_total": list(dist.site_totals()),
    }


def _rw_columns(dist: analysis.Distribution) -> dict[str, list]:
    cols = {k: list(dist.rows[k]) for k in ("row_0", "row_1", "row_m1", "row_m0")}
    cols["total"] = list(dist.site_totals())
    return cols


def write_table(path: Path, positions, columns: dict[str, list], fmt: str, *, weight=None, meta=None) -> Path:
    """Write one view. CSV holds weighted floats; JSON holds exact strings."""
    path = path.with_suffix("." + fmt)
    w = 1.0 if weight is None else float(weight)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["position", *columns])
            for i, x in enumerate(positions):
                out.writerow([int(x), *(repr(float(columns[c][i]) * w) for c in columns)])
        return path
    doc = dict(meta or {})
    doc["positions"] = [int(x) for x in positions]
    doc["columns"] = {c: [format_exact(v) for v in vals] for c, vals in columns.items()}
    if weight is not None and weight.sq != 1:
        doc["weight_sq"] = str(weight.sq)
    if "prob_total" in columns:
        tot = sum(columns["prob_total"][1:], columns["prob_total"][0])
        doc["grand_total"] = format_exact(tot)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def _parse_snapshots(text: str | None, steps: int) -> tuple[int, ...] | None:
    if not text:
        return None
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"bad snapshot list {text!r}") from None


def cmd_simulate(args) -> int:
    lat = LatticeSpec(args.sites, args.boundary, args.origin)
    mode = ScalarMode.parse(args.scalar)
    cfg = engine.RunConfig(lat, args.steps, args.engine, mode, _parse_snapshots(args.snapshots, args.steps))
    psi0 = parse_init_spec(args.init, lat, mode)
    traj = engine.run(cfg, psi0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for n in cfg.snapshots:
        meta = {"step": n, "sites": lat.sites, "boundary": lat.boundary.value, "mode": mode.value}
        if n in traj.quantum:
            dist = analysis.quantum_distribution(traj.quantum[n])
            written.append(write_table(out / f"quantum_step{n}", dist.positions, _quantum_columns(dist),
                                       args.format, meta={**meta, "view": "quantum"}))
        if n in traj.rw:
            P = traj.rw[n]
            qd = analysis.quantum_distribution(P, n)
            written.append(write_table(out / f"rw_quantum_step{n}", qd.positions, _quantum_columns(qd),
                                       args.format, meta={**meta, "view": "rw_quantum"}))
            md = analysis.rw_marginal(P)
            written.append(write_table(out / f"rw_rows_step{n}", md.positions, _rw_columns(md),
                                       args.format, weight=md.weight, meta={**meta, "view": "rw_rows"}))
    for p in written:
        print(p)
    if traj.quantum and traj.rw:
        n = cfg.steps
        diff, _ = analysis.compare(analysis.quantum_distribution(traj.quantum[n]),
                                   analysis.quantum_distribution(traj.rw[n], n))
        print(f"step {n}: max abs difference quantum vs RW-mapped = {float(diff):.3e}")
    return EXIT_OK


def cmd_preset(args) -> int:
    preset = PRESETS[args.name]
    mode = ScalarMode.parse(args.scalar)
    cfg = preset.config(mode)
    traj = engine.run(cfg, preset.initial(mode))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"preset": preset.name, "mode": mode.value}
    if preset.name == "fig3":
        n = preset.steps
        P = traj.rw[n]
        rows = analysis.rw_marginal(P)
        q = analysis.quantum_distribution(P, n)
        cols = {
            "P_ket0": rows.rows["row_0"],
            "P_mket0": rows.rows["row_m0"],
            "prob_ket0": q.rows["ket0"],
            "P_ket1": rows.rows["row_1"],
            "P_mket1": rows.rows["row_m1"],
            "prob_ket1": q.rows["ket1"],
        }
        print(write_table(out / "fig3_panels", q.positions, cols, args.format, meta={**meta, "step": n}))
        total = q.grand_total()
        peak = int(q.positions[int(np.argmax(q.float_site_totals()))])
        print(f"grand total probability at n={n}: {format_exact(total) if q.exact else total}")
        print(f"peak position: {peak}")
        return EXIT_OK
    masses = []
    for n in preset.snapshots:
        q = analysis.quantum_distribution(traj.rw[n], n)
        print(write_table(out / f"fig6_quantum_step{n}", q.positions, _quantum_columns(q), args.format,
                          meta={**meta, "step": n}))
        m0, m1 = analysis.coin_mass(q)
        masses.append((n, m0, m1))
        print(f"step {n}: coin |0> mass {float(m0):.6f}, coin |1> mass {float(m1):.6f}")
    path = out / f"fig6_coin_mass.{args.format}"
    if args.format == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "mass_ket0", "mass_ket1"])
            for n, m0, m1 in masses:
                w.writerow([n, repr(float(m0)), repr(float(m1))])
    else:
        path.write_text(json.dumps(
            {**meta, "coin_mass": [{"step": n, "mass_ket0": format_exact(m0), "mass_ket1": format_exact(m1)}
                                   for n, m0, m1 in masses]}, indent=1) + "\n")
    print(path)
    return EXIT_OK


def cmd_verify(args) -> int:
    print(f"kernel backend: {BACKEND}")
    results = verify.run_battery(deep=args.deep, negative=args.self_test_negative)
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hadamard-rw", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one configuration and write snapshot files")
    s.add_argument("--sites", type=int, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--origin", type=int, default=None, help="1-based site shown as position 0 (default: centre)")
    s.add_argument("--boundary", choices=["open", "cyclic", "r1", "r2"], default="open")
    s.add_argument("--engine", choices=["quantum", "rw", "both"], default="both")
    s.add_argument("--scalar", choices=["exact", "float"], default="exact")
    s.add_argument("--init", default="origin:ket0")
    s.add_argument("--snapshots", default=None, help="comma-separated steps (default: 0 and the last)")
    s.add_argument("--out", default="out")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("preset", help="run the fig3 or fig6 reference experiment")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--scalar", choices=["exact", "float"], default="exact")
    pr.add_argument("--out", default="out")
    pr.add_argument("--format", choices=["csv", "json"], default="csv")
    pr.set_defaults(func=cmd_preset)

    v = sub.add_parser("verify", help="run the invariant battery")
    v.add_argument("--deep", action="store_true", help="extend to n = 100 exact on 201 sites")
    v.add_argument("--self-test-negative", action="store_true",
                   help="corrupt one sign of A; the factorization check must fail")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GuardViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
