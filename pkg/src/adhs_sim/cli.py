"""Command-line entry point: ``adhs-sim {run,reproduce-fig3,sweep,dump-hierarchy}``."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from adhs_sim.config import ConfigError, load_config
from adhs_sim.engine import Simulation
from adhs_sim.hcc import ConnectivityError
from adhs_sim.metrics import average_symbolic, ep_savings_ratio, summary, symbolic_ch_total
from adhs_sim.reporting import ensure_dir, fmt, hierarchy_dict, write_json, write_trace
from adhs_sim.scenarios import build_scenario

SWEEP_KEYS = {
    "T": "adhs.t_threshold",
    "L": "adhs.l_limit",
    "k": "hierarchy.k",
    "alpha": "energy.alpha",
    "n": "deployment.n",
}
SWEEP_COLUMNS = [
    "value",
    "e_tot",
    "e_ch",
    "e_process_per_round",
    "lifetime_rounds",
    "mean_abs_error",
    "exact_fraction",
]

FIG3_BEFORE = (Fraction(16), Fraction(21), Fraction(5))
FIG3_AFTER = (Fraction(16), Fraction(29, 2), Fraction(5))
FIG3_SAVINGS = 0.3095
FIG3_SAVINGS_TOL = 0.005


def _load(args, extra: Sequence[str] = ()):
    return load_config(args.config, list(args.set or []) + list(extra), preset=args.preset, seed=args.seed)


def simulate(cfg):
    net, fld = build_scenario(cfg)
    report = Simulation(net, fld, cfg.adhs, cfg.energy, cfg.battery_j).run(cfg.rounds)
    return net, report


def cmd_run(args) -> int:
    cfg = _load(args)
    net, report = simulate(cfg)
    ensure_dir(args.out)
    write_trace(os.path.join(args.out, "trace.csv"), report, net)
    write_json(os.path.join(args.out, "summary.json"), summary(report, net, cfg.energy))
    write_json(os.path.join(args.out, "manifest.json"), cfg.to_dict())
    if args.hierarchy:
        write_json(os.path.join(args.out, "hierarchy.json"), hierarchy_dict(net))
    s = summary(report, net, cfg.energy)
    print(f"rounds run: {s['rounds_run']}  total energy: {fmt(s['energy']['total'])} J")
    print(f"lifetime_rounds: {s['lifetime_rounds']}  mean_abs_error: {fmt(s['fidelity']['mean_abs_error'])}")
    print(f"wrote {args.out}/trace.csv, summary.json, manifest.json")
    return 0


def cmd_dump_hierarchy(args) -> int:
    cfg = _load(args)
    net, _ = build_scenario(cfg)
    ensure_dir(args.out)
    path = os.path.join(args.out, "hierarchy.json")
    write_json(path, hierarchy_dict(net))
    print(f"{len(net.hierarchy.clusters)} clusters, {len(net.chs)} CHs, {len(net.nchs)} NCHs -> {path}")
    return 0


def reproduce_fig3(out=sys.stdout, overrides: Sequence[str] = ()) -> int:
    """Rebuild the two-level example and compare with the expected totals.

    "before" is round 0 (every CH at period 1); "after" averages the two rounds
    that follow the first refinement round.
    """
    cfg = load_config(preset="fig3", overrides=overrides)
    net, report = simulate(cfg)
    p = cfg.energy
    before = symbolic_ch_total(report.rounds[0], net, p)
    refined = next(
        (rr.round for rr in report.rounds if any(rr.per_node[ch].action == "TransmitLast" for ch in net.chs)),
        None,
    )
    after = None
    if refined is not None and refined + 2 < len(report.rounds):
        after = average_symbolic([symbolic_ch_total(report.rounds[refined + i], net, p) for i in (1, 2)])

    ok = True
    print(f"{'':8}{'measured':32}expected", file=out)
    for label, got, want in (("before", before, FIG3_BEFORE), ("after", after, FIG3_AFTER)):
        got_s = "n/a" if got is None else str(got)
        want_s = f"{want[0]} E_r + {float(want[1]):g} E_p + {want[2]} αE_t"
        match = got is not None and got.as_tuple() == want
        ok &= match
        print(f"{label:8}{got_s:32}{want_s}  {'OK' if match else 'MISMATCH'}", file=out)
    if before is not None and after is not None:
        sav = float(ep_savings_ratio(before, after))
        match = abs(sav - FIG3_SAVINGS) <= FIG3_SAVINGS_TOL
        ok &= match
        print(f"{'saving':8}{sav * 100:.2f}%{'':26}~30% ({FIG3_SAVINGS * 100:.2f}%)  {'OK' if match else 'MISMATCH'}", file=out)
        d = net.d_up[net.chs[0]]
        numeric = before.evaluate(p, d)
        direct = sum(report.rounds[0].per_node[ch].energy.total for ch in net.chs)
        print(f"round-0 CH energy: {numeric:.6e} J (symbolic) vs {direct:.6e} J (simulated)", file=out)
    else:
        ok = False
    return 0 if ok else 1


def cmd_reproduce(args) -> int:
    return reproduce_fig3(overrides=list(args.set or []))


def sweep(param: str, values: Sequence[str], base_args) -> List[dict]:
    if param not in SWEEP_KEYS:
        raise ConfigError(f"parameter {param!r} is not sweepable (choose from {', '.join(SWEEP_KEYS)})")
    key = SWEEP_KEYS[param]
    rows = []
    for val in values:
        cfg = load_config(
            base_args.config,
            list(base_args.set or []) + [f"{key}={val}"],
            preset=base_args.preset,
            seed=base_args.seed,
        )
        if param == "n" and cfg.deployment.kind != "uniform":
            raise ConfigError("sweeping 'n' needs a uniform deployment")
        net, report = simulate(cfg)
        e_proc = sum(report.totals[ch].process for ch in net.chs) / len(report.rounds)
        rows.append(
            {
                "value": val,
                "e_tot": report.network_total.total,
                "e_ch": sum(report.totals[ch].total for ch in net.chs),
                "e_process_per_round": e_proc,
                "lifetime_rounds": report.lifetime_rounds,
                "mean_abs_error": report.fidelity["mean_abs_error"],
                "exact_fraction": report.fidelity["exact_fraction"],
            }
        )
    return rows


def cmd_sweep(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    rows = sweep(args.param, values, args)
    ensure_dir(args.out)
    path = os.path.join(args.out, "sweep.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([fmt(r[c]) for c in SWEEP_COLUMNS])
    with open(path) as fh:
        sys.stdout.write(fh.read())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adhs-sim", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON config (a manifest.json works too)")
    common.add_argument("--preset", help="fig3 | kruger | uniform_random")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default="out", help="output directory")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", parents=[common], help="run one simulation")
    p.add_argument("--hierarchy", action="store_true", help="also write hierarchy.json")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce-fig3", parents=[common], help="check the fig3 scenario totals")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sweep", parents=[common], help="run one simulation per parameter value")
    p.add_argument("--param", required=True, choices=sorted(SWEEP_KEYS))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dump-hierarchy", parents=[common], help="write hierarchy.json only")
    p.set_defaults(func=cmd_dump_hierarchy)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConnectivityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
