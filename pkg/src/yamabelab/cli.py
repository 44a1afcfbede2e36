"""Command-line front end.

Exit codes: 0 success, 1 domain/input errors, 2 verification failure (or a
greedy sequence that ends Stalled/MaxIter). Usage errors exit nonzero via
argparse.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .domain import Homogeneous, conformal_exponents, mass_profile
from .errors import YamabeLabError
from .fieldio import load_field, save_field
from .functional import yamabe_quotient, yamabe_sphere_constant
from .rearrange import GreedyStatus, Polarizer, greedy_polarization_sequence, polarize, steiner_symmetrize
from .solver import RadialProblem, SolverOptions, continuation, minimize_subcritical
from .verify import run_battery

log = logging.getLogger("yamabelab")


def _emit(rows, fmt, out=None):
    """Print a list of flat dicts as CSV or JSON."""
    out = out or sys.stdout
    rows = list(rows)
    if fmt == "json":
        out.write(json.dumps(rows if len(rows) != 1 else rows[0], indent=2) + "\n")
        return
    if not rows:
        return
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("%.17g" % v if isinstance(v, float) else v) for k, v in r.items()})
    out.write(buf.getvalue())


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _load_config(path):
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise YamabeLabError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise YamabeLabError(f"config is not valid JSON: {exc}") from exc
    try:
        M = Homogeneous(float(cfg["manifold"]["volume"]), float(cfg["manifold"]["scalar_curvature"]))
        ce = conformal_exponents(cfg["dims"]["m"], cfg["dims"]["n"])
        grid = cfg.get("grid", {})
        prob = RadialProblem(M, ce, float(grid.get("r_max", 12.0)), int(grid.get("cells", 2400)))
    except KeyError as exc:
        raise YamabeLabError(f"config is missing key {exc}") from exc
    return prob, cfg.get("solver", {})


def _solver_options(solver_cfg, args):
    opts = SolverOptions()
    if "tol" in solver_cfg:
        opts.tol = float(solver_cfg["tol"])
    if "max_iter" in solver_cfg:
        opts.max_iter = int(solver_cfg["max_iter"])
    if args.tol is not None:
        opts.tol = args.tol
    if args.max_iter is not None:
        opts.max_iter = args.max_iter
    return opts


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_constants(args):
    ce = conformal_exponents(args.m, args.n)
    _emit([{"m": ce.m, "n": ce.n, "d": ce.d, "a": ce.a, "p": ce.p,
            "Y_d": yamabe_sphere_constant(ce.d)}], args.format)
    return 0


def cmd_symmetrize(args):
    u = load_field(args.inp)
    save_field(steiner_symmetrize(u), args.out, source="symmetrize")
    return 0


def cmd_polarize(args):
    u = load_field(args.inp)
    H = Polarizer(args.center, u.euclid.spacing)
    save_field(polarize(u, H), args.out, source=f"polarize center={H.center!r}")
    return 0


def cmd_polarize_seq(args):
    u = load_field(args.inp)
    final, trace = greedy_polarization_sequence(u, args.kappa, args.max_iter)
    if args.out:
        save_field(final, args.out, source="polarize-seq")
    rows = [{"step": 0, "center": "", "alpha": "", "improvement": "", "distance": trace.initial_distance}]
    for i, st in enumerate(trace.steps, 1):
        rows.append({"step": i, "center": st.polarizer.center, "alpha": st.alpha,
                     "improvement": st.improvement, "distance": st.distance})
    if args.trace:
        with open(args.trace, "w") as fh:
            _emit(rows, "csv", fh)
    _emit([{"status": trace.status.value, "steps": len(trace.steps),
            "initial_distance": trace.initial_distance, "final_distance": trace.distances[-1]}],
          args.format)
    ok = trace.status in (GreedyStatus.REACHED_TARGET, GreedyStatus.REACHED_MIRROR)
    return 0 if ok else 2


def cmd_quotient(args):
    u = load_field(args.inp)
    ce = conformal_exponents(args.m, args.n)
    q = yamabe_quotient(u, args.s, ce)
    _emit([{"s": q.s, "numerator": q.numerator, "denominator": q.denominator, "value": q.value}],
          args.format)
    return 0


def cmd_minimize(args):
    prob, scfg = _load_config(args.config)
    s = args.s if args.s is not None else scfg.get("s")
    if s is None:
        raise YamabeLabError("no exponent given (--s or solver.s in the config)")
    rep = minimize_subcritical(prob, float(s), _solver_options(scfg, args))
    if args.out:
        save_field(rep.to_field(), args.out, source=f"minimize s={rep.s!r}")
    _emit([{"s": rep.s, "lambda_s": rep.lambda_s, "iterations": rep.iterations,
            "final_residual": rep.final_residual, "norm_check": rep.norm_check,
            "boundary_mass": rep.boundary_mass,
            "subcritical": rep.lambda_s < yamabe_sphere_constant(prob.ce.d)}], args.format)
    return 0


def cmd_lambda_curve(args):
    prob, scfg = _load_config(args.config)
    s_list = args.s_list if args.s_list is not None else scfg.get("s_list")
    if not s_list:
        raise YamabeLabError("no exponents given (--s-list or solver.s_list in the config)")
    rep = continuation(prob, [float(s) for s in s_list], _solver_options(scfg, args))
    rows = [{"s": e.s, "lambda_s": e.lambda_s, "residual": e.residual, "iterations": e.iterations,
             "converged": e.converged, "subcritical": e.subcritical, "Y_d": rep.sphere_constant,
             "warm_start": "" if e.warm_start is None else e.warm_start} for e in rep.entries]
    _emit(rows, args.format)
    return 0


def cmd_mass_profile(args):
    u = load_field(args.inp)
    radii = args.radii
    fr = mass_profile(u, args.s, radii)
    _emit([{"t": t, "fraction": f} for t, f in zip(radii, fr)], args.format)
    return 0


def cmd_verify(args):
    rep = run_battery(args.seed, args.trials)
    rows = [dict(r) for r in rep.rows()]
    _emit(rows, args.format)
    if args.format != "json":
        print(f"# overall: {'pass' if rep.passed else 'FAIL'}", file=sys.stderr)
    return 0 if rep.passed else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="yamabelab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.set_defaults(func=func)
        return sp

    sp = add("constants", cmd_constants, "conformal constants a, p and the sphere constant Y_d")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("symmetrize", cmd_symmetrize, "Steiner symmetrization of a field file")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)

    sp = add("polarize", cmd_polarize, "polarize a field file by the half-line containing 0")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--center", type=float, required=True)
    sp.add_argument("--out", required=True)

    sp = add("polarize-seq", cmd_polarize_seq, "greedy polarization sequence toward u*")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--max-iter", type=int, default=None)
    sp.add_argument("--trace")
    sp.add_argument("--out")

    sp = add("quotient", cmd_quotient, "subcritical Yamabe quotient of a field file")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    for name, func, help in (("minimize", cmd_minimize, "minimize Q_s on the radial model"),
                             ("lambda-curve", cmd_lambda_curve, "continuation of lambda_s in s")):
        sp = add(name, func, help)
        sp.add_argument("--config", required=True)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iter", type=int)
        if name == "minimize":
            sp.add_argument("--s", type=float)
            sp.add_argument("--out")
        else:
            sp.add_argument("--s-list", type=_floats)

    sp = add("mass-profile", cmd_mass_profile, "fraction of the s-mass inside M x B_t")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--s", type=float, default=2.0)
    sp.add_argument("--radii", type=_floats, required=True)

    sp = add("verify", cmd_verify, "run the seeded invariant battery")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--trials", type=int, default=500)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except YamabeLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
