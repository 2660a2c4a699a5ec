"""Command-line entry point: ``ngteleport {eval,sweep,figure,selfcheck}``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import ConvergenceError, InvalidSpecError, NGTeleportError
from .fock import (
    DEFAULT_TAIL_TOL,
    Family,
    StateSpec,
    TwoModeState,
    build_resource,
    fock_state,
    two_mode_fock,
)
from .gaussian import covariance_of, gaussian_fidelity, least_eigenvalue, tmsv_family_lambda_min
from .measures import (
    MEASURES,
    entanglement_entropy,
    epr_analytic,
    epr_uncertainty,
    sva_argmax,
    wehrl_ng,
)
from .sweep import (
    FIGURES,
    SweepConfig,
    evaluate,
    gnuplot_script,
    parse_config_file,
    parse_m_values,
    reproduce_figure,
    resolve_figure,
    run_sweep,
    split_list,
)
from .teleport import fidelity_coherent, fidelity_sum_oracle

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NONCONVERGED = 2

_FIGURE_YLABELS = {
    "F": "F", "E": "E_BS (bits)", "delta": "delta (nats)",
    "eta_sva": "eta", "epr": "Delta_EPR", "f_sq": "f_sq",
}


def _measures(value: str | None) -> tuple[str, ...]:
    if value is None or value.strip().lower() == "all":
        return MEASURES
    return tuple(split_list(value))


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, help="PAS, PSS, SNS, SqueezeVac, TMSV, TMPA, TMPS or TMSN")
    p.add_argument("--r", type=float, default=0.0, help="squeeze parameter")
    p.add_argument("--m", type=int, default=0, help="photon number")
    p.add_argument("--cutoff", type=int, default=None, help="Fock cutoff (default: automatic)")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngteleport",
        description="Teleportation fidelity and resource diagnostics of non-Gaussian entangled states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one state, print JSON")
    _add_state_args(p_eval)
    p_eval.add_argument("--measures", default=None, help="comma list or 'all'")
    p_eval.add_argument("--check", action="store_true", help="run the quadrature doubling check")

    p_sweep = sub.add_parser("sweep", help="sweep a (family, m, r) grid into a CSV")
    p_sweep.add_argument("--config", default=None, help="key=value file; flags override it")
    p_sweep.add_argument("--family", default=None, help="comma list of families")
    p_sweep.add_argument("--m", default=None, help="comma list or range such as 0..4")
    p_sweep.add_argument("--r-start", type=float, default=None)
    p_sweep.add_argument("--r-stop", type=float, default=None)
    p_sweep.add_argument("--r-step", type=float, default=None)
    p_sweep.add_argument("--cutoff", type=int, default=None)
    p_sweep.add_argument("--tail-tol", type=float, default=None)
    p_sweep.add_argument("--measures", default=None)
    p_sweep.add_argument("--out", default=None, help="output CSV path")
    p_sweep.add_argument("--workers", type=int, default=None)

    p_fig = sub.add_parser("figure", help="write the CSV bundle of one figure")
    p_fig.add_argument("id", help=", ".join(sorted(FIGURES)))
    p_fig.add_argument("--out-dir", default=".")
    p_fig.add_argument("--r-step", type=float, default=None)
    p_fig.add_argument("--r-stop", type=float, default=None)
    p_fig.add_argument("--workers", type=int, default=1)
    p_fig.add_argument("--gnuplot", action="store_true", help="also write a .gp script per CSV")

    sub.add_parser("selfcheck", help="run the built-in oracle checks")
    return parser


# --------------------------------------------------------------------------
# subcommands

def _cmd_eval(args) -> int:
    spec = StateSpec(args.family, args.r, args.m, args.cutoff)
    report, cutoff = evaluate(spec, _measures(args.measures), args.tail_tol, check=args.check)
    payload = {"family": spec.family.value, "m": spec.m, "r": spec.r, "cutoff": cutoff}
    payload.update({k: v for k, v in report.as_dict().items() if v is not None})
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    conf = parse_config_file(args.config) if args.config else {}

    def pick(flag, key, convert=str, default=None):
        if flag is not None:
            return flag
        if key in conf:
            try:
                return convert(conf[key])
            except ValueError:
                raise InvalidSpecError(f"invalid value for {key}: {conf[key]!r}") from None
        return default

    families = pick(args.family, "family", default=None) or conf.get("families")
    if not families:
        raise InvalidSpecError("no family given (use --family or family= in --config)")
    m_text = pick(args.m, "m", default=None) or conf.get("m_values", "0")
    out = pick(args.out, "out", default=None) or conf.get("output_path")
    if out is None:
        raise InvalidSpecError("no output path given (use --out or out= in --config)")
    measures = pick(args.measures, "measures", default=None)
    return SweepConfig(
        families=tuple(split_list(families)),
        m_values=tuple(parse_m_values(m_text)),
        r_start=pick(args.r_start, "r_start", float, 0.0),
        r_stop=pick(args.r_stop, "r_stop", float, 1.2),
        r_step=pick(args.r_step, "r_step", float, 0.05),
        cutoff=pick(args.cutoff, "cutoff", int, None),
        measures=_measures(measures),
        output_path=out,
        tail_tol=pick(args.tail_tol, "tail_tol", float, DEFAULT_TAIL_TOL),
        workers=pick(args.workers, "workers", int, 1),
    )


def _cmd_sweep(args) -> int:
    config = _sweep_config(args)
    rows = run_sweep(config)
    failed = [row for row in rows if row.status != "ok"]
    print(f"wrote {len(rows)} rows to {config.output_path}", file=sys.stderr)
    for row in failed:
        print(
            f"  {row.spec.family.value} m={row.spec.m} r={row.spec.r}: {row.status}",
            file=sys.stderr,
        )
    if any(row.status == ConvergenceError.__name__ for row in failed):
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_figure(args) -> int:
    fig_id = resolve_figure(args.id)
    kwargs = {"workers": args.workers}
    if args.r_step is not None:
        kwargs["r_step"] = args.r_step
    if args.r_stop is not None:
        kwargs["r_stop"] = args.r_stop
    paths = reproduce_figure(fig_id, args.out_dir, **kwargs)
    for path in paths:
        print(path)
        if args.gnuplot:
            script = gnuplot_script(path, _FIGURE_YLABELS[FIGURES[fig_id].measure])
            gp = path.with_suffix(".gp")
            gp.write_text(script, encoding="utf-8")
            print(gp)
    return EXIT_OK


def _selfcheck_items():
    vac = two_mode_fock(0, 0, 8)
    yield "separable bound F(|0,0>) = 1/2", abs(fidelity_coherent(vac) - 0.5) < 1e-8
    for r in (0.3, 0.8):
        tmsv = build_resource(StateSpec(Family.TMSV, r))
        want = 1.0 / (1.0 + math.exp(-2 * r))
        yield f"TMSV r={r}: quadrature F vs closed form", abs(fidelity_coherent(tmsv) - want) < 1e-5
        yield f"TMSV r={r}: Gaussian F vs closed form", abs(gaussian_fidelity(covariance_of(tmsv)) - want) < 1e-8
    psi = (two_mode_fock(1, 0, 6).amps - two_mode_fock(0, 1, 6).amps) / math.sqrt(2)
    singlet = TwoModeState(psi)
    yield "singlet: quadrature F vs term sum", abs(fidelity_coherent(singlet) - fidelity_sum_oracle(singlet)) < 1e-6
    yield "singlet: E = 1 bit", abs(entanglement_entropy(singlet) - 1.0) < 1e-12
    for fam in (Family.PAS, Family.PSS, Family.SNS):
        spec = StateSpec(fam, 0.5, 2)
        res = build_resource(spec, tail_tol=1e-14)
        yield f"{fam.value} m=2 r=0.5: EPR closed form vs moments", abs(epr_analytic(spec) - epr_uncertainty(res)) < 1e-8
    for fam in (Family.TMSV, Family.TMPA, Family.TMPS, Family.TMSN):
        res = build_resource(StateSpec(fam, 0.6))
        lam = least_eigenvalue(covariance_of(res))
        yield f"{fam.value} r=0.6: least eigenvalue closed form", abs(lam - tmsv_family_lambda_min(fam, 0.6)) < 1e-6
    yield "Wehrl NG of |1> = ln 2 - gamma", abs(wehrl_ng(fock_state(1, 8)) - (math.log(2) - np.euler_gamma)) < 1e-5
    eta, s_star = sva_argmax(build_resource(StateSpec(Family.TMSV, 0.7)))
    yield "TMSV self-affinity", abs(eta - 1) < 1e-8 and abs(s_star - 0.7) < 1e-8


def _cmd_selfcheck(args) -> int:
    ok = True
    for label, passed in _selfcheck_items():
        ok &= bool(passed)
        print(f"{'PASS' if passed else 'FAIL'}  {label}")
    return EXIT_OK if ok else EXIT_INVALID


_COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "selfcheck": _cmd_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (NGTeleportError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
