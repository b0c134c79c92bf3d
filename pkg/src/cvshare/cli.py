"""Command-line interface: one executable exposing every pipeline.

Each run writes its outputs plus a manifest.json recording the tool
version, active backend, subcommand and full argument set, so any
manifest can be replayed to byte-identical outputs. All JSON is
emitted with sorted keys and no timestamps for the same reason.

Exit codes: 0 on success, 2 on argument and configuration errors,
1 on runtime failures (abort on loss, protocol failure); failures
print one machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, bounds, certificates, protocol, security
from ._backend import backend_name
from .errors import USAGE_ERROR_CODES, CvshareError, InvalidArgumentError
from .estimators import parse_coalition
from .gaussian_core import (
    ExperimentModel,
    build_dealer_state,
    physicality_min_eigenvalue,
    state_from_text,
    state_to_text,
)
from .protocol import DisplacementPlan, ProtocolPolicy
from .sampler import RandomStream

OUT_DIR_ENV = "CVSHARE_OUT_DIR"

_COALITION_ORDER = ("a_alone", "ab", "ac", "abc")


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(value) -> str:
    """CSV cell: repr for floats so replays are byte-identical."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


class _Run:
    """Collects output files for one subcommand run and writes the manifest."""

    def __init__(self, args: argparse.Namespace):
        self.out_dir = args.out_dir
        self.args = args
        self.outputs: list[str] = []
        os.makedirs(self.out_dir, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        with open(os.path.join(self.out_dir, name), "w", newline="") as fh:
            fh.write(text)
        self.outputs.append(name)

    def finish(self) -> None:
        arguments = {
            k: v for k, v in sorted(vars(self.args).items()) if k != "handler"
        }
        manifest = {
            "tool": "cvshare",
            "version": __version__,
            "backend": backend_name(),
            "subcommand": self.args.subcommand,
            "arguments": arguments,
            "outputs": sorted(self.outputs),
        }
        with open(os.path.join(self.out_dir, "manifest.json"), "w", newline="") as fh:
            fh.write(_json_text(manifest))


def _add_out_dir(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--out-dir",
        default=os.environ.get(OUT_DIR_ENV, "."),
        help=f"output directory (default: ${OUT_DIR_ENV} or the working directory)",
    )


def _add_model_flags(sub: argparse.ArgumentParser, with_r: bool = True) -> None:
    if with_r:
        sub.add_argument("--r", type=float, default=1.0, help="squeezing parameter")
    for arm in ("a", "b", "c"):
        sub.add_argument(f"--eta-{arm}", type=float, default=1.0, help=f"arm {arm.upper()} transmissivity")
        sub.add_argument(f"--eps-{arm}", type=float, default=0.0, help=f"arm {arm.upper()} excess noise")


def _model_from_args(args: argparse.Namespace, r: float | None = None) -> ExperimentModel:
    return ExperimentModel(
        r=args.r if r is None else r,
        eta_a=args.eta_a,
        eta_b=args.eta_b,
        eta_c=args.eta_c,
        eps_a=args.eps_a,
        eps_b=args.eps_b,
        eps_c=args.eps_c,
    )


def _cmd_state(args: argparse.Namespace) -> None:
    run = _Run(args)
    if args.load is not None:
        if not os.path.exists(args.load):
            raise InvalidArgumentError(f"state file not found: {args.load}")
        with open(args.load) as fh:
            state = state_from_text(fh.read())
    else:
        state = build_dealer_state(_model_from_args(args), args.alpha_x, args.alpha_p)
        run.write("state.txt", state_to_text(state))
    run.finish()
    print(f"modes: {state.n_modes}")
    print(f"mean: {' '.join(repr(float(v)) for v in state.mean)}")
    print(f"min physicality eigenvalue: {physicality_min_eigenvalue(state):.6e}")


def _cmd_bounds(args: argparse.Namespace) -> None:
    if args.steps < 1:
        raise InvalidArgumentError("--steps must be >= 1")
    if args.r_max < args.r_min or args.r_min < 0.0:
        raise InvalidArgumentError("need 0 <= r-min <= r-max")
    run = _Run(args)
    grid = np.linspace(args.r_min, args.r_max, args.steps)
    rows = []
    for r in grid:
        model = _model_from_args(args, r=float(r))
        for name in _COALITION_ORDER:
            mx, mp, ms = bounds.predicted_mse(model, parse_coalition(name))
            rows.append([float(r), name, mx, mp, ms])
    run.write("bounds.csv", _csv_text(["r", "coalition", "mse_x", "mse_p", "mse_sum"], rows))
    if args.band is not None:
        if not (0.0 <= args.band_fluct < 1.0):
            raise InvalidArgumentError("--band-fluct must be in [0, 1)")
        gen = RandomStream(args.band_seed).generator()
        band_rows = []
        for r in grid:
            if args.band == "uniform":
                draws = gen.uniform(-1.0, 1.0, args.band_samples)
            else:
                draws = gen.standard_normal(args.band_samples)
            r_samples = np.clip(float(r) * (1.0 + args.band_fluct * draws), 0.0, None)
            for name in _COALITION_ORDER:
                sums = [
                    bounds.predicted_mse(_model_from_args(args, r=float(rs)), parse_coalition(name))[2]
                    for rs in r_samples
                ]
                band_rows.append([float(r), name, min(sums), max(sums)])
        run.write(
            "bounds_band.csv",
            _csv_text(["r", "coalition", "mse_sum_lo", "mse_sum_hi"], band_rows),
        )
    run.finish()
    print(f"wrote {len(rows)} bound rows for {args.steps} squeezing values")


def _cmd_certify(args: argparse.Namespace) -> None:
    single = args.n1 is not None or args.n2 is not None
    if single and args.grid is not None:
        raise InvalidArgumentError("--grid conflicts with --n1/--n2")
    if single and (args.n1 is None or args.n2 is None):
        raise InvalidArgumentError("--n1 and --n2 must be given together")
    if not single and args.grid is None:
        raise InvalidArgumentError("give --n1/--n2 or --grid K")
    run = _Run(args)
    if single:
        points = [(args.n1, args.n2)]
    else:
        if args.grid < 1:
            raise InvalidArgumentError("--grid must be >= 1")
        axis = np.linspace(args.grid_min, args.grid_max, args.grid)
        points = [(float(n1), float(n2)) for n1 in axis for n2 in axis]
    reports = []
    for n1, n2 in points:
        rep = certificates.verify_certificates(bounds.ThermalParams(n1, n2), tol=args.tol)
        reports.append(rep.to_json_dict())
    run.write("certificates.json", _json_text(reports))
    run.finish()
    n_ok = sum(1 for r in reports if r["feasible_primal"] and r["feasible_dual"] and r["values_match"])
    print(f"{n_ok}/{len(reports)} certificates ok")


_CONFIG_SCHEMA = {
    "r": float,
    "eta_a": float,
    "eta_b": float,
    "eta_c": float,
    "eps_a": float,
    "eps_b": float,
    "eps_c": float,
    "plan": str,
    "alpha_x": float,
    "alpha_p": float,
    "v_dist": float,
    "n_rep": int,
    "coalition": str,
    "n_rounds": int,
    "seed": int,
    "stream_id": int,
    "eta_min": float,
    "witness_fraction": float,
    "bias_fraction": float,
    "gain_mode": str,
}

_CONFIG_DEFAULTS = {
    "r": 1.0,
    "eta_a": 1.0,
    "eta_b": 1.0,
    "eta_c": 1.0,
    "eps_a": 0.0,
    "eps_b": 0.0,
    "eps_c": 0.0,
    "plan": "fixed",
    "alpha_x": 1.0,
    "alpha_p": 1.0,
    "v_dist": 1.0,
    "n_rep": 1,
    "coalition": "abc",
    "n_rounds": 10000,
    "seed": 0,
    "stream_id": 0,
    "eta_min": 0.5,
    "witness_fraction": 0.05,
    "bias_fraction": 0.05,
    "gain_mode": "analytic",
}


def parse_config_text(text: str) -> dict:
    """Parse line-oriented ``key = value`` configuration with ``#`` comments."""
    values = dict(_CONFIG_DEFAULTS)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_SCHEMA:
            raise InvalidArgumentError(f"config line {lineno}: unknown key {key!r}")
        if key in seen:
            raise InvalidArgumentError(f"config line {lineno}: duplicate key {key!r}")
        seen.add(key)
        caster = _CONFIG_SCHEMA[key]
        try:
            values[key] = caster(value)
        except ValueError as exc:
            raise InvalidArgumentError(
                f"config line {lineno}: bad {caster.__name__} value {value!r}"
            ) from exc
    return values


def _round_rows(records: list[protocol.RoundRecord]) -> list[list]:
    return [
        [
            rec.round_index,
            rec.alpha_x,
            rec.alpha_p,
            rec.dealer_basis,
            rec.basis_a,
            rec.basis_b,
            rec.basis_c,
            rec.x_c,
            rec.p_c,
            rec.x_b,
            rec.p_b,
            rec.x_a,
            rec.p_a,
            rec.kept,
        ]
        for rec in records
    ]


def _cmd_simulate(args: argparse.Namespace) -> None:
    if not os.path.exists(args.config):
        raise InvalidArgumentError(f"config file not found: {args.config}")
    with open(args.config) as fh:
        cfg = parse_config_text(fh.read())
    model = ExperimentModel(
        r=cfg["r"],
        eta_a=cfg["eta_a"],
        eta_b=cfg["eta_b"],
        eta_c=cfg["eta_c"],
        eps_a=cfg["eps_a"],
        eps_b=cfg["eps_b"],
        eps_c=cfg["eps_c"],
    )
    plan = DisplacementPlan(
        kind=cfg["plan"],
        alpha_x=cfg["alpha_x"],
        alpha_p=cfg["alpha_p"],
        v_dist=cfg["v_dist"],
        n_rep=cfg["n_rep"],
    )
    policy = ProtocolPolicy(
        eta_min=cfg["eta_min"],
        witness_fraction=cfg["witness_fraction"],
        bias_fraction=cfg["bias_fraction"],
    )
    coalition = parse_coalition(cfg["coalition"])
    stream = RandomStream(cfg["seed"], cfg["stream_id"])
    run = _Run(args)
    result = protocol.run_protocol(
        model,
        plan,
        cfg["n_rounds"],
        coalition,
        policy,
        stream,
        gain_mode=cfg["gain_mode"],
        keep_records=args.dump_rounds,
    )
    run.write("mse_report.json", _json_text(result.mse_report.to_json_dict()))
    run.write("witness.json", _json_text(result.witness.to_json_dict()))
    run.write("bias.json", _json_text(result.bias.to_json_dict()))
    if args.dump_rounds:
        header = [
            "round_index", "alpha_x", "alpha_p", "dealer_basis",
            "basis_a", "basis_b", "basis_c",
            "x_c", "p_c", "x_b", "p_b", "x_a", "p_a", "kept",
        ]
        run.write("rounds.csv", _csv_text(header, _round_rows(result.records)))
    run.finish()
    rep = result.mse_report
    print(
        f"coalition {rep.coalition.value}: mse_sum = {rep.mse_sum:.6f} "
        f"({rep.n_x}+{rep.n_p} rounds)"
    )


def _security_distributions(args: argparse.Namespace, n: int) -> dict[str, security.MseDistribution]:
    return {
        "ab": security.MseDistribution(args.mu_pair, n),
        "abc": security.MseDistribution(args.mu_triple, n),
    }


def _cmd_security(args: argparse.Namespace) -> None:
    if args.n_probes < 1:
        raise InvalidArgumentError("--n-probes must be >= 1")
    run = _Run(args)
    reports = []
    single = security.MseDistribution(args.mu_single, args.n_probes)
    for name, dist in _security_distributions(args, args.n_probes).items():
        v_t = args.v_t
        if v_t is None:
            v_t = security.crossing_threshold(args.mu_single, dist.mu)
        reports.append(
            security.security_probabilities(v_t, single, dist, coalition_name=name).to_json_dict()
        )
    run.write("security.json", _json_text(reports))
    sweep_rows = []
    for n in range(1, args.n_probes + 1):
        single_n = security.MseDistribution(args.mu_single, n)
        for name, dist in _security_distributions(args, n).items():
            v_t = args.v_t
            if v_t is None:
                v_t = security.crossing_threshold(args.mu_single, dist.mu)
            rep = security.security_probabilities(v_t, single_n, dist, coalition_name=name)
            sweep_rows.append([n, name, rep.v_t, rep.delta, rep.p_success])
    run.write(
        "security_sweep.csv",
        _csv_text(["n_probes", "coalition", "v_t", "delta", "p_success"], sweep_rows),
    )
    run.finish()
    for rep in reports:
        print(
            f"{rep['coalition']}: v_t = {rep['v_t']:.6f}, delta = {rep['delta']:.6g}, "
            f"p_success = {rep['p_success']:.6g} at N = {rep['n_probes']}"
        )


def _cmd_mi(args: argparse.Namespace) -> None:
    if args.n_max < 1:
        raise InvalidArgumentError("--n-max must be >= 1")
    run = _Run(args)
    mus = {"a_alone": args.mu_single, "ab": args.mu_pair, "abc": args.mu_triple}
    curve_rows = []
    exceed_rows = []
    for n in range(1, args.n_max + 1):
        for name in ("a_alone", "ab", "abc"):
            mu = mus[name]
            # mean summed MSE mu/N; per-quadrature achieved MSE is half that
            v_alpha = 0.5 * mu / n
            mi = security.mutual_information(args.v_dist, v_alpha)
            curve_rows.append([n, name, v_alpha, mi])
            dist = security.MseDistribution(mu, n)
            exceed_rows.append(
                [n, name, security.prob_mi_above(args.c_bits, args.v_dist, dist)]
            )
    run.write(
        "mi_curve.csv",
        _csv_text(["n_probes", "coalition", "mse_per_quadrature", "mi_bits"], curve_rows),
    )
    run.write(
        "exceedance.csv",
        _csv_text(["n_probes", "coalition", "p_exceed"], exceed_rows),
    )
    req = security.required_mse(args.c_bits, args.v_dist)
    run.finish()
    print(f"required per-quadrature MSE for {args.c_bits} bits: {req:.6f}")


def _cmd_witness(args: argparse.Namespace) -> None:
    run = _Run(args)
    result = protocol.witness_verification_run(
        _model_from_args(args),
        args.alpha_x,
        args.alpha_p,
        args.n_rounds,
        RandomStream(args.seed, args.stream_id),
        surrogate=args.surrogate,
    )
    run.write("witness.json", _json_text(result.to_json_dict()))
    run.finish()
    shown = "n/a" if result.mse_sum is None else f"{result.mse_sum:.6f}"
    print(
        f"witness mse_sum = {shown} (threshold {result.threshold}), "
        f"entangled = {result.entangled}"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvshare",
        description="Simulator and analysis toolkit for three-party continuous-variable secret sharing",
    )
    parser.add_argument("--version", action="version", version=f"cvshare {__version__}")
    subs = parser.add_subparsers(dest="subcommand")

    sp = subs.add_parser("state", help="build or inspect a dealer state")
    _add_model_flags(sp)
    sp.add_argument("--alpha-x", type=float, default=0.0)
    sp.add_argument("--alpha-p", type=float, default=0.0)
    sp.add_argument("--load", default=None, help="validate a state file instead of building one")
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_state)

    sp = subs.add_parser("bounds", help="theory MSE curves over a squeezing grid")
    sp.add_argument("--r-min", type=float, default=0.0)
    sp.add_argument("--r-max", type=float, default=1.5)
    sp.add_argument("--steps", type=int, default=16)
    _add_model_flags(sp, with_r=False)
    sp.add_argument("--band", choices=("uniform", "gaussian"), default=None,
                    help="also emit a squeezing-fluctuation band")
    sp.add_argument("--band-fluct", type=float, default=0.03)
    sp.add_argument("--band-samples", type=int, default=200)
    sp.add_argument("--band-seed", type=int, default=0)
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_bounds)

    sp = subs.add_parser("certify", help="verify estimation-bound certificates")
    sp.add_argument("--n1", type=float, default=None)
    sp.add_argument("--n2", type=float, default=None)
    sp.add_argument("--grid", type=int, default=None, help="K for a K x K thermal-parameter grid")
    sp.add_argument("--grid-min", type=float, default=0.1)
    sp.add_argument("--grid-max", type=float, default=3.0)
    sp.add_argument("--tol", type=float, default=certificates.DEFAULT_TOL)
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_certify)

    sp = subs.add_parser("simulate", help="run protocol rounds from a config file")
    sp.add_argument("--config", required=True, help="key = value configuration file")
    sp.add_argument("--dump-rounds", action="store_true", help="also write rounds.csv")
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_simulate)

    sp = subs.add_parser("security", help="threshold security probabilities")
    sp.add_argument("--mu-single", type=float, required=True)
    sp.add_argument("--mu-pair", type=float, required=True)
    sp.add_argument("--mu-triple", type=float, required=True)
    sp.add_argument("--n-probes", type=int, required=True)
    sp.add_argument("--v-t", type=float, default=None,
                    help="access threshold (default: per-coalition crossing point)")
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_security)

    sp = subs.add_parser("mi", help="mutual information and exceedance curves")
    sp.add_argument("--v-dist", type=float, required=True)
    sp.add_argument("--c-bits", type=float, default=1.0)
    sp.add_argument("--mu-single", type=float, required=True)
    sp.add_argument("--mu-pair", type=float, required=True)
    sp.add_argument("--mu-triple", type=float, required=True)
    sp.add_argument("--n-max", type=int, default=200)
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_mi)

    sp = subs.add_parser("witness", help="entanglement verification run")
    _add_model_flags(sp)
    sp.add_argument("--alpha-x", type=float, default=0.0)
    sp.add_argument("--alpha-p", type=float, default=0.0)
    sp.add_argument("--n-rounds", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream-id", type=int, default=0)
    sp.add_argument("--surrogate", action="store_true",
                    help="distribute the intercept-and-resend surrogate state instead")
    _add_out_dir(sp)
    sp.set_defaults(handler=_cmd_witness)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        args.handler(args)
    except CvshareError as exc:
        payload = {"error": exc.code, "message": str(exc)}
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        return 2 if exc.code in USAGE_ERROR_CODES else 1
    return 0


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
