"""Command-line interface: ``quadstab <command> ...``.

Exit codes: 0 when a result was computed (stable or not), 2 for invalid
input, 3 for a numeric failure. Floats are printed with 12 significant
digits. Frequencies given next to ``--omega`` are in units of the mechanical
frequency and results are reported in the same units.
"""
import argparse
from dataclasses import dataclass
import logging
import re
import sys

import numpy as np

from . import io as qio
from .core import eom_matrix
from .dynamics import occupation_series
from .errors import InvalidArgument, NumericFailure, QuadstabError
from .normal_forms import JordanTypeSpec, build_normal_form, geometric_split
from .optomech2 import (PumpParams, TwoModeParams, build_two_mode, classify_two_mode,
                        critical_couplings, stability_condition_eq17, steady_state_map,
                        steady_states, two_mode_sweep)
from .optomech3 import (ThreeModeParams, appendix_c_classify, build_three_mode,
                        reduce_equal_detuning, three_mode_sweep)
from .spectral import is_dynamically_stable

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    payload: str


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def parse_range(text):
    """``start:stop:count`` with inclusive endpoints, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError(f"count must be positive, got {count}")
    return np.linspace(start, stop, count)


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _eigs(model):
    ev = np.linalg.eigvals(eom_matrix(model).A)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    return [[z.real, z.imag] for z in ev]


def _emit(args, obj=None, header=None, rows=None):
    fmt = getattr(args, "format", None)
    if fmt is None:
        fmt = "csv" if rows is not None else "json"
    if fmt == "csv":
        if rows is None:
            flat = {k: v for k, v in obj.items() if not isinstance(v, (dict, list))}
            header, rows = list(flat), [list(flat.values())]
        text = qio.dumps_csv(header, rows)
    else:
        if obj is None:
            obj = [dict(zip(header, r)) for r in rows]
        text = qio.dumps_json(obj)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        return ""
    return text


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args):
    model = qio.read_model(args.model)
    v = is_dynamically_stable(eom_matrix(model))
    d = v.to_dict()
    d["n_modes"] = model.n_modes
    d["eigenvalues"] = _eigs(model)
    if args.format == "csv":
        return _emit(args, header=["n_modes", "stable", "mode_kinds"],
                     rows=[[model.n_modes, v.stable, ";".join(k.value for k in v.mode_kinds)]])
    return _emit(args, d)


def cmd_om2_classify(args):
    O = args.omega
    p = TwoModeParams(args.delta * O, O, args.kappa * O)
    case = classify_two_mode(p)
    model = build_two_mode(p)
    v = is_dynamically_stable(eom_matrix(model))
    d = case.to_dict()
    d["K_R"] = case.K_R / O
    d["K_B"] = case.K_B / O
    d.update(delta=args.delta, kappa_abs=abs(args.kappa), inequality=stability_condition_eq17(p),
             spectral_stable=v.stable, spectral_mode_kinds=[k.value for k in v.mode_kinds],
             eigenvalues=[[a / O, b / O] for a, b in _eigs(model)])
    return _emit(args, d)


def cmd_om2_sweep(args):
    O = args.omega
    sw = two_mode_sweep(args.delta_range * O, O, args.kappa_range * O, jobs=args.jobs)
    rows = [(d / O, k / O, lab, st, r / O) for d, k, lab, st, r in sw.rows()]
    return _emit(args, header=["delta", "kappa_abs", "case_label", "stable", "lambda_re_max"], rows=rows)


def cmd_om2_steady(args):
    O = args.omega
    pump = PumpParams(args.delta_prime * O, O, args.kappa0 * O, args.kappa_in * O)
    branches = [b.to_dict() for b in steady_states(pump)]
    if args.format == "csv":
        header = ["Delta", "alpha_re", "alpha_im", "case", "stable"]
        rows = [[b["Delta"] / O, b["alpha_s"][0], b["alpha_s"][1], b.get("case", ""), b["stable"]] for b in branches]
        return _emit(args, header=header, rows=rows)
    for b in branches:
        b["Delta"] /= O
        b["kappa"] = [x / O for x in b["kappa"]]
    return _emit(args, {"branches": branches, "n_stable": sum(b["stable"] for b in branches)})


def cmd_om2_steady_map(args):
    m = steady_state_map(args.delta_prime_range, args.drive_range, 1.0)
    rows = []
    for i, g in enumerate(args.drive_range):
        for j, dp in enumerate(args.delta_prime_range):
            rows.append([dp, g, m["n_stable"][i, j], m["n_a"][i, j], m["n_e"][i, j]])
    return _emit(args, header=["delta_prime", "drive", "n_stable", "n_a", "n_e"], rows=rows)


def _om3_params(args):
    O = args.omega
    return ThreeModeParams(args.delta1 * O, args.delta2 * O, O, args.kappa1 * O, args.kappa2 * O)


def cmd_om3_classify(args):
    O = args.omega
    p = _om3_params(args)
    r = appendix_c_classify(p)
    d = r.to_dict()
    d["s_roots"] = [[a / O**2, b / O**2] for a, b in d["s_roots"]]
    d["eigenvalues"] = [[a / O, b / O] for a, b in _eigs(build_three_mode(p))]
    if abs(abs(p.Delta1) - abs(p.Delta2)) <= 1e-9 * O and (p.kappa1 or p.kappa2):
        red = reduce_equal_detuning(p)
        if red.reduced is not None:
            rd = red.to_dict()
            rd["kappa_s"] /= O
            rd["spectator_frequency"] /= O
            rd.pop("cubic_classification", None)
            d["reduction"] = rd
    if args.format == "csv":
        return _emit(args, header=["case_id", "stable", "mode_kinds"],
                     rows=[[r.case_id, r.stable, ";".join(k.value for k in r.mode_kinds)]])
    return _emit(args, d)


def cmd_om3_sweep(args):
    O = args.omega
    sw = three_mode_sweep(args.delta1 * O, args.delta2 * O, O, args.k1 * O, args.k2 * O, jobs=args.jobs)
    rows = [(a / O, b / O, cid, st, r / O) for a, b, cid, st, r in sw.rows()]
    return _emit(args, header=["kappa1_abs", "kappa2_abs", "case_id", "stable", "max_re_lambda"], rows=rows)


def cmd_normal_form(args):
    spec = JordanTypeSpec(args.type, args.D, args.lam, args.sigma)
    if args.out:
        model = build_normal_form(spec)
        qio.write_model(model, args.out, fmt="csv" if args.format == "csv" else "json")
        return ""
    split = geometric_split(spec)
    d = {
        "type": spec.type_id.value,
        "D": spec.D,
        "n_modes": spec.n_modes,
        "mode_kinds": [k.value for k in split.mode_kinds],
        "residuals": split.residuals,
        "V": split.V,
        "W_G": split.W_G,
        "W_I": split.W_I,
        "S": split.S,
    }
    return qio.dumps_json(d)


def cmd_evolve(args):
    model = qio.read_model(args.model)
    if not args.t_max > 0 or args.steps < 1:
        raise InvalidArgument("--t-max must be positive and --steps at least 1")
    t = np.linspace(0.0, args.t_max, args.steps + 1)
    series = occupation_series(model, t)
    header = ["t"] + [f"n_{j + 1}" for j in range(model.n_modes)]
    return _emit(args, header=header, rows=list(series.rows()))


def cmd_thresholds(args):
    O = args.omega
    K_R, K_B = critical_couplings(args.delta * O, O)
    d = {"delta": args.delta, "K_R": K_R / O, "K_B": K_B / O,
         "squeezing_threshold": abs(args.delta * O + O) / 2 / O}
    return _emit(args, d)


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = _Parser(prog="quadstab", description=(
        "Dynamical stability of quadratic bosonic Hamiltonians. Frequencies "
        "given alongside --omega are in units of the mechanical frequency."))
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, default_fmt=None):
        sp.add_argument("--format", choices=["json", "csv"], default=default_fmt)
        sp.add_argument("--out", help="write output to this file instead of stdout")

    c = sub.add_parser("classify", help="spectral stability verdict for a model file")
    c.add_argument("--model", required=True)
    common(c, "json")
    c.set_defaults(func=cmd_classify)

    om2 = sub.add_parser("om2", help="two-mode optomechanical model")
    s2 = om2.add_subparsers(dest="sub", parser_class=_Parser)
    a = s2.add_parser("classify")
    a.add_argument("--delta", type=float, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    a.add_argument("--kappa", type=parse_complex, required=True)
    common(a, "json")
    a.set_defaults(func=cmd_om2_classify)
    a = s2.add_parser("sweep")
    a.add_argument("--delta-range", type=parse_range, required=True)
    a.add_argument("--kappa-range", type=parse_range, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    a.add_argument("--jobs", type=int, default=1)
    common(a, "csv")
    a.set_defaults(func=cmd_om2_sweep)
    a = s2.add_parser("steady")
    a.add_argument("--delta-prime", type=float, required=True)
    a.add_argument("--kappa0", type=float, required=True)
    a.add_argument("--kappa-in", type=float, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    common(a, "json")
    a.set_defaults(func=cmd_om2_steady)
    a = s2.add_parser("steady-map", help="stable-branch counts over bare detuning and drive")
    a.add_argument("--delta-prime-range", type=parse_range, required=True)
    a.add_argument("--drive-range", type=parse_range, required=True,
                   help="values of |kappa0 kappa_in| / Omega^2")
    common(a, "csv")
    a.set_defaults(func=cmd_om2_steady_map)

    om3 = sub.add_parser("om3", help="three-mode optomechanical model")
    s3 = om3.add_subparsers(dest="sub", parser_class=_Parser)
    a = s3.add_parser("classify")
    a.add_argument("--delta1", type=float, required=True)
    a.add_argument("--delta2", type=float, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    a.add_argument("--kappa1", type=parse_complex, default=0j)
    a.add_argument("--kappa2", type=parse_complex, default=0j)
    common(a, "json")
    a.set_defaults(func=cmd_om3_classify)
    a = s3.add_parser("sweep")
    a.add_argument("--delta1", type=float, required=True)
    a.add_argument("--delta2", type=float, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    a.add_argument("--k1", type=parse_range, required=True)
    a.add_argument("--k2", type=parse_range, required=True)
    a.add_argument("--jobs", type=int, default=1)
    common(a, "csv")
    a.set_defaults(func=cmd_om3_sweep)

    a = sub.add_parser("normal-form", help="build a Jordan normal-form model and its geometric split")
    a.add_argument("--type", required=True, choices=["I", "II", "III", "IV", "V", "VI"])
    a.add_argument("--D", type=int, required=True)
    a.add_argument("--lam", type=parse_complex, default=1.0)
    a.add_argument("--sigma", type=int, default=1, choices=[1, -1])
    common(a, "json")
    a.set_defaults(func=cmd_normal_form)

    a = sub.add_parser("evolve", help="occupation numbers from the vacuum")
    a.add_argument("--model", required=True)
    a.add_argument("--t-max", type=float, required=True)
    a.add_argument("--steps", type=int, default=1000)
    common(a, "csv")
    a.set_defaults(func=cmd_evolve)

    a = sub.add_parser("thresholds", help="critical couplings K_R, K_B and the squeezing threshold")
    a.add_argument("--delta", type=float, required=True)
    a.add_argument("--omega", type=float, default=1.0)
    common(a, "json")
    a.set_defaults(func=cmd_thresholds)
    return p


_NEG_RANGE = re.compile(r"^-[\d.]")


def _join_negative_values(argv):
    """Attach values such as ``-3:3:301`` to their option so argparse does not
    mistake them for flags."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG_RANGE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None):
    """Run one command and return its exit code and output text."""
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise _UsageError(parser.format_usage())
        if getattr(args, "jobs", 1) < 1:
            raise InvalidArgument("--jobs must be at least 1")
        return CommandResult(EXIT_OK, args.func(args))
    except _UsageError as exc:
        return CommandResult(EXIT_INVALID, str(exc))
    except InvalidArgument as exc:
        return CommandResult(EXIT_INVALID, f"error: {exc}\n")
    except (NumericFailure, QuadstabError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return CommandResult(EXIT_NUMERIC, f"numeric failure: {exc}\n")


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    res = run(argv)
    stream = sys.stdout if res.exit_code == EXIT_OK else sys.stderr
    stream.write(res.payload)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
