"""Command-line front end.

Exit status: 0 on success, 2 when a hypothesis fails (the report is still
written), 1 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .carleman import (
    DEFAULT_JMAX,
    AdmissibleFunction,
    GevreyLog,
    Tabulated,
    check_admissible,
    check_nonqa,
    check_tame,
    compare_sequences,
    mtheta_closed,
    mtheta_numeric,
    sandwich_constants,
)
from .config import (
    ConfigError,
    exact,
    load_json,
    parse_branches,
    parse_plan,
    parse_problem,
    parse_sequence,
    parse_set,
    parse_variables,
    poly_field,
)
from .errors import DeterminacyError
from .fitting import MapGerm, dol_failures, fitting_ideal, kf_pipeline, primitive_member
from .lojasiewicz import VarietyDescriptor, fit_separation, write_csv
from .pipeline import analyze, beta_table, isolated_pipeline, jsonable, round_exponent

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Outcome:
    def __init__(self, ok: bool, text: str, data):
        self.ok = ok
        self.text = text
        self.data = data


def _config(args) -> dict:
    if not args.config:
        raise UsageError(f"{args.command} needs --config")
    return load_json(args.config)


def _fmt(x) -> str:
    return json.dumps(jsonable(x))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_check_tame(args) -> Outcome:
    obj = _config(args)
    M = parse_sequence(obj.get("sequence", {}))
    jmax = int(obj.get("jmax", DEFAULT_JMAX))
    if isinstance(M, Tabulated):
        jmax = min(jmax, M.jmax)
    rep = check_tame(M, jmax)
    data = {"sequence": M.describe(), "ok": rep.ok, "A": rep.A, "violation": rep.violation}
    text = f"tame: {rep.ok}\n" + (f"A = {rep.A}\n" if rep.ok else f"violation: {rep.violation}\n")
    return Outcome(rep.ok, text, data)


def cmd_check_nonqa(args) -> Outcome:
    obj = _config(args)
    M = parse_sequence(obj.get("sequence", {}))
    jmax = int(obj.get("jmax", 1000))
    if isinstance(M, Tabulated):
        jmax = min(jmax, M.jmax - 1)  # each term needs M_{j+1}
    rep = check_nonqa(M, jmax)
    ok = rep.verdict == "non-quasianalytic"
    data = {"sequence": M.describe(), "verdict": rep.verdict, "heuristic": rep.heuristic, "rule": rep.rule,
            "partial_sum": rep.final_sum, "jmax": len(rep.partial_sums) - 1}
    text = (f"verdict: {rep.verdict}{' (heuristic)' if rep.heuristic else ''}\n"
            f"rule: {rep.rule}\npartial sum up to j = {data['jmax']}: {rep.final_sum!r}\n")
    return Outcome(ok, text, data)


def cmd_htheta(args) -> Outcome:
    obj = _config(args)
    M = parse_sequence(obj.get("sequence", {}))
    th = obj.get("theta", {})
    try:
        mu, nu = exact(th.get("mu", 1), "theta.mu"), exact(th.get("nu", 0), "theta.nu")
        theta = AdmissibleFunction(float(exact(th.get("c", 1), "theta.c")),
                                   int(mu) if mu.denominator == 1 else mu,
                                   int(nu) if nu.denominator == 1 else float(nu))
    except ValueError as exc:
        raise ConfigError(f"theta: {exc}") from None
    jmax = int(obj.get("jmax", 30))
    adm = check_admissible(theta)
    num = mtheta_numeric(M, theta, jmax=jmax)
    data = {"sequence": M.describe(), "theta": theta.describe(), "admissible": adm.ok,
            "admissibility": adm.violation, "s": adm.s,
            "numeric_log_values": list(num.sequence.logs), "warnings": num.warnings}
    lines = [f"theta admissible: {adm.ok}" + (f" ({adm.violation})" if adm.violation else f", s = {adm.s:g}")]
    if isinstance(M, GevreyLog):
        closed = mtheta_closed(M, theta)
        cmp = compare_sequences(num.sequence, closed, jmax)
        sw = sandwich_constants(M, closed, theta)
        data.update(closed=closed.describe(), max_ratio=cmp.sup, verdict=cmp.verdict,
                    sandwich={"ok": sw.ok, "c": sw.c, "c_prime": sw.c_prime})
        lines.append(f"closed form: {_fmt(closed.describe())}")
        lines.append(f"numeric vs closed: max ratio^(1/j) {cmp.sup!r} for j <= {jmax}, {cmp.verdict}")
        lines.append(f"sandwich constants: c = {sw.c}, c' = {sw.c_prime}")
    lines.append("log M^(theta)_j: " + " ".join(f"{v:.6g}" for v in num.sequence.logs))
    lines.extend(f"warning: {w}" for w in num.warnings)
    return Outcome(adm.ok, "\n".join(lines) + "\n", data)


def _fitting_inputs(obj):
    variables = parse_variables(obj)
    try:
        psi = MapGerm([poly_field(p, variables, "psi") for p in obj.get("psi", list(variables))])
    except ValueError as exc:
        raise ConfigError(f"psi: {exc}") from None
    return variables, psi


def cmd_fitting(args) -> Outcome:
    obj = _config(args)
    variables, psi = _fitting_inputs(obj)
    if "phi" in obj:
        try:
            phi = MapGerm([poly_field(p, variables, "phi") for p in obj["phi"]])
        except ValueError as exc:
            raise ConfigError(f"phi: {exc}") from None
        res = fitting_ideal(psi, phi)
    elif "f" in obj:
        f = poly_field(obj["f"], variables, "f")
        res = kf_pipeline(psi, f)
        phi = MapGerm(f.gradient())
    else:
        raise ConfigError("fitting needs f or phi")
    bad = dol_failures(res, psi, phi)
    data = {"lambda": res.lam.to_strings(),
            "minors": [{"columns": [c + 1 for c in lab], "value": str(m)}
                       for lab, m in zip(res.minor_labels, res.minors)],
            "basis": [str(b) for b in res.ideal.basis], "unit": res.ideal.is_unit(),
            "minor_times_psi_in_phi": not bad}
    lines = ["lambda:"] + ["  [" + ", ".join(row) + "]" for row in data["lambda"]]
    lines.append("nonzero maximal minors:")
    lines.extend(f"  columns {m['columns']}: {m['value']}" for m in data["minors"])
    lines.append("reduced Groebner basis of K:")
    lines.extend(f"  {b}" for b in data["basis"])
    lines.append(f"minor * psi_i in <phi> for all pairs: {not bad}")
    return Outcome(not bad, "\n".join(lines) + "\n", data)


def cmd_primitive_check(args) -> Outcome:
    obj = _config(args)
    variables, psi = _fitting_inputs(obj)
    if "f" not in obj:
        raise ConfigError("primitive-check needs f")
    f = poly_field(obj["f"], variables, "f")
    try:
        res = primitive_member(f, psi.ideal())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if res:
        return Outcome(True, "f lies in Int<psi>\n", {"holds": True})
    label = "f" if res.which == "f" else f"df/dx{res.which}"
    data = {"holds": False, "which": label, "witness": str(res.witness), "remainder": str(res.remainder)}
    text = f"f is not in Int<psi>: {label} = {res.witness} is not in <psi> (remainder {res.remainder})\n"
    return Outcome(False, text, data)


def cmd_loja_fit(args) -> Outcome:
    obj = _config(args)
    variables = parse_variables(obj)
    n = len(variables)
    if "g" not in obj:
        raise ConfigError("loja-fit needs g")
    g = poly_field(obj["g"], variables, "g")
    branches = parse_branches(obj, n)
    method = obj.get("method") or ("parametrized" if branches else "penalty")
    V = VarietyDescriptor(g, branches, method)
    if branches:
        V.validate()
    plan = parse_plan(obj.get("plan"))
    fit = fit_separation(V, parse_set(obj.get("Y"), n), plan, n, with_nu=bool(obj.get("fit_nu", False)))
    if args.csv:
        write_csv(args.csv, fit)
    s = round_exponent(fit.s_hat)
    data = {"s_hat": fit.s_hat, "s": str(s) if isinstance(s, Fraction) else s, "c_hat": fit.c_hat,
            "residual": fit.residual, "bins": fit.bins, "samples": int(len(fit.samples)),
            "zero_hits": fit.zero_hits, "nu_hat": fit.nu_hat, "s_joint": fit.s_joint}
    lines = [f"s_hat = {fit.s_hat!r} (rounded {data['s']})", f"c_hat = {fit.c_hat!r}",
             f"residual = {fit.residual!r} over {fit.bins} bins, {data['samples']} samples"]
    if fit.nu_hat is not None:
        lines.append(f"joint fit: s = {fit.s_joint!r}, nu = {fit.nu_hat!r}")
    return Outcome(True, "\n".join(lines) + "\n", data)


def cmd_analyze(args) -> Outcome:
    obj = _config(args)
    if args.isolated:
        variables = parse_variables(obj)
        if "gamma" not in obj or "f" not in obj:
            raise ConfigError("isolated analysis needs f and gamma")
        rep = isolated_pipeline(poly_field(obj["f"], variables, "f"), parse_sequence(obj.get("sequence", {})),
                                poly_field(obj["gamma"], variables, "gamma"), parse_plan(obj.get("plan")),
                                parse_branches(obj, len(variables)), obj.get("method"), args.csv)
    else:
        rep = analyze(parse_problem(obj), args.csv)
    return Outcome(rep.conclusion is not None, rep.to_text(), rep.to_dict())


def cmd_beta_table(args) -> Outcome:
    if args.alpha is None or args.mu is None:
        raise UsageError("beta-table needs --alpha and --mu")
    try:
        alpha = exact(args.alpha, "--alpha")
        mu = exact(args.mu, "--mu")
        beta = beta_table(alpha, mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return Outcome(True, f"{beta}\n", {"alpha": str(alpha), "mu": str(mu), "beta": str(beta)})


COMMANDS = {
    "check-tame": cmd_check_tame,
    "check-nonqa": cmd_check_nonqa,
    "htheta": cmd_htheta,
    "fitting": cmd_fitting,
    "primitive-check": cmd_primitive_check,
    "loja-fit": cmd_loja_fit,
    "analyze": cmd_analyze,
    "beta-table": cmd_beta_table,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="determinacy", description="Determinacy of smooth germs under flat perturbations.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="problem file (JSON)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--csv", help="dump separation samples (loja-fit, analyze)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--alpha", help="beta-table: Gevrey exponent alpha")
    p.add_argument("--mu", help="beta-table: exponent mu of Y")
    p.add_argument("--isolated", action="store_true",
                   help="analyze: isolated-singularity route (psi = identity, Y = origin, uses gamma)")
    return p


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        outcome = COMMANDS[args.command](args)
        code = EXIT_OK if outcome.ok else EXIT_HYPOTHESIS
    except DeterminacyError as exc:
        rep = exc.report
        data = {"error": type(exc).__name__, "message": str(exc)}
        text = f"{type(exc).__name__}: {exc}\n"
        for attr in ("witness", "remainder"):
            if getattr(exc, attr, None) is not None:
                data[attr] = str(getattr(exc, attr))
        if rep is not None:
            data["report"] = rep.to_dict()
            text = rep.to_text() + text
        outcome = Outcome(False, text, data)
        code = EXIT_HYPOTHESIS
    except (UsageError, ValueError) as exc:  # ConfigError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = json.dumps(jsonable(outcome.data), indent=2) + "\n" if args.json else outcome.text
    try:
        _emit(args, payload)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
