"""Command-line front end: ``qortho [options] COMMAND [SELECTOR] [key=value ...]``.

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import acceptance, qcore, qfuncs, qops, qpoly
from . import verify as V
from .qcore import QContext
from .report import VerificationReport, finite_only, plain

COMMANDS = ("eval", "verify", "ortho", "limits", "suite")
FORMATS = ("json", "csv", "human")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    q: float | None
    tol_exact: float | None
    tol_series: float | None
    output_format: str
    output_path: str | None
    selector: str | None
    params: dict[str, str] = field(default_factory=dict)

    def context(self, q: float | None = None) -> QContext:
        q = self.q if q is None else q
        if q is None:
            q = 0.5
        kw = {}
        if self.tol_exact is not None:
            kw["tol_exact"] = self.tol_exact
        if self.tol_series is not None:
            kw["tol_series"] = self.tol_series
        try:
            return QContext(q, **kw)
        except ValueError as e:
            raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# parameter parsing


def parse_number(text: str) -> complex | float:
    """Parse reals and complex numbers written with ``i`` or ``j``: ``-i``, ``0.3+0.2i``, ``2``."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t.endswith("j") and (len(t) == 1 or not (t[-2].isdigit() or t[-2] == ".")):
        t = t[:-1] + "1j"
    try:
        v = complex(t)
    except ValueError:
        raise UsageError(f"cannot parse number {text!r}") from None
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise UsageError(f"number {text!r} is not finite")
    return v.real if v.imag == 0 and "j" not in t else v


def _intlike(v):
    return int(v) if isinstance(v, float) and v.is_integer() else v


class Params:
    """key=value arguments with typed, consumed-on-read access."""

    def __init__(self, raw: dict[str, str]):
        self.raw = dict(raw)
        self.used: set[str] = set()

    def _get(self, key: str, default):
        self.used.add(key)
        if key not in self.raw:
            if default is _REQUIRED:
                raise UsageError(f"missing required parameter {key}=...")
            return default
        return self.raw[key]

    def number(self, key, default=None):
        v = self._get(key, default if default is not None else _REQUIRED)
        return parse_number(v) if isinstance(v, str) else v

    def real(self, key, default=None) -> float:
        v = self.number(key, default)
        if isinstance(v, complex):
            raise UsageError(f"{key} must be real")
        return float(v)

    def integer(self, key, default=None, minimum: int | None = None) -> int:
        v = self.real(key, default)
        if v != int(v):
            raise UsageError(f"{key} must be an integer, got {v}")
        if minimum is not None and v < minimum:
            raise UsageError(f"{key} must be >= {minimum}, got {int(v)}")
        return int(v)

    def numbers(self, key, default=None) -> list:
        v = self._get(key, default if default is not None else _REQUIRED)
        if isinstance(v, str):
            return [parse_number(p) for p in v.split(",") if p]
        return list(v)

    def string(self, key, default=None) -> str:
        return self._get(key, default if default is not None else _REQUIRED)

    def reject_unused(self):
        extra = sorted(set(self.raw) - self.used)
        if extra:
            raise UsageError(f"unknown parameter(s): {', '.join(extra)}")


_REQUIRED = object()


# ---------------------------------------------------------------------------
# eval


def _in_interval(key: str, x: float):
    if not -1 <= x <= 1:
        raise UsageError(f"{key}={x} must lie in [-1, 1]")


def _eval_hermite(p: Params, ctx):
    n = p.integer("n", minimum=0)
    xs = p.numbers("x")
    for x in xs:
        _in_interval("x", x.real)
    return {"n": n, "x": xs}, [float(qpoly.hermite_eval(n, float(x.real), ctx)) for x in xs]


def _eval_ultraspherical(p: Params, ctx):
    n = p.integer("n", minimum=0)
    if "m" in p.raw:
        m = p.integer("m", minimum=1)
        beta, label = ctx.q ** m, {"m": m}
    else:
        beta = p.real("beta")
        label = {"beta": beta}
    if not 0 < beta < 1:
        raise UsageError(f"beta must lie in (0, 1), got {beta}")
    xs = p.numbers("x")
    return {"n": n, **label, "x": xs}, [float(qpoly.ultraspherical_eval(n, beta, float(x.real), ctx)) for x in xs]


def _eval_askey_wilson(p: Params, ctx):
    n = p.integer("n", minimum=0)
    a, b, c, d = (p.real(k) for k in "abcd")
    xs = p.numbers("x")
    for x in xs:
        _in_interval("x", x.real)
    return ({"n": n, "a": a, "b": b, "c": c, "d": d, "x": xs},
            [qpoly.askey_wilson(n, a, b, c, d, float(x.real), ctx) for x in xs])


def _eval_qbessel2(p: Params, ctx):
    nu = p.integer("nu", minimum=0)
    zs = p.numbers("z")
    return {"nu": nu, "z": zs}, [qfuncs.qbessel2(nu, z, ctx) for z in zs]


def _eval_eps_q(p: Params, ctx):
    a, b = p.number("a"), p.number("b")
    xs = p.numbers("x")
    for x in xs:
        _in_interval("x", x.real)
    out = [qfuncs.eps_q_series(float(x.real), a, b, ctx) for x in xs]
    return {"a": a, "b": b, "x": xs, "converged": [bool(r.converged) for r in out]}, [r.value for r in out]


def _eval_e_q(p: Params, ctx):
    zs = p.numbers("z")
    try:
        return {"z": zs}, [qcore.e_q(z, ctx) for z in zs]
    except qcore.PoleError as e:
        raise UsageError(str(e)) from None


def _eval_E_q(p: Params, ctx):
    zs = p.numbers("z")
    return {"z": zs}, [qcore.E_q(z, ctx) for z in zs]


def _eval_psi_n(p: Params, ctx):
    n = p.integer("n", minimum=0)
    a = p.number("a")
    xs = p.numbers("x")
    for x in xs:
        _in_interval("x", x.real)
    return {"n": n, "a": a, "x": xs}, [qfuncs.psi_n(a, float(x.real), n, ctx) for x in xs]


def _eval_weight(p: Params, ctx):
    thetas = p.numbers("theta")
    abcd = tuple(p.real(k, 0.0) for k in "abcd")
    if max(abs(v) for v in abcd) >= 1:
        raise UsageError("weight needs max(|a|,|b|,|c|,|d|) < 1")
    return ({"theta": thetas, "a": abcd[0], "b": abcd[1], "c": abcd[2], "d": abcd[3]},
            [float(qpoly.aw_weight(float(t.real), *abcd, ctx)) for t in thetas])


EVALUATORS: dict[str, Callable] = {
    "hermite": _eval_hermite,
    "ultraspherical": _eval_ultraspherical,
    "askey-wilson": _eval_askey_wilson,
    "qbessel2": _eval_qbessel2,
    "eps-q": _eval_eps_q,
    "e-q": _eval_e_q,
    "E-q": _eval_E_q,
    "psi-n": _eval_psi_n,
    "weight": _eval_weight,
}


def cmd_eval(cfg: RunConfig) -> tuple[int, list[dict]]:
    if cfg.selector not in EVALUATORS:
        raise UsageError(f"eval needs one of: {', '.join(EVALUATORS)}")
    p = Params(cfg.params)
    ctx = cfg.context()
    params, values = EVALUATORS[cfg.selector](p, ctx)
    p.reject_unused()
    record = {"function": cfg.selector, "q": ctx.q, "params": plain(params), "values": plain(values)}
    return 0, [record]


# ---------------------------------------------------------------------------
# verify


def _v_heisenberg(p, ctx):
    n = p.integer("nmax", 10, minimum=1)
    return VerificationReport.merge("heisenberg", [check for check in (
        qops.check_commutator(r, n, ctx) for r in ("heisenberg", "tau_mu", "tau_star_mu", "x_mu"))])


def _v_sl2(p, ctx):
    n = p.integer("basis_max", 3, minimum=1)
    return VerificationReport.merge("sl2", [qops.check_commutator(r, n, ctx)
                                            for r in ("sl2_bracket", "sl2_k_conjugation")])


def _v_hermite_ladders(p, ctx):
    n = p.integer("nmax", 25, minimum=1)
    return VerificationReport.merge("hermite_ladders", [
        qops.check_ladder(name, n, ctx) for name in ("hermite_tau", "hermite_tau_star", "hermite_mu")])


def _v_ultra_ladder(p, ctx):
    return qops.check_ladder("ultraspherical_tau", p.integer("nmax", 12, minimum=1), ctx,
                             m_max=p.integer("m_max", 4, minimum=1))


def _v_psi_ladder(p, ctx):
    return qops.check_ladder("psi_tau", p.integer("nmax", 15, minimum=1), ctx)


def _v_module_actions(p, ctx):
    m_max, span = p.integer("m_max", 4, minimum=1), p.integer("span", 8, minimum=0)
    which = p.string("action", "all")
    actions = qops.ACTIONS if which == "all" else (which,)
    if any(a not in qops.ACTIONS for a in actions):
        raise UsageError(f"action must be 'all' or one of {qops.ACTIONS}")
    return VerificationReport.merge("module_actions", [qops.check_module_action(a, m_max, span, ctx)
                                                       for a in actions], 1e-9)


def _v_gen_func(p, ctx):
    return V.verify_generating_function(
        [float(x.real) for x in p.numbers("x", "-0.9,-0.5,0,0.4,0.8")],
        p.numbers("b", "0.3,0.8,1.5"), p.integer("kmax", 60, minimum=0), ctx)


def _v_gegenbauer(p, ctx):
    return V.verify_gegenbauer_expansion(
        p.integer("ell", 1, minimum=1), [float(x.real) for x in p.numbers("x", "-0.7,0.3,0.9")],
        p.numbers("b", "0.5,0.8,1.5"), p.integer("kmax", 40, minimum=0), ctx)


def _v_y_bessel(p, ctx):
    return V.verify_Y_bessel_recurrence(p.integer("ell", 1, minimum=1), p.number("b", 0.8),
                                        p.integer("kmax", 6, minimum=0), ctx)


def _v_w_recursions(p, ctx):
    return V.verify_w_recursions(p.integer("ell", 1, minimum=1), p.number("b", 0.8),
                                 p.integer("kmax", 6, minimum=0), ctx)


def _v_u_recursion(p, ctx):
    return V.verify_u_recursion(p.number("b", 0.8), p.integer("kmax", 20, minimum=1), ctx)


def _v_q_binomial(p, ctx):
    z = p.number("z", 0.5)
    if not abs(z) < 1:
        raise UsageError("q-binomial needs |z| < 1")
    return qcore.verify_q_binomial(p.number("a", 0.3), z, ctx)


def _v_bessel(p, ctx):
    return VerificationReport.merge("bessel", [
        V.verify_bessel_recurrence(p.integer("nu_max", 25, minimum=1),
                                   p.numbers("z", "0.1,0.5,1,2"), ctx),
        V.verify_bessel_asymptotics(p.integer("nu", 40, minimum=1), p.numbers("z_asym", "0.5,1"), ctx),
    ], 1e-6)


def _v_special_values(p, ctx):
    return VerificationReport.merge("special_values", [V.verify_special_values(ctx),
                                                       V.ultraspherical_zero_report(ctx)], 1e-12)


IDENTITIES: dict[str, Callable] = {
    "heisenberg": _v_heisenberg,
    "sl2": _v_sl2,
    "hermite-ladders": _v_hermite_ladders,
    "ultra-ladder": _v_ultra_ladder,
    "psi-ladder": _v_psi_ladder,
    "module-actions": _v_module_actions,
    "gen-func": _v_gen_func,
    "gegenbauer-expansion": _v_gegenbauer,
    "y-bessel": _v_y_bessel,
    "w-recursions": _v_w_recursions,
    "u-recursion": _v_u_recursion,
    "q-binomial": _v_q_binomial,
    "bessel": _v_bessel,
    "special-values": _v_special_values,
}


def _run_report(fn, cfg: RunConfig) -> tuple[int, list[dict], list[VerificationReport]]:
    p = Params(cfg.params)
    report = fn(p, cfg.context())
    p.reject_unused()
    return (0 if report.passed else 1), [report.to_json_dict()], [report]


def cmd_verify(cfg: RunConfig):
    if cfg.selector not in IDENTITIES:
        raise UsageError(f"verify needs one of: {', '.join(IDENTITIES)}")
    return _run_report(IDENTITIES[cfg.selector], cfg)


def cmd_ortho(cfg: RunConfig):
    def run(p: Params, ctx):
        family = cfg.selector or p.string("family", "hermite")
        if family not in ("hermite", "ultraspherical", "askey-wilson"):
            raise UsageError("ortho family must be hermite, ultraspherical or askey-wilson")
        if family == "hermite":
            params = ()
        elif family == "ultraspherical":
            params = (ctx.q ** p.integer("m", 1, minimum=1),)
        else:
            params = tuple(p.real(k) for k in "abcd")
            if max(abs(v) for v in params) >= 1:
                raise UsageError("Askey-Wilson weight needs max(|a|,|b|,|c|,|d|) < 1")
        return V.verify_orthogonality(family, params, p.integer("nmax", 8, minimum=1), ctx,
                                      quad_nodes=p.integer("nodes", 200, minimum=2))
    return _run_report(run, cfg)


def cmd_limits(cfg: RunConfig):
    def run(p: Params, ctx):
        target = cfg.selector or p.string("target", "hermite")
        if target not in V.LIMIT_TARGETS:
            raise UsageError(f"limits target must be one of {V.LIMIT_TARGETS}")
        q_seq = [float(v.real) for v in p.numbers("q_seq", "0.9,0.99,0.999")]
        extra = {k: _intlike(parse_number(v)) for k, v in p.raw.items() if k not in ("q_seq", "target")}
        for k in extra:
            p.used.add(k)
        try:
            return V.classical_limit_sweep(target, q_seq, ctx, **extra)
        except (ValueError, TypeError) as e:
            raise UsageError(str(e)) from None
    return _run_report(run, cfg)


def cmd_suite(cfg: RunConfig):
    if cfg.params:
        raise UsageError("suite takes no key=value parameters")
    if cfg.tol_exact is not None or cfg.tol_series is not None:
        scale_exact = cfg.tol_exact / 1e-10 if cfg.tol_exact is not None else 1.0
        scale_series = cfg.tol_series / 1e-8 if cfg.tol_series is not None else 1.0
        factor = min(scale_exact, scale_series)
    else:
        factor = 1.0
    if cfg.q is not None:
        cfg.context()  # validate q
    results = acceptance.run_all(cfg.q)
    records, reports, ok = [], [], True
    for r in results:
        rep = r.report
        if factor != 1.0:
            rep = VerificationReport(rep.identity_id, rep.grid, rep.residuals, rep.tolerance * factor, rep.metadata)
        passed = rep.passed and r.in_budget
        ok &= passed
        d = rep.to_json_dict()
        d.update({"criterion": r.criterion.number, "name": r.criterion.name, "passed": passed,
                  "seconds": round(r.seconds, 3), "budget_seconds": r.criterion.budget})
        records.append(d)
        reports.append(rep)
    return (0 if ok else 1), records, reports


HANDLERS = {"eval": cmd_eval, "verify": cmd_verify, "ortho": cmd_ortho, "limits": cmd_limits, "suite": cmd_suite}


# ---------------------------------------------------------------------------
# output


def _csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if records and "function" in records[0]:
        w.writerow(["function", "index", "value_real", "value_imag"])
        for r in records:
            vals = r["values"]
            for i, v in enumerate(vals):
                re_, im_ = v if isinstance(v, list) else (v, 0.0)
                w.writerow([r["function"], i, re_, im_])
        return buf.getvalue()
    keys: list[str] = []
    for r in records:
        for p in r["grid"]:
            for k in p:
                if k not in keys:
                    keys.append(k)
    w.writerow(["identity", *keys, "residual", "tolerance", "passed"])
    for r in records:
        for p, res in zip(r["grid"], r["residuals"]):
            cells = [json.dumps(p[k]) if isinstance(p.get(k), (list, dict)) else p.get(k, "") for k in keys]
            ok = res is not None and res < r["tolerance"]
            w.writerow([r["identity_id"], *cells, "" if res is None else repr(res), r["tolerance"], ok])
    return buf.getvalue()


def _human(records: list[dict], reports: list[VerificationReport]) -> str:
    lines = []
    if records and "function" in records[0]:
        for r in records:
            lines.append(f"{r['function']}({json.dumps(r['params'])}) = {json.dumps(r['values'])}")
        return "\n".join(lines) + "\n"
    for rec, rep in zip(records, reports):
        head = f"criterion {rec['criterion']} " if "criterion" in rec else ""
        verdict = "PASS" if rec["passed"] else "FAIL"
        lines.append(f"[{verdict}] {head}{rep.identity_id}: max residual {rep.max_residual:.3g} "
                     f"(tol {rep.tolerance:.1e}); worst at {json.dumps(plain(rep.worst_point))}")
    return "\n".join(lines) + "\n"


def render(fmt: str, records: list[dict], reports: list[VerificationReport]) -> str:
    if fmt == "json":
        body = records[0] if len(records) == 1 and not (records and "criterion" in records[0]) else records
        return json.dumps(finite_only(plain(body)), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if fmt == "csv":
        return _csv(finite_only(plain(records)))
    return _human(records, reports)


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qortho", description="Evaluate q-special functions and verify identities between them.")
    p.add_argument("--q", type=float, default=None, help="base q in (0, 1); default 0.5 (suite: built-in grids)")
    p.add_argument("--tol-exact", type=float, default=None)
    p.add_argument("--tol-series", type=float, default=None)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None, help="write output to this file (UTF-8)")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("args", nargs="*", help="[SELECTOR] key=value ...")
    return p


def parse_config(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    selector, params = None, {}
    for i, a in enumerate(ns.args):
        if "=" in a:
            k, v = a.split("=", 1)
            if not k:
                raise UsageError(f"bad parameter {a!r}")
            if k == "q":
                ns.q = float(parse_number(v).real)
                continue
            params[k] = v
        elif i == 0:
            selector = a
        else:
            raise UsageError(f"unexpected argument {a!r}; parameters are key=value")
    return RunConfig(ns.command, ns.q, ns.tol_exact, ns.tol_series, ns.format, ns.out, selector, params)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        if cfg.q is not None and not 0 < cfg.q < 1:
            raise UsageError(f"q must lie strictly between 0 and 1, got {cfg.q}")
        for name, tol in (("tol-exact", cfg.tol_exact), ("tol-series", cfg.tol_series)):
            if tol is not None and not tol > 0:
                raise UsageError(f"--{name} must be positive")
        result = HANDLERS[cfg.command](cfg)
        if cfg.command == "eval":
            code, records = result
            reports = []
        else:
            code, records, reports = result
    except UsageError as e:
        print(f"qortho: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as e:
        print(f"qortho: error: {e}", file=sys.stderr)
        return 2
    text = render(cfg.output_format, records, reports)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
