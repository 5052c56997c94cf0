"""Command-line front end: ``csq <command> [options]``.

Exit codes: 0 success, 2 bad input, 3 numerical precondition unmet,
4 module error (including failed invariants in ``verify``).
"""
from __future__ import annotations

import argparse
import ast
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

import numpy as np

from . import complex_cs as cc
from . import io as cio
from . import numerics, photon_stats, real_frame, susy
from .errors import CSQError, NumericalPreconditionError
from .poly import UnivariatePoly

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_MODULE = 0, 2, 3, 4


class InputError(Exception):
    """Bad user input; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    s: int = 1
    N: int = 1
    D: int = cc.DEFAULT_D
    lmin: float = 0.1
    lmax: float = 10.0
    steps: int = 100
    tmin: float = -5.0
    tmax: float = 5.0
    tsteps: int = 201
    nmax: int = -1
    L: float = 12.0
    h: float = 0.01
    mu: float = 0.0
    levels: int = 8
    out: str = "-"
    format: str = "csv"
    series_tol: float = cc.SERIES_TOL
    eig_tol: float = numerics.EIG_TOL
    quad_tol: float = numerics.QUAD_TOL
    tail_tol: float = photon_stats.TAIL_TOL

    def validate(self) -> "RunConfig":
        if self.s < 0:
            raise InputError("s must be >= 0")
        if self.N < 0:
            raise InputError("N must be >= 0")
        if self.D < 2:
            raise InputError("D must be >= 2")
        if self.steps < 1 or self.tsteps < 2:
            raise InputError("steps must be >= 1 and tsteps >= 2")
        if self.lmin < 0 or self.lmax < self.lmin:
            raise InputError("lambda range must satisfy 0 <= lmin <= lmax (lambda = |z|^2 >= 0)")
        if self.tmax < self.tmin:
            raise InputError("tmax must be >= tmin")
        if self.format not in ("csv", "json"):
            raise InputError("format must be csv or json")
        if not 0 < self.L <= susy.L_MAX or not 0 < self.h < self.L:
            raise InputError(f"need 0 < h < L <= {susy.L_MAX}")
        if self.levels < 1:
            raise InputError("levels must be >= 1")
        for name in ("series_tol", "eig_tol", "quad_tol", "tail_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        return self

    def dump(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in fields(self))


_FIELD_TYPES = {f.name: type(f.default) for f in fields(RunConfig)}


def _coerce(key: str, value: str):
    typ = _FIELD_TYPES[key]
    try:
        return typ(value) if typ is not int else int(value)
    except ValueError as exc:
        raise InputError(f"config value {key} = {value!r} is not a valid {typ.__name__}") from exc


def read_config_file(path: str) -> dict:
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        key = "lmin" if key == "lambda_min" else "lmax" if key == "lambda_max" else key
        if key not in _FIELD_TYPES:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


# ---------------------------------------------------------------------------
# observable parsing
# ---------------------------------------------------------------------------

_FUNCS = {"sin": np.sin, "cos": np.cos, "tanh": np.tanh, "arctan": np.arctan, "exp": np.exp}


def _const(value) -> Fraction:
    return Fraction(repr(value)) if isinstance(value, float) else Fraction(value)


def _to_poly(node, var: str):
    """Exact polynomial for ``node`` or ``None`` if it is not a polynomial."""
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return UnivariatePoly([_const(node.value)])
    if isinstance(node, ast.Name) and node.id == var:
        return UnivariatePoly.x()
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p = _to_poly(node.operand, var)
        return None if p is None else (p * UnivariatePoly([-1]) if isinstance(node.op, ast.USub) else p)
    if isinstance(node, ast.BinOp):
        a, b = _to_poly(node.left, var), _to_poly(node.right, var)
        if a is None or b is None:
            return None
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div) and b.degree == 0 and b.coeffs[0] != 0:
            return a * UnivariatePoly([1 / b.coeffs[0]])
        if isinstance(node.op, ast.Pow) and b.degree <= 0:
            e = b.coeffs[0] if b.coeffs else Fraction(0)
            if e.denominator == 1 and 0 <= e <= 64:
                return a ** int(e)
    return None


def _to_callable(node, var: str):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        c = float(node.value)
        return lambda x: np.full_like(x, c)
    if isinstance(node, ast.Name) and node.id == var:
        return lambda x: x
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        g = _to_callable(node.operand, var)
        return (lambda x: -g(x)) if isinstance(node.op, ast.USub) else g
    if isinstance(node, ast.BinOp):
        ops = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide, ast.Pow: np.power}
        op = ops.get(type(node.op))
        if op is not None:
            a, b = _to_callable(node.left, var), _to_callable(node.right, var)
            return lambda x: op(a(x), b(x))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and len(node.args) == 1 and not node.keywords):
        fn, g = _FUNCS[node.func.id], _to_callable(node.args[0], var)
        return lambda x: fn(g(x))
    raise InputError(f"unsupported observable element: {ast.dump(node)[:60]}")


def parse_observable(spec: str, var: str = "x"):
    """``"x^4 - 3*x/2"`` -> exact :class:`UnivariatePoly`; ``"tanh(x)"`` -> numpy callable."""
    try:
        tree = ast.parse(spec.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse observable {spec!r}") from exc
    poly = _to_poly(tree.body, var)
    if poly is not None:
        return poly
    return _to_callable(tree.body, var)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _lam_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.lmin, cfg.lmax, cfg.steps + 1)


def cmd_dist(cfg: RunConfig, args, out):
    if args.lam < 0:
        raise InputError("lambda must be >= 0")
    d = photon_stats.distribution(cfg.s, args.lam, None if cfg.nmax < 0 else cfg.nmax, cfg.tail_tol)
    if cfg.nmax >= 0:
        d = photon_stats.DistributionTable(d.s, d.lam, d.n[: cfg.nmax + 1], d.p[: cfg.nmax + 1],
                                           d.tail_mass, d.mean, d.variance)
    out(cio.table_text(["n", "p"], d.rows, cfg.format))
    maxima = d.local_maxima()
    return f"relative maxima at n = {', '.join(map(str, maxima))}; tail mass {d.tail_mass!r}"


def cmd_mandel(cfg: RunConfig, args, out):
    lams = _lam_grid(cfg)
    if lams[0] == 0:
        raise InputError("lmin must be > 0: the Mandel parameter is undefined at lambda = 0")
    qs = photon_stats.mandel_sweep(cfg.s, lams)
    out(cio.table_text(["lambda", "q"], zip(lams, qs), cfg.format))
    if args.find_root:
        root = photon_stats.transition_point(cfg.s, (cfg.lmin, cfg.lmax), scan=cfg.steps)
        return f"root {root!r}"
    return None


def cmd_lower_symbol(cfg: RunConfig, args, out):
    ts = np.linspace(cfg.tmin, cfg.tmax, cfg.tsteps)
    if args.mode == "real":
        f = parse_observable(args.f, "x")
        check = real_frame.lower_symbol(cfg.N, f, ts)
        classical = np.array([float(f(float(t))) for t in ts]) if isinstance(f, UnivariatePoly) else f(ts)
        out(cio.table_text(["t", "classical", "check"], zip(ts, classical, check), cfg.format))
        return None
    if args.f not in ("q", "p"):
        raise InputError("complex mode supports --f q or --f p")
    sc = cc.SectorConfig(cfg.s, cfg.D, cfg.series_tol)
    rows = []
    for t in ts:
        # q = sqrt(2) Re z, p = sqrt(2) Im z: move along the matching axis
        z = complex(t / math.sqrt(2), 0.0) if args.f == "q" else complex(0.0, t / math.sqrt(2))
        ls = cc.lower_symbols(sc, z)
        val = ls.q_matrix if args.f == "q" else ls.p_matrix
        rows.append((t, t, val, val / t if t != 0 else float("nan")))
    out(cio.table_text(["t", "classical", "check", "ratio"], rows, cfg.format))
    return None


def _complex_ops(cfg: RunConfig):
    sc = cc.SectorConfig(cfg.s, cfg.D, cfg.series_tol)
    a, ad = cc.ladder_operators(sc)
    q, p = cc.position_momentum(sc)
    h_cs, h_ans = cc.hamiltonians(sc)
    return {"a": a, "a_dagger": ad, "q": q, "p": p, "h_cs": h_cs, "h_ansatz": h_ans}


def cmd_operators(cfg: RunConfig, args, out):
    if args.N is not None:
        A = real_frame.RealOperator(real_frame.position_matrix(cfg.N), "x", "tridiagonal")
        body = {"x": A.to_dict()}
    else:
        body = {k: v.to_dict() for k, v in _complex_ops(cfg).items()}
    out(cio.json_text(body))
    return None


def cmd_spectrum(cfg: RunConfig, args, out):
    if args.N is not None:
        res = real_frame.position_spectrum(cfg.N)
        ref = real_frame.hermite_roots(cfg.N + 1)
        rows = [(k, e, r, True) for k, (e, r) in enumerate(zip(res.eigenvalues, ref))]
    else:
        h_ans = cc.hamiltonians(cc.SectorConfig(cfg.s, cfg.D, cfg.series_tol))[1]
        # interior block 0..D-2; levels inside the guard band are flagged
        ev = cc.interior_spectrum(h_ans, guard=1, tol=cfg.eig_tol)
        ref = cc.ansatz_levels(cfg.s, len(ev))
        rows = [(k, e, r, k <= cfg.D - 5) for k, (e, r) in enumerate(zip(ev, ref))]
    out(cio.table_text(["k", "eigenvalue", "reference", "interior"], rows, cfg.format))
    return None


def cmd_susy(cfg: RunConfig, args, out):
    rep = susy.identify_with_H_ansatz(cfg.s, cfg.levels, cfg.L, cfg.h, cfg.mu)
    out(susy.spectrum_report_json(rep) + "\n")
    if args.seed_csv:
        seed = susy.seed_solution(rep["epsilon"], cfg.mu, cfg.L, cfg.h)
        with open(args.seed_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(seed.to_csv())
    return f"max level difference {rep['max_abs_diff']:.3e} ({'match' if rep['match'] else 'MISMATCH'})"


def cmd_verify(cfg: RunConfig, args, out):
    from . import checks

    results = checks.run_all(args.module or None)
    lines = [f"{'PASS' if r.passed else 'FAIL'} [{r.module}] {r.name}: {r.detail}\n" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} invariants hold\n")
    out("".join(lines))
    if failed:
        raise _VerifyFailed(f"{failed} invariant(s) failed")
    return None


class _VerifyFailed(Exception):
    pass


_MODULE_OF = {
    "dist": "photon_stats",
    "mandel": "photon_stats",
    "lower-symbol": "real_frame/complex_cs",
    "operators": "complex_cs/real_frame",
    "spectrum": "complex_cs/real_frame",
    "susy": "susy",
    "verify": "checks",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared settings (override config file)")
    g.add_argument("--config", help="key = value config file (default: $CSQ_CONFIG)")
    g.add_argument("--out", help="output file, '-' for stdout")
    g.add_argument("--format", choices=["csv", "json"])
    g.add_argument("--series-tol", dest="series_tol", type=float)
    g.add_argument("--eig-tol", dest="eig_tol", type=float)
    g.add_argument("--quad-tol", dest="quad_tol", type=float)
    g.add_argument("--tail-tol", dest="tail_tol", type=float)

    p = argparse.ArgumentParser(prog="csq", description="Coherent-state quantization with Hermite polynomials.")
    p.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")
    sub = p.add_subparsers(dest="command")

    d = sub.add_parser("dist", parents=[common], help="number distribution P_s(n; lambda)")
    d.add_argument("--s", type=int)
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    d.add_argument("--nmax", type=int)

    m = sub.add_parser("mandel", parents=[common], help="Mandel parameter sweep")
    m.add_argument("--s", type=int)
    m.add_argument("--lmin", type=float)
    m.add_argument("--lmax", type=float)
    m.add_argument("--steps", type=int)
    m.add_argument("--find-root", action="store_true")

    ls = sub.add_parser("lower-symbol", parents=[common], help="lower-symbol curve")
    ls.add_argument("--mode", choices=["real", "complex"], required=True)
    ls.add_argument("--N", type=int)
    ls.add_argument("--s", type=int)
    ls.add_argument("--D", type=int)
    ls.add_argument("--f", required=True, help="real: polynomial in x or sin/cos/tanh/arctan/exp; complex: q or p")
    ls.add_argument("--tmin", type=float)
    ls.add_argument("--tmax", type=float)
    ls.add_argument("--steps", dest="tsteps", type=int)

    for name, hlp in (("operators", "operator matrices as JSON"), ("spectrum", "spectrum table")):
        o = sub.add_parser(name, parents=[common], help=hlp)
        o.add_argument("--s", type=int)
        o.add_argument("--D", type=int)
        o.add_argument("--N", type=int, help="real-line frame dimension N+1 (instead of --s/--D)")

    su = sub.add_parser("susy", parents=[common], help="partner-Hamiltonian comparison report")
    su.add_argument("--s", type=int)
    su.add_argument("--mu", type=float)
    su.add_argument("--L", type=float)
    su.add_argument("--h", type=float)
    su.add_argument("--levels", type=int)
    su.add_argument("--seed-csv", dest="seed_csv", help="also write x,u,V columns here")

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--module", action="append", help="restrict to a module (repeatable)")
    return p


def resolve_config(args) -> RunConfig:
    values = {}
    path = getattr(args, "config", None) or os.environ.get("CSQ_CONFIG")
    if path:
        values.update(read_config_file(path))
    for key in _FIELD_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return replace(RunConfig(), **values).validate()


def _emit(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd = args.command
    try:
        cfg = resolve_config(args)
        if args.show_config or cmd is None:
            sys.stdout.write(cfg.dump())
            return EXIT_OK
        chunks = []
        try:
            summary = _COMMANDS[cmd](cfg, args, chunks.append)
        finally:
            # whatever was produced before a failure is still written
            if chunks:
                _emit(cfg.out, "".join(chunks))
        if summary:
            # the root goes to stdout; other summaries are diagnostics
            (sys.stdout if summary.startswith("root") else sys.stderr).write(summary + "\n")
        return EXIT_OK
    except InputError as exc:
        sys.stderr.write(f"csq: bad input: {exc}\n")
        return EXIT_INPUT
    except NumericalPreconditionError as exc:
        sys.stderr.write(f"csq: numerical precondition unmet in {_MODULE_OF.get(cmd, 'csq')}: {exc}\n")
        return EXIT_PRECONDITION
    except ValueError as exc:
        sys.stderr.write(f"csq: bad input ({_MODULE_OF.get(cmd, 'csq')}): {exc}\n")
        return EXIT_INPUT
    except _VerifyFailed as exc:
        sys.stderr.write(f"csq: verify: {exc}\n")
        return EXIT_MODULE
    except (CSQError, ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"csq: error in {_MODULE_OF.get(cmd, 'csq')}: {type(exc).__name__}: {exc}\n")
        return EXIT_MODULE


_COMMANDS = {
    "dist": cmd_dist,
    "mandel": cmd_mandel,
    "lower-symbol": cmd_lower_symbol,
    "operators": cmd_operators,
    "spectrum": cmd_spectrum,
    "susy": cmd_susy,
    "verify": cmd_verify,
}


if __name__ == "__main__":
    sys.exit(main())
