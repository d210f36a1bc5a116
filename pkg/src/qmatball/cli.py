"""Command-line front end.

Subcommands cover the day-to-day questions the library answers: put an
expression in normal form, act by a generator, integrate against the
invariant weight, run verification suites, and inspect the spectrum of
a representation series.  Exit codes: 0 success, 1 verification
failure, 2 usage or parse error.
"""

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .scalars import QScalar
from .algebra import AlgElement
from .series import SeriesConfig, SeriesError, SpectrumGrid
from .spectral import SpectralElement, SpectralKindError
from .representations import rep_model, verify_relations
from .uq import Generator, act, all_generators, verify_module_algebra, verify_uq_relations
from .integrals import (
    DivergentIntegralError,
    h_closed,
    h_compact,
    h_disc,
    h_trace,
    invariance_residual,
)
from .fodc import verify_calculus
from . import exprs
from .exprs import ExprError

_GEN_RE = re.compile(r"^(Kinv|[EFK])([1-9]\d*)$")

SUITES = ("algebra", "action", "relations", "invariance", "fodc", "all")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 1
    series: tuple = None
    alpha: Fraction = Fraction(0)
    vphase: complex = 1 + 0j
    q: float = 0.5
    cutoff: int = 12
    margin: int = 4
    tol: float = 1e-10
    seed: int = 0
    fmt: str = "text"

    def series_config(self):
        series = self.series if self.series is not None else (self.n, 0, 0)
        m, l, k = series
        if m + l + k != self.n:
            raise UsageError(f"series {m},{l},{k} does not sum to n = {self.n}")
        try:
            return SeriesConfig(
                n=self.n, m=m, l=l, k=k, alpha=self.alpha,
                vphase=self.vphase, q=self.q, cutoff=self.cutoff,
            )
        except (ValueError, SeriesError) as e:
            raise UsageError(str(e))


def _run_config(args):
    series = None
    if getattr(args, "series", None):
        parts = args.series.split(",")
        if len(parts) != 3:
            raise UsageError("--series takes three integers m,l,k")
        try:
            series = tuple(int(p) for p in parts)
        except ValueError:
            raise UsageError("--series takes three integers m,l,k")
        if any(p < 0 for p in series):
            raise UsageError("series labels are nonnegative")
    try:
        alpha = Fraction(getattr(args, "alpha", "0"))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read --alpha {args.alpha!r} as a rational")
    try:
        vphase = complex(getattr(args, "vphase", "1"))
    except ValueError:
        raise UsageError(f"cannot read --vphase {args.vphase!r} as a complex number")
    n = getattr(args, "n", None)
    if n is None:
        n = sum(series) if series is not None else 1
    if n < 1:
        raise UsageError("n must be positive")
    if series is not None and sum(series) != n:
        raise UsageError(
            f"series {args.series} does not sum to n = {n}"
        )
    if not 0 < args.q < 1:
        raise UsageError("q must lie strictly between 0 and 1")
    if args.cutoff < 1:
        raise UsageError("cutoff must be positive")
    return RunConfig(
        n=n, series=series, alpha=alpha, vphase=vphase, q=args.q,
        cutoff=args.cutoff, margin=args.margin, tol=args.tol,
        seed=args.seed, fmt=args.format,
    )


def _parse_generator(text, n):
    m = _GEN_RE.match(text)
    if not m:
        raise UsageError(f"cannot read generator {text!r}; expected E1, F2, K1, Kinv1, ...")
    kind, j = m.group(1), int(m.group(2))
    if j > n:
        raise UsageError(f"generator index {j} exceeds n = {n}")
    return Generator(kind, j)


def _emit(rc, payload, text_lines):
    if rc.fmt == "json":
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_normalize(args):
    rc = _run_config(args)
    f = exprs.parse_element(args.expr, rc.n)
    out = exprs.render_element(f)
    _emit(rc, {"n": rc.n, "expr": args.expr, "normal_form": out}, [out])
    return 0


def cmd_act(args):
    rc = _run_config(args)
    gen = _parse_generator(args.gen, rc.n)
    f = exprs.parse_element(args.expr, rc.n)
    out = exprs.render_element(act(gen, f))
    _emit(
        rc,
        {"n": rc.n, "gen": args.gen, "expr": args.expr, "result": out},
        [out],
    )
    return 0


def _value_record(v, q):
    exact = None
    tail = None
    if hasattr(v, "value"):
        exact = None if v.exact is None else str(v.exact)
        tail = v.tail_bound
        v = v.value
    elif hasattr(v, "eval"):
        exact = str(v)
        v = v.eval(q)
    fv = complex(v)
    rec = {"exact": exact, "value": [fv.real, fv.imag]}
    if tail is not None:
        rec["tail_bound"] = tail
    return rec


def _value_text(rec):
    re_, im = rec["value"]
    if abs(im) < 1e-15 * max(1.0, abs(re_)):
        fv = f"{re_:.12g}"
    else:
        fv = f"{re_:.12g}{im:+.12g}j"
    if rec["exact"] is not None:
        return f"{rec['exact']} = {fv}"
    return fv


def cmd_integrate(args):
    rc = _run_config(args)
    cfg = rc.series_config()
    e = exprs.parse_expr(args.expr, cfg)
    if isinstance(e, QScalar):
        e = AlgElement.scalar(rc.n, e)
    payload = {"mode": args.mode, "series": cfg.series_label(), "expr": args.expr}
    try:
        if args.mode == "compact":
            if not isinstance(e, AlgElement):
                raise UsageError("compact mode integrates algebra elements")
            v = h_compact(e)
        else:
            if isinstance(e, AlgElement):
                e = SpectralElement.from_alg(cfg, e)
            if args.mode == "closed":
                v = h_closed(e, tol=min(rc.tol, 1e-12))
            elif args.mode == "trace":
                v = h_trace(e, cutoff=rc.cutoff)
            else:
                v = h_disc(e, tol=min(rc.tol, 1e-12))
    except DivergentIntegralError as exc:
        payload.update({"divergent": True, "detail": str(exc)})
        _emit(rc, payload, [f"divergent: {exc}"])
        return 0
    payload.update({"divergent": False, "result": _value_record(v, cfg.q)})
    _emit(rc, payload, [f"h[{args.mode}] = {_value_text(payload['result'])}"])
    return 0


def cmd_spectrum(args):
    rc = _run_config(args)
    cfg = rc.series_config()
    grid = SpectrumGrid(cfg)
    model = rep_model(cfg)
    base = []
    for j in range(1, cfg.n + 1):
        w = cfg.window(j)
        base.append(0 if w is None else w[0] if cfg.block(j) != "nat" else 1)
    directions = []
    lines = [f"series ({cfg.m},{cfg.l},{cfg.k}), n = {cfg.n}, cutoff {cfg.cutoff}: "
             f"basis dimension {model.size}"]
    for j in range(1, cfg.n + 1):
        block = cfg.block(j)
        sigma = grid.sigma_description(j)
        w = cfg.window(j)
        eig = []
        if w is not None:
            lo, hi = w
            if block == "zline":
                shown = range(max(lo, -3), min(hi, 4) + 1)
            else:
                shown = range(lo, min(hi, lo + 8) + 1)
            for v in shown:
                idx = list(base)
                idx[j - 1] = v
                key = grid.coord_key(j, tuple(idx))
                if key == 0:
                    eig.append({"index": v, "exact": "0", "value": 0.0})
                else:
                    sign, e = key
                    s = f"-q^({e})" if sign < 0 else f"q^({e})"
                    eig.append(
                        {"index": v, "exact": s, "value": grid.coord_float(j, tuple(idx))}
                    )
        else:
            eig.append({"index": 0, "exact": "0", "value": 0.0})
        directions.append({"direction": j, "block": block, "sigma": sigma,
                           "window": list(w) if w else None, "eigenvalues": eig})
        lines.append(f"  y_{j} [{block}]: sigma = {sigma}")
        shown = ", ".join(f"{r['exact']} = {r['value']:.6g}" for r in eig)
        lines.append(f"       Q_{j}-eigenvalues along direction {j}: {shown}")
    payload = {"series": cfg.series_label(), "n": cfg.n, "cutoff": cfg.cutoff,
               "dimension": model.size, "directions": directions}
    _emit(rc, payload, lines)
    return 0


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _rand_scalar(rng):
    c = QScalar.rational(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    return c + QScalar.q_power(Fraction(rng.randint(-3, 3), rng.choice((1, 2))))


def _rand_element(rng, n, terms=3, deg=2):
    out = AlgElement.unit(n).scale(QScalar.zero())
    for _ in range(terms):
        f = AlgElement.unit(n).scale(_rand_scalar(rng))
        for _ in range(rng.randint(0, deg)):
            j = rng.randint(1, n)
            g = rng.choice(
                (AlgElement.z(n, j), AlgElement.zstar(n, j), AlgElement.Q(n, j))
            )
            f = f * g
        out = out + f
    return out


def _exact_record(suite, check, ok):
    return {"suite": suite, "check": check, "ok": bool(ok), "residual": None}


def _numeric_record(suite, check, residual, tol):
    return {"suite": suite, "check": check, "ok": residual <= tol,
            "residual": float(residual)}


def _suite_algebra(rc):
    rng = random.Random(rc.seed)
    n = rc.n
    records = []
    ok_assoc = ok_star = ok_round = True
    for _ in range(6):
        f, g, h = (_rand_element(rng, n) for _ in range(3))
        if (f * g) * h != f * (g * h):
            ok_assoc = False
        if (f * g).star() != g.star() * f.star():
            ok_star = False
        if exprs.parse_element(exprs.render_element(f), n) != f:
            ok_round = False
    records.append(_exact_record("algebra", "associativity on random elements", ok_assoc))
    records.append(_exact_record("algebra", "star anti-multiplicativity", ok_star))
    records.append(_exact_record("algebra", "render/parse round trip", ok_round))
    if n == 1:
        z = AlgElement.z(1, 1)
        zs = AlgElement.zstar(1, 1)
        Q1 = AlgElement.Q(1, 1)
        one = AlgElement.unit(1)
        ok_poch = True
        for m in range(1, 4):
            lhs = one
            rhs = one
            for _ in range(m):
                lhs = lhs * z
            for _ in range(m):
                lhs = lhs * zs
            for i in range(m):
                rhs = rhs * (one - Q1.scale(QScalar.q_power(-2 * i)))
            ok_poch = ok_poch and lhs == rhs
        records.append(_exact_record("algebra", "z^m z*^m Pochhammer factorization", ok_poch))
    return records


def _suite_action(rc):
    rng = random.Random(rc.seed + 1)
    n = rc.n
    records = []
    ok_by_axiom = {}
    for _ in range(3):
        f, g = _rand_element(rng, n, terms=2), _rand_element(rng, n, terms=2)
        for r in verify_module_algebra(f, g):
            key = f"module algebra: {r['axiom']}"
            ok_by_axiom[key] = ok_by_axiom.get(key, True) and r["ok"]
    samples = [_rand_element(rng, n, terms=2) for _ in range(3)]
    for r in verify_uq_relations(samples):
        key = f"defining relation: {r['relation']}"
        ok_by_axiom[key] = ok_by_axiom.get(key, True) and r["ok"]
    for key in sorted(ok_by_axiom):
        records.append(_exact_record("action", key, ok_by_axiom[key]))
    return records


def _suite_relations(rc):
    cfg = rc.series_config()
    return [
        _numeric_record("relations", r["relation"], r["residual"], rc.tol)
        for r in verify_relations(cfg, margin=rc.margin)
    ]


def _finite_sample(rng, cfg):
    idx = []
    for j in range(1, cfg.n + 1):
        b = cfg.block(j)
        if b == "top":
            idx.append(rng.randint(0, 4))
        elif b == "nat":
            idx.append(rng.randint(1, 4))
        elif b == "zline":
            idx.append(rng.randint(-3, 3))
        else:
            idx.append(0)
    e = SpectralElement.delta(cfg, tuple(idx))
    a = rng.randint(0, 1)
    for _ in range(a):
        e = SpectralElement.z(cfg, 1) * e
        e = e * SpectralElement.zstar(cfg, 1)
    return e


def _suite_invariance(rc):
    cfg = rc.series_config()
    if cfg.l:
        return [_exact_record("invariance", "skipped: weight needs l = 0", True)]
    rng = random.Random(rc.seed + 2)
    records = []
    samples = [_finite_sample(rng, cfg) for _ in range(2)]
    for gen in all_generators(cfg.n):
        ok = True
        for f in samples:
            r = invariance_residual(gen, f, mode="exact")
            ok = ok and r["exact_zero"]
        records.append(_exact_record("invariance", f"h({gen} > f) = eps({gen}) h(f)", ok))
    worst = 0.0
    for f in samples[:1]:
        for gen in (Generator("E", 1), Generator("F", 1), Generator("K", 1)):
            r = invariance_residual(gen, f, mode="trace", cutoff=rc.cutoff, q=rc.q)
            worst = max(worst, r["abs"])
    records.append(_numeric_record("invariance", "trace-mode cross-check", worst, rc.tol))
    return records


def _suite_fodc(rc):
    cfg = rc.series_config()
    if cfg.n != 1 or cfg.l != 0:
        return [_exact_record("fodc", "skipped: calculus is built for disc series", True)]
    return [
        _numeric_record("fodc", r["relation"], r["residual"], rc.tol)
        for r in verify_calculus(cfg, margin=rc.margin, seed=rc.seed + 3)
    ]


def _corrupt_record(rc):
    """Negative control: verify a deliberately wrong identity."""
    n = rc.n
    z = AlgElement.z(n, 1)
    zs = AlgElement.zstar(n, 1)
    wrong = AlgElement.Q(n, 2) - AlgElement.Q(n, 1).scale(QScalar.q_power(2))
    residual = z * zs - wrong
    return _exact_record(
        "control", "corrupted relation z1 z1* = Q2 - q^2 Q1", residual.is_zero()
    )


def cmd_verify(args):
    rc = _run_config(args)
    runners = {
        "algebra": (_suite_algebra,),
        "action": (_suite_action,),
        "relations": (_suite_relations,),
        "invariance": (_suite_invariance,),
        "fodc": (_suite_fodc,),
        "all": (_suite_algebra, _suite_action, _suite_relations,
                _suite_invariance, _suite_fodc),
    }[args.suite]
    records = []
    for run in runners:
        records.extend(run(rc))
    if args.corrupt:
        records.append(_corrupt_record(rc))
    lines = []
    for r in records:
        status = "PASS" if r["ok"] else "FAIL"
        if r["residual"] is None:
            lines.append(f"{status} {r['suite']}: {r['check']} [exact]")
        else:
            lines.append(
                f"{status} {r['suite']}: {r['check']} "
                f"({r['residual']:.3e} vs tol {rc.tol:g})"
            )
    n_ok = sum(1 for r in records if r["ok"])
    lines.append(f"{n_ok}/{len(records)} checks passed")
    payload = {"suite": args.suite, "tol": rc.tol, "passed": n_ok,
               "total": len(records), "ok": n_ok == len(records), "records": records}
    _emit(rc, payload, lines)
    return 0 if n_ok == len(records) else 1


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--n", type=int, default=None, help="number of z generators")
    p.add_argument("--series", default=None, metavar="m,l,k",
                   help="series label (default n,0,0)")
    p.add_argument("--alpha", default="0", help="zline weight exponent offset (rational)")
    p.add_argument("--vphase", default="1", help="phase parameter of the v block")
    p.add_argument("--q", type=float, default=0.5, help="deformation parameter in (0,1)")
    p.add_argument("--cutoff", type=int, default=12, help="basis truncation N")
    p.add_argument("--margin", type=int, default=4, help="interior margin for residuals")
    p.add_argument("--tol", type=float, default=1e-10, help="numeric tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--format", choices=("json", "text"), default="text")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qmatball",
        description="Quantum matrix ball: normal forms, module actions, "
                    "invariant integrals, spectra, verification suites.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="print the normal form of an expression")
    p.add_argument("expr", help="expression, e.g. 'z1*.z1' or 'Q1*Q2 - Q2*Q1'")
    _add_common(p)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("act", help="act by a quantized enveloping-algebra generator")
    p.add_argument("--gen", required=True, help="generator, e.g. E1, F2, K1, Kinv1")
    p.add_argument("--expr", required=True, help="element the generator acts on")
    _add_common(p)
    p.set_defaults(fn=cmd_act)

    p = sub.add_parser("integrate", help="invariant integral of an expression")
    p.add_argument("--mode", choices=("closed", "trace", "disc", "compact"),
                   default="closed")
    p.add_argument("--expr", required=True,
                   help="element; delta(...) and poly(...) give spectral coefficients")
    _add_common(p)
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("spectrum", help="print the spectral grid and Q-eigenvalues")
    _add_common(p)
    p.set_defaults(fn=cmd_spectrum)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.fn(args)
    except (UsageError, ExprError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SeriesError, SpectralKindError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
