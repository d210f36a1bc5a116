"""Surface syntax for algebra elements: tokenizer, Pratt parser, renderer.

The star is contextual.  Immediately after a generator name, `*` is a
postfix adjoint unless the next non-space character starts an operand
(letter, digit, or opening parenthesis), in which case it multiplies:
`z1*` and `z1*.z1` contain adjoints, `z2*z1` is a plain product.  `.`
always multiplies; the renderer uses it right after an adjoint so its own
output re-parses, and parse(render(f)) returns f for every element.
"""

import re
import string
from fractions import Fraction

from .scalars import QScalar
from .algebra import AlgElement
from .series import SpectrumGrid
from .spectral import ExactScalar, SpectralElement, SpectralFn


class ExprError(ValueError):
    pass


_ZNAME = re.compile(r"^z([1-9]\d*)$")
_QNAME = re.compile(r"^Q([1-9]\d*)$")
_OPERAND_START = set(string.ascii_letters + string.digits + "(")
_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, ".": 20, "^": 30}
_BINOP = {"+": "add", "-": "sub", "*": "mul", ".": "mul", "/": "div"}


def tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("num", Fraction(int(text[i:j])), i))
            i = j
        elif ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            toks.append(("name", text[i:j], i))
            i = j
        elif ch == "*":
            k = i + 1
            while k < n and text[k].isspace():
                k += 1
            after_gen = toks and toks[-1][0] == "name" and _ZNAME.match(toks[-1][1])
            if after_gen and (k >= n or text[k] not in _OPERAND_START):
                toks.append(("adj", "*", i))
            else:
                toks.append(("op", "*", i))
            i += 1
        elif ch in "+-/.^(),":
            toks.append(("op", ch, i))
            i += 1
        else:
            raise ExprError(f"unexpected character {ch!r} at position {i}")
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, val):
        kind, v, pos = self.advance()
        if kind != "op" or v != val:
            raise ExprError(f"expected {val!r} at position {pos}")

    def parse(self, rbp=0):
        node = self.nud()
        while True:
            kind, val, _ = self.peek()
            if kind == "adj":
                self.advance()
                node = ("star", node)
                continue
            if kind != "op" or val not in _LBP or _LBP[val] <= rbp:
                return node
            self.advance()
            if val == "^":
                node = ("pow", node, self.parse(_LBP["^"] - 1))
            else:
                node = (_BINOP[val], node, self.parse(_LBP[val]))

    def nud(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if val in ("delta", "poly") and self.peek()[:2] == ("op", "("):
                self.advance()
                args = []
                if self.peek()[:2] != ("op", ")"):
                    args.append(self.parse(0))
                    while self.peek()[:2] == ("op", ","):
                        self.advance()
                        args.append(self.parse(0))
                self.expect(")")
                return ("call", val, tuple(args))
            return ("name", val)
        if kind == "op" and val == "(":
            node = self.parse(0)
            self.expect(")")
            return node
        if kind == "op" and val == "-":
            return ("neg", self.parse(25))
        if kind == "op" and val == "+":
            return self.parse(25)
        raise ExprError(f"unexpected token at position {pos}")


def parse(text):
    p = _Parser(tokenize(text))
    node = p.parse(0)
    if p.peek()[0] != "end":
        raise ExprError(f"trailing input at position {p.peek()[2]}")
    return node


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _level(v):
    if isinstance(v, QScalar):
        return 0
    if isinstance(v, AlgElement):
        return 1
    return 2


def _raise_to(v, lvl, n, cfg):
    while _level(v) < lvl:
        if isinstance(v, QScalar):
            if n is None:
                raise ExprError("generators need an algebra size")
            v = AlgElement.scalar(n, v)
        else:
            v = SpectralElement.from_alg(cfg, v)
    return v


def _as_rational(v):
    if isinstance(v, QScalar):
        if not v.num:
            return Fraction(0)
        if set(v.num) == {0} and set(v.den) == {0}:
            nre, nim = v.num[0]
            dre, dim = v.den[0]
            if nim == 0 and dim == 0:
                return Fraction(nre) / Fraction(dre)
    raise ExprError("expected a rational constant")


def _as_int(v):
    f = _as_rational(v)
    if f.denominator != 1:
        raise ExprError("expected an integer")
    return int(f)


def _eval(node, n, cfg):
    kind = node[0]
    if kind == "num":
        return QScalar.rational(node[1])
    if kind == "name":
        val = node[1]
        if val == "q":
            return QScalar.q_power(1)
        if val == "i":
            return QScalar.i_unit()
        m = _ZNAME.match(val)
        if m:
            if n is None:
                raise ExprError("generators need an algebra size")
            idx = int(m.group(1))
            if not 1 <= idx <= n:
                raise ExprError(f"generator {val} is out of range for n = {n}")
            return AlgElement.z(n, idx)
        m = _QNAME.match(val)
        if m:
            if n is None:
                raise ExprError("generators need an algebra size")
            idx = int(m.group(1))
            if not 1 <= idx <= n:
                raise ExprError(f"{val} is out of range for n = {n}")
            return AlgElement.Q(n, idx)
        raise ExprError(f"unknown name {val!r}")
    if kind == "call":
        fname, args = node[1], node[2]
        if cfg is None:
            raise ExprError(f"{fname}(...) needs a series configuration")
        if fname == "delta":
            ints = tuple(_as_int(_eval(a, n, cfg)) for a in args)
            if len(ints) != cfg.n:
                raise ExprError(f"delta takes {cfg.n} indices for this series")
            return SpectralElement.delta(cfg, ints)
        arg = [_eval(a, n, cfg) for a in args]
        if len(arg) != 1 or not isinstance(arg[0], (QScalar, AlgElement)):
            raise ExprError("poly takes one polynomial in the Q generators")
        e = _raise_to(arg[0], 1, n, cfg)
        zero = (0,) * cfg.n
        if any(key != (zero, zero) for key in e.terms):
            raise ExprError("poly takes one polynomial in the Q generators")
        qp = e.terms.get((zero, zero), {})
        return SpectralElement.middle(cfg, SpectralFn.poly(dict(qp)))
    if kind == "star":
        v = _eval(node[1], n, cfg)
        return v.conj() if isinstance(v, QScalar) else v.star()
    if kind == "neg":
        return -_eval(node[1], n, cfg)
    if kind == "pow":
        if node[1] == ("name", "q"):
            f = _as_rational(_eval(node[2], None, None))
            if f.denominator in (1, 2):
                return QScalar.q_power(f)
            raise ExprError("powers of q must be half-integers")
        base = _eval(node[1], n, cfg)
        k = _as_int(_eval(node[2], None, None))
        if isinstance(base, QScalar):
            return base ** k
        if k < 0:
            raise ExprError("negative powers need a scalar base")
        out = _raise_to(QScalar.one(), _level(base), n, cfg)
        for _ in range(k):
            out = out * base
        return out
    a = _eval(node[1], n, cfg)
    b = _eval(node[2], n, cfg)
    if kind == "div":
        if not isinstance(b, QScalar) or b.is_zero():
            raise ExprError("division needs a nonzero scalar divisor")
        return a * b.invert() if isinstance(a, QScalar) else a.scale(b.invert())
    lvl = max(_level(a), _level(b))
    if kind == "mul" and lvl > 0:
        if isinstance(a, QScalar):
            return _raise_to(b, lvl, n, cfg).scale(a)
        if isinstance(b, QScalar):
            return _raise_to(a, lvl, n, cfg).scale(b)
    a = _raise_to(a, lvl, n, cfg)
    b = _raise_to(b, lvl, n, cfg)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    return a * b


def eval_scalar(ast):
    v = _eval(ast, None, None)
    if not isinstance(v, QScalar):
        raise ExprError("expected a scalar expression")
    return v


def parse_scalar(text):
    return eval_scalar(parse(text))


def eval_element(ast, n):
    v = _eval(ast, n, None)
    if isinstance(v, QScalar):
        return AlgElement.scalar(n, v)
    if not isinstance(v, AlgElement):
        raise ExprError("spectral coefficients are not allowed here")
    return v


def parse_element(text, n):
    return eval_element(parse(text), n)


def eval_expr(ast, cfg):
    """Evaluate with spectral promotion; returns the lowest level reached."""
    return _eval(ast, cfg.n, cfg)


def parse_expr(text, cfg):
    return eval_expr(parse(text), cfg)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _scalar_split(c):
    s = str(c)
    if s.startswith("-") or s.startswith("(-"):
        m = str(-c)
        if not (m.startswith("-") or m.startswith("(-")):
            return True, m
    return False, s


def _pow_str(base, k):
    return base if k == 1 else f"{base}^{k}"


def _paren_group(s):
    if not (s.startswith("(") and s.endswith(")")):
        return False
    depth = 0
    for j, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return j == len(s) - 1
    return False


def _factor_chain(cs, factors):
    if not factors:
        return cs
    fstr = factors[0]
    for f in factors[1:]:
        fstr += ("." if fstr.endswith("*") else "*") + f
    if cs == "1":
        return fstr
    if " " in cs:
        cs = f"({cs})"
    return f"{cs}*{fstr}"


def _term_chunks(I, J, p):
    chunks = []
    for e in sorted(p):
        neg, cs = _scalar_split(p[e])
        factors = []
        for j, k in enumerate(I):
            if k:
                factors.append(_pow_str(f"z{j + 1}", k))
        for j, k in enumerate(e):
            if k:
                factors.append(_pow_str(f"Q{j + 1}", k))
        for j, k in enumerate(J):
            if k:
                factors.append(_pow_str(f"z{j + 1}*", k))
        body = _factor_chain(cs, factors)
        if neg and not factors and " " in body and not _paren_group(body):
            body = f"({body})"
        chunks.append((neg, body))
    return chunks


def _join_chunks(chunks):
    if not chunks:
        return "0"
    neg0, head = chunks[0]
    out = [f"-{head}" if neg0 else head]
    for neg, body in chunks[1:]:
        out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def render_element(elem):
    chunks = []
    for (I, J) in sorted(elem.terms):
        chunks.extend(_term_chunks(I, J, elem.terms[(I, J)]))
    return _join_chunks(chunks)


def render_spectral(elem):
    """Text form of a spectral element.

    Finite coefficients render as combinations of delta(...) at attained
    grid points; off-grid support acts as the zero operator and is shown
    with an `off-grid` marker.  Values outside the scalar grammar
    (fractional powers of q from zline amplitudes, callables, floats)
    render as bracketed display-only markers, so only grammar-valued
    output is guaranteed to re-parse.
    """
    grid = SpectrumGrid(elem.cfg)
    chunks = []
    for (I, J) in sorted(elem.terms):
        phi = elem.terms[(I, J)]
        factors_z = [_pow_str(f"z{j + 1}", k) for j, k in enumerate(I) if k]
        factors_zs = [_pow_str(f"z{j + 1}*", k) for j, k in enumerate(J) if k]

        def wrap(neg, mid):
            parts = factors_z + [mid] + factors_zs
            fstr = parts[0]
            for f in parts[1:]:
                fstr += ("." if fstr.endswith("*") else "*") + f
            chunks.append((neg, fstr))

        if phi.kind == "poly":
            for neg, body in _term_chunks(I, J, phi.data):
                chunks.append((neg, body))
            continue
        if phi.kind == "finite":
            for pt in sorted(phi.data, key=str):
                v = phi.data[pt]
                if isinstance(v, ExactScalar) and set(v.slots) <= {Fraction(0)}:
                    v = v.slots.get(Fraction(0), QScalar.zero())
                if isinstance(v, QScalar):
                    neg, cs = _scalar_split(v)
                else:
                    neg, cs = False, f"[{v}]"
                idx = grid.attained(pt)
                if idx is None:
                    label = "delta(off-grid)"
                else:
                    label = "delta(" + ", ".join(str(k) for k in idx) + ")"
                mid = label if cs == "1" else f"{cs}*{label}" if " " not in cs \
                    else f"({cs})*{label}"
                wrap(neg, mid)
            continue
        wrap(False, "[callable]")
    return _join_chunks(chunks)
