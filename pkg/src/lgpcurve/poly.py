"""Exact multivariate polynomials over the rationals.

Coefficients are Python ints when integral and :class:`fractions.Fraction`
otherwise; exponent vectors are tuples aligned with ``MPoly.vars``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Rat = Fraction
Coeff = Union[int, Fraction]
Monomial = Tuple[int, ...]

VAR_ORDER = ("x", "y", "z", "t")


class PolySyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class EliminationError(ValueError):
    pass


def _norm(c) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _div(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
    return _norm(Fraction(a) / b)


def _sorted_vars(vs: Iterable[str]) -> Tuple[str, ...]:
    vs = set(vs)
    unknown = vs - set(VAR_ORDER)
    if unknown:
        raise ValueError(f"unknown variable(s): {sorted(unknown)}")
    return tuple(v for v in VAR_ORDER if v in vs)


class MPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Coeff], vars: Sequence[str]):
        self.vars = tuple(vars)
        self.terms: Dict[Monomial, Coeff] = {m: _norm(c) for m, c in terms.items() if c != 0}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c, vars: Sequence[str] = ()) -> "MPoly":
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name: str, vars: Sequence[str] = None) -> "MPoly":
        vars = tuple(vars) if vars is not None else (name,)
        e = tuple(1 if v == name else 0 for v in vars)
        return cls({e: 1}, vars)

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Coeff], var: str, vars: Sequence[str] = None) -> "MPoly":
        vars = tuple(vars) if vars is not None else (var,)
        k = vars.index(var)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * len(vars)
            e[k] = i
            terms[tuple(e)] = c
        return cls(terms, vars)

    def with_vars(self, vars: Sequence[str]) -> "MPoly":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = []
        for v in self.vars:
            if v in vars:
                idx.append(vars.index(v))
            else:
                idx.append(None)
        terms = {}
        for m, c in self.terms.items():
            e = [0] * len(vars)
            for i, k in zip(m, idx):
                if k is None:
                    if i:
                        raise ValueError("dropping a variable that still occurs")
                    continue
                e[k] = i
            terms[tuple(e)] = c
        return MPoly(terms, vars)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get((0,) * len(self.vars), 0)

    def used_vars(self) -> Tuple[str, ...]:
        used = set()
        for m in self.terms:
            for v, e in zip(self.vars, m):
                if e:
                    used.add(v)
        return _sorted_vars(used)

    def degree(self, var: str = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(m) for m in self.terms)
        if var not in self.vars:
            return 0
        k = self.vars.index(var)
        return max(m[k] for m in self.terms)

    def coeff_list(self, var: str) -> list:
        """Coefficients w.r.t. ``var`` (index = power), each an MPoly in the remaining vars."""
        rest = tuple(v for v in self.vars if v != var)
        if var not in self.vars:
            return [self.with_vars(rest)] if self.terms else []
        k = self.vars.index(var)
        buckets: Dict[int, Dict[Monomial, Coeff]] = {}
        for m, c in self.terms.items():
            buckets.setdefault(m[k], {})[m[:k] + m[k + 1:]] = c
        n = max(buckets) + 1 if buckets else 0
        return [MPoly(buckets.get(i, {}), rest) for i in range(n)]

    def leading_coeff(self, var: str) -> "MPoly":
        cl = self.coeff_list(var)
        return cl[-1] if cl else MPoly({}, tuple(v for v in self.vars if v != var))

    def univariate_coeffs(self) -> list:
        """Coefficient list (low to high) of a polynomial in at most one variable."""
        used = self.used_vars()
        if len(used) > 1:
            raise ValueError(f"not univariate: {used}")
        if not used:
            c = self.constant_value()
            return [c] if c != 0 else []
        k = self.vars.index(used[0])
        n = self.degree(used[0])
        out = [0] * (n + 1)
        for m, c in self.terms.items():
            out[m[k]] = c
        return out

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> Tuple["MPoly", "MPoly"]:
        if not isinstance(other, MPoly):
            return self, MPoly.const(other, self.vars)
        if other.vars == self.vars:
            return self, other
        vars = _sorted_vars(set(self.vars) | set(other.vars))
        return self.with_vars(vars), other.with_vars(vars)

    def __add__(self, other):
        a, b = self._coerce(other)
        t = dict(a.terms)
        for m, c in b.terms.items():
            t[m] = t.get(m, 0) + c
        return MPoly(t, a.vars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({m: -c for m, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        a, b = self._coerce(other)
        t = dict(a.terms)
        for m, c in b.terms.items():
            t[m] = t.get(m, 0) - c
        return MPoly(t, a.vars)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if other == 0:
                return MPoly({}, self.vars)
            return MPoly({m: c * other for m, c in self.terms.items()}, self.vars)
        a, b = self._coerce(other)
        t: Dict[Monomial, Coeff] = {}
        bt = list(b.terms.items())
        for m1, c1 in a.terms.items():
            for m2, c2 in bt:
                m = tuple(i + j for i, j in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return MPoly(t, a.vars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "MPoly":
        return self * c

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.vars)
        a, b = self._coerce(other)
        return a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            used = self.used_vars()
            p = self.with_vars(used)
            self._hash = hash((used, frozenset(p.terms.items())))
        return self._hash

    def __repr__(self):
        return f"MPoly({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    # content helpers --------------------------------------------------
    def numeric_content(self) -> Fraction:
        """Rational c with self/c integral and primitive, sign of the leading term."""
        if not self.terms:
            return Fraction(1)
        from math import gcd
        den = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, int(c * den))
        lead = self.terms[max(self.terms)]
        sign = -1 if lead < 0 else 1
        return Fraction(sign * num, den)

    def primitive(self) -> "MPoly":
        """Integer-coefficient primitive associate with positive leading coefficient."""
        c = self.numeric_content()
        return MPoly({m: _div(v, c) if isinstance(v, int) and c.denominator == 1 else v / c
                      for m, v in self.terms.items()}, self.vars)


# ----------------------------------------------------------------------
# parsing and printing

def parse_poly(text: str, vars: Sequence[str] = ("x", "y", "z")) -> MPoly:
    """Parse ``text`` (integers, p/q, + - * ^, parentheses) into an MPoly over ``vars``."""
    vars = _sorted_vars(vars)
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("num", int(text[i:j]), i))
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if name not in vars:
                raise PolySyntaxError(f"unknown variable {name!r}", i)
            toks.append(("var", name, i))
            i = j
        elif ch in "+-*/^()":
            toks.append((ch, ch, i))
            i += 1
        else:
            raise PolySyntaxError(f"unexpected character {ch!r}", i)
    toks.append(("end", None, len(text)))
    pos = 0

    def peek():
        return toks[pos][0]

    def take(kind):
        nonlocal pos
        t = toks[pos]
        if t[0] != kind:
            raise PolySyntaxError(f"expected {kind!r}, got {t[0]!r}", t[2])
        pos += 1
        return t

    def expr():
        nonlocal pos
        sign = 1
        while peek() in "+-":
            if take(peek())[0] == "-":
                sign = -sign
        acc = term() * sign
        while peek() in ("+", "-"):
            op = take(peek())[0]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = factor()
        while peek() in ("*", "/"):
            op, _, at = take(peek())
            rhs = factor()
            if op == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolySyntaxError("division only by nonzero constants", at)
                acc = acc * (Fraction(1) / Fraction(rhs.constant_value()))
        return acc

    def factor():
        if peek() == "-":
            take("-")
            return -factor()
        base = atom()
        if peek() == "^":
            take("^")
            t = take("num")
            return base ** t[1]
        return base

    def atom():
        kind, val, at = toks[pos]
        if kind == "num":
            take("num")
            return MPoly.const(val, vars)
        if kind == "var":
            take("var")
            return MPoly.var(val, vars)
        if kind == "(":
            take("(")
            e = expr()
            take(")")
            return e
        raise PolySyntaxError(f"unexpected token {kind!r}", at)

    result = expr()
    if peek() != "end":
        raise PolySyntaxError("trailing input", toks[pos][2])
    return result


def _fmt_coeff(c: Coeff) -> str:
    return str(c)


def to_string(p: MPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m in sorted(p.terms, key=lambda e: (sum(e), e), reverse=True):
        c = p.terms[m]
        mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(p.vars, m) if e)
        neg = c < 0
        a = -c if neg else c
        if mono:
            s = mono if a == 1 else (f"({a})*{mono}" if isinstance(a, Fraction) else f"{a}*{mono}")
        else:
            s = f"({a})" if isinstance(a, Fraction) else str(a)
        parts.append(("-" if neg else "+", s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sgn, s in parts[1:]:
        out += f" {sgn} {s}"
    return out


# ----------------------------------------------------------------------
# evaluation and calculus

def eval_poly(p: MPoly, point: Mapping[str, object]):
    """Substitute the assigned variables; returns a scalar when all are assigned.

    Exact for int/Fraction values; float or mpmath values give a numeric
    result of the same kind.
    """
    for v in point:
        if v not in p.vars:
            raise ValueError(f"variable {v!r} not in {p.vars}")
    keep = tuple(v for v in p.vars if v not in point)
    idx_keep = [p.vars.index(v) for v in keep]
    idx_sub = [(p.vars.index(v), val) for v, val in point.items()]
    exact = all(isinstance(val, (int, Fraction)) for _, val in idx_sub)
    conv = _converter(idx_sub) if not exact else None
    powcache: Dict[Tuple[int, int], object] = {}
    terms: Dict[Monomial, object] = {}
    for m, c in p.terms.items():
        w = c if exact else conv(c)
        for k, val in idx_sub:
            e = m[k]
            if e:
                key = (k, e)
                r = powcache.get(key)
                if r is None:
                    r = val ** e
                    powcache[key] = r
                w = w * r
        key = tuple(m[k] for k in idx_keep)
        terms[key] = terms.get(key, 0) + w
    if not keep:
        v = terms.get((), 0)
        return _norm(v) if exact else v
    return MPoly(terms, keep)


def _converter(idx_sub):
    for _, val in idx_sub:
        if type(val).__module__.startswith("mpmath"):
            import mpmath

            def conv(c):
                if isinstance(c, Fraction):
                    return mpmath.mpf(c.numerator) / c.denominator
                return mpmath.mpf(c)
            return conv
    return float


def partial_derivative(p: MPoly, var: str) -> MPoly:
    if var not in p.vars:
        raise ValueError(f"variable {var!r} not in {p.vars}")
    k = p.vars.index(var)
    terms = {}
    for m, c in p.terms.items():
        if m[k]:
            e = list(m)
            e[k] -= 1
            terms[tuple(e)] = c * m[k]
    return MPoly(terms, p.vars)


def shear_yz(p: MPoly, s) -> MPoly:
    """p(x, y + s*z, z)."""
    s = _norm(Fraction(s))
    if s == 0:
        return p
    vars = _sorted_vars(set(p.vars) | {"y", "z"})
    p = p.with_vars(vars)
    ky, kz = vars.index("y"), vars.index("z")
    binom_rows = {}
    out: Dict[Monomial, Coeff] = {}
    for m, c in p.terms.items():
        n = m[ky]
        if n == 0:
            out[m] = out.get(m, 0) + c
            continue
        row = binom_rows.get(n)
        if row is None:
            row = [1]
            for i in range(n):
                row.append(row[-1] * (n - i) // (i + 1))
            binom_rows[n] = row
        for i in range(n + 1):
            # y^(n-i) (s z)^i
            e = list(m)
            e[ky] = n - i
            e[kz] = m[kz] + i
            e = tuple(e)
            out[e] = out.get(e, 0) + c * row[i] * s ** i
    return MPoly(out, vars)


# ----------------------------------------------------------------------
# division, resultants, gcd

def _lead(p: MPoly) -> Monomial:
    return max(p.terms)


def divexact(p: MPoly, q: MPoly) -> MPoly:
    """Exact quotient p/q; raises ArithmeticError if q does not divide p."""
    p, q = p._coerce(q)
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if q.is_constant():
        c = q.constant_value()
        return MPoly({m: _div(v, c) for m, v in p.terms.items()}, p.vars)
    lq = _lead(q)
    cq = q.terms[lq]
    qt = list(q.terms.items())
    rem = dict(p.terms)
    quo: Dict[Monomial, Coeff] = {}
    n = len(p.vars)
    while rem:
        lm = max(rem)
        d = tuple(a - b for a, b in zip(lm, lq))
        if any(e < 0 for e in d):
            raise ArithmeticError("not divisible")
        c = _div(rem[lm], cq)
        quo[d] = c
        for m2, c2 in qt:
            m = tuple(d[i] + m2[i] for i in range(n))
            v = rem.get(m, 0) - c * c2
            if v == 0:
                rem.pop(m, None)
            else:
                rem[m] = v
    return MPoly(quo, p.vars)


def divides(q: MPoly, p: MPoly) -> bool:
    try:
        divexact(p, q)
        return True
    except ArithmeticError:
        return False


def _trim(a: list) -> list:
    while a and a[-1].is_zero():
        a.pop()
    return a


def _prem(A: list, B: list) -> list:
    """Pseudo-remainder of dense coefficient lists (coefficients are MPoly)."""
    r = list(A)
    db = len(B) - 1
    lb = B[-1]
    e = len(A) - len(B) + 1
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lr = r[-1]
        new = [c * lb for c in r]
        for i, bc in enumerate(B):
            new[i + shift] = new[i + shift] - lr * bc
        new.pop()
        r = _trim(new)
        e -= 1
    if e > 0 and r:
        f = lb ** e
        r = [c * f for c in r]
    return r


def subresultant_prs_resultant(A: list, B: list, zero: MPoly) -> MPoly:
    """Resultant of dense lists via the subresultant PRS (Collins/Brown)."""
    A, B = _trim(list(A)), _trim(list(B))
    if not A or not B:
        return zero
    sign = 1
    if len(A) < len(B):
        A, B = B, A
        if (len(A) - 1) % 2 == 1 and (len(B) - 1) % 2 == 1:
            sign = -sign
    one = zero + 1
    if len(B) == 1:
        return B[0] ** (len(A) - 1) * sign
    g = one
    h = one
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            sign = -sign
        R = _prem(A, B)
        if not R:
            return zero
        A = B
        div = g * h ** delta
        B = [divexact(c, div) for c in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = divexact(g ** delta, h ** (delta - 1))
        if len(B) == 1:
            da = len(A) - 1
            if da == 1:
                hh = B[0]
            else:
                hh = divexact(B[0] ** da, h ** (da - 1))
            return hh * sign


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Res_var(p, q), with contents factored out before the PRS."""
    p, q = p._coerce(q)
    if var not in p.vars or (p.degree(var) <= 0 and q.degree(var) <= 0):
        raise EliminationError("no elimination variable")
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of zero polynomial")
    rest = tuple(v for v in p.vars if v != var)
    zero = MPoly({}, rest)
    cp, cq = p.numeric_content(), q.numeric_content()
    pp, qq = p.primitive(), q.primitive()
    A = pp.coeff_list(var)
    B = qq.coeff_list(var)
    r = subresultant_prs_resultant(A, B, zero)
    scale = cp ** (len(B) - 1) * cq ** (len(A) - 1)
    return r * _norm(scale)


def sylvester_matrix(p: MPoly, q: MPoly, var: str) -> list:
    p, q = p._coerce(q)
    A = p.coeff_list(var)
    B = q.coeff_list(var)
    m, n = len(A) - 1, len(B) - 1
    rest = tuple(v for v in p.vars if v != var)
    zero = MPoly({}, rest)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(A)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(B)):
            row[i + j] = c
        rows.append(row)
    return rows


def det_cofactor(M: list) -> MPoly:
    """Laplace expansion along the first row; meant for small oracle checks."""
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = None
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        t = M[0][j] * det_cofactor(minor)
        if j % 2:
            t = -t
        total = t if total is None else total + t
    return total if total is not None else M[0][0] * 0


def _main_var(p: MPoly, q: MPoly):
    used = set(p.used_vars()) | set(q.used_vars())
    for v in reversed(VAR_ORDER):
        if v in used:
            return v
    return None


def _univ_gcd(a: list, b: list) -> list:
    """Primitive gcd of integer/rational coefficient lists (low->high)."""
    from .roots import upoly_gcd
    return upoly_gcd(a, b)


def content(p: MPoly, var: str) -> MPoly:
    """Gcd of the coefficients of p w.r.t. var (a polynomial free of var)."""
    cl = [c for c in p.coeff_list(var) if not c.is_zero()]
    g = None
    for c in cl:
        g = c if g is None else gcd_poly(g, c)
        if g.is_constant():
            return MPoly.const(1, g.vars)
    return g if g is not None else MPoly({}, tuple(v for v in p.vars if v != var))


def gcd_poly(p: MPoly, q: MPoly) -> MPoly:
    """A gcd normalized to primitive integer form with positive leading coefficient."""
    p, q = p._coerce(q)
    if p.is_zero():
        return q.primitive() if not q.is_zero() else q
    if q.is_zero():
        return p.primitive()
    v = _main_var(p, q)
    if v is None:
        return MPoly.const(1, p.vars)
    pu, qu = p.used_vars(), q.used_vars()
    if len(set(pu) | set(qu)) == 1:
        g = _univ_gcd(p.univariate_coeffs() if p.degree(v) > 0 else [p.constant_value()],
                      q.univariate_coeffs() if q.degree(v) > 0 else [q.constant_value()])
        return MPoly.from_univariate(g, v, p.vars)
    vars = p.vars
    cp = content(p, v)
    cq = content(q, v)
    cg = gcd_poly(cp, cq).with_vars(vars)
    if p.degree(v) <= 0 or q.degree(v) <= 0:
        # one operand is free of v: gcd divides its content-level gcd
        if p.degree(v) <= 0:
            return gcd_poly(p.with_vars(tuple(w for w in vars if w != v)), cq).with_vars(vars).primitive()
        return gcd_poly(q.with_vars(tuple(w for w in vars if w != v)), cp).with_vars(vars).primitive()
    pp = divexact(p, cp.with_vars(vars))
    qp = divexact(q, cq.with_vars(vars))
    if _coprime_by_specialization(pp, qp, v):
        return cg.primitive()
    A = pp.coeff_list(v)
    B = qp.coeff_list(v)
    if len(A) < len(B):
        A, B = B, A
    rest = tuple(w for w in vars if w != v)
    # primitive PRS
    while True:
        R = _prem(A, B)
        if not R:
            break
        if len(R) == 1:
            return cg.primitive()
        rp = _from_coeff_list(R, v, vars)
        cr = content(rp, v)
        rp = divexact(rp, cr.with_vars(vars))
        A, B = B, rp.coeff_list(v)
    g = _from_coeff_list(B, v, vars)
    g = divexact(g, content(g, v).with_vars(vars))
    return (g * cg).primitive()


def _is_zero_value(v) -> bool:
    return v.is_zero() if isinstance(v, MPoly) else v == 0


def _coprime_by_specialization(p: MPoly, q: MPoly, v: str, tries: int = 3) -> bool:
    """Sufficient test for a gcd free of v: an integer point of the other variables
    that keeps both leading coefficients and leaves coprime univariate images."""
    rest = [w for w in p.vars if w != v]
    lp, lq = p.leading_coeff(v), q.leading_coeff(v)
    for t in range(tries):
        pt = {w: Fraction(3 + 2 * t + 5 * i) for i, w in enumerate(rest)}
        if any(_is_zero_value(eval_poly(c, {w: pt[w] for w in c.vars if w in pt})) for c in (lp, lq)):
            continue
        a = eval_poly(p, pt)
        b = eval_poly(q, pt)
        ua = a.univariate_coeffs() if isinstance(a, MPoly) else [a]
        ub = b.univariate_coeffs() if isinstance(b, MPoly) else [b]
        if len(_univ_gcd(ua, ub)) <= 1:
            return True
    return False


def _from_coeff_list(cl: list, v: str, vars: Sequence[str]) -> MPoly:
    """Inverse of ``coeff_list``."""
    k = vars.index(v)
    terms = {}
    for i, c in enumerate(cl):
        for m, a in c.with_vars(tuple(w for w in vars if w != v)).terms.items():
            terms[m[:k] + (i,) + m[k:]] = a
    return MPoly(terms, vars)


def squarefree_part(p: MPoly) -> MPoly:
    """Product of the distinct irreducible factors of p, primitive."""
    if p.is_zero():
        raise ValueError("squarefree part of zero")
    used = p.used_vars()
    if not used:
        return MPoly.const(1, p.vars)
    vars = p.vars
    if len(used) == 1:
        from .roots import upoly_sqf
        return MPoly.from_univariate(upoly_sqf(p.univariate_coeffs()), used[0], vars).primitive()
    v = used[-1]
    c = content(p, v).with_vars(vars)
    pp = divexact(p, c)
    if _squarefree_by_specialization(pp, v):
        g = MPoly.const(1, vars)
    else:
        g = gcd_poly(pp, partial_derivative(pp, v))
    part = divexact(pp, g) if not g.is_constant() else pp
    if not c.is_constant():
        part = part * squarefree_part(c)
    return part.primitive()


def _squarefree_by_specialization(pp: MPoly, v: str, tries: int = 4) -> bool:
    """Sufficient test: pp(a, v) squarefree of full degree at some rational a.

    A repeated factor of pp involving v would survive any specialization that
    keeps the degree in v, so success certifies squarefreeness of pp.
    """
    from .roots import upoly_gcd, derivative as uderiv
    others = [w for w in pp.used_vars() if w != v]
    n = pp.degree(v)
    lc = pp.leading_coeff(v)
    for k in range(tries):
        a = {w: Fraction(2 * k + 3 + i, 7) for i, w in enumerate(others)}
        if eval_poly(lc, a) == 0:
            continue
        u = eval_poly(pp, a).univariate_coeffs()
        if len(u) - 1 != n:
            continue
        if len(upoly_gcd(u, uderiv(u))) == 1:
            return True
    return False


def factor_only_in(p: MPoly, var: str) -> MPoly:
    """Largest factor of p depending on ``var`` alone (constant if none)."""
    g = p
    for v in p.used_vars():
        if v != var and g.degree(v) > 0:
            g = content(g, v).with_vars(p.vars)
    return g.primitive() if not g.is_zero() else g


def hessian_homogeneous(h: MPoly) -> MPoly:
    """Hessian determinant of the homogenized bivariate h, dehomogenized at w=1."""
    d = h.degree()
    x = MPoly.var("x", h.vars)
    y = MPoly.var("y", h.vars)
    hx = partial_derivative(h, "x")
    hy = partial_derivative(h, "y")
    hxx = partial_derivative(hx, "x")
    hxy = partial_derivative(hx, "y")
    hyy = partial_derivative(hy, "y")
    # Euler's relation gives the w-derivatives of the homogenization at w=1
    hw = h * d - x * hx - y * hy
    hxw = hx * (d - 1) - x * hxx - y * hxy
    hyw = hy * (d - 1) - x * hxy - y * hyy
    hww = hw * (d - 1) - x * hxw - y * hyw
    M = [[hxx, hxy, hxw], [hxy, hyy, hyw], [hxw, hyw, hww]]
    return det_cofactor(M)


def specialize(p: MPoly, assignment: Mapping[str, object]) -> MPoly:
    return eval_poly(p, assignment)


def random_poly(rng, vars: Sequence[str], degree: int, nterms: int = 6, coeff_range: int = 9) -> MPoly:
    monos = [e for e in itertools.product(range(degree + 1), repeat=len(vars)) if sum(e) <= degree]
    terms = {}
    for _ in range(nterms):
        e = monos[rng.randrange(len(monos))]
        terms[e] = rng.randint(-coeff_range, coeff_range)
    return MPoly(terms, vars)
