"""Exact scalar expressions in spatial, covariable and spectral variables.

The expression grammar is deliberately small: Gaussian-rational and complex
constants, named variables, the radial norm of a covariable block, sums,
products, integer powers, rational powers of principal branch, unit-modulus
exponentials ``e^{i k x_j}`` in the spatial variables, principal-branch
logarithms, and a half-line integral node over the spectral variable.  It is
closed under differentiation and evaluates deterministically at complex
points.  Nodes are hash-consed, so structurally identical subtrees are the
same object and numeric evaluation shares work across a whole term list.

There is no general simplifier.  Construction performs only local
normalisation (constant folding, flattening, collection of like terms and
like powers); equality of expressions is a numeric question, not a
syntactic one.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from . import _quad

__all__ = [
    "DomainError",
    "UsageError",
    "Expr",
    "qnum",
    "cnum",
    "var",
    "absxi",
    "add",
    "mul",
    "ipow",
    "rpow",
    "cis",
    "ln",
    "negaxis_integral",
    "as_expr",
    "ZERO",
    "ONE",
    "IUNIT",
    "LAMBDA",
    "free_vars",
    "evaluate",
    "compile_expr",
    "differentiate",
    "homogeneity_check",
    "to_prefix",
    "parse_prefix",
    "SphereRule",
    "sphere_quadrature",
    "ScalarField",
]

LAMBDA = "lam"  # canonical name of the spectral-parameter variable


class UsageError(ValueError):
    """A caller violated a documented precondition."""


class DomainError(ValueError):
    """Evaluation left the admissible domain (division by zero, log of 0)."""


# ---------------------------------------------------------------------------
# exact numeric coefficients: Gaussian rationals, with complex-float fallback
# ---------------------------------------------------------------------------

_F0 = Fraction(0)
_F1 = Fraction(1)


def _as_frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise UsageError(f"expected an exact rational, got {v!r}")


def _num_is_exact(c) -> bool:
    return isinstance(c, tuple)


def _num_add(a, b):
    if _num_is_exact(a) and _num_is_exact(b):
        return (a[0] + b[0], a[1] + b[1])
    return _num_complex(a) + _num_complex(b)


def _num_mul(a, b):
    if _num_is_exact(a) and _num_is_exact(b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])
    return _num_complex(a) * _num_complex(b)


def _num_ipow(a, k: int):
    if not _num_is_exact(a):
        return _num_complex(a) ** k
    if k == 0:
        return (_F1, _F0)
    if k < 0:
        re, im = a
        nrm = re * re + im * im
        if nrm == 0:
            raise DomainError("reciprocal of an exact zero constant")
        a = (re / nrm, -im / nrm)
        k = -k
    out = (_F1, _F0)
    for _ in range(k):
        out = _num_mul(out, a)
    return out


def _num_complex(a) -> complex:
    if _num_is_exact(a):
        return complex(float(a[0]), float(a[1]))
    return a


def _num_is_zero(a) -> bool:
    if _num_is_exact(a):
        return a[0] == 0 and a[1] == 0
    return a == 0


def _num_is_one(a) -> bool:
    if _num_is_exact(a):
        return a[0] == 1 and a[1] == 0
    return a == 1


# ---------------------------------------------------------------------------
# node classes (hash-consed; construct only through the helpers below)
# ---------------------------------------------------------------------------

_INTERN: dict = {}
_SEQ = itertools.count()


def _intern(key, make):
    nd = _INTERN.get(key)
    if nd is None:
        nd = make()
        nd.seq = next(_SEQ)
        _INTERN[key] = nd
    return nd


class Expr:
    __slots__ = ("seq",)

    def __add__(self, other):
        return add(self, as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(MINUS_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, ipow(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), ipow(self, -1))

    def __pow__(self, k):
        if isinstance(k, int):
            return ipow(self, k)
        return rpow(self, _as_frac(k))

    def __neg__(self):
        return mul(MINUS_ONE, self)

    def __repr__(self):
        s = to_prefix(self)
        return s if len(s) <= 120 else s[:117] + "..."

    def diff(self, name: str) -> "Expr":
        return differentiate(self, name)

    def eval(self, env: Mapping[str, complex]) -> complex:
        return evaluate(self, env)


class QNum(Expr):
    __slots__ = ("re", "im", "cval")

    def __new__(cls, re: Fraction, im: Fraction):
        def make():
            nd = object.__new__(cls)
            nd.re, nd.im = re, im
            nd.cval = complex(float(re), float(im))
            return nd

        return _intern(("q", re, im), make)


class CNum(Expr):
    __slots__ = ("cval",)

    def __new__(cls, z: complex):
        def make():
            nd = object.__new__(cls)
            nd.cval = z
            return nd

        return _intern(("c", z.real, z.imag), make)


class Var(Expr):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        def make():
            nd = object.__new__(cls)
            nd.name = name
            return nd

        return _intern(("v", name), make)


class AbsXi(Expr):
    """Euclidean norm of a block of covariable components."""

    __slots__ = ("names",)

    def __new__(cls, names: tuple):
        def make():
            nd = object.__new__(cls)
            nd.names = names
            return nd

        return _intern(("a",) + names, make)


class Sum(Expr):
    __slots__ = ("terms",)

    def __new__(cls, terms: tuple):
        def make():
            nd = object.__new__(cls)
            nd.terms = terms
            return nd

        return _intern(("s",) + tuple(id(t) for t in terms), make)


class Prod(Expr):
    """coeff * f1 * f2 * ...; coeff exact or complex, factors non-numeric."""

    __slots__ = ("coeff", "factors")

    def __new__(cls, coeff, factors: tuple):
        ckey = ("qc", coeff[0], coeff[1]) if _num_is_exact(coeff) else ("cc", coeff.real, coeff.imag)

        def make():
            nd = object.__new__(cls)
            nd.coeff, nd.factors = coeff, factors
            return nd

        return _intern(("p", ckey) + tuple(id(f) for f in factors), make)


class IPow(Expr):
    __slots__ = ("base", "k")

    def __new__(cls, base: Expr, k: int):
        def make():
            nd = object.__new__(cls)
            nd.base, nd.k = base, k
            return nd

        return _intern(("ip", id(base), k), make)


class RPow(Expr):
    """Principal-branch power with exact rational exponent."""

    __slots__ = ("base", "r")

    def __new__(cls, base: Expr, r: Fraction):
        def make():
            nd = object.__new__(cls)
            nd.base, nd.r = base, r
            return nd

        return _intern(("rp", id(base), r), make)


class Cis(Expr):
    """e^{i k v} for a spatial variable v and exact rational k."""

    __slots__ = ("name", "k")

    def __new__(cls, name: str, k: Fraction):
        def make():
            nd = object.__new__(cls)
            nd.name, nd.k = name, k
            return nd

        return _intern(("e", name, k), make)


class Ln(Expr):
    __slots__ = ("arg",)

    def __new__(cls, arg: Expr):
        def make():
            nd = object.__new__(cls)
            nd.arg = arg
            return nd

        return _intern(("ln", id(arg)), make)


class NegAxisIntegral(Expr):
    """∫_{-∞}^0 f(.., lam=t) dt, evaluated by adaptive quadrature.

    Differentiation in any variable other than the spectral one commutes with
    the integral and is pushed onto the integrand.
    """

    __slots__ = ("arg",)

    def __new__(cls, arg: Expr):
        def make():
            nd = object.__new__(cls)
            nd.arg = arg
            return nd

        return _intern(("ng", id(arg)), make)


# ---------------------------------------------------------------------------
# constructors with local normalisation
# ---------------------------------------------------------------------------


def qnum(re, im=0) -> Expr:
    return QNum(_as_frac(re), _as_frac(im))


def cnum(z) -> Expr:
    return CNum(complex(z))


ZERO = qnum(0)
ONE = qnum(1)
MINUS_ONE = qnum(-1)
IUNIT = qnum(0, 1)


def var(name: str) -> Expr:
    return Var(name)


def absxi(names: Iterable[str]) -> Expr:
    names = tuple(names)
    if not names:
        raise UsageError("radial norm needs at least one component name")
    return AbsXi(names)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return qnum(v)
    if isinstance(v, (float, complex)):
        return cnum(v)
    raise UsageError(f"cannot interpret {v!r} as an expression")


def _num_of(e: Expr):
    """Exact-or-float numeric value of a constant node, else None."""
    if isinstance(e, QNum):
        return (e.re, e.im)
    if isinstance(e, CNum):
        return e.cval
    return None


def _num_to_expr(c) -> Expr:
    if _num_is_exact(c):
        return QNum(c[0], c[1])
    return CNum(c)


def add(*terms) -> Expr:
    const = (_F0, _F0)
    coeffs: dict = {}
    order: dict = {}
    stack = [as_expr(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if isinstance(t, Sum):
            stack.extend(reversed(t.terms))
            continue
        nv = _num_of(t)
        if nv is not None:
            const = _num_add(const, nv)
            continue
        if isinstance(t, Prod):
            c, rest = t.coeff, _raw_prod((_F1, _F0), t.factors)
        else:
            c, rest = (_F1, _F0), t
        if rest in coeffs:
            coeffs[rest] = _num_add(coeffs[rest], c)
        else:
            coeffs[rest] = c
            order[rest] = rest.seq
    out = []
    for rest in sorted(coeffs, key=order.get):
        c = coeffs[rest]
        if _num_is_zero(c):
            continue
        out.append(_raw_prod(c, rest.factors if isinstance(rest, Prod) else (rest,)))
    if not _num_is_zero(const):
        out.append(_num_to_expr(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda e: e.seq)
    return Sum(tuple(out))


def _raw_prod(coeff, factors: tuple) -> Expr:
    if _num_is_zero(coeff):
        return ZERO
    if not factors:
        return _num_to_expr(coeff)
    if _num_is_one(coeff) and len(factors) == 1:
        return factors[0]
    return Prod(coeff, tuple(sorted(factors, key=lambda e: e.seq)))


def mul(*factors) -> Expr:
    coeff = (_F1, _F0)
    powmap: dict = {}
    cismap: dict = {}
    stack = [as_expr(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Prod):
            coeff = _num_mul(coeff, f.coeff)
            stack.extend(reversed(f.factors))
            continue
        nv = _num_of(f)
        if nv is not None:
            coeff = _num_mul(coeff, nv)
            continue
        if isinstance(f, IPow):
            base, e = f.base, Fraction(f.k)
        elif isinstance(f, RPow):
            base, e = f.base, f.r
        elif isinstance(f, Cis):
            cismap[f.name] = cismap.get(f.name, _F0) + f.k
            continue
        else:
            base, e = f, _F1
        powmap[base] = powmap.get(base, _F0) + e
    if _num_is_zero(coeff):
        return ZERO
    out = []
    for base, e in powmap.items():
        if e == 0:
            continue
        if e == 1:
            out.append(base)
        elif e.denominator == 1:
            out.append(ipow(base, int(e)))
        else:
            out.append(rpow(base, e))
    for name, k in cismap.items():
        if k != 0:
            out.append(Cis(name, k))
    # factors produced by ipow/rpow may themselves be products (e.g. after
    # distributing an integer power); re-run once if so
    if any(isinstance(f, (Prod, QNum, CNum)) for f in out):
        return mul(_num_to_expr(coeff), *out)
    return _raw_prod(coeff, tuple(out))


def ipow(b, k: int) -> Expr:
    b = as_expr(b)
    if not isinstance(k, int):
        raise UsageError("integer power needs an int exponent")
    if k == 0:
        return ONE
    if k == 1:
        return b
    nv = _num_of(b)
    if nv is not None:
        return _num_to_expr(_num_ipow(nv, k))
    if isinstance(b, IPow):
        return ipow(b.base, b.k * k)
    if isinstance(b, RPow):
        rk = b.r * k
        if abs(rk) <= 1:
            return rpow(b.base, rk)
        return IPow(b, k)
    if isinstance(b, Cis):
        return Cis(b.name, b.k * k)
    if isinstance(b, Prod):
        return mul(_num_to_expr(_num_ipow(b.coeff, k)), *[ipow(f, k) for f in b.factors])
    return IPow(b, k)


def rpow(b, r) -> Expr:
    b = as_expr(b)
    r = _as_frac(r)
    if r.denominator == 1:
        return ipow(b, int(r))
    if isinstance(b, RPow) and abs(b.r) <= 1:
        return rpow(b.base, b.r * r)
    if b is ONE:
        return ONE
    return RPow(b, r)


def cis(name: str, k) -> Expr:
    k = _as_frac(k)
    if k == 0:
        return ONE
    return Cis(name, k)


def ln(e) -> Expr:
    e = as_expr(e)
    if e is ONE:
        return ZERO
    return Ln(e)


def negaxis_integral(e) -> Expr:
    return NegAxisIntegral(as_expr(e))


# ---------------------------------------------------------------------------
# free variables
# ---------------------------------------------------------------------------

_FV_CACHE: dict = {}


def free_vars(e: Expr) -> frozenset:
    got = _FV_CACHE.get(id(e))
    if got is not None:
        return got
    if isinstance(e, Var):
        fv = frozenset((e.name,))
    elif isinstance(e, AbsXi):
        fv = frozenset(e.names)
    elif isinstance(e, Cis):
        fv = frozenset((e.name,))
    elif isinstance(e, Sum):
        fv = frozenset().union(*[free_vars(t) for t in e.terms])
    elif isinstance(e, Prod):
        fv = frozenset().union(*[free_vars(f) for f in e.factors])
    elif isinstance(e, (IPow, RPow)):
        fv = free_vars(e.base)
    elif isinstance(e, Ln):
        fv = free_vars(e.arg)
    elif isinstance(e, NegAxisIntegral):
        fv = free_vars(e.arg) | frozenset((LAMBDA,))
    else:
        fv = frozenset()
    _FV_CACHE[id(e)] = fv
    return fv


# ---------------------------------------------------------------------------
# differentiation (exact, cached)
# ---------------------------------------------------------------------------

_DIFF_CACHE: dict = {}


def differentiate(e: Expr, name: str) -> Expr:
    key = (id(e), name)
    got = _DIFF_CACHE.get(key)
    if got is not None:
        return got
    if name not in free_vars(e):
        d = ZERO
    elif isinstance(e, Var):
        d = ONE
    elif isinstance(e, AbsXi):
        d = mul(Var(name), ipow(e, -1))
    elif isinstance(e, Cis):
        d = mul(QNum(_F0, e.k), e)
    elif isinstance(e, Sum):
        d = add(*[differentiate(t, name) for t in e.terms])
    elif isinstance(e, Prod):
        parts = []
        for i, f in enumerate(e.factors):
            df = differentiate(f, name)
            if df is ZERO:
                continue
            others = e.factors[:i] + e.factors[i + 1 :]
            parts.append(_raw_prod(e.coeff, ()) * df * mul(*others) if others else _raw_prod(e.coeff, ()) * df)
        d = add(*parts)
    elif isinstance(e, IPow):
        d = mul(qnum(e.k), ipow(e.base, e.k - 1), differentiate(e.base, name))
    elif isinstance(e, RPow):
        d = mul(QNum(e.r, _F0), rpow(e.base, e.r - 1), differentiate(e.base, name))
    elif isinstance(e, Ln):
        d = mul(differentiate(e.arg, name), ipow(e.arg, -1))
    elif isinstance(e, NegAxisIntegral):
        if name == LAMBDA:
            raise UsageError("cannot differentiate a spectral integral in the spectral variable")
        d = NegAxisIntegral(differentiate(e.arg, name))
    else:
        d = ZERO
    _DIFF_CACHE[key] = d
    return d


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _abs_key(names: tuple) -> str:
    return "|" + ",".join(names) + "|"


def _eval_absxi(e: AbsXi, env) -> complex:
    key = _abs_key(e.names)
    supplied = env.get(key)
    total = 0.0
    have_all = True
    for nm in e.names:
        v = env.get(nm)
        if v is None:
            have_all = False
            break
        v = complex(v)
        total += v.real * v.real + v.imag * v.imag
    if have_all:
        computed = math.sqrt(total)
        if supplied is not None and abs(complex(supplied).real - computed) > 1e-8 * max(1.0, computed):
            raise UsageError(f"radial value {supplied} inconsistent with components ({computed})")
        return complex(computed)
    if supplied is not None:
        return complex(supplied)
    raise UsageError(f"unassigned radial norm {key}")


def evaluate(e: Expr, env: Mapping[str, complex]) -> complex:
    """Evaluate at a point.  All free variables must be assigned in env."""
    memo: dict = {}

    def go(n: Expr) -> complex:
        got = memo.get(id(n))
        if got is not None:
            return got
        if isinstance(n, (QNum, CNum)):
            v = n.cval
        elif isinstance(n, Var):
            try:
                v = complex(env[n.name])
            except KeyError:
                raise UsageError(f"unassigned variable '{n.name}'") from None
        elif isinstance(n, AbsXi):
            v = _eval_absxi(n, env)
        elif isinstance(n, Sum):
            v = 0j
            for t in n.terms:
                v += go(t)
        elif isinstance(n, Prod):
            v = _num_complex(n.coeff)
            for f in n.factors:
                v *= go(f)
        elif isinstance(n, IPow):
            b = go(n.base)
            if n.k < 0 and b == 0:
                raise DomainError(f"division by zero in {n!r}")
            v = b ** n.k
        elif isinstance(n, RPow):
            b = go(n.base)
            if b == 0 and n.r < 0:
                raise DomainError(f"division by zero in {n!r}")
            v = b ** float(n.r) if b != 0 else 0j
        elif isinstance(n, Cis):
            try:
                x = complex(env[n.name])
            except KeyError:
                raise UsageError(f"unassigned variable '{n.name}'") from None
            v = _cexp(1j * float(n.k) * x)
        elif isinstance(n, Ln):
            b = go(n.arg)
            if b == 0:
                raise DomainError(f"log of zero in {n!r}")
            v = _clog(b)
        elif isinstance(n, NegAxisIntegral):
            inner = n.arg

            def f(t: float) -> complex:
                env2 = dict(env)
                env2[LAMBDA] = t
                return evaluate(inner, env2)

            v, _err = _quad.negaxis_quad(f)
        else:  # pragma: no cover
            raise UsageError(f"cannot evaluate node {n!r}")
        v = complex(v)
        memo[id(n)] = v
        return v

    return go(e)


def _cexp(z: complex) -> complex:
    return complex(math.exp(z.real) * math.cos(z.imag), math.exp(z.real) * math.sin(z.imag))


def _clog(z: complex) -> complex:
    return complex(math.log(abs(z)), math.atan2(z.imag, z.real))


def compile_expr(e: Expr) -> Callable[[Mapping[str, complex]], complex]:
    """Compile to a python function; supports numpy-array variable values."""
    import numpy as np

    lines: list = []
    consts: list = []
    slot: dict = {}

    def cname(obj) -> str:
        consts.append(obj)
        return f"C[{len(consts) - 1}]"

    def emit(n: Expr) -> str:
        got = slot.get(id(n))
        if got is not None:
            return got
        if isinstance(n, (QNum, CNum)):
            rhs = cname(n.cval)
        elif isinstance(n, Var):
            rhs = f"env[{n.name!r}]"
        elif isinstance(n, AbsXi):
            rhs = f"{cname(_eval_absxi_np)}({cname(n)}, env)"
        elif isinstance(n, Sum):
            rhs = " + ".join(emit(t) for t in n.terms)
        elif isinstance(n, Prod):
            rhs = " * ".join([cname(_num_complex(n.coeff))] + [emit(f) for f in n.factors])
        elif isinstance(n, IPow):
            rhs = f"{emit(n.base)} ** {n.k}"
        elif isinstance(n, RPow):
            rhs = f"{emit(n.base)} ** {float(n.r)!r}"
        elif isinstance(n, Cis):
            rhs = f"exp(1j * {float(n.k)!r} * env[{n.name!r}])"
        elif isinstance(n, Ln):
            rhs = f"log({emit(n.arg)})"
        elif isinstance(n, NegAxisIntegral):
            rhs = f"{cname(_negint_closure(n.arg))}(env)"
        else:  # pragma: no cover
            raise UsageError(f"cannot compile node {n!r}")
        nm = f"t{len(slot)}"
        lines.append(f"    {nm} = {rhs}")
        slot[id(n)] = nm
        return nm

    root = emit(e)
    src = "def _f(env):\n" + "\n".join(lines) + f"\n    return {root}\n"
    ns = {"C": consts, "exp": np.exp, "log": np.log}
    exec(src, ns)  # noqa: S102 - internal codegen, no user input
    return ns["_f"]


def _eval_absxi_np(node: AbsXi, env):
    import numpy as np

    key = _abs_key(node.names)
    if key in env and not all(nm in env for nm in node.names):
        return env[key]
    total = 0.0
    for nm in node.names:
        v = np.asarray(env[nm])
        total = total + v.real**2 + v.imag**2
    return np.sqrt(total) + 0j


def _negint_closure(inner: Expr):
    fn_cell = []

    def g(env):
        if not fn_cell:
            fn_cell.append(compile_expr(inner))
        fn = fn_cell[0]

        def f(t: float) -> complex:
            env2 = dict(env)
            env2[LAMBDA] = t
            return fn(env2)

        v, _err = _quad.negaxis_quad(f)
        return v

    return g


# ---------------------------------------------------------------------------
# homogeneity testing
# ---------------------------------------------------------------------------


def homogeneity_check(
    e: Expr,
    degree,
    xi_names: Iterable[str],
    *,
    lam_weight: int | None = None,
    n_samples: int = 20,
    tol: float = 1e-9,
    seed: int = 0,
) -> dict:
    """Numeric scaling test e(t xi, t^m lam) == t^degree e(xi, lam).

    Spatial variables are held fixed; the spectral variable is sampled on the
    negative real axis when lam_weight is given and skipped otherwise.
    Returns a report with the maximum relative deviation over the samples.
    """
    xi_names = tuple(xi_names)
    rng = random.Random(seed)
    deg = float(degree)
    others = sorted(free_vars(e) - set(xi_names) - {LAMBDA})
    worst = 0.0
    witnesses = []
    for _ in range(n_samples):
        env = {}
        for nm in others:
            env[nm] = rng.uniform(0.0, 2.0 * math.pi)
        for nm in xi_names:
            mag = rng.uniform(0.5, 2.0)
            env[nm] = mag if rng.random() < 0.5 else -mag
        if lam_weight is not None:
            env[LAMBDA] = -rng.uniform(0.5, 50.0)
        t = rng.uniform(0.5, 4.0)
        env2 = dict(env)
        for nm in xi_names:
            env2[nm] = env[nm] * t
        if lam_weight is not None:
            env2[LAMBDA] = env[LAMBDA] * t**lam_weight
        try:
            v1 = evaluate(e, env2)
            v0 = evaluate(e, env)
        except (DomainError, UsageError) as exc:
            raise DomainError(f"homogeneity sample failed at {env}: {exc}") from exc
        ref = t**deg * v0
        dev = abs(v1 - ref) / max(abs(ref), abs(v1), 1e-300)
        if dev > worst:
            worst = dev
            witnesses = [{"t": t, "value": _cstr(v1), "expected": _cstr(ref)}]
    return {
        "degree": deg,
        "lam_weight": lam_weight,
        "samples": n_samples,
        "max_rel_dev": worst,
        "tol": tol,
        "pass": bool(worst <= tol),
        "witness": witnesses,
    }


def _cstr(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}j"


# ---------------------------------------------------------------------------
# cosphere quadrature rules
# ---------------------------------------------------------------------------


class SphereRule:
    """Quadrature on the unit covariable sphere with measure (2*pi)^-n dS.

    For n=1 this is the exact two-point rule on {+1, -1}; for n=2 it is the
    equispaced (trapezoidal) rule on the circle, exact on trigonometric
    polynomials up to the requested degree.
    """

    def __init__(self, n: int, nodes, weights, normalization: float):
        self.n = n
        self.nodes = [tuple(p) for p in nodes]
        self.weights = list(weights)
        self.normalization = normalization

    def integrate(self, fn) -> complex:
        total = 0j
        for p, w in zip(self.nodes, self.weights):
            total += w * complex(fn(p))
        return total

    def total_weight(self) -> float:
        return float(sum(self.weights))


def sphere_quadrature(n: int, degree: int = 8) -> SphereRule:
    if degree < 1:
        raise UsageError("quadrature degree must be >= 1")
    norm = (2.0 * math.pi) ** (-n)
    if n == 1:
        return SphereRule(1, [(1.0,), (-1.0,)], [norm, norm], norm)
    if n == 2:
        m = 2 * (degree + 1)
        nodes = []
        weights = []
        for j in range(m):
            th = 2.0 * math.pi * j / m
            nodes.append((math.cos(th), math.sin(th)))
            weights.append(2.0 * math.pi / m * norm)
        return SphereRule(2, nodes, weights, norm)
    raise UsageError(f"unsupported covariable dimension {n} (only 1 and 2)")


# ---------------------------------------------------------------------------
# trigonometric-polynomial coefficient fields on the torus
# ---------------------------------------------------------------------------


class ScalarField:
    """Finite trigonometric polynomial on the n-torus.

    Stored as a map from integer frequency vectors to coefficients
    (exact Gaussian rationals where possible).
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping[tuple, object]):
        self.dim = dim
        clean = {}
        for k, c in coeffs.items():
            k = tuple(int(i) for i in k)
            if len(k) != dim:
                raise UsageError(f"frequency {k} has wrong dimension (expected {dim})")
            if isinstance(c, (int, Fraction)):
                c = (_as_frac(c), _F0)
            elif isinstance(c, tuple):
                c = (_as_frac(c[0]), _as_frac(c[1]))
            else:
                c = complex(c)
            if not _num_is_zero(c):
                clean[k] = c
        self.coeffs = clean

    @staticmethod
    def constant(c, dim: int = 1) -> "ScalarField":
        return ScalarField(dim, {(0,) * dim: c})

    @staticmethod
    def cosine(axis: int = 0, dim: int = 1, freq: int = 1, amplitude=1) -> "ScalarField":
        half = (
            (Fraction(amplitude) / 2, _F0)
            if isinstance(amplitude, (int, Fraction))
            else complex(amplitude) / 2.0
        )
        up = [0] * dim
        up[axis] = freq
        dn = [0] * dim
        dn[axis] = -freq
        return ScalarField(dim, {tuple(up): half, tuple(dn): half})

    def __add__(self, other: "ScalarField") -> "ScalarField":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = _num_add(out[k], c) if k in out else c
        return ScalarField(self.dim, out)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            out: dict = {}
            for k1, c1 in self.coeffs.items():
                for k2, c2 in other.coeffs.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    c = _num_mul(c1, c2)
                    out[k] = _num_add(out[k], c) if k in out else c
            return ScalarField(self.dim, out)
        scale = (_as_frac(other), _F0) if isinstance(other, (int, Fraction)) else complex(other)
        return ScalarField(self.dim, {k: _num_mul(c, scale) for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def d_dx(self, axis: int) -> "ScalarField":
        out = {}
        for k, c in self.coeffs.items():
            if k[axis] == 0:
                continue
            out[k] = _num_mul(c, (_F0, _as_frac(k[axis])))  # d/dx e^{ikx} = ik e^{ikx}
        return ScalarField(self.dim, out)

    def d_Dx(self, axis: int) -> "ScalarField":
        """Apply D = -i d/dx along one axis (exact: e^{ikx} -> k e^{ikx})."""
        out = {}
        for k, c in self.coeffs.items():
            if k[axis] == 0:
                continue
            out[k] = _num_mul(c, (_as_frac(k[axis]), _F0))
        return ScalarField(self.dim, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_real(self) -> bool:
        for k, c in self.coeffs.items():
            kneg = tuple(-i for i in k)
            conj = self.coeffs.get(kneg)
            if conj is None:
                return False
            c1 = _num_complex(c)
            c2 = _num_complex(conj)
            if abs(c1 - c2.conjugate()) > 1e-13 * max(1.0, abs(c1)):
                return False
        return True

    def degree(self) -> int:
        return max((max(abs(i) for i in k) for k in self.coeffs), default=0)

    def mean(self):
        c = self.coeffs.get((0,) * self.dim)
        return 0j if c is None else _num_complex(c)

    def to_expr(self, xnames: Iterable[str]) -> Expr:
        xnames = tuple(xnames)
        terms = []
        for k, c in self.coeffs.items():
            fs = [cis(xnames[i], ki) for i, ki in enumerate(k) if ki != 0]
            terms.append(mul(_num_to_expr(c), *fs))
        return add(*terms)

    def __repr__(self):
        return f"ScalarField(dim={self.dim}, {len(self.coeffs)} modes, degree {self.degree()})"


# ---------------------------------------------------------------------------
# prefix-text serialisation
# ---------------------------------------------------------------------------


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def to_prefix(e: Expr) -> str:
    """Serialise to the documented prefix text form."""
    if isinstance(e, QNum):
        if e.im == 0:
            return _frac_str(e.re)
        return f"(q {_frac_str(e.re)} {_frac_str(e.im)})"
    if isinstance(e, CNum):
        return f"(c {e.cval.real!r} {e.cval.imag!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, AbsXi):
        return "(abs " + " ".join(e.names) + ")"
    if isinstance(e, Sum):
        return "(+ " + " ".join(to_prefix(t) for t in e.terms) + ")"
    if isinstance(e, Prod):
        parts = [to_prefix(_num_to_expr(e.coeff))] if not _num_is_one(e.coeff) else []
        parts += [to_prefix(f) for f in e.factors]
        if len(parts) == 1:
            return parts[0]
        return "(* " + " ".join(parts) + ")"
    if isinstance(e, IPow):
        return f"(^ {to_prefix(e.base)} {e.k})"
    if isinstance(e, RPow):
        return f"(^r {to_prefix(e.base)} {_frac_str(e.r)})"
    if isinstance(e, Cis):
        return f"(cis {e.name} {_frac_str(e.k)})"
    if isinstance(e, Ln):
        return f"(log {to_prefix(e.arg)})"
    if isinstance(e, NegAxisIntegral):
        return f"(negint {to_prefix(e.arg)})"
    raise UsageError(f"cannot serialise {type(e).__name__}")


def _tokenize(s: str) -> list:
    return s.replace("(", " ( ").replace(")", " ) ").split()


def parse_prefix(s: str) -> Expr:
    """Parse the prefix text form back into an expression."""
    toks = _tokenize(s)
    pos = 0

    def atom(tok: str) -> Expr:
        if "/" in tok or tok.lstrip("+-").isdigit():
            return qnum(Fraction(tok))
        return var(tok)

    def read() -> Expr:
        nonlocal pos
        if pos >= len(toks):
            raise UsageError("unexpected end of prefix expression")
        tok = toks[pos]
        pos += 1
        if tok != "(":
            return atom(tok)
        head = toks[pos]
        pos += 1
        args: list = []
        while toks[pos] != ")":
            if head in ("abs", "cis") or (head in ("q", "c", "^", "^r") and toks[pos] != "("):
                args.append(toks[pos])
                pos += 1
            else:
                args.append(read())
        pos += 1
        def as_node(a):
            return a if isinstance(a, Expr) else atom(a)

        if head == "q":
            return qnum(Fraction(args[0]), Fraction(args[1]))
        if head == "c":
            return cnum(complex(float(args[0]), float(args[1])))
        if head == "abs":
            return absxi(args)
        if head == "+":
            return add(*args)
        if head == "*":
            return mul(*args)
        if head == "^":
            return ipow(as_node(args[0]), int(args[1]))
        if head == "^r":
            return rpow(as_node(args[0]), Fraction(args[1]))
        if head == "cis":
            return cis(args[0], Fraction(args[1]))
        if head == "log":
            return ln(args[0])
        if head == "negint":
            return negaxis_integral(args[0])
        raise UsageError(f"unknown prefix operator '{head}'")

    out = read()
    if pos != len(toks):
        raise UsageError("trailing tokens in prefix expression")
    return out
