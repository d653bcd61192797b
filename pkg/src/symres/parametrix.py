"""Polyhomogeneous symbol algebra and the resolvent parametrix recursion.

Symbols live on flat model geometries (T^1, T^2); compositions use the
Leibniz rule sum (1/a!) d_xi^a (left) * D_x^a (right) with D = -i d/dx, the
spectral parameter treated as inert.  The parametrix of an elliptic
differential operator of order m is built term by term,

    q_{-m}   = (p_m - lam)^{-1},
    q_{-m-j} = -q_{-m} * sum_{|a|+k+l=j, k<j} (1/a!) d_xi^a p_{m-l} D_x^a q_{-m-k},

and every produced term carries a structural certificate (nu, r): a sound
lower bound nu on the number of resolvent factors in each constituent and
the resulting homogeneity budget r = degree + nu*m of the parameter-free
factors, which decides integrability at xi = 0 (r > -n) and spectral decay
(|lam|^{-nu}) in integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .symexpr import (
    LAMBDA,
    DomainError,
    Expr,
    ScalarField,
    UsageError,
    ZERO,
    absxi,
    add,
    as_expr,
    differentiate,
    evaluate,
    free_vars,
    homogeneity_check,
    ipow,
    mul,
    qnum,
    sphere_quadrature,
    to_prefix,
    var,
)

__all__ = [
    "ConstructionError",
    "DifferentialOperator",
    "PolyhomSymbol",
    "ParamTerm",
    "ParamSymbol",
    "xi_names",
    "x_names",
    "compose",
    "compose_param",
    "resolvent_expansion",
    "resolvent_difference",
    "commutator_resolvent_terms",
    "integrability_report",
]


class ConstructionError(ValueError):
    """An operator or symbol violates a structural requirement."""


def xi_names(dim: int) -> tuple:
    return tuple(f"xi{i + 1}" for i in range(dim))


def x_names(dim: int) -> tuple:
    return tuple(f"x{i + 1}" for i in range(dim))


def _multiindices(dim: int, total: int):
    if dim == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _multiindices(dim - 1, total - head):
            yield (head,) + rest


def _mi_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def _falling(beta: Sequence[int], alpha: Sequence[int]) -> int:
    out = 1
    for b, a in zip(beta, alpha):
        if b < a:
            return 0
        for i in range(a):
            out *= b - i
    return out


def _dx_alpha(e: Expr, alpha: Sequence[int], xvars: Sequence[str]) -> Expr:
    """D_x^alpha with D = -i d/dx, applied coordinate by coordinate."""
    out = e
    n = 0
    for ax, a in enumerate(alpha):
        for _ in range(a):
            out = differentiate(out, xvars[ax])
            n += 1
            if out is ZERO:
                return ZERO
    if n == 0:
        return out
    return mul(ipow(qnum(0, -1), n), out)


def _dxi_alpha(e: Expr, alpha: Sequence[int], xivars: Sequence[str]) -> Expr:
    out = e
    for ax, a in enumerate(alpha):
        for _ in range(a):
            out = differentiate(out, xivars[ax])
            if out is ZERO:
                return ZERO
    return out


# ---------------------------------------------------------------------------
# differential operators with trigonometric-polynomial coefficients
# ---------------------------------------------------------------------------


class DifferentialOperator:
    """sum_{|a| <= m} c_a(x) D^a on the flat torus, scalar coefficients."""

    def __init__(self, dim: int, order: int, coeffs: Mapping[tuple, ScalarField]):
        self.dim = dim
        self.order = order
        clean = {}
        for a, c in coeffs.items():
            a = tuple(int(i) for i in a)
            if len(a) != dim:
                raise UsageError(f"multi-index {a} has wrong dimension")
            if sum(a) > order:
                raise UsageError(f"multi-index {a} exceeds declared order {order}")
            if not isinstance(c, ScalarField):
                c = ScalarField.constant(c, dim)
            if not c.is_zero():
                clean[a] = c
        if not any(sum(a) == order for a in clean):
            raise ConstructionError(f"no coefficient of top order {order}")
        self.coeffs = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def laplacian(dim: int, shift=0) -> "DifferentialOperator":
        coeffs = {}
        for ax in range(dim):
            a = [0] * dim
            a[ax] = 2
            coeffs[tuple(a)] = ScalarField.constant(1, dim)
        coeffs[(0,) * dim] = ScalarField.constant(shift, dim)
        return DifferentialOperator(dim, 2, coeffs)

    @staticmethod
    def schroedinger_1d(potential: ScalarField) -> "DifferentialOperator":
        return DifferentialOperator(1, 2, {(2,): ScalarField.constant(1), (0,): potential})

    # -- symbols -----------------------------------------------------------

    def symbol_terms(self) -> dict:
        """Homogeneous-in-xi pieces p_{m-l}, keyed by degree m-l."""
        xin = xi_names(self.dim)
        xn = x_names(self.dim)
        by_deg: dict = {}
        for a, c in self.coeffs.items():
            deg = sum(a)
            mono = mul(*[ipow(var(xin[i]), a[i]) for i in range(self.dim) if a[i] > 0]) if deg else qnum(1)
            term = mul(c.to_expr(xn), mono)
            by_deg[Fraction(deg)] = add(by_deg.get(Fraction(deg), ZERO), term)
        return {d: e for d, e in by_deg.items() if e is not ZERO}

    def principal_expr(self) -> Expr:
        return self.symbol_terms()[Fraction(self.order)]

    def full_symbol(self) -> "PolyhomSymbol":
        terms = self.symbol_terms()
        return PolyhomSymbol(self.dim, Fraction(self.order), terms, depth=self.order)

    # -- algebra -----------------------------------------------------------

    def compose(self, other: "DifferentialOperator") -> "DifferentialOperator":
        """Exact operator composition (finite Leibniz sum on coefficients)."""
        if self.dim != other.dim:
            raise UsageError("dimension mismatch in composition")
        dim = self.dim
        out: dict = {}

        def bump(idx, fld):
            if idx in out:
                out[idx] = out[idx] + fld
            else:
                out[idx] = fld

        for beta, a_c in self.coeffs.items():
            for gamma, b_c in other.coeffs.items():
                for total in range(sum(beta) + 1):
                    for alpha in _multiindices(dim, total):
                        fall = _falling(beta, alpha)
                        if fall == 0:
                            continue
                        dcoef = b_c
                        zero = False
                        for ax in range(dim):
                            for _ in range(alpha[ax]):
                                dcoef = dcoef.d_Dx(ax)
                                if dcoef.is_zero():
                                    zero = True
                                    break
                            if zero:
                                break
                        if zero:
                            continue
                        fld = dcoef * a_c * Fraction(fall, _mi_factorial(alpha))
                        idx = tuple(b - al + g for b, al, g in zip(beta, alpha, gamma))
                        bump(idx, fld)
        return DifferentialOperator(dim, self.order + other.order, out)

    def square(self) -> "DifferentialOperator":
        return self.compose(self)

    def shifted(self, c) -> "DifferentialOperator":
        coeffs = dict(self.coeffs)
        zero_idx = (0,) * self.dim
        base = coeffs.get(zero_idx, ScalarField.constant(0, self.dim))
        coeffs[zero_idx] = base + ScalarField.constant(c, self.dim)
        return DifferentialOperator(self.dim, self.order, coeffs)

    # -- ellipticity -------------------------------------------------------

    def ellipticity_report(
        self,
        sector_halfangle: float = math.pi / 6,
        nx: int = 8,
        sphere_degree: int = 12,
        min_modulus: float = 1e-9,
    ) -> dict:
        """Sample |p_m| > 0 and distance of arg p_m from the negative axis."""
        pm = self.principal_expr()
        rule = sphere_quadrature(self.dim, sphere_degree)
        xn = x_names(self.dim)
        xin = xi_names(self.dim)
        worst_mod = float("inf")
        worst_gap = float("inf")
        witness = None
        grid = [2.0 * math.pi * i / nx for i in range(nx)]
        for xs in itertools.product(grid, repeat=self.dim):
            env = dict(zip(xn, xs))
            for node in rule.nodes:
                env.update(zip(xin, node))
                v = evaluate(pm, env)
                gap = abs(abs(math.atan2(v.imag, v.real)) - math.pi)
                if abs(v) < worst_mod:
                    worst_mod = abs(v)
                    witness = dict(env)
                worst_gap = min(worst_gap, gap)
        ok = worst_mod > min_modulus and worst_gap > sector_halfangle
        return {
            "pass": bool(ok),
            "min_principal_modulus": worst_mod,
            "min_angle_from_cut": worst_gap,
            "sector_halfangle": sector_halfangle,
            "witness": {k: float(v.real) if isinstance(v, complex) else float(v) for k, v in (witness or {}).items()},
        }

    def require_elliptic(self, **kw) -> None:
        rep = self.ellipticity_report(**kw)
        if not rep["pass"]:
            raise ConstructionError(
                "principal symbol fails the ellipticity-with-ray sampling: "
                f"min modulus {rep['min_principal_modulus']:.3e}, "
                f"min angle from the cut {rep['min_angle_from_cut']:.3e} at {rep['witness']}"
            )

    def __repr__(self):
        return f"DifferentialOperator(dim={self.dim}, order={self.order}, {len(self.coeffs)} coeffs)"


# ---------------------------------------------------------------------------
# polyhomogeneous (parameter-free) symbols
# ---------------------------------------------------------------------------


@dataclass
class PolyhomSymbol:
    """Classical symbol: homogeneous terms of degrees order - j, j = 0..depth."""

    dim: int
    order: Fraction
    terms: dict
    depth: int
    notes: tuple = ()

    def __post_init__(self):
        self.order = Fraction(self.order)
        self.terms = {Fraction(d): e for d, e in self.terms.items() if e is not ZERO}

    def term(self, degree) -> Expr:
        return self.terms.get(Fraction(degree), ZERO)

    @staticmethod
    def multiplier(expr: Expr, order, dim: int, depth: int = 0) -> "PolyhomSymbol":
        return PolyhomSymbol(dim, Fraction(order), {Fraction(order): expr}, depth)

    @staticmethod
    def abs_multiplier(dim: int, power=1) -> "PolyhomSymbol":
        p = Fraction(power)
        base = absxi(xi_names(dim))
        if p.denominator == 1:
            e = ipow(base, int(p))
        else:
            e = base**p
        return PolyhomSymbol.multiplier(e, p, dim)

    def check_homogeneity(self, n_samples: int = 10, tol: float = 1e-9, seed: int = 0) -> dict:
        reports = {}
        for d, e in sorted(self.terms.items(), reverse=True):
            reports[str(d)] = homogeneity_check(e, d, xi_names(self.dim), n_samples=n_samples, tol=tol, seed=seed)
        return {"pass": all(r["pass"] for r in reports.values()), "terms": reports}


# ---------------------------------------------------------------------------
# parameter-dependent terms with structural certificates
# ---------------------------------------------------------------------------


@dataclass
class ParamTerm:
    """One quasi-homogeneous term of a resolvent-type symbol."""

    degree: Fraction
    expr: Expr
    nu: int | None
    m: int

    @property
    def r(self) -> Fraction | None:
        """Homogeneity budget of the parameter-free factors: degree + nu*m."""
        if self.nu is None:
            return None
        return Fraction(self.degree) + self.nu * self.m

    def is_zero(self) -> bool:
        return self.expr is ZERO

    def certificate_ok(self, j: Fraction | None = None) -> bool:
        if self.nu is None:
            return True
        if j is None:
            j = -Fraction(self.degree) - self.m
        if j == 0:
            return self.nu == 1 and self.r == 0
        return 2 <= self.nu <= 2 * j + 1 and self.r == -j + (self.nu - 1) * self.m


@dataclass
class ParamSymbol:
    """Truncated resolvent parametrix: terms at degrees -m-j, j = 0..depth."""

    dim: int
    m: int
    terms: list
    depth: int
    notes: tuple = ()

    def term(self, j: int) -> ParamTerm:
        return self.terms[j]

    def term_list(self) -> list:
        return list(self.terms)


def _lam_free(e: Expr) -> bool:
    return LAMBDA not in free_vars(e)


TermTriple = tuple  # (degree: Fraction, expr: Expr, nu: int)


def _compose_lambda_terms(
    left: Iterable[TermTriple],
    right: Iterable[TermTriple],
    dim: int,
    depth: int,
    top_degree: Fraction,
) -> list:
    """Leibniz composition of graded term lists, spectral parameter inert.

    Keeps output degrees >= top_degree - depth; returns (degree, expr, nu)
    sorted by descending degree, with nu the minimum over contributions.
    """
    xin = xi_names(dim)
    xn = x_names(dim)
    acc: dict = {}
    nus: dict = {}
    left = [t for t in left if t[1] is not ZERO]
    right = [t for t in right if t[1] is not ZERO]
    for da, ea, na in left:
        for db, eb, nb in right:
            base = Fraction(da) + Fraction(db)
            max_alpha = int(base - (top_degree - depth))
            for total in range(0, max_alpha + 1):
                for alpha in _multiindices(dim, total):
                    ga = _dxi_alpha(ea, alpha, xin)
                    if ga is ZERO:
                        continue
                    gb = _dx_alpha(eb, alpha, xn)
                    if gb is ZERO:
                        continue
                    deg = base - total
                    piece = mul(qnum(Fraction(1, _mi_factorial(alpha))), ga, gb)
                    if piece is ZERO:
                        continue
                    acc[deg] = add(acc.get(deg, ZERO), piece)
                    nus[deg] = min(nus.get(deg, na + nb), na + nb)
    out = []
    for deg in sorted(acc, reverse=True):
        if acc[deg] is ZERO:
            continue
        out.append((deg, acc[deg], nus[deg]))
    return out


def compose(a: PolyhomSymbol, b: PolyhomSymbol, depth: int) -> PolyhomSymbol:
    """Asymptotic composition of two parameter-free classical symbols."""
    if a.dim != b.dim:
        raise UsageError("dimension mismatch in symbol composition")
    notes = []
    if a.depth < depth or b.depth < depth:
        notes.append(f"inputs truncated below requested depth {depth}")
    top = a.order + b.order
    triples = _compose_lambda_terms(
        [(d, e, 0) for d, e in a.terms.items()],
        [(d, e, 0) for d, e in b.terms.items()],
        a.dim,
        depth,
        top,
    )
    return PolyhomSymbol(a.dim, top, {d: e for d, e, _ in triples}, depth, tuple(notes))


def _as_left_terms(a, dim: int):
    """Accept a PolyhomSymbol or DifferentialOperator as graded lam-free terms."""
    if isinstance(a, DifferentialOperator):
        if a.dim != dim:
            raise UsageError("dimension mismatch")
        return [(d, e, 0) for d, e in a.symbol_terms().items()], Fraction(a.order)
    if isinstance(a, PolyhomSymbol):
        if a.dim != dim:
            raise UsageError("dimension mismatch")
        return [(d, e, 0) for d, e in a.terms.items()], a.order
    raise UsageError(f"unsupported left factor {type(a).__name__}")


def compose_param(a, q, depth: int) -> list:
    """Compose a parameter-free symbol with resolvent-type terms.

    Returns a list of ParamTerm carrying merged certificates; the left
    factor must not involve the spectral parameter.
    """
    if isinstance(q, ParamSymbol):
        dim, m, qterms = q.dim, q.m, q.terms
    else:
        qterms = list(q)
        if not qterms:
            return []
        dim, m = _param_dim_m(qterms)
    left, lorder = _as_left_terms(a, dim)
    for _, e, _nu in left:
        if not _lam_free(e):
            raise UsageError("left factor of a parameter composition must be free of the spectral parameter")
    right = [(t.degree, t.expr, t.nu) for t in qterms if not t.is_zero()]
    top = lorder + (max((t.degree for t in qterms if not t.is_zero()), default=Fraction(-m)))
    triples = _compose_lambda_terms(left, right, dim, depth, top)
    return [ParamTerm(d, e, nu, m) for d, e, nu in triples]


def _param_dim_m(terms: Sequence[ParamTerm]):
    m = terms[0].m
    fv = set()
    for t in terms:
        fv |= free_vars(t.expr)
    dim = max((int(nm[2:]) for nm in fv if nm.startswith("xi")), default=1)
    return dim, m


# ---------------------------------------------------------------------------
# the parametrix recursion
# ---------------------------------------------------------------------------


def resolvent_expansion(P: DifferentialOperator, depth: int, check_elliptic: bool = True) -> ParamSymbol:
    """Seeley parametrix terms q_{-m-j}, j = 0..depth, with certificates."""
    if check_elliptic:
        P.require_elliptic()
    m = P.order
    dim = P.dim
    xin = xi_names(dim)
    xn = x_names(dim)
    psym = P.symbol_terms()
    pm = psym[Fraction(m)]
    q0 = ipow(add(pm, mul(qnum(-1), var(LAMBDA))), -1)
    terms = [ParamTerm(Fraction(-m), q0, 1, m)]
    for j in range(1, depth + 1):
        pieces = []
        contributing_nus = []
        for k in range(j):
            qk = terms[k]
            if qk.is_zero():
                continue
            for l in range(0, min(j - k, m) + 1):
                pl = psym.get(Fraction(m - l))
                if pl is None:
                    continue
                total = j - k - l
                if total < 0:
                    continue
                for alpha in _multiindices(dim, total):
                    ga = _dxi_alpha(pl, alpha, xin)
                    if ga is ZERO:
                        continue
                    gb = _dx_alpha(qk.expr, alpha, xn)
                    if gb is ZERO:
                        continue
                    piece = mul(qnum(Fraction(1, _mi_factorial(alpha))), ga, gb)
                    if piece is ZERO:
                        continue
                    pieces.append(piece)
                    contributing_nus.append(qk.nu)
        if pieces:
            expr = mul(qnum(-1), q0, add(*pieces))
        else:
            expr = ZERO
        if expr is ZERO:
            terms.append(ParamTerm(Fraction(-m - j), ZERO, None, m))
        else:
            nu = 1 + min(contributing_nus)
            terms.append(ParamTerm(Fraction(-m - j), expr, nu, m))
    return ParamSymbol(dim, m, terms, depth)


def resolvent_difference(P1: DifferentialOperator, P2: DifferentialOperator, depth: int) -> list:
    """Termwise difference of two parametrices; every term has nu >= 2.

    The leading difference carries nu = 2 through the factorisation
    q1 (p2 - p1) q2 of the difference of the principal resolvent factors.
    """
    if P1.order != P2.order or P1.dim != P2.dim:
        raise UsageError("resolvent difference needs equal orders and dimensions")
    q1 = resolvent_expansion(P1, depth)
    q2 = resolvent_expansion(P2, depth)
    out = []
    for j in range(depth + 1):
        e = add(q1.terms[j].expr, mul(qnum(-1), q2.terms[j].expr))
        if e is ZERO:
            out.append(ParamTerm(Fraction(-P1.order - j), ZERO, None, P1.order))
            continue
        if j == 0:
            nu = 2
        else:
            nu = min(q1.terms[j].nu or 2, q2.terms[j].nu or 2)
        out.append(ParamTerm(Fraction(-P1.order - j), e, nu, P1.order))
    return out


def commutator_resolvent_terms(
    A: PolyhomSymbol,
    Aprime: PolyhomSymbol,
    P: DifferentialOperator,
    depth: int,
) -> list:
    """Symbol terms of A (P - lam)^{-1} [P, A'] (P - lam)^{-1}.

    Requires auxiliary order m > n + ord(A) + ord(A') so the composed
    operator is trace class; each output term carries nu >= 2.
    """
    n = P.dim
    if Fraction(P.order) <= n + A.order + Aprime.order:
        raise UsageError(
            "commutator composition needs auxiliary order m > n + ord(A) + ord(A'); "
            f"got m={P.order}, n={n}, ord(A)={A.order}, ord(A')={Aprime.order}"
        )
    if A.dim != n or Aprime.dim != n:
        raise UsageError("dimension mismatch")
    psym = P.full_symbol()
    pa = compose(psym, Aprime, depth)
    ap = compose(Aprime, psym, depth)
    bracket_terms: dict = {}
    for d in set(pa.terms) | set(ap.terms):
        e = add(pa.term(d), mul(qnum(-1), ap.term(d)))
        if e is not ZERO:
            bracket_terms[d] = e
    bracket = PolyhomSymbol(n, psym.order + Aprime.order, bracket_terms, depth)

    q = resolvent_expansion(P, depth)
    qtriples = [(t.degree, t.expr, t.nu) for t in q.terms if not t.is_zero()]
    w1 = _compose_lambda_terms(
        [(d, e, 0) for d, e in bracket.terms.items()],
        qtriples,
        n,
        depth,
        bracket.order - Fraction(P.order),
    )
    w2 = _compose_lambda_terms(qtriples, w1, n, depth, max((d for d, _, _ in w1), default=Fraction(0)) - Fraction(P.order))
    r = _compose_lambda_terms(
        [(d, e, 0) for d, e in A.terms.items()],
        w2,
        n,
        depth,
        A.order + max((d for d, _, _ in w2), default=Fraction(0)),
    )
    return [ParamTerm(d, e, nu, P.order) for d, e, nu in r]


# ---------------------------------------------------------------------------
# integrability classification
# ---------------------------------------------------------------------------


def integrability_report(term: ParamTerm, n: int, direction=None, seed: int = 0) -> dict:
    """Classify xi-integrability at 0 from the certificate, confirm by sampling.

    The strictly homogeneous term is O(|xi|^r) at xi = 0 for lam != 0, hence
    integrable iff r > -n.  The numeric probe evaluates along a ray at
    lam = -1 on |xi| in [1e-4, 1] and reports the fitted log-log slope.
    """
    if term.is_zero():
        return {"integrable": True, "r": None, "threshold": -n, "slope": None, "zero": True}
    r = term.r
    integrable = r is not None and r > -n
    xin = xi_names(n)
    env = {LAMBDA: -1.0}
    rng = random.Random(seed)
    for nm in sorted(free_vars(term.expr) - set(xin) - {LAMBDA}):
        env[nm] = rng.uniform(0.0, 2.0 * math.pi)
    if direction is None:
        direction = tuple(1.0 if i == 0 else 0.3 for i in range(n))
    nrm = math.sqrt(sum(d * d for d in direction))
    direction = tuple(d / nrm for d in direction)
    radii = [10.0 ** (-4 + 0.5 * i) for i in range(9)]  # 1e-4 .. 1
    vals = []
    for rad in radii:
        for i, nm in enumerate(xin):
            env[nm] = rad * direction[i]
        vals.append(abs(evaluate(term.expr, env)))
    slope = None
    pairs = [(math.log(rad), math.log(v)) for rad, v in zip(radii, vals) if v > 0]
    if len(pairs) >= 3:
        xs = [p[0] for p in pairs[:4]]
        ys = [p[1] for p in pairs[:4]]
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        den = sum((xv - xbar) ** 2 for xv in xs)
        slope = sum((xv - xbar) * (yv - ybar) for xv, yv in zip(xs, ys)) / den if den else 0.0
    return {
        "integrable": bool(integrable),
        "r": None if r is None else str(r),
        "nu": term.nu,
        "threshold": -n,
        "slope": slope,
        "zero": False,
    }
