"""Registry of named identity checks grouped into suites.

Each check fills an accumulator with ``(residual, scale)`` samples; the recorded
residual is scale-normalised so that a check passes iff
``max_residual <= tolerance``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _blades as bl
from . import affine as af
from . import algebra as alg
from . import calculus as calc
from . import dirac as dr
from . import fields as fl
from . import geometry as geo
from .errors import OffShellError

SUITES = ("algebra", "geometry", "calculus", "dirac", "affine")

#: tier -> (base tolerance as a function of h, scale factor)
TIERS = {
    "exact": (lambda h: 1e-12, lambda s: max(1.0, s)),
    "algebraic": (lambda h: alg.ALGEBRAIC_TOL, lambda s: max(1.0, s)),
    "fd": (lambda h: max(50.0 * h * h, 1e-9), lambda s: 1.0 + s),
    "nested_fd": (lambda h: max(100.0 * h * h, 1e-9), lambda s: 1.0 + s),
    "planewave": (lambda h: 1e-9, lambda s: 1.0),
    "conservation": (lambda h: 1e-8, lambda s: 1.0),
    "order": (lambda h: 0.1, lambda s: 1.0),
}


@dataclass
class Context:
    mf: object
    rng: np.random.Generator
    samples: int = 10
    h: float = geo.DEFAULT_H
    margin: float = 0.2

    def points(self, count=None):
        return self.mf.box.random_points(self.rng, self.samples if count is None else count, self.margin)

    def point(self):
        return self.points(1)[0]


@dataclass
class Accumulator:
    tier: str
    worst: float = 0.0
    count: int = 0
    notes: list = field(default_factory=list)

    def add(self, residual, scale=0.0):
        r = float(np.max(np.abs(residual))) if np.size(residual) else 0.0
        f = TIERS[self.tier][1](float(scale))
        self.worst = max(self.worst, r / f)
        self.count += 1


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    tier: str
    suite: str
    fn: object
    minkowski_only: bool = False


REGISTRY = {}


def check(cid, anchor, tier, minkowski_only=False):
    def deco(fn):
        REGISTRY[cid] = Check(cid, anchor, tier, cid.split(".")[0], fn, minkowski_only)
        return fn

    return deco


def suite_checks(name):
    if name == "all":
        return [REGISTRY[k] for k in sorted(REGISTRY) if REGISTRY[k].suite in SUITES]
    return [REGISTRY[k] for k in sorted(REGISTRY) if REGISTRY[k].suite == name]


def _scale(*arrays):
    return max(float(np.abs(a).max()) for a in arrays)


def _minkowski_ctx(ctx):
    return ctx if ctx.mf.constant else Context(geo.minkowski(), ctx.rng, ctx.samples, ctx.h, ctx.margin)


# ==========================================================================
# algebra
# ==========================================================================

def _metrics(ctx):
    """Metrics at sample points of the configured field, then random valid metrics."""
    pts = ctx.points()
    return [ctx.mf.at(x) for x in pts] + [alg.random_metric(ctx.rng) for _ in range(ctx.samples)]


@check("algebra.oracle", "grade-table product == covector-absorption product", "algebraic")
def _alg_oracle(ctx, acc):
    for m in _metrics(ctx):
        u, v = alg.random_multivector(ctx.rng), alg.random_multivector(ctx.rng)
        a, b = alg.clifford_mul(u, v, m), alg.clifford_mul_oracle(u, v, m)
        acc.add(a - b, _scale(b))


@check("algebra.associativity", "(UV)W = U(VW)", "algebraic")
def _alg_assoc(ctx, acc):
    for m in _metrics(ctx):
        u, v, w = (alg.random_multivector(ctx.rng) for _ in range(3))
        a = alg.clifford_mul(alg.clifford_mul(u, v, m), w, m)
        b = alg.clifford_mul(u, alg.clifford_mul(v, w, m), m)
        acc.add(a - b, _scale(a))


@check("algebra.anticommutator", "dx^m dx^n + dx^n dx^m = 2 g^{mn}", "algebraic")
def _alg_anti(ctx, acc):
    for m in _metrics(ctx):
        for mu in range(4):
            for nu in range(4):
                a, b = alg.basis(1 + mu), alg.basis(1 + nu)
                s = alg.clifford_mul(a, b, m) + alg.clifford_mul(b, a, m)
                acc.add(s - 2 * m.ginv[mu, nu] * alg.scalar(), _scale(s))


@check("algebra.double_star", "**U = (-1)^(k+1) U", "algebraic")
def _alg_star(ctx, acc):
    for m in _metrics(ctx):
        for j in range(bl.NBLADES):
            e = alg.basis(j)
            ss = alg.hodge_star(alg.hodge_star(e, m), m)
            acc.add(ss - (-1) ** (bl.GRADE[j] + 1) * e, _scale(ss))


@check("algebra.com", "Com(U, V) = UV - VU on 2-forms", "algebraic")
def _alg_com(ctx, acc):
    for m in _metrics(ctx):
        u, v = alg.random_multivector(ctx.rng, (2,)), alg.random_multivector(ctx.rng, (2,))
        c = alg.com(u, v, m)
        acc.add(c - alg.commutator(u, v, m), _scale(c))
        acc.add(c + alg.com(v, u, m), _scale(c))


@check("algebra.trace", "Tr(UV - VU) = 0, Tr(V^-1 U V) = Tr U", "algebraic")
def _alg_trace(ctx, acc):
    for m in _metrics(ctx):
        u, v = alg.random_multivector(ctx.rng), alg.random_multivector(ctx.rng)
        acc.add(alg.trace(alg.commutator(u, v, m)), _scale(alg.clifford_mul(u, v, m)))
        w = alg.scalar(2.0) + 0.3 * alg.random_multivector(ctx.rng)
        conj = alg.mul(m, alg.inverse(w, m), u, w)
        acc.add(alg.trace(conj) - alg.trace(u), _scale(conj))


@check("algebra.reversion", "U** = U, (UV)* = V* U*", "algebraic")
def _alg_rev(ctx, acc):
    for m in _metrics(ctx):
        u, v = alg.random_multivector(ctx.rng), alg.random_multivector(ctx.rng)
        acc.add(alg.reversion(alg.reversion(u)) - u, _scale(u))
        a = alg.reversion(alg.clifford_mul(u, v, m))
        acc.add(a - alg.clifford_mul(alg.reversion(v), alg.reversion(u), m), _scale(a))


def _random_spin(rng, m):
    return alg.exp_mv(alg.random_multivector(rng, (2,), 0.5), m)


@check("algebra.spin_closure", "S1 S2 and S^-1 stay in the Spin group", "algebraic")
def _alg_spin(ctx, acc):
    for m in _metrics(ctx):
        s1, s2 = _random_spin(ctx.rng, m), _random_spin(ctx.rng, m)
        for s in (alg.clifford_mul(s1, s2, m), alg.inverse(s1, m)):
            acc.add(alg.clifford_mul(alg.reversion(s), s, m) - alg.scalar(), _scale(s) ** 2)
            acc.add(s[bl.ODD], _scale(s))


@check("algebra.exp_bivector", "exp(lI) exp(-lI) = 1 for I^2 = -1", "algebraic")
def _alg_exp(ctx, acc):
    for _ in range(ctx.samples):
        lam = ctx.rng.uniform(-3, 3)
        i = alg.blade(1, 2)
        p = alg.clifford_mul(alg.exp_bivector(lam, i, alg.MINKOWSKI), alg.exp_bivector(-lam, i, alg.MINKOWSKI),
                             alg.MINKOWSKI)
        acc.add(p - alg.scalar())


# ==========================================================================
# geometry
# ==========================================================================

@check("geometry.axioms", "det g < 0, signature -2 at every box node", "exact")
def _geo_axioms(ctx, acc):
    acc.add(0.0)
    acc.count = geo.check_axioms(ctx.mf)


@check("geometry.metric_compatibility", "nabla_m g_{nl} = 0, nabla_m g^{nl} = 0", "fd")
def _geo_compat(ctx, acc):
    mf = ctx.mf
    gfield = fl.Field(mf.g, (lambda x: mf.dg(x)) if mf.dg_fn is not None else None, 0)
    ginv_field = fl.Field(lambda x: mf.at(x).ginv, None, 0)
    for x in ctx.points():
        for mu in range(4):
            a = calc.covariant_derivative(calc.IndexedField(gfield, 0, 2), mu, x, mf, ctx.h)
            b = calc.covariant_derivative(calc.IndexedField(ginv_field, 2, 0), mu, x, mf, ctx.h)
            acc.add(a, _scale(mf.g(x)))
            acc.add(b, _scale(mf.at(x).ginv))


@check("geometry.christoffel_fd", "finite-difference vs analytic Christoffel symbols", "fd")
def _geo_fd(ctx, acc):
    mf = ctx.mf
    if mf.dg_fn is None:
        acc.notes.append("no analytic partials; skipped")
        return
    for x in ctx.points():
        a = geo.christoffel(mf, x, "analytic")
        b = geo.christoffel(mf, x, "fd", ctx.h)
        acc.add(a - b, _scale(a))


@check("geometry.riemann_symmetries", "R_{abmn} antisymmetric pairs, first Bianchi identity", "fd")
def _geo_bianchi(ctx, acc):
    for x in ctx.points():
        c = geo.riemann(ctx.mf, x, h=ctx.h)
        r, rm = c.riemann_lower, c.riemann_mixed
        s = _scale(r) if r.size else 0.0
        acc.add(r + r.transpose(1, 0, 2, 3), s)
        acc.add(r + r.transpose(0, 1, 3, 2), s)
        acc.add(rm + rm.transpose(0, 2, 3, 1) + rm.transpose(0, 3, 1, 2), s)
        acc.add(c.c2form + c.c2form.transpose(1, 0, 2), s)


def fd_order(mf, x, h0=1e-2, levels=3):
    """Observed order of the differenced-Christoffel Riemann tensor under step halving."""
    exact = geo.riemann(mf, x, "analytic").riemann_mixed
    errs = []
    for i in range(levels):
        h = h0 / 2 ** i
        errs.append(np.abs(geo.riemann(mf, x, "fd", h).riemann_mixed - exact).max())
    errs = np.asarray(errs)
    if errs[0] < 1e-13:
        return None, errs
    return float(np.min(np.log2(errs[:-1] / errs[1:]))), errs


@check("geometry.fd_order", "central differences converge at second order", "order")
def _geo_order(ctx, acc):
    if not ctx.mf.analytic or ctx.mf.constant:
        acc.notes.append("needs a non-constant metric with analytic partials; skipped")
        return
    for x in ctx.points(max(1, min(3, ctx.samples))):
        order, _ = fd_order(ctx.mf, x)
        if order is not None:
            acc.add(max(0.0, 2.0 - order))


# ==========================================================================
# calculus
# ==========================================================================

def _rand_field(ctx, grades=(0, 1, 2, 3, 4)):
    return fl.random_multivector_field(ctx.rng, grades=grades)


@check("calculus.upsilon_agreement", "Leibniz construction == component construction of Y_mu", "fd")
def _calc_agree(ctx, acc):
    for x in ctx.points():
        u = _rand_field(ctx)
        a = calc.upsilon_all(u, x, ctx.mf, "leibniz", ctx.h)
        b = calc.upsilon_all(u, x, ctx.mf, "components", ctx.h)
        acc.add(a - b, _scale(a))


@check("calculus.upsilon_leibniz_rule", "Y_mu(UV) = (Y_mu U)V + U Y_mu V", "fd")
def _calc_leib(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        u, v = _rand_field(ctx), _rand_field(ctx)
        m = mf.at(x)
        uv = fl.product_field(u, v, mf)
        Yuv = calc.upsilon_all(uv, x, mf, h=ctx.h)
        Yu, Yv = calc.upsilon_all(u, x, mf, h=ctx.h), calc.upsilon_all(v, x, mf, h=ctx.h)
        for mu in range(4):
            rhs = alg.clifford_mul(Yu[mu], v(x), m) + alg.clifford_mul(u(x), Yv[mu], m)
            acc.add(Yuv[mu] - rhs, _scale(rhs))


@check("calculus.upsilon_commutes", "Y_mu commutes with *, star and Tr; preserves grade", "fd")
def _calc_comm(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        k = int(ctx.rng.integers(0, 5))
        u = _rand_field(ctx, (k,))
        m = mf.at(x)
        Y = calc.upsilon_all(u, x, mf, h=ctx.h)
        s = _scale(Y)
        Yrev = calc.upsilon_all(fl.reversion_field(u), x, mf, h=ctx.h)
        Ystar = calc.upsilon_all(calc.star_field(u, mf), x, mf, h=ctx.h)
        for mu in range(4):
            acc.add(Yrev[mu] - alg.reversion(Y[mu]), s)
            acc.add(Ystar[mu] - alg.hodge_star(Y[mu], m), s)
            acc.add(Y[mu] - alg.grade_project(Y[mu], k), s)
        tr = fl.Field(lambda y: alg.scalar(alg.trace(u(y))), None, 0)
        Ytr = calc.upsilon_all(tr, x, mf, h=ctx.h)
        acc.add(Ytr[:, 0] - Y[:, 0], s)


@check("calculus.d_squared", "d d U = 0, d raises grade by one", "nested_fd")
def _calc_dd(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        k = int(ctx.rng.integers(0, 4))
        u = _rand_field(ctx, (k,))
        du = calc.d_op(u, x, mf, h=ctx.h)
        acc.add(calc.d_op(calc.d_field(u, mf, h=ctx.h), x, mf, h=ctx.h), _scale(du))
        acc.add(du - alg.grade_project(du, k + 1), _scale(du))


@check("calculus.delta", "delta U = *d*U, delta delta U = 0, delta lowers grade by one", "nested_fd")
def _calc_delta(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        k = int(ctx.rng.integers(1, 5))
        u = _rand_field(ctx, (k,))
        de = calc.delta_op(u, x, mf, h=ctx.h)
        acc.add(de - calc.star_d_star(u, x, mf, h=ctx.h), _scale(de))
        acc.add(de - alg.grade_project(de, k - 1), _scale(de))
        acc.add(calc.delta_op(calc.delta_field(u, mf, h=ctx.h), x, mf, h=ctx.h), _scale(de))


@check("calculus.d_leibniz", "d(U^V) = dU^V + (-1)^k U^dV", "fd")
def _calc_dleib(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        k = int(ctx.rng.integers(0, 4))
        u, v = _rand_field(ctx, (k,)), _rand_field(ctx)
        uv = fl.Field(lambda y: alg.wedge(u(y), v(y)), None, 0)
        lhs = calc.d_op(uv, x, mf, h=ctx.h)
        rhs = (alg.wedge(calc.d_op(u, x, mf, h=ctx.h), v(x))
               + (-1) ** k * alg.wedge(u(x), calc.d_op(v, x, mf, h=ctx.h)))
        acc.add(lhs - rhs, _scale(rhs))


@check("calculus.curvature_commutator", "[Y_mu, Y_nu] U = 1/2 [C_{mu nu}, U]", "nested_fd")
def _calc_curv(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        u = _rand_field(ctx)
        mu, nu = ctx.rng.choice(4, 2, replace=False)
        acc.add(calc.curvature_commutator_check(u, x, mf, int(mu), int(nu), h=ctx.h), _scale(u(x)))


@check("calculus.tensor_leibniz", "nabla_mu(u (x) v) = nabla u (x) v + u (x) nabla v", "fd")
def _calc_tleib(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        u = fl.random_tensor_field(ctx.rng, (4,))
        v = fl.random_tensor_field(ctx.rng, (4,))
        uv = fl.Field(lambda y: np.outer(u(y), v(y)),
                      lambda y: np.einsum("ka,b->kab", u.grad(y), v(y)) + np.einsum("a,kb->kab", u(y), v.grad(y)), 0)
        for mu in range(4):
            lhs = calc.covariant_derivative(calc.IndexedField(uv, 1, 1), mu, x, mf, ctx.h)
            nu_ = calc.covariant_derivative(calc.IndexedField(u, 1, 0), mu, x, mf, ctx.h)
            nv_ = calc.covariant_derivative(calc.IndexedField(v, 0, 1), mu, x, mf, ctx.h)
            rhs = np.outer(nu_, v(x)) + np.outer(u(x), nv_)
            acc.add(lhs - rhs, _scale(rhs))


def boost(rapidity, axis=1):
    J = np.eye(4)
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    J[0, 0] = J[axis, axis] = c
    J[0, axis] = J[axis, 0] = s
    return J


@check("calculus.coordinate_change", "Y_nu = p^mu_nu Y~_mu under affine chart changes", "fd")
def _calc_coord(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        u = _rand_field(ctx)
        J = boost(ctx.rng.uniform(-0.3, 0.3), int(ctx.rng.integers(1, 4))) * ctx.rng.uniform(0.8, 1.2)
        acc.add(calc.coordinate_change_residual(u, J, mf, x, h=ctx.h), _scale(u(x)))


# ==========================================================================
# Dirac system
# ==========================================================================

def _state(ctx):
    return dr.random_state(ctx.rng, ctx.mf)


def _constraint_scale(st, x, mf, h):
    """Size of the operands ``Y_mu H``, ``Y_mu I`` entering the constraint lines."""
    return max(_scale(calc.upsilon_all(st.H, x, mf, h=h)), _scale(calc.upsilon_all(st.I, x, mf, h=h)), 1.0)


@check("dirac.background_constraints", "Y_mu H = [B_mu, H], Y_mu I = [B_mu, I], H^2 = 1, I^2 = -1, [H, I] = 0", "fd")
def _dir_cons(ctx, acc):
    for x in ctx.points():
        st = _state(ctx)
        scale = _constraint_scale(st, x, ctx.mf, ctx.h)
        for v in dr.constraint_residuals(st, x, ctx.mf, ctx.h).values():
            acc.add(v, scale)


@check("dirac.spin_covariance", "residual(Psi S, S^-1 H S, S^-1 I S, B') = residual * S", "fd")
def _dir_spin(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        st = _state(ctx)
        S = fl.random_spin_field(ctx.rng, mf)
        r = dr.first_line(st, x, mf, ctx.h)
        r2 = dr.first_line(dr.gauge_spin(st, S, mf, validate=False), x, mf, ctx.h)
        acc.add(r2 - alg.clifford_mul(r, S(x), mf.at(x)), _scale(r))


@check("dirac.u1_covariance", "residual(Psi exp(lI), a - dl) = residual * exp(lI)", "fd")
def _dir_u1(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        st = _state(ctx)
        lam = fl.random_scalar_field(ctx.rng)
        m = mf.at(x)
        r = dr.first_line(st, x, mf, ctx.h)
        r2 = dr.first_line(dr.gauge_u1(st, lam, mf), x, mf, ctx.h)
        acc.add(r2 - alg.clifford_mul(r, alg.exp_bivector(lam(x), st.I(x), m), m), _scale(r))


@check("dirac.bg_covariance", "background residual of B' = S^-1 (background residual of B) S", "nested_fd")
def _dir_bg(ctx, acc):
    mf = ctx.mf
    for x in ctx.points(max(1, ctx.samples // 2)):
        B = fl.random_tensor_field(ctx.rng, (4, bl.NBLADES), mask=fl.grade_mask((2,)), amp=0.3, offset=0.3)
        S = fl.random_spin_field(ctx.rng, mf)
        B2 = dr._b_transform(B, S, mf)
        m = mf.at(x)
        s = S(x)
        curv = geo.riemann(mf, x)
        mu, nu = (int(v) for v in ctx.rng.choice(4, 2, replace=False))
        r = dr.residual_bg(B, x, mf, mu, nu, ctx.h, curv)
        r2 = dr.residual_bg(B2, x, mf, mu, nu, ctx.h, curv)
        acc.add(r2 - alg.mul(m, alg.reversion(s), r, s), _scale(r))


@check("dirac.conjugate_form", "H L* = ((Y Pb - a I Pb - B Pb) dx - m I H Pb) Psi", "fd")
def _dir_conj(ctx, acc):
    for x in ctx.points():
        st = _state(ctx)
        r = dr.conjugate_form_check(st, x, ctx.mf, ctx.h)
        acc.add(r, _scale(dr.l_form(st, x, ctx.mf, ctx.h)))


@check("dirac.trace_identity", "Tr(H(L + L*)) = d_mu(sqrt(-g) j^mu) / sqrt(-g)", "fd")
def _dir_trace(ctx, acc):
    for x in ctx.points():
        st = _state(ctx)
        div, ident = dr.conservation_residual(st, x, ctx.mf, ctx.h)
        acc.add(ident, abs(div))


@check("dirac.current", "j^mu = Tr(Pb dx^mu Psi) = g^{mu nu} j_nu with J = Psi H Psi* a 1-form", "algebraic")
def _dir_current(ctx, acc):
    for x in ctx.points():
        st = _state(ctx)
        j, J = dr.current(st, x, ctx.mf)
        a, b = dr.current_consistency(st, x, ctx.mf)
        acc.add(np.array([a, b]), _scale(J))


@check("dirac.lagrangian", "Tr(sqrt(-g) H L I) equals the expanded density; gauge invariant", "fd")
def _dir_lagr(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        st = _state(ctx)
        L = dr.lagrangian_density(st, x, mf, ctx.h)
        acc.add(L - dr.lagrangian_density_expanded(st, x, mf, ctx.h), abs(L))
        S = fl.random_spin_field(ctx.rng, mf)
        acc.add(dr.lagrangian_density(dr.gauge_spin(st, S, mf, validate=False), x, mf, ctx.h) - L, abs(L))
        lam = fl.random_scalar_field(ctx.rng)
        acc.add(dr.lagrangian_density(dr.gauge_u1(st, lam, mf), x, mf, ctx.h) - L, abs(L))


@check("dirac.maxwell", "F = dA gives dF = 0; delta J = -d_mu(sqrt(-g) j^mu)/sqrt(-g); "
       "Tr(sqrt(-g) F^2) = -1/2 sqrt(-g) f f", "nested_fd")
def _dir_maxwell(ctx, acc):
    mf = ctx.mf
    for x in ctx.points(max(1, ctx.samples // 2)):
        A = _rand_field(ctx, (1,))
        st = _state(ctx)
        ms = dr.maxwell_from_potential(A, mf)
        res = dr.maxwell_residual(ms, st, x, mf, ctx.h)
        F = ms.F(x)
        acc.add(res.dA_minus_F, 1.0)
        acc.add(res.dF, _scale(F))
        div = dr.divergence(st, x, mf, ctx.h)
        acc.add(res.deltaJ + div / mf.at(x).sqrt_neg_det * alg.scalar(), abs(div))
        acc.add(dr.maxwell_lagrangian_identity(F, x, mf), _scale(F) ** 2)


@check("dirac.coupled_covariance", "D_mu form of the coupled system is covariant under both gauge maps", "nested_fd")
def _dir_ut(ctx, acc):
    mf = ctx.mf
    for x in ctx.points(max(1, ctx.samples // 3)):
        st = _state(ctx)
        A = _rand_field(ctx, (1,))
        ms = dr.maxwell_from_potential(A, mf)
        m = mf.at(x)
        curv = geo.riemann(mf, x)
        r = dr.residual_coupled(st, ms, x, mf, ctx.h, curv)
        main = dr.first_line(dr.replace(st, a=dr.a_from_potential(A)), x, mf, ctx.h)
        acc.add(r["dirac"] - main, _scale(main))
        S = fl.random_spin_field(ctx.rng, mf)
        s, sr = S(x), alg.reversion(S(x))
        st2, ms2 = dr.gauge_spin_ut(st, ms, S, mf, validate=False)
        r2 = dr.residual_coupled(st2, ms2, x, mf, ctx.h, curv)
        acc.add(r2["dirac"] - alg.clifford_mul(r["dirac"], s, m), _scale(r["dirac"]))
        scale = max(_constraint_scale(st, x, mf, ctx.h), _constraint_scale(st2, x, mf, ctx.h))
        for key in ("DH", "DI"):
            acc.add(r2[key] - np.stack([alg.mul(m, sr, r[key][k], s) for k in range(4)]), scale)
        acc.add(r2["deltaF_J"] - r["deltaF_J"], _scale(r["deltaF_J"]))
        lam = fl.random_scalar_field(ctx.rng)
        st3, ms3 = dr.gauge_u1_ut(st, ms, lam, mf)
        r3 = dr.residual_coupled(st3, ms3, x, mf, ctx.h, curv)
        e = alg.exp_bivector(lam(x), st.I(x), m)
        acc.add(r3["dirac"] - alg.clifford_mul(r["dirac"], e, m), _scale(r["dirac"]))
        acc.add(r3["dA_F"] - r["dA_F"], _scale(ms.F(x)))


@check("dirac.planewave", "plane wave solves the Minkowski system; current conserved", "planewave",
       minkowski_only=True)
def _dir_pw(ctx, acc):
    mink = _minkowski_ctx(ctx)
    for _ in range(max(1, ctx.samples // 5)):
        m = float(ctx.rng.uniform(0.5, 2.0))
        k = ctx.rng.normal(size=3) * 0.7
        p = np.concatenate([[np.sqrt(m * m + k @ k)], k])
        st = dr.planewave_solve(p, m)
        for x in mink.points(5):
            acc.add(dr.first_line(st, x, mink.mf, ctx.h))
            acc.add(dr.conservation_residual(st, x, mink.mf, ctx.h)[0])


# ==========================================================================
# affine model
# ==========================================================================

@check("affine.torsion_roundtrip", "T -> K -> T and K -> T -> K are exact", "exact")
def _aff_rt(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        T = ctx.rng.normal(size=(4, 4, 4))
        T = T - T.transpose(0, 2, 1)
        K = af.contorsion_from_torsion(T, x, mf)
        acc.add(af.torsion_from_contorsion(K) - T, _scale(T))
        acc.add(af.compatibility_defect(af.lower_first(K, mf.at(x).g)), _scale(K))
        K2 = af.random_contorsion_field(ctx.rng, mf)(x)
        acc.add(af.contorsion_from_torsion(af.torsion_from_contorsion(K2), x, mf) - K2, _scale(K2))


@check("affine.b_dictionary", "[B_mu, dx^nu] = K^nu_{mu l} dx^l", "exact")
def _aff_dict(ctx, acc):
    mf = ctx.mf
    for x in ctx.points():
        K = af.random_contorsion_field(ctx.rng, mf)
        B = af.b_from_contorsion(K, x)
        acc.add(af.contorsion_from_B(B, mf.at(x)) - K(x), _scale(K(x)))


@check("affine.metric_compatibility", "nabla_check g = 0 for compatible contorsion", "fd")
def _aff_compat(ctx, acc):
    for x in ctx.points():
        conn = af.AffineConnectionField(af.random_contorsion_field(ctx.rng, ctx.mf))
        acc.add(conn.nabla_metric(x), _scale(ctx.mf.g(x)))


@check("affine.upsilon_check", "Y_check_mu U = Y_mu U - [B_mu, U]", "fd")
def _aff_t8(ctx, acc):
    for x in ctx.points():
        K = af.random_contorsion_field(ctx.rng, ctx.mf)
        u = _rand_field(ctx)
        mu = int(ctx.rng.integers(4))
        acc.add(af.contorsion_split_residual(u, K, x, ctx.mf, mu, ctx.h), _scale(u(x)))


@check("affine.curvature_bg", "R_check_{abmn} = -2 q_{abmn}", "nested_fd")
def _aff_t9(ctx, acc):
    for x in ctx.points(max(1, ctx.samples // 2)):
        K = af.random_contorsion_field(ctx.rng, ctx.mf)
        q, rc, res = af.affine_curvature_check(K, x, ctx.mf, ctx.h)
        acc.add(res, _scale(rc))


@check("affine.flat_background", "coframe connection is flat and its B solves the background curvature system", "nested_fd")
def _aff_flat(ctx, acc):
    W = af.weitzenbock_affine(ctx.mf)
    for x in ctx.points(max(1, ctx.samples // 2)):
        q, rc, res = af.affine_curvature_check(W.K, x, ctx.mf, ctx.h, conn=W)
        acc.add(q, 1.0)
        acc.add(rc, 1.0)


@check("affine.pure_gauge", "B_mu = -U^-1 d_mu U solves d_mu B_nu - d_nu B_mu - [B_mu, B_nu] = 0", "nested_fd",
       minkowski_only=True)
def _aff_pure(ctx, acc):
    mink = _minkowski_ctx(ctx)
    mf = mink.mf
    for x in mink.points(max(1, ctx.samples // 2)):
        U = fl.random_spin_field(ctx.rng, mf)
        B = af.pure_gauge_field(U, mf)
        b = B(x)
        for mu in range(4):
            for nu in range(mu + 1, 4):
                acc.add(af.bb_residual(B, x, mf, mu, nu, ctx.h), _scale(b))
        K = af.ContorsionField(lambda y: af.contorsion_from_B(B(y), mf.at(y)), mf)
        conn = af.AffineConnectionField(K)
        acc.add(af.affine_curvature(conn, x, ctx.h), _scale(b))


# ==========================================================================
# plane-wave run (separate entry point)
# ==========================================================================

def planewave_checks(p, m, box, rng, h=geo.DEFAULT_H, sign=1):
    """Yield ``(id, anchor, tier, residual, scale_list)`` records for one momentum."""
    mf = geo.minkowski(box)
    out = []

    def rec(cid, anchor, tier, fn):
        acc = Accumulator(tier)
        fn(acc)
        out.append((cid, anchor, acc))

    st = dr.planewave_solve(p, m, sign, mf)
    nodes = box.nodes()

    def _res(acc):
        for x in nodes:
            acc.add(dr.first_line(st, x, mf, h))

    def _cons(acc):
        for x in nodes:
            acc.add(dr.conservation_residual(st, x, mf, h)[0])

    def _disp(acc):
        _, N = dr.planewave_amplitude(p, m, sign)
        ps = alg.vector(p)
        for _ in range(5):
            v = N @ rng.normal(size=N.shape[1])
            vv = alg.mul(alg.MINKOWSKI, ps, ps, v)
            acc.add(vv - m * m * v, _scale(v))

    def _gate(acc):
        bad = np.asarray(p, float).copy()
        bad[0] = np.sqrt(bad[0] ** 2 + 0.1)
        try:
            dr.planewave_solve(bad, m, sign, mf)
            acc.add(1.0)
        except OffShellError:
            acc.add(0.0)

    U = fl.random_spin_field(rng, mf)
    st_g = dr.pure_gauge_state(st, U, mf)
    pts = box.random_points(rng, 10)

    def _gauge(acc):
        for x in pts:
            r = dr.first_line(st, x, mf, h)
            acc.add(dr.first_line(st_g, x, mf, h) - alg.clifford_mul(r, U(x), mf.at(x)), _scale(r))
            for v in dr.constraint_residuals(st_g, x, mf, h).values():
                acc.add(v)

    fixed = dr.minkowski_gauge_fix(st_g, U, mf)

    def _fix(acc):
        for x in pts:
            for v in dr.gauge_fixed_residual(fixed, x, mf, h).values():
                acc.add(v)
            acc.add(fixed.B(x))

    def _global(acc):
        V = alg.exp_mv(alg.random_multivector(rng, (2,), 0.5), alg.MINKOWSKI)
        stv = dr.global_transform(fixed, V, mf)
        for x in pts:
            r = dr.gauge_fixed_residual(fixed, x, mf, h)
            rv = dr.gauge_fixed_residual(stv, x, mf, h)
            acc.add(rv["first"] - alg.clifford_mul(r["first"], V, alg.MINKOWSKI))
            acc.add(rv["dH"])
            acc.add(rv["dI"])

    rec("planewave.residual", "plane wave solves the first line at every box node", "planewave", _res)
    rec("planewave.conservation", "d_mu(sqrt(-g) j^mu) = 0", "conservation", _cons)
    rec("planewave.dispersion", "(p_mu dx^mu)^2 Psi0 = m^2 Psi0 on the null space", "algebraic", _disp)
    rec("planewave.offshell_gate", "off-shell momenta are rejected", "exact", _gate)
    rec("planewave.gauge", "pure-gauge transform multiplies the residual by U", "conservation", _gauge)
    rec("planewave.gauge_fix", "S = U^-1 removes B; H', I' constant", "conservation", _fix)
    rec("planewave.global_symmetry", "constant V maps gauge-fixed solutions to solutions", "conservation", _global)
    return out
