"""Acceptance criteria, one test per criterion, each timed against its budget.

Every test prints a single ``criterion N PASS|FAIL`` line; the lines are
repeated in the terminal summary.
"""
import json
import time

import numpy as np
import pytest

from cliffdirac import affine as af
from cliffdirac import algebra as alg
from cliffdirac import calculus as calc
from cliffdirac import cli
from cliffdirac import dirac as dr
from cliffdirac import fields as fl
from cliffdirac import geometry as geo
from cliffdirac.checks import REGISTRY, TIERS, Accumulator, Context, fd_order
from cliffdirac.errors import OffShellError
from cliffdirac.harness import SuiteConfig, exit_status, report_body, run_planewave, run_suite

from oracles import GammaRep, evaluate, sympy_christoffel, sympy_riemann

H = geo.DEFAULT_H
FD = TIERS["fd"][0](H)
NESTED = TIERS["nested_fd"][0](H)
pytestmark = pytest.mark.acceptance

PW_BOX = "-1:1,-1:1,-1:1,-1:1@5x5x2x2"


def run_check(cid, mf, samples, seed=0):
    """Run one registry check; returns (worst scaled residual, tier tolerance, draws)."""
    chk = REGISTRY[cid]
    ctx = Context(mf, np.random.default_rng([seed, len(cid)]), samples, H)
    acc = Accumulator(chk.tier)
    chk.fn(ctx, acc)
    return acc.worst, TIERS[chk.tier][0](H), acc.count


class Tally:
    def __init__(self):
        self.items = []

    def add(self, name, value, limit):
        self.items.append((name, float(value), float(limit)))

    @property
    def ok(self):
        return all(v <= lim for _, v, lim in self.items)

    def detail(self):
        def ratio(t):
            return t[1] / t[2] if t[2] else (np.inf if t[1] > 0 else 0.0)

        worst = max((t for t in self.items if t[0] != "runtime_s"), key=ratio)
        bad = [n for n, v, lim in self.items if v > lim]
        base = f"{len(self.items)} measures, tightest {worst[0]}={worst[1]:.2e} (limit {worst[2]:.0e})"
        return base + (f", failing: {', '.join(bad)}" if bad else "")


def finish(criterion, number, title, tally, t0, budget):
    elapsed = time.perf_counter() - t0
    tally.add("runtime_s", elapsed, budget)
    criterion(number, title, tally.ok, tally.detail(), elapsed)
    assert tally.ok, tally.detail()


def test_c01_product_oracle_equivalence(criterion):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    metrics = [alg.random_metric(rng) for _ in range(20)]
    for m in metrics:
        for _ in range(50):
            u, v = rng.normal(size=16), rng.normal(size=16)
            a, b = alg.clifford_mul(u, v, m), alg.clifford_mul_oracle(u, v, m)
            worst = max(worst, np.abs(a - b).max() / np.abs(b).max())
    elapsed = time.perf_counter() - t0
    tally = Tally()
    tally.add("relative", worst, 1e-12)
    # independent check against a gamma-matrix representation, one pair per metric
    gam = 0.0
    for m in metrics:
        rep = GammaRep(m.ginv)
        u, v = rng.normal(size=16), rng.normal(size=16)
        want = rep.mul(u, v)
        gam = max(gam, np.abs(alg.clifford_mul(u, v, m) - want).max() / np.abs(want).max())
    tally.add("gamma_matrix_relative", gam, 1e-11)
    tally.add("runtime_s", elapsed, 5.0)
    criterion(1, "product vs oracle, 1000 pairs x 20 metrics", tally.ok, tally.detail(), elapsed)
    assert tally.ok, tally.detail()


def test_c02_algebraic_identities(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for cid in sorted(k for k in REGISTRY if k.startswith("algebra.")):
        worst, _, n = run_check(cid, geo.flrw(), 25)
        assert n > 0
        tally.add(cid, worst, 1e-11)
    finish(criterion, 2, "algebraic identity suite", tally, t0, 5.0)


def test_c03_geometry(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    rng = np.random.default_rng(303)
    mink, flrw = geo.minkowski(), geo.flrw(1.0, 0.1)
    G_sym, R_sym = sympy_christoffel((1.0, 0.1)), sympy_riemann((1.0, 0.1))
    for x in rng.uniform(-0.7, 0.7, size=(10, 4)):
        tally.add("flrw_christoffel_vs_sympy", np.abs(geo.christoffel(flrw, x, "fd", H) - evaluate(G_sym, x)).max(),
                  50 * H * H)
        tally.add("flrw_riemann_vs_sympy",
                  np.abs(geo.riemann(flrw, x, "fd", H).riemann_mixed - evaluate(R_sym, x)).max(), 50 * H * H)
        tally.add("minkowski_christoffel", np.abs(geo.christoffel(mink, x, "fd", H)).max(), 50 * H * H)
        tally.add("minkowski_riemann", np.abs(geo.riemann(mink, x, "fd", H).riemann_mixed).max(), 50 * H * H)
    for mf in (mink, flrw):
        for cid in ("geometry.axioms", "geometry.metric_compatibility", "geometry.christoffel_fd",
                    "geometry.riemann_symmetries"):
            worst, tol, _ = run_check(cid, mf, 10)
            tally.add(f"{mf.label}:{cid}", worst, tol)
    for x in rng.uniform(-0.5, 0.5, size=(3, 4)):
        order, _ = fd_order(flrw, x)
        tally.add("flrw_order_deficit", 2.0 - order, 0.1)
    finish(criterion, 3, "geometry on Minkowski and FLRW", tally, t0, 30.0)


def test_c04_curvature_commutator(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    rng = np.random.default_rng(404)
    mf = geo.flrw()
    worst = 0.0
    for _ in range(100):
        U = fl.random_multivector_field(rng)
        x = rng.uniform(-0.6, 0.6, 4)
        mu, nu = rng.choice(4, 2, replace=False)
        r = calc.curvature_commutator_check(U, x, mf, int(mu), int(nu))
        worst = max(worst, np.abs(r).max() / (1 + np.abs(U(x)).max()))
    tally.add("scaled_residual", worst, NESTED)
    finish(criterion, 4, "curvature commutator on FLRW, 100 draws", tally, t0, 60.0)


def test_c05_plane_waves(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for p in ([1.0, 0, 0, 0], [np.sqrt(2), 1.0, 0, 0]):
        rep = run_planewave(p, 1.0, PW_BOX)
        for r in rep["checks"]:
            tally.add(f"p=({','.join(f'{v:.4g}' for v in p)}):{r['id']}", r["max_residual"], r["tolerance"])
        by_id = {r["id"]: r for r in rep["checks"]}
        tally.add("grid_points_short", 100 - by_id["planewave.residual"]["samples"], 0)
        assert by_id["planewave.residual"]["tolerance"] <= 1e-9
        assert by_id["planewave.conservation"]["tolerance"] <= 1e-8
    rejected = 0
    for p in ([1.0, 1.0, 0, 0], [2.0, 0, 0, 0], [1.0, 0, 0, 1e-3]):
        try:
            dr.planewave_solve(p, 1.0)
        except OffShellError:
            rejected += 1
    tally.add("off_shell_accepted", 3 - rejected, 0)
    finish(criterion, 5, "plane waves on 100 grid points", tally, t0, 10.0)


def test_c06_gauge_covariance(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for name in ("minkowski", "flrw"):
        mf = geo.metric_catalog(name)
        for cid, n in (("dirac.spin_covariance", 50), ("dirac.u1_covariance", 50), ("dirac.lagrangian", 50),
                       ("dirac.bg_covariance", 100), ("dirac.coupled_covariance", 150)):
            worst, tol, count = run_check(cid, mf, n)
            tally.add(f"{name}:{cid}", worst, tol)
            assert count >= 50
    finish(criterion, 6, "gauge covariance and Lagrangian invariance", tally, t0, 60.0)


def test_c07_trace_identity(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for name in ("minkowski", "flrw"):
        worst, tol, count = run_check("dirac.trace_identity", geo.metric_catalog(name), 50)
        assert count == 50
        tally.add(name, worst, tol)
    finish(criterion, 7, "trace identity, 50 draws per metric", tally, t0, 60.0)


def test_c08_conjugate_form(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    rng = np.random.default_rng(808)
    mf = geo.minkowski()
    worst = 0.0
    for _ in range(20):
        s = dr.random_state(rng, mf, gauge=False)
        x = rng.uniform(-0.5, 0.5, 4)
        r = dr.conjugate_form_check(s, x, mf)
        worst = max(worst, np.abs(r).max() / (1 + np.abs(dr.l_form(s, x, mf)).max()))
    tally.add("minkowski_constant", worst, 1e-10)
    w, tol, _ = run_check("dirac.conjugate_form", geo.flrw(), 20)
    tally.add("flrw", w, tol)
    finish(criterion, 8, "conjugated form of the Dirac operator", tally, t0, 60.0)


def test_c09_affine_model(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for name in ("minkowski", "flrw"):
        mf = geo.metric_catalog(name)
        for cid, n in (("affine.upsilon_check", 100), ("affine.curvature_bg", 200),
                       ("affine.torsion_roundtrip", 100), ("affine.b_dictionary", 100),
                       ("affine.metric_compatibility", 100)):
            worst, tol, count = run_check(cid, mf, n)
            tally.add(f"{name}:{cid}", worst, tol)
            assert count >= 100
    assert TIERS["exact"][0](H) <= 1e-12
    w, tol, _ = run_check("affine.pure_gauge", geo.minkowski(), 10)
    tally.add("pure_gauge_bb_and_curvature", w, tol)
    finish(criterion, 9, "contorsion split, affine curvature, pure gauge", tally, t0, 120.0)


def test_c10_maxwell_block(criterion):
    t0 = time.perf_counter()
    tally = Tally()
    for name in ("minkowski", "flrw"):
        mf = geo.metric_catalog(name)
        for cid in ("dirac.maxwell", "calculus.d_squared", "calculus.delta"):
            worst, tol, _ = run_check(cid, mf, 10)
            tally.add(f"{name}:{cid}", worst, tol)
    finish(criterion, 10, "Maxwell block", tally, t0, 60.0)


def test_c11_harness_contract(criterion, tmp_path):
    t0 = time.perf_counter()
    tally = Tally()
    cfg = dict(suite="all", metric="flrw", samples=2, seed=7)
    a = json.dumps(report_body(run_suite(SuiteConfig(**cfg))), sort_keys=True).encode()
    b = json.dumps(report_body(run_suite(SuiteConfig(**cfg))), sort_keys=True).encode()
    tally.add("report_bytes_differ", float(a != b), 0)
    out = tmp_path / "r.json"
    codes = {
        "pass": cli.main(["verify", "--suite", "algebra", "--samples", "2", "--out", str(out)]),
        "injected": cli.main(["verify", "--suite", "algebra", "--samples", "2", "--inject-failure",
                              "--out", str(out)]),
        "usage": cli.main(["verify", "--suite", "no-such-suite"]),
        "degenerate": cli.main(["verify", "--metric", "flrw:1,1"]),
        "off_shell": cli.main(["planewave", "--p", "1,1,0,0", "--m", "1"]),
    }
    want = {"pass": 0, "injected": 1, "usage": 2, "degenerate": 3, "off_shell": 3}
    for k, v in want.items():
        tally.add(f"exit_{k}_mismatch", float(codes[k] != v), 0)
    rep = run_suite(SuiteConfig(suite="algebra", samples=2, inject_failure=True))
    tally.add("injected_not_reported", float(exit_status(rep) != 1), 0)
    finish(criterion, 11, "harness determinism and exit contract", tally, t0, 120.0)


@pytest.mark.parametrize("cid", ["dirac.spin_covariance", "affine.upsilon_check"])
def test_checks_detect_a_wrong_answer(cid, monkeypatch):
    """The covariance and split checks are not vacuous: a perturbed operator fails them."""
    real = dr.first_line if cid.startswith("dirac") else af.contorsion_split_residual
    if cid.startswith("dirac"):
        # an extra non-covariant term: adds a fixed blade regardless of the gauge
        monkeypatch.setattr(dr, "first_line", lambda st, x, mf, h=H: real(st, x, mf, h) + 1e-2 * alg.blade(0, 1))
    else:
        monkeypatch.setattr(af, "contorsion_split_residual",
                            lambda *a, **k: real(*a, **k) + 1e-2 * alg.scalar())
    worst, tol, _ = run_check(cid, geo.flrw(), 5)
    assert worst > tol
