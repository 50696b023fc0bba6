import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kk import model as M
from kk.errors import ConfigurationError, DomainError


def central(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def second(fn, x, h):
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)


class TestVelocity:
    def test_gc_examples(self, gc):
        assert M.velocity(gc, 1.0, 2.0) == 1.0
        assert M.velocity(gc, 4.0, 2.0) == 1.5

    def test_stagnation(self, gc):
        # Phi(w) = P(rho) at rho=1, w=1
        assert M.velocity(gc, 1.0, 1.0) == 0.0

    def test_same_expression_as_parts(self, gc, rng):
        rho = rng.uniform(0.1, 100.0, 200)
        w = rng.uniform(-5.0, 5.0, 200)
        assert np.array_equal(M.velocity(gc, rho, w), gc.Phi(w) - gc.P(rho))

    def test_domain_errors(self, gc):
        with pytest.raises(DomainError, match="rho"):
            M.velocity(gc, 1e-9, 2.0)
        with pytest.raises(DomainError, match="w"):
            M.velocity(gc, 1.0, 99.0)


class TestDerivatives:
    @pytest.mark.parametrize("idx", range(9))
    def test_analytic_matches_fd(self, idx):
        model = M.builtin_models()[idx]
        rho = np.geomspace(1e-2, 1e2, 25)
        w = np.linspace(-5.0, 5.0, 25)
        hr = 1e-5 * rho
        hw = 1e-5 * (1.0 + np.abs(w))
        for fn, dfn, x, h in ((model.P, model.dP, rho, hr),
                              (model.dP, model.d2P, rho, hr),
                              (model.Phi, model.dPhi, w, hw),
                              (model.dPhi, model.d2Phi, w, hw)):
            fd = central(fn, x, h)
            scale = np.maximum(np.abs(dfn(x)), 1e-12)
            assert np.all(np.abs(fd - dfn(x)) <= 1e-6 * (scale + 1e-9))

    def test_phi_convex_on_domain(self):
        for model in M.builtin_models():
            w = np.linspace(*model.w_domain, 101)
            assert np.all(model.d2Phi(w) >= -1e-12)


class TestScalarFlux:
    def test_gc_value(self, gc):
        h = M.scalar_flux(gc, 2.0)
        assert h(1.0) == 1.0

    def test_second_derivative(self, gc):
        h = M.scalar_flux(gc, 2.0)
        assert h.d2h(1.0) == pytest.approx(0.25, abs=1e-14)
        rho = np.geomspace(0.05, 50.0, 20)
        fd = second(h.h, rho, 1e-4 * rho)
        assert np.allclose(fd, h.d2h(rho), rtol=1e-5, atol=1e-8)

    def test_stagnation_root(self, gc):
        h = M.scalar_flux(gc, 2.0)
        assert h(0.25) == 0.0  # P(1/4) = 2 = Phi(2)

    def test_dh_matches_fd(self, gc):
        h = M.scalar_flux(gc, 1.5)
        rho = np.geomspace(0.05, 50.0, 20)
        fd = central(h.h, rho, 1e-5 * rho)
        assert np.allclose(fd, h.dh(rho), rtol=1e-6)


class TestBuiltins:
    def test_gc_present_with_default_domain(self):
        models = M.builtin_models()
        gc = next(m for m in models if m.name.startswith("gc(") and "none" in m.name)
        assert gc.rho_domain == (1e-3, 1e3)

    def test_chaplygin_degeneracy(self, chap):
        rho = np.geomspace(0.05, 100.0, 500)
        gn = 2.0 * chap.dP(rho) + rho * chap.d2P(rho)
        scale = 1.0 + np.abs(chap.dP(rho)) + np.abs(rho * chap.d2P(rho))
        assert np.max(np.abs(gn)) <= 1e-12 * np.max(scale)
        assert np.max(np.abs(gn) / scale) <= 1e-12

    def test_gc_strictly_negative(self, gc):
        rho = np.geomspace(1e-3, 1e3, 500)
        gn = 2.0 * gc.dP(rho) + rho * gc.d2P(rho)
        assert np.all(gn < 0.0)

    def test_entry_coupling_identical(self):
        m = M.gc_model(source=("entry", 0.1))
        rho = np.geomspace(0.01, 100.0, 50)
        w = np.linspace(-3.0, 3.0, 50)
        assert np.array_equal(m.g(rho, w), w * m.f(rho, w))

    def test_source_validation(self):
        with pytest.raises(ConfigurationError):
            M.gc_model(source=("bogus", 0.1))
        with pytest.raises(ConfigurationError):
            M.gc_model(alpha=1.5)


class TestAudit:
    def test_gc_zero_source(self, gc):
        rep = M.audit_conditions(gc)
        for cond in ("C1_source_coupling", "C2_dissipative",
                     "source_region_compatibility_G1",
                     "source_region_compatibility_G2"):
            assert rep.verdict(cond) == "pass"
        assert rep.verdict("C3_P_at_zero") == "fail"       # P(0+) = inf
        assert rep.verdict("C3_P_at_infinity") == "fail"   # P(inf) = 0
        e = rep.entry("C3_genuine_nonlinearity_sign")
        assert e.verdict == "pass" and e.residual < 0.0

    def test_remark_model_fails_dissipativity(self):
        # f = rho, g = rho*w: coupling holds, C2 fails for s > M
        m = M.gc_model(source=("entry", 1.0))
        rep = M.audit_conditions(m)
        assert rep.verdict("C1_source_coupling") == "pass"
        e = rep.entry("C2_dissipative")
        assert e.verdict == "fail"
        assert e.witness[0] > 1.0 and e.residual > 0.0

    def test_exit_ramp_passes(self):
        m = M.gc_model(source=("exit", 0.1))
        rep = M.audit_conditions(m)
        assert rep.verdict("C1_source_coupling") == "pass"
        assert rep.verdict("C2_dissipative") == "pass"
        # exit sources push the state out through the W side
        assert rep.verdict("source_region_compatibility_G1") == "fail"

    def test_entry_region_compatible(self):
        m = M.gc_model(source=("entry", 0.1))
        rep = M.audit_conditions(m)
        assert rep.verdict("source_region_compatibility_G1") == "pass"
        assert rep.verdict("source_region_compatibility_G2") == "pass"

    def test_empty_plan_rejected(self, gc):
        with pytest.raises(ConfigurationError):
            M.sampling_plan(gc, n=0)

    def test_deterministic(self, gc):
        a = M.audit_conditions(gc).to_json()
        b = M.audit_conditions(gc).to_json()
        assert a == b

    def test_witnesses_inside_domains(self, gc):
        rep = M.audit_conditions(gc)
        rlo, rhi = gc.rho_domain
        wlo, whi = gc.w_domain
        for e in rep.entries:
            if e.condition == "C1_zero_at_origin":
                continue
            assert 0.0 <= e.witness[0] <= rhi
            assert wlo <= e.witness[1] <= whi

    def test_json_schema(self, gc):
        doc = json.loads(M.audit_conditions(gc).to_json())
        assert set(doc) == {"model", "conditions"}
        for entry in doc["conditions"]:
            assert set(entry) == {"condition", "verdict", "witness", "residual"}
            assert entry["verdict"] in ("pass", "fail", "na")
            assert len(entry["witness"]) == 2

    def test_chaplygin_solvable(self, chap):
        rep = M.audit_conditions(chap)
        assert rep.all_pass(M.SOLVE_CRITICAL)


class TestSamplingPlan:
    def test_deterministic_and_covering(self, gc):
        a = M.sampling_plan(gc, n=1024)
        b = M.sampling_plan(gc, n=1024)
        assert np.array_equal(a.rho, b.rho) and np.array_equal(a.w, b.w)
        assert a.rho.size == 1024
        assert a.rho.min() >= gc.rho_domain[0] and a.rho.max() <= gc.rho_domain[1]
        assert a.w.min() >= gc.w_domain[0] and a.w.max() <= gc.w_domain[1]
        # log-spacing: decent mass in every decade
        for lo, hi in ((1e-3, 1e-2), (1e-1, 1.0), (1e2, 1e3)):
            assert np.count_nonzero((a.rho >= lo) & (a.rho < hi)) > 50


@given(rho=st.floats(0.01, 500.0), w=st.floats(-8.0, 8.0))
@settings(max_examples=200, deadline=None)
def test_velocity_formula_property(rho, w):
    gc = M.gc_model(1.0, 0.5)
    assert M.velocity(gc, rho, w) == gc.Phi(w) - gc.P(rho)


def test_model_from_dict_roundtrip():
    m = M.model_from_dict({"name": "gc", "B": 2.0, "alpha": 0.25,
                           "source": {"kind": "exit", "k": 0.3}})
    assert m.lowering.p_B == 2.0
    assert m.lowering.p_alpha == 0.25
    assert m.lowering.src == -0.3
    with pytest.raises(ConfigurationError):
        M.model_from_dict({"name": "nope"})
