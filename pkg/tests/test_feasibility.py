import io
from dataclasses import replace

import numpy as np
import pytest
from conftest import anomaly_crossing_elapsed, oracle_config

from zenograv.decoherence import Environment
from zenograv.errors import InvalidParameterError
from zenograv.feasibility import (evaluate_point, reference_point,
                                  region_to_csv, report_to_dict,
                                  sweep_region)
from zenograv.massdist import make_superposed_source
from zenograv.scatter import integrate_trajectory

REF = reference_point()


class TestExperimentPoint:
    def test_derived_quantities(self):
        assert REF.v * REF.t_R == pytest.approx(REF.R, rel=1e-12)
        assert REF.v == pytest.approx(1e-6, rel=1e-12)
        assert REF.M == pytest.approx(1.0890854e-11, rel=1e-6)
        assert REF.b0 == pytest.approx(1.2e-5, rel=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            replace(REF, beta=0.9)
        with pytest.raises(InvalidParameterError):
            replace(REF, zeta=1.0)
        with pytest.raises(InvalidParameterError):
            replace(REF, t_R=-1.0)


class TestReferenceReport:
    def test_all_constraints_pass(self):
        rep = evaluate_point(REF)
        assert rep.passed
        for c in rep.constraints:
            assert c.passed is True, c

    def test_reference_values(self):
        rep = evaluate_point(REF)
        assert rep.theta_max == pytest.approx(1.21148e-4, rel=1e-4)
        assert rep.t_total == pytest.approx(57.937, rel=1e-3)
        assert rep.t_used == rep.t_total
        assert rep.tau_Z == pytest.approx(1.65086, rel=1e-4)
        # binding requirement is the interaction-timescale bound 100/tau_Z
        assert rep.gamma_dyn_required == pytest.approx(100 / rep.tau_Z, rel=1e-12)
        assert rep.gamma_zeno_required == pytest.approx(60.574, rel=1e-3)
        assert rep.breakdown.gamma_total == pytest.approx(34.357, rel=1e-3)
        assert rep.sigma_ratio == pytest.approx(0.010766, rel=1e-3)
        assert rep.mfp == pytest.approx(3106.7, rel=1e-3)
        assert rep.kinetic_energy_eV == pytest.approx(3.1208e-12, rel=1e-4)
        assert rep.kinetic_energy_eV == pytest.approx(3e-12, rel=0.10)

    def test_slow_probe_fails_deflection(self):
        rep = evaluate_point(replace(REF, t_R=1.0))
        assert not rep.passed
        assert rep.constraint("deflection").passed is False
        assert rep.theta_max < 1e-4

    def test_poor_vacuum_fails_decoherence(self):
        rep = evaluate_point(replace(REF, env=Environment(1e-6, 1.0, 1.0)))
        assert not rep.passed
        assert rep.constraint("decoherence").passed is False
        # gas channel scales linearly: 1e9 times the reference pressure
        ref_gas = evaluate_point(REF).breakdown.gamma_gas
        assert rep.breakdown.gamma_gas == pytest.approx(1e9 * ref_gas, rel=1e-9)

    def test_duration_capped(self):
        rep = evaluate_point(replace(REF, t_R=10 ** 1.3))
        assert rep.t_total > 100.0
        assert rep.t_used == 100.0
        assert rep.constraint("time").passed is False

    def test_pressure_monotonicity(self):
        # raising the pressure never turns a fail back into a pass
        states = []
        for p in np.logspace(-16, -6, 11):
            rep = evaluate_point(replace(REF, env=Environment(p, 1.0, 1.0)))
            states.append(rep.passed)
        flips = sum(1 for a, b in zip(states, states[1:]) if a != b)
        assert flips <= 1
        assert states[0] and not states[-1]

    def test_report_dict_round_trip(self):
        d = report_to_dict(evaluate_point(REF))
        assert d["passed"] is True
        assert set(d["constraints"]) == {"deflection", "time", "zeno-rate",
                                         "decoherence", "classicality",
                                         "mean-free-path"}
        assert d["point"]["v_m_s"] == pytest.approx(1e-6)


class TestAgainstSimulation:
    def test_theta_and_time_match_ode(self):
        # closed forms vs direct integration at feasible points (5%)
        rng = np.random.default_rng(31)
        for _ in range(5):
            pt = replace(REF, R=10 ** rng.uniform(-5.3, -4.7),
                         t_R=10 ** rng.uniform(1.0, 1.2),
                         beta=rng.uniform(1.2, 1.8))
            src = make_superposed_source(pt.R, pt.density, 0.0)
            cfg = oracle_config(src, pt.b0, 0.0, pt.v)
            traj = integrate_trajectory(src, cfg, pt.m_probe)
            rep = evaluate_point(pt)
            assert rep.theta_max == pytest.approx(traj.deflection_angle,
                                                  rel=0.05)
            phi_target = pt.zeta * 0.5 * (np.pi + rep.theta_max)
            elapsed = anomaly_crossing_elapsed(traj, phi_target)
            assert rep.t_total == pytest.approx(elapsed, rel=0.05)


class TestDurationWindow:
    def test_t_R_window_interval(self):
        # {t_R : theta > 1e-4 and t_total < 100 s} on a log grid is an
        # interval with endpoints near 10^1.0 and 10^1.2
        logs = np.linspace(0.5, 1.5, 201)
        passes = []
        for lt in logs:
            rep = evaluate_point(replace(REF, t_R=10 ** lt))
            ok = (rep.constraint("deflection").passed
                  and rep.constraint("time").passed)
            passes.append(ok)
        idx = np.nonzero(passes)[0]
        assert len(idx) > 0
        assert np.all(np.diff(idx) == 1)  # contiguous: an interval
        lo, hi = logs[idx[0]], logs[idx[-1]]
        assert abs(lo - 1.0) <= 0.1 * 1.0
        assert abs(hi - 1.2) <= 0.1 * 1.2


class TestSweep:
    def test_axis_consistency_R_v(self):
        rows = sweep_region(("R", np.array([1e-5])), ("v", np.array([1e-6])),
                            REF)
        # t_R = R/v = 10 s at this cell: same report as the reference
        ref = evaluate_point(REF)
        assert rows[0].theta_max == pytest.approx(ref.theta_max, rel=1e-12)
        assert rows[0].t_total == pytest.approx(ref.t_total, rel=1e-12)
        assert rows[0].passed

    def test_R_axis_keeps_t_R(self):
        rows = sweep_region(("R", np.array([2e-5])), ("p", np.array([1e-15])),
                            REF)
        # deflection and duration depend only on (rho, beta, zeta, t_R)
        ref = evaluate_point(REF)
        assert rows[0].theta_max == pytest.approx(ref.theta_max, rel=1e-9)
        assert rows[0].t_total == pytest.approx(ref.t_total, rel=1e-9)
        assert rows[0].KE_eV == pytest.approx(4 * ref.kinetic_energy_eV,
                                              rel=1e-9)  # v = R/t_R doubled

    def test_classicality_contour_location(self):
        # sigma_min/R = 1e-2 contour at R = 1e-5 sits between 1e-18 and
        # 2.2e-18 kg (inverting sigma_min = sqrt(2 hbar t / m))
        masses = np.logspace(-18.2, -17.6, 25)
        rows = sweep_region(("m_probe", masses), ("p", np.array([1e-15])), REF)
        ratios = np.array([r.sigma_ratio for r in rows])
        assert ratios[0] > 1e-2 > ratios[-1]
        k = int(np.nonzero(ratios < 1e-2)[0][0])
        crossing = masses[k]
        assert 1e-18 < crossing < 2.2e-18

    def test_t_R_band_in_sweep(self):
        rows = sweep_region(("t_R", np.logspace(0.5, 1.5, 21)),
                            ("p", np.array([1e-15])), REF)
        n_pass = sum(r.passed for r in rows)
        assert 0 < n_pass < len(rows)

    def test_axis_validation(self):
        with pytest.raises(InvalidParameterError):
            sweep_region(("bogus", np.array([1.0])), ("p", np.array([1e-15])),
                         REF)
        with pytest.raises(InvalidParameterError):
            sweep_region(("R", np.array([1e-5])), ("R", np.array([1e-5])), REF)

    def test_csv_deterministic(self):
        rows = sweep_region(("t_R", np.logspace(0.9, 1.3, 5)),
                            ("p", np.array([1e-15, 1e-12])), REF)
        bufs = []
        for _ in range(2):
            buf = io.StringIO()
            region_to_csv(rows, buf, header_comment="sweep")
            bufs.append(buf.getvalue())
        assert bufs[0] == bufs[1]
        lines = bufs[0].strip().split("\n")
        assert lines[1] == ("axis1,axis2,theta_max,t_total,gamma_required,"
                            "sigma_ratio,mfp,KE_eV,pass")
        assert len(lines) == 2 + 5 * 2
