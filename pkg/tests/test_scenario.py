import json

import numpy as np
import pytest

from curved_nbody.dynamics import SystemState
from curved_nbody.integrate import integrate, IntegratorConfig
from curved_nbody.scenario import (
    FAMILIES,
    Scenario,
    ScenarioError,
    atomic_write,
    diagnostics_csv,
    dumps,
    fmt,
    trajectory_csv,
)

FAMILY_SPECS = [
    (1.0, {"type": "ngon_fixed", "n": 5}),
    (1.0, {"type": "tetrahedron"}),
    (1.0, {"type": "lagrangian", "z": 0.3}),
    (-1.0, {"type": "lagrangian", "z": 1.5}),
    (1.0, {"type": "ngon", "n": 4, "z": 0.2}),
    (1.0, {"type": "eulerian", "z": 0.4, "M": 4.0}),
    (-1.0, {"type": "hyperbolic_re", "x": 0.6}),
    (1.0, {"type": "isosceles_singularity", "case": "8m", "x0": 0.05}),
]


def scenario(kappa, family, **extra):
    return Scenario.from_dict({"name": "s", "kappa": kappa, "t_end": 1.0, "family": family,
                               **extra})


class TestFamilies:
    def test_all_families_covered(self):
        assert {f["type"] for _, f in FAMILY_SPECS} == set(FAMILIES)

    @pytest.mark.parametrize("kappa, family", FAMILY_SPECS)
    def test_round_trip_through_raw_bodies(self, kappa, family):
        state = scenario(kappa, family).state()
        again = Scenario.from_state(state).state()
        np.testing.assert_array_equal(again.q, state.q)
        np.testing.assert_array_equal(again.p, state.p)
        np.testing.assert_array_equal(again.masses, state.masses)

    @pytest.mark.parametrize("kappa, family", FAMILY_SPECS)
    def test_dict_round_trip(self, kappa, family):
        sc = scenario(kappa, family, integrator={"rel_tol": 1e-9}, output={"samples": 3})
        back = Scenario.from_dict(json.loads(sc.dumps()))
        assert back.to_dict() == sc.to_dict()

    @pytest.mark.parametrize("kappa, family, match", [
        (1.0, {"type": "warp"}, "unknown family"),
        (1.0, {"type": "ngon"}, "needs 'n'"),
        (-1.0, {"type": "tetrahedron"}, "kappa = 1"),
        (1.0, {"type": "ngon_fixed", "n": 4}, "antipodal"),
        (1.0, {"type": "eulerian", "z": -0.7}, "omega"),
    ])
    def test_invalid_family(self, kappa, family, match):
        with pytest.raises(ScenarioError, match=match):
            scenario(kappa, family).state()


class TestRawBodies:
    def test_off_surface_reported(self):
        with pytest.raises(ScenarioError, match="body 1: surface residual"):
            Scenario.from_dict({"kappa": 1.0, "t_end": 1.0, "bodies": [
                {"mass": 1.0, "position": [1.0, 0.0, 0.0]},
                {"mass": 1.0, "position": [0.0, 1.1, 0.0]}]}).state()

    def test_non_tangent_velocity_reported(self):
        with pytest.raises(ScenarioError, match="tangency"):
            Scenario.from_dict({"kappa": 1.0, "t_end": 1.0, "bodies": [
                {"mass": 1.0, "position": [1.0, 0.0, 0.0], "velocity": [0.1, 0.0, 0.0]}]})

    def test_tiny_residual_projected(self):
        x = 1.0 + 1e-12
        sc = Scenario.from_dict({"kappa": 1.0, "t_end": 1.0, "bodies": [
            {"mass": 1.0, "position": [x, 0.0, 0.0], "velocity": [0.0, 1.0, 0.0]}]})
        assert np.linalg.norm(sc.state().q[0]) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("data, match", [
        ({"kappa": 1.0}, "required"),
        ({"kappa": 0.0, "t_end": 1.0, "family": {"type": "tetrahedron"}}, "nonzero"),
        ({"kappa": 1.0, "t_end": -1.0, "family": {"type": "tetrahedron"}}, "positive"),
        ({"kappa": 1.0, "t_end": 1.0}, "exactly one"),
        ({"kappa": 1.0, "t_end": 1.0, "family": {"type": "tetrahedron"}, "colour": 1}, "unknown"),
        ({"kappa": 1.0, "t_end": 1.0, "family": {"type": "tetrahedron"},
          "integrator": {"order": 8}}, "unknown integrator"),
        ({"kappa": 1.0, "t_end": 1.0, "bodies": [{"mass": 1.0}]}, "needs"),
        ({"kappa": 1.0, "t_end": 1.0, "bodies": [{"mass": 1, "position": [1, 0]}]}, "three"),
    ])
    def test_malformed(self, data, match):
        with pytest.raises(ScenarioError, match=match):
            Scenario.from_dict(data).state()

    def test_invalid_integrator_settings(self):
        with pytest.raises(ScenarioError, match="integrator"):
            scenario(1.0, {"type": "tetrahedron"}, integrator={"rel_tol": -1})

    def test_config_overrides(self):
        sc = scenario(1.0, {"type": "tetrahedron"}, integrator={"rel_tol": 1e-9, "dt0": 0.01})
        cfg = sc.config(rel_tol=None, abs_tol=1e-12)
        assert (cfg.rel_tol, cfg.abs_tol, cfg.initial_dt) == (1e-9, 1e-12, 0.01)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            Scenario.load(tmp_path / "nope.json")


class TestWriters:
    def test_fmt_round_trips(self):
        for x in (0.1, 1 / 3, -2.5e-300, 1e17):
            assert float(fmt(x)) == x

    def test_dumps_is_deterministic(self):
        a = dumps({"b": [1.0, 2], "a": {"z": None, "y": float("nan"), "x": True}})
        b = dumps({"a": {"x": True, "y": float("nan"), "z": None}, "b": [1.0, 2]})
        assert a == b
        assert json.loads(a) == {"a": {"x": True, "y": None, "z": None}, "b": [1.0, 2]}

    def test_csv_headers(self, three_body_s2):
        traj, _ = integrate(three_body_s2, 0.1, IntegratorConfig(), sample_times=[0.05, 0.1])
        tcsv = trajectory_csv(traj).splitlines()
        assert tcsv[0].split(",")[:7] == ["t", "x0", "y0", "z0", "vx0", "vy0", "vz0"]
        assert len(tcsv[0].split(",")) == 1 + 6 * 3 and len(tcsv) == 1 + len(traj)
        dcsv = diagnostics_csv(traj).splitlines()
        assert dcsv[0] == "t,energy,cx,cy,cz,I,J,min_pair_gap,constraint_residual"
        assert dcsv[1].split(",")[6] == "nan"

    def test_atomic_write(self, tmp_path):
        path = tmp_path / "sub" / "out.txt"
        atomic_write(path, "a\nb\n")
        atomic_write(path, "c\n")
        assert path.read_bytes() == b"c\n"
        assert [p.name for p in path.parent.iterdir()] == ["out.txt"]
