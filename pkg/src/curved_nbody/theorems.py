"""Bundled quantitative checks, one per acceptance property.

Each check returns a :class:`CheckResult` with a list of sub-items and the
numbers behind them. The CLI ``verify`` subcommand and the acceptance tests
run the same functions.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from curved_nbody import equilibria as eqm
from curved_nbody.diagnostics import (
    ELLIPTIC,
    HYPERBOLIC,
    RELATIVE_EQUILIBRIUM,
    finite_difference_gradient_check,
    saari_classify,
)
from curved_nbody.dynamics import (
    SystemState,
    acceleration,
    force_function_arrays,
    grad_force_function_homogeneous,
    min_pair_gap,
    pair_gaps,
)
from curved_nbody.errors import DomainError
from curved_nbody.geometry import inner, kappa_ctn
from curved_nbody.integrate import (
    REACHED_T_END,
    SINGULARITY_EVENT,
    IntegratorConfig,
    integrate,
    invariant_drift,
)
from curved_nbody.singularities import (
    COLLISION,
    COLLISION_ANTIPODAL,
    integrate_reduced,
    isosceles_scenario,
)


@dataclass
class Item:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class CheckResult:
    theorem: str
    criterion: int
    items: List[Item] = field(default_factory=list)
    evidence: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.items) and all(i.passed for i in self.items)

    @property
    def failures(self) -> List[Item]:
        return [i for i in self.items if not i.passed]

    def add(self, label, passed, detail=""):
        self.items.append(Item(label, bool(passed), detail))
        return bool(passed)

    def report(self) -> str:
        lines = [f"{self.theorem} (criterion {self.criterion}): "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        for i in self.items:
            lines.append(f"  [{'ok' if i.passed else 'FAIL'}] {i.label}"
                         + (f": {i.detail}" if i.detail else ""))
        return "\n".join(lines)


# --------------------------------------------------------------------------
# random states


def random_surface_points(rng, kappa, n, spread=1.5):
    """``n`` points on the surface: uniform on the sphere, or a disk of the hyperboloid."""
    k = float(kappa)
    if k > 0:
        v = rng.normal(size=(n, 3))
        return v / np.linalg.norm(v, axis=1)[:, None] / np.sqrt(k)
    xy = rng.uniform(-spread, spread, size=(n, 2))
    z = np.sqrt(xy[:, 0] ** 2 + xy[:, 1] ** 2 - 1.0 / k)
    return np.c_[xy, z]


def random_state(rng, kappa, n=3, max_speed=0.5, min_gap=0.05, masses=None,
                 at_rest=False, spread=1.5, min_speed=0.0):
    """A random nonsingular state with every pair gap at least ``min_gap``.

    Speeds are uniform in ``[min_speed, max_speed]`` with random tangent
    directions.
    """
    for _ in range(10_000):
        q = random_surface_points(rng, kappa, n, spread)
        m = rng.uniform(0.5, 2.0, size=n) if masses is None else np.asarray(masses, float)
        probe = SystemState.from_arrays(kappa, m, q)
        if n > 1 and min_pair_gap(probe) < min_gap:
            continue
        if at_rest:
            return probe
        v = rng.normal(size=(n, 3))
        v = v - kappa * inner(kappa, probe.q, v)[:, None] * probe.q
        norms = np.linalg.norm(v, axis=1)
        v = v / norms[:, None] * rng.uniform(min_speed, max_speed, size=n)[:, None]
        return SystemState.from_arrays(kappa, m, probe.q, v)
    raise DomainError("could not draw a nonsingular state")


# --------------------------------------------------------------------------
# canonical relative equilibria


def canonical_relative_equilibria():
    """Canonical members of every family, as ``(label, RelativeEquilibrium)``.

    Lagrangian and n-gon members sit where the motion is linearly stable or
    only mildly unstable: an unstable relative equilibrium amplifies
    round-off by its Floquet multipliers, and over three periods that growth
    alone can exceed the 1e-7 distance tolerance. The Eulerian members are
    exactly mirror-symmetric and the integrator preserves that symmetry, so
    their (symmetry-breaking) unstable modes are never seeded.
    """
    return [
        ("lagrangian S2 z=0.3", eqm.lagrangian_re(1.0, 0.3)),
        ("lagrangian S2 z=-0.3 (omega<0)", eqm.lagrangian_re(1.0, -0.3, sign=-1.0)),
        ("lagrangian H2 z=1.05", eqm.lagrangian_re(-1.0, 1.05)),
        ("ngon n=5 S2 z=0.2", eqm.ngon_re(1.0, 5, 0.2)),
        ("ngon n=4 S2 z=0.4", eqm.ngon_re(1.0, 4, 0.4)),
        ("two-body S2 z=0.5", eqm.ngon_re(1.0, 2, 0.5)),
        ("ngon n=4 H2 z=1.05", eqm.ngon_re(-1.0, 4, 1.05)),
        ("eulerian S2 z=0.4", eqm.eulerian_re(1.0, 0.4)),
        ("eulerian S2 z=-0.3", eqm.eulerian_re(1.0, -0.3)),
        ("eulerian S2 M=4m z=-0.8", eqm.eulerian_re(1.0, -0.8, 1.0, 4.0)),
        ("eulerian H2 z=1.4", eqm.eulerian_re(-1.0, 1.4)),
        ("hyperbolic H2 x=1", eqm.hyperbolic_re(1.0)),
        ("hyperbolic H2 x=-1 (omega<0)", eqm.hyperbolic_re(-1.0, sign=-1.0)),
        ("hyperbolic H2 M=2m x=0.6", eqm.hyperbolic_re(0.6, 1.0, 2.0)),
        ("two-body H2 x=0.7", eqm.two_body_hyperbolic_re(0.7)),
    ]


def geodesic_relative_equilibria():
    """Canonical relative equilibria whose bodies lie on one rotating geodesic."""
    fixed = eqm.fixed_point_ngon(3)
    out = [
        ("equatorial equilateral S2 omega=1", eqm.fixrel_re(fixed, 1.0)),
        ("eulerian S2 z=0.4", eqm.eulerian_re(1.0, 0.4)),
        ("eulerian S2 z=-0.3", eqm.eulerian_re(1.0, -0.3)),
        ("eulerian S2 M=4m z=-0.8", eqm.eulerian_re(1.0, -0.8, 1.0, 4.0)),
        ("eulerian H2 z=1.4", eqm.eulerian_re(-1.0, 1.4)),
        ("hyperbolic H2 x=1", eqm.hyperbolic_re(1.0)),
        ("hyperbolic H2 M=2m x=0.6", eqm.hyperbolic_re(0.6, 1.0, 2.0)),
        ("two-body H2 x=0.7", eqm.two_body_hyperbolic_re(0.7)),
    ]
    return out


RE_CONFIG = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


def re_span(re, periods=3.0):
    """Three rotation periods (elliptic) or a rapidity span of three (hyperbolic)."""
    w = abs(re.omega)
    return periods * 2 * np.pi / w if re.kind == "elliptic" else periods / w


def integrate_re(re, periods=3.0, samples=90, config=RE_CONFIG, state=None):
    state = re.state if state is None else state
    span = re_span(re, periods)
    times = np.linspace(0.0, span, samples + 1)[1:]
    traj, stop = integrate(state, span, config, sample_times=times)
    return traj, stop


# --------------------------------------------------------------------------
# checks


NEAR_COLLISION_GAP = 1e-3


def check_conservation(seed=0, n_states=20, t_end=5.0) -> CheckResult:
    """Energy and angular momentum along random 3-body runs on both surfaces.

    Masses are drawn from [0.1, 0.5], speeds from [0.5, 1], and initial pair
    gaps are at least 0.5. A draw counts as nonsingular only if no pair gap
    falls below ``NEAR_COLLISION_GAP`` (an angular separation of about 0.03
    from a collision or an antipodal position) before ``t_end``; other draws
    end at the singularity event and are replaced. An unregularized integrator cannot
    hold 1e-8 energy drift through arbitrarily close encounters, and a
    random three-body state is very likely to have one within five time
    units when the masses are of order one.
    """
    res = CheckResult("conservation", 1)
    rng = np.random.default_rng(seed)
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13,
                              singularity_event_threshold=NEAR_COLLISION_GAP)
    times = np.linspace(0.0, t_end, 51)[1:]
    for kappa in (1.0, -1.0):
        worst_e = worst_c = 0.0
        redraws = 0
        done = 0
        while done < n_states:
            state = random_state(rng, kappa, 3, max_speed=1.0, min_speed=0.5, min_gap=0.5,
                                 masses=rng.uniform(0.1, 0.5, size=3))
            traj, stop = integrate(state, t_end, config, sample_times=times)
            if stop.kind != REACHED_T_END:
                redraws += 1
                if redraws > 5 * n_states:
                    raise DomainError("too many singular draws")
                continue
            de, dc, _ = invariant_drift(traj)
            worst_e, worst_c = max(worst_e, de), max(worst_c, dc)
            done += 1
        tag = "S2" if kappa > 0 else "H2"
        res.evidence[f"{tag}_energy_drift"] = worst_e
        res.evidence[f"{tag}_angular_momentum_drift"] = worst_c
        res.evidence[f"{tag}_redraws"] = redraws
        res.add(f"{tag}: {n_states} runs to t={t_end:g}, energy drift < 1e-8", worst_e < 1e-8,
                f"max {worst_e:.2e} ({redraws} draws replaced after a near collision)")
        res.add(f"{tag}: angular momentum drift < 1e-8", worst_c < 1e-8, f"max {worst_c:.2e}")
    return res


def check_homogeneity(seed=0, n_states=200) -> CheckResult:
    """Euler identity ``q_i . grad_i U = 0`` and degree-zero homogeneity of U."""
    res = CheckResult("eul", 2)
    rng = np.random.default_rng(seed)
    worst_euler = worst_hom = 0.0
    for k in range(n_states):
        kappa = 1.0 if k % 2 == 0 else -1.0
        n = int(rng.integers(2, 6))
        st = random_state(rng, kappa, n, at_rest=True, min_gap=0.05)
        g = grad_force_function_homogeneous(st)
        worst_euler = max(worst_euler, float(np.max(np.abs(inner(kappa, st.q, g)))))
        u = force_function_arrays(kappa, st.masses, st.q)
        for eta in (0.5, 2.0):
            ue = force_function_arrays(kappa, st.masses, eta * st.q)
            worst_hom = max(worst_hom, abs(ue - u))
    res.evidence.update(euler=worst_euler, homogeneity=worst_hom)
    res.add(f"|q_i . grad_i U| < 1e-10 on {n_states} states", worst_euler < 1e-10,
            f"max {worst_euler:.2e}")
    res.add("U(eta q) = U(q) within 1e-12, eta in {0.5, 2}", worst_hom < 1e-12,
            f"max {worst_hom:.2e}")
    return res


def check_gradient(seed=0, n_states=50) -> CheckResult:
    """Analytic gradient against central differences."""
    res = CheckResult("gradient", 3)
    rng = np.random.default_rng(seed)
    for kappa in (1.0, -1.0):
        worst = 0.0
        for _ in range(n_states):
            st = random_state(rng, kappa, int(rng.integers(2, 5)), at_rest=True, min_gap=0.05)
            worst = max(worst, finite_difference_gradient_check(st, 1e-6))
        tag = "S2" if kappa > 0 else "H2"
        res.evidence[f"{tag}_max_rel_error"] = worst
        res.add(f"{tag}: max relative error < 1e-6 on {n_states} states", worst < 1e-6,
                f"{worst:.2e}")
    return res


def check_fixed_points(seed=0) -> CheckResult:
    """Odd n-gons and the tetrahedron stay at rest; even geodesic n-gons are rejected."""
    res = CheckResult("fix", 4)
    cases = [(f"{n}-gon", eqm.fixed_point_ngon(n)) for n in (3, 5, 7)]
    cases.append(("tetrahedron", eqm.fixed_point_tetrahedron()))
    for label, st in cases:
        traj, stop = integrate(st, 10.0, sample_times=np.linspace(0, 10, 101)[1:])
        vmax = max(float(np.max(np.linalg.norm(s.state.velocities, axis=1))) for s in traj)
        res.evidence[f"{label}_max_speed"] = vmax
        res.add(f"{label} fixed on [0, 10], max speed < 1e-10",
                vmax < 1e-10 and stop.kind == REACHED_T_END, f"{vmax:.2e}")
    for n in (4, 6):
        try:
            eqm.fixed_point_ngon(n)
            rejected = False
        except DomainError:
            rejected = True
        res.add(f"geodesic {n}-gon rejected", rejected)
    return res


def check_no_fixed_points_hemisphere(seed=0, n_configs=20, res=None) -> CheckResult:
    res = res or CheckResult("nofixS", 5)
    rng = np.random.default_rng(seed)
    worst = np.inf
    for k in range(n_configs):
        n = int(rng.integers(2, 6))
        while True:
            z = rng.uniform(0.0, 0.95, size=n)
            if k % 4 == 0:
                z[0] = 0.0  # a body on the boundary circle
            phi = rng.uniform(0, 2 * np.pi, size=n)
            r = np.sqrt(1 - z * z)
            st = SystemState.from_arrays(1.0, rng.uniform(0.5, 2, n),
                                         np.c_[r * np.cos(phi), r * np.sin(phi), z])
            if min_pair_gap(st) > 1e-3:
                break
        _, cert = eqm.hemisphere_no_fixed_point_witness(st)
        worst = min(worst, cert)
    res.evidence["hemisphere_min_certificate"] = worst
    res.add(f"hemisphere: positive dU/dz certificate (> 1e-12) on {n_configs} configurations",
            worst > 1e-12, f"min {worst:.3e}")
    return res


def check_no_fixed_points_hyperboloid(seed=0, n_configs=20, res=None) -> CheckResult:
    res = res or CheckResult("nofixH", 5)
    rng = np.random.default_rng(seed + 1)
    worst = np.inf
    for _ in range(n_configs):
        st = random_state(rng, -1.0, int(rng.integers(2, 6)), at_rest=True, min_gap=1e-3,
                          spread=2.0)
        _, cert = eqm.hyperboloid_no_fixed_point_witness(st)
        worst = min(worst, cert)
    res.evidence["hyperboloid_min_certificate"] = worst
    res.add(f"hyperboloid: max-z body has z'' < 0 (certificate > 1e-12) on {n_configs} "
            "configurations", worst > 1e-12, f"min {worst:.3e}")
    return res


def check_no_fixed_points(seed=0) -> CheckResult:
    res = CheckResult("nofix", 5)
    check_no_fixed_points_hemisphere(seed, res=res)
    check_no_fixed_points_hyperboloid(seed, res=res)
    return res


def check_relative_equilibria(seed=0) -> CheckResult:
    """Canonical relative equilibria move rigidly over three periods."""
    res = CheckResult("re", 6)
    for label, re in canonical_relative_equilibria():
        resid = max(re.residual(t) for t in np.linspace(0.0, re_span(re), 20))
        traj, stop = integrate_re(re)
        rep = eqm.verify_relative_equilibrium(traj, re.kind)
        res.evidence[f"{label}_distance_drift"] = rep.distance_drift
        ok = rep.passed and rep.distance_drift < 1e-7 and stop.kind == REACHED_T_END
        res.add(f"{label}: verifier passes", ok,
                f"distance drift {rep.distance_drift:.2e}, closed-form residual {resid:.1e}"
                + (f", failed {rep.failures}" if rep.failures else ""))
    # M >= 4m: omega^2 > 0 over the whole range of z, and the closed form solves
    # the equations of motion
    zs = np.r_[np.linspace(-0.99, -0.01, 50), np.linspace(0.01, 0.99, 50)]
    worst_w2 = np.inf
    worst_res = 0.0
    for M in (4.0, 6.0, 10.0):
        for z in zs:
            w2 = eqm.eulerian_omega_sq(1.0, z, 1.0, M)
            worst_w2 = min(worst_w2, w2)
            re = eqm.eulerian_re(1.0, z, 1.0, M)
            worst_res = max(worst_res, re.residual(0.37, relative=True))
    res.evidence["M4m_min_omega_sq"] = worst_w2
    res.add("eulerian M>=4m exists for all z in (-1,0)U(0,1): min omega^2 > 0, relative "
            "residual < 1e-10",
            worst_w2 > 0 and worst_res < 1e-10,
            f"min omega^2 {worst_w2:.3e}, max residual {worst_res:.1e}")
    return res


def check_root_counts(seed=0) -> CheckResult:
    res = CheckResult("roots", 7)

    def count(eq, target, expected, tangencies=None):
        scan = eqm.solve_roots(eq, target)
        resid = max((r.residual for r in scan.roots), default=0.0)
        n_tan = sum(r.tangency for r in scan.roots)
        ok = len(scan.roots) == expected and resid < 1e-10
        if tangencies is not None:
            ok = ok and n_tan == tangencies
        res.add(f"{eq} target {target:.6g} -> {expected} roots"
                + (f" ({tangencies} tangency)" if tangencies else ""), ok,
                f"found {len(scan.roots)} {[round(v, 9) for v in scan.values]}, "
                f"{n_tan} tangency, max residual {resid:.1e}")
        return scan

    count("eq4", 4.0, 4)
    count("eq4", 8 / np.sqrt(3), 3)
    count("eq4", 5.0, 2)
    count("eq4", 3.0, 2, tangencies=2)
    count("ratio1", 3.0, 3)
    for t in (0.5, 1.0, 2.0):
        scan = eqm.solve_roots("eq7", t)
        pos = [r for r in scan.roots if r.value > 0]
        resid = max((r.residual for r in scan.roots), default=0.0)
        res.add(f"eq7 target {t:g} -> exactly one positive root", len(pos) == 1 and resid < 1e-10,
                f"positive roots {[round(r.value, 9) for r in pos]}, residual {resid:.1e}")
    return res


def check_rengon(seed=0, res=None) -> CheckResult:
    """A geodesic n-gon spun about an axis other than its own normal is not rigid."""
    res = res or CheckResult("rengon", 8)
    for n, tilt in ((3, 0.3), (5, 0.5)):
        st = eqm.tilted_ngon_state(n, tilt, 1.0)
        span = 2 * 2 * np.pi
        traj, _ = integrate(st, span, RE_CONFIG, sample_times=np.linspace(0, span, 61)[1:])
        rep = eqm.verify_relative_equilibrium(traj, "elliptic")
        res.add(f"tilted rotating {n}-gon (tilt {tilt}) fails verification within two periods",
                not rep.passed, f"distance drift {rep.distance_drift:.2e}")
    return res


def check_equil(seed=0, res=None) -> CheckResult:
    """Unequal masses (1, 1, 1.001) on a same-height equilateral triangle are not rigid."""
    res = res or CheckResult("equil", 8)
    for kappa, z in ((1.0, 0.3), (-1.0, 1.05)):
        w = np.sqrt(eqm.ngon_omega_sq_over_m(kappa, 3, z))
        st = eqm.equilateral_state(kappa, z, [1.0, 1.0, 1.001], w)
        span = 2 * 2 * np.pi / w
        traj, _ = integrate(st, span, RE_CONFIG, sample_times=np.linspace(0, span, 61)[1:])
        rep = eqm.verify_relative_equilibrium(traj, "elliptic")
        res.add(f"kappa={kappa:g}: masses (1, 1, 1.001) fail verification within two periods",
                not rep.passed and rep.distance_drift > 1e-7,
                f"distance drift {rep.distance_drift:.2e}")
    return res


def check_noreH(seed=0, res=None) -> CheckResult:
    """Bodies chasing each other along a fixed geodesic violate the y-equations."""
    res = res or CheckResult("noreH", 8)
    t = np.linspace(0.0, 3.0, 31)
    for alpha, masses in (([0.0, 1.0], [1.0, 1.0]), ([-0.5, 0.2, 1.0], [1.0, 2.0, 0.5])):
        r = eqm.geodesic_chase_residual(alpha, masses, 1.0, t)
        worst = float(np.max(np.abs(r)))
        res.add(f"fixed-geodesic chase, phases {alpha}: residual exceeds 1e-3", worst > 1e-3,
                f"max residual {worst:.3e}")
    return res


def check_rigidity(seed=0) -> CheckResult:
    res = CheckResult("rigidity", 8)
    check_rengon(seed, res)
    check_equil(seed, res)
    check_noreH(seed, res)
    return res


def _speed_sq(state, body=1):
    v = state.velocities[body]
    return float(v @ v)


def check_singularity(seed=0) -> CheckResult:
    res = CheckResult("singularity", 9)
    # M = 8m: collision-antipodal in finite time
    sc = isosceles_scenario("8m", 0.05)
    traj, stop = integrate(sc.state(), 5.0)
    v2 = _speed_sq(traj[-1].state)
    res.add("M=8m, x0=0.05: collision-antipodal event with speed^2 > 1e4",
            stop.kind == SINGULARITY_EVENT and stop.classification == COLLISION_ANTIPODAL
            and v2 > 1e4, f"{stop.kind} ({stop.classification}) at t={stop.time:.6g}, "
            f"speed^2 {v2:.4g}")
    # M = 2m: repelled
    for x0 in (0.05, 0.1):
        sc = isosceles_scenario("2m", x0)
        times = np.linspace(0.0, 20.0, 401)[1:]
        traj, stop = integrate(sc.state(), 20.0, sample_times=times)
        xs = np.array([s.state.q[1, 0] for s in traj])
        ok = stop.kind == REACHED_T_END and xs.min() >= x0 * (1 - 1e-6) and xs.max() > 1.5 * x0
        res.add(f"M=2m, x0={x0:g}: no event up to t=20, x(t) moves away from 0", ok,
                f"{stop.kind}, min x {xs.min():.10g}, max x {xs.max():.4g}")
    # M = 4m: collision with the energy-determined speed
    sc = isosceles_scenario("4m", 0.2)
    h, m = sc.energy_h, sc.mass_m
    traj, stop = integrate(sc.state(), 5.0, IntegratorConfig(singularity_event_threshold=1e-10))
    ev = traj[-1].state
    v2 = _speed_sq(ev)
    xdd = float(acceleration(ev)[1, 0])
    target = h / (4 * m)
    # the two equal masses meet (their gap 4x^2 is four times the antipodal gaps
    # x^2 that trip the event threshold first)
    gap01 = float(pair_gaps(ev)[0, 1])
    ok = (stop.kind == SINGULARITY_EVENT and stop.classification in (COLLISION, COLLISION_ANTIPODAL)
          and gap01 < 1e-9 and abs(v2 - target) < 1e-4 * target and abs(xdd + m) < 1e-3)
    res.add("M=4m, x0=0.2: collision with speed^2 -> h/4m and bounded acceleration", ok,
            f"{stop.classification} at t={stop.time:.6g}, colliding-pair gap {gap01:.1e}, "
            f"|speed^2 - h/4m| = "
            f"{abs(v2 - target):.2e} (h/4m = {target:.6g}), |x''+m| = {abs(xdd + m):.2e}")
    # reduced planar system against the full integration
    worst = 0.0
    for case, x0, t_end in (("2m", 0.1, 5.0), ("8m", 0.3, 0.05), ("4m", 0.2, 0.5),
                            ("custom", 0.4, 1.0)):
        sc = isosceles_scenario(case, x0, M=3.0 if case == "custom" else None)
        times = np.linspace(0.0, t_end, 21)[1:]
        traj, stop = integrate(sc.state(), t_end, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14),
                               sample_times=times)
        full = np.array([[s.state.q[1, 0], s.state.q[1, 1]] for s in traj[1:]])
        red = integrate_reduced(sc, times)[: len(full), :2]
        worst = max(worst, float(np.max(np.abs(full - red))))
    res.evidence["reduced_vs_full"] = worst
    res.add("reduced planar system agrees with the full integration to 1e-6", worst < 1e-6,
            f"max |difference| {worst:.2e}")
    return res


def check_parabolic(seed=0, n_ansatz=100) -> CheckResult:
    res = CheckResult("thpar", 10)
    rng = np.random.default_rng(seed)
    verdicts = []
    worst_slope = 0.0
    for _ in range(n_ansatz):
        n = int(rng.integers(1, 6))
        ans = eqm.ParabolicAnsatz.from_ab(rng.normal(size=n), rng.normal(size=n))
        m = rng.uniform(0.5, 2.0, n)
        v = eqm.parabolic_nonexistence_check(ans, m)
        verdicts.append(v.verdict)
        # the stated slope must match the directly computed momentum
        l0 = eqm.parabolic_angular_momentum_x(ans, m, 0.0)
        l1 = eqm.parabolic_angular_momentum_x(ans, m, 1.0)
        worst_slope = max(worst_slope, abs((l1 - l0) - v.linear_coefficient))
    n_ok = sum(v == "nonexistent" for v in verdicts)
    res.add(f"{n_ansatz} random valid ansatze -> nonexistent", n_ok == n_ansatz,
            f"{n_ok}/{n_ansatz}")
    res.add("linear coefficient matches the directly computed angular momentum",
            worst_slope < 1e-9, f"max mismatch {worst_slope:.1e}")
    try:
        eqm.ParabolicAnsatz([0.0], [0.0], [0.0])
        rejected = False
    except DomainError:
        rejected = True
    res.add("b = c = 0 rejected at construction (a^2 = -1)", rejected)
    return res


def check_saari(seed=0) -> CheckResult:
    res = CheckResult("saari", 11)
    for label, re in geodesic_relative_equilibria():
        traj, _ = integrate_re(re)
        mode = ELLIPTIC if re.kind == "elliptic" else HYPERBOLIC
        v = saari_classify(traj, mode)
        err = abs(v.omega - re.omega) if v.omega is not None else np.inf
        res.add(f"{label}: relative_equilibrium, |omega_fit - omega| < 1e-8",
                v.verdict == RELATIVE_EQUILIBRIUM and err < 1e-8,
                f"{v.verdict}" + (f", error {err:.1e}" if v.omega is not None else
                                  f", failed {v.failed_check}"))
    re = eqm.eulerian_re(1.0, 0.4)
    p = re.params
    fast = eqm.EllipticREParams(p.curvature, p.z, p.alpha, 1.05 * p.omega)
    start = eqm.build_relative_equilibrium(fast, re.masses)
    traj, _ = integrate_re(re, state=start)
    v = saari_classify(traj, ELLIPTIC)
    res.add("perturbed aligned start (omega x 1.05) -> inconclusive",
            v.verdict != RELATIVE_EQUILIBRIUM, f"{v.verdict}, failed {v.failed_check}")
    return res


def two_body_potential(kappa, r, m1=1.0, m2=1.0):
    """Cotangent potential of two bodies a geodesic distance ``r`` apart."""
    k = float(kappa)
    R = 1.0 / np.sqrt(abs(k))
    if k > 0:
        q = R * np.array([[1.0, 0.0, 0.0], [np.cos(r / R), np.sin(r / R), 0.0]])
    else:
        q = R * np.array([[0.0, 0.0, 1.0], [np.sinh(r / R), 0.0, np.cosh(r / R)]])
    return force_function_arrays(k, [m1, m2], q)


def check_continuity(seed=0, r=1.0) -> CheckResult:
    res = CheckResult("continuity", 12)
    newton = 1.0 / r
    for sign in (1.0, -1.0):
        errs = {}
        for k in (1e-2, 1e-4):
            kappa = sign * k
            errs[k] = abs(two_body_potential(kappa, r) - newton)
            analytic = abs(float(kappa_ctn(kappa, r)) - newton)
            res.evidence[f"error_kappa={kappa:g}"] = errs[k]
            res.add(f"kappa={kappa:g}: potential matches ctn_kappa(r)",
                    abs(errs[k] - analytic) < 1e-9 * max(1.0, analytic) + 1e-13,
                    f"|U - 1/r| = {errs[k]:.4e}")
        ratio = (errs[1e-2] / errs[1e-4]) / 100.0
        res.add(f"sign {int(sign):+d}: first-order convergence (error ratio / kappa ratio "
                "within 20% of 1)", abs(ratio - 1.0) < 0.2, f"{ratio:.4f}")
    return res


CHECKS: Dict[str, Callable[..., CheckResult]] = {
    "conservation": check_conservation,
    "eul": check_homogeneity,
    "gradient": check_gradient,
    "fix": check_fixed_points,
    "nofix": check_no_fixed_points,
    "nofixS": check_no_fixed_points_hemisphere,
    "nofixH": check_no_fixed_points_hyperboloid,
    "re": check_relative_equilibria,
    "roots": check_root_counts,
    "rigidity": check_rigidity,
    "rengon": check_rengon,
    "equil": check_equil,
    "noreH": check_noreH,
    "singularity": check_singularity,
    "thpar": check_parabolic,
    "saari": check_saari,
    "continuity": check_continuity,
}

THEOREM_IDS = tuple(CHECKS)

#: One check per acceptance criterion, in order.
CRITERIA = ("conservation", "eul", "gradient", "fix", "nofix", "re", "roots", "rigidity",
            "singularity", "thpar", "saari", "continuity")


def run(theorem: str, seed: int = 0) -> CheckResult:
    if theorem not in CHECKS:
        raise DomainError(f"unknown theorem id {theorem!r}; expected one of "
                          + ", ".join(THEOREM_IDS))
    return CHECKS[theorem](seed=seed)
