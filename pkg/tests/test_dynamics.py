import math

import numpy as np
import pytest

from beamlab import (
    BoundarySpec,
    EndCondition,
    HarmonicPointLoad,
    MovingPointLoad,
    NonConvergenceError,
    PointLoad,
    RankDeficiencyError,
    SpatialGrid,
    TimeGrid,
    UdlLoad,
    ValidationError,
)
from beamlab.dynamics import (
    DynamicState,
    IntegratorConfig,
    MdofSystem,
    RayleighCoeffs,
    SweepPoint,
    beam_time_response,
    bridge_2d_system,
    discretize_beam,
    eigenfrequencies,
    frequency_sweep,
    initial_state,
    integrate,
    moving_load_force,
    newmark_step,
    sdof_system,
    system_energy,
)
from beamlab.modal import find_beta_roots, natural_frequencies
from beamlab.statics import ss_point_deflection

PINNED = BoundarySpec.pinned_pinned()
OMEGA_UNIT = 2.0 * math.pi  # rad/s for the unit-period oscillator

# unit-period oscillator: m=1, k=(2*pi)^2, natural period exactly 1 s
UNIT_OSC = dict(m=1.0, c=0.0, k=OMEGA_UNIT**2)


def constant_force(vector):
    vec = np.asarray(vector, dtype=float)
    return lambda t: vec.copy()


class TestSystemBuilders:
    def test_sdof_shapes(self):
        system = sdof_system(2.0, 0.1, 8.0)
        assert system.size == 1
        assert system.labels == ("u",)
        assert eigenfrequencies(system, 1)[0] == pytest.approx(2.0, rel=1e-12)

    def test_sdof_damping_ratio(self):
        system = sdof_system(1.0, 0.2, OMEGA_UNIT**2)
        zeta = system.damping[0, 0] / (2.0 * math.sqrt(system.mass[0, 0] * system.stiffness[0, 0]))
        assert zeta == pytest.approx(0.0159, abs=2e-4)

    def test_sdof_rejects_bad_mass(self):
        with pytest.raises(ValidationError, match="mass"):
            sdof_system(0.0, 0.0, 1.0)

    def test_bridge_labels_and_decoupling_structure(self):
        system = bridge_2d_system(3.0, 0.5, 12.0)
        assert system.labels == ("x", "y")
        assert system.stiffness[0, 1] == 0.0

    def test_mdof_requires_symmetry(self):
        with pytest.raises(ValidationError, match="stiffness"):
            MdofSystem(
                mass=np.eye(2),
                damping=np.zeros((2, 2)),
                stiffness=np.array([[1.0, 0.5], [0.0, 1.0]]),
                labels=("a", "b"),
            )

    def test_mdof_requires_positive_definite_mass(self):
        with pytest.raises(ValidationError, match="positive definite"):
            MdofSystem(
                mass=np.diag([1.0, 0.0]),
                damping=np.zeros((2, 2)),
                stiffness=np.eye(2),
                labels=("a", "b"),
            )


class TestNewmarkStep:
    def test_zero_everything_stays_zero(self):
        system = sdof_system(**UNIT_OSC)
        cfg = IntegratorConfig(dt=0.01)
        state = DynamicState(np.zeros(1), np.zeros(1), np.zeros(1), 0.0)
        for _ in range(10):
            state = newmark_step(system, state, np.zeros(1), cfg)
        assert state.displacement[0] == 0.0
        assert state.time == pytest.approx(0.1)

    def test_requires_dt(self):
        system = sdof_system(**UNIT_OSC)
        state = DynamicState(np.zeros(1), np.zeros(1), np.zeros(1), 0.0)
        with pytest.raises(ValidationError, match="dt"):
            newmark_step(system, state, np.zeros(1), IntegratorConfig())

    def test_nonfinite_force_rejected(self):
        system = sdof_system(**UNIT_OSC)
        state = DynamicState(np.zeros(1), np.zeros(1), np.zeros(1), 0.0)
        with pytest.raises(ValidationError, match="t="):
            newmark_step(system, state, np.array([np.nan]), IntegratorConfig(dt=0.01))

    def test_gamma_beta_validation(self):
        with pytest.raises(ValidationError, match="gamma"):
            IntegratorConfig(gamma=0.4)
        with pytest.raises(ValidationError, match="beta_nm"):
            IntegratorConfig(gamma=0.5, beta_nm=0.2)


class TestIntegrate:
    def test_free_vibration_period(self):
        # u(t) = cos(2*pi*t); after one period the error stays tiny
        system = sdof_system(**UNIT_OSC)
        tgrid = TimeGrid(0.0, 1.0, 1e-3)
        result = integrate(system, constant_force([0.0]), [1.0], [0.0], tgrid)
        assert abs(result.frames[-1, 0] - 1.0) < 1e-3
        expected = np.cos(OMEGA_UNIT * result.times)
        assert np.max(np.abs(result.frames[:, 0] - expected)) < 1e-3

    def test_energy_conservation_100_periods(self):
        system = sdof_system(**UNIT_OSC)
        tgrid = TimeGrid(0.0, 100.0, 1e-3)
        result = integrate(system, constant_force([0.0]), [1.0], [0.0], tgrid, stride=100)
        # displacement amplitude bounds elastic energy at the turning points
        energy0 = 0.5 * system.stiffness[0, 0] * 1.0**2
        peaks = np.abs(result.frames[:, 0]).max()
        assert abs(0.5 * system.stiffness[0, 0] * peaks**2 - energy0) / energy0 < 1e-3

    def test_constant_force_static_limit(self):
        system = sdof_system(1.0, 1.0, OMEGA_UNIT**2)
        tgrid = TimeGrid(0.0, 20.0, 1e-3)
        result = integrate(system, constant_force([10.0]), [0.0], [0.0], tgrid)
        static = 10.0 / system.stiffness[0, 0]
        assert result.frames[-1, 0] == pytest.approx(static, rel=1e-2)

    def test_damped_resonance_amplitude(self):
        m, c, k = 1.0, 0.2, OMEGA_UNIT**2
        system = sdof_system(m, c, k)
        schedule = lambda t: np.array([math.sin(OMEGA_UNIT * t)])
        tgrid = TimeGrid(0.0, 100.0, 1e-3)
        result = integrate(system, schedule, [0.0], [0.0], tgrid)
        tail = result.frames[result.times > 90.0, 0]
        expected = 1.0 / (c * OMEGA_UNIT)
        assert np.max(np.abs(tail)) == pytest.approx(expected, rel=1e-2)

    def test_two_dof_blocks_decouple(self):
        sdof = sdof_system(1.0, 0.3, 25.0)
        bridge = bridge_2d_system(1.0, 0.3, 25.0)
        tgrid = TimeGrid(0.0, 5.0, 1e-3)
        force_x = lambda t: np.array([math.sin(3.0 * t), 0.0])
        force_1 = lambda t: np.array([math.sin(3.0 * t)])
        res2 = integrate(bridge, force_x, [0.0, 0.0], [0.0, 0.0], tgrid)
        res1 = integrate(sdof, force_1, [0.0], [0.0], tgrid)
        np.testing.assert_allclose(res2.frames[:, 0], res1.frames[:, 0], rtol=0, atol=1e-14)
        np.testing.assert_array_equal(res2.frames[:, 1], 0.0)

    def test_linearity(self):
        system = sdof_system(1.0, 0.1, 30.0)
        tgrid = TimeGrid(0.0, 2.0, 1e-3)
        base = lambda t: np.array([math.sin(5.0 * t)])
        scaled = lambda t: np.array([7.0 * math.sin(5.0 * t)])
        res_base = integrate(system, base, [0.0], [0.0], tgrid)
        res_scaled = integrate(system, scaled, [0.0], [0.0], tgrid)
        scale = np.max(np.abs(res_scaled.frames))
        np.testing.assert_allclose(
            res_scaled.frames, 7.0 * res_base.frames, rtol=0, atol=1e-10 * scale
        )

    def test_stability_for_large_steps(self):
        # average acceleration: doubling dt must never blow up, only lose phase
        system = sdof_system(**UNIT_OSC)
        for dt in (0.05, 0.1, 0.2, 0.4):
            tgrid = TimeGrid(0.0, 50.0, dt)
            result = integrate(system, constant_force([0.0]), [1.0], [0.0], tgrid)
            assert np.max(np.abs(result.frames)) <= 1.0 + 1e-9, f"dt={dt}"

    def test_stride_recording(self):
        system = sdof_system(**UNIT_OSC)
        tgrid = TimeGrid(0.0, 1.0, 1e-2)
        full = integrate(system, constant_force([0.0]), [1.0], [0.0], tgrid)
        strided = integrate(system, constant_force([0.0]), [1.0], [0.0], tgrid, stride=10)
        assert strided.times.size == 11
        np.testing.assert_allclose(strided.frames, full.frames[::10], rtol=0, atol=1e-15)

    def test_initial_state_consistency(self):
        system = sdof_system(2.0, 0.4, 50.0)
        state = initial_state(system, [0.1], [0.2], np.array([3.0]))
        residual = (
            system.mass @ state.acceleration
            + system.damping @ state.velocity
            + system.stiffness @ state.displacement
            - np.array([3.0])
        )
        assert abs(residual[0]) < 1e-12

    def test_energy_helper(self):
        system = sdof_system(2.0, 0.0, 8.0)
        energy = system_energy(system, np.array([1.0]), np.array([2.0]))
        assert energy == pytest.approx(0.5 * 2.0 * 4.0 + 0.5 * 8.0 * 1.0)


class TestDiscretizeBeam:
    def test_total_lumped_mass(self, ref_beam):
        bc = BoundarySpec(EndCondition.free(), EndCondition.free())
        system = discretize_beam(ref_beam, bc, 81)
        total = float(np.trace(system.mass))
        assert total == pytest.approx(
            ref_beam.section.mass_per_length * ref_beam.length, rel=1e-12
        )

    def test_interior_row_sums_vanish(self, ref_beam):
        bc = BoundarySpec(EndCondition.free(), EndCondition.free())
        system = discretize_beam(ref_beam, bc, 41)
        sums = np.asarray(system.stiffness).sum(axis=1)
        scale = np.abs(system.stiffness).max()
        np.testing.assert_allclose(sums, 0.0, atol=1e-12 * scale)

    def test_rank_warning_and_integrate_rejection(self, ref_beam):
        bc = BoundarySpec(EndCondition.free(), EndCondition.free())
        system = discretize_beam(ref_beam, bc, 21)
        assert system.rank_warning is not None
        tgrid = TimeGrid(0.0, 0.1, 0.01)
        zeros = np.zeros(system.size)
        with pytest.raises(RankDeficiencyError):
            integrate(system, lambda t: zeros, zeros, zeros, tgrid)

    def test_eigenfrequencies_match_characteristic_roots(self, ref_beam):
        system = discretize_beam(ref_beam, PINNED, 201)
        betas = find_beta_roots(ref_beam, PINNED, 3)
        exact = [f.omega_rad_s for f in natural_frequencies(betas, ref_beam)]
        approx = eigenfrequencies(system, 3)
        for i, (got, want) in enumerate(zip(approx, exact), start=1):
            assert abs(got - want) / want < 5e-3, f"mode {i}: {got} vs {want}"

    def test_eigen_convergence_second_order(self, ref_beam):
        betas = find_beta_roots(ref_beam, PINNED, 1)
        omega_exact = natural_frequencies(betas, ref_beam)[0].omega_rad_s
        errors, spacings = [], []
        for n in (51, 101, 201, 401):
            system = discretize_beam(ref_beam, PINNED, n)
            omega = eigenfrequencies(system, 1)[0]
            errors.append(abs(omega - omega_exact) / omega_exact)
            spacings.append(ref_beam.length / (n - 1))
        slope = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.1), f"order {slope}, errors {errors}"

    def test_minimum_node_count(self, ref_beam):
        with pytest.raises(ValidationError, match="n_nodes"):
            discretize_beam(ref_beam, PINNED, 5)

    def test_rayleigh_damping_assembled(self, ref_beam):
        coeffs = RayleighCoeffs(mass_coeff=0.1, stiffness_coeff=1e-4)
        system = discretize_beam(ref_beam, PINNED, 21, damping=coeffs)
        expected = 0.1 * np.asarray(system.mass) + 1e-4 * np.asarray(system.stiffness)
        np.testing.assert_allclose(system.damping, expected, rtol=1e-12)

    def test_rayleigh_fit_hits_target(self):
        coeffs = RayleighCoeffs.for_first_mode(0.02, 40.0)
        assert coeffs.mass_coeff == 0.0
        # modal damping ratio at omega1: stiffness_coeff * omega1 / 2
        assert coeffs.stiffness_coeff * 40.0 / 2.0 == pytest.approx(0.02, rel=1e-12)


class TestMovingLoadForce:
    def test_entry_node_gets_full_load(self, ref_beam):
        grid = SpatialGrid.for_beam(ref_beam, 41)
        force = moving_load_force(1e4, 1.0, 0.0, grid, 0.0)
        assert force[0] == 1e4
        assert np.count_nonzero(force) == 1

    def test_mid_cell_even_split(self, ref_beam):
        grid = SpatialGrid.for_beam(ref_beam, 41)  # spacing 0.25
        force = moving_load_force(1e4, 1.0, 0.0, grid, 0.125)
        nonzero = force[force != 0.0]
        np.testing.assert_allclose(nonzero, [5e3, 5e3], rtol=1e-12)

    def test_total_force_preserved(self, ref_beam):
        grid = SpatialGrid.for_beam(ref_beam, 41)
        rng = np.random.default_rng(7)
        for t in rng.uniform(0.0, 10.0, size=1000):
            force = moving_load_force(1e4, 1.0, 0.0, grid, float(t))
            assert force.sum() == pytest.approx(1e4, rel=1e-12)

    def test_zero_after_exit(self, ref_beam):
        grid = SpatialGrid.for_beam(ref_beam, 41)
        np.testing.assert_array_equal(moving_load_force(1e4, 1.0, 0.0, grid, 10.5), 0.0)


class TestBeamTimeResponse:
    def test_constant_point_load_settles_to_static(self, ref_beam):
        # damped beam under a suddenly applied midspan load relaxes to the
        # static influence solution
        tgrid = TimeGrid(0.0, 3.0, 1e-3)
        result = beam_time_response(
            ref_beam, PINNED, 41, [PointLoad(1e4, 5.0)], tgrid, zeta1=0.2
        )
        static = ss_point_deflection(5.0, 1e4, 5.0, ref_beam)
        assert result.frames[-1, 20] == pytest.approx(static, rel=5e-3)

    def test_constrained_nodes_stay_zero(self, ref_beam):
        tgrid = TimeGrid(0.0, 0.5, 1e-3)
        result = beam_time_response(
            ref_beam, PINNED, 21, [UdlLoad(5e3)], tgrid, zeta1=0.05
        )
        np.testing.assert_array_equal(result.frames[:, 0], 0.0)
        np.testing.assert_array_equal(result.frames[:, -1], 0.0)

    def test_moving_load_slow_limit_matches_quasi_static(self, ref_beam):
        # crossing at v = 0.2 m/s (50 s) with damping: dynamic peak close to
        # the static influence peak
        tgrid = TimeGrid(0.0, 30.0, 5e-3)
        result = beam_time_response(
            ref_beam,
            PINNED,
            41,
            [MovingPointLoad(1e4, 0.2, 0.0)],
            tgrid,
            zeta1=0.05,
        )
        peak = np.max(np.abs(result.frames[:, 20]))
        static_peak = ss_point_deflection(5.0, 1e4, 5.0, ref_beam)
        assert peak == pytest.approx(static_peak, rel=2e-2)


class TestFrequencySweep:
    def test_peak_near_fundamental(self, ref_beam):
        betas = find_beta_roots(ref_beam, PINNED, 1)
        f1 = natural_frequencies(betas, ref_beam)[0].f_hz
        freqs = [4.5, 5.0, 5.5, 6.0, 6.5]
        points = frequency_sweep(
            ref_beam, PINNED, 41, 1e3, 5.0, freqs,
            settle_periods=25, measure_periods=5, zeta1=0.02,
        )
        assert [p.f_hz for p in points] == freqs
        best = max(points, key=lambda p: p.amplitude_m)
        nearest = min(freqs, key=lambda f: abs(f - f1))
        assert best.f_hz == nearest

    def test_quasi_static_low_frequency_limit(self, ref_beam):
        betas = find_beta_roots(ref_beam, PINNED, 1)
        f1 = natural_frequencies(betas, ref_beam)[0].f_hz
        static = ss_point_deflection(5.0, 1e3, 5.0, ref_beam)
        points = frequency_sweep(
            ref_beam, PINNED, 41, 1e3, 5.0, [0.2 * f1],
            settle_periods=10, measure_periods=5, zeta1=0.02,
        )
        assert points[0].amplitude_m == pytest.approx(static, rel=0.1)

    def test_resonant_amplification(self, ref_beam):
        betas = find_beta_roots(ref_beam, PINNED, 1)
        f1 = natural_frequencies(betas, ref_beam)[0].f_hz
        points = frequency_sweep(
            ref_beam, PINNED, 41, 1e3, 5.0, [0.2 * f1, f1],
            settle_periods=30, measure_periods=10, zeta1=0.02,
        )
        assert points[1].amplitude_m / points[0].amplitude_m > 5.0

    def test_undamped_resonance_flagged(self, ref_beam):
        betas = find_beta_roots(ref_beam, PINNED, 1)
        f1 = natural_frequencies(betas, ref_beam)[0].f_hz
        with pytest.raises(NonConvergenceError, match="f_hz"):
            frequency_sweep(
                ref_beam, PINNED, 41, 1e3, 5.0, [f1],
                settle_periods=30, measure_periods=10, zeta1=0.0,
            )

    def test_thread_pool_matches_serial(self, ref_beam):
        freqs = [2.0, 4.0, 6.0]
        kwargs = dict(settle_periods=8, measure_periods=4, zeta1=0.05)
        serial = frequency_sweep(ref_beam, PINNED, 21, 1e3, 5.0, freqs, **kwargs)
        pooled = frequency_sweep(
            ref_beam, PINNED, 21, 1e3, 5.0, freqs, workers=3, **kwargs
        )
        assert serial == pooled  # bitwise identical dataclasses

    def test_rejects_bad_frequencies(self, ref_beam):
        with pytest.raises(ValidationError):
            frequency_sweep(ref_beam, PINNED, 21, 1e3, 5.0, [0.0])
