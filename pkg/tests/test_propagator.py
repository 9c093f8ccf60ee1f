import math

import numpy as np
import pytest

from cavdot.constants import HBAR_EV_FS
from cavdot.errors import CapacityError, DomainError, NumericBlowupError
from cavdot.model import Model, PulseSpec, SystemParams
from cavdot.propagator import IntegratorConfig, evolve, rhs, rk4_step
from cavdot.tensor import DensityMatrix, QOperator


def toy_params(**kw):
    """Small decoupled system; overridable."""
    base = dict(
        g_s=(0.0, 0.0), g=0.0,
        gamma_qd_decay=(0.0, 0.0), gamma_qd_dephase=(0.0, 0.0),
        gamma_pl=0.0, gamma_cav_decay=(0.0, 0.0), gamma_cav_dephase=(0.0, 0.0),
        n_pl_levels=2, n_ph_levels=2,
    )
    base.update(kw)
    return SystemParams(**base)


def qd1_excited(layout):
    n = layout.total_dim
    m = np.zeros((n, n), dtype=complex)
    idx = np.ravel_multi_index((1, 0, 0, 0, 0), layout.dims)
    m[idx, idx] = 1.0
    return DensityMatrix(QOperator(layout, m), validate=False)


def random_hermitian_state(rng, layout):
    n = layout.total_dim
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    return rho


DECAY = 0.1  # eV


@pytest.fixture(scope="module")
def decay_model():
    params = toy_params(gamma_qd_decay=(DECAY, 0.0))
    return Model(params, PulseSpec(shape="off"))


class TestRhs:
    def test_zero_generator(self):
        model = Model(toy_params(), PulseSpec(shape="off"))
        rho = DensityMatrix.ground_state(model.layout).matrix()
        out = rhs(rho, 0.0, model)
        assert np.abs(out).max() == 0.0

    def test_single_decay_channel_rate(self, decay_model):
        rho = qd1_excited(decay_model.layout)
        out = rhs(rho, 0.0, decay_model)
        idx = np.ravel_multi_index((1, 0, 0, 0, 0), decay_model.layout.dims)
        assert out[idx, idx].real == pytest.approx(-DECAY / HBAR_EV_FS, rel=1e-12)

    def test_trace_free_on_random_states(self, decay_model):
        rng = np.random.default_rng(4)
        for _ in range(3):
            rho = random_hermitian_state(rng, decay_model.layout)
            out = rhs(rho, 1.0, decay_model)
            assert abs(np.trace(out)) < 1e-12

    def test_matches_dense_lindblad_oracle(self):
        params = SystemParams(n_pl_levels=3, n_ph_levels=2)
        model = Model(params, PulseSpec())
        rng = np.random.default_rng(8)
        rho = random_hermitian_state(rng, model.layout)
        t = 30.0
        out = rhs(rho, t, model)
        h = model.hamiltonian(t).toarray()
        ref = (-1j / HBAR_EV_FS) * (h @ rho - rho @ h)
        for ch in model.channels:
            a = ch.operator.toarray()
            ada = a.conj().T @ a
            ref += (ch.rate / HBAR_EV_FS) * (
                a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada))
        assert np.abs(out - ref).max() < 1e-13


class TestRk4Step:
    def test_zero_generator_keeps_state(self):
        model = Model(toy_params(), PulseSpec(shape="off"))
        rho = DensityMatrix.ground_state(model.layout)
        out = rk4_step(rho, 0.0, 0.1, model)
        assert np.array_equal(out.matrix(), rho.matrix())

    def test_decay_oracle_high_accuracy(self, decay_model):
        # excited population after fixed-step RK4 vs analytic exp(-gamma t / hbar)
        rho = qd1_excited(decay_model.layout)
        dt, t_end = 0.01, 100.0
        cfg = IntegratorConfig(dt_fs=dt, t_end_fs=t_end, record_every_fs=t_end)
        traj = evolve(decay_model, cfg, initial=rho)
        expected = math.exp(-DECAY * t_end / HBAR_EV_FS)
        assert abs(traj["n_qd1"][-1] - expected) < 1e-8

    def test_rk4_global_order(self, decay_model):
        # halving dt cuts the endpoint error ~16x
        rho = qd1_excited(decay_model.layout)
        t_end = 20.0
        expected = math.exp(-DECAY * t_end / HBAR_EV_FS)
        errs = []
        for dt in (0.8, 0.4):
            cfg = IntegratorConfig(dt_fs=dt, t_end_fs=t_end, record_every_fs=t_end)
            traj = evolve(decay_model, cfg, initial=rho)
            errs.append(abs(traj["n_qd1"][-1] - expected))
        ratio = errs[0] / errs[1]
        assert 16 * 0.8 < ratio < 16 * 1.2

    def test_blowup_raises(self, decay_model):
        rho = qd1_excited(decay_model.layout)
        with pytest.raises(NumericBlowupError):
            # far beyond the RK4 stability boundary; overflow to inf
            cfg = IntegratorConfig(dt_fs=1e8, t_end_fs=1e10, record_every_fs=1e8)
            evolve(decay_model, cfg, initial=rho)

    def test_rejects_nonpositive_dt(self, decay_model):
        rho = qd1_excited(decay_model.layout)
        with pytest.raises(DomainError):
            rk4_step(rho, 0.0, -0.1, decay_model)


class TestEvolve:
    def test_ground_state_stationary_without_pulse(self):
        model = Model(SystemParams(n_pl_levels=3, n_ph_levels=2), PulseSpec(shape="off"))
        cfg = IntegratorConfig(dt_fs=0.05, t_end_fs=10.0, record_every_fs=1.0)
        traj = evolve(model, cfg)
        assert np.abs(traj["n_total"]).max() == 0.0
        assert np.abs(traj["C"]).max() == 0.0
        assert traj.max_trace_err < 1e-14

    def test_invariants_short_pulsed_run(self):
        model = Model(SystemParams(n_pl_levels=4, n_ph_levels=2), PulseSpec())
        cfg = IntegratorConfig(dt_fs=0.02, t_end_fs=30.0, record_every_fs=1.0)
        traj = evolve(model, cfg)
        assert traj.max_trace_err <= 1e-8
        assert traj.max_herm_err <= 1e-10
        assert traj["n_total"][-1] > 1e-3  # the pulse excited the system
        assert (traj["min_eig_qd"] >= -1e-8).all()

    def test_positivity_of_sampled_states(self):
        # full-spectrum positivity on a small strongly driven system
        model = Model(SystemParams(n_pl_levels=3, n_ph_levels=2), PulseSpec())
        cfg = IntegratorConfig(dt_fs=0.02, t_end_fs=40.0, record_every_fs=2.0)
        min_eigs = []
        evolve(model, cfg,
               state_callback=lambda t, rho: min_eigs.append(
                   np.linalg.eigvalsh(rho).min()))
        assert min(min_eigs) >= -1e-8

    def test_sampling_grid(self):
        model = Model(toy_params(), PulseSpec(shape="off"))
        cfg = IntegratorConfig(dt_fs=0.5, t_end_fs=5.0, record_every_fs=1.0)
        traj = evolve(model, cfg)
        assert np.allclose(traj.times, np.arange(0.0, 5.5, 1.0), atol=0)

    def test_t_end_zero_records_single_sample(self):
        model = Model(toy_params(), PulseSpec(shape="off"))
        cfg = IntegratorConfig(dt_fs=0.5, t_end_fs=0.0, record_every_fs=1.0)
        traj = evolve(model, cfg)
        assert len(traj) == 1 and traj.times[0] == 0.0

    def test_memory_cap(self):
        model = Model(SystemParams(n_pl_levels=24, n_ph_levels=4), PulseSpec())
        cfg = IntegratorConfig(dt_fs=0.02, t_end_fs=1.0, record_every_fs=1.0,
                               max_memory_gb=0.01)
        with pytest.raises(CapacityError):
            evolve(model, cfg)

    def test_incommensurate_grid_rejected(self):
        model = Model(toy_params(), PulseSpec(shape="off"))
        with pytest.raises(DomainError):
            evolve(model, IntegratorConfig(dt_fs=0.3, t_end_fs=1.0,
                                           record_every_fs=0.5))

    def test_deterministic(self):
        model = Model(SystemParams(n_pl_levels=3, n_ph_levels=2), PulseSpec())
        cfg = IntegratorConfig(dt_fs=0.05, t_end_fs=10.0, record_every_fs=1.0)
        t1 = evolve(model, cfg)
        t2 = evolve(model, cfg)
        for name in t1.columns:
            a, b = t1.columns[name], t2.columns[name]
            assert np.array_equal(a, b, equal_nan=True), name

    def test_renormalize_trace_flag(self):
        params = toy_params(gamma_qd_decay=(DECAY, 0.0))
        model = Model(params, PulseSpec(shape="off"))
        cfg = IntegratorConfig(dt_fs=0.05, t_end_fs=5.0, record_every_fs=1.0,
                               renormalize_trace=True)
        traj = evolve(model, cfg, initial=qd1_excited(model.layout))
        assert traj.max_trace_err < 1e-13

    def test_dephasing_coherence_decay_convention(self):
        # with pure dephasing gamma_deph, the 0-1 coherence of a QD decays as
        # exp(-gamma_deph t / hbar)
        gamma_deph = 0.02
        params = toy_params(gamma_qd_dephase=(gamma_deph, 0.0))
        model = Model(params, PulseSpec(shape="off"))
        lay = model.layout
        n = lay.total_dim
        ket = np.zeros(n, dtype=complex)
        ket[np.ravel_multi_index((0, 0, 0, 0, 0), lay.dims)] = 1 / math.sqrt(2)
        ket[np.ravel_multi_index((1, 0, 0, 0, 0), lay.dims)] = 1 / math.sqrt(2)
        rho0 = DensityMatrix.from_ket(ket, lay)
        t_end = 50.0
        cfg = IntegratorConfig(dt_fs=0.02, t_end_fs=t_end, record_every_fs=t_end)
        states = []
        evolve(model, cfg, initial=rho0, state_callback=lambda t, r: states.append(r.copy()))
        i = np.ravel_multi_index((0, 0, 0, 0, 0), lay.dims)
        j = np.ravel_multi_index((1, 0, 0, 0, 0), lay.dims)
        coh = abs(states[-1][i, j])
        expected = 0.5 * math.exp(-gamma_deph * t_end / HBAR_EV_FS)
        assert abs(coh - expected) < 1e-8


class TestIntegratorConfig:
    def test_invariant_chain(self):
        with pytest.raises(DomainError):
            IntegratorConfig(dt_fs=2.0, t_end_fs=10.0, record_every_fs=1.0)
        with pytest.raises(DomainError):
            IntegratorConfig(dt_fs=0.5, t_end_fs=2.0, record_every_fs=3.0)
        with pytest.raises(DomainError):
            IntegratorConfig(dt_fs=0.0, t_end_fs=1.0, record_every_fs=1.0)

    def test_t_end_zero_allowed(self):
        cfg = IntegratorConfig(dt_fs=0.5, t_end_fs=0.0, record_every_fs=1.0)
        assert cfg.n_steps() == 0
