import math

import numpy as np
import pytest
from scipy.special import gammaln

from solvstate import (
    ConvergenceError,
    CustomSpectrum,
    DomainError,
    GKLabel,
    HarmonicSpectrum,
    KPLabel,
    PoschlTellerSpectrum,
    SeriesControl,
    build_ladder,
    displace_ground,
    evolve,
    gk_norm_constant,
    gk_norm_constant_pt_closed,
    gk_overlap,
    gk_state,
    hyper_pfq,
    kp_norm_constant_pt,
    kp_overlap_pt,
    kp_state_general,
    kp_state_pt,
    photon_statistics,
)
from solvstate.fockspace import apply
from solvstate.verify import coeff_distance, eigen_residual

LAM = 4.0
SPEC = PoschlTellerSpectrum(2.0, 2.0)


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------

class TestLabels:
    def test_gk_label_validation(self):
        with pytest.raises(DomainError):
            GKLabel(0.5, 0.0, -1)

    def test_kp_label_needs_one_chart(self):
        with pytest.raises(DomainError):
            KPLabel(alpha=0.0, k=0)
        with pytest.raises(DomainError):
            KPLabel(xi=0.3, Z=0.3)

    def test_kp_chart_conversion(self):
        Z = 0.4 * np.exp(0.7j)
        xi = KPLabel(Z=Z).as_xi
        assert abs(xi) == pytest.approx(math.tanh(0.4), rel=1e-14)
        assert np.angle(xi) == pytest.approx(0.7, rel=1e-12)
        assert KPLabel(Z=0.0).as_xi == 0.0


# ---------------------------------------------------------------------------
# Gazeau-Klauder states
# ---------------------------------------------------------------------------

class TestGKState:
    def test_zero_label_is_basis_state(self):
        state = gk_state(SPEC, GKLabel(0.0, 0.4, 3))
        assert state.offset == 3
        assert state.size == 1
        assert state.coefficients[0] == pytest.approx(1.0)

    def test_eigenvalue_property(self):
        for z in (0.2, 0.7 + 0.2j, 1.5):
            for alpha in (0.0, 0.3):
                res = eigen_residual(SPEC, GKLabel(z, alpha, 0))
                assert res <= 1e-9

    def test_photon_added_is_not_eigenstate(self):
        assert eigen_residual(SPEC, GKLabel(0.7, 0.0, 1)) > 0.01

    def test_pt_coefficients_closed_form(self):
        # z^n/n! sqrt((n+k)! (lam+k+1)_n) / (lam+1)_n with the energy phases,
        # equal to the constructed coefficients up to one global constant
        z, alpha, k = 0.6 + 0.3j, 0.2, 2
        state = gk_state(SPEC, GKLabel(z, alpha, k))
        n = np.arange(state.size)
        log_mag = (n * math.log(abs(z)) - gammaln(n + 1.0)
                   + 0.5 * (gammaln(n + k + 1.0)
                            + gammaln(LAM + k + 1.0 + n) - gammaln(LAM + k + 1.0))
                   - (gammaln(LAM + 1.0 + n) - gammaln(LAM + 1.0)))
        energies = np.array([SPEC.energy(int(m) + k) for m in n])
        closed = np.exp(log_mag - log_mag.max()) * np.exp(
            1j * (n * np.angle(z) - alpha * energies))
        closed = closed / np.linalg.norm(closed)
        assert np.max(np.abs(state.coefficients - closed)) < 1e-12

    def test_k0_reduction(self):
        z, alpha = 0.7 + 0.2j, 0.3
        state = gk_state(SPEC, GKLabel(z, alpha, 0))
        n = np.arange(state.size)
        logs = np.array([m * math.log(abs(z)) - 0.5 * SPEC.log_e0(int(m))
                         for m in n])
        closed = np.exp(logs - logs.max()) * np.exp(
            1j * (n * np.angle(z)
                  - alpha * np.array([SPEC.energy(int(m)) for m in n])))
        closed = closed / np.linalg.norm(closed)
        assert np.max(np.abs(state.coefficients - closed)) < 1e-12

    def test_photon_addition_matches_ladder_application(self):
        # applying (a+)^k to the k=0 state must rebuild the k-added state
        z, alpha, k = 0.5 + 0.4j, 0.25, 2
        base = gk_state(SPEC, GKLabel(z, alpha, 0), tail_eps=1e-26)
        dim = base.size + k + 2
        lad = build_ladder(SPEC, alpha, dim - 1)
        raised = apply(lad.a_plus @ lad.a_plus, base).normalized()
        added = gk_state(SPEC, GKLabel(z, alpha, k), tail_eps=1e-26)
        assert coeff_distance(raised, added) < 1e-10

    def test_tail_bound_shrinks_with_budget(self):
        loose = gk_state(SPEC, GKLabel(1.2, 0.0, 1), tail_eps=1e-6)
        tight = gk_state(SPEC, GKLabel(1.2, 0.0, 1), tail_eps=1e-14)
        assert tight.size > loose.size
        assert tight.tail_bound < loose.tail_bound <= 1e-6

    def test_radius_validation_on_bounded_spectrum(self):
        bounded = CustomSpectrum(rule=lambda n: 1.0 - 2.0 ** (-n))
        state = gk_state(bounded, GKLabel(0.5, 0.0, 0))
        assert state.norm() == pytest.approx(1.0)
        with pytest.raises(DomainError):
            gk_state(bounded, GKLabel(1.01, 0.0, 0))


class TestGKNormConstant:
    def test_zero_argument_counts_only_first_term(self):
        for k in (0, 2, 4):
            assert gk_norm_constant(SPEC, 0.0, k) == pytest.approx(
                SPEC.log_e0(k), abs=1e-13)

    def test_k0_is_0f1(self):
        for u in (0.1, 1.0, 4.0):
            series = gk_norm_constant(SPEC, u, 0)
            f = hyper_pfq([], [LAM + 1.0], u)
            assert series == pytest.approx(f.log_abs, abs=1e-13)

    def test_matches_pochhammer_adjusted_closed_form(self):
        for k in (0, 1, 3):
            for u in (0.5, 2.0):
                series = gk_norm_constant(SPEC, u, k)
                closed = gk_norm_constant_pt_closed(LAM, u, k)
                assert abs(math.expm1(series - closed)) < 1e-10

    def test_compact_convention_differs_by_constant(self):
        # the two conventions differ by exactly (lam+1)_k
        from solvstate.specfun import log_pochhammer
        for k in (1, 3):
            full = gk_norm_constant_pt_closed(LAM, 0.7, k, convention="series")
            bare = gk_norm_constant_pt_closed(LAM, 0.7, k, convention="compact")
            assert full - bare == pytest.approx(log_pochhammer(LAM + 1.0, k),
                                                rel=1e-13)

    def test_harmonic_against_brute_force(self):
        spec = HarmonicSpectrum()
        for k in (0, 2):
            for u in (0.3, 1.7):
                # direct finite sum: E_k(n) = (n!)^2/(n+k)! for E_n = n
                total = sum(
                    u ** n * math.exp(gammaln(n + k + 1.0) - 2.0 * gammaln(n + 1.0))
                    for n in range(220))
                assert gk_norm_constant(spec, u, k) == pytest.approx(
                    math.log(total), rel=1e-12)

    def test_nonconvergence_raises(self):
        ctl = SeriesControl(max_terms=4, rel_tol=1e-15)
        with pytest.raises(ConvergenceError) as err:
            gk_norm_constant(SPEC, 3.0, 0, ctl)
        assert err.value.partial is not None


class TestGKOverlap:
    def test_normalization(self):
        label = GKLabel(0.8 + 0.1j, 0.4, 2)
        assert gk_overlap(SPEC, label, label) == pytest.approx(1.0, abs=1e-12)

    def test_hermitian_symmetry(self):
        l1, l2 = GKLabel(0.6, 0.1, 1), GKLabel(0.3 + 0.5j, 0.7, 1)
        assert gk_overlap(SPEC, l1, l2) == pytest.approx(
            np.conj(gk_overlap(SPEC, l2, l1)), abs=1e-12)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            z1, z2 = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
            a1, a2 = rng.uniform(0, 1, 2)
            val = gk_overlap(SPEC, GKLabel(z1, a1, 1), GKLabel(z2, a2, 1))
            assert abs(val) <= 1.0 + 1e-12

    def test_matches_state_inner_product(self):
        l1, l2 = GKLabel(0.6, 0.2, 1), GKLabel(0.4 + 0.3j, 0.5, 1)
        s1 = gk_state(SPEC, l1, tail_eps=1e-26)
        s2 = gk_state(SPEC, l2, tail_eps=1e-26)
        assert gk_overlap(SPEC, l1, l2) == pytest.approx(s1.inner(s2), abs=1e-12)

    def test_equal_alpha_compact_form(self):
        from solvstate.specfun import log_pochhammer, log_gamma
        k, z1, z2 = 1, 0.5, 0.8
        o = gk_overlap(SPEC, GKLabel(z1, 0.3, k), GKLabel(z2, 0.3, k))
        f = hyper_pfq([k + 1.0, LAM + k + 1.0], [1.0, LAM + 1.0, LAM + 1.0],
                      z1 * z2)
        compact = math.exp(
            f.log_abs + log_gamma(k + 1.0) + log_pochhammer(LAM + 1.0, k)
            - 0.5 * (gk_norm_constant(SPEC, z1 ** 2, k)
                     + gk_norm_constant(SPEC, z2 ** 2, k)))
        assert abs(o - compact) < 1e-10 * abs(compact)

    def test_requires_shared_k(self):
        with pytest.raises(DomainError):
            gk_overlap(SPEC, GKLabel(0.5, 0.0, 0), GKLabel(0.5, 0.0, 1))


# ---------------------------------------------------------------------------
# Klauder-Perelomov states (Poschl-Teller closed form)
# ---------------------------------------------------------------------------

class TestKPStatePT:
    def test_zero_label_is_basis_state(self):
        state = kp_state_pt(LAM, KPLabel(xi=0.0, alpha=0.1, k=2))
        assert state.offset == 2
        assert state.size == 1

    def test_k0_closed_coefficients_with_prefactor(self):
        # (1-|xi|^2)^((lam+1)/2) xi^n sqrt((lam+1)_n / n!) are already
        # normalized; the constructed state must match them exactly
        xi = 0.4 * np.exp(0.3j)
        state = kp_state_pt(LAM, KPLabel(xi=xi, alpha=0.0, k=0), tail_eps=1e-26)
        n = np.arange(state.size)
        closed = (1.0 - abs(xi) ** 2) ** ((LAM + 1.0) / 2.0) * xi ** n * np.exp(
            0.5 * (gammaln(n + LAM + 1.0) - gammaln(n + 1.0) - gammaln(LAM + 1.0)))
        assert np.max(np.abs(state.coefficients - closed)) < 1e-12

    def test_matches_displacement_oracle(self):
        for Zmag in (0.2, 0.4, 0.8):
            Z = Zmag * np.exp(0.5j)
            oracle = displace_ground(SPEC, Z)
            closed = kp_state_pt(LAM, KPLabel(Z=Z, alpha=0.0, k=0),
                                 tail_eps=1e-24)
            assert coeff_distance(oracle, closed) < 1e-8

    def test_photon_addition_matches_ladder_application(self):
        xi, alpha, k = 0.45 * np.exp(0.2j), 0.3, 2
        base = kp_state_pt(LAM, KPLabel(xi=xi, alpha=alpha, k=0), tail_eps=1e-26)
        dim = base.size + k + 2
        lad = build_ladder(SPEC, alpha, dim - 1)
        raised = apply(lad.a_plus @ lad.a_plus, base).normalized()
        added = kp_state_pt(LAM, KPLabel(xi=xi, alpha=alpha, k=k),
                            tail_eps=1e-26)
        assert coeff_distance(raised, added) < 1e-10

    def test_unit_disk_boundary_rejected(self):
        with pytest.raises(DomainError):
            kp_state_pt(LAM, KPLabel(xi=1.0, alpha=0.0, k=0))

    def test_two_lambda_errata_mode_differs(self):
        label = KPLabel(xi=0.4, alpha=0.0, k=1)
        standard = kp_state_pt(LAM, label)
        literal = kp_state_pt(LAM, label, exponent="two_lambda")
        assert coeff_distance(standard, literal) > 1e-3


class TestKPNormConstant:
    def test_k0_is_exactly_one(self):
        for u in (0.1, 0.5, 0.9):
            log_n = kp_norm_constant_pt(LAM, u, 0)
            assert abs(math.expm1(log_n)) < 1e-12

    def test_zero_argument_value(self):
        # Gamma(k+1) Gamma(lam+1+k) / Gamma(lam+1) at xi = 0
        for k in (1, 3):
            expected = (gammaln(k + 1.0) + gammaln(LAM + 1.0 + k)
                        - gammaln(LAM + 1.0))
            assert kp_norm_constant_pt(LAM, 0.0, k) == pytest.approx(
                expected, rel=1e-13)

    def test_closed_matches_series(self):
        for k in (0, 2):
            for u in (0.1, 0.3, 0.6):
                closed = kp_norm_constant_pt(LAM, u, k, method="closed")
                series = kp_norm_constant_pt(LAM, u, k, method="series")
                assert abs(math.expm1(closed - series)) < 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            kp_norm_constant_pt(LAM, 1.0, 0)
        with pytest.raises(DomainError):
            kp_norm_constant_pt(LAM, 0.5, 0, method="nope")

    def test_nonconvergence_near_disk_edge(self):
        ctl = SeriesControl(max_terms=10, rel_tol=1e-15)
        with pytest.raises(ConvergenceError):
            kp_norm_constant_pt(LAM, 0.999, 2, ctl, method="series")


class TestKPOverlap:
    def test_normalization(self):
        label = KPLabel(xi=0.5j, alpha=0.2, k=1)
        assert kp_overlap_pt(LAM, label, label) == pytest.approx(1.0, abs=1e-12)

    def test_matches_coefficient_dot_product(self):
        l1 = KPLabel(xi=0.3, alpha=0.2, k=1)
        l2 = KPLabel(xi=0.5j, alpha=0.2, k=1)
        s1 = kp_state_pt(LAM, l1, tail_eps=1e-26)
        s2 = kp_state_pt(LAM, l2, tail_eps=1e-26)
        assert kp_overlap_pt(LAM, l1, l2) == pytest.approx(s1.inner(s2),
                                                           abs=1e-10)

    def test_alpha_phases_match_dot_product(self):
        l1 = KPLabel(xi=0.3, alpha=0.1, k=1)
        l2 = KPLabel(xi=0.4 + 0.2j, alpha=0.6, k=1)
        s1 = kp_state_pt(LAM, l1, tail_eps=1e-26)
        s2 = kp_state_pt(LAM, l2, tail_eps=1e-26)
        assert kp_overlap_pt(LAM, l1, l2) == pytest.approx(s1.inner(s2),
                                                           abs=1e-10)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            x1, x2 = 0.8 * (rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)) / 2
            val = kp_overlap_pt(LAM, KPLabel(xi=x1, alpha=0.0, k=1),
                                KPLabel(xi=x2, alpha=0.9, k=1))
            assert abs(val) <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# Klauder-Perelomov states, generic spectrum
# ---------------------------------------------------------------------------

class TestKPGeneral:
    def test_zero_displacement(self):
        res = kp_state_general(SPEC, 0.0, k=0)
        assert res.state.size == 1
        assert res.j_converged

    def test_harmonic_matches_displacement(self):
        res = kp_state_general(HarmonicSpectrum(), 0.25, k=0)
        oracle = displace_ground(HarmonicSpectrum(), 0.25)
        assert res.j_converged
        assert coeff_distance(res.state, oracle) < 1e-6

    def test_pt_matches_disk_chart(self):
        Z = 0.3 * np.exp(0.2j)
        res = kp_state_general(SPEC, Z, k=0)
        closed = kp_state_pt(LAM, KPLabel(Z=Z, alpha=0.0, k=0), tail_eps=1e-24)
        assert res.j_converged
        assert coeff_distance(res.state, closed) < 1e-6

    def test_photon_added_matches_disk_chart(self):
        Z = 0.25
        res = kp_state_general(SPEC, Z, alpha=0.1, k=2)
        closed = kp_state_pt(LAM, KPLabel(Z=Z, alpha=0.1, k=2), tail_eps=1e-24)
        assert res.state.offset == 2
        assert coeff_distance(res.state, closed) < 1e-6

    def test_divergent_expansion_is_flagged(self):
        res = kp_state_general(SPEC, 2.5, k=0, n_max=24, j_max=60)
        assert not res.j_converged
        assert res.worst_term_ratio > 1e-12


# ---------------------------------------------------------------------------
# evolution and statistics
# ---------------------------------------------------------------------------

class TestEvolve:
    def test_zero_time_is_identity(self):
        state = gk_state(SPEC, GKLabel(0.7, 0.2, 1))
        out = evolve(state, SPEC, 0.0)
        assert np.array_equal(out.coefficients, state.coefficients)

    def test_norm_preserved_exactly(self):
        state = gk_state(SPEC, GKLabel(0.7 + 0.2j, 0.2, 1))
        out = evolve(state, SPEC, 5.321)
        assert out.norm() == pytest.approx(state.norm(), abs=1e-15)

    @pytest.mark.parametrize("k", [0, 2])
    def test_gk_alpha_shift_identity(self, k):
        label = GKLabel(0.7 + 0.2j, 0.2, k)
        t = 0.37
        ev = evolve(gk_state(SPEC, label), SPEC, t)
        rebuilt = gk_state(SPEC, GKLabel(label.z, label.alpha + t, k))
        assert np.max(np.abs(ev.coefficients - rebuilt.coefficients)) < 1e-14
        assert ev.alpha == pytest.approx(label.alpha + t)

    @pytest.mark.parametrize("k", [0, 2])
    def test_kp_alpha_shift_identity(self, k):
        label = KPLabel(xi=0.45 * np.exp(0.3j), alpha=0.1, k=k)
        t = 0.61
        ev = evolve(kp_state_pt(LAM, label), SPEC, t)
        rebuilt = kp_state_pt(LAM, KPLabel(xi=label.xi, alpha=label.alpha + t,
                                           k=k))
        assert np.max(np.abs(ev.coefficients - rebuilt.coefficients)) < 1e-14


class TestPhotonStatistics:
    def test_basis_state_point_mass(self):
        state = gk_state(SPEC, GKLabel(0.0, 0.0, 3))
        stats = photon_statistics(state, SPEC)
        assert stats.mean_level == pytest.approx(3.0)
        assert stats.mean_energy == pytest.approx(SPEC.energy(3))
        assert stats.probabilities.sum() == pytest.approx(1.0)

    def test_probabilities_sum_to_one(self):
        state = kp_state_pt(LAM, KPLabel(xi=0.6, alpha=0.0, k=1))
        stats = photon_statistics(state, SPEC)
        assert stats.probabilities.sum() == pytest.approx(
            1.0, abs=state.tail_bound + 1e-12)

    def test_harmonic_coherent_state_is_poissonian(self):
        z = 0.9
        spec = HarmonicSpectrum()
        state = gk_state(spec, GKLabel(z, 0.0, 0), tail_eps=1e-20)
        stats = photon_statistics(state, spec)
        mean = z * z
        pois = np.exp(-mean + stats.levels * math.log(mean)
                      - gammaln(stats.levels + 1.0))
        assert np.max(np.abs(stats.probabilities - pois)) < 1e-10
        assert stats.mean_level == pytest.approx(mean, rel=1e-10)
