"""Named verification suites behind the CLI `verify` subcommand.

Each suite runs a battery of identity checks at pinned tolerances and returns
a structured report; the measures suite additionally carries an errata
section for the documented inconsistency of the published unit-disk weight,
which is reproduced and reported but never asserted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import measures as msr
from . import poschl_teller as pt
from . import states as st
from .errors import DomainError
from .fockspace import build_ladder, displace_ground
from .spectrum import CustomSpectrum, HarmonicSpectrum, PoschlTellerSpectrum
from .specfun import (QuadratureRule, hyper_pfq, integrate, log_gamma,
                      log_pochhammer)

__all__ = ["CheckResult", "SuiteReport", "run_suite", "SUITES",
           "coeff_distance"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: float
    tolerance: float
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    errata: list = field(default_factory=list)
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, name, observed, tolerance, detail="", larger_is_fail=True):
        ok = observed <= tolerance if larger_is_fail else observed >= tolerance
        self.checks.append(CheckResult(name, bool(ok), float(observed),
                                       float(tolerance), detail))

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "checks": [c.to_dict() for c in self.checks],
            "errata": list(self.errata),
        }

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} "
                 f"({len(self.checks)} checks, {self.runtime_s:.2f}s)"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: observed {c.observed:.3e} "
                         f"vs tolerance {c.tolerance:.3e}"
                         + (f"  ({c.detail})" if c.detail else ""))
        if self.errata:
            lines.append("  errata:")
            for e in self.errata:
                lines.append(f"    - {e}")
        return "\n".join(lines)


def coeff_distance(s1, s2) -> float:
    """Max coefficient deviation between two states after aligning one
    global phase (compared on the absolute level basis)."""
    dim = max(s1.offset + s1.size, s2.offset + s2.size)
    v1, v2 = s1.embed(dim), s2.embed(dim)
    ip = np.vdot(v2, v1)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.max(np.abs(v1 - phase * v2)))


# ---------------------------------------------------------------------------
# ladder suite
# ---------------------------------------------------------------------------

def suite_ladder(lam: float = 4.0, N: int = 64) -> SuiteReport:
    rep = SuiteReport("ladder")
    t0 = time.perf_counter()
    specs = [("pt", PoschlTellerSpectrum(lam / 2.0, lam / 2.0)),
             ("harmonic", HarmonicSpectrum())]
    for tag, spec in specs:
        energies = np.array([spec.energy(n) for n in range(N + 2)])
        for alpha in (0.0, 0.3):
            lad = build_ladder(spec, alpha, N)
            rep.add(f"adjointness[{tag},alpha={alpha}]",
                    float(np.max(np.abs(lad.a_plus - lad.a_minus.conj().T))),
                    0.0, "a+ must be exactly (a-)^dagger")
            comm = lad.a_minus @ lad.a_plus - lad.a_plus @ lad.a_minus
            target = np.zeros_like(comm)
            idx = np.arange(N)
            target[idx, idx] = energies[1:N + 1] - energies[:N]
            dev = float(np.max(np.abs((comm - target)[:N, :N])))
            rep.add(f"commutator[{tag},alpha={alpha}]", dev, 1e-12,
                    "leading block of [a-,a+] vs diag(E_{n+1}-E_n)")
            number = lad.a_plus @ lad.a_minus
            dev = float(np.max(np.abs(np.diag(number).real - energies[:N + 1])))
            rep.add(f"number_operator[{tag},alpha={alpha}]", dev,
                    1e-12 * max(1.0, energies[N]), "diag(a+ a-) vs E_n")
        lad0 = build_ladder(spec, 0.0, N)
        lad3 = build_ladder(spec, 0.3, N)
        dev = float(np.max(np.abs(np.abs(lad3.a_minus) - np.abs(lad0.a_minus))))
        rep.add(f"alpha_only_phases[{tag}]", dev, 1e-13 * max(1.0, energies[N]),
                "|entries| independent of alpha")
    rep.runtime_s = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# gk suite
# ---------------------------------------------------------------------------

def _gk_closed_coeffs(spec, label, size):
    """Direct lowering-eigenstate coefficients (k = 0 formula), z != 0."""
    n = np.arange(size)
    log_az = math.log(abs(label.z))
    logs = np.array([m * log_az - 0.5 * spec.log_e0(int(m)) for m in n])
    mags = np.exp(logs - logs.max())
    phases = np.exp(1j * n * np.angle(label.z)) * np.exp(
        -1j * label.alpha * np.array([spec.energy(int(m)) for m in n]))
    c = mags * phases
    return c / np.linalg.norm(c)


def eigen_residual(spec, label, tail_eps=1e-28) -> float:
    """|| a- |state> - z |state> || for a GK label (k = 0 is an eigenstate)."""
    state = st.gk_state(spec, label, tail_eps=tail_eps)
    dim = state.offset + state.size + 1
    if math.isfinite(spec.max_level):
        dim = min(dim, int(spec.max_level) + 1)  # lowering stays in range
    lad = build_ladder(spec, label.alpha, max(dim - 1, 2))
    v = state.embed(lad.N + 1)
    return float(np.linalg.norm(lad.a_minus @ v - label.z * v))


def suite_gk(lams=(1.0, 4.0)) -> SuiteReport:
    rep = SuiteReport("gk")
    t0 = time.perf_counter()
    z_grid = (0.2, 0.7 + 0.2j, 1.5)
    for lam in lams:
        spec = PoschlTellerSpectrum(lam / 2.0, lam / 2.0)
        worst = 0.0
        for z in z_grid:
            for alpha in (0.0, 0.3):
                worst = max(worst, eigen_residual(spec, st.GKLabel(z, alpha, 0)))
        rep.add(f"lowering_eigenstate[lam={lam}]", worst, 1e-9,
                "max residual over the z, alpha grid")

        label = st.GKLabel(0.7 + 0.2j, 0.3, 0)
        state = st.gk_state(spec, label)
        closed = _gk_closed_coeffs(spec, label, state.size)
        rep.add(f"k0_reduction[lam={lam}]",
                float(np.max(np.abs(state.coefficients - closed))), 1e-12,
                "photon-added k=0 vs direct eigenstate expansion")

        res1 = eigen_residual(spec, st.GKLabel(0.7, 0.0, 1))
        rep.add(f"k1_not_eigenstate[lam={lam}]", res1, 0.01,
                "k=1 state must fail the eigenvalue equation",
                larger_is_fail=False)

        worst = 0.0
        for k in (0, 1, 3):
            for u in (0.5, 2.0):
                series = st.gk_norm_constant(spec, u, k)
                closed = st.gk_norm_constant_pt_closed(lam, u, k)
                worst = max(worst, abs(math.expm1(series - closed)))
        rep.add(f"norm_series_vs_closed[lam={lam}]", worst, 1e-10,
                "series sum vs Pochhammer-adjusted 2F3 closed form")

        l1 = st.GKLabel(0.6, 0.2, 1)
        l2 = st.GKLabel(0.4 + 0.3j, 0.5, 1)
        o12 = st.gk_overlap(spec, l1, l2)
        o21 = st.gk_overlap(spec, l2, l1)
        rep.add(f"overlap_hermitian[lam={lam}]", abs(o12 - np.conj(o21)), 1e-12)
        rep.add(f"overlap_normalized[lam={lam}]",
                abs(st.gk_overlap(spec, l1, l1) - 1.0), 1e-12)
        worst = max(abs(st.gk_overlap(spec, st.GKLabel(z1, 0.1, 1),
                                      st.GKLabel(z2, 0.4, 1)))
                    for z1 in (0.3, 1.1) for z2 in (0.8j, 1.2))
        rep.add(f"overlap_bounded[lam={lam}]", worst, 1.0 + 1e-12,
                "|<l1|l2>| <= 1 (Cauchy-Schwarz)")

        # equal-alpha compact hypergeometric kernel
        k = 1
        z1, z2 = 0.5, 0.8
        o = st.gk_overlap(spec, st.GKLabel(z1, 0.3, k), st.GKLabel(z2, 0.3, k))
        f = hyper_pfq([k + 1.0, lam + k + 1.0], [1.0, lam + 1.0, lam + 1.0],
                      z1 * z2)
        log_num = (log_gamma(k + 1.0) + log_pochhammer(lam + 1.0, k)
                   + f.log_abs)
        la1 = st.gk_norm_constant(spec, z1 ** 2, k)
        la2 = st.gk_norm_constant(spec, z2 ** 2, k)
        compact = math.exp(log_num - 0.5 * (la1 + la2))
        rep.add(f"overlap_compact_form[lam={lam}]", abs(o - compact) / abs(compact),
                1e-10, "series overlap vs compact hypergeometric kernel")

        for k in (0, 2):
            label = st.GKLabel(0.7 + 0.2j, 0.2, k)
            s0 = st.gk_state(spec, label)
            t = 0.37
            ev = st.evolve(s0, spec, t)
            rb = st.gk_state(spec, st.GKLabel(label.z, label.alpha + t, k))
            rep.add(f"temporal_stability[lam={lam},k={k}]",
                    float(np.max(np.abs(ev.coefficients - rb.coefficients))),
                    1e-14, "evolve(t) vs rebuild with alpha+t")

    rad = PoschlTellerSpectrum(2.0, 2.0).radius(1)
    rep.add("radius_pt_infinite", 0.0 if rad.is_infinite else 1.0, 0.0,
            f"status={rad.status}")
    rad = HarmonicSpectrum().radius(0)
    rep.add("radius_harmonic_infinite", 0.0 if rad.is_infinite else 1.0, 0.0,
            f"status={rad.status}")
    bounded = CustomSpectrum(rule=lambda n: 1.0 - 2.0 ** (-n), name="bounded")
    rad = bounded.radius(0)
    rep.add("radius_bounded_spectrum", abs(rad.value - 1.0), 1e-9,
            "E_n -> 1 gives unit radius")
    rep.runtime_s = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# kp suite
# ---------------------------------------------------------------------------

def suite_kp(lams=(1.0, 4.0)) -> SuiteReport:
    rep = SuiteReport("kp")
    t0 = time.perf_counter()
    for lam in lams:
        spec = PoschlTellerSpectrum(lam / 2.0, lam / 2.0)
        worst = 0.0
        for Zmag in (0.2, 0.4, 0.8, 1.5):
            Z = Zmag * np.exp(0.4j)
            oracle = displace_ground(spec, Z, alpha=0.0, tail_eps=1e-20)
            closed = st.kp_state_pt(lam, st.KPLabel(Z=Z, alpha=0.0, k=0),
                                    tail_eps=1e-24)
            worst = max(worst, coeff_distance(oracle, closed))
        rep.add(f"displacement_vs_closed[lam={lam}]", worst, 1e-8,
                "substepped Taylor oracle vs unit-disk closed form")

        Z = 0.3 * np.exp(0.2j)
        oracle = displace_ground(spec, Z, alpha=0.0)
        nested = st.kp_state_general(spec, Z, alpha=0.0, k=0)
        rep.add(f"displacement_vs_nested[lam={lam}]",
                coeff_distance(oracle, nested.state), 1e-6,
                f"j-series converged={nested.j_converged}")

        worst = 0.0
        for k in (0, 2):
            for u in (0.1, 0.3, 0.6):
                closed = st.kp_norm_constant_pt(lam, u, k, method="closed")
                series = st.kp_norm_constant_pt(lam, u, k, method="series")
                worst = max(worst, abs(math.expm1(closed - series)))
        rep.add(f"kp_norm_closed_vs_series[lam={lam}]", worst, 1e-10)
        worst = max(abs(st.kp_norm_constant_pt(lam, u, 0, method="closed"))
                    for u in (0.1, 0.5, 0.9))
        rep.add(f"kp_norm_k0_is_one[lam={lam}]", worst, 1e-12,
                "log N_0 must vanish identically")

        k = 1
        l1 = st.KPLabel(xi=0.3, alpha=0.2, k=k)
        l2 = st.KPLabel(xi=0.5j, alpha=0.2, k=k)
        kern = st.kp_overlap_pt(lam, l1, l2)
        s1 = st.kp_state_pt(lam, l1, tail_eps=1e-26)
        s2 = st.kp_state_pt(lam, l2, tail_eps=1e-26)
        rep.add(f"kernel_vs_dot_product[lam={lam}]", abs(kern - s1.inner(s2)),
                1e-10, "series kernel vs coefficient dot product")
        rep.add(f"kernel_normalized[lam={lam}]",
                abs(st.kp_overlap_pt(lam, l1, l1) - 1.0), 1e-12)
        rep.add(f"kernel_hermitian[lam={lam}]",
                abs(kern - np.conj(st.kp_overlap_pt(lam, l2, l1))), 1e-12)
        worst = max(abs(st.kp_overlap_pt(lam, st.KPLabel(xi=x1, alpha=0.0, k=k),
                                         st.KPLabel(xi=x2, alpha=0.7, k=k)))
                    for x1 in (0.2, 0.7) for x2 in (0.5j, -0.4))
        rep.add(f"kernel_bounded[lam={lam}]", worst, 1.0 + 1e-12)

        for k in (0, 2):
            label = st.KPLabel(xi=0.45 * np.exp(0.3j), alpha=0.1, k=k)
            s0 = st.kp_state_pt(lam, label)
            t = 0.61
            ev = st.evolve(s0, spec, t)
            rb = st.kp_state_pt(lam, st.KPLabel(xi=label.xi,
                                                alpha=label.alpha + t, k=k))
            rep.add(f"temporal_stability[lam={lam},k={k}]",
                    float(np.max(np.abs(ev.coefficients - rb.coefficients))),
                    1e-14)

    spec = HarmonicSpectrum()
    Z = 0.25
    oracle = displace_ground(spec, Z, alpha=0.0)
    nested = st.kp_state_general(spec, Z, alpha=0.0, k=0)
    rep.add("harmonic_nested_vs_displacement", coeff_distance(oracle, nested.state),
            1e-6, "generic nested-sum route against the oscillator oracle")
    rep.runtime_s = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# measures suite
# ---------------------------------------------------------------------------

def suite_measures(lam: float = 4.0, k: int = 2) -> SuiteReport:
    rep = SuiteReport("measures")
    t0 = time.perf_counter()
    worst = 0.0
    for lam_i in (1.0, 4.0, 7.0):
        for k_i in (0, 1, 3):
            r = msr.mellin_gamma_check_pt(lam_i, k_i, 30)
            worst = max(worst, max(e.rel_residual for e in r.entries))
    rep.add("mellin_gamma_identity", worst, 1e-12,
            "Meijer-G weight vs required moments, full (lam,k,n) grid")

    r = msr.gk_measure_selfconsistency(lam, k, 20)
    rep.add("identity_resolution_diagonal",
            max(e.rel_residual for e in r.entries), 1e-12,
            "diagonal elements of the reconstructed identity")

    # unit-disk weight candidates
    k0 = msr.kp_weight_k0(lam)
    r0 = msr.kp_moment_residuals(lam, 0, k0, n_max=10, quad_tolerance=1e-10)
    worst_quad = max(e.quad_vs_analytic for e in r0.entries
                     if e.quad_vs_analytic is not None)
    rep.add("k0_weight_quadrature_vs_beta", worst_quad, 1e-10,
            "quadrature against the analytic Beta moments")
    # the published weight misses the published target by (n+lam)/(n*lam);
    # reproducing that factor is the documented-errata check
    worst_factor = 0.0
    for e in r0.entries:
        if e.power == e.n - 1 and e.computed_log is not None:
            expected = (e.n + lam) / (e.n * lam)
            observed = math.exp(e.computed_log - e.target_log)
            worst_factor = max(worst_factor, abs(observed / expected - 1.0))
    rep.add("k0_structural_residual_reproduced", worst_factor, 1e-8,
            "computed/target matches the predicted mismatch factor")
    rep.errata.extend(r0.errata)

    # the k=0 weight does solve the moment equation under the r^n power
    # convention once the constant lam is absorbed into the ansatz prefactor
    scaled = msr.kp_moment_residuals(lam, 0, msr.kp_weight_k0(lam, scale=lam),
                                     n_max=10)
    worst_scaled = max(e.rel_residual for e in scaled.entries
                       if e.power == e.n)
    rep.add("k0_rescaled_rn_convention_passes", worst_scaled, 1e-8,
            "published k=0 weight x lam solves the r^n moment equation")

    wk = msr.kp_weight_unit_disk(lam, k, reading="a_b_b")
    rk = msr.kp_moment_residuals(lam, k, wk, n_max=10)
    worst_quad = max(e.quad_vs_analytic for e in rk.entries
                     if e.quad_vs_analytic is not None)
    rep.add("photon_added_weight_quadrature_vs_beta", worst_quad, 1e-9,
            "elementary reading, n > k moments vs Beta")
    rep.errata.extend(rk.errata)

    wl = msr.kp_weight_unit_disk(lam, k, reading="a_b_lam2k")
    rl = msr.kp_moment_residuals(lam, k, wl, n_max=6)
    n_pass = sum(1 for e in rl.entries if e.verdict == "pass")
    rep.errata.extend(rl.errata)
    rep.errata.append(
        f"hypergeometric reading 'a_b_lam2k': {n_pass} of {len(rl.entries)} "
        f"moment combinations match the published target as printed"
    )
    # under the r^n convention the same reading misses the target by the
    # constant lam+2k across all n: the published pair of formulas becomes
    # fully consistent once that constant moves into the ansatz prefactor
    # (equivalently Gamma(lam+2k) instead of Gamma(lam+2k+1))
    lam2k = lam + 2.0 * k
    rn = [e for e in rl.entries if e.power == e.n and e.computed_log is not None]
    worst_const = max(abs(math.exp(e.computed_log - e.target_log) * lam2k - 1.0)
                      for e in rn)
    rep.add("alternate_reading_rescaled_rn_passes", worst_const, 1e-8,
            "hypergeometric reading x (lam+2k) solves the r^n moment equation")
    rep.errata.append(
        "resolution: under the r^n power convention, the hypergeometric "
        "reading with lower parameter lam+2k scaled by the constant lam+2k "
        "satisfies every tested moment (k = 0 reduces to the published "
        "weight times lam); the printed normalization Gamma(lam+2k+1) "
        "appears to be Gamma(lam+2k) and the printed power r^(n-1) "
        "appears to be r^n"
    )
    rep.errata = list(dict.fromkeys(rep.errata))

    for cand in (k0, wk):
        nn = msr.nonnegativity_report(cand)
        rep.add(f"nonnegative[{cand.id}]",
                0.0 if nn["nonnegative"] else 1.0, 0.0,
                f"min h = {nn['min_value']:.3e} on {nn['grid_points']} points")
    rep.runtime_s = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# pt suite (position space)
# ---------------------------------------------------------------------------

def _orthonormality_error(p: pt.PTParams, n_max: int, partner: bool,
                          pairs=None) -> float:
    fn = pt.partner_eigenfunction if partner else pt.eigenfunction
    rule = QuadratureRule(
        nodes=32, panels=6, rel_tol=1e-12, abs_tol=1e-13,
        left_exponent=2.0 * (p.kappa + (1.0 if partner else 0.0)),
        right_exponent=2.0 * (p.kappa_prime + (1.0 if partner else 0.0)),
    )
    worst = 0.0
    pair_list = pairs or [(n, m) for n in range(n_max + 1)
                          for m in range(n, n_max + 1)]
    for n, m in pair_list:
        val = integrate(lambda x: fn(p, n, x) * fn(p, m, x), 0.0, p.box, rule)
        target = 1.0 if n == m else 0.0
        worst = max(worst, abs(val.value - target))
    return worst


def suite_pt(settings=None) -> SuiteReport:
    rep = SuiteReport("pt")
    t0 = time.perf_counter()
    settings = settings or [pt.PTParams(2.0, 2.0, 1.0),
                            pt.PTParams(1.2, 3.4, 1.0)]
    for p in settings:
        tag = f"k={p.kappa},k'={p.kappa_prime}"
        x = np.linspace(0.05 * p.box, 0.95 * p.box, 211)

        u = x / (2.0 * p.a)
        w = pt.superpotential(p, x)
        w_prime = (p.kappa / np.sin(u) ** 2 + p.kappa_prime / np.cos(u) ** 2) \
            / (4.0 * p.a ** 2)
        rep.add(f"susy_factorization[{tag}]",
                float(np.max(np.abs(w * w - w_prime - pt.potential(p, x)))),
                1e-9, "W^2 - W' reproduces the potential pointwise")

        rep.add(f"orthonormality[{tag}]",
                _orthonormality_error(p, 8, partner=False), 1e-8,
                "levels 0..8 of the lower partner")
        rep.add(f"partner_orthonormality[{tag}]",
                _orthonormality_error(p, 6, partner=True), 1e-8,
                "levels 0..6 of the upper partner")

        # Schrodinger residual with a 6th-order finite-difference stencil
        h = 2e-3 * p.a
        xs = np.linspace(0.08 * p.box, 0.92 * p.box, 101)
        stencil = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0])
        worst = 0.0
        for n in range(5):
            acc = np.zeros_like(xs)
            for j, c in enumerate(stencil):
                acc += c * pt.eigenfunction(p, n, xs + (j - 3) * h)
            d2 = acc / (180.0 * h * h)
            resid = -d2 + pt.potential(p, xs) * pt.eigenfunction(p, n, xs) \
                - p.energy(n) * pt.eigenfunction(p, n, xs)
            worst = max(worst, float(np.max(np.abs(resid))))
        rep.add(f"schrodinger_residual[{tag}]", worst, 1e-6,
                "levels 0..4 on the interior grid")

        # intertwining: A- maps level n+1 onto sqrt(E_{n+1}) x partner level n
        rule = QuadratureRule(nodes=32, panels=6, rel_tol=1e-12,
                              left_exponent=2.0 * p.kappa + 1.0,
                              right_exponent=2.0 * p.kappa_prime + 1.0)
        worst = 0.0
        for n in range(5):
            val = integrate(
                lambda x_: pt.partner_eigenfunction(p, n, x_)
                * pt.apply_lowering(p, n + 1, x_),
                0.0, p.box, rule)
            worst = max(worst,
                        abs(abs(val.value) / math.sqrt(p.energy(n + 1)) - 1.0))
        rep.add(f"susy_intertwining[{tag}]", worst, 1e-7,
                "|<psi_n^+, A- psi_{n+1}^->| / sqrt(E_{n+1}) = 1")

        # closed-form overlaps vs quadrature
        rule = QuadratureRule(nodes=32, panels=6, rel_tol=1e-12,
                              left_exponent=2.0 * p.kappa + 1.0,
                              right_exponent=2.0 * p.kappa_prime + 1.0)
        worst = 0.0
        n_flagged = 0
        for n in range(7):
            for m in range(7):
                entry = pt.u_matrix_element(p, n, m)
                if entry.flagged:
                    n_flagged += 1
                    continue
                quad = integrate(
                    lambda x_: pt.eigenfunction(p, n, x_)
                    * pt.partner_eigenfunction(p, m, x_),
                    0.0, p.box, rule)
                worst = max(worst, abs(entry.value - quad.value))
        rep.add(f"u_closed_vs_quadrature[{tag}]", worst, 1e-8,
                f"n,m <= 6; {n_flagged} entries flagged for cancellation")
        rep.add(f"u00_positive[{tag}]",
                pt.u_matrix_element(p, 0, 0).value, 0.0,
                "<psi_0^-|psi_0^+> with positive-root normalizations",
                larger_is_fail=False)

        # truncated column norms approach 1 monotonically
        worst_violation = -1.0
        max_defect = 0.0
        for m in range(5):
            defects = []
            col = [pt.u_matrix_element(p, n, m).value for n in range(19)]
            for cutoff in (6, 10, 14, 18):
                s = sum(v * v for v in col[:cutoff + 1])
                defects.append(abs(1.0 - s))
            worst_violation = max(worst_violation,
                                  max(defects[i + 1] - defects[i]
                                      for i in range(len(defects) - 1)))
            max_defect = max(max_defect, defects[-1])
        rep.add(f"u_column_norms_monotone[{tag}]", worst_violation, 0.0,
                f"defect at cutoff 18 at most {max_defect:.2e}")

    # finite-difference isospectrality on the default setting
    p = settings[0]
    m_nodes = 4000
    xs = np.linspace(0.0, p.box, m_nodes + 2)[1:-1]
    h = xs[1] - xs[0]
    for partner, label in ((False, "lower"), (True, "upper")):
        if partner:
            # H+ = A- A+ = -d2/dx2 + W^2 + W', isospectral to H- one level up
            u = xs / (2.0 * p.a)
            w = pt.superpotential(p, xs)
            w_prime = (p.kappa / np.sin(u) ** 2
                       + p.kappa_prime / np.cos(u) ** 2) / (4.0 * p.a ** 2)
            vx = w * w + w_prime
            targets = [p.energy(n + 1) for n in range(4)]
        else:
            vx = pt.potential(p, xs)
            targets = [p.energy(n) for n in range(4)]
        diag = 2.0 / h ** 2 + vx
        off = -np.ones(m_nodes - 1) / h ** 2
        evals = eigvalsh_tridiagonal(diag, off, select="i",
                                     select_range=(0, 3))
        scale = max(1.0, p.energy(1))
        worst = max(abs(evals[i] - targets[i]) / max(abs(targets[i]), scale)
                    for i in range(4))
        rep.add(f"fd_isospectrality[{label}]", worst, 1e-3,
                f"lowest 4 FD levels vs exact ladder ({m_nodes} nodes)")

    lam = settings[0].lam
    up, down = pt.ladder_action_pt(lam, 3, 0.25)
    expected_up = math.sqrt(4.0 * (3.0 + lam + 1.0))
    rep.add("ladder_action_magnitude", abs(up.magnitude - expected_up), 1e-13)
    rep.add("ladder_action_phase",
            abs(up.phase - np.exp(-1j * 0.25 * (2 * 3 + lam + 1))), 1e-13,
            "phase exponent is E_{n+1}-E_n = 2n+lam+1")
    rep.add("ladder_action_ground", pt.ladder_action_pt(lam, 0)[1].magnitude,
            0.0, "lowering annihilates the ground level")
    rep.runtime_s = time.perf_counter() - t0
    return rep


SUITES = {
    "ladder": suite_ladder,
    "gk": suite_gk,
    "kp": suite_kp,
    "measures": suite_measures,
    "pt": suite_pt,
}


def run_suite(name: str, **kwargs) -> list:
    """Run one suite (or 'all'); returns a list of SuiteReport."""
    if name == "all":
        return [SUITES[s]() for s in ("ladder", "gk", "kp", "measures", "pt")]
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from "
                          f"{sorted(SUITES)} or 'all'")
    return [SUITES[name](**kwargs)]
