"""Two-mode Gaussian fidelity, quantum Fisher information, and precision bounds.

The fidelity follows the two-mode Gaussian determinant formula with the
package-wide vacuum-=-identity normalization.  It is evaluated in the
Uhlmann-consistent form F = (Pi + sqrt(Pi^2 - Delta)) / Delta, which is
algebraically 1/(Pi - sqrt(Pi^2 - Delta)); the superficially similar
1/(Pi + sqrt(...)) variant coincides for pure states but fails F(s, s) = 1
for mixed ones, so it is not used.

The QFI comes in two independent routes: a finite-difference step ladder on
the fidelity with Richardson extrapolation (qfi_numeric), and the closed-form
leading-order expression consuming first-order series data and spectator-mode
sums (qfi_analytic_h0).  The two are cross-validated against each other in
the test suite.
"""

from __future__ import annotations

import dataclasses
import math

import mpmath
import numpy as np

from .bogoliubov import BogoliubovSeries
from .errors import (
    ConditioningError,
    NoInformationError,
    NoPlateauError,
    NumericError,
)
from .gaussian import GaussianState, symplectic_form
from .policy import DEFAULT_POLICY, NumericPolicy

_OMEGA4 = symplectic_form(2).matrix
_I4 = np.eye(4)


@dataclasses.dataclass(frozen=True)
class FidelityBreakdown:
    gamma: float
    lambda1: float
    lambda2: float
    delta: float
    pi: float
    fidelity: float


def _require_zero_means(state: GaussianState):
    if np.max(np.abs(state.first_moments)) != 0.0:
        raise NumericError(
            "fidelity formula requires zero first moments; displace states first"
        )


def _clamp(value, scale, policy, what, symmetric=False):
    """Clamp roundoff-level values to zero; error beyond the trusted band.

    With symmetric=True, values inside [-band, +band] collapse to zero: at a
    square-root branch point (pure states have Pi^2 = Delta exactly) keeping
    a +1e-16 residue would be amplified to a 1e-8 error by the root.
    """
    band = policy.branch_clamp * max(1.0, abs(scale))
    if value < -band:
        raise ConditioningError(f"{what} = {value:.6e} below -{band:.1e}")
    if symmetric and value <= band:
        return 0.0
    return max(value, 0.0)


def _fidelity_float(cov1, cov2, policy):
    gamma = float(np.linalg.det(_OMEGA4 @ cov1 @ _OMEGA4 @ cov2 - _I4)) / 16.0
    lam1 = float(np.linalg.det(cov1 + 1j * _OMEGA4).real) / 4.0
    lam2 = float(np.linalg.det(cov2 + 1j * _OMEGA4).real) / 4.0
    delta = float(np.linalg.det(cov1 + cov2)) / 16.0
    return gamma, lam1, lam2, delta


def _fidelity_mp(cov1, cov2, policy):
    with mpmath.workdps(policy.extended_dps):
        m1 = mpmath.matrix(cov1.tolist())
        m2 = mpmath.matrix(cov2.tolist())
        om = mpmath.matrix(_OMEGA4.tolist())
        eye = mpmath.eye(4)
        gamma = mpmath.det(om * m1 * om * m2 - eye) / 16
        i_om = om * mpmath.mpc(0, 1)
        lam1 = mpmath.re(mpmath.det(m1 + i_om)) / 4
        lam2 = mpmath.re(mpmath.det(m2 + i_om)) / 4
        delta = mpmath.det(m1 + m2) / 16
        return float(gamma), float(lam1), float(lam2), float(delta)


def _breakdown(gamma, lam1, lam2, delta, policy):
    scale = max(1.0, abs(gamma), abs(delta))
    gamma = _clamp(gamma, scale, policy, "Gamma")
    lam1 = _clamp(lam1, scale, policy, "Lambda1", symmetric=True)
    lam2 = _clamp(lam2, scale, policy, "Lambda2", symmetric=True)
    if delta <= 0.0:
        raise ConditioningError(f"Delta = {delta:.6e} is not positive")
    pi = math.sqrt(gamma) + math.sqrt(lam1 * lam2)
    disc = _clamp(pi * pi - delta, delta, policy, "Pi^2 - Delta", symmetric=True)
    fidelity = (pi + math.sqrt(disc)) / delta
    return FidelityBreakdown(gamma, lam1, lam2, delta, pi, fidelity)


def fidelity_breakdown_from_covs(
    cov1: np.ndarray, cov2: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY
) -> FidelityBreakdown:
    """Fidelity between two zero-mean two-mode covariance matrices.

    Switches the 4x4 determinant work to extended precision once the
    covariance entries are large enough that float64 cancellation would eat
    the 1 - F signal (entries ~e^{2r} square and cancel against 1).
    """
    cov1 = np.asarray(cov1, dtype=float)
    cov2 = np.asarray(cov2, dtype=float)
    scale = max(np.abs(cov1).max(), np.abs(cov2).max())
    if scale > policy.extended_precision_above:
        parts = _fidelity_mp(cov1, cov2, policy)
    else:
        parts = _fidelity_float(cov1, cov2, policy)
    return _breakdown(*parts, policy)


def fidelity_two_mode(
    s1: GaussianState, s2: GaussianState, policy: NumericPolicy = DEFAULT_POLICY
) -> FidelityBreakdown:
    """Uhlmann fidelity of two two-mode Gaussian states with zero means."""
    if s1.num_modes != 2 or s2.num_modes != 2:
        raise ValueError("fidelity_two_mode expects two-mode states")
    _require_zero_means(s1)
    _require_zero_means(s2)
    return fidelity_breakdown_from_covs(s1.cov, s2.cov, policy)


# ---------------------------------------------------------------------------
# numeric QFI: fidelity step ladder with Richardson extrapolation
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class QFINumericResult:
    value: float
    ladder: tuple
    extrapolants: tuple
    dh_used: float
    plateau: bool


def _ladder_estimate(fid_pair, h, dh, sqrt_f0=1.0):
    f = fid_pair(h, dh)
    return 8.0 * (sqrt_f0 - math.sqrt(max(f, 0.0))) / (dh * dh)


def qfi_numeric(
    state_at,
    h: float,
    policy: NumericPolicy = DEFAULT_POLICY,
    return_diagnostics: bool = False,
):
    """QFI at h from H = 8 [1 - sqrt(F(sigma(h), sigma(h+dh)))] / dh^2.

    ``state_at`` maps h to a two-mode GaussianState.  The step ladder starts
    from policy.dh_ladder scaled by max(h, 1) and is rescaled iteratively
    until H * dh^2 sits near policy.dh_curvature_target (keeping the fidelity
    drop both resolvable above roundoff and inside the quadratic regime);
    two Richardson levels then remove the leading O(dh) and O(dh^2) biases.
    Raises NoPlateauError carrying the raw ladder when successive
    extrapolants disagree beyond policy.plateau_rtol.

    The estimator is anchored at h = 0 (where the base state is exactly pure)
    and well-behaved throughout the perturbative validity domain; well beyond
    it, the O(h^2) impurity of a first-order series feeds the fidelity at the
    same order as the signal and no unique finite-h value exists.
    """

    def fid_pair(x, dh):
        return fidelity_two_mode(state_at(x), state_at(x + dh), policy).fidelity

    # at h > 0 the truncated state map is O(h^2) impure and its self-fidelity
    # sits below one; differencing against sqrt(F(h, h)) removes that
    # dh-independent offset from the ladder (at h = 0 it is exactly one)
    sqrt_f0 = math.sqrt(max(fid_pair(h, 0.0), 0.0))

    scale = max(abs(h), 1.0)
    steps = [d * scale for d in policy.dh_ladder]
    dh_max = 0.25 * scale
    # iterate the pilot both ways: with H ~ 1e16 the default step sits far
    # outside the quadratic regime, while for near-constant maps the fidelity
    # drop hides under roundoff until the step grows
    for _ in range(60):
        pilot = _ladder_estimate(fid_pair, h, steps[0], sqrt_f0)
        drop = abs(pilot) * steps[0] ** 2  # = 8 |sqrt(F0) - sqrt(F)| at the pilot step
        if drop > policy.dh_curvature_max and steps[0] > 1e-30:
            factor = math.sqrt(policy.dh_curvature_target / drop)
        elif drop < 1e-9 and steps[0] < dh_max:
            factor = min(
                math.sqrt(policy.dh_curvature_target / max(drop, 1e-17)),
                10.0,
                dh_max / steps[0],
            )
        else:
            break
        steps = [d * factor for d in steps]
    if drop <= 1e-12:
        # fidelity stays put to roundoff even at the largest usable step:
        # the state map carries no information at this resolution
        result = QFINumericResult(0.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), steps[0], True)
        return result if return_diagnostics else result.value
    ladder = tuple(_ladder_estimate(fid_pair, h, d, sqrt_f0) for d in steps)
    e1, e2, e3 = ladder
    r12 = 2.0 * e2 - e1
    r23 = 2.0 * e3 - e2
    final = (4.0 * r23 - r12) / 3.0
    extrapolants = (r12, r23, final)

    span = abs(r23 - r12)
    tol = policy.plateau_rtol * max(abs(final), abs(r23))
    plateau = span <= tol or span <= policy.plateau_abs_floor
    if plateau and abs(final) <= policy.plateau_abs_floor:
        final = 0.0
    result = QFINumericResult(final, ladder, extrapolants, steps[0], plateau)
    if not plateau:
        raise NoPlateauError(
            f"QFI ladder did not plateau: extrapolants {extrapolants}",
            ladder=ladder,
            extrapolants=extrapolants,
        )
    return result if return_diagnostics else result.value


# ---------------------------------------------------------------------------
# mode sums and the closed-form leading-order QFI
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ModeSums:
    f_alpha_k: float
    f_beta_k: float
    f_alpha_kprime: float
    f_beta_kprime: float
    g_alphabeta_kk: complex
    g_alphabeta_kpkp: complex
    tail_estimate: float


def _tail_estimate(terms):
    """Conservative tail bound for a truncated spectator sum.

    Uses the envelope of the last available terms with an assumed power-law
    decay no faster than the fitted one (floored at p = 2), scaled so that
    doubling the truncation stays within the estimate even when individual
    terms oscillate with detuning.
    """
    mags = np.abs(np.asarray(terms, dtype=complex))
    nz = mags[mags > 0]
    if nz.size < 4:
        return float(mags.sum())
    n = mags.size
    window = max(4, n // 5)
    head = np.max(mags[-2 * window : -window]) if n >= 2 * window else np.max(mags[:window])
    last = np.max(mags[-window:])
    if last == 0.0:
        return 0.0
    if head > last > 0:
        p = math.log(head / last) / math.log(2.0)
        p = min(max(p, 2.0), 8.0)
    else:
        p = 2.0
    return float(2.0 * last * n / (p - 1.0))


def mode_sums(series: BogoliubovSeries, k: int, kprime: int) -> ModeSums:
    """Spectator sums f_alpha^i, f_beta^i and G^{alphabeta}_ii over n not in {k, k'}.

    f_alpha^i = sum |alpha1_{n i}|^2, f_beta^i likewise, and
    G^{alphabeta}_{ii} = sum alpha1_{n i} conj(beta1_{n i}), with a
    conservative truncation-tail estimate for the whole bundle.
    """
    n = series.n_modes
    if max(k, kprime) > n:
        raise ValueError("mode indices exceed truncation range")
    mask = np.ones(n, dtype=bool)
    mask[k - 1] = False
    mask[kprime - 1] = False
    a1, b1 = series.alpha1, series.beta1
    ak = a1[mask, k - 1]
    bk = b1[mask, k - 1]
    akp = a1[mask, kprime - 1]
    bkp = b1[mask, kprime - 1]
    tail = max(
        _tail_estimate(np.abs(ak) ** 2),
        _tail_estimate(np.abs(bk) ** 2),
        _tail_estimate(np.abs(akp) ** 2),
        _tail_estimate(np.abs(bkp) ** 2),
        _tail_estimate(ak * np.conj(bk)),
        _tail_estimate(akp * np.conj(bkp)),
    )
    return ModeSums(
        f_alpha_k=float(np.sum(np.abs(ak) ** 2)),
        f_beta_k=float(np.sum(np.abs(bk) ** 2)),
        f_alpha_kprime=float(np.sum(np.abs(akp) ** 2)),
        f_beta_kprime=float(np.sum(np.abs(bkp) ** 2)),
        g_alphabeta_kk=complex(np.sum(ak * np.conj(bk))),
        g_alphabeta_kpkp=complex(np.sum(akp * np.conj(bkp))),
        tail_estimate=tail,
    )


def qfi_analytic_h0(
    series: BogoliubovSeries,
    r: float,
    phi_k: float,
    phi_kprime: float,
    k: int,
    kprime: int,
) -> float:
    """Leading-order QFI H0 from first-order series data and spectator sums.

    Both modes carry the same squeezing r.  Obtained by expanding the exact
    limit H0 = tr(P^-1 W) - tr((P^-1 V)^2)/4 of the fidelity pipeline, where
    sigma(dh) = P + dh V + dh^2 W is the transformed covariance at leading
    orders; the expansion is validated term by term against the numeric
    ladder in the cross-validation tests.

    phi_k and phi_kprime are the phase angles attached to the squared
    first-order data of each mode; they are not defined independently of the
    derivation and are calibrated per scenario against qfi_numeric (see
    calibrate_phases), which recovers phi_i = 2 arg(G_i).

    With w_i = exp(-i phi_i), A = alpha1[k, k'], B = beta1[k, k'],
    C = alpha1[k', k], D = beta1[k', k], row-spectator sums
    F_i = sum_m (|alpha1[i, m]|^2 + |beta1[i, m]|^2) and phase sums
    S_i = sum_m alpha1[i, m] beta1[i, m] over m not in {k, k'}:

      H0 = 2 cosh(2r) (F_k + F_k') + 4 sinh(2r) Re[w_k S_k + w_k' S_k']
         + cosh^2(2r) (|A|^2 + |B|^2 + |C|^2 + |D|^2)
         - sinh^2(2r) Re[w_k (A^2 + B^2) + w_k' (C^2 + D^2)]
         + sinh(4r) Re[w_k A B + w_k' C D] - sinh(4r) Re[A conj(B) + C conj(D)]
         - 2 Re[conj(G_k G_k') A C] - 2 Re[conj(G_k) G_k' B conj(D)]

    For canonical series the row sums equal the column sums of mode_sums and
    Re[w_i S_i] = -Re[G^{alphabeta}_{ii}] at the calibrated phases.
    """
    n = series.n_modes
    if max(k, kprime) > n:
        raise NumericError("series truncation does not cover the mode pair")
    if k == kprime:
        raise ValueError("k and kprime must differ")
    ki, kpi = k - 1, kprime - 1
    mask = np.ones(n, dtype=bool)
    mask[ki] = False
    mask[kpi] = False
    a1, b1 = series.alpha1, series.beta1
    row_k_a, row_k_b = a1[ki, mask], b1[ki, mask]
    row_kp_a, row_kp_b = a1[kpi, mask], b1[kpi, mask]
    a = a1[ki, kpi]
    b = b1[ki, kpi]
    c = a1[kpi, ki]
    d = b1[kpi, ki]
    g_k = series.G[ki]
    g_kp = series.G[kpi]
    w_k = np.exp(-1j * phi_k)
    w_kp = np.exp(-1j * phi_kprime)

    c2 = math.cosh(2.0 * r)
    s2 = math.sinh(2.0 * r)
    s4 = math.sinh(4.0 * r)

    f_rows = float(
        np.sum(np.abs(row_k_a) ** 2 + np.abs(row_k_b) ** 2)
        + np.sum(np.abs(row_kp_a) ** 2 + np.abs(row_kp_b) ** 2)
    )
    s_k = complex(np.sum(row_k_a * row_k_b))
    s_kp = complex(np.sum(row_kp_a * row_kp_b))

    total = 2.0 * c2 * f_rows
    total += 4.0 * s2 * (w_k * s_k + w_kp * s_kp).real
    total += c2 * c2 * (abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2)
    total += -s2 * s2 * (w_k * (a * a + b * b) + w_kp * (c * c + d * d)).real
    total += s4 * (w_k * a * b + w_kp * c * d).real
    total += -s4 * (a * np.conj(b) + c * np.conj(d)).real
    total += -2.0 * (np.conj(g_k) * np.conj(g_kp) * a * c).real
    total += -2.0 * (np.conj(g_k) * g_kp * b * np.conj(d)).real
    return float(total)


def _phase_response(series, r, k, kprime):
    """Split H0(phi_k, phi_kp) = base + [cos_k, sin_k, cos_kp, sin_kp] . resp.

    The closed form is affine in (cos phi_i, sin phi_i), so plus/minus
    evaluations at 0 and pi/2 isolate each component exactly.
    """
    h = lambda pk, pkp: qfi_analytic_h0(series, r, pk, pkp, k, kprime)
    e_00 = h(0.0, 0.0)
    resp = np.empty(4)
    resp[0] = 0.5 * (e_00 - h(math.pi, 0.0))
    resp[1] = 0.5 * (h(math.pi / 2, 0.0) - h(-math.pi / 2, 0.0))
    resp[2] = 0.5 * (e_00 - h(0.0, math.pi))
    resp[3] = 0.5 * (h(0.0, math.pi / 2) - h(0.0, -math.pi / 2))
    base = e_00 - resp[0] - resp[2]
    return base, resp


def calibrate_phases(
    series: BogoliubovSeries,
    k: int,
    kprime: int,
    state_at,
    r_grid=(0.5, 1.0, 1.5, 2.0),
    policy: NumericPolicy = DEFAULT_POLICY,
):
    """Determine (phi_k, phi_kprime) by matching qfi_analytic_h0 to qfi_numeric.

    The closed form is linear in (cos phi_k, sin phi_k, cos phi_k', sin
    phi_k'); each r in the grid contributes one linear equation with the
    numeric QFI at h = 0 as the right-hand side.  r = 0 carries no phase
    information (all phase terms are sinh-weighted), so the grid should stay
    at r > 0.  Returns (phi_k, phi_kprime, max_rel_residual); the residual is
    evaluated at the recovered phases over the calibration grid.
    """
    from scipy.optimize import least_squares

    rows = []
    rhs = []
    bases = []
    for r in r_grid:
        base, resp = _phase_response(series, r, k, kprime)
        numeric = qfi_numeric(lambda x, _r=r: state_at(_r, x), 0.0, policy)
        rows.append(resp)
        rhs.append(numeric - base)
        bases.append(base)
    rows = np.asarray(rows)
    rhs = np.asarray(rhs)
    target = rhs + np.asarray(bases)
    weights = 1.0 / np.maximum(np.abs(target), 1e-300)

    # linear solve in (cos, sin) pairs for the starting point, then refine on
    # the circle: the unconstrained solution drifts off |w| = 1 when the
    # sinh-family response columns are nearly collinear
    sol, *_ = np.linalg.lstsq(rows * weights[:, None], rhs * weights, rcond=None)
    start = np.array([math.atan2(sol[1], sol[0]), math.atan2(sol[3], sol[2])])

    def residuals(phis):
        pred = np.array(
            [qfi_analytic_h0(series, r, phis[0], phis[1], k, kprime) for r in r_grid]
        )
        return (pred - target) * weights

    fit = least_squares(residuals, start, method="lm")
    phi_k, phi_kp = float(fit.x[0]), float(fit.x[1])
    max_rel = float(np.max(np.abs(residuals(fit.x))))
    return phi_k, phi_kp, max_rel


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ValidityResult:
    valid: bool
    margin: float
    threshold: float

    def __bool__(self):
        return self.valid


def validity_check(
    qfi_h0: float, h: float, policy: NumericPolicy = DEFAULT_POLICY
) -> ValidityResult:
    """Perturbative validity: H0 * h^2 must stay well below one."""
    margin = qfi_h0 * h * h
    return ValidityResult(margin < policy.validity_threshold, margin, policy.validity_threshold)


@dataclasses.dataclass(frozen=True)
class EstimationResult:
    qfi: float
    qfi_valid: bool
    delta_h: float
    delta_a: float
    n_measurements: float
    validity_margin: float | None = None


def cramer_rao(
    qfi: float,
    n_measurements: float,
    length: float,
    sound_speed: float,
    h: float | None = None,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> EstimationResult:
    """Optimal bounds Delta h = 1/sqrt(N * H) and Delta a = Delta h * c_s^2 / L.

    When the probe amplitude h is supplied, the result carries the
    perturbative validity flag and margin H * h^2.
    """
    if qfi <= 0.0:
        raise NoInformationError("QFI must be positive for a Cramer-Rao bound")
    if n_measurements < 1:
        raise ValueError("n_measurements must be >= 1")
    delta_h = 1.0 / math.sqrt(n_measurements * qfi)
    delta_a = delta_h * sound_speed**2 / length
    if h is None:
        return EstimationResult(qfi, True, delta_h, delta_a, n_measurements, None)
    check = validity_check(qfi, h, policy)
    return EstimationResult(qfi, check.valid, delta_h, delta_a, n_measurements, check.margin)


def mach_zehnder_qfi(k_wave: float, T: float) -> float:
    """Atom-interferometer baseline: H = (k T^2)^2 from the phase k a T^2."""
    if k_wave <= 0 or T <= 0:
        raise ValueError("k_wave and T must be positive")
    return (k_wave * T * T) ** 2


def mach_zehnder_bound(k_wave: float, T: float, n_measurements: float) -> float:
    """Companion sensitivity bound delta a = 1 / (sqrt(N) k T^2)."""
    if n_measurements < 1:
        raise ValueError("n_measurements must be >= 1")
    return 1.0 / (math.sqrt(n_measurements) * k_wave * T * T)
