"""Scalar special functions and a numerical Fox H-function evaluator.

Every closed-form link statistic in this package reduces to an instance of
the Fox H-function

    H[z] = (1 / 2*pi*i) * integral over L of chi(s) * z**(-s) ds,

where ``chi(s)`` is a ratio of gamma-function factors determined by two
parameter rows and the split counts ``(m, n)``, and ``L`` is a vertical
contour inside the analytic strip separating the two pole families.  The
evaluator below integrates the contour directly with a trapezoidal rule
(spectrally accurate for analytic integrands on a line) and falls back to
a residue power series for very small arguments where the contour loses
relative accuracy.

Only the kernel family arising here is supported: real parameter
coefficients, strictly positive scale factors, real positive argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp


class FoxHConvergenceError(RuntimeError):
    """Contour quadrature failed self-consistency, or the residue series
    hit colliding poles and cannot produce a trustworthy value."""


# ---------------------------------------------------------------------------
# Scalar special functions
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for real x > 0."""
    if x <= 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return float(_sp.gammaln(x))


def ln_gamma_complex(s: complex) -> complex:
    """Principal-branch log-gamma, continuous along vertical contours.

    Raises ValueError at the poles (non-positive integers on the real
    axis), where no finite principal value exists.
    """
    s = complex(s)
    if s.imag == 0.0 and s.real <= 0.0 and s.real == round(s.real):
        raise ValueError(f"log-gamma pole at s = {s}")
    return complex(_sp.loggamma(s))


def upper_incomplete_gamma(phi: float, x: float) -> float:
    """Upper incomplete gamma integral of t**(phi-1) * exp(-t) over [x, inf)."""
    if phi <= 0.0:
        raise ValueError(f"upper_incomplete_gamma requires phi > 0, got {phi}")
    if x < 0.0:
        raise ValueError(f"upper_incomplete_gamma requires x >= 0, got {x}")
    return float(_sp.gammaincc(phi, x) * _sp.gamma(phi))


def erf(x: float) -> float:
    """Error function."""
    return float(_sp.erf(x))


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind, order zero."""
    if x <= 0.0:
        raise ValueError(f"bessel_k0 requires x > 0, got {x}")
    return float(_sp.k0(x))


# ---------------------------------------------------------------------------
# Fox H-function kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoxHKernel:
    """Pole/exponent structure of one H-function instance.

    ``upper_params`` holds the top parameter row (a_j, alpha_j) and
    ``lower_params`` the bottom row (b_j, beta_j).  The first ``m`` lower
    pairs and the first ``n`` upper pairs contribute numerator factors
    Gamma(b_j + beta_j*s) and Gamma(1 - a_j - alpha_j*s); the remaining
    pairs contribute the corresponding denominator factors.

    The analytic strip is  max_j(-b_j / beta_j) < Re(s) < min_j((1 - a_j) / alpha_j)
    taken over the numerator factors; construction fails if it is empty.
    """

    upper_params: tuple[tuple[float, float], ...]
    lower_params: tuple[tuple[float, float], ...]
    m: int
    n: int

    def __post_init__(self):
        upper = tuple((float(a), float(al)) for a, al in self.upper_params)
        lower = tuple((float(b), float(be)) for b, be in self.lower_params)
        object.__setattr__(self, "upper_params", upper)
        object.__setattr__(self, "lower_params", lower)
        if not (0 <= self.m <= len(lower)):
            raise ValueError(f"m={self.m} outside [0, {len(lower)}]")
        if not (0 <= self.n <= len(upper)):
            raise ValueError(f"n={self.n} outside [0, {len(upper)}]")
        if any(al <= 0.0 for _, al in upper) or any(be <= 0.0 for _, be in lower):
            raise ValueError("all alpha_j, beta_j must be strictly positive")
        left, right = self.strip
        if not left < right:
            raise ValueError(
                f"empty analytic strip: left edge {left} >= right edge {right}")

    @property
    def strip(self) -> tuple[float, float]:
        """(left, right) edges of the analytic strip; +-inf when one-sided."""
        left = max((-b / be for b, be in self.lower_params[: self.m]),
                   default=-math.inf)
        right = min(((1.0 - a) / al for a, al in self.upper_params[: self.n]),
                    default=math.inf)
        return left, right

    @property
    def decay_exponent(self) -> float:
        """Coefficient of |Im s| in the integrand's exponential decay rate
        (times pi/2).  Must be positive for the contour integral to converge."""
        num = (sum(be for _, be in self.lower_params[: self.m])
               + sum(al for _, al in self.upper_params[: self.n]))
        den = (sum(be for _, be in self.lower_params[self.m:])
               + sum(al for _, al in self.upper_params[self.n:]))
        return num - den

    def chi_log(self, s: np.ndarray) -> np.ndarray:
        """log of the gamma-factor ratio chi(s), vectorized over complex s."""
        out = np.zeros_like(s, dtype=complex)
        for j, (b, be) in enumerate(self.lower_params):
            if j < self.m:
                out += _sp.loggamma(b + be * s)
            else:
                out -= _sp.loggamma(1.0 - b - be * s)
        for j, (a, al) in enumerate(self.upper_params):
            if j < self.n:
                out += _sp.loggamma(1.0 - a - al * s)
            else:
                out -= _sp.loggamma(a + al * s)
        return out

    def contour_abscissa(self, z: float) -> float:
        """Real part for the integration contour.

        Bounded strips use the midpoint, which maximizes the distance from
        both pole families.  One-sided strips have no midpoint; there the
        abscissa is chosen to (approximately) minimize the integrand
        magnitude on the real axis, which suppresses cancellation for
        large/small arguments.
        """
        left, right = self.strip
        if math.isfinite(left) and math.isfinite(right):
            return 0.5 * (left + right)
        # candidate offsets away from the finite edge, geometric ladder
        offsets = [0.25 * 2.0 ** k for k in range(11)]
        if math.isfinite(left):
            cands = np.array([left + o for o in offsets])
        elif math.isfinite(right):
            cands = np.array([right - o for o in offsets])
        else:
            return 0.0
        lnz = math.log(z)
        vals = np.real(self.chi_log(cands.astype(complex))) - cands * lnz
        vals = np.where(np.isfinite(vals), vals, np.inf)
        return float(cands[int(np.argmin(vals))])


# ---------------------------------------------------------------------------
# Contour quadrature
# ---------------------------------------------------------------------------

_TRUNCATION_RATIO = 1e-16   # stop extending where |integrand| < ratio * running max
_MAX_HALF_WIDTH = 2000.0
_MAX_REFINEMENTS = 10


def foxh_contour(kernel: FoxHKernel, z: float, step: float,
                 half_width: float | None = None,
                 abscissa: float | None = None) -> tuple[float, float]:
    """Single trapezoidal pass over the Mellin-Barnes contour.

    Returns ``(value, scale)`` where ``scale`` is the integral of the
    integrand's absolute value -- the natural yardstick for cancellation
    and round-off noise.  Exposed so convergence studies can drive the
    step and truncation explicitly; normal callers use :func:`foxh_eval`.
    """
    if z <= 0.0:
        raise ValueError(f"argument must be positive, got {z}")
    if kernel.decay_exponent <= 0.0:
        raise FoxHConvergenceError(
            "integrand does not decay along vertical contours "
            f"(decay exponent {kernel.decay_exponent})")
    c = kernel.contour_abscissa(z) if abscissa is None else abscissa
    lnz = math.log(z)

    def log_integrand(t: np.ndarray) -> np.ndarray:
        s = c + 1j * t
        return kernel.chi_log(s) - s * lnz

    # grow the truncation until the integrand has dropped below the
    # running maximum by _TRUNCATION_RATIO (in magnitude)
    if half_width is None:
        t_max = max(4.0, 8.0 / kernel.decay_exponent)
        log_cut = math.log(_TRUNCATION_RATIO)
        while True:
            probe = log_integrand(np.linspace(0.0, t_max, 65)).real
            probe_max = probe.max()
            if probe[-1] < probe_max + log_cut:
                break
            t_max *= 2.0
            if t_max > _MAX_HALF_WIDTH:
                raise FoxHConvergenceError(
                    f"contour truncation exceeded t = {_MAX_HALF_WIDTH}")
    else:
        t_max = half_width

    t = np.arange(0.0, t_max + step, step)
    g = log_integrand(t)
    peak = g.real.max()
    w = np.exp(g - peak)
    # integrand is conjugate-symmetric in t, so the two half-lines combine
    # into twice the real part; trapezoid halves the t = 0 sample
    vals = w.real
    vals[0] *= 0.5
    total = float(vals.sum())
    scale = float(np.abs(w).sum())
    factor = math.exp(peak) * step / math.pi
    return factor * total, factor * scale


def _series_pole_families(kernel: FoxHKernel):
    """(b_k, beta_k) pairs whose gamma factors generate the left poles."""
    return kernel.lower_params[: kernel.m]


def foxh_series(kernel: FoxHKernel, z: float, rtol: float = 1e-12,
                max_terms: int = 80) -> float:
    """Residue power series over the left pole families.

    Valid when every left pole is simple; any numerator gamma factor
    evaluated within 1e-9 of one of its poles signals a pole collision and
    raises :class:`FoxHConvergenceError` instead of returning a corrupted
    sum.  Convergence is practical only for small arguments; callers
    gate on ``z``.
    """
    if kernel.m == 0:
        raise FoxHConvergenceError("no left pole families: residue series unavailable")
    families = _series_pole_families(kernel)

    def gamma_num(x: float) -> float:
        # numerator factor: a pole here means two pole families collide
        if x <= 0.5 and abs(x - round(x)) < 1e-9 and round(x) <= 0:
            raise FoxHConvergenceError(
                f"pole collision: numerator gamma argument {x} within 1e-9 of a pole")
        return float(_sp.gamma(x))

    total = 0.0
    for k, (bk, bek) in enumerate(families):
        tail_small = 0
        term_prev = math.inf
        for j in range(max_terms):
            s_pole = -(bk + j) / bek
            coef = (-1.0) ** j / (math.factorial(j) * bek)
            ok = True
            for l, (bl, bel) in enumerate(families):
                if l != k:
                    coef *= gamma_num(bl + bel * s_pole)
            for jj, (a, al) in enumerate(kernel.upper_params):
                if jj < kernel.n:
                    coef *= gamma_num(1.0 - a - al * s_pole)
                else:
                    coef *= float(_sp.rgamma(a + al * s_pole))
            for l in range(kernel.m, len(kernel.lower_params)):
                bl, bel = kernel.lower_params[l]
                coef *= float(_sp.rgamma(1.0 - bl - bel * s_pole))
            term = coef * z ** ((bk + j) / bek)
            if not math.isfinite(term):
                raise FoxHConvergenceError(
                    f"residue term overflow at pole family {k}, order {j}")
            total += term
            if abs(term) > term_prev and j > 4:
                # growing terms: outside the practical convergence region
                raise FoxHConvergenceError(
                    f"residue series not converging at z = {z}")
            term_prev = abs(term)
            if abs(term) <= rtol * max(abs(total), 1e-300):
                tail_small += 1
                if tail_small >= 3:
                    break
            else:
                tail_small = 0
        else:
            raise FoxHConvergenceError(
                f"residue series needed more than {max_terms} terms at z = {z}")
    return total


def foxh_eval(kernel: FoxHKernel, z: float, rtol: float = 1e-8) -> float:
    """Numerical value of the H-function at real z > 0.

    Strategy: trapezoidal contour quadrature with the step halved until two
    successive passes agree to ``rtol`` (relative, with a round-off noise
    floor proportional to the absolute-value integral).  If refinement
    stalls -- typically catastrophic cancellation at a very small argument --
    the residue series takes over when the poles are simple.  Failure of
    both routes raises :class:`FoxHConvergenceError`.
    """
    if z <= 0.0:
        raise ValueError(f"argument must be positive, got {z}")
    c = kernel.contour_abscissa(z)
    # the factor z**(-i t) oscillates with frequency |ln z|; the initial
    # step must resolve it
    step = min(0.25, math.pi / (4.0 * (1.0 + abs(math.log(z)))))
    prev, prev_scale = foxh_contour(kernel, z, step, abscissa=c)
    for _ in range(_MAX_REFINEMENTS):
        step *= 0.5
        cur, scale = foxh_contour(kernel, z, step, abscissa=c)
        noise = 64.0 * np.finfo(float).eps * scale
        if abs(cur - prev) <= max(rtol * abs(cur), noise):
            return cur
        prev, prev_scale = cur, scale
    # contour did not settle: small arguments are rescued by the series
    if z <= 4.0:
        return foxh_series(kernel, z)
    raise FoxHConvergenceError(
        f"contour quadrature failed self-consistency at z = {z}")
