"""Analytic kernels: log-gamma, the smoothing weight W_a(x; t), Hurwitz zeta,
L-values and the smoothed double series for |L(1/2 + it, chi)|^2.

All arithmetic is float64.  Functions that take arrays are vectorized over
their first argument; scalar wrappers return Python scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import DirichletCharacter, gauss_sum

# B_2, B_4, ..., B_26
BERNOULLI_EVEN = (
    1 / 6,
    -1 / 30,
    1 / 42,
    -1 / 30,
    5 / 66,
    -691 / 2730,
    7 / 6,
    -3617 / 510,
    43867 / 798,
    -174611 / 330,
    854513 / 138,
    -236364091 / 2730,
    8553103 / 6,
)

_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_STIRLING_R = 15.0
_STIRLING_TERMS = 10
_EPS = np.finfo(float).eps

# contour defaults for the weight integral
STEP = 0.05
HEIGHT = 8.0
BULK_LINE = 1.0
# pole distance 1 on the bulk line: exp(-2 pi 0.8 / 0.1) ~ 1e-22
BULK_STEP = 0.1
BULK_HEIGHT = 7.0


# --------------------------------------------------------------------------
# gamma and digamma
# --------------------------------------------------------------------------


def _shift_counts(w: np.ndarray) -> np.ndarray:
    need = (np.abs(w) < _STIRLING_R) | (w.real < 1.0)
    return np.where(need, np.ceil(_STIRLING_R - w.real), 0).astype(np.int64).clip(min=0)


def _check_poles(w: np.ndarray) -> None:
    bad = (w.imag == 0) & (w.real <= 0) & (w.real == np.round(w.real))
    if np.any(bad):
        raise ValueError(f"gamma pole at {w[bad][0]}")


def log_gamma(w):
    """Principal log Gamma for ``Re w > 0`` via upward recursion and Stirling.

    For ``Re w <= 0`` the same recursion gives *a* branch of log Gamma; poles
    are rejected.
    """
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    _check_poles(w)
    n = _shift_counts(w)
    corr = np.zeros_like(w)
    for k in range(int(n.max(initial=0))):
        live = k < n
        corr[live] += np.log(w[live] + k)
    ws = w + n
    inv = 1.0 / ws
    inv2 = inv * inv
    series = np.zeros_like(ws)
    p = inv
    for k in range(1, _STIRLING_TERMS + 1):
        series += BERNOULLI_EVEN[k - 1] / (2 * k * (2 * k - 1)) * p
        p = p * inv2
    out = (ws - 0.5) * np.log(ws) - ws + _HALF_LOG_2PI + series - corr
    return complex(out[0]) if scalar else out


def log_gamma_diff(w, d):
    """``log Gamma(w + d) - log Gamma(w)`` (mod 2 pi i) without cancellation.

    Both arguments need positive real part; ``w`` and ``d`` broadcast.
    """
    w, d = np.broadcast_arrays(np.asarray(w, dtype=complex), np.asarray(d, dtype=complex))
    w = np.atleast_1d(w)
    d = np.atleast_1d(d)
    _check_poles(w + d)
    n = np.maximum(_shift_counts(w), _shift_counts(w + d))
    corr = np.zeros(w.shape, dtype=complex)
    for k in range(int(n.max(initial=0))):
        live = k < n
        corr[live] += np.log1p(d[live] / (w[live] + k))
    ws = w + n
    wd = ws + d
    out = (ws - 0.5) * np.log1p(d / ws) + d * np.log(wd) - d
    inv_a, inv_b = 1.0 / ws, 1.0 / wd
    pa, pb = inv_a, inv_b
    for k in range(1, _STIRLING_TERMS + 1):
        out += BERNOULLI_EVEN[k - 1] / (2 * k * (2 * k - 1)) * (pb - pa)
        pa = pa * inv_a * inv_a
        pb = pb * inv_b * inv_b
    return out - corr


def digamma(w):
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    _check_poles(w)
    n = _shift_counts(w)
    corr = np.zeros_like(w)
    for k in range(int(n.max(initial=0))):
        live = k < n
        corr[live] += 1.0 / (w[live] + k)
    ws = w + n
    inv2 = 1.0 / (ws * ws)
    series = np.zeros_like(ws)
    p = inv2
    for k in range(1, _STIRLING_TERMS + 1):
        series += BERNOULLI_EVEN[k - 1] / (2 * k) * p
        p = p * inv2
    out = np.log(ws) - 0.5 / ws - series - corr
    return complex(out[0]) if scalar else out


# --------------------------------------------------------------------------
# the weight W_a(x; t)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightEval:
    x: float
    t: float
    parity_a: int
    tau: float
    value: float
    quad_error: float
    line: float
    imag_residual: float = 0.0


def _singular_abscissae(a: int) -> tuple[float, ...]:
    # z = 0 from dz/z; first gamma pole at Re z = -1/2 - a
    return (0.0, -0.5 - a)


def _strip(c: float, a: int) -> tuple[float, float]:
    """Usable half-widths (left, right) of the analytic strip around Re z = c."""
    left = [c - p for p in _singular_abscissae(a) if p < c]
    right = [p - c for p in _singular_abscissae(a) if p > c]
    d_left = min(1.0, 0.8 * min(left)) if left else 1.0
    d_right = min(1.0, 0.8 * min(right)) if right else 1.0
    return d_left, d_right


def step_for_line(c: float, a: int, step: float = STEP) -> float:
    d_left, d_right = _strip(c, a)
    return min(step, min(d_left, d_right) / 8)


def _integrand(z: np.ndarray, t: float, a: int) -> np.ndarray:
    """Gamma ratio * exp(z^2) / z, without the x^{-z} factor."""
    u = 0.25 + 0.5 * a + 0.5j * t
    # |Gamma(u)|^2 = Gamma(u) Gamma(conj u)
    lg = log_gamma_diff(u, z / 2) + log_gamma_diff(np.conj(u), z / 2)
    return np.exp(lg + z * z) / z


def _dt_factor(z: np.ndarray, t: float, a: int) -> np.ndarray:
    u = 0.25 + 0.5 * a + 0.5j * t
    v = 0.25 + 0.5 * a - 0.5j * t
    return 0.5j * (digamma(u + z / 2) - digamma(v + z / 2)) + digamma(u).imag


def weight_kernel(t: float, a: int, line: float = BULK_LINE, step: float | None = None,
                  height: float = HEIGHT, derivative: bool = False):
    """Trapezoid nodes ``z_j`` and weights ``K_j`` on ``Re z = line``.

    ``W(x) = Re sum_j K_j x^{-z_j}`` (``dW/dt`` with ``derivative=True``).
    """
    h = step_for_line(line, a) if step is None else step
    m = int(math.ceil(height / h))
    y = h * np.arange(-m, m + 1)
    z = line + 1j * y
    f = _integrand(z, t, a)
    if derivative:
        f = f * _dt_factor(z, t, a)
    return z, f * (h / (2 * math.pi))


def apply_kernel(z: np.ndarray, k: np.ndarray, x, chunk: int = 2048) -> np.ndarray:
    """Complex quadrature sums ``sum_j k_j x^{-z_j}`` for an array of x."""
    logx = np.log(np.asarray(x, dtype=float)).ravel()
    out = np.empty(logx.shape, dtype=complex)
    for i in range(0, logx.size, chunk):
        lx = logx[i : i + chunk]
        out[i : i + chunk] = np.exp(-np.outer(lx, z)) @ k
    return out


def _line_mass(t: float, a: int, c: float, x: float, derivative: bool) -> float:
    """(1/2pi) * integral of |integrand * x^{-z}| along Re z = c (coarse)."""
    z, k = weight_kernel(t, a, line=c, step=0.1, height=HEIGHT + 2, derivative=derivative)
    return float(np.sum(np.abs(k)) * x ** (-c))


def _choose_line(x: float, tau: float) -> float:
    # minimizes exp(c^2) (tau / 2x)^c / c, the rough size of the integrand
    L = math.log(2 * x / tau)
    return float(np.clip((L + math.sqrt(L * L + 8)) / 4, 0.1, 2.0))


def _evaluate(x: float, t: float, a: int, c: float, derivative: bool = False) -> tuple[complex, float]:
    if not x > 0:
        raise ValueError(f"weight requires x > 0, got {x}")
    if a not in (0, 1):
        raise ValueError(f"parity must be 0 or 1, got {a}")
    h = step_for_line(c, a)
    z, k = weight_kernel(t, a, line=c, step=h, derivative=derivative)
    terms = k * np.exp(-z * math.log(x))
    raw = complex(math.fsum(terms.real), math.fsum(terms.imag))
    # discretization: analytic-strip bound on both sides
    d_left, d_right = _strip(c, a)
    disc = 0.0
    for d, side in ((d_left, -1), (d_right, 1)):
        mass = _line_mass(t, a, c + side * d, x, derivative)
        disc += 2 * mass * math.exp(-2 * math.pi * d / h)
    # Gaussian tail beyond |Im z| = HEIGHT
    edge = abs(k[0]) + abs(k[-1])
    tail = 2 * edge / h * x ** (-c) / (2 * HEIGHT)
    # relative rounding per term grows with the phase y log x
    rounding = _EPS * (16 + HEIGHT * abs(math.log(x))) * float(np.sum(np.abs(terms)))
    return raw, disc + tail + rounding


def weight_W(x: float, t: float, a: int, line: float | None = None) -> WeightEval:
    """``W_a(x; t)`` on a line ``Re z = c > 0`` picked from ``x / tau``.

    Every line with ``c > 0`` gives the same integral as ``Re z = 2``; the
    adaptive choice avoids cancellation between huge terms when ``x`` is
    tiny.
    """
    tau = abs(t) + 2.0
    c = _choose_line(x, tau) if line is None else float(line)
    if c <= 0:
        raise ValueError("weight_W needs a line right of the pole at z = 0")
    raw, err = _evaluate(x, t, a, c)
    return WeightEval(float(x), float(t), a, tau, raw.real, err, c, abs(raw.imag))


SHIFTED_LINE = -0.25


def weight_W_shifted(x: float, t: float, a: int) -> float:
    """Same integral on ``Re z = -1/4``; equals ``W_a(x; t) - 1``."""
    return weight_W_shifted_eval(x, t, a).value


def weight_W_shifted_eval(x: float, t: float, a: int) -> WeightEval:
    raw, err = _evaluate(x, t, a, SHIFTED_LINE)
    return WeightEval(float(x), float(t), a, abs(t) + 2.0, raw.real, err, SHIFTED_LINE, abs(raw.imag))


def weight_dt(x: float, t: float, a: int) -> float:
    """``dW_a(x; t)/dt`` by differentiating under the integral sign."""
    if t == 0:
        return 0.0
    tau = abs(t) + 2.0
    raw, _ = _evaluate(x, t, a, _choose_line(x, tau), derivative=True)
    return raw.real


def weight_dt_eval(x: float, t: float, a: int) -> WeightEval:
    tau = abs(t) + 2.0
    c = _choose_line(x, tau)
    raw, err = _evaluate(x, t, a, c, derivative=True)
    value = 0.0 if t == 0 else raw.real
    return WeightEval(float(x), float(t), a, tau, value, err, c, abs(raw.imag))


# --------------------------------------------------------------------------
# Hurwitz zeta and L-values
# --------------------------------------------------------------------------


def hurwitz_depth(s) -> int:
    s = np.asarray(s, dtype=complex)
    return max(20, int(math.ceil(2 * float(np.max(np.abs(s.imag), initial=0.0)))))


def hurwitz_zeta(s, alpha: float, depth: int | None = None, terms: int = 12,
                 return_error: bool = False):
    """Euler-Maclaurin evaluation of ``zeta(s, alpha)`` for ``0 < alpha <= 1``.

    ``depth`` is the number of directly summed terms (default
    ``max(20, 2 max|Im s|)``); ``terms`` Bernoulli corrections follow.  With
    ``return_error`` a remainder bound is returned alongside the values.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if np.any(s == 1):
        raise ValueError("zeta(s, alpha) has a pole at s = 1")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if np.any(s.real <= -1):
        raise ValueError("Re s must exceed -1")
    M = hurwitz_depth(s) if depth is None else int(depth)
    logs = np.log(np.arange(M) + alpha)
    direct = np.exp(-np.outer(s, logs)).sum(axis=1)
    N = M + alpha
    logN = math.log(N)
    NS = np.exp(-s * logN)
    total = direct + N * NS / (s - 1) + 0.5 * NS
    poch = s.copy()  # (s)_{2k-1}
    power = NS / N  # N^{-s-1}
    fact = 2.0  # (2k)!
    term = None
    for k in range(1, terms + 1):
        term = BERNOULLI_EVEN[k - 1] / fact * poch * power
        total = total + term
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (N * N)
        fact *= (2 * k + 1) * (2 * k + 2)
    if not return_error:
        return complex(total[0]) if scalar else total
    nxt = BERNOULLI_EVEN[terms] / fact * poch * power
    sigma = s.real
    err = np.abs(nxt) * np.abs(s + 2 * terms + 1) / (sigma + 2 * terms + 1)
    if scalar:
        return complex(total[0]), float(err[0])
    return total, err


@dataclass(frozen=True)
class LValueResult:
    s: complex
    character: str
    value: complex
    method: str
    error_estimate: float


def _l_matrix(chars: list[DirichletCharacter], s: np.ndarray, depth: int | None = None):
    """``L(s, chi)`` for every character (rows) and every s (columns)."""
    q = chars[0].q
    a = np.array([n for n in range(1, q + 1) if math.gcd(n, q) == 1])
    cm = np.stack([chi.values(a) for chi in chars])
    zs = np.empty((a.size, s.size), dtype=complex)
    errs = np.empty((a.size, s.size))
    for i, ai in enumerate(a):
        zs[i], errs[i] = hurwitz_zeta(s, ai / q, depth=depth, return_error=True)
    scale = np.exp(-s * math.log(q))
    vals = (cm @ zs) * scale
    err = np.abs(scale) * errs.sum(axis=0)
    return vals, np.broadcast_to(err, vals.shape)


def l_values(chars: list[DirichletCharacter], s, depth: int | None = None):
    """Vectorized Hurwitz-zeta L-values; returns ``(values, error_bounds)``."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s == 1):
        raise ValueError("s = 1 is not supported in vectorized evaluation")
    return _l_matrix(chars, s, depth)


def l_oracle(s: complex, chi: DirichletCharacter) -> LValueResult:
    """``L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)``."""
    s = complex(s)
    if s == 1:
        if chi.is_principal:
            raise ValueError("L(s, chi_0) has a pole at s = 1")
        # the 1/(s-1) poles cancel; zeta(s, x) = 1/(s-1) - psi(x) + O(s-1)
        q = chi.q
        a = np.arange(1, q + 1)
        val = -np.sum(chi.values(a) * digamma(a / q)) / q
        return LValueResult(s, chi.id, complex(val), "oracle", 1e-14 * q)
    vals, err = _l_matrix([chi], np.array([s]))
    return LValueResult(s, chi.id, complex(vals[0, 0]), "oracle", float(err[0, 0]))


def completed_lambda(s: complex, chi: DirichletCharacter) -> complex:
    """``Lambda(1/2 + s, chi) = (q/pi)^{s/2} Gamma(1/4 + s/2 + a/2) L(1/2 + s, chi)``."""
    if not chi.primitive:
        raise ValueError("completed L-function requires a primitive character")
    s = complex(s)
    a = chi.parity_a
    pre = np.exp(0.5 * s * math.log(chi.q / math.pi) + log_gamma(0.25 + s / 2 + a / 2))
    return complex(pre * l_oracle(0.5 + s, chi).value)


def root_number(chi: DirichletCharacter) -> complex:
    return gauss_sum(chi) / ((1j) ** chi.parity_a * math.sqrt(chi.q))


def functional_equation_residual(s: complex, chi: DirichletCharacter) -> float:
    lhs = completed_lambda(s, chi)
    rhs = root_number(chi) * completed_lambda(-complex(s), chi.conj())
    return abs(lhs - rhs) / abs(lhs)


# --------------------------------------------------------------------------
# smoothed double series for |L(1/2 + it, chi)|^2
# --------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _pairs(N: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``(a, b)`` with ``ab <= N``."""
    a_parts, b_parts = [], []
    for a in range(1, N + 1):
        nb = N // a
        a_parts.append(np.full(nb, a, dtype=np.int64))
        b_parts.append(np.arange(1, nb + 1, dtype=np.int64))
    return np.concatenate(a_parts), np.concatenate(b_parts)


def _coefficients(chi: DirichletCharacter, t: float, N: int) -> np.ndarray:
    """``c[m] = sum_{ab = m} chi(a) conj(chi(b)) (a/b)^{-it}`` for ``m <= N``."""
    n = np.arange(0, N + 1)
    f = np.zeros(N + 1, dtype=complex)
    f[1:] = chi.values(n[1:]) * np.exp(-1j * t * np.log(n[1:]))
    a, b = _pairs(N)
    live = (f[a] != 0) & (f[b] != 0)
    a, b = a[live], b[live]
    prod = f[a] * np.conj(f[b])
    m = a * b
    return np.bincount(m, prod.real, N + 1) + 1j * np.bincount(m, prod.imag, N + 1)


class WeightTable:
    """Lazily extended table of ``W_a(pi m / q; t)`` for ``m = 0..N``."""

    def __init__(self, q: int, t: float, a: int):
        self.q, self.t, self.a = q, float(t), a
        self.z, self.k = weight_kernel(t, a, step=BULK_STEP, height=BULK_HEIGHT)
        self.values = np.zeros(1)

    def upto(self, N: int) -> np.ndarray:
        if self.values.size <= N:
            m = np.arange(self.values.size, N + 1)
            fresh = apply_kernel(self.z, self.k, math.pi * m / self.q).real
            self.values = np.concatenate([self.values, fresh])
        return self.values[: N + 1]


@dataclass
class SmoothedSeries:
    """Evaluated weights and coefficients of the smoothed series at one t."""

    chi: DirichletCharacter
    t: float
    N: int
    coeffs: np.ndarray  # index m = 0..N
    weights: np.ndarray  # W(pi m / q; t), index m = 0..N (entry 0 unused)

    def partial(self, upto: float) -> complex:
        """``sum_{ab <= upto} chi(a) conj(chi(b)) (a/b)^{-it} W / sqrt(ab)``."""
        m_max = min(self.N, int(math.floor(upto))) if upto >= 1 else 0
        if m_max < 1:
            return 0j
        m = np.arange(1, m_max + 1)
        terms = self.coeffs[1 : m_max + 1] * self.weights[1 : m_max + 1] / np.sqrt(m)
        return complex(math.fsum(terms.real), math.fsum(terms.imag))

    def total(self) -> complex:
        return self.partial(self.N)

    def block_swing(self) -> float:
        """Largest ``|S(N) - S(M)|`` over partial sums ``S(M)``, ``N/2 <= M < N``.

        The signed sum of one block can cancel by accident; the swing of the
        running sum across the block cannot.
        """
        lo = self.N // 2
        m = np.arange(lo + 1, self.N + 1)
        terms = self.coeffs[lo + 1 :] * self.weights[lo + 1 : self.N + 1] / np.sqrt(m)
        rest = np.cumsum(terms[::-1])  # S(N) - S(M) for M = N-1, ..., N/2
        return float(np.max(np.abs(rest))) if rest.size else 0.0


def series_cutoff(q: int, t: float, eps: float) -> int:
    tau = abs(t) + 2.0
    return int(math.ceil(q * tau / math.pi * max(4.0, eps**-0.5 / tau)))


def smoothed_series(t: float, chi: DirichletCharacter, eps: float,
                    table: WeightTable | None = None, max_terms: int = 4_000_000) -> SmoothedSeries:
    """Evaluate coefficients and weights up to a cutoff N.

    N starts from the weight's quadratic decay bound,
    ``(q tau / pi) max(4, eps^{-1/2} / tau)``, and doubles until every
    partial sum across the last dyadic block ``(N/2, N]`` stays within
    ``eps / 8`` of the final one.  A :class:`WeightTable` for the same
    ``(q, t, parity)`` may be shared between characters.
    """
    if not chi.primitive:
        raise ValueError("the smoothed series identity needs a primitive character")
    if eps < 1e-9:
        raise ValueError("eps must be at least 1e-9")
    q, a = chi.q, chi.parity_a
    if table is None:
        table = WeightTable(q, t, a)
    elif (table.q, table.t, table.a) != (q, float(t), a):
        raise ValueError("weight table does not match (q, t, parity)")
    N = series_cutoff(q, t, eps)
    while True:
        series = SmoothedSeries(chi, float(t), N, _coefficients(chi, t, N), table.upto(N))
        if 2 * series.block_swing() < eps / 4:
            return series
        if 2 * N > max_terms:
            raise RuntimeError(f"series cutoff exceeded {max_terms} terms")
        N *= 2


def abs_L_sq_smoothed(t: float, chi: DirichletCharacter, eps: float = 1e-8) -> float:
    """``|L(1/2 + it, chi)|^2`` from the smoothed double Dirichlet series."""
    return 2.0 * smoothed_series(t, chi, eps).total().real
