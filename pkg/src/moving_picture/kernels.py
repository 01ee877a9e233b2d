"""
Closed-form transformation functions <q|Q;t> and <q|P;t> for the free particle
and the harmonic oscillator, the moving-frame representations of momentum,
number and coherent states, and the quadrature oracles that check them.

Branch convention: every square-root prefactor uses the principal branch, so
sqrt(1/i) = exp(-i pi/4).  Position kernels of the oscillator are evaluated
only for 0 < omega t < pi; nothing is continued across caustics.

Oscillatory integrals of pure phases are computed with a smooth flat-top
window (a difference of two error functions).  Inside the window the
integrand is untouched; the window edges sit where the integrand oscillates
so fast that their contribution is far below double precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erf

from .errors import DomainError, SingularTimeError
from .evolution import evolve
from .hilbert import Grid, SystemParams, WaveFunction, gaussian_packet
from .report import CheckReport, Timer, make_report
from .special import hermite, hermite_functions

__all__ = [
    "Representation",
    "KernelSpec",
    "PhaseConvention",
    "hermite",
    "kernel",
    "alias_shift",
    "apply_kernel",
    "kernel_vs_evolution_check",
    "kernel_delta_limit",
    "kernel_composition_check",
    "kernel_schrodinger_residual",
    "kernel_unitarity_check",
    "moving_momentum_state",
    "moving_number_state",
    "moving_coherent_state",
    "coherent_number_sum",
    "ho_eigenfunction",
    "fourier_duality_check",
    "momentum_state_check",
    "number_state_check",
    "number_orthonormality_check",
    "coherent_state_check",
    "number_state_quadrature",
    "momentum_state_quadrature",
    "momentum_kernel_quadrature",
]


class Representation(str, enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class PhaseConvention:
    """Where the closed forms may be evaluated.

    ``caustic_tol`` is the smallest |sin wt| (position kernels) or |cos wt|
    (oscillator momentum kernel) accepted.
    """

    branch: str = "principal"
    caustic_tol: float = 1e-6

    def allowed(self, spec: "KernelSpec", t: float) -> bool:
        p = spec.params
        if not p.is_harmonic:
            return spec.representation is Representation.MOMENTUM or t > 0
        wt = p.omega * t
        if spec.representation is Representation.POSITION:
            return 0 < wt < np.pi and abs(np.sin(wt)) >= self.caustic_tol
        return -np.pi / 2 < wt < np.pi and abs(np.cos(wt)) >= self.caustic_tol


DEFAULT_CONVENTION = PhaseConvention()


@dataclass(frozen=True)
class KernelSpec:
    params: SystemParams
    representation: Representation = Representation.POSITION

    def __post_init__(self):
        object.__setattr__(self, "representation", Representation(self.representation))

    @property
    def system(self):
        return self.params.system


def check_time(spec: KernelSpec, t: float, convention: PhaseConvention = DEFAULT_CONVENTION) -> None:
    if not convention.allowed(spec, t):
        raise SingularTimeError(
            f"{spec.system.value}/{spec.representation.value} kernel is singular or outside "
            f"the caustic window at t={t!r}"
        )


def kernel(spec: KernelSpec, q, x, t: float, convention: PhaseConvention = DEFAULT_CONVENTION):
    """<q|Q;t> (position representation, x = Q) or <q|P;t> (momentum, x = P)."""
    check_time(spec, t, convention)
    p = spec.params
    m, hbar = p.m, p.hbar
    q = np.asarray(q, dtype=float)
    x = np.asarray(x, dtype=float)
    if spec.representation is Representation.POSITION:
        if p.is_harmonic:
            w = p.omega
            s, c = np.sin(w * t), np.cos(w * t)
            pref = np.sqrt(m * w / (2j * np.pi * hbar * s))
            phase = (m * w / s) * (0.5 * (q**2 + x**2) * c - q * x)
        else:
            pref = np.sqrt(m / (2j * np.pi * hbar * t))
            phase = (m / (2 * t)) * (q - x) ** 2
    else:
        if p.is_harmonic:
            w = p.omega
            c = np.cos(w * t)
            pref = 1.0 / np.sqrt(complex(2 * np.pi * hbar * c))
            phase = q * x / c - (0.5 * m * w**2 * q**2 + x**2 / (2 * m)) * np.tan(w * t) / w
        else:
            pref = 1.0 / np.sqrt(2 * np.pi * hbar)
            phase = q * x - x**2 * t / (2 * m)
    return pref * np.exp(1j * phase / hbar)


def chirp_rate(spec: KernelSpec, t: float) -> tuple[float, float]:
    """Bounds (a, b) on the kernel phase: |d phase/dx| <= 2 a |x| + b |q| in units of 1/length."""
    p = spec.params
    if spec.representation is Representation.MOMENTUM:
        raise ValueError("chirp_rate is defined for position kernels")
    if p.is_harmonic:
        s, c = np.sin(p.omega * t), np.cos(p.omega * t)
        k = p.m * p.omega / (p.hbar * abs(s))
        return 0.5 * k * abs(c), k
    k = p.m / (p.hbar * t)
    return 0.5 * k, k


def window(x, center: float, radius: float, edge: float):
    """Smooth flat-top window equal to 1 on |x - center| << radius."""
    u = np.asarray(x) - center
    return 0.5 * (erf((u + radius) / edge) - erf((u - radius) / edge))


def windowed_integral(f: Callable, center: float, radius: float, edge: float, max_freq: float):
    """Trapezoid integral of f times the flat-top window.

    ``max_freq`` bounds the angular frequency of f over the window support;
    the step leaves a margin of the same size above it.  ``f`` may return an
    array with a trailing sample axis, so several integrals share one call.
    """
    half = radius + 7 * edge
    step = np.pi / (max_freq + 10.0 / edge)
    n = int(np.ceil(2 * half / step)) + 1
    x = center + np.linspace(-half, half, n)
    h = x[1] - x[0]
    return np.sum(f(x) * window(x, center, radius, edge), axis=-1) * h


def alias_shift(spec: KernelSpec, grid: Grid, t: float) -> float:
    """Distance at which grid quadrature of the position kernel places ghost copies of the result.

    Output within this distance of the input packet is alias free; it
    should exceed the box width for clean results.
    """
    return float(2 * np.pi / (chirp_rate(spec, t)[1] * grid.dq))


def apply_kernel(spec: KernelSpec, grid: Grid, t: float, psi: WaveFunction) -> WaveFunction:
    """Integral of K(q, Q; t) psi(Q) dQ by the grid's trapezoid rule."""
    q = grid.points
    K = kernel(spec, q[:, None], q[None, :], t)
    return WaveFunction(grid, K @ psi.amp * grid.dq)


def kernel_vs_evolution_check(spec: KernelSpec, grid: Grid, t: float,
                              test_packet: WaveFunction | None = None,
                              tolerance: float = 1e-6) -> CheckReport:
    """Relative L2 distance between T(t) phi (dense evolution) and the kernel quadrature."""
    if spec.representation is not Representation.POSITION:
        raise ValueError("kernel/evolution comparison uses the position representation")
    check_time(spec, t)
    with Timer() as timer:
        if test_packet is None:
            test_packet = gaussian_packet(grid, 0.5 * (grid.q_min + grid.q_max), 0.0, 1.0, spec.params.hbar)
        dense = evolve(spec.params, test_packet, t).amp
        quad = apply_kernel(spec, grid, t, test_packet).amp
        residual = np.linalg.norm(dense - quad) / np.linalg.norm(test_packet.amp)
    return make_report("kernel_vs_evolution", spec.params, residual, tolerance, timer,
                       t=repr(t), n=grid.n, q_min=grid.q_min, q_max=grid.q_max,
                       alias_shift=f"{alias_shift(spec, grid, t):.6g}")


def kernel_delta_limit(spec: KernelSpec, t: float, sigma: float = 1.0, q_samples=None,
                       tolerance: float = 1e-4) -> CheckReport:
    """sup_q |int K(q,Q;t) phi(Q) dQ - phi(q)| for a Gaussian phi, on a quadrature fine enough for small t."""
    check_time(spec, t)
    with Timer() as timer:
        hbar = spec.params.hbar
        if q_samples is None:
            q_samples = np.linspace(-4 * sigma, 4 * sigma, 41)
        q_samples = np.asarray(q_samples, dtype=float)

        def phi(x):
            return (2 * np.pi * sigma**2) ** -0.25 * np.exp(-x**2 / (4 * sigma**2))

        a, b = chirp_rate(spec, t)
        extent = 12 * sigma
        max_freq = 2 * a * extent + b * np.max(np.abs(q_samples))
        step = np.pi / (max_freq + 10.0 / sigma)
        Q = np.arange(-extent, extent + step / 2, step)
        values = np.array([np.sum(kernel(spec, qi, Q, t) * phi(Q)) * step for qi in q_samples])
        residual = float(np.max(np.abs(values - phi(q_samples))))
    return make_report("kernel_delta_limit", spec.params, residual, tolerance, timer,
                       t=repr(t), sigma=repr(sigma), nodes=Q.size, hbar=repr(hbar))


def _smeared_delta(x, Q, w):
    return np.exp(-((x - Q) ** 2) / (2 * w**2)) / (np.sqrt(2 * np.pi) * w)


def _smeared_kernel(spec: KernelSpec, q: np.ndarray, Q: float, t: float, w: float) -> np.ndarray:
    """int K(q, Q'; t) delta_w(Q' - Q) dQ' at each q."""
    a, b = chirp_rate(spec, t)
    span = 9 * w
    max_freq = 2 * a * (abs(Q) + span) + b * float(np.max(np.abs(q)))
    step = np.pi / (max_freq + 10.0 / w)
    n = int(np.ceil(2 * span / step)) + 1
    Qp = np.linspace(Q - span, Q + span, n)
    h = Qp[1] - Qp[0]
    return kernel(spec, q[:, None], Qp[None, :], t) @ _smeared_delta(Qp, Q, w) * h


def kernel_composition_check(spec: KernelSpec, grid: Grid, t1: float, t2: float,
                             Q_samples: Sequence[float] = (-1.0, 0.0, 0.5),
                             q_samples: Sequence[float] | None = None,
                             tolerance: float = 1e-5) -> CheckReport:
    """Semigroup law K(t1+t2) = K(t1) * K(t2), both sides smeared in Q by a Gaussian of width 3 dq.

    The intermediate integral over x covers the support of the t2-evolved
    smeared delta, on a quadrature fine enough for both kernels' chirp.
    """
    with Timer() as timer:
        meta = dict(t1=repr(t1), t2=repr(t2), n=grid.n)
        if t2 == 0:
            return make_report("kernel_composition", spec.params, 0.0, tolerance, timer,
                               identity="t2=0", **meta)
        if t1 == 0:
            return make_report("kernel_composition", spec.params, 0.0, tolerance, timer,
                               identity="t1=0", **meta)
        for t in (t1, t2, t1 + t2):
            check_time(spec, t)
        w = 3 * grid.dq
        if q_samples is None:
            center = 0.5 * (grid.q_min + grid.q_max)
            q_samples = center + np.linspace(-2.0, 2.0, 9)
        q_samples = np.asarray(q_samples, dtype=float)

        a1, b1 = chirp_rate(spec, t1)
        a2, b2 = chirp_rate(spec, t2)
        p = spec.params
        if p.is_harmonic:
            s2, c2 = np.sin(p.omega * t2), np.cos(p.omega * t2)
            spread, shrink = p.hbar * abs(s2) / (p.m * p.omega * w), abs(c2)
        else:
            spread, shrink = p.hbar * abs(t2) / (p.m * w), 1.0
        # the t2-evolved smeared delta is a Gaussian of this width centred near Q cos(w t2)
        half = 8.0 * np.hypot(spread, w * shrink)
        q_max = float(np.max(np.abs(q_samples)))

        worst, nodes = 0.0, 0
        for Q in Q_samples:
            center = Q * (c2 if p.is_harmonic else 1.0)
            X = abs(center) + half
            max_freq = (2 * a1 + 2 * a2) * X + b1 * q_max + b2 * (abs(Q) + 9 * w)
            step = np.pi / (max_freq + 10.0 / w)
            n = int(np.ceil(2 * half / step)) + 1
            x = np.linspace(center - half, center + half, n)
            h = x[1] - x[0]
            lhs = _smeared_kernel(spec, q_samples, Q, t1 + t2, w)
            g = _smeared_kernel(spec, x, Q, t2, w)
            K1 = kernel(spec, q_samples[:, None], x[None, :], t1)
            rhs = K1 @ g * h
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            nodes = max(nodes, n)
        n = nodes
    return make_report("kernel_composition", spec.params, worst, tolerance, timer,
                       width=repr(w), nodes=n, **meta)


def kernel_schrodinger_residual(spec: KernelSpec, sample_points: Iterable[Sequence[float]],
                                h_q: float = 1e-3, h_t: float = 1e-3,
                                tolerance: float = 1e-5) -> CheckReport:
    """max relative |i hbar dK/dt + (hbar^2/2m) d2K/dq2 - V K| / |K| by central differences.

    ``sample_points`` are (q, x, t) triples, x being Q or P by representation.
    """
    with Timer() as timer:
        p = spec.params
        worst = 0.0
        points = [tuple(map(float, pt)) for pt in sample_points]
        for q, x, t in points:
            for tt in (t - h_t, t, t + h_t):
                check_time(spec, tt)
            K0 = kernel(spec, q, x, t)
            dK_dt = (kernel(spec, q, x, t + h_t) - kernel(spec, q, x, t - h_t)) / (2 * h_t)
            d2K_dq2 = (kernel(spec, q + h_q, x, t) - 2 * K0 + kernel(spec, q - h_q, x, t)) / h_q**2
            res = 1j * p.hbar * dK_dt + p.hbar**2 / (2 * p.m) * d2K_dq2 - p.potential(q) * K0
            worst = max(worst, float(abs(res) / abs(K0)))
    return make_report(f"kernel_schrodinger_{spec.representation.value}", p, worst, tolerance, timer,
                       h_q=repr(h_q), h_t=repr(h_t), points=len(points))


def kernel_unitarity_check(spec: KernelSpec, grid: Grid, t: float,
                           packets: Sequence[WaveFunction] | None = None,
                           tolerance: float = 1e-6) -> CheckReport:
    """Inner products of Gaussian packets are preserved by the kernel quadrature."""
    with Timer() as timer:
        hbar = spec.params.hbar
        if packets is None:
            packets = [
                gaussian_packet(grid, -1.0, 0.5, 1.0, hbar),
                gaussian_packet(grid, 0.5, -0.3, 1.2, hbar),
                gaussian_packet(grid, 1.5, 0.0, 0.8, hbar),
            ]
        pushed = [apply_kernel(spec, grid, t, psi) for psi in packets]
        worst = 0.0
        for i, (a, ka) in enumerate(zip(packets, pushed)):
            for b, kb in zip(packets[i:], pushed[i:]):
                before = np.vdot(a.amp, b.amp) * grid.dq
                after = np.vdot(ka.amp, kb.amp) * grid.dq
                worst = max(worst, abs(after - before))
    return make_report("kernel_unitarity", spec.params, worst, tolerance, timer, t=repr(t), n=grid.n,
                       alias_shift=f"{alias_shift(spec, grid, t):.6g}")


# ---------------------------------------------------------------------------
# states in the moving frame


def moving_momentum_state(params: SystemParams, Q, p, t: float):
    """<Q;t|p> = (2 pi hbar)^(-1/2) exp[i Q p / hbar + i p^2 t / (2 m hbar)] for the free particle."""
    if params.is_harmonic:
        raise DomainError("the closed-form momentum state is defined for the free particle")
    Q = np.asarray(Q, dtype=float)
    p = np.asarray(p, dtype=float)
    hbar = params.hbar
    return (2 * np.pi * hbar) ** -0.5 * np.exp(1j * Q * p / hbar + 1j * p**2 * t / (2 * params.m * hbar))


def _require_harmonic(params: SystemParams) -> None:
    if not params.is_harmonic:
        raise DomainError("number and coherent states need the harmonic oscillator")


def moving_number_state(params: SystemParams, Q, n: int, t: float):
    """<Q;t|n> from the Hermite-polynomial closed form."""
    _require_harmonic(params)
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    n = int(n)
    m, w, hbar = params.m, params.omega, params.hbar
    Q = np.asarray(Q, dtype=float)
    xi = np.sqrt(m * w / hbar) * Q
    norm = (m * w / (np.pi * hbar)) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    return norm * np.exp(-0.5 * xi**2 + 1j * (n + 0.5) * w * t) * hermite(n, xi)


def moving_coherent_state(params: SystemParams, Q, z: complex, t: float):
    """<Q;t|z> for the annihilation-operator eigenstate a|z> = z|z>."""
    _require_harmonic(params)
    m, w, hbar = params.m, params.omega, params.hbar
    Q = np.asarray(Q, dtype=float)
    z = complex(z)
    rot = np.exp(1j * w * t)
    expo = (
        -m * w * Q**2 / (2 * hbar)
        + 2 * z * Q * rot * np.sqrt(m * w / (2 * hbar))
        - 0.5 * z**2 * rot**2
        - 0.5 * abs(z) ** 2
        + 0.5j * w * t
    )
    return (m * w / (np.pi * hbar)) ** 0.25 * np.exp(expo)


def coherent_cutoff(params: SystemParams, z: complex, threshold: float = 1e-14, n_cap: int = 170) -> int:
    """Number of terms kept in the number-basis sum: stop once a term bound drops below ``threshold``."""
    r = abs(z)
    peak = (params.m * params.omega / (np.pi * params.hbar)) ** 0.25
    log_c = -0.5 * r**2
    for n in range(n_cap):
        if n > 0:
            log_c += math.log(r) - 0.5 * math.log(n) if r > 0 else -math.inf
        if n >= r**2 and peak * math.exp(log_c) < threshold:
            return n
    return n_cap


def coherent_number_sum(params: SystemParams, Q, z: complex, t: float, threshold: float = 1e-14):
    """Oracle: sum over n of <Q;t|n> <n|z>, with <n|z> = exp(-|z|^2/2) z^n / sqrt(n!)."""
    _require_harmonic(params)
    z = complex(z)
    total = np.zeros(np.shape(Q), dtype=complex)
    for n in range(coherent_cutoff(params, z, threshold)):
        coeff = np.exp(-0.5 * abs(z) ** 2) * z**n / math.sqrt(math.factorial(n))
        total = total + moving_number_state(params, Q, n, t) * coeff
    return total


def ho_eigenfunction(params: SystemParams, q, n: int):
    """Normalized oscillator eigenfunction <q|n>, via the normalized Hermite-function recurrence."""
    _require_harmonic(params)
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    scale = np.sqrt(params.m * params.omega / params.hbar)
    q = np.asarray(q, dtype=float)
    return scale**0.5 * hermite_functions(int(n), scale * q)[int(n)]


# ---------------------------------------------------------------------------
# quadrature oracles


def number_state_quadrature(params: SystemParams, Q, n: int, t: float):
    """int dq conj(<q|Q;t>) <q|n>, the moving-frame number state by direct integration."""
    spec = KernelSpec(params, Representation.POSITION)
    check_time(spec, t)
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    ell = np.sqrt(params.hbar / (params.m * params.omega))
    extent = ell * (np.sqrt(2 * n + 1) + 12)
    a, b = chirp_rate(spec, t)
    max_freq = 2 * a * extent + b * float(np.max(np.abs(Q)))
    step = np.pi / (max_freq + 10.0 / ell)
    q = np.arange(-extent, extent + step / 2, step)
    K = kernel(spec, q[None, :], Q[:, None], t)
    return np.conj(K) @ ho_eigenfunction(params, q, n) * step


def momentum_state_quadrature(params: SystemParams, Q, p: float, t: float,
                              radius: float = 30.0, edge: float = 4.0):
    """int dq conj(<q|Q;t>) (2 pi hbar)^(-1/2) exp(i p q / hbar), windowed."""
    spec = KernelSpec(params, Representation.POSITION)
    check_time(spec, t)
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    a, b = chirp_rate(spec, t)
    half = radius + 7 * edge
    max_freq = 2 * a * half + b * float(np.max(np.abs(Q))) + abs(p) / params.hbar

    def integrand(q):
        plane = (2 * np.pi * params.hbar) ** -0.5 * np.exp(1j * p * q / params.hbar)
        return np.conj(kernel(spec, q[None, :], Q[:, None], t)) * plane[None, :]

    return windowed_integral(integrand, 0.0, radius, edge, max_freq)


def momentum_kernel_quadrature(params: SystemParams, q, P: float, t: float,
                               radius: float = 30.0, edge: float = 4.0):
    """int dQ <q|Q;t> (2 pi hbar)^(-1/2) exp(i P Q / hbar), windowed."""
    spec = KernelSpec(params, Representation.POSITION)
    check_time(spec, t)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    a, b = chirp_rate(spec, t)
    # stationary point of the Q phase; near a momentum-side caustic it drifts far out
    if params.is_harmonic:
        s, c = np.sin(params.omega * t), np.cos(params.omega * t)
        stationary = (params.m * params.omega * q - P * s) / (params.m * params.omega * c)
    else:
        stationary = q - P * t / params.m
    center = 0.5 * float(np.max(stationary) + np.min(stationary))
    # the window edges are only suppressed once the chirp has swept well past them
    radius = max(radius, 8.0 / (a * edge))
    half = radius + 7 * edge
    max_freq = 2 * a * (half + abs(center)) + b * float(np.max(np.abs(q))) + abs(P) / params.hbar

    def integrand(Q):
        plane = (2 * np.pi * params.hbar) ** -0.5 * np.exp(1j * P * Q / params.hbar)
        return kernel(spec, q[:, None], Q[None, :], t) * plane[None, :]

    return windowed_integral(integrand, center, radius, edge, max_freq)


def fourier_duality_check(params: SystemParams, t: float,
                          samples: Sequence[tuple[float, float]] | None = None,
                          tolerance: float = 1e-6) -> CheckReport:
    """Closed-form <q|P;t> against the Fourier transform of <q|Q;t> over Q."""
    with Timer() as timer:
        check_time(KernelSpec(params, Representation.MOMENTUM), t)
        if samples is None:
            samples = [(q, P) for q in (-1.0, 0.0, 0.5, 1.5) for P in (-1.0, 0.0, 1.0)]
        mspec = KernelSpec(params, Representation.MOMENTUM)
        worst = 0.0
        for q, P in samples:
            closed = kernel(mspec, q, P, t)
            quad = momentum_kernel_quadrature(params, q, P, t)[0]
            worst = max(worst, float(abs(closed - quad)))
    return make_report("fourier_duality", params, worst, tolerance, timer, t=repr(t), points=len(samples))


def momentum_state_check(params: SystemParams, t: float,
                         samples: Sequence[tuple[float, float]] | None = None,
                         tolerance: float = 1e-6) -> CheckReport:
    with Timer() as timer:
        if samples is None:
            samples = [(Q, p) for Q in (-1.0, 0.0, 0.7) for p in (-1.0, 0.5, 1.2)]
        worst = 0.0
        for Q, p in samples:
            quad = momentum_state_quadrature(params, Q, p, t)[0]
            worst = max(worst, float(abs(moving_momentum_state(params, Q, p, t) - quad)))
    return make_report("moving_momentum_state", params, worst, tolerance, timer, t=repr(t), points=len(samples))


def number_state_check(params: SystemParams, t: float, n_max: int = 10,
                       Q_samples: Sequence[float] | None = None,
                       tolerance: float = 1e-8) -> CheckReport:
    """Closed-form <Q;t|n> against the quadrature oracle for n = 0..n_max."""
    with Timer() as timer:
        if Q_samples is None:
            ell = np.sqrt(params.hbar / (params.m * params.omega))
            Q_samples = ell * np.linspace(-4.0, 4.0, 17)
        Q_samples = np.asarray(Q_samples, dtype=float)
        worst = 0.0
        for n in range(n_max + 1):
            closed = moving_number_state(params, Q_samples, n, t)
            quad = number_state_quadrature(params, Q_samples, n, t)
            worst = max(worst, float(np.max(np.abs(closed - quad))))
    return make_report("moving_number_state", params, worst, tolerance, timer,
                       t=repr(t), n_max=n_max, points=Q_samples.size)


def number_orthonormality_check(params: SystemParams, t: float, n_max: int = 10,
                                tolerance: float = 1e-8) -> CheckReport:
    """max |int conj(<Q;t|m>) <Q;t|n> dQ - delta_mn| for m, n <= n_max."""
    with Timer() as timer:
        ell = np.sqrt(params.hbar / (params.m * params.omega))
        extent = ell * (np.sqrt(2 * n_max + 1) + 12)
        Q = np.linspace(-extent, extent, 2001)
        h = Q[1] - Q[0]
        states = np.array([moving_number_state(params, Q, n, t) for n in range(n_max + 1)])
        gram = states.conj() @ states.T * h
        residual = float(np.max(np.abs(gram - np.eye(n_max + 1))))
    return make_report("number_orthonormality", params, residual, tolerance, timer, t=repr(t), n_max=n_max)


def coherent_state_check(params: SystemParams, t: float, z_values: Sequence[complex] | None = None,
                         Q_samples: Sequence[float] | None = None,
                         tolerance: float = 1e-6) -> CheckReport:
    """Closed-form coherent state against the truncated number-basis sum.

    The worst discrepancy and the z that produced it are recorded in the
    metadata, so a failing run is reproducible from the report alone.
    """
    with Timer() as timer:
        if z_values is None:
            z_values = [0.5, 1.0 + 0.5j, -0.7 + 1.1j, 2.0, 2.0 * np.exp(0.9j)]
        if Q_samples is None:
            ell = np.sqrt(params.hbar / (params.m * params.omega))
            Q_samples = ell * np.linspace(-4.0, 4.0, 17)
        Q_samples = np.asarray(Q_samples, dtype=float)
        worst, worst_z = 0.0, None
        for z in z_values:
            diff = np.max(np.abs(moving_coherent_state(params, Q_samples, z, t)
                                 - coherent_number_sum(params, Q_samples, z, t)))
            if diff >= worst:
                worst, worst_z = float(diff), complex(z)
    return make_report("moving_coherent_state", params, worst, tolerance, timer,
                       t=repr(t), worst_z=repr(worst_z), z_count=len(z_values))
