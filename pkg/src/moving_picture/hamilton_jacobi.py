"""
Classical side: type-1 and type-2 generating functions of the free particle
and oscillator, their Hamilton-Jacobi residuals, the quantum action
S = W + i hbar * integral(F dt) with F = (1/2m) d2W/dq2, Legendre elimination,
classical trajectories and the action-angle map of the oscillator.

Sign convention for the type-1 function W(q, Q, t): p = dW/dq, P = -dW/dQ.
For the type-2 function W(q, P, t) = W(q, Q, t) + Q P the second partial is
dW/dP = Q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import root_scalar

from .errors import DomainError, SingularTimeError
from .hilbert import System, SystemParams
from .report import CheckReport, Timer, make_report

SINGULAR_TOL = 1e-9


class GFRepresentation(str, enum.Enum):
    QQ = "qQ"
    QP = "qP"


@dataclass(frozen=True)
class GeneratingFunction:
    """W(q, x, t) with x = Q (type 1) or x = P (type 2), plus analytic partials."""

    params: SystemParams
    representation: GFRepresentation = GFRepresentation.QQ

    def __post_init__(self):
        object.__setattr__(self, "representation", GFRepresentation(self.representation))

    @property
    def label(self) -> str:
        return f"{self.params.system.value}_{self.representation.value}"

    def _trig(self, t):
        w = self.params.omega
        return np.sin(w * t), np.cos(w * t)

    def in_domain(self, t: float) -> bool:
        if self.params.is_harmonic:
            s, c = self._trig(t)
            return abs(s if self.representation is GFRepresentation.QQ else c) > SINGULAR_TOL
        return self.representation is GFRepresentation.QP or abs(t) > SINGULAR_TOL

    def _check(self, t) -> None:
        if not np.all([self.in_domain(tt) for tt in np.atleast_1d(t)]):
            raise SingularTimeError(f"{self.label} generating function is singular at t={t!r}")

    def W(self, q, x, t):
        self._check(t)
        m = self.params.m
        if self.params.is_harmonic:
            w = self.params.omega
            s, c = self._trig(t)
            if self.representation is GFRepresentation.QQ:
                return (m * w / s) * (0.5 * (q**2 + x**2) * c - q * x)
            return q * x / c - (0.5 * m * w**2 * q**2 + x**2 / (2 * m)) * np.tan(w * t) / w
        if self.representation is GFRepresentation.QQ:
            return m * (q - x) ** 2 / (2 * t)
        return q * x - x**2 * t / (2 * m)

    def dW_dq(self, q, x, t):
        self._check(t)
        m = self.params.m
        if self.params.is_harmonic:
            w = self.params.omega
            s, c = self._trig(t)
            if self.representation is GFRepresentation.QQ:
                return (m * w / s) * (q * c - x)
            return x / c - m * w * q * np.tan(w * t)
        if self.representation is GFRepresentation.QQ:
            return m * (q - x) / t
        return x + 0.0 * q

    def dW_dx(self, q, x, t):
        self._check(t)
        m = self.params.m
        if self.params.is_harmonic:
            w = self.params.omega
            s, c = self._trig(t)
            if self.representation is GFRepresentation.QQ:
                return (m * w / s) * (x * c - q)
            return q / c - x * np.tan(w * t) / (m * w)
        if self.representation is GFRepresentation.QQ:
            return -m * (q - x) / t
        return q - x * t / m

    def dW_dt(self, q, x, t):
        self._check(t)
        m = self.params.m
        if self.params.is_harmonic:
            w = self.params.omega
            s, c = self._trig(t)
            if self.representation is GFRepresentation.QQ:
                return (m * w**2 / s**2) * (q * x * c - 0.5 * (q**2 + x**2))
            return (q * x * w * s - (0.5 * m * w**2 * q**2 + x**2 / (2 * m))) / c**2
        if self.representation is GFRepresentation.QQ:
            return -m * (q - x) ** 2 / (2 * t**2)
        return -(x**2) / (2 * m) + 0.0 * q

    def d2W_dq2(self, t):
        """Second q-derivative; q- and x-independent for every built-in W."""
        self._check(t)
        m = self.params.m
        if self.params.is_harmonic:
            w = self.params.omega
            s, c = self._trig(t)
            if self.representation is GFRepresentation.QQ:
                return m * w * c / s
            return -m * w * np.tan(w * t)
        if self.representation is GFRepresentation.QQ:
            return m / t
        return 0.0 * t


def generating(params: SystemParams, representation="qQ") -> GeneratingFunction:
    return GeneratingFunction(params, GFRepresentation(representation))


def all_generating_functions(params_free: SystemParams | None = None,
                             params_harmonic: SystemParams | None = None) -> list[GeneratingFunction]:
    pf = params_free or SystemParams.free()
    ph = params_harmonic or SystemParams.harmonic()
    return [generating(p, r) for p in (pf, ph) for r in ("qQ", "qP")]


def hj_residual(W: GeneratingFunction, q, x, t):
    """(1/2m)(dW/dq)^2 + V(q) + dW/dt, zero for a solution of the Hamilton-Jacobi equation."""
    p = W.params
    return W.dW_dq(q, x, t) ** 2 / (2 * p.m) + p.potential(q) + W.dW_dt(q, x, t)


def central_difference(f: Callable, x, h: float, order: int = 1):
    if order == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if order == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
    raise ValueError("order must be 1 or 2")


def partials_fd_error(W: GeneratingFunction, q: float, x: float, t: float,
                      h: float = 1e-4, h2: float = 1e-3) -> float:
    """Largest relative gap between the analytic partials and central differences."""
    pairs = [
        (W.dW_dq(q, x, t), central_difference(lambda v: W.W(v, x, t), q, h)),
        (W.dW_dx(q, x, t), central_difference(lambda v: W.W(q, v, t), x, h)),
        (W.dW_dt(q, x, t), central_difference(lambda v: W.W(q, x, v), t, h)),
        (W.d2W_dq2(t), central_difference(lambda v: W.W(v, x, t), q, h2, order=2)),
    ]
    return max(abs(a - b) / max(1.0, abs(a)) for a, b in pairs)


# ---------------------------------------------------------------------------
# quantum action


def f_function(W: GeneratingFunction) -> Callable[[float], float]:
    """F(t) = (1/2m) d2W/dq2 as a function of t alone."""
    _require_quadratic(W)

    def F(t):
        return W.d2W_dq2(t) / (2 * W.params.m)

    return F


def _require_quadratic(W: GeneratingFunction, t_probe: float | None = None) -> None:
    if t_probe is None:
        t_probe = 0.37 / (W.params.omega or 1.0)
    third = [
        central_difference(lambda v: W.W(v, 0.3, t_probe), q0, 1e-2, order=2) for q0 in (-1.0, 0.0, 1.3)
    ]
    scale = max(1.0, max(abs(v) for v in third))
    if max(third) - min(third) > 1e-6 * scale:
        raise DomainError("W is not quadratic in q; F would depend on q")


def f_integral(W: GeneratingFunction, t) -> complex:
    """Closed-form antiderivative of F: ln sqrt(t), ln sqrt(sin wt), ln sqrt(cos wt), or 0.

    Principal complex logarithm where the argument is negative.
    """
    W._check(t)
    p = W.params
    if p.is_harmonic:
        s, c = W._trig(t)
        arg = s if W.representation is GFRepresentation.QQ else c
        return 0.5 * np.log(np.asarray(arg, dtype=complex))
    if W.representation is GFRepresentation.QQ:
        return 0.5 * np.log(np.asarray(t, dtype=complex))
    return 0.0 * np.asarray(t, dtype=complex)


@dataclass(frozen=True)
class QuantumAction:
    """S(q, t) = W(q, x, t) + i hbar * integral(F dt) at fixed x (= Q or P)."""

    base: GeneratingFunction
    x: float = 0.0

    def F(self, t):
        return f_function(self.base)(t)

    def S(self, q, t):
        return self.base.W(q, self.x, t) + 1j * self.base.params.hbar * f_integral(self.base, t)


def quantum_action(W: GeneratingFunction, x: float = 0.0) -> QuantumAction:
    _require_quadratic(W)
    return QuantumAction(W, float(x))


def semiclassical_wavefunction(action: QuantumAction, q, t):
    """psi(q, t) = exp(i S / hbar)."""
    return np.exp(1j * action.S(q, t) / action.base.params.hbar)


def se_residual(action: QuantumAction, q: float, t: float, h: float = 1e-3) -> float:
    """|i hbar dpsi/dt - H psi| / |psi| by central differences in q and t."""
    p = action.base.params
    psi = semiclassical_wavefunction(action, q, t)
    dpsi_dt = central_difference(lambda v: semiclassical_wavefunction(action, q, v), t, h)
    d2psi = central_difference(lambda v: semiclassical_wavefunction(action, v, t), q, h, order=2)
    res = 1j * p.hbar * dpsi_dt + p.hbar**2 / (2 * p.m) * d2psi - p.potential(q) * psi
    return float(abs(res) / abs(psi))


def se_residual_check(action: QuantumAction, sample_points: Iterable[Sequence[float]],
                      h: float = 1e-3, tolerance: float = 1e-5) -> CheckReport:
    """Maximum relative Schrodinger residual over (q, t) points, plus the h -> h/2 ratio."""
    with Timer() as timer:
        points = [tuple(map(float, pt)) for pt in sample_points]
        coarse = max(se_residual(action, q, t, h) for q, t in points)
        fine = max(se_residual(action, q, t, h / 2) for q, t in points)
    return make_report(f"schrodinger_{action.base.label}", action.base.params, coarse, tolerance, timer,
                       h=repr(h), x=repr(action.x), refinement_ratio=repr(coarse / fine if fine else np.inf),
                       points=len(points))


def kernel_ratio(action: QuantumAction, q, t):
    """psi / closed-form kernel at the same arguments."""
    from .kernels import KernelSpec, Representation, kernel

    rep = Representation.POSITION if action.base.representation is GFRepresentation.QQ else Representation.MOMENTUM
    K = kernel(KernelSpec(action.base.params, rep), q, action.x, t)
    return semiclassical_wavefunction(action, q, t) / K


def proportionality_check(W: GeneratingFunction, sample_points: Iterable[Sequence[float]],
                          tolerance: float = 1e-8) -> CheckReport:
    """psi / kernel is one constant over all sampled (q, x, t); the constant goes in the metadata."""
    with Timer() as timer:
        points = [tuple(map(float, pt)) for pt in sample_points]
        ratios = np.array([kernel_ratio(QuantumAction(W, x), q, t) for q, x, t in points])
        c = ratios[0]
        residual = float(np.max(np.abs(ratios - c)) / abs(c))
    return make_report(f"kernel_proportionality_{W.label}", W.params, residual, tolerance, timer,
                       constant=repr(complex(c)), points=len(points))


# ---------------------------------------------------------------------------
# canonical maps


def _solve_affine(f: Callable[[float], float], target: float) -> float:
    sol = root_scalar(lambda v: f(v) - target, x0=0.0, x1=1.0, method="secant", xtol=1e-15, rtol=1e-15)
    return float(sol.root)


def legendre_eliminate(W: GeneratingFunction, q: float, P: float, t: float) -> tuple[float, float]:
    """Solve P = -dW/dQ for Q* and return (Q*, W(q, Q*, t) + Q* P)."""
    if W.representation is not GFRepresentation.QQ:
        raise ValueError("Legendre elimination starts from the type-1 function")
    hess = central_difference(lambda v: W.dW_dx(q, v, t), 0.0, 1e-3)
    if abs(hess) < 1e-8:
        raise DomainError(f"degenerate Hessian d2W/dQ2={hess:.3e} at t={t!r}")
    Qs = _solve_affine(lambda v: -W.dW_dx(q, v, t), P)
    return Qs, float(W.W(q, Qs, t) + Qs * P)


def legendre_transform_check(params: SystemParams, sample_points: Iterable[Sequence[float]],
                             tolerance: float = 1e-10) -> CheckReport:
    """W(q, Q*, t) + Q* P against the closed-form type-2 W(q, P, t)."""
    with Timer() as timer:
        W1, W2 = generating(params, "qQ"), generating(params, "qP")
        points = [tuple(map(float, pt)) for pt in sample_points]
        worst = 0.0
        for q, P, t in points:
            _, value = legendre_eliminate(W1, q, P, t)
            worst = max(worst, abs(value - W2.W(q, P, t)))
    return make_report("legendre_transform", params, worst, tolerance, timer, points=len(points))


def transformed_coordinates(params: SystemParams, q, p, t):
    """Closed-form (Q, P) of the moving frame: free Galilean shift or phase-space rotation."""
    m = params.m
    if params.is_harmonic:
        w = params.omega
        s, c = np.sin(w * t), np.cos(w * t)
        return q * c - p * s / (m * w), m * w * q * s + p * c
    return q - t * p / m, p + 0.0 * q


def canonical_from_generating(W: GeneratingFunction, q: float, p: float, t: float) -> tuple[float, float]:
    """(Q, P) obtained from p = dW/dq and P = -dW/dQ."""
    if W.representation is not GFRepresentation.QQ:
        raise ValueError("uses the type-1 function")
    Q = _solve_affine(lambda v: W.dW_dq(q, v, t), p)
    return Q, float(-W.dW_dx(q, Q, t))


def canonical_derivative_check(params: SystemParams, sample_points: Iterable[Sequence[float]],
                               tolerance: float = 1e-10) -> CheckReport:
    with Timer() as timer:
        W = generating(params, "qQ")
        points = [tuple(map(float, pt)) for pt in sample_points]
        worst = 0.0
        for q, p, t in points:
            Q, P = canonical_from_generating(W, q, p, t)
            Qc, Pc = transformed_coordinates(params, q, p, t)
            worst = max(worst, abs(Q - Qc), abs(P - Pc))
    return make_report("canonical_derivative", params, worst, tolerance, timer, points=len(points))


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float
    t: float


def classical_trajectory(params: SystemParams, q0: float, p0: float, t: float) -> PhasePoint:
    m = params.m
    if params.is_harmonic:
        w = params.omega
        s, c = np.sin(w * t), np.cos(w * t)
        return PhasePoint(q0 * c + p0 * s / (m * w), p0 * c - m * w * q0 * s, t)
    return PhasePoint(q0 + p0 * t / m, p0, t)


def _vector_field(params: SystemParams):
    m = params.m
    k = m * params.omega**2 if params.is_harmonic else 0.0

    def f(y):
        return np.array([y[1] / m, -k * y[0]])

    return f


def integrate_trajectory(params: SystemParams, q0: float, p0: float, t_final: float,
                         step: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Classical RK4 with fixed step; returns (times, states[:, (q, p)])."""
    f = _vector_field(params)
    n = max(1, int(round(abs(t_final) / step)))
    h = t_final / n
    ys = np.empty((n + 1, 2))
    ys[0] = (q0, p0)
    y = ys[0].copy()
    for i in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    return np.linspace(0.0, t_final, n + 1), ys


def energy(params: SystemParams, q, p):
    return p**2 / (2 * params.m) + params.potential(q)


def frame_constancy_check(params: SystemParams, trajectory_samples: Iterable[Sequence[float]],
                          t_final: float = 2 * np.pi, step: float = 1e-3,
                          tolerance: float = 1e-8) -> CheckReport:
    """(Q, P) of the moving frame stay at (q0, p0) along analytic and integrated orbits."""
    with Timer() as timer:
        samples = [tuple(map(float, s)) for s in trajectory_samples]
        analytic = integrated = drift = 0.0
        for q0, p0 in samples:
            times, ys = integrate_trajectory(params, q0, p0, t_final, step)
            for t, (q, p) in zip(times[::50], ys[::50]):
                pt = classical_trajectory(params, q0, p0, t)
                Qa, Pa = transformed_coordinates(params, pt.q, pt.p, t)
                Qi, Pi = transformed_coordinates(params, q, p, t)
                analytic = max(analytic, abs(Qa - q0), abs(Pa - p0))
                integrated = max(integrated, abs(Qi - q0), abs(Pi - p0))
            e0 = energy(params, q0, p0)
            e = energy(params, ys[:, 0], ys[:, 1])
            drift = max(drift, float(np.max(np.abs(e - e0)) / max(abs(e0), 1e-300)))
        residual = max(analytic, integrated)
    return make_report("frame_constancy", params, residual, tolerance, timer,
                       analytic=repr(float(analytic)), integrated=repr(float(integrated)), energy_drift=repr(float(drift)),
                       step=repr(step), t_final=repr(t_final), orbits=len(samples))


# ---------------------------------------------------------------------------
# action-angle map of the oscillator


def action_angle(params: SystemParams, q, p, t):
    """Q = arctan(m w q / p) / w - t,  P = p^2/2m + m w^2 q^2 / 2."""
    _require_harmonic(params)
    m, w = params.m, params.omega
    return np.arctan(m * w * q / p) / w - t, p**2 / (2 * m) + 0.5 * m * w**2 * q**2


def _require_harmonic(params: SystemParams) -> None:
    if not params.is_harmonic:
        raise DomainError("the action-angle map is defined for the oscillator")


def poisson_bracket(f: Callable, g: Callable, q: float, p: float, h: float = 1e-5) -> float:
    """{f, g} = df/dq dg/dp - df/dp dg/dq by central differences."""
    fq = central_difference(lambda v: f(v, p), q, h)
    fp = central_difference(lambda v: f(q, v), p, h)
    gq = central_difference(lambda v: g(v, p), q, h)
    gp = central_difference(lambda v: g(q, v), p, h)
    return fq * gp - fp * gq


def action_angle_orbit_deviation(params: SystemParams, q0: float, p0: float, t_final: float,
                                 step: float = 1e-3) -> float:
    """Largest drift of (Q, P) along an integrated orbit; the angle uses atan2 unwrapped in time."""
    _require_harmonic(params)
    m, w = params.m, params.omega
    times, ys = integrate_trajectory(params, q0, p0, t_final, step)
    angle = np.unwrap(np.arctan2(m * w * ys[:, 0], ys[:, 1])) / w
    Q = angle - times
    P = energy(params, ys[:, 0], ys[:, 1])
    return float(max(np.max(np.abs(Q - Q[0])), np.max(np.abs(P - P[0]))))


def action_angle_check(params: SystemParams, sample_points: Iterable[Sequence[float]],
                       h: float = 1e-5, p_min: float = 0.1, tolerance: float = 1e-6) -> CheckReport:
    """max |{Q, P} - 1| over points with |p| >= p_min; points closer to p = 0 are skipped and counted."""
    _require_harmonic(params)
    with Timer() as timer:
        points = [tuple(map(float, pt)) for pt in sample_points]
        kept = [(q, p) for q, p in points if abs(p) >= p_min]

        def Qf(q, p):
            return action_angle(params, q, p, 0.0)[0]

        def Pf(q, p):
            return action_angle(params, q, p, 0.0)[1]

        residual = max((abs(poisson_bracket(Qf, Pf, q, p, h) - 1.0) for q, p in kept), default=0.0)
    return make_report("action_angle_bracket", params, residual, tolerance, timer,
                       points=len(kept), skipped_p_near_zero=len(points) - len(kept), h=repr(h))


def action_angle_orbit_check(params: SystemParams,
                             orbits: Sequence[tuple[float, float]] = ((1.0, 0.0), (0.3, -1.2)),
                             step: float = 1e-3, tolerance: float = 1e-8) -> CheckReport:
    """Action-angle (Q, P) constant along integrated orbits over one period."""
    _require_harmonic(params)
    with Timer() as timer:
        period = 2 * np.pi / params.omega
        residual = max(action_angle_orbit_deviation(params, q0, p0, period, step) for q0, p0 in orbits)
    return make_report("action_angle_orbit", params, residual, tolerance, timer,
                       step=repr(step), orbits=len(orbits))


# ---------------------------------------------------------------------------
# sampling helpers


def random_domain_points(W: GeneratingFunction, count: int, rng: np.random.Generator,
                         spread: float = 2.0, margin: float = 0.3) -> np.ndarray:
    """(q, x, t) rows drawn uniformly, t kept ``margin`` (in omega t) away from singular times."""
    q = rng.uniform(-spread, spread, count)
    x = rng.uniform(-spread, spread, count)
    if W.params.is_harmonic:
        w = W.params.omega
        if W.representation is GFRepresentation.QQ:
            wt = rng.uniform(margin, np.pi - margin, count)
        else:
            wt = rng.uniform(-np.pi / 2 + margin, np.pi / 2 - margin, count)
        t = wt / w
    else:
        t = rng.uniform(margin, 2.0, count)
    return np.column_stack([q, x, t])


def hj_residual_check(W: GeneratingFunction, count: int = 1000, seed: int = 0,
                      tolerance: float = 1e-12) -> CheckReport:
    with Timer() as timer:
        pts = random_domain_points(W, count, np.random.default_rng(seed))
        res = hj_residual(W, pts[:, 0], pts[:, 1], pts[:, 2])
        residual = float(np.max(np.abs(res)))
    return make_report(f"hj_residual_{W.label}", W.params, residual, tolerance, timer,
                       points=count, seed=seed)


def f_function_check(W: GeneratingFunction, times: Iterable[float], h: float = 1e-3,
                     tolerance: float = 1e-8) -> CheckReport:
    """Analytic F(t) against (1/2m) times a central second difference of W in q."""
    with Timer() as timer:
        F = f_function(W)
        worst = 0.0
        for t in times:
            fd = central_difference(lambda v: W.W(v, 0.4, t), 0.7, h, order=2) / (2 * W.params.m)
            worst = max(worst, abs(F(t) - fd))
            # F is d/dt of the closed-form integral
            dI = central_difference(lambda v: f_integral(W, v), t, 1e-5)
            worst = max(worst, abs(dI - F(t)))
    return make_report(f"f_function_{W.label}", W.params, worst, tolerance, timer, h=repr(h))


__all__ = [
    "GFRepresentation",
    "GeneratingFunction",
    "QuantumAction",
    "PhasePoint",
    "System",
    "generating",
    "all_generating_functions",
    "hj_residual",
    "hj_residual_check",
    "partials_fd_error",
    "f_function",
    "f_integral",
    "f_function_check",
    "quantum_action",
    "semiclassical_wavefunction",
    "se_residual",
    "se_residual_check",
    "kernel_ratio",
    "proportionality_check",
    "legendre_eliminate",
    "legendre_transform_check",
    "transformed_coordinates",
    "canonical_from_generating",
    "canonical_derivative_check",
    "classical_trajectory",
    "integrate_trajectory",
    "energy",
    "frame_constancy_check",
    "action_angle",
    "poisson_bracket",
    "action_angle_orbit_deviation",
    "action_angle_check",
    "action_angle_orbit_check",
    "random_domain_points",
]
