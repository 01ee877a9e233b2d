"""
Registry of named checks run by ``moving-picture verify``.

Each entry knows which module it exercises, the relation it verifies, which
systems it applies to, and whether it is evaluated once per requested time.
Runners return one or more ``CheckReport`` objects; the CLI handles ordering,
filtering of singular times and serialization.
"""

from __future__ import annotations

import warnings
import zlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import evolution as ev
from . import hamilton_jacobi as hj
from . import kernels as kn
from .hilbert import Grid, SystemParams, gaussian_packet, hamiltonian, momentum_operator, position_operator
from .report import CheckReport, Timer, make_report


@dataclass(frozen=True)
class Context:
    params: SystemParams
    grid: Grid
    seed: int = 0

    def rng(self, name: str) -> np.random.Generator:
        """Per-check PCG64 stream, independent of the order checks run in."""
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])


Runner = Callable[[Context, Optional[float]], list]
Guard = Callable[[Context, float], Optional[str]]


@dataclass(frozen=True)
class CheckDef:
    name: str
    module: str
    anchor: str
    run: Runner
    time_dependent: bool = True
    systems: tuple = ("free", "harmonic")
    guard: Optional[Guard] = None


def _position_window(*factors: float) -> Guard:
    def guard(ctx: Context, t: float) -> Optional[str]:
        spec = kn.KernelSpec(ctx.params, kn.Representation.POSITION)
        for f in factors:
            if not kn.DEFAULT_CONVENTION.allowed(spec, f * t):
                return f"t={t!r} outside the caustic window for position kernels"
        return None

    return guard


def _duality_window(ctx: Context, t: float) -> Optional[str]:
    reason = _position_window(1.0)(ctx, t)
    if reason:
        return reason
    if not kn.DEFAULT_CONVENTION.allowed(kn.KernelSpec(ctx.params, kn.Representation.MOMENTUM), t):
        return f"t={t!r} outside the caustic window for momentum kernels"
    return None


def _frame(ctx: Context, t: float) -> ev.MovingFrame:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return ev.make_frame(ctx.params, ctx.grid, t)


# ---------------------------------------------------------------------------
# hilbert


def _run_static_commutator(ctx, t):
    with Timer() as timer:
        states = ev.interior_gaussians(ctx.grid, hbar=ctx.params.hbar)
        worst = max(ev.static_commutator_residual(ctx.grid, psi, ctx.params.hbar) for psi in states)
    return [make_report("canonical_commutator", ctx.params, worst, 1e-6, timer, n=ctx.grid.n, states=len(states))]


def _run_hermiticity(ctx, t):
    with Timer() as timer:
        ops = {
            "q": position_operator(ctx.grid),
            "p": momentum_operator(ctx.grid, ctx.params.hbar),
            "H": hamiltonian(ctx.params, ctx.grid),
        }
        if t is not None:
            frame = _frame(ctx, t)
            ops["Q(t)"], ops["P(t)"] = frame.Qop, frame.Pop
        errs = {k: op.hermiticity_error() for k, op in ops.items()}
        worst = max(errs.values())
    return [make_report("hermiticity", ctx.params, worst, 1e-10, timer, t=repr(t), n=ctx.grid.n,
                        worst_operator=max(errs, key=errs.get))]


# ---------------------------------------------------------------------------
# evolution


def _run_unitarity(ctx, t):
    with Timer() as timer:
        T = _frame(ctx, t).T.mat
        residual = float(np.linalg.norm(T.conj().T @ T - np.eye(ctx.grid.n)))
    return [make_report("unitarity", ctx.params, residual, 1e-9, timer, t=repr(t), n=ctx.grid.n)]


def _run_group_law(ctx, t):
    with Timer() as timer:
        T1 = ev.evolution_operator(ctx.params, ctx.grid, t).mat
        T2 = ev.evolution_operator(ctx.params, ctx.grid, 2 * t).mat
        residual = float(np.max(np.abs(T1 @ T1 - T2)))
    return [make_report("group_law", ctx.params, residual, 1e-9, timer, t=repr(t), n=ctx.grid.n)]


def _run_closed_form(ctx, t):
    return [ev.closed_form_operator_check(_frame(ctx, t))]


def _run_commutator(ctx, t):
    return [ev.commutator_residual(_frame(ctx, t))]


def _run_base_eigen(ctx, t):
    return [ev.eigen_relation_check(_frame(ctx, t))]


def _run_khat_analytic(ctx, t):
    return [ev.transformed_hamiltonian_residual(ctx.params, ctx.grid, t, "analytic")]


def _run_khat_fd(ctx, t):
    coarse = ev.transformed_hamiltonian_residual(ctx.params, ctx.grid, t, "finite_difference", 1e-4)
    fine = ev.transformed_hamiltonian_residual(ctx.params, ctx.grid, t, "finite_difference", 5e-5)
    meta = dict(coarse.metadata, refinement_ratio=repr(coarse.residual / fine.residual if fine.residual else np.inf))
    return [CheckReport(coarse.check_name, coarse.system, coarse.params, coarse.residual, coarse.tolerance,
                        coarse.runtime_ms + fine.runtime_ms, meta)]


def _run_time_independence(ctx, t):
    center = 0.5 * (ctx.grid.q_min + ctx.grid.q_max)
    psi = gaussian_packet(ctx.grid, center, 0.5, 1.0, ctx.params.hbar)
    return [ev.time_independence_check(ctx.params, ctx.grid, psi, [t])]


# ---------------------------------------------------------------------------
# kernels


def _run_kernel_vs_evolution(ctx, t):
    return [kn.kernel_vs_evolution_check(kn.KernelSpec(ctx.params), ctx.grid, t)]


def _run_kernel_composition(ctx, t):
    return [kn.kernel_composition_check(kn.KernelSpec(ctx.params), ctx.grid, 0.5 * t, 0.5 * t)]


def _run_kernel_unitarity(ctx, t):
    return [kn.kernel_unitarity_check(kn.KernelSpec(ctx.params), ctx.grid, t)]


def _fd_step(ctx, t, momentum=False, base=1e-3, t_ref=0.8):
    # kernel phase rates grow like 1/tau^2 near a caustic, so shrink the step with tau
    p = ctx.params
    if momentum:
        if not p.is_harmonic:
            return base
        tau = abs(np.cos(p.omega * t)) / p.omega
    else:
        tau = abs(np.sin(p.omega * t)) / p.omega if p.is_harmonic else abs(t)
    tau *= p.hbar / p.m
    return float(base * min(1.0, (tau / t_ref) ** 2))


def _run_kernel_schrodinger(ctx, t):
    pts = [(1.0, 0.0, t), (0.5, -0.3, t), (-0.8, 0.4, t)]
    h = _fd_step(ctx, t)
    out = [kn.kernel_schrodinger_residual(kn.KernelSpec(ctx.params, kn.Representation.POSITION), pts,
                                          h_q=h, h_t=h)]
    mspec = kn.KernelSpec(ctx.params, kn.Representation.MOMENTUM)
    hm = _fd_step(ctx, t, momentum=True)
    if all(kn.DEFAULT_CONVENTION.allowed(mspec, tt) for tt in (t - hm, t, t + hm)):
        out.append(kn.kernel_schrodinger_residual(mspec, pts, h_q=hm, h_t=hm))
    return out


def _run_fourier_duality(ctx, t):
    return [kn.fourier_duality_check(ctx.params, t)]


def _run_momentum_state(ctx, t):
    return [kn.momentum_state_check(ctx.params, t)]


def _run_number_state(ctx, t):
    return [kn.number_state_check(ctx.params, t)]


def _run_number_orthonormality(ctx, t):
    return [kn.number_orthonormality_check(ctx.params, t)]


def _run_coherent(ctx, t):
    return [kn.coherent_state_check(ctx.params, t)]


# ---------------------------------------------------------------------------
# hamilton_jacobi


def _gfs(ctx):
    return [hj.generating(ctx.params, r) for r in ("qQ", "qP")]


def _run_hj(ctx, t):
    return [hj.hj_residual_check(W, 1000, ctx.seed) for W in _gfs(ctx)]


def _action_times(W):
    w = W.params.omega or 1.0
    return [0.8 / w, 1.2 / w] if W.representation is hj.GFRepresentation.QQ or not W.params.is_harmonic \
        else [0.5 / w, 0.8 / w]


def _run_f_function(ctx, t):
    return [hj.f_function_check(W, _action_times(W)) for W in _gfs(ctx)]


def _run_schrodinger_action(ctx, t):
    out = []
    for W in _gfs(ctx):
        pts = [(q, tt) for q in (-1.0, 0.5, 1.0) for tt in _action_times(W)]
        out.append(hj.se_residual_check(hj.quantum_action(W, 0.0), pts))
        out.append(hj.se_residual_check(hj.quantum_action(W, -0.3), pts))
    return out


def _run_proportionality(ctx, t):
    out = []
    for W in _gfs(ctx):
        pts = hj.random_domain_points(W, 50, ctx.rng("kernel_proportionality_" + W.label), margin=0.4)
        out.append(hj.proportionality_check(W, pts))
    return out


def _run_legendre(ctx, t):
    W2 = hj.generating(ctx.params, "qP")
    pts = hj.random_domain_points(W2, 100, ctx.rng("legendre_transform"), margin=0.4)
    if ctx.params.is_harmonic:
        # keep away from omega t = pi/2, where the Q-Hessian of the type-1 function vanishes
        pts = pts[np.abs(np.cos(ctx.params.omega * pts[:, 2])) > 0.2]
        pts = pts[np.abs(np.sin(ctx.params.omega * pts[:, 2])) > 0.2]
    return [hj.legendre_transform_check(ctx.params, pts)]


def _run_canonical(ctx, t):
    W = hj.generating(ctx.params, "qQ")
    return [hj.canonical_derivative_check(ctx.params, hj.random_domain_points(W, 100, ctx.rng("canonical_derivative")))]


def _run_frame_constancy(ctx, t):
    return [hj.frame_constancy_check(ctx.params, [(1.0, 0.0), (0.0, 1.0), (0.3, -1.2)])]


def _run_action_angle(ctx, t):
    rng = ctx.rng("action_angle")
    q = rng.uniform(-2, 2, 100)
    p = rng.choice([-1.0, 1.0], 100) * rng.uniform(0.1, 2.0, 100)
    return [hj.action_angle_check(ctx.params, zip(q, p)), hj.action_angle_orbit_check(ctx.params)]


# ---------------------------------------------------------------------------

_ALL = [
    CheckDef("canonical_commutator", "hilbert", "<psi|[q,p]|psi> = i hbar on smooth interior states",
             _run_static_commutator, time_dependent=False),
    CheckDef("hermiticity", "hilbert", "q, p, H, Q(t) = T q T^dagger, P(t) = T p T^dagger are Hermitian",
             _run_hermiticity),
    CheckDef("unitarity", "evolution", "T(t) = exp(-i H t / hbar) is unitary", _run_unitarity),
    CheckDef("group_law", "evolution", "T(t) T(t) = T(2t) for a time-independent H", _run_group_law),
    CheckDef("closed_form_operators", "evolution",
             "T q T^dagger = q - (t/m) p (free); q cos wt - (p/m w) sin wt (oscillator)", _run_closed_form),
    CheckDef("commutator", "evolution", "[Q(t), P(t)] = i hbar is preserved by the unitary frame",
             _run_commutator),
    CheckDef("moving_base_eigen", "evolution", "Q(t)|Q;t> = Q|Q;t> with |Q;t> = T(t)|Q>", _run_base_eigen),
    CheckDef("transformed_hamiltonian_analytic", "evolution",
             "K(t) = T^dagger H T + i hbar (dT^dagger/dt) T vanishes identically", _run_khat_analytic),
    CheckDef("transformed_hamiltonian_finite_difference", "evolution",
             "K(t) vanishes with dT^dagger/dt from central differences of exp(-i H t / hbar)", _run_khat_fd),
    CheckDef("time_independence", "evolution", "<Q;t|psi;t>_S = <Q|psi>_H does not depend on t",
             _run_time_independence),
    CheckDef("kernel_vs_evolution", "kernels", "transformation function <q|Q;t> equals the propagator <q|T(t)|Q>",
             _run_kernel_vs_evolution, guard=_position_window(1.0)),
    CheckDef("kernel_composition", "kernels", "K(t1 + t2) = K(t1) * K(t2) (semigroup of T)",
             _run_kernel_composition, guard=_position_window(0.5, 1.0)),
    CheckDef("kernel_unitarity", "kernels", "the kernel preserves inner products of wave packets",
             _run_kernel_unitarity, guard=_position_window(1.0)),
    CheckDef("kernel_schrodinger", "kernels", "closed-form kernels solve i hbar dK/dt = H K",
             _run_kernel_schrodinger, guard=_position_window(1.0)),
    CheckDef("fourier_duality", "kernels", "<q|P;t> = int dQ <q|Q;t> exp(i P Q / hbar) / sqrt(2 pi hbar)",
             _run_fourier_duality, guard=_duality_window),
    CheckDef("moving_momentum_state", "kernels", "<Q;t|p> = exp(i Q p / hbar + i p^2 t / 2 m hbar) / sqrt(2 pi hbar)",
             _run_momentum_state, systems=("free",), guard=_position_window(1.0)),
    CheckDef("moving_number_state", "kernels", "<Q;t|n> = exp(i (n + 1/2) w t) <Q|n>, Hermite closed form",
             _run_number_state, systems=("harmonic",), guard=_position_window(1.0)),
    CheckDef("number_orthonormality", "kernels", "moving-frame number states stay orthonormal",
             _run_number_orthonormality, systems=("harmonic",)),
    CheckDef("moving_coherent_state", "kernels", "<Q;t|z> closed form equals sum_n <Q;t|n><n|z>",
             _run_coherent, systems=("harmonic",)),
    CheckDef("hj_residual", "hamilton_jacobi", "(1/2m)(dW/dq)^2 + V + dW/dt = 0 for all generating functions",
             _run_hj, time_dependent=False),
    CheckDef("f_function", "hamilton_jacobi", "F = (1/2m) d2S/dq2 = d/dt ln sqrt(t | sin wt | cos wt)",
             _run_f_function, time_dependent=False),
    CheckDef("schrodinger_action", "hamilton_jacobi", "psi = exp(i S / hbar), S = W + i hbar int F dt, solves the Schrodinger equation",
             _run_schrodinger_action, time_dependent=False),
    CheckDef("kernel_proportionality", "hamilton_jacobi", "exp(i S / hbar) equals the kernel up to a constant",
             _run_proportionality, time_dependent=False),
    CheckDef("legendre_transform", "hamilton_jacobi", "W(q,P,t) = W(q,Q,t) + Q P with P = -dW/dQ",
             _run_legendre, time_dependent=False),
    CheckDef("canonical_derivative", "hamilton_jacobi", "p = dW/dq, P = -dW/dQ reproduce the frame's (Q, P)",
             _run_canonical, time_dependent=False),
    CheckDef("frame_constancy", "hamilton_jacobi", "(Q, P) are constants of the classical motion",
             _run_frame_constancy, time_dependent=False),
    CheckDef("action_angle", "hamilton_jacobi", "arctan angle and energy form a canonical pair, {Q, P} = 1",
             _run_action_angle, time_dependent=False, systems=("harmonic",)),
]

REGISTRY: dict[str, CheckDef] = {c.name: c for c in _ALL}
MODULES = ("hilbert", "evolution", "kernels", "hamilton_jacobi")


def list_checks(module: Optional[str] = None) -> list[CheckDef]:
    return [c for c in _ALL if module is None or c.module == module]
