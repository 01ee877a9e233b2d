"""
Moving frames: the evolution operator T(t) = exp(-i H t / hbar), the
transformed operators Q(t) = T q T^dagger and P(t) = T p T^dagger, the
moving base kets |Q;t> = T(t)|Q>, and the numerical checks that go with them.

Operator identities are compared on an "interior subspace": a set of states
localized well inside the box in both position and wavenumber, where the
finite spectral discretization reproduces continuum algebra to round-off.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .hilbert import (
    DenseOperator,
    Grid,
    SystemParams,
    WaveFunction,
    apply,
    commutator,
    delta_state,
    expectation,
    gaussian_packet,
    hamiltonian,
    hermitian_eigh,
    momentum_operator,
    position_operator,
    unitary_from_eigh,
)
from .report import CheckReport, Timer, make_report
from .special import hermite_functions

INTERIOR_FRACTION = 0.6
CAUSTIC_WARN = 1e-6


@lru_cache(maxsize=16)
def eigensystem(params: SystemParams, grid: Grid):
    """Cached eigenpairs of the discretized Hamiltonian (read-only arrays)."""
    evals, evecs = hermitian_eigh(hamiltonian(params, grid))
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def evolution_operator(params: SystemParams, grid: Grid, t: float) -> DenseOperator:
    evals, evecs = eigensystem(params, grid)
    return DenseOperator(grid, unitary_from_eigh(evals, evecs, t / params.hbar))


def evolve(params: SystemParams, psi: WaveFunction, t: float) -> WaveFunction:
    """T(t) psi without forming the dense propagator."""
    evals, evecs = eigensystem(params, psi.grid)
    coeff = evecs.conj().T @ psi.amp
    return WaveFunction(psi.grid, evecs @ (np.exp(-1j * evals * t / params.hbar) * coeff))


def near_caustic(params: SystemParams, t: float) -> bool:
    return params.is_harmonic and abs(np.sin(params.omega * t)) < CAUSTIC_WARN


@dataclass(frozen=True, eq=False)
class MovingFrame:
    """Frame at time t.  ``Qop`` and ``Pop`` are built on first access."""

    params: SystemParams
    grid: Grid
    t: float
    T: DenseOperator

    @cached_property
    def Tdag(self) -> DenseOperator:
        return DenseOperator(self.grid, self.T.mat.conj().T)

    def _transform(self, op: DenseOperator) -> DenseOperator:
        T = self.T.mat
        mat = T @ op.action @ T.conj().T
        return DenseOperator(self.grid, 0.5 * (mat + mat.conj().T))

    @cached_property
    def Qop(self) -> DenseOperator:
        return self._transform(position_operator(self.grid))

    @cached_property
    def Pop(self) -> DenseOperator:
        return self._transform(momentum_operator(self.grid, self.params.hbar))


def make_frame(params: SystemParams, grid: Grid, t: float) -> MovingFrame:
    t = float(t)
    if near_caustic(params, t):
        warnings.warn(
            f"omega*t={params.omega * t:.6g} is near a caustic; kernel comparisons are skipped there",
            RuntimeWarning,
            stacklevel=2,
        )
    return MovingFrame(params, grid, t, evolution_operator(params, grid, t))


def closed_form_Q(params: SystemParams, grid: Grid, t: float) -> np.ndarray:
    """Action matrix of q - (t/m) p, or q cos wt - p sin wt / (m w)."""
    q = position_operator(grid).action
    p = momentum_operator(grid, params.hbar).action
    if params.is_harmonic:
        w = params.omega
        return q * np.cos(w * t) - p * np.sin(w * t) / (params.m * w)
    return q - (t / params.m) * p


def closed_form_P(params: SystemParams, grid: Grid, t: float) -> np.ndarray:
    """Action matrix of p, or m w q sin wt + p cos wt."""
    q = position_operator(grid).action
    p = momentum_operator(grid, params.hbar).action
    if params.is_harmonic:
        w = params.omega
        return params.m * w * q * np.sin(w * t) + p * np.cos(w * t)
    return p.copy()


def _half_width(grid: Grid, center: float) -> float:
    return min(center - grid.q_min, grid.q_max - center)


def interior_basis(params: SystemParams, grid: Grid, t: float = 0.0,
                   fraction: float = INTERIOR_FRACTION) -> np.ndarray:
    """Orthonormal columns spanning the interior test subspace.

    Oscillator: the lowest discrete eigenvectors of H whose classical orbit
    radius stays within ``fraction`` of the box half-width and of k_max.
    Free particle: Hermite functions centred in the box, with a length scale
    picked so that the states stay inside the box while drifting freely for
    a time |t|, and within ``fraction`` of k_max.
    """
    hbar, m = params.hbar, params.m
    if params.is_harmonic:
        ell = np.sqrt(hbar / (m * params.omega))
        r = min(fraction * _half_width(grid, 0.0) / ell, fraction * grid.k_max * ell)
        count = max(1, int(np.floor((r**2 - 1) / 2)) + 1)
        _, evecs = eigensystem(params, grid)
        return np.array(evecs[:, :count])

    center = 0.5 * (grid.q_min + grid.q_max)
    half = _half_width(grid, center)
    drift = hbar * abs(t) / m
    ells = np.geomspace(grid.dq, half, 400)
    radii = np.minimum(fraction * half / (ells + drift / ells), fraction * grid.k_max * ells)
    best = int(np.argmax(radii))
    ell, r = ells[best], radii[best]
    count = max(1, int(np.floor((r**2 - 1) / 2)) + 1)
    funcs = hermite_functions(count - 1, (grid.points - center) / ell).T
    basis, _ = np.linalg.qr(funcs.astype(complex))
    return basis


def restrict(mat: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis.conj().T @ mat @ basis


def closed_form_operator_check(frame: MovingFrame, tolerance: float = 1e-6) -> CheckReport:
    """Frobenius distance between T q T^dagger, T p T^dagger and their closed forms."""
    with Timer() as timer:
        params, grid, t = frame.params, frame.grid, frame.t
        B = interior_basis(params, grid, t)
        dQ = np.linalg.norm(restrict(frame.Qop.action - closed_form_Q(params, grid, t), B))
        dP = np.linalg.norm(restrict(frame.Pop.action - closed_form_P(params, grid, t), B))
        residual = max(dQ, dP)
    return make_report("closed_form_operators", params, residual, tolerance, timer,
                       t=repr(t), n=grid.n, subspace_dim=B.shape[1],
                       q_distance=repr(float(dQ)), p_distance=repr(float(dP)))


def interior_gaussians(grid: Grid, count: int = 5, hbar: float = 1.0) -> list[WaveFunction]:
    """Smooth test packets near the box centre, sigma >= 4 dq."""
    center = 0.5 * (grid.q_min + grid.q_max)
    half = _half_width(grid, center)
    sigma = max(1.0, 4 * grid.dq)
    sigma = min(sigma, half / 10)
    offsets = np.linspace(-0.15, 0.15, count) * half
    boosts = [0.0, 0.5, -0.5, 1.0, -1.0]
    return [
        gaussian_packet(grid, center + dq0, boosts[i % len(boosts)], sigma, hbar)
        for i, dq0 in enumerate(offsets)
    ]


def commutator_residual(frame: MovingFrame, test_states: Sequence[WaveFunction] | None = None,
                        tolerance: float = 1e-6) -> CheckReport:
    """max |<psi|[Q(t), P(t)]|psi> - i hbar| over the test states."""
    with Timer() as timer:
        if test_states is None:
            test_states = interior_gaussians(frame.grid, hbar=frame.params.hbar)
        Q, P = frame.Qop, frame.Pop
        worst = 0.0
        for psi in test_states:
            qpsi, ppsi = apply(Q, psi), apply(P, psi)
            # <psi|QP - PQ|psi> with Q, P Hermitian
            value = (np.vdot(qpsi.amp, ppsi.amp) - np.vdot(ppsi.amp, qpsi.amp)) * frame.grid.dq
            worst = max(worst, abs(value - 1j * frame.params.hbar))
    return make_report("commutator", frame.params, worst, tolerance, timer,
                       t=repr(frame.t), n=frame.grid.n, states=len(test_states))


def static_commutator_residual(grid: Grid, psi: WaveFunction, hbar: float = 1.0) -> float:
    q, p = position_operator(grid), momentum_operator(grid, hbar)
    return abs(expectation(commutator(q, p), psi) - 1j * hbar)


def moving_base_state(frame: MovingFrame, Q: float, kind: str = "raw") -> WaveFunction:
    """|Q;t> = T(t)|Q> for the raw or smoothed discrete delta at Q."""
    return apply(frame.T, delta_state(frame.grid, Q, kind))


def eigen_residual(frame: MovingFrame, Q: float, kind: str = "raw") -> float:
    """||Q(t)|Q;t> - Q'|Q;t>|| / |||Q;t>||, Q' the grid point actually used for raw deltas."""
    grid = frame.grid
    state = moving_base_state(frame, Q, kind)
    value = grid.points[grid.nearest_index(Q)] if kind == "raw" else Q
    diff = apply(frame.Qop, state).amp - value * state.amp
    return float(np.linalg.norm(diff) / np.linalg.norm(state.amp))


def eigen_relation_check(frame: MovingFrame, Q_values: Iterable[float] | None = None,
                         tolerance: float = 1e-4) -> CheckReport:
    with Timer() as timer:
        grid = frame.grid
        if Q_values is None:
            center = 0.5 * (grid.q_min + grid.q_max)
            Q_values = center + np.linspace(-0.3, 0.3, 10) * _half_width(grid, center)
        Q_values = list(Q_values)
        residual = max(eigen_residual(frame, Q) for Q in Q_values)
    return make_report("moving_base_eigen", frame.params, residual, tolerance, timer,
                       t=repr(frame.t), n=grid.n, points=len(Q_values))


def transformed_hamiltonian(params: SystemParams, grid: Grid, t: float, mode: str = "analytic",
                            dt: float = 1e-4) -> np.ndarray:
    """Action matrix of T^dagger H T + i hbar (dT^dagger/dt) T."""
    hbar = params.hbar
    H = hamiltonian(params, grid).action
    T = evolution_operator(params, grid, t).mat
    Tdag = T.conj().T
    if mode == "analytic":
        dTdag = (1j / hbar) * H @ Tdag
    elif mode == "finite_difference":
        plus = evolution_operator(params, grid, t + dt).mat.conj().T
        minus = evolution_operator(params, grid, t - dt).mat.conj().T
        dTdag = (plus - minus) / (2 * dt)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Tdag @ H @ T + 1j * hbar * dTdag @ T


def transformed_hamiltonian_residual(params: SystemParams, grid: Grid, t: float,
                                     mode: str = "analytic", dt: float = 1e-4,
                                     tolerance: float | None = None) -> CheckReport:
    """Spectral norm of the transformed Hamiltonian on the interior subspace."""
    if tolerance is None:
        tolerance = 1e-9 if mode == "analytic" else 1e-3
    with Timer() as timer:
        B = interior_basis(params, grid, t)
        K = restrict(transformed_hamiltonian(params, grid, t, mode, dt), B)
        residual = float(np.linalg.norm(K, 2))
    meta = dict(t=repr(t), n=grid.n, mode=mode, subspace_dim=B.shape[1])
    if mode == "finite_difference":
        meta["dt"] = repr(dt)
    return make_report(f"transformed_hamiltonian_{mode}", params, residual, tolerance, timer, **meta)


def moving_wavefunction(frame: MovingFrame, psi_initial: WaveFunction) -> WaveFunction:
    """Psi(Q, t) = <Q;t|psi;t>_S: evolve in the Schrodinger picture, then pull back by T^dagger."""
    evolved = apply(frame.T, psi_initial)
    return apply(frame.Tdag, evolved)


def time_independence_check(params: SystemParams, grid: Grid, psi_initial: WaveFunction,
                            t_samples: Iterable[float], tolerance: float = 1e-8) -> CheckReport:
    with Timer() as timer:
        t_samples = [float(t) for t in t_samples]
        worst = 0.0
        for t in t_samples:
            Psi = moving_wavefunction(make_frame(params, grid, t), psi_initial)
            diff = Psi.amp - psi_initial.amp
            worst = max(worst, float(np.sqrt(np.sum(np.abs(diff) ** 2) * grid.dq)))
    return make_report("time_independence", params, worst, tolerance, timer,
                       times=",".join(repr(t) for t in t_samples), n=grid.n)
