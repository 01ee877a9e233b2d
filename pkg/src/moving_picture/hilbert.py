"""
Discretized one-dimensional Hilbert space.

States are sampled on a uniform grid q_j = q_min + j*dq and carry continuum
normalization, so that ``sum(|amp|**2) * dq == 1`` for a normalized state.
Momentum is represented spectrally: the grid is treated as periodic with
period ``n*dq`` and p = -i hbar d/dq is diagonal in the discrete Fourier basis.

Operators are dense complex matrices.  Two storage conventions coexist and are
told apart by ``DenseOperator.kernel_weighted``:

* ``False`` -- the matrix acts directly on amplitudes (q, p, H, T(t), ...).
* ``True``  -- the matrix holds kernel samples O(q_i, q_j); its action on a
  state is ``mat @ amp * dq``, a quadrature of the integral operator.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import GridError, GridMismatchError, NonHermitianError

__all__ = [
    "Grid",
    "System",
    "SystemParams",
    "WaveFunction",
    "DenseOperator",
    "make_grid",
    "inner_product",
    "position_operator",
    "momentum_operator",
    "hamiltonian",
    "identity_operator",
    "matrix_exponential_unitary",
    "gaussian_packet",
    "delta_state",
    "commutator",
    "adjoint",
    "compose",
    "apply",
    "expectation",
]

MIN_POINTS = 8
HERMITIAN_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [q_min, q_max] with ``n`` points, endpoints included."""

    q_min: float
    q_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.q_min) and np.isfinite(self.q_max)) or not self.q_min < self.q_max:
            raise GridError(f"invalid range: q_min={self.q_min!r} must be < q_max={self.q_max!r}")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise GridError(f"need at least {MIN_POINTS} points, got n={self.n!r}")
        object.__setattr__(self, "q_min", float(self.q_min))
        object.__setattr__(self, "q_max", float(self.q_max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n - 1)

    @property
    def period(self) -> float:
        """Length of the periodic box seen by the spectral derivative."""
        return self.n * self.dq

    @cached_property
    def points(self) -> np.ndarray:
        return _frozen(self.q_min + np.arange(self.n) * self.dq)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers of the discrete Fourier modes, in FFT order."""
        return _frozen(2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dq))

    @property
    def k_max(self) -> float:
        return np.pi / self.dq

    def nearest_index(self, q: float) -> int:
        return int(np.clip(np.rint((q - self.q_min) / self.dq), 0, self.n - 1))


def make_grid(q_min: float, q_max: float, n: int) -> Grid:
    return Grid(q_min, q_max, n)


class System(str, enum.Enum):
    FREE = "free"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of a free particle or harmonic oscillator.

    ``omega`` must be given for the oscillator and omitted for the free particle.
    """

    system: System = System.HARMONIC
    m: float = 1.0
    hbar: float = 1.0
    omega: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "system", System(self.system))
        if self.system is System.HARMONIC and self.omega is None:
            object.__setattr__(self, "omega", 1.0)
        if self.m <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        if self.system is System.HARMONIC and self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.system is System.FREE and self.omega is not None:
            raise ValueError("free particle takes no omega")

    @classmethod
    def free(cls, m: float = 1.0, hbar: float = 1.0) -> "SystemParams":
        return cls(System.FREE, m=m, hbar=hbar)

    @classmethod
    def harmonic(cls, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> "SystemParams":
        return cls(System.HARMONIC, m=m, hbar=hbar, omega=omega)

    @property
    def is_harmonic(self) -> bool:
        return self.system is System.HARMONIC

    def potential(self, q):
        q = np.asarray(q, dtype=float)
        if self.is_harmonic:
            return 0.5 * self.m * self.omega**2 * q**2
        return np.zeros_like(q)

    def as_dict(self) -> dict:
        return {"system": self.system.value, "m": self.m, "hbar": self.hbar, "omega": self.omega}


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amp: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amp, dtype=complex)
        if amp.shape != (self.grid.n,):
            raise GridMismatchError(f"amplitude length {amp.shape} does not match grid size {self.grid.n}")
        object.__setattr__(self, "amp", _frozen(amp))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2) * self.grid.dq))

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.amp / self.norm())


@dataclass(frozen=True, eq=False)
class DenseOperator:
    grid: Grid
    mat: np.ndarray
    kernel_weighted: bool = False

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError(f"operator shape {mat.shape} does not match grid size {self.grid.n}")
        object.__setattr__(self, "mat", _frozen(mat))

    @property
    def action(self) -> np.ndarray:
        """Matrix acting directly on amplitude vectors."""
        return self.mat * self.grid.dq if self.kernel_weighted else self.mat

    def hermiticity_error(self) -> float:
        a = self.action
        return float(np.max(np.abs(a - a.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol


def _same_grid(*objs) -> Grid:
    grid = objs[0].grid
    for o in objs[1:]:
        if o.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {o.grid}")
    return grid


def inner_product(bra: WaveFunction, ket: WaveFunction) -> complex:
    grid = _same_grid(bra, ket)
    return complex(np.vdot(bra.amp, ket.amp) * grid.dq)


def identity_operator(grid: Grid) -> DenseOperator:
    return DenseOperator(grid, np.eye(grid.n, dtype=complex))


def position_operator(grid: Grid) -> DenseOperator:
    return DenseOperator(grid, np.diag(grid.points).astype(complex))


def _fourier_multiplier(grid: Grid, symbol: np.ndarray) -> np.ndarray:
    # F^{-1} diag(symbol) F as a dense matrix, F the unitary DFT
    eye = np.eye(grid.n)
    mat = np.fft.ifft(symbol[:, None] * np.fft.fft(eye, axis=0), axis=0)
    return 0.5 * (mat + mat.conj().T)


def momentum_operator(grid: Grid, hbar: float = 1.0) -> DenseOperator:
    """Spectral -i hbar d/dq; exact on every discrete Fourier mode."""
    return DenseOperator(grid, _fourier_multiplier(grid, hbar * grid.wavenumbers))


def hamiltonian(params: SystemParams, grid: Grid) -> DenseOperator:
    """p^2/2m, plus m omega^2 q^2 / 2 for the oscillator."""
    kinetic = _fourier_multiplier(grid, (params.hbar * grid.wavenumbers) ** 2 / (2.0 * params.m))
    mat = kinetic + np.diag(params.potential(grid.points))
    return DenseOperator(grid, mat)


def hermitian_eigh(H: DenseOperator, tol: float = 1e-8):
    """Eigen-decomposition of a Hermitian operator's action matrix."""
    a = H.action
    scale = max(1.0, float(np.max(np.abs(a))))
    if H.hermiticity_error() > tol * scale:
        raise NonHermitianError(f"operator is not Hermitian (max asymmetry {H.hermiticity_error():.3e})")
    return np.linalg.eigh(0.5 * (a + a.conj().T))


def unitary_from_eigh(evals: np.ndarray, evecs: np.ndarray, theta: float) -> np.ndarray:
    return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


def matrix_exponential_unitary(H: DenseOperator, theta: float) -> DenseOperator:
    """exp(-i theta H) through the Hermitian eigen-decomposition of H."""
    evals, evecs = hermitian_eigh(H)
    return DenseOperator(H.grid, unitary_from_eigh(evals, evecs, theta))


def gaussian_packet(grid: Grid, q0: float = 0.0, p0: float = 0.0, sigma: float = 1.0,
                    hbar: float = 1.0) -> WaveFunction:
    """Normalized packet (2 pi sigma^2)^(-1/4) exp(-(q-q0)^2/4 sigma^2 + i p0 q / hbar).

    ``sigma`` is the position standard deviation of |psi|^2.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if q0 - 5 * sigma < grid.q_min or q0 + 5 * sigma > grid.q_max:
        warnings.warn(
            f"packet at q0={q0} with sigma={sigma} is within 5 sigma of the grid boundary",
            RuntimeWarning,
            stacklevel=2,
        )
    q = grid.points
    amp = (2 * np.pi * sigma**2) ** -0.25 * np.exp(-((q - q0) ** 2) / (4 * sigma**2) + 1j * p0 * q / hbar)
    return WaveFunction(grid, amp)


def delta_state(grid: Grid, Q: float, kind: str = "raw") -> WaveFunction:
    """Discrete stand-in for the position eigenket |Q>.

    ``raw``: amplitude 1/dq at the grid point nearest Q.
    ``smooth``: unit-area Gaussian of width 3*dq centred at Q.
    """
    if not grid.q_min <= Q <= grid.q_max:
        raise ValueError(f"Q={Q} outside grid [{grid.q_min}, {grid.q_max}]")
    amp = np.zeros(grid.n, dtype=complex)
    if kind == "raw":
        amp[grid.nearest_index(Q)] = 1.0 / grid.dq
    elif kind == "smooth":
        w = 3.0 * grid.dq
        amp[:] = np.exp(-((grid.points - Q) ** 2) / (2 * w**2)) / (np.sqrt(2 * np.pi) * w)
    else:
        raise ValueError(f"unknown delta kind {kind!r}")
    return WaveFunction(grid, amp)


def adjoint(A: DenseOperator) -> DenseOperator:
    return DenseOperator(A.grid, A.mat.conj().T, kernel_weighted=A.kernel_weighted)


def compose(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    """Operator product AB, returned in the direct-action convention."""
    grid = _same_grid(A, B)
    return DenseOperator(grid, A.action @ B.action)


def commutator(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    grid = _same_grid(A, B)
    a, b = A.action, B.action
    return DenseOperator(grid, a @ b - b @ a)


def apply(A: DenseOperator, psi: WaveFunction) -> WaveFunction:
    grid = _same_grid(A, psi)
    return WaveFunction(grid, A.action @ psi.amp)


def expectation(A: DenseOperator, psi: WaveFunction) -> complex:
    """<psi|A|psi>, with no renormalization of psi."""
    return inner_product(psi, apply(A, psi))
