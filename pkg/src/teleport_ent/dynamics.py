"""Two-qubit open-system dynamics with collective bath coupling.

Two models of a pair of qubits a distance r12 apart (in units of the
reduced resonance wavelength), coupled to a common squeezed thermal bath:

* dissipative: collective raising/lowering jumps with rates built from
  the coefficient matrix [[(N+1) g, -M g], [-conj(M) g, N g]] where
  g = [[gamma0, gamma12], [gamma12, gamma0]], plus the coherent
  dipole-dipole shift H = Omega12 (s1+ s2- + s1- s2+).  The rotating
  frame drops the bare splitting; entanglement is frame-invariant.
* qnd: pure collective dephasing, jumps (sz1, sz2) with coefficient
  matrix (gamma0/4)(2N+1) [[1, kappa], [kappa, 1]], no Hamiltonian.
  Populations are conserved exactly.

Both coefficient matrices are positive semidefinite for every admissible
bath (|gamma12| <= gamma0 and N(N+1) >= |M|^2), so the generated maps
are completely positive and positivity of rho is a hard invariant.

Integration is fixed-step RK4 on the vectorized generator with
re-hermitization after every step; per-step records carry concurrence,
the closed-form maximal singlet fraction, teleportation fidelity, trace
error, and the minimal eigenvalue.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError
from .states import DensityMatrix
from . import measures
from . import mixed

MIN_EIG_ABORT = -1e-6
DEFAULT_MAX_STEPS = 4096
_SMALL_X = 1e-2

_SM = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)  # lowers |1> -> |0>
_SP = _SM.conj().T
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


class ModelKind(enum.Enum):
    DISSIPATIVE = "dissipative"
    QND = "qnd"


@dataclass(frozen=True)
class BathParams:
    temperature: float = 0.0
    squeeze_r: float = 0.0
    squeeze_phi: float = 0.0
    r12: float = 1.0

    def __post_init__(self):
        if self.temperature < 0:
            raise InvariantError("bath temperature must be nonnegative")
        if self.r12 < 0:
            raise InvariantError("qubit separation r12 must be nonnegative")


def _bell_mixture(sign: float) -> DensityMatrix:
    psi = np.zeros(4, dtype=np.complex128)
    psi[1] = 1.0 / math.sqrt(2.0)
    psi[2] = sign / math.sqrt(2.0)
    mat = 0.95 * np.outer(psi, psi.conj()) + 0.05 * np.eye(4) / 4.0
    return DensityMatrix.from_matrix(mat)


def default_initial_state() -> DensityMatrix:
    """0.95 |psi+><psi+| + 0.05 I/4 with psi+ = (|01> + |10>)/sqrt(2).

    The symmetric Bell component decays through the superradiant channel.
    """
    return _bell_mixture(1.0)


def antisymmetric_initial_state() -> DensityMatrix:
    """Same mixture built on (|01> - |10>)/sqrt(2); subradiant at small
    separations, so its entanglement is protected in the collective regime."""
    return _bell_mixture(-1.0)


@dataclass(frozen=True)
class DynamicsConfig:
    model: ModelKind = ModelKind.DISSIPATIVE
    bath: BathParams = BathParams()
    gamma0: float = 1.0
    t_max: float = 5.0
    dt: float | None = None
    initial: DensityMatrix | None = None
    max_steps: int = DEFAULT_MAX_STEPS
    omega0: float = 1.0

    def __post_init__(self):
        if self.gamma0 <= 0:
            raise InvariantError("gamma0 must be positive")
        if self.t_max <= 0:
            raise InvariantError("t_max must be positive")
        if self.dt is not None and self.dt <= 0:
            raise InvariantError("dt must be positive")
        if self.max_steps < 1:
            raise InvariantError("max_steps must be positive")

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else 1e-3 / self.gamma0

    def resolved_initial(self) -> DensityMatrix:
        return self.initial if self.initial is not None else default_initial_state()


def thermal_occupation(temperature: float, omega0: float = 1.0) -> float:
    if temperature <= 0.0:
        return 0.0
    return 1.0 / math.expm1(omega0 / temperature)


def squeezed_occupations(bath: BathParams, omega0: float = 1.0) -> tuple[float, complex]:
    """Effective (N, M) of a squeezed thermal bath; |M|^2 <= N(N+1)."""
    n_th = thermal_occupation(bath.temperature, omega0)
    ch = math.cosh(bath.squeeze_r)
    sh = math.sinh(bath.squeeze_r)
    n_eff = n_th * (ch * ch + sh * sh) + sh * sh
    m_eff = -(2.0 * n_th + 1.0) * sh * ch * complex(math.cos(bath.squeeze_phi),
                                                    math.sin(bath.squeeze_phi))
    return n_eff, m_eff


def coupling_kernel(x: float) -> float:
    """gamma12 / gamma0 for transverse dipoles; 1 at x = 0, -> 0 as x grows."""
    if x < 0:
        raise InvariantError("separation must be nonnegative")
    if x < _SMALL_X:
        # series form; the direct expression cancels catastrophically here
        return 1.0 - x * x / 5.0 + 3.0 * x ** 4 / 280.0
    s, c = math.sin(x), math.cos(x)
    return 1.5 * (s / x + c / (x * x) - s / (x ** 3))


def shift_kernel(x: float) -> float:
    """Omega12 / gamma0 for transverse dipoles; diverges like 3/(4 x^3)."""
    if x <= 0:
        raise InvariantError("the coherent shift needs a positive separation")
    s, c = math.sin(x), math.cos(x)
    return 0.75 * (-c / x + s / (x * x) + c / (x ** 3))


def collective_coefficients(bath: BathParams, gamma0: float) -> tuple[float, float]:
    """(gamma12, omega12) at the bath separation."""
    x = bath.r12
    return gamma0 * coupling_kernel(x), gamma0 * shift_kernel(x)


def _gks_parts(cfg: DynamicsConfig) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Hamiltonian, coefficient matrix and jump list for the chosen model."""
    n_eff, m_eff = squeezed_occupations(cfg.bath, cfg.omega0)
    if cfg.model is ModelKind.QND:
        kappa = coupling_kernel(cfg.bath.r12)
        scale = 0.25 * cfg.gamma0 * (2.0 * n_eff + 1.0)
        c = scale * np.array([[1.0, kappa], [kappa, 1.0]], dtype=np.complex128)
        jumps = [np.kron(_SZ, _I2), np.kron(_I2, _SZ)]
        return np.zeros((4, 4), dtype=np.complex128), c, jumps
    gamma12, omega12 = collective_coefficients(cfg.bath, cfg.gamma0)
    g = np.array([[cfg.gamma0, gamma12], [gamma12, cfg.gamma0]])
    k = np.array([[n_eff + 1.0, -m_eff], [-np.conj(m_eff), n_eff]])
    c = np.kron(k, g)
    s1m, s2m = np.kron(_SM, _I2), np.kron(_I2, _SM)
    s1p, s2p = np.kron(_SP, _I2), np.kron(_I2, _SP)
    h = omega12 * (s1p @ s2m + s1m @ s2p)
    jumps = [s1m, s2m, s1p, s2p]
    return h, c, jumps


def _liouvillian(cfg: DynamicsConfig) -> np.ndarray:
    """Matrix L with vec(drho/dt) = L vec(rho), row-major vectorization."""
    h, c, jumps = _gks_parts(cfg)
    eye = np.eye(4, dtype=np.complex128)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for a in range(len(jumps)):
        for b in range(len(jumps)):
            coef = c[a, b]
            if coef == 0:
                continue
            ad = jumps[a].conj().T
            g = ad @ jumps[b]
            lv = lv + coef * (np.kron(jumps[b], ad.T)
                              - 0.5 * np.kron(g, eye) - 0.5 * np.kron(eye, g.T))
    return lv


def lindblad_rhs(rho_mat: np.ndarray, cfg: DynamicsConfig) -> np.ndarray:
    """drho/dt at rho; traceless and hermitian up to roundoff."""
    lv = _liouvillian(cfg)
    return (lv @ np.asarray(rho_mat, dtype=np.complex128).reshape(-1)).reshape(4, 4)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    concurrence: np.ndarray
    fraction: np.ndarray
    fidelity: np.ndarray
    trace_err: np.ndarray
    min_eig: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def row(self, k: int) -> tuple[float, float, float, float, float, float]:
        return (float(self.t[k]), float(self.concurrence[k]), float(self.fraction[k]),
                float(self.fidelity[k]), float(self.trace_err[k]), float(self.min_eig[k]))

    def final_row(self) -> tuple[float, float, float, float, float, float]:
        return self.row(len(self.t) - 1)


def _diagnostics(mat: np.ndarray) -> tuple[float, float, float, float, float]:
    rho = DensityMatrix.unchecked(2, mat)
    conc = measures.concurrence_2qubit(rho)
    frac = mixed.fef_2qubit_closed_form(rho)
    fid = measures.fidelity_from_fraction(frac, 2)
    tr_err = abs(float(np.trace(mat).real) - 1.0) + abs(float(np.trace(mat).imag))
    min_eig = float(np.linalg.eigvalsh(mat)[0])
    return conc, frac, fid, tr_err, min_eig


def evolve(cfg: DynamicsConfig) -> Trajectory:
    """Fixed-step RK4 trajectory with per-step records, t = 0 included.

    Aborts with InvariantError if the state leaves positivity by more
    than MIN_EIG_ABORT or the step budget is exceeded.
    """
    dt = cfg.resolved_dt()
    steps = int(round(cfg.t_max / dt))
    if steps < 1:
        steps = 1
    if steps > cfg.max_steps:
        raise InvariantError(
            f"{steps} steps exceed max_steps={cfg.max_steps}; raise max_steps or dt")
    lv = _liouvillian(cfg)
    v = cfg.resolved_initial().mat.reshape(-1).astype(np.complex128)

    t_out = np.empty(steps + 1)
    c_out = np.empty(steps + 1)
    f_out = np.empty(steps + 1)
    fid_out = np.empty(steps + 1)
    terr_out = np.empty(steps + 1)
    meig_out = np.empty(steps + 1)

    def record(k: int, t: float, vec: np.ndarray):
        conc, frac, fid, terr, meig = _diagnostics(vec.reshape(4, 4))
        t_out[k] = t
        c_out[k] = conc
        f_out[k] = frac
        fid_out[k] = fid
        terr_out[k] = terr
        meig_out[k] = meig
        if meig < MIN_EIG_ABORT:
            raise InvariantError(
                f"state lost positivity at t={t:.6g} (min eigenvalue {meig:.3e})")

    record(0, 0.0, v)
    for k in range(1, steps + 1):
        k1 = lv @ v
        k2 = lv @ (v + 0.5 * dt * k1)
        k3 = lv @ (v + 0.5 * dt * k2)
        k4 = lv @ (v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m = v.reshape(4, 4)
        m = 0.5 * (m + m.conj().T)
        v = m.reshape(-1)
        record(k, k * dt, v)
    return Trajectory(t=t_out, concurrence=c_out, fraction=f_out,
                      fidelity=fid_out, trace_err=terr_out, min_eig=meig_out)


def step_doubling_check(cfg: DynamicsConfig) -> float:
    """Endpoint concurrence change when dt is halved; a convergence probe."""
    coarse = evolve(cfg)
    fine_cfg = dataclasses.replace(cfg, dt=cfg.resolved_dt() / 2.0,
                                   max_steps=2 * cfg.max_steps + 2)
    fine = evolve(fine_cfg)
    return abs(coarse.final_row()[1] - fine.final_row()[1])


SWEEP_AXES = ("time", "r12", "squeeze_r")


def _cfg_at(cfg: DynamicsConfig, axis: str, value: float) -> DynamicsConfig:
    if axis == "r12":
        return dataclasses.replace(cfg, bath=dataclasses.replace(cfg.bath, r12=value))
    return dataclasses.replace(cfg, bath=dataclasses.replace(cfg.bath, squeeze_r=value))


@dataclass(frozen=True)
class SweepResult:
    axis: str
    rows: tuple[tuple[float, float, float, float, float, float], ...]


def sweep(cfg: DynamicsConfig, axis: str, grid: np.ndarray, jobs: int = 1) -> SweepResult:
    """Endpoint diagnostics along a parameter grid.

    The time axis samples a single trajectory at the nearest recorded
    steps; other axes evolve one trajectory per grid point (optionally in
    a thread pool) and report the t = t_max row.
    """
    if axis not in SWEEP_AXES:
        raise InvariantError(f"unknown sweep axis {axis!r}; use one of {SWEEP_AXES}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise InvariantError("sweep grid must be a nonempty 1-D array")
    if axis == "time":
        if grid.min() < 0 or grid.max() > cfg.t_max + 1e-12:
            raise InvariantError("time grid must lie within [0, t_max]")
        traj = evolve(cfg)
        dt = cfg.resolved_dt()
        rows = []
        for t in grid:
            k = int(round(t / dt))
            k = min(max(k, 0), len(traj) - 1)
            row = traj.row(k)
            rows.append((float(t),) + row[1:])
        return SweepResult(axis=axis, rows=tuple(rows))

    def run_one(value: float):
        return evolve(_cfg_at(cfg, axis, float(value))).final_row()

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            finals = list(pool.map(run_one, grid))
    else:
        finals = [run_one(v) for v in grid]
    rows = tuple((float(g),) + fr[1:] for g, fr in zip(grid, finals))
    return SweepResult(axis=axis, rows=rows)
