"""One-dimensional trap characterization along the x and y axes."""

from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .arraymode import eval_field
from .atom import alpha_imag, alpha_real, recoil_energy
from .constants import C, HBAR, KB, NM
from .errors import DomainError, NotATrapError
from .numerics import eigs_tridiag

__all__ = [
    "AxialProfile", "BoundStateSet", "DepthResult", "TrapReport",
    "axial_profile", "bound_states", "trap_frequency", "trap_depth",
    "ground_state_average", "trap_metrics", "symmetric_grid", "SURFACE_CLEARANCE",
]

SURFACE_CLEARANCE = 10 * NM
DEFAULT_POINTS = 2001
N_LEVELS = 5


@dataclass(frozen=True)
class AxialProfile:
    """Potential cut U_x(x) = U(x, 0) or U_y(y) = U(0, y); SI units."""

    axis: str
    grid: np.ndarray
    U: np.ndarray
    intensity: np.ndarray
    U_opt: np.ndarray
    U_vdW: np.ndarray

    def __post_init__(self):
        g = self.grid
        if np.any(np.diff(g) <= 0):
            raise DomainError("profile grid must be strictly increasing")
        if not np.allclose(g, -g[::-1], rtol=0, atol=1e-6 * (g[-1] - g[0])):
            raise DomainError("profile grid must be symmetric about 0")
        if len(g) % 2 == 0:
            raise DomainError("profile grid needs an odd number of points")

    @property
    def spacing(self):
        return float(self.grid[1] - self.grid[0])

    @property
    def center(self):
        return len(self.grid) // 2


@dataclass(frozen=True)
class BoundStateSet:
    """Lowest levels of the 1D motion; energies relative to the profile minimum.

    ``wavefunctions[:, v]`` lives on the profile grid (m^-1/2), zero outside
    the barrier-enclosed region used for the solve. ``all_bound`` is False
    when fewer than the requested levels lie below the barrier.
    """

    energies: np.ndarray
    wavefunctions: np.ndarray
    all_bound: bool = True
    window: tuple = (0, 0)


@dataclass(frozen=True)
class DepthResult:
    depth: float
    barrier_left: float
    barrier_right: float
    has_barrier: bool
    at_window_edge: bool


@dataclass
class TrapReport:
    omega_x: float
    omega_y: float
    spacing_omega_x: float
    spacing_omega_y: float
    depth_x: float
    depth_y: float
    U_D: float
    delta_x: float
    delta_y: float
    gamma_x: float
    gamma_y: float
    gamma: float
    tau_coh: float
    tau_trap: float
    U_min: float
    E_rec: float
    levels_x: list = field(default_factory=list)
    levels_y: list = field(default_factory=list)

    def summary(self):
        """Headline numbers in laboratory units."""
        return {
            "omega_x_over_2pi_kHz": self.omega_x / (2 * np.pi) / 1e3,
            "omega_y_over_2pi_kHz": self.omega_y / (2 * np.pi) / 1e3,
            "delta_x_nm": self.delta_x / NM,
            "delta_y_nm": self.delta_y / NM,
            "spacing_x_uK": (self.levels_x[1] - self.levels_x[0]) / KB * 1e6,
            "spacing_y_uK": (self.levels_y[1] - self.levels_y[0]) / KB * 1e6,
            "depth_x_mK": self.depth_x / KB * 1e3,
            "depth_y_mK": self.depth_y / KB * 1e3,
            "U_D_mK": self.U_D / KB * 1e3,
            "U_min_mK": self.U_min / KB * 1e3,
            "gamma_x_per_s": self.gamma_x,
            "gamma_y_per_s": self.gamma_y,
            "gamma_per_s": self.gamma,
            "tau_coh_s": self.tau_coh,
            "tau_trap_h": self.tau_trap / 3600,
        }

    def to_dict(self):
        out = {k: float(v) for k, v in asdict(self).items() if not k.startswith("levels")}
        out["levels_x"] = [float(v) for v in self.levels_x]
        out["levels_y"] = [float(v) for v in self.levels_y]
        return out

    @classmethod
    def from_dict(cls, data):
        """Inverse of :meth:`to_dict`; rejects missing, unknown or non-numeric fields."""
        names = [f.name for f in fields(cls)]
        missing = [n for n in names if n not in data]
        unknown = [k for k in data if k not in names]
        if missing or unknown:
            raise DomainError(f"trap report: missing {missing}, unknown {unknown}")
        kw = {}
        for n in names:
            v = data[n]
            if n.startswith("levels"):
                if not isinstance(v, list) or not all(_is_number(e) for e in v):
                    raise DomainError(f"trap report: '{n}' must be a list of numbers")
                kw[n] = [float(e) for e in v]
            else:
                if not _is_number(v):
                    raise DomainError(f"trap report: '{n}' must be a number")
                kw[n] = float(v)
        return cls(**kw)


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def symmetric_grid(half_width, points):
    """Uniform grid on [-h, h], exactly antisymmetric, with an exact 0 when ``points`` is odd."""
    s = np.linspace(-half_width, half_width, points)
    return 0.5 * (s - s[::-1])


def default_half_width(geometry, axis, clearance=SURFACE_CLEARANCE):
    if axis == "x":
        return geometry.separation / 2 - clearance
    return 3 * geometry.radius


def axial_profile(mode, species, vdw_model, axis, half_width=None,
                  points=DEFAULT_POINTS, clearance=SURFACE_CLEARANCE):
    """Sample U, U_opt, U_vdW and |E|^2 along one principal axis."""
    if axis not in ("x", "y"):
        raise DomainError("axis must be 'x' or 'y'")
    g = mode.geometry
    if half_width is None:
        half_width = default_half_width(g, axis, clearance)
    if half_width <= 0:
        raise DomainError("half-width must be positive")
    if points % 2 == 0:
        points += 1
    s = symmetric_grid(half_width, points)
    x, y = (s, np.zeros_like(s)) if axis == "x" else (np.zeros_like(s), s)
    gaps = np.minimum(np.hypot(x + g.center_x, y), np.hypot(x - g.center_x, y)) - g.radius
    if np.min(gaps) < clearance * (1 - 1e-9):
        raise DomainError(f"profile comes within {np.min(gaps) / NM:.3g} nm of a fiber "
                          f"surface (clearance {clearance / NM:.3g} nm)")
    omega = 2 * np.pi * C / g.wavelength
    intensity = eval_field(mode, x, y).intensity
    u_opt = -0.25 * alpha_real(species, omega) * intensity
    xc = g.center_x
    u_vdw = vdw_model(np.hypot(x + xc, y)) + vdw_model(np.hypot(x - xc, y))
    # enforce exact evenness; the field evaluation is symmetric to roundoff
    sym = lambda v: 0.5 * (v + v[::-1])
    u_opt, u_vdw, intensity = sym(u_opt), sym(u_vdw), sym(intensity)
    return AxialProfile(axis, s, u_opt + u_vdw, intensity, u_opt, u_vdw)


def trap_depth(profile):
    """Smallest barrier height, over the two escape directions, above U(0)."""
    U = profile.U
    c = profile.center
    left, right = U[:c + 1], U[c:]
    il = int(np.argmax(left))
    ir = c + int(np.argmax(right))
    hl, hr = U[il] - U[c], U[ir] - U[c]
    depth = max(min(hl, hr), 0.0)
    has_barrier = il != c and ir != c and depth > 0
    edge = il == 0 or ir == len(U) - 1
    return DepthResult(float(depth) if has_barrier else 0.0, float(profile.grid[il]),
                       float(profile.grid[ir]), has_barrier, edge)


def _barrier_window(profile):
    d = trap_depth(profile)
    if not d.has_barrier:
        return 0, len(profile.grid) - 1
    g = profile.grid
    return int(np.searchsorted(g, d.barrier_left)), int(np.searchsorted(g, d.barrier_right))


def bound_states(profile, mass, k=N_LEVELS):
    """Lowest ``k`` levels of -hbar^2/2M d^2/ds^2 + U(s), finite differences.

    The Hamiltonian is restricted to the region between the two barrier
    maxima with Dirichlet ends, so that states living outside the barrier
    do not mix into the trap spectrum.
    """
    lo, hi = _barrier_window(profile)
    U = profile.U[lo:hi + 1]
    dx = profile.spacing
    if len(U) < k + 2:
        raise DomainError("barrier window too narrow for the requested levels")
    U_min = profile.U[profile.center]
    t = HBAR**2 / (2 * mass * dx**2)
    inner = U[1:-1] - U_min
    vals, vecs = eigs_tridiag(2 * t + inner, -t * np.ones(len(inner) - 1), k)
    psi = np.zeros((len(profile.grid), k))
    psi[lo + 1:hi, :] = vecs / np.sqrt(dx)
    depth = trap_depth(profile).depth
    bound = vals < depth if depth > 0 else np.zeros(k, bool)
    if vals[-1] > 0.1 * t:
        raise DomainError("grid too coarse: level energies approach the kinetic grid scale")
    return BoundStateSet(vals, psi, bool(np.all(bound)), (lo, hi))


def trap_frequency(profile, mass):
    """sqrt(U''(0)/M) from the symmetric five-point second difference."""
    c = profile.center
    if c < 2:
        raise DomainError("profile too short for a five-point stencil")
    U = profile.U[c - 2:c + 3]
    d2 = (-U[0] + 16 * U[1] - 30 * U[2] + 16 * U[3] - U[4]) / (12 * profile.spacing**2)
    if not d2 > 0:
        raise NotATrapError(f"non-positive curvature along {profile.axis}: {d2:.3e} J/m^2")
    return float(np.sqrt(d2 / mass))


def ground_state_average(profile, psi0, kappa):
    """(<|E|^2>, <Gamma_sc>) in the motional state ``psi0`` on the profile grid."""
    psi0 = np.asarray(psi0)
    if psi0.shape != profile.grid.shape:
        raise DomainError("wavefunction and profile grids differ")
    mean_i = float(np.sum(np.abs(psi0) ** 2 * profile.intensity) * profile.spacing)
    return mean_i, kappa * mean_i / (4 * HBAR)


def trap_metrics(mode, species, vdw_model, points=DEFAULT_POINTS,
                 clearance=SURFACE_CLEARANCE, profiles=None, levels=N_LEVELS):
    """Full characterization of the trap at the two-fiber center.

    Returns ``(report, profiles, states)`` where the last two are dicts keyed
    by axis.
    """
    g = mode.geometry
    omega_l = 2 * np.pi * C / g.wavelength
    kappa = float(alpha_imag(species, omega_l))
    M = species.mass_kg
    profiles = profiles or {ax: axial_profile(mode, species, vdw_model, ax, points=points,
                                              clearance=clearance) for ax in ("x", "y")}
    res = {}
    states = {}
    for ax, prof in profiles.items():
        w = trap_frequency(prof, M)
        depth = trap_depth(prof)
        bs = bound_states(prof, M, k=levels)
        states[ax] = bs
        _, gam = ground_state_average(prof, bs.wavefunctions[:, 0], kappa)
        res[ax] = dict(omega=w, depth=depth.depth, gamma=gam, levels=bs.energies,
                       spacing=(bs.energies[1] - bs.energies[0]) / HBAR)
    U_D = min(res["x"]["depth"], res["y"]["depth"])
    gamma = max(res["x"]["gamma"], res["y"]["gamma"])
    e_rec = recoil_energy(species, g.wavelength)
    tau_coh = 1 / gamma if gamma > 0 else float("inf")
    tau_trap = U_D / (2 * e_rec * gamma) if gamma > 0 else float("inf")
    report = TrapReport(
        omega_x=res["x"]["omega"], omega_y=res["y"]["omega"],
        spacing_omega_x=res["x"]["spacing"], spacing_omega_y=res["y"]["spacing"],
        depth_x=res["x"]["depth"], depth_y=res["y"]["depth"], U_D=U_D,
        delta_x=np.sqrt(HBAR / (2 * M * res["x"]["omega"])),
        delta_y=np.sqrt(HBAR / (2 * M * res["y"]["omega"])),
        gamma_x=res["x"]["gamma"], gamma_y=res["y"]["gamma"], gamma=gamma,
        tau_coh=tau_coh, tau_trap=tau_trap,
        U_min=float(profiles["x"].U[profiles["x"].center]), E_rec=e_rec,
        levels_x=list(res["x"]["levels"]), levels_y=list(res["y"]["levels"]),
    )
    return report, profiles, states
