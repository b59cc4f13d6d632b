"""Time evolution: forward drift-diffusion, the dual (time-reversed
velocity) equation, SQG coupling, and the concentration-center trajectory.

Integrator: exact integrating factor for the fractional dissipation plus
a midpoint second-order Runge-Kutta stage for the dealiased advection term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .grids import GridSpec, ScalarField, SpectralField, VelocityField, to_physical, to_spectral
from .operators import TWO_PI, dealias_mask, norms, riesz_transform

REVERSED_SIGN = "reversed"  # theta_t = +(u.grad)theta - Lambda theta
STANDARD_SIGN = "standard"  # theta_t = -(u.grad)theta - Lambda theta

CFL_LIMIT = 0.5
HISTORY_MEMORY_CAP = 2 * 1024**3  # bytes


class NumericalAbort(RuntimeError):
    """Run produced non-finite values."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite field values at step {step} (t={t:.6g})")
        self.step = step
        self.t = t


class CFLViolation(ValueError):
    def __init__(self, dt: float, admissible: float):
        super().__init__(
            f"time step {dt:.3e} violates the advective CFL bound; "
            f"admissible dt <= {admissible:.3e}"
        )
        self.admissible_dt = admissible


@dataclass(frozen=True)
class VelocitySpec:
    """Prescribed velocity: zero | constant | shear | file | sqg.

    omega != 0 modulates the prescribed profile by cos(omega*t), giving a
    genuinely time-dependent divergence-free drift (with a static profile
    the discrete forward and dual steps are exactly adjoint, which hides
    the integrator's convergence order in duality checks).
    """

    kind: str = "zero"
    amplitude: float = 1.0
    constant: tuple = ()
    paths: tuple = ()
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "shear", "file", "sqg"):
            raise ValueError(f"unknown velocity kind {self.kind!r}")


def shear_velocity(grid: GridSpec, amplitude: float) -> VelocityField:
    """u = (0, a sin(2 pi x1)); divergence-free by construction (d=2)."""
    if grid.d != 2:
        raise ValueError("shear velocity requires d=2")
    x1 = grid.coords()[0]
    comps = (
        ScalarField.constant(grid, 0.0),
        ScalarField(grid, amplitude * np.sin(TWO_PI * x1)),
    )
    return VelocityField(grid, comps, divergence_free=True)


def sqg_velocity(theta: ScalarField) -> VelocityField:
    """u = (-R2 theta, R1 theta); divergence-free by the multiplier identity."""
    if theta.grid.d != 2:
        raise ValueError("SQG coupling requires d=2")
    u1 = ScalarField(theta.grid, -riesz_transform(theta, 2).values)
    u2 = riesz_transform(theta, 1)
    return VelocityField(theta.grid, (u1, u2), divergence_free=True)


def build_prescribed_velocity(spec: VelocitySpec, grid: GridSpec) -> VelocityField:
    if spec.kind == "zero":
        return VelocityField.zero(grid)
    if spec.kind == "constant":
        c = spec.constant if spec.constant else (spec.amplitude,) * grid.d
        return VelocityField.constant(grid, c)
    if spec.kind == "shear":
        return shear_velocity(grid, spec.amplitude)
    if spec.kind == "file":
        from .fieldio import load_field

        if len(spec.paths) != grid.d:
            raise ValueError(f"velocity from file needs {grid.d} component paths")
        comps = tuple(load_field(p) for p in spec.paths)
        for c in comps:
            if c.grid != grid:
                raise ValueError("velocity file grid does not match the run grid")
        return VelocityField(grid, comps, divergence_free=True)
    raise ValueError(f"velocity kind {spec.kind!r} is not prescribed (use an SQG run)")


def velocity_function(spec: VelocitySpec, grid: GridSpec):
    """Callable t -> VelocityField for a prescribed velocity."""
    base = build_prescribed_velocity(spec, grid)
    if spec.omega == 0.0:
        return lambda t: base
    omega = spec.omega

    def at(t: float) -> VelocityField:
        factor = math.cos(omega * t)
        comps = tuple(ScalarField(grid, factor * c.values) for c in base.components)
        return VelocityField(grid, comps, divergence_free=True)

    return at


@dataclass(frozen=True)
class SimConfig:
    grid: GridSpec
    kind: str = "drift"           # drift | sqg
    sign: str = REVERSED_SIGN     # reversed | standard
    alpha: float = 1.0
    dt: float | None = None
    t_end: float = 1.0
    velocity: VelocitySpec = field(default_factory=VelocitySpec)
    cadence: int = 10
    seed: int = 0
    track_bmo: bool = False
    track_beta: bool = False
    store_history: bool = True   # keep per-step SQG velocity for later dual runs

    def __post_init__(self):
        if self.kind not in ("drift", "sqg"):
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.sign not in (REVERSED_SIGN, STANDARD_SIGN):
            raise ValueError(f"unknown advection sign {self.sign!r}")
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha}")
        if self.kind == "sqg" and self.grid.d != 2:
            raise ValueError("SQG runs require d=2")
        if self.t_end < 0.0:
            raise ValueError("end time must be nonnegative")
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.cadence < 1:
            raise ValueError("cadence must be >= 1")


def default_dt(grid: GridSpec, umax: float) -> float:
    """Combined advective/dissipative guard 0.25 / (|u|_inf N + pi N)."""
    return 0.25 / (umax * grid.N + math.pi * grid.N)


def cfl_admissible_dt(grid: GridSpec, umax: float) -> float:
    if umax <= 0.0:
        return math.inf
    return CFL_LIMIT / (umax * grid.N)


@dataclass(frozen=True)
class EvolutionState:
    t: float
    theta: ScalarField
    u: VelocityField
    step: int


@dataclass(frozen=True)
class DualState:
    horizon: float
    s: float
    phi: ScalarField
    step: int


class VelocityHistory:
    """Forward velocity samples u(., t) with linear interpolation in time."""

    def __init__(self, grid: GridSpec, times=None, samples=None, func=None):
        self.grid = grid
        self._func = func
        self.times = None if times is None else np.asarray(times, dtype=float)
        self._samples = samples

    @classmethod
    def from_static(cls, u: VelocityField) -> "VelocityHistory":
        return cls(u.grid, func=lambda t, u=u: u)

    @classmethod
    def from_callable(cls, grid: GridSpec, func) -> "VelocityHistory":
        return cls(grid, func=func)

    @classmethod
    def from_samples(cls, grid: GridSpec, times, samples) -> "VelocityHistory":
        if len(times) != len(samples) or len(times) < 1:
            raise ValueError("history needs matching, nonempty times and samples")
        return cls(grid, times=list(times), samples=list(samples))

    def covers(self, t0: float, t1: float) -> bool:
        if self._func is not None:
            return True
        return self.times[0] <= t0 + 1e-12 and t1 <= self.times[-1] + 1e-12

    def velocity_at(self, t: float) -> VelocityField:
        if self._func is not None:
            return self._func(t)
        times = self.times
        if t <= times[0] + 1e-12:
            comps = self._samples[0]
        elif t >= times[-1] - 1e-12:
            comps = self._samples[-1]
        else:
            i = int(np.searchsorted(times, t, side="right")) - 1
            i = min(max(i, 0), len(times) - 2)
            w = (t - times[i]) / (times[i + 1] - times[i])
            comps = tuple(
                (1.0 - w) * a + w * b for a, b in zip(self._samples[i], self._samples[i + 1])
            )
        fields = tuple(ScalarField(self.grid, c) for c in comps)
        return VelocityField(self.grid, fields, divergence_free=False)


class _Stepper:
    """Integrating-factor midpoint RK2 core on spectral coefficients.

    The dissipation semigroup is applied exactly; the dealiased advection
    tendency is advanced by the midpoint rule (second order).
    """

    def __init__(self, grid: GridSpec, dt: float, alpha: float, adv_sign: float):
        self.grid = grid
        self.dt = dt
        self.adv_sign = adv_sign
        lam = (TWO_PI * grid.mode_radius()) ** alpha
        lam.flat[0] = 0.0
        self.E = np.exp(-lam * dt)
        self.E_half = np.exp(-lam * (0.5 * dt))
        self.mask = dealias_mask(grid)
        self.ik = tuple(2j * np.pi * nj for nj in grid.modes())

    def nonlinear(self, ch: np.ndarray, u_phys: tuple) -> np.ndarray:
        """Dealiased spectral tendency of sign * (u.grad)theta."""
        chm = ch * self.mask
        prod = np.zeros(self.grid.shape)
        for ikj, uj in zip(self.ik, u_phys):
            dj = np.fft.ifftn(ikj * chm, norm="forward").real
            prod += uj * dj
        ph = np.fft.fftn(prod, norm="forward") * self.mask
        ph.flat[0] = 0.0
        return self.adv_sign * ph

    def predictor(self, ch: np.ndarray, u0_phys: tuple) -> np.ndarray:
        """Half-step predictor (used for SQG stage-velocity recomputation)."""
        return self.E_half * (ch + 0.5 * self.dt * self.nonlinear(ch, u0_phys))

    def step(self, ch: np.ndarray, u0_phys: tuple, umid_phys: tuple) -> np.ndarray:
        """Midpoint step; stage velocities at the step start and midpoint."""
        mid = self.predictor(ch, u0_phys)
        a2 = self.nonlinear(mid, umid_phys)
        return self.E * ch + self.dt * self.E_half * a2


def _u_phys(u: VelocityField) -> tuple:
    return tuple(c.values for c in u.components)


def _check_cfl(grid: GridSpec, dt: float, umax: float):
    if umax > 0.0 and dt * umax * grid.N > CFL_LIMIT + 1e-12:
        raise CFLViolation(dt, cfl_admissible_dt(grid, umax))


def step_forward(state: EvolutionState, cfg: SimConfig) -> EvolutionState:
    """Advance one step; velocity recomputed from theta for SQG runs."""
    grid = cfg.grid
    dt = cfg.dt if cfg.dt is not None else default_dt(grid, state.u.max_norm())
    _check_cfl(grid, dt, state.u.max_norm())
    sign = 1.0 if cfg.sign == REVERSED_SIGN else -1.0
    stepper = _Stepper(grid, dt, cfg.alpha, sign)
    ch = to_spectral(state.theta).coefficients
    if cfg.kind == "sqg":
        u0 = state.u
        mid = to_physical(SpectralField(grid, stepper.predictor(ch, _u_phys(u0))))
        umid = sqg_velocity(mid)
    elif cfg.velocity.omega != 0.0:
        vf = velocity_function(cfg.velocity, grid)
        u0 = vf(state.t)
        umid = vf(state.t + 0.5 * dt)
    else:
        u0 = umid = state.u
    ch_new = stepper.step(ch, _u_phys(u0), _u_phys(umid))
    theta_new = to_physical(SpectralField(grid, ch_new))
    if not np.all(np.isfinite(theta_new.values)):
        raise NumericalAbort(state.step + 1, state.t + dt)
    if cfg.kind == "sqg":
        u_new = sqg_velocity(theta_new)
    elif cfg.velocity.omega != 0.0:
        u_new = vf(state.t + dt)
    else:
        u_new = state.u
    return EvolutionState(t=state.t + dt, theta=theta_new, u=u_new, step=state.step + 1)


@dataclass
class RunResult:
    config: SimConfig
    states: list                 # snapshots at cadence (plus initial and final)
    diagnostics: list            # dict rows: step, t, linf, l1, l2, mean, bmo_u, beta_hat
    history: VelocityHistory


def _diag_row(state: EvolutionState, cfg: SimConfig) -> dict:
    rec = norms(state.theta)
    row = {
        "step": state.step,
        "t": state.t,
        "linf": rec.linf,
        "l1": rec.l1,
        "l2": rec.l2,
        "mean": state.theta.mean(),
        "bmo_u": "",
        "beta_hat": "",
    }
    if cfg.track_bmo:
        from .spaces import bmo_norm

        stride = max(1, cfg.grid.N // 64)
        row["bmo_u"] = max(bmo_norm(c, stride=stride) for c in state.u.components)
    if cfg.track_beta:
        from .spaces import holder_from_lp

        try:
            row["beta_hat"] = holder_from_lp(state.theta).beta
        except ValueError:
            row["beta_hat"] = ""
    return row


def run_forward(cfg: SimConfig, theta0: ScalarField) -> RunResult:
    """Loop step_forward to t_end, recording snapshots and diagnostics."""
    grid = cfg.grid
    if theta0.grid != grid:
        raise ValueError("initial field grid does not match the configuration")
    if cfg.kind == "sqg" or cfg.velocity.kind == "sqg":
        u = sqg_velocity(theta0)
        vf = None
    else:
        vf = velocity_function(cfg.velocity, grid)
        u = vf(0.0)
    umax = u.max_norm()
    dt = cfg.dt if cfg.dt is not None else default_dt(grid, umax)
    nsteps = int(round(cfg.t_end / dt)) if cfg.t_end > 0 else 0
    cfg = replace(cfg, dt=dt)

    store_history = cfg.kind == "sqg" and cfg.store_history
    if store_history:
        need = (nsteps + 1) * grid.d * grid.size * 8
        if need > HISTORY_MEMORY_CAP:
            raise MemoryError(
                f"velocity history would need {need / 1024**3:.2f} GiB "
                f"(cap {HISTORY_MEMORY_CAP / 1024**3:.0f} GiB); reduce the run size"
            )
        hist_times = [0.0]
        hist_samples = [_u_phys(u)]

    state = EvolutionState(t=0.0, theta=theta0, u=u, step=0)
    states = [state]
    diags = [_diag_row(state, cfg)]
    for _ in range(nsteps):
        state = step_forward(state, cfg)
        if store_history:
            hist_times.append(state.t)
            hist_samples.append(_u_phys(state.u))
        if state.step % cfg.cadence == 0 or state.step == nsteps:
            states.append(state)
            diags.append(_diag_row(state, cfg))
    if store_history:
        history = VelocityHistory.from_samples(grid, hist_times, hist_samples)
    elif vf is not None:
        history = VelocityHistory.from_callable(grid, vf)
    else:
        def _unavailable(t):
            raise ValueError("velocity history was not stored for this run")

        history = VelocityHistory.from_callable(grid, _unavailable)
    return RunResult(config=cfg, states=states, diagnostics=diags, history=history)


@dataclass
class DualRunResult:
    config: SimConfig
    horizon: float
    states: list                 # DualState snapshots at cadence
    series: dict                 # s, l1, linf, mean arrays


def run_dual(
    cfg: SimConfig,
    phi: ScalarField,
    horizon: float,
    history: VelocityHistory,
) -> DualRunResult:
    """Evolve the dual field in s with velocity u(., horizon - s).

    The dual advection sign is the negative of the forward sign, so the
    discrete pairing with the forward run drifts at second order in dt.
    """
    grid = cfg.grid
    if phi.grid != grid:
        raise ValueError("dual field grid does not match the configuration")
    if not history.covers(0.0, horizon):
        raise ValueError(
            f"velocity history does not cover [0, {horizon:.6g}]"
        )
    umax = history.velocity_at(horizon).max_norm()
    dt = cfg.dt if cfg.dt is not None else default_dt(grid, umax)
    nsteps = int(round(horizon / dt)) if horizon > 0 else 0
    sign = -1.0 if cfg.sign == REVERSED_SIGN else 1.0
    stepper = _Stepper(grid, dt, cfg.alpha, sign)

    ch = to_spectral(phi).coefficients
    s = 0.0
    states = [DualState(horizon=horizon, s=0.0, phi=phi, step=0)]
    svals, l1s, linfs, means = [0.0], [norms(phi).l1], [norms(phi).linf], [phi.mean()]
    for step in range(1, nsteps + 1):
        u0 = history.velocity_at(horizon - s)
        _check_cfl(grid, dt, u0.max_norm())
        umid = history.velocity_at(horizon - s - 0.5 * dt)
        ch = stepper.step(ch, _u_phys(u0), _u_phys(umid))
        s += dt
        f = to_physical(SpectralField(grid, ch))
        if not np.all(np.isfinite(f.values)):
            raise NumericalAbort(step, s)
        rec = norms(f)
        svals.append(s)
        l1s.append(rec.l1)
        linfs.append(rec.linf)
        means.append(f.mean())
        if step % cfg.cadence == 0 or step == nsteps:
            states.append(DualState(horizon=horizon, s=s, phi=f, step=step))
    series = {
        "s": np.array(svals),
        "l1": np.array(l1s),
        "linf": np.array(linfs),
        "mean": np.array(means),
    }
    return DualRunResult(config=cfg, horizon=horizon, states=states, series=series)


# ---------------------------------------------------------------------------
# concentration-center trajectory

def ball_average_velocity(u: VelocityField, center, r: float) -> np.ndarray:
    """Plain average of u over grid nodes within periodic distance r."""
    grid = u.grid
    center = np.atleast_1d(np.asarray(center, dtype=float))
    coords = grid.coords()
    dist2 = np.zeros(grid.shape)
    for xc, cc in zip(coords, center):
        dd = (xc - cc + 0.5) % 1.0 - 0.5
        dist2 += dd**2
    mask = dist2 <= r**2 + 1e-15
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise ValueError(f"ball of radius {r} contains no grid nodes")
    return np.array([float(np.mean(c.values[mask])) for c in u.components])


def track_center(
    x0,
    r: float,
    history: VelocityHistory,
    t_span: float,
    dt: float,
) -> tuple:
    """RK2 trajectory of x'(s) = ball-averaged velocity, wrapped to the torus."""
    if not 0.0 < r <= 0.5:
        raise ValueError(f"radius must be in (0, 1/2], got {r}")
    if not history.covers(0.0, t_span):
        raise ValueError(f"velocity history does not cover [0, {t_span:.6g}]")
    x = np.atleast_1d(np.asarray(x0, dtype=float)) % 1.0
    nsteps = int(round(t_span / dt)) if t_span > 0 else 0
    times = [0.0]
    traj = [x.copy()]
    s = 0.0
    for _ in range(nsteps):
        k1 = ball_average_velocity(history.velocity_at(s), x, r)
        k2 = ball_average_velocity(history.velocity_at(s + dt), (x + dt * k1) % 1.0, r)
        x = (x + 0.5 * dt * (k1 + k2)) % 1.0
        s += dt
        times.append(s)
        traj.append(x.copy())
    return np.array(times), np.array(traj)
