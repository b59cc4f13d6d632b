"""Norm and test-class machinery: the concentration weight, BMO and Holder
seminorms, Littlewood-Paley bands, and the mean-zero concentrated classes
used to probe Holder regularity by pairing."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grids import GridSpec, ScalarField, SpectralField, periodic_distance, to_physical, to_spectral
from .operators import inner, norms

MEAN_ZERO_FACTOR = 1e-8  # tolerance factor (times sup norm) for exact mean-zero conditions

# ---------------------------------------------------------------------------
# diagnostics sink (one JSON object per emitted record)

_diagnostics_sink = None


def set_diagnostics_sink(sink):
    """Install a callable receiving one JSON string per diagnostic record."""
    global _diagnostics_sink
    _diagnostics_sink = sink


def _digest(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values).tobytes()).hexdigest()[:16]


def _emit(operation: str, f: ScalarField, outputs: dict):
    if _diagnostics_sink is None:
        return
    record = {"operation": operation, "input_digest": _digest(f.values)}
    record.update(outputs)
    _diagnostics_sink(json.dumps(record, sort_keys=True))


# ---------------------------------------------------------------------------
# concentration weight

OMEGA_PLATEAU = 1.0 / math.sqrt(2.0)


def omega_weight(x, x0) -> float:
    """sqrt of the periodic distance, capped at 1/sqrt(2) beyond distance 1/2."""
    dist = periodic_distance(x, x0)
    return float(np.where(dist < 0.5, np.sqrt(dist), OMEGA_PLATEAU))


def omega_offset_array(grid: GridSpec) -> np.ndarray:
    """Omega evaluated at every grid offset (node minus center)."""
    o = np.arange(grid.N)
    d1 = np.minimum(o, grid.N - o) * grid.h
    if grid.d == 1:
        dist = d1
    else:
        dist = np.sqrt(d1[:, None] ** 2 + d1[None, :] ** 2)
    return np.where(dist < 0.5, np.sqrt(dist), OMEGA_PLATEAU)


def omega_weighted_mass(f: ScalarField, center) -> float:
    """int Omega(x - center) |f(x)| dx for an arbitrary (off-grid) center."""
    grid = f.grid
    center = np.atleast_1d(np.asarray(center, dtype=float))
    dist2 = np.zeros(grid.shape)
    for xc, cc in zip(grid.coords(), center):
        dd = (xc - cc + 0.5) % 1.0 - 0.5
        dist2 += dd**2
    dist = np.sqrt(dist2)
    w = np.where(dist < 0.5, np.sqrt(dist), OMEGA_PLATEAU)
    return float(np.sum(w * np.abs(f.values)) * grid.cell_volume)


def concentration_all_centers(f: ScalarField) -> np.ndarray:
    """int Omega(x - c) |f(x)| dx for every grid center c (FFT correlation)."""
    a = np.abs(f.values)
    w = omega_offset_array(f.grid)
    corr = np.fft.ifftn(np.conj(np.fft.fftn(w)) * np.fft.fftn(a)).real
    return corr * f.grid.cell_volume


# ---------------------------------------------------------------------------
# BMO

def default_bmo_radii(grid: GridSpec) -> list:
    mmax = int(math.log2(grid.N)) - 2
    return [2.0**-m for m in range(1, mmax + 1)]


def bmo_norm(f: ScalarField, radii=None, stride: int = 1, backend=None) -> float:
    """Max sampled mean oscillation over periodic balls.

    A lower bound of the continuum supremum by construction: centers are
    (strided) grid nodes, radii default to the dyadic ladder.
    """
    if radii is None:
        radii = default_bmo_radii(f.grid)
    radii = list(radii)
    if not radii:
        raise ValueError("radii list must not be empty")
    for rho in radii:
        if not 0.0 < rho <= 0.5:
            raise ValueError(f"radii must lie in (0, 1/2], got {rho}")
    best = 0.0
    for rho in radii:
        best = max(best, _kernels.bmo_oscillation(f.values, rho, stride=stride, backend=backend))
    _emit("bmo_norm", f, {"value": best, "radii": radii, "stride": stride})
    return best


# ---------------------------------------------------------------------------
# Holder seminorm, direct enumeration

PAIR_GUARD = 2**26


def holder_seminorm_direct(f: ScalarField, beta: float, backend=None) -> float:
    """Exact max over grid pairs of |f(x)-f(y)| / dist(x,y)^beta."""
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must be in (0, 1/2), got {beta}")
    grid = f.grid
    if grid.size**2 > PAIR_GUARD:
        raise ValueError(
            f"pair enumeration needs N^(2d) <= {PAIR_GUARD}; "
            f"got {grid.size**2}; use holder_from_lp instead"
        )
    value = _kernels.holder_pair_max(f.values, beta, backend=backend)
    _emit("holder_seminorm_direct", f, {"value": value, "beta": beta})
    return value


# ---------------------------------------------------------------------------
# Littlewood-Paley bands

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    interior = np.abs(t) < 1.0
    ti = t[interior]
    out[interior] = np.exp(1.0 - 1.0 / (1.0 - ti**2))
    return out


_BUMP_TOTAL = float(np.sum(_GL_WEIGHTS * _bump(_GL_NODES)))


def smooth_cutoff(xi) -> np.ndarray:
    """eta: 1 on |xi|<=1, 0 on |xi|>=2, C-infinity bridge in between.

    The bridge is the normalized tail integral of the standard bump
    exp(1 - 1/(1-t^2)) on (-1, 1), with t = 2(|xi|-1) - 1.
    """
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.where(a <= 1.0, 1.0, 0.0)
    bridge = (a > 1.0) & (a < 2.0)
    if np.any(bridge):
        t = 2.0 * (a[bridge] - 1.0) - 1.0
        # integral of the bump over (t, 1), Gauss-Legendre on the mapped interval
        half = (1.0 - t) / 2.0
        s = half[:, None] * (_GL_NODES[None, :] + 1.0) + t[:, None]
        vals = np.sum(_GL_WEIGHTS[None, :] * _bump(s), axis=1) * half
        out[bridge] = vals / _BUMP_TOTAL
    return out


def band_multiplier(grid: GridSpec, j: int) -> np.ndarray:
    """Spectral multiplier of the level-j band filter."""
    nr = grid.mode_radius()
    return smooth_cutoff(nr / 2.0**j) - smooth_cutoff(nr / 2.0 ** (j - 1))


def max_band_level(grid: GridSpec) -> int:
    return int(math.log2(grid.N)) - 1  # 2^j <= N/2


@dataclass(frozen=True)
class LPBand:
    j: int
    field: ScalarField
    sup: float


def lp_projection(f: ScalarField, j: int) -> LPBand:
    """Band-pass f around frequency 2^j."""
    if 2**j > f.grid.N // 2:
        raise ValueError(f"band level {j} not resolvable on N={f.grid.N}")
    ch = to_spectral(f).coefficients * band_multiplier(f.grid, j)
    band = to_physical(SpectralField(f.grid, ch))
    return LPBand(j=j, field=band, sup=float(np.max(np.abs(band.values))))


def lp_bands(f: ScalarField, j_min: int = 0, j_max: int | None = None) -> list:
    if j_max is None:
        j_max = max_band_level(f.grid)
    return [lp_projection(f, j) for j in range(j_min, j_max + 1)]


@dataclass(frozen=True)
class HolderFit:
    beta: float
    log_constant: float
    levels: tuple
    sups: tuple


def holder_from_lp(f: ScalarField, noise_floor_factor: float = 1e-12) -> HolderFit:
    """Estimate the Holder exponent from the decay of band sup norms."""
    jmax = max_band_level(f.grid)
    if jmax + 1 < 4:
        raise ValueError("need at least 4 resolvable bands")
    bands = lp_bands(f)
    floor = noise_floor_factor * float(np.max(np.abs(f.values)))
    usable = [(b.j, b.sup) for b in bands if b.sup > floor]
    if len(usable) < 2:
        raise ValueError(f"only {len(usable)} usable bands; cannot fit a decay rate")
    js = np.array([j for j, _ in usable], dtype=float)
    logs = np.log([s for _, s in usable])
    slope, intercept = np.polyfit(js, logs, 1)
    beta = -slope / math.log(2.0)
    fit = HolderFit(
        beta=float(beta),
        log_constant=float(intercept),
        levels=tuple(int(j) for j, _ in usable),
        sups=tuple(float(s) for _, s in usable),
    )
    _emit("holder_from_lp", f, {"beta": fit.beta, "levels": list(fit.levels)})
    return fit


# ---------------------------------------------------------------------------
# concentrated mean-zero classes

@dataclass(frozen=True)
class ClassParams:
    """Scale r and sup-norm headroom A of the concentrated test class."""

    r: float
    A: float

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise ValueError(f"r must be in (0, 1], got {self.r}")
        if self.A <= 1.0:
            raise ValueError(f"A must be > 1, got {self.A}")


@dataclass(frozen=True)
class MembershipReport:
    params: ClassParams
    linf_ratio: float
    mean_abs: float
    mean_tolerance: float
    l1_value: float
    concentration_best: float
    best_center: tuple
    member: bool
    minimal_scale: float | None

    def summary(self) -> dict:
        return {
            "r": self.params.r,
            "A": self.params.A,
            "linf_ratio": self.linf_ratio,
            "mean_abs": self.mean_abs,
            "l1": self.l1_value,
            "concentration_best": self.concentration_best,
            "best_center": list(self.best_center),
            "member": self.member,
            "minimal_scale": self.minimal_scale,
        }


def check_class_membership(f: ScalarField, params: ClassParams) -> MembershipReport:
    """Audit the four class conditions; always returns a report.

    The concentration center is the exact minimizer over all grid nodes
    (ties broken by the lexicographically smallest center).
    """
    rec = norms(f)
    grid = f.grid
    linf_bound = params.A * params.r**-grid.d
    linf_ratio = rec.linf / linf_bound
    mean_abs = abs(f.mean())
    mean_tol = MEAN_ZERO_FACTOR * max(rec.linf, 1e-300)
    conc = concentration_all_centers(f)
    flat_idx = int(np.argmin(conc.reshape(-1)))
    conc_best = float(conc.reshape(-1)[flat_idx])
    idx = np.unravel_index(flat_idx, grid.shape)
    center = tuple(float(i * grid.h) for i in idx)
    mean_ok = mean_abs <= mean_tol
    member = (
        linf_ratio <= 1.0
        and mean_ok
        and rec.l1 <= 1.0
        and conc_best <= math.sqrt(params.r)
    )
    minimal_scale = None
    if mean_ok:
        minimal_scale = max(linf_ratio, rec.l1, conc_best / math.sqrt(params.r))
    report = MembershipReport(
        params=params,
        linf_ratio=float(linf_ratio),
        mean_abs=float(mean_abs),
        mean_tolerance=float(mean_tol),
        l1_value=rec.l1,
        concentration_best=conc_best,
        best_center=center,
        member=bool(member),
        minimal_scale=minimal_scale,
    )
    _emit("check_class_membership", f, report.summary())
    return report


@dataclass(frozen=True)
class TestFunctionResult:
    field: ScalarField
    c: float
    j: int
    report: MembershipReport


DEFAULT_CLASS_A = 4.0


def make_test_function(j: int, grid: GridSpec, A: float = DEFAULT_CLASS_A) -> TestFunctionResult:
    """Canonical member of the scale-2^-j class: the periodized band kernel,
    rescaled by the largest admissible constant."""
    if 2**j > grid.N // 8:
        raise ValueError(f"level {j} profile not resolved on N={grid.N} (need 2^j <= N/8)")
    mult = band_multiplier(grid, j).astype(complex)
    base = to_physical(SpectralField(grid, mult))
    r = 2.0**-j
    base_report = check_class_membership(base, ClassParams(r=r, A=A))
    if base_report.minimal_scale is None or base_report.minimal_scale <= 0.0:
        raise ValueError("degenerate band kernel; cannot normalize")
    c = 1.0 / (base_report.minimal_scale * (1.0 + 1e-9))
    scaled = base * c
    report = check_class_membership(scaled, ClassParams(r=r, A=A))
    return TestFunctionResult(field=scaled, c=float(c), j=j, report=report)


@dataclass(frozen=True)
class ClassPairingFit:
    beta: float
    radii: tuple
    pairings: tuple


def shifted_pairings(f: ScalarField, phi: ScalarField) -> np.ndarray:
    """<f, phi(. - y)> for every grid shift y, via the spectral correlation."""
    fh = to_spectral(f).coefficients
    ph = to_spectral(phi).coefficients
    return np.fft.ifftn(fh * np.conj(ph), norm="forward").real


def holder_from_classes(f: ScalarField, r_list, A: float = DEFAULT_CLASS_A) -> ClassPairingFit:
    """Estimate the Holder exponent from pairing decay against the canonical
    test family (a lower-bound realization of the full class supremum)."""
    r_list = list(r_list)
    if not r_list:
        raise ValueError("r_list must not be empty")
    radii, pairings = [], []
    for r in r_list:
        j = round(-math.log2(r))
        if abs(2.0**-j - r) > 1e-12:
            raise ValueError(f"r values must be dyadic, got {r}")
        tf = make_test_function(j, f.grid, A=A)
        s = float(np.max(np.abs(shifted_pairings(f, tf.field))))
        radii.append(r)
        pairings.append(s)
    if len(radii) >= 2:
        slope, _ = np.polyfit(np.log(radii), np.log(np.maximum(pairings, 1e-300)), 1)
    else:
        slope = float("nan")
    fit = ClassPairingFit(beta=float(slope), radii=tuple(radii), pairings=tuple(pairings))
    _emit("holder_from_classes", f, {"beta": fit.beta, "radii": list(fit.radii)})
    return fit
