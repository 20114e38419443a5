"""Current-convergence experiments at the level of scalar potentials.

Pulling back dd^c u by a composition is dd^c of u composed with the
composition, so sup-norm convergence of the normalized potentials
d^(-n) u(H_n(z)) toward the Green potential realizes the current
statements on slice grids. Admissible potentials grow like log||z||
(mass-1 normalization) and stay bounded near the backward indeterminacy
point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import CONTRACTION, IDENTITY, BaseSystem, ParamSequence
from .errors import UnsupportedBase, ValidationError
from .family import HenonFamily
from .filtration import FiltrationRadius, compute_radius
from .green import (
    STATUS_UNDECIDED,
    _Orbit,
    _SeqSupplier,
    _SigmaSupplier,
    _step_map,
    avg_green_field,
    green_field,
    green_field_seq,
)
from .currents import laplacian_density
from .grids import SliceGrid

LOG_PLUS = "log-plus"
FUBINI_STUDY = "fubini-study"
SMOOTHED_LOG = "smoothed-log"


@dataclass(frozen=True)
class PotentialSpec:
    """Admissible scalar potential with logarithmic growth.

    kinds: 'log-plus' u = log+ ||z||, 'fubini-study' u = 1/2 log(1+||z||^2),
    'smoothed-log' u = 1/2 log(c^2 + ||z||^2).
    """

    kind: str
    c: float = 1.0
    bounded_near_iminus: bool = True

    def __post_init__(self):
        if self.kind not in (LOG_PLUS, FUBINI_STUDY, SMOOTHED_LOG):
            raise ValidationError(f"unknown potential kind {self.kind!r}")
        if self.kind == SMOOTHED_LOG and self.c <= 0:
            raise ValidationError("smoothed-log needs c > 0")

    def eval_points(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        norm = np.hypot(np.abs(x), np.abs(y))
        if self.kind == LOG_PLUS:
            with np.errstate(divide="ignore"):
                return np.maximum(np.log(norm), 0.0)
        c = 1.0 if self.kind == FUBINI_STUDY else self.c
        return 0.5 * np.log(c * c + norm ** 2)

    def eval_lognorm(self, L: np.ndarray) -> np.ndarray:
        """Value from log||z|| for points in log-scale representation."""
        if self.kind == LOG_PLUS:
            return np.maximum(L, 0.0)
        c = 1.0 if self.kind == FUBINI_STUDY else self.c
        with np.errstate(under="ignore"):
            return L + 0.5 * np.log1p(c * c * np.exp(-2.0 * L))

    def eval_orbit(self, orbit: _Orbit) -> np.ndarray:
        out = np.empty(len(orbit))
        ex = ~orbit.logm
        if ex.any():
            out[ex] = self.eval_points(orbit.x[ex], orbit.y[ex])
        if orbit.logm.any():
            out[orbit.logm] = self.eval_lognorm(orbit.log_norm()[orbit.logm])
        return out


@dataclass
class ConvergenceReport:
    """Per-depth sup errors with the A n d^-n rate fit.

    The scale A is fitted by linear least squares of e_n against the
    basis n d^(-n); residual_rel is ||e - fit|| / ||e|| in l2.
    """

    depths: list[int]
    errors: list[float]
    degree: int
    masked_fraction: float
    fit_a: float = field(init=False)
    residual_rel: float = field(init=False)

    def __post_init__(self):
        e = np.asarray(self.errors, dtype=float)
        n = np.asarray(self.depths, dtype=float)
        basis = n * float(self.degree) ** (-n)
        denom = float(basis @ basis)
        self.fit_a = float(e @ basis / denom) if denom > 0 else 0.0
        fit = self.fit_a * basis
        norm = float(np.linalg.norm(e))
        self.residual_rel = float(np.linalg.norm(e - fit) / norm) if norm > 0 else 0.0

    def monotone_from(self) -> int | None:
        """Smallest n0 with strictly decreasing errors afterwards."""
        e = self.errors
        for i in range(len(e)):
            if all(e[j + 1] < e[j] for j in range(i, len(e) - 1)):
                return self.depths[i]
        return None

    def as_csv(self) -> str:
        lines = ["n,e_n,masked_fraction"]
        lines += [f"{n},{v:.12g},{self.masked_fraction:.6g}" for n, v in zip(self.depths, self.errors)]
        return "\n".join(lines) + "\n"

    def fit_summary(self) -> str:
        return (
            f"{{\"model\": \"A*n*d^-n\", \"A\": {self.fit_a:.6g}, \"d\": {self.degree}, "
            f"\"residual_rel\": {self.residual_rel:.6g}, \"masked_fraction\": {self.masked_fraction:.6g}}}"
        )


def _pullback_stack(fam, supplier, grid: SliceGrid, u: PotentialSpec, depths, inverse=False):
    """d^(-n) u(H_n(z)) rasters for each requested depth (incremental)."""
    x, y = grid.points()
    orbit = _Orbit(x.ravel(), y.ravel())
    d = float(fam.degree)
    want = sorted(depths)
    out = {}
    n_done = 0
    for n in want:
        while n_done < n:
            _step_map(orbit, fam, supplier(n_done, None), inverse)
            n_done += 1
        out[n] = (d ** (-n) * u.eval_orbit(orbit)).reshape(grid.ny, grid.nx)
    return out


def pullback_convergence(
    fam: HenonFamily,
    seq,
    u: PotentialSpec,
    grid: SliceGrid,
    n_max: int = 12,
    tol: float = 1e-6,
    flt: FiltrationRadius | None = None,
    space=None,
    threads: int = 1,
) -> ConvergenceReport:
    """Sup-norm gap between pulled-back potentials and the Green limit.

    e_n = sup over certified cells of |d^(-n) u(H_(n,Lambda)(z)) - G_Lambda^+(z)|.
    """
    if not u.bounded_near_iminus:
        raise ValidationError("potential must be bounded near the backward indeterminacy point")
    sp = space if space is not None else getattr(seq, "space", None)
    if flt is None:
        if sp is None:
            raise UnsupportedBase("need flt or space")
        flt = compute_radius(fam, sp)
    ref = green_field_seq(fam, seq, grid, tol, max(200, n_max + flt.depth_for(tol)), flt, space=sp, threads=threads)
    mask = ref.status != STATUS_UNDECIDED
    masked_fraction = 1.0 - float(mask.mean())
    stack = _pullback_stack(fam, _SeqSupplier(seq), grid, u, range(1, n_max + 1))
    errors = [float(np.abs(stack[n] - ref.values)[mask].max()) for n in range(1, n_max + 1)]
    return ConvergenceReport(list(range(1, n_max + 1)), errors, fam.degree, masked_fraction)


def theta_average_pullback(
    fam: HenonFamily,
    space,
    u: PotentialSpec,
    grid: SliceGrid,
    n_max: int = 12,
    n_mc: int = 64,
    seed: int = 0,
    tol: float = 1e-6,
    flt: FiltrationRadius | None = None,
    threads: int = 1,
):
    """Averaged pullback against the averaged Green potential.

    Returns (report, noise_floor): e_n should fall to the Monte-Carlo
    floor estimated from both averaging errors.
    """
    if flt is None:
        flt = compute_radius(fam, space)
    ref, ref_stderr = avg_green_field(fam, space, grid, tol, n_mc, seed + 1, flt=flt, threads=threads)
    mask = ref.status != STATUS_UNDECIDED
    masked_fraction = 1.0 - float(mask.mean())

    root = ParamSequence(space, seed)
    acc = {n: np.zeros((grid.ny, grid.nx)) for n in range(1, n_max + 1)}
    acc2 = {n: np.zeros((grid.ny, grid.nx)) for n in range(1, n_max + 1)}
    for i in range(n_mc):
        stack = _pullback_stack(fam, _SeqSupplier(root.spawn(i)), grid, u, range(1, n_max + 1))
        for n in range(1, n_max + 1):
            acc[n] += stack[n]
            acc2[n] += stack[n] ** 2
    errors = []
    floors = []
    for n in range(1, n_max + 1):
        mean = acc[n] / n_mc
        var = np.maximum(acc2[n] / n_mc - mean ** 2, 0.0)
        se = np.sqrt(var / max(n_mc - 1, 1))
        errors.append(float(np.abs(mean - ref.values)[mask].max()))
        floors.append(float((se + ref_stderr)[mask].max()))
    report = ConvergenceReport(list(range(1, n_max + 1)), errors, fam.degree, masked_fraction)
    return report, floors


def rigidity_probe(
    fam: HenonFamily,
    seq,
    u1: PotentialSpec,
    u2: PotentialSpec,
    grid: SliceGrid,
    n_max: int = 12,
    tol: float = 1e-6,
    flt: FiltrationRadius | None = None,
    space=None,
) -> float:
    """Sup distance of two admissible potentials after n_max pullbacks.

    Both converge to the same Green potential; the gap certifies the
    uniqueness (rigidity) statement numerically.
    """
    for u in (u1, u2):
        if not u.bounded_near_iminus:
            raise ValidationError("potentials must be admissible")
    sp = space if space is not None else getattr(seq, "space", None)
    if flt is None:
        if sp is None:
            raise UnsupportedBase("need flt or space")
        flt = compute_radius(fam, sp)
    ref = green_field_seq(fam, seq, grid, tol, 200, flt, space=sp)
    mask = ref.status != STATUS_UNDECIDED
    s1 = _pullback_stack(fam, _SeqSupplier(seq), grid, u1, [n_max])[n_max]
    s2 = _pullback_stack(fam, _SeqSupplier(seq), grid, u2, [n_max])[n_max]
    return float(np.abs(s1 - s2)[mask].max())


@dataclass(frozen=True)
class CutoffSpec:
    """Smooth radial bump; support radius must avoid the escape wedge."""

    radius: float | None = None  # None means psi == 1 (no cutoff)

    def eval_orbit(self, orbit: _Orbit) -> np.ndarray:
        if self.radius is None:
            return np.ones(len(orbit))
        out = np.zeros(len(orbit))
        ex = ~orbit.logm  # log-form points are far outside any bump
        if ex.any():
            n2 = (np.abs(orbit.x[ex]) ** 2 + np.abs(orbit.y[ex]) ** 2) / self.radius ** 2
            inside = n2 < 1.0
            vals = np.zeros(n2.shape)
            with np.errstate(over="ignore"):
                vals[inside] = np.exp(1.0 - 1.0 / (1.0 - n2[inside]))
            out[ex] = vals
        return out


@dataclass
class CutoffProbeReport:
    depths: list[int]
    c_fit: list[float]
    residuals: list[float]


def _smooth(arr: np.ndarray, rounds: int = 4) -> np.ndarray:
    """Separable binomial blur: weak-* testing against smooth forms."""
    out = arr.astype(float)
    for _ in range(rounds):
        pad = np.pad(out, 1, mode="edge")
        out = 0.25 * (2 * pad[1:-1, :] + pad[:-2, :] + pad[2:, :])
        pad = np.pad(out, 1, mode="edge")
        out = 0.25 * (2 * pad[:, 1:-1] + pad[:, :-2] + pad[:, 2:])
    return out


def cutoff_limit_probe(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    u: PotentialSpec,
    cutoff: CutoffSpec,
    grid: SliceGrid,
    n_max: int = 10,
    tol: float = 1e-6,
    flt: FiltrationRadius | None = None,
) -> CutoffProbeReport:
    """Limit of normalized cutoff pullbacks as a multiple of the Green current.

    Realized at slice-density level: the pullback of the cutoff current
    restricted to the slice has density psi(H^n z) * Lap[d^-n u(H^n z)]
    (the weight rides along the orbit; holomorphic pullback commutes with
    dd^c). That density is positive up to discretization and is fitted as
    c * Lap(G^+); a decreasing residual with c > 0 realizes "every limit
    point is a positive multiple of the forward Green current" in the
    uniqueness regime (identity or contraction bases only).
    """
    if base.sigma.kind not in (IDENTITY, CONTRACTION):
        raise UnsupportedBase("unique-limit regime requires identity or contraction base")
    if flt is None:
        flt = compute_radius(fam, base.space)
    if cutoff.radius is not None and cutoff.radius > flt.R:
        raise ValidationError("cutoff support must stay clear of the escape wedge V_R^+")
    ref = green_field(fam, base, lam, grid, tol, 200, flt)
    ref_den = _smooth(laplacian_density(ref.values, grid.dx, grid.dy)).ravel()
    denom = float(ref_den @ ref_den)
    if denom == 0:
        raise ValidationError("reference Green density vanishes on this window")

    x, y = grid.points()
    orbit = _Orbit(x.ravel(), y.ravel())
    sup = _SigmaSupplier(base.sigma, lam)
    d = float(fam.degree)
    depths, cs, res = [], [], []
    for n in range(1, n_max + 1):
        _step_map(orbit, fam, sup(n - 1, None), inverse=False)
        fldn = (d ** (-n) * u.eval_orbit(orbit)).reshape(grid.ny, grid.nx)
        weight = cutoff.eval_orbit(orbit).reshape(grid.ny, grid.nx)[1:-1, 1:-1]
        den = _smooth(weight * laplacian_density(fldn, grid.dx, grid.dy)).ravel()
        c = float(den @ ref_den / denom)
        scale = float(np.linalg.norm(den))
        r = float(np.linalg.norm(den - c * ref_den) / scale) if scale > 0 else 1.0
        depths.append(n)
        cs.append(c)
        res.append(r)
    return CutoffProbeReport(depths, cs, res)


def pullback_identity_check(fam, seq, grid: SliceGrid, u: PotentialSpec, n: int, space=None) -> float:
    """Max gap between incremental and from-scratch depth-n pullbacks."""
    inc = _pullback_stack(fam, _SeqSupplier(seq), grid, u, range(1, n + 1))[n]

    x, y = grid.points()
    orbit = _Orbit(x.ravel(), y.ravel())
    sup = _SeqSupplier(seq)
    for k in range(n):
        _step_map(orbit, fam, sup(k, None), inverse=False)
    direct = (float(fam.degree) ** (-n) * u.eval_orbit(orbit)).reshape(grid.ny, grid.nx)
    return float(np.abs(inc - direct).max())
