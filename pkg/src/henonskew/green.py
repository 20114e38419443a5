"""Fibered, random and averaged Green functions with certified tails.

The forward Green function along base orbit (lam_k) is
G_n(z) = d^(-n) log+ ||H_(lam_(n-1)) o ... o H_(lam_0)(z)|| and satisfies
|G_(n+1) - G_n| <= K d^(-n) once the orbit sits in V_R u V_R^+, so a depth
with K d/(d-1) d^(-n) < tol certifies the value. Orbits switch to a
log-scale representation (log of the dominant coordinate, subordinate
ratio and reciprocal) before doubles overflow; inside the invariant wedge
the switch is exact to machine precision.

Variants differ only in the map direction and in how base points are
drawn per step:

  green_plus        forward factors,  lam_k = sigma^k(lam)
  green_minus       inverse factors,  lam_k = sigma^k(lam)
  green_minus_cal   inverse factors,  lam_k = sigma^(-(k+1))(lam)
  green_minus_tilde inverse factors applied in reversed order (the
                    inverse of the forward n-composition); convergence
                    is only guaranteed for contraction-type bases
  green_random      forward/inverse factors, lam_k from a sequence
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import SHIFT, BaseDynamics, BaseSystem, FrozenSequence, ParamSequence, advance
from .errors import NotInvertible, SurjectivityRequired, UnsupportedBase
from .family import OVERFLOW_SWITCH, HenonFamily
from .filtration import FiltrationRadius, compute_radius
from .grids import SliceGrid

STATUS_UNDECIDED = 0
STATUS_ESCAPED = 1
STATUS_BOUNDED = 2
STATUS_CONVERGED = 3

STATUS_NAMES = {
    STATUS_UNDECIDED: "undecided",
    STATUS_ESCAPED: "escaped-certified",
    STATUS_BOUNDED: "bounded-certified",
    STATUS_CONVERGED: "converged",
}


@dataclass(frozen=True)
class GreenEval:
    """Green value with truncation depth and certified error bound."""

    value: float
    depth: int
    err_bound: float
    status: str


# ---------------------------------------------------------------------------
# orbit representation


class _Orbit:
    """Vectorized orbit state: explicit points plus log-scale entries.

    For forward orbits the log form tracks the dominant y coordinate
    (L = log|y|, r = x/y, u = 1/y); for inverse orbits the roles of x and
    y swap. Entries in log form are always inside the invariant wedge.
    """

    __slots__ = ("x", "y", "logm", "L", "r", "u")

    def __init__(self, x: np.ndarray, y: np.ndarray):
        n = len(x)
        self.x = np.array(x, dtype=complex)
        self.y = np.array(y, dtype=complex)
        self.logm = np.zeros(n, dtype=bool)
        self.L = np.zeros(n, dtype=float)
        self.r = np.zeros(n, dtype=complex)
        self.u = np.zeros(n, dtype=complex)

    def __len__(self) -> int:
        return len(self.x)

    def take(self, idx: np.ndarray) -> "_Orbit":
        o = _Orbit.__new__(_Orbit)
        for name in self.__slots__:
            setattr(o, name, getattr(self, name)[idx])
        return o

    def log_norm(self) -> np.ndarray:
        """log ||z|| per point (exact for both representations)."""
        out = np.empty(len(self), dtype=float)
        ex = ~self.logm
        if ex.any():
            with np.errstate(divide="ignore"):
                out[ex] = np.log(np.hypot(np.abs(self.x[ex]), np.abs(self.y[ex])))
        if self.logm.any():
            lg = self.logm
            out[lg] = self.L[lg] + 0.5 * np.log1p(np.abs(self.r[lg]) ** 2)
        return out

    def log_plus_norm(self) -> np.ndarray:
        return np.maximum(self.log_norm(), 0.0)

    def in_wedge(self, R: float, inverse: bool) -> np.ndarray:
        """Closed invariant wedge: V_R^+ forward, V_R^- backward."""
        out = self.logm.copy()
        ex = ~self.logm
        if ex.any():
            ax, ay = np.abs(self.x[ex]), np.abs(self.y[ex])
            out[ex] = (ax >= ay) & (ax > R) if inverse else (ay >= ax) & (ay > R)
        return out


def _horner(coeffs, y):
    acc = coeffs[0] * np.ones_like(y)
    for c in coeffs[1:]:
        acc = acc * y + c
    return acc


def _tail_poly(coeffs, u):
    """c_(d-1) u + c_(d-2) u^2 + ... + c_0 u^d for monic coeffs [1, c_(d-1)..c_0]."""
    acc = coeffs[-1] * np.ones_like(u)
    for c in coeffs[-2:0:-1]:
        acc = acc * u + c
    return acc * u


def _step_factor(o: _Orbit, coeffs, a, inverse: bool, T: float = OVERFLOW_SWITCH) -> None:
    """Apply one (inverse) factor in place, switching reps as needed.

    `coeffs` is (d+1,) for a shared base point or (d+1, n) per point;
    `a` is a scalar or per-point array accordingly.
    """
    coeffs = np.asarray(coeffs)
    per_point = coeffs.ndim == 2
    deg = coeffs.shape[0] - 1
    logm0 = o.logm.copy()
    ex = ~logm0
    if ex.any():
        cs = coeffs[:, ex] if per_point else coeffs
        av = a[ex] if per_point and np.ndim(a) == 1 else a
        if inverse:
            p = _horner(cs, o.x[ex])
            xn = (p - o.y[ex]) / av
            yn = o.x[ex]
        else:
            p = _horner(cs, o.y[ex])
            xn = o.y[ex]
            yn = p - av * o.x[ex]
        o.x[ex] = xn
        o.y[ex] = yn
        dom = np.abs(xn) if inverse else np.abs(yn)
        big_local = dom > T
        if big_local.any():
            big = np.zeros(len(o), dtype=bool)
            big[np.flatnonzero(ex)[big_local]] = True
            lead = o.x[big] if inverse else o.y[big]
            sub = o.y[big] if inverse else o.x[big]
            o.L[big] = np.log(np.abs(lead))
            o.r[big] = sub / lead
            o.u[big] = 1.0 / lead
            o.logm |= big
    if logm0.any():
        cs = coeffs[:, logm0] if per_point else coeffs
        av = a[logm0] if per_point and np.ndim(a) == 1 else a
        u = o.u[logm0]
        r = o.r[logm0]
        with np.errstate(under="ignore"):
            upow = u ** (deg - 1)
            if inverse:
                delta = _tail_poly(cs, u) - r * upow
                one = 1.0 + delta
                o.L[logm0] = deg * o.L[logm0] + np.log(np.abs(one)) - np.log(np.abs(av))
                o.r[logm0] = av * upow / one
                o.u[logm0] = av * upow * u / one
            else:
                delta = _tail_poly(cs, u) - av * r * upow
                one = 1.0 + delta
                o.L[logm0] = deg * o.L[logm0] + np.log(np.abs(one))
                o.r[logm0] = upow / one
                o.u[logm0] = upow * u / one


def _step_map(o: _Orbit, fam: HenonFamily, lam, inverse: bool) -> None:
    """One full map application H_lam (or its inverse) at base point(s) lam."""
    factors = tuple(reversed(fam.factors)) if inverse else fam.factors
    for f in factors:
        _step_factor(o, f.poly_coeffs(lam), f.a(lam), inverse)


# ---------------------------------------------------------------------------
# base-point suppliers


class _SigmaSupplier:
    """lam_k = sigma^(k * step)(lam), step = +1 forward or -1 backward."""

    def __init__(self, sigma: BaseDynamics, lam, back: bool = False):
        if sigma.kind == SHIFT:
            raise UnsupportedBase(
                "pointwise Green functions need identity/contraction/rotation; "
                "use green_random with a ParamSequence for shift bases"
            )
        if back and not sigma.invertible:
            raise NotInvertible(f"{sigma.kind} base has no backward orbit")
        self.sigma = sigma
        self.lam = np.asarray(lam, dtype=complex) if np.ndim(lam) else complex(lam)
        self.back = back

    def __call__(self, k: int, idx: np.ndarray | None = None):
        lam = self.lam if idx is None or np.ndim(self.lam) == 0 else self.lam[idx]
        return advance(self.sigma, lam, -(k + 1) if self.back else k)


class _SeqSupplier:
    def __init__(self, seq):
        if isinstance(seq, np.ndarray):
            seq = FrozenSequence(seq)
        self.seq = seq

    def __call__(self, k: int, idx: np.ndarray | None = None):
        return self.seq.entry(k)


# ---------------------------------------------------------------------------
# certifying engine


def _run_green(
    supplier,
    fam: HenonFamily,
    x: np.ndarray,
    y: np.ndarray,
    flt: FiltrationRadius,
    tol: float,
    n_max: int,
    inverse: bool,
):
    """Certified Green values for a batch of points sharing a lam-supply.

    Returns (value, status, depth) arrays aligned with the input points.
    """
    n_pts = len(x)
    value = np.zeros(n_pts, dtype=float)
    status = np.full(n_pts, STATUS_UNDECIDED, dtype=np.uint8)
    depth = np.full(n_pts, n_max, dtype=np.int32)

    orbit = _Orbit(x, y)
    alive = np.arange(n_pts)
    d = float(fam.degree)
    for n in range(1, n_max + 1):
        lam = supplier(n - 1, alive)
        _step_map(orbit, fam, lam, inverse)
        if flt.tail_bound(n, inverse) < tol:
            wedge = orbit.in_wedge(flt.R, inverse)
            if wedge.any():
                value[alive[wedge]] = d ** (-n) * orbit.log_plus_norm()[wedge]
                status[alive[wedge]] = STATUS_ESCAPED
                depth[alive[wedge]] = n
                keep = ~wedge
                alive = alive[keep]
                orbit = orbit.take(keep)
                if len(alive) == 0:
                    break

    if len(alive):
        wedge = orbit.in_wedge(flt.R, inverse)
        value[alive[wedge]] = d ** (-n_max) * orbit.log_plus_norm()[wedge]
        status[alive[wedge]] = STATUS_UNDECIDED
        value[alive[~wedge]] = 0.0
        status[alive[~wedge]] = STATUS_BOUNDED
    return value, status, depth


def _green_eval(value: float, status: int, depth: int, flt: FiltrationRadius, tol: float, inverse: bool) -> GreenEval:
    if status == STATUS_BOUNDED:
        err = tol
    else:
        err = flt.tail_bound(depth, inverse)
    return GreenEval(float(value), int(depth), float(err), STATUS_NAMES[status])


def _require_flt(fam, space, flt):
    return flt if flt is not None else compute_radius(fam, space)


# ---------------------------------------------------------------------------
# public point evaluations


def green_plus(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> GreenEval:
    """Forward Green function G_lam^+ at a point, certified within tol."""
    flt = _require_flt(fam, base.space, flt)
    sup = _SigmaSupplier(base.sigma, lam)
    v, s, n = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, tol, n_max, inverse=False)
    return _green_eval(v[0], s[0], n[0], flt, tol, inverse=False)


def green_minus(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> GreenEval:
    """Backward Green function along sigma-forward base indices."""
    flt = _require_flt(fam, base.space, flt)
    sup = _SigmaSupplier(base.sigma, lam)
    v, s, n = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, tol, n_max, inverse=True)
    return _green_eval(v[0], s[0], n[0], flt, tol, inverse=True)


def green_minus_cal(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> GreenEval:
    """Backward Green function with backward base indices (invertible sigma).

    Satisfies value(H_lam(z)) = (1/d) value(z) up to certified errors.
    """
    flt = _require_flt(fam, base.space, flt)
    sup = _SigmaSupplier(base.sigma, lam, back=True)
    v, s, n = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, tol, n_max, inverse=True)
    return _green_eval(v[0], s[0], n[0], flt, tol, inverse=True)


def green_minus_tilde(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 120,
    flt: FiltrationRadius | None = None,
) -> GreenEval:
    """Normalized log+ norm of the inverse of the forward n-composition.

    Experimental outside contraction-type bases: the limit is only known
    to exist when sigma contracts to a point. Values at successive depths
    are recomputed from scratch because the composition order reverses
    with n; the reported bound is the last Cauchy increment, not a
    certified tail.
    """
    flt = _require_flt(fam, base.space, flt)
    if base.sigma.kind == SHIFT:
        raise UnsupportedBase("tilde variant needs a pointwise base dynamics")
    d = float(fam.degree)
    prev = None
    last = 0.0
    for n in range(1, n_max + 1):
        orbit = _Orbit(np.array([z[0]]), np.array([z[1]]))
        # H_(sigma^(n-1) lam)^-1 is applied first, H_lam^-1 last
        for k in range(n - 1, -1, -1):
            _step_map(orbit, fam, advance(base.sigma, lam, k), inverse=True)
        cur = d ** (-n) * float(orbit.log_plus_norm()[0])
        if prev is not None and abs(cur - prev) < tol * (d - 1) / d and n >= 4:
            return GreenEval(cur, n, tol, STATUS_NAMES[STATUS_CONVERGED])
        last = abs(cur - prev) if prev is not None else cur
        prev = cur
    return GreenEval(prev if prev is not None else 0.0, n_max, last, STATUS_NAMES[STATUS_UNDECIDED])


def green_random(
    fam: HenonFamily,
    seq,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    space=None,
    inverse: bool = False,
) -> GreenEval:
    """Green function along an explicit parameter sequence.

    `seq` is a ParamSequence, FrozenSequence or plain array of base
    points; `space` is only needed when `flt` is not supplied and `seq`
    carries no space of its own.
    """
    if flt is None:
        sp = space if space is not None else getattr(seq, "space", None)
        if sp is None:
            raise UnsupportedBase("green_random needs either flt or a space to derive constants")
        flt = compute_radius(fam, sp)
    sup = _SeqSupplier(seq)
    v, s, n = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, tol, n_max, inverse)
    return _green_eval(v[0], s[0], n[0], flt, tol, inverse)


def avg_green(
    fam: HenonFamily,
    space,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_mc: int = 256,
    seed: int = 0,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> tuple[float, float]:
    """Monte-Carlo average Green function EG^+ with its standard error."""
    if n_mc < 2:
        raise UnsupportedBase("avg_green needs n_mc >= 2")
    flt = _require_flt(fam, space, flt)
    root = ParamSequence(space, seed)
    vals = np.empty(n_mc, dtype=float)
    for i in range(n_mc):
        vals[i] = green_random(fam, root.spawn(i), z, tol, n_max, flt).value
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_mc))


def pluri_green(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> float:
    """Pluricomplex Green function of K_lam: max of the two components."""
    flt = _require_flt(fam, base.space, flt)
    gp = green_plus(fam, base, lam, z, tol, n_max, flt)
    minus = green_minus_cal if base.sigma.invertible else green_minus
    gm = minus(fam, base, lam, z, tol, n_max, flt)
    return max(gp.value, gm.value)


@dataclass(frozen=True)
class OrbitClass:
    kind: str  # escaped-forward | escaped-backward | bounded | undecided
    depth: int


def classify(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    z: tuple[complex, complex],
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
) -> OrbitClass:
    """Certified orbit classification via the filtration."""
    flt = _require_flt(fam, base.space, flt)
    sup = _SigmaSupplier(base.sigma, lam)
    _, s_f, n_f = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, np.inf, n_max, inverse=False)
    if s_f[0] == STATUS_ESCAPED:
        return OrbitClass("escaped-forward", int(n_f[0]))
    _, s_b, n_b = _run_green(sup, fam, np.array([z[0]]), np.array([z[1]]), flt, np.inf, n_max, inverse=True)
    if s_b[0] == STATUS_ESCAPED:
        return OrbitClass("escaped-backward", int(n_b[0]))
    if s_f[0] == STATUS_BOUNDED and s_b[0] == STATUS_BOUNDED:
        return OrbitClass("bounded", n_max)
    return OrbitClass("undecided", n_max)


# ---------------------------------------------------------------------------
# vectorized evaluation (fields, batches, depth traces)


def green_values(
    fam: HenonFamily,
    base: BaseSystem,
    lam,
    x: np.ndarray,
    y: np.ndarray,
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    inverse: bool = False,
    backward_base: bool = False,
):
    """Vectorized Green values; lam may be per-point. Returns (value, status, depth)."""
    flt = _require_flt(fam, base.space, flt)
    sup = _SigmaSupplier(base.sigma, lam, back=backward_base)
    return _run_green(sup, fam, np.asarray(x, dtype=complex).ravel(), np.asarray(y, dtype=complex).ravel(), flt, tol, n_max, inverse)


def green_values_seq(
    fam: HenonFamily,
    seq,
    x: np.ndarray,
    y: np.ndarray,
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    inverse: bool = False,
    space=None,
):
    if flt is None:
        sp = space if space is not None else getattr(seq, "space", None)
        if sp is None:
            raise UnsupportedBase("need flt or space")
        flt = compute_radius(fam, sp)
    sup = _SeqSupplier(seq)
    return _run_green(sup, fam, np.asarray(x, dtype=complex).ravel(), np.asarray(y, dtype=complex).ravel(), flt, tol, n_max, inverse)


@dataclass
class GreenField:
    """Green values rasterized on a slice; shares one depth/tol policy."""

    grid: SliceGrid
    status: np.ndarray
    depth: np.ndarray
    tol: float
    n_max: int
    variant: str

    @property
    def values(self) -> np.ndarray:
        return self.grid.data

    @property
    def undecided(self) -> int:
        return int(np.count_nonzero(self.status == STATUS_UNDECIDED))


def _field_from_flat(grid, v, s, n, tol, n_max, variant):
    shape = (grid.ny, grid.nx)
    return GreenField(
        grid=grid.with_data(v.reshape(shape)),
        status=s.reshape(shape),
        depth=n.reshape(shape),
        tol=tol,
        n_max=n_max,
        variant=variant,
    )


def _run_field(run_chunk, grid: SliceGrid, threads: int = 1):
    x, y = grid.points()
    xf, yf = x.ravel(), y.ravel()
    if threads <= 1:
        return run_chunk(xf, yf)
    from concurrent.futures import ThreadPoolExecutor

    bounds = np.linspace(0, len(xf), threads + 1, dtype=int)
    parts_v = np.empty(len(xf))
    parts_s = np.empty(len(xf), dtype=np.uint8)
    parts_n = np.empty(len(xf), dtype=np.int32)

    def work(i):
        lo, hi = bounds[i], bounds[i + 1]
        v, s, n = run_chunk(xf[lo:hi], yf[lo:hi])
        parts_v[lo:hi] = v
        parts_s[lo:hi] = s
        parts_n[lo:hi] = n

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, range(threads)))
    return parts_v, parts_s, parts_n


def green_field(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    grid: SliceGrid,
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    inverse: bool = False,
    threads: int = 1,
) -> GreenField:
    """Rasterize a fibered Green function over a slice grid."""
    flt = _require_flt(fam, base.space, flt)

    def chunk(xs, ys):
        sup = _SigmaSupplier(base.sigma, lam)
        return _run_green(sup, fam, xs, ys, flt, tol, n_max, inverse)

    v, s, n = _run_field(chunk, grid, threads)
    return _field_from_flat(grid, v, s, n, tol, n_max, "minus" if inverse else "plus")


def green_field_seq(
    fam: HenonFamily,
    seq,
    grid: SliceGrid,
    tol: float = 1e-6,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    space=None,
    threads: int = 1,
) -> GreenField:
    """Rasterize the random Green function along one sequence."""
    if flt is None:
        sp = space if space is not None else getattr(seq, "space", None)
        if sp is None:
            raise UnsupportedBase("need flt or space")
        flt = compute_radius(fam, sp)
    if hasattr(seq, "prefix"):
        seq.prefix(n_max)  # prefetch so threaded chunks only read

    def chunk(xs, ys):
        return _run_green(_SeqSupplier(seq), fam, xs, ys, flt, tol, n_max, inverse=False)

    v, s, n = _run_field(chunk, grid, threads)
    return _field_from_flat(grid, v, s, n, tol, n_max, "random")


def avg_green_field(
    fam: HenonFamily,
    space,
    grid: SliceGrid,
    tol: float = 1e-6,
    n_mc: int = 64,
    seed: int = 0,
    n_max: int = 200,
    flt: FiltrationRadius | None = None,
    threads: int = 1,
):
    """Monte-Carlo EG^+ raster.

    Returns (mean field, per-pixel standard error, per-sequence fields'
    value stack is not retained).
    """
    flt = _require_flt(fam, space, flt)
    root = ParamSequence(space, seed)
    acc = np.zeros((grid.ny, grid.nx))
    acc2 = np.zeros_like(acc)
    any_undecided = np.zeros((grid.ny, grid.nx), dtype=bool)
    depth = np.zeros((grid.ny, grid.nx), dtype=np.int32)
    for i in range(n_mc):
        f = green_field_seq(fam, root.spawn(i), grid, tol, n_max, flt, space=space, threads=threads)
        acc += f.values
        acc2 += f.values ** 2
        any_undecided |= f.status == STATUS_UNDECIDED
        depth = np.maximum(depth, f.depth)
    mean = acc / n_mc
    var = np.maximum(acc2 / n_mc - mean ** 2, 0.0)
    stderr = np.sqrt(var / max(n_mc - 1, 1))
    status = np.where(any_undecided, STATUS_UNDECIDED, STATUS_CONVERGED).astype(np.uint8)
    field = GreenField(grid.with_data(mean), status, depth, tol, n_max, "avg")
    return field, stderr


def depth_values(
    fam: HenonFamily,
    supplier_kind: str,
    source,
    lam,
    z: tuple[complex, complex],
    depths,
    inverse: bool = False,
) -> np.ndarray:
    """G_n(z) for each n in `depths` (raw finite-depth values, no freeze).

    supplier_kind: 'sigma' (source = BaseDynamics) or 'seq' (source =
    sequence / array).
    """
    if supplier_kind == "sigma":
        sup = _SigmaSupplier(source, lam)
    else:
        sup = _SeqSupplier(source)
    depths = sorted(depths)
    d = float(fam.degree)
    orbit = _Orbit(np.array([z[0]]), np.array([z[1]]))
    out = []
    n_done = 0
    for n in depths:
        while n_done < n:
            _step_map(orbit, fam, sup(n_done, None), inverse)
            n_done += 1
        out.append(d ** (-n) * float(orbit.log_plus_norm()[0]))
    return np.array(out)


def finite_depth_green(fam: HenonFamily, words: np.ndarray, x: np.ndarray, y: np.ndarray, depth: int) -> np.ndarray:
    """Raw depth-n Green values along explicit words, vectorized.

    words has shape (n_words, depth); returns (n_words, n_points). The
    exhaustive-word average of these values is the oracle for the
    Monte-Carlo averaged Green function at the same depth.
    """
    n_words, n_pts = len(words), len(x)
    X = np.broadcast_to(np.asarray(x, dtype=complex), (n_words, n_pts)).ravel().copy()
    Y = np.broadcast_to(np.asarray(y, dtype=complex), (n_words, n_pts)).ravel().copy()
    orbit = _Orbit(X, Y)
    for k in range(depth):
        lam = np.repeat(words[:, k], n_pts)
        _step_map(orbit, fam, lam, inverse=False)
    vals = np.maximum(orbit.log_norm(), 0.0) / float(fam.degree) ** depth
    return vals.reshape(n_words, n_pts)


def holder_estimate(
    fam: HenonFamily,
    base: BaseSystem,
    lam: complex,
    region: tuple[complex, complex, float],
    n_pairs: int = 512,
    seed: int = 0,
    tol: float = 1e-6,
    flt: FiltrationRadius | None = None,
):
    """Empirical Holder data for G^+ on a ball of the given radius.

    region = (center_x, center_y, radius). Returns (beta_theory, C_emp,
    L_emp); reported, not asserted, since the true constants depend on
    the compact set and the family.
    """
    if not base.sigma.surjective:
        raise SurjectivityRequired("Holder continuity clause needs surjective sigma")
    flt = _require_flt(fam, base.space, flt)
    rng = np.random.Generator(np.random.PCG64(seed))
    cx, cy, rad = region

    n_samp = max(2 * n_pairs, 256)
    px = cx + rad * (rng.uniform(-1, 1, n_samp) + 1j * rng.uniform(-1, 1, n_samp))
    py = cy + rad * (rng.uniform(-1, 1, n_samp) + 1j * rng.uniform(-1, 1, n_samp))

    # operator norm of DH_lam over region samples and a base grid
    L_emp = 0.0
    for lam_g in np.atleast_1d(base.space.grid(8)):
        jac = np.zeros((n_samp, 2, 2), dtype=complex)
        jac[:, 0, 0] = 1.0
        jac[:, 1, 1] = 1.0
        x_cur, y_cur = px.copy(), py.copy()
        for f in fam.factors:
            c = f.poly_coeffs(lam_g)
            a = f.a(lam_g)
            dp = np.zeros_like(y_cur)
            deg = f.degree
            for k, coef in enumerate(c[:-1]):
                dp = dp * y_cur + (deg - k) * coef
            step = np.zeros((n_samp, 2, 2), dtype=complex)
            step[:, 0, 1] = 1.0
            step[:, 1, 0] = -a
            step[:, 1, 1] = dp
            jac = step @ jac
            x_cur, y_cur = y_cur, _horner(c, y_cur) - a * x_cur
        fro2 = np.sum(np.abs(jac) ** 2, axis=(1, 2))
        det2 = np.abs(jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]) ** 2
        smax2 = 0.5 * (fro2 + np.sqrt(np.maximum(fro2 ** 2 - 4 * det2, 0.0)))
        L_emp = max(L_emp, float(np.sqrt(smax2.max())))

    beta = 1.0 if L_emp <= 1.0 else min(1.0, math.log(fam.degree) / math.log(L_emp))

    g = np.empty(2 * n_pairs)
    vals, _, _ = green_values(fam, base, lam, np.concatenate((px[:n_pairs], px[n_pairs:2 * n_pairs])),
                              np.concatenate((py[:n_pairs], py[n_pairs:2 * n_pairs])), tol, 200, flt)
    g[:] = vals
    dz = np.hypot(np.abs(px[:n_pairs] - px[n_pairs:2 * n_pairs]), np.abs(py[:n_pairs] - py[n_pairs:2 * n_pairs]))
    ok = dz > 1e-14
    ratios = np.abs(g[:n_pairs] - g[n_pairs:2 * n_pairs])[ok] / dz[ok] ** (beta / 2.0)
    C_emp = float(ratios.max()) if ratios.size else 0.0
    return beta, C_emp, L_emp
