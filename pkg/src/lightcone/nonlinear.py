"""Energy-critical nonlinear flow for radial data: the non-radiative fixed
point and the wave operator, both by plain Picard iteration."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fields import CauchyData, Grid, ModeIndex, SourceTerm, Trajectory, norm_W, norm_X, sphere_area
from .hankel import free_trajectory
from .duhamel import duhamel_from_plus_infinity, nonradiative_source_solve
from .radiation import RadiationProfile, invert_radiation
from .exterior import exterior_energy_measure, radiation_asymptotics_check

__all__ = [
    "NonlinearityConfig",
    "PicardReport",
    "ConvergenceError",
    "time_nodes",
    "evaluate_nonlinearity",
    "phi_map",
    "wave_operator",
    "calibrate_threshold",
    "lipschitz_ratio",
]


class ConvergenceError(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class NonlinearityConfig:
    """``f(x) = sigma |x|^(q-1) x`` with ``q = (d+2)/(d-2)``."""

    d: int = 3
    sigma: int = -1

    def __post_init__(self):
        if self.d not in (3, 5):
            raise ValueError("only d = 3 and d = 5 are supported")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")

    @property
    def q(self) -> float:
        return (self.d + 2) / (self.d - 2)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.sigma * np.abs(x) ** (self.q - 1) * x

    def on_coefficient(self, v):
        """Radial coefficient of ``f(v Y_0)``, with ``Y_0 = |S^(d-1)|^(-1/2)``."""
        y0 = sphere_area(self.d) ** -0.5
        return y0 ** (self.q - 1) * self(v)


@dataclass
class PicardReport:
    iterations: int = 0
    differences: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    converged: bool = False
    final_residual: float = float("nan")
    window: tuple = (0.0, 0.0)
    tail_estimate: float = 0.0
    start_time: float | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "differences": list(self.differences),
            "ratios": list(self.ratios),
            "converged": self.converged,
            "final_residual": self.final_residual,
            "window": list(self.window),
            "tail_estimate": self.tail_estimate,
            "start_time": self.start_time,
            "message": self.message,
        }

    def to_csv(self) -> str:
        lines = ["iteration,x_difference,ratio"]
        for i, dval in enumerate(self.differences):
            ratio = self.ratios[i - 1] if i >= 1 and i - 1 < len(self.ratios) else ""
            lines.append(f"{i + 1},{dval!r},{ratio!r}" if ratio != "" else f"{i + 1},{dval!r},")
        return "\n".join(lines) + "\n"


def time_nodes(start: float, stop: float, dt: float) -> np.ndarray:
    """Uniform nodes from ``start`` to ``stop`` that hit multiples of ``dt`` exactly."""
    k0 = int(round(start / dt))
    k1 = int(round(stop / dt))
    return np.arange(k0, k1 + 1) * dt


def _require_radial(modes) -> ModeIndex:
    modes = tuple(modes)
    if len(modes) != 1 or modes[0].l != 0:
        raise ValueError("the nonlinear flow is implemented for radial (single l = 0 channel) states only")
    return modes[0]


def evaluate_nonlinearity(tr: Trajectory, cfg: NonlinearityConfig, zero_ends: bool = False) -> SourceTerm:
    """``f(u)`` on every time slice, as a source in the velocity slot.

    With ``zero_ends`` the first and last nodes are set to zero so the
    result is a compactly supported source on the window.
    """
    mode = _require_radial(tr.modes)
    if mode.d != cfg.d:
        raise ValueError("dimension mismatch between trajectory and nonlinearity")
    grid = tr.grid
    w = grid.r ** ((mode.d - 1) / 2)
    psi = tr.field_psi(mode)
    fv = cfg.on_coefficient(psi / w) * w
    amp = grid.to_amplitude(mode.order, fv)
    if zero_ends:
        amp[0] = 0.0
        amp[-1] = 0.0
    return SourceTerm(grid, tr.times, {mode: amp})


def _slice_norms(src: SourceTerm) -> np.ndarray:
    return src.l2_norms()


def _tail_estimate(times: np.ndarray, norms: np.ndarray) -> float:
    """Power-law extrapolation of ``int ||h|| dt`` beyond both window ends."""
    total = 0.0
    K = times.size
    q = max(K // 8, 4)
    for sl, end in ((slice(K - q, K - 1), times[-2]), (slice(1, q), times[1])):
        t = np.abs(times[sl])
        y = norms[sl]
        good = (y > 0) & (t > 0)
        if good.sum() < 3:
            continue
        if np.ptp(np.log(t[good])) < 1e-12:
            continue
        slope, icpt = np.polyfit(np.log(t[good]), np.log(y[good]), 1)
        T = abs(end)
        if slope < -1.0:
            total += math.exp(icpt) * T ** (slope + 1) / (-(slope + 1))
        else:
            return float("inf")
    return total


def _x_norm(tr: Trajectory) -> float:
    return norm_X(tr)


def _picard(step, zero_traj: Trajectory, tol: float, max_iter: int, report: PicardReport):
    r = zero_traj
    prev = None
    for it in range(1, max_iter + 1):
        r_new = step(r)
        diff = _x_norm(r_new - r)
        scale = max(_x_norm(r_new), 1e-300)
        report.iterations = it
        report.differences.append(diff)
        if prev is not None and prev > 0:
            report.ratios.append(diff / prev)
        r = r_new
        if not math.isfinite(diff) or diff > 1e6:
            report.message = "iterates blew up"
            return r
        if diff <= tol * scale or diff == 0.0:
            report.converged = True
            report.final_residual = diff / scale if scale > 1e-300 else 0.0
            return r
        if len(report.ratios) >= 3 and all(x > 1.0 for x in report.ratios[-3:]):
            report.message = "differences grew for three consecutive iterations"
            return r
        prev = diff
    report.message = "iteration limit reached"
    report.final_residual = report.differences[-1] / max(_x_norm(r), 1e-300)
    return r


def phi_map(
    data: CauchyData,
    R: float,
    cfg: NonlinearityConfig,
    window: float = 40.0,
    dt: float = 0.05,
    tol: float = 1e-12,
    max_iter: int = 60,
    raise_on_failure: bool = False,
):
    """Non-radiative nonlinear solution through ``data``'s projection class.

    Solves ``u = u_L + T(f(u))`` on ``[-window, window]``, where ``u_L`` is
    the free wave from ``data`` and ``T`` the non-radiative source solve.
    Returns ``(u(0), trajectory, report)``.
    """
    mode = _require_radial(data.modes)
    if mode.d != cfg.d:
        raise ValueError("dimension mismatch between data and nonlinearity")
    times = time_nodes(-window, window, dt)
    uL = free_trajectory(data, times)
    report = PicardReport(window=(float(times[0]), float(times[-1])))
    zero = uL * 0.0
    last_src = {}

    def step(r):
        src = evaluate_nonlinearity(uL + r, cfg, zero_ends=True)
        last_src["h"] = src
        return nonradiative_source_solve(src, R)

    r = _picard(step, zero, tol, max_iter, report)
    if "h" in last_src:
        report.tail_estimate = _tail_estimate(times, _slice_norms(last_src["h"]))
    u = uL + r
    i0 = u.index(0.0)
    out = u.state(i0)
    if not report.converged:
        msg = f"Picard iteration did not converge: {report.message}"
        if report.ratios:
            msg += f" (last ratio {report.ratios[-1]:.3g})"
        if raise_on_failure:
            raise ConvergenceError(msg, report)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if report.tail_estimate > tol:
        warnings.warn(f"window tail estimate {report.tail_estimate:.2e} exceeds tol", RuntimeWarning, stacklevel=2)
    return out, u, report


def wave_operator(
    F: RadiationProfile,
    cfg: NonlinearityConfig,
    window: float = 40.0,
    dt: float = 0.05,
    tol: float = 1e-12,
    max_iter: int = 60,
    start_times=(0.0, 5.0, 10.0, 20.0),
    raise_on_failure: bool = False,
):
    """Nonlinear solution on ``[T, window]`` whose radiation field is ``F``.

    ``w = u - v_L`` solves ``w = -int_t^inf S_L(t-s)(0, f(v_L + w)) ds``
    with the source cut at ``window``.  ``T`` is taken from ``start_times``,
    the first one for which the iteration converges.  Returns
    ``(trajectory, v_L, report)``.
    """
    _require_radial(F.modes)
    data = invert_radiation(F)
    report = PicardReport()
    for T in start_times:
        times = time_nodes(T, window, dt)
        vL = free_trajectory(data, times)
        report = PicardReport(window=(float(times[0]), float(times[-1])), start_time=float(T))
        zero = vL * 0.0
        last_src = {}

        def step(w, vL=vL, last_src=last_src):
            src = evaluate_nonlinearity(vL + w, cfg)
            last_src["h"] = src
            return duhamel_from_plus_infinity(src)

        w = _picard(step, zero, tol, max_iter, report)
        if "h" in last_src:
            norms = _slice_norms(last_src["h"])
            report.tail_estimate = _tail_estimate(times, norms)
        if report.converged:
            return vL + w, vL, report
    msg = f"wave operator did not converge for start times {list(start_times)}: {report.message}; try a larger T"
    if raise_on_failure:
        raise ConvergenceError(msg, report)
    warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return vL + w, vL, report


def calibrate_threshold(
    profile: CauchyData,
    R: float,
    cfg: NonlinearityConfig,
    lo: float = 0.01,
    hi: float = 2.0,
    steps: int = 6,
    **kwargs,
) -> float:
    """Largest energy norm (by bisection) at which ``phi_map`` converges for ``profile``."""
    unit = profile * (1.0 / profile.h_norm())
    kwargs.setdefault("max_iter", 30)

    def ok(a):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, _, rep = phi_map(unit * a, R, cfg, **kwargs)
        return rep.converged

    if not ok(lo):
        return 0.0
    if ok(hi):
        return hi
    for _ in range(steps):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def lipschitz_ratio(u: Trajectory, v: Trajectory, cfg: NonlinearityConfig) -> float:
    """Empirical constant in ``||f(u)-f(v)||_N <= C ||u-v||_W (||u||_W^(q-1) + ||v||_W^(q-1))``."""
    from .fields import norm_N

    fu = evaluate_nonlinearity(u, cfg)
    fv = evaluate_nonlinearity(v, cfg)
    lhs = norm_N(fu + fv * -1.0)
    q = cfg.q
    rhs = norm_W(u - v) * (norm_W(u) ** (q - 1) + norm_W(v) ** (q - 1))
    return lhs / rhs if rhs > 0 else 0.0
