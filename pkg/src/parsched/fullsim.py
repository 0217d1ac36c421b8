"""Backend front-end for the hot loops.

At import time the compiled engine is preferred; the pure-Python twin
takes over when the extension is unavailable, when
``PARSCHED_FORCE_FALLBACK=1`` is set, or when scaled magnitudes would
not fit in 64-bit integers.  Both engines implement identical
semantics, so results never depend on the backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import _fallback
from ._scaling import common_scale, scale_values
from .a2 import A2Params, a2_classify, a2_params, default_lane_cap
from .core import JobSequence

try:  # pragma: no cover - exercised implicitly by backend tests
    from . import _speedups as _kernel
except ImportError:  # pragma: no cover
    _kernel = None

import os

__all__ = [
    "A2Sweep",
    "kernel_available",
    "active_backend",
    "a2_full_sweep",
    "a2_lane_makespan",
    "brute_force_opt",
]

_I64_LIMIT = 1 << 62


def kernel_available() -> bool:
    return _kernel is not None


def active_backend(requested: Optional[str] = None) -> str:
    """Resolve 'kernel' or 'fallback' from the request and environment."""
    if requested not in (None, "auto", "kernel", "fallback"):
        raise ValueError(f"unknown backend {requested!r}")
    if requested == "fallback":
        return "fallback"
    forced = os.environ.get("PARSCHED_FORCE_FALLBACK", "") not in ("", "0")
    if requested == "kernel":
        if _kernel is None:
            raise RuntimeError("compiled engine is not available")
        return "kernel"
    if forced or _kernel is None:
        return "fallback"
    return "kernel"


@dataclass
class A2Sweep:
    """Result of sweeping a lane range of the configuration family."""

    params: A2Params
    lane_lo: int
    lane_hi: int
    scale: int
    makespans_scaled: list[int]
    fill_violations: int
    backend: str

    @property
    def lane_count(self) -> int:
        return self.lane_hi - self.lane_lo

    def makespan(self, lane: int) -> Fraction:
        return Fraction(self.makespans_scaled[lane - self.lane_lo], self.scale)

    def best(self) -> tuple[int, Fraction]:
        """(lane index, makespan) of the winner; ties go to the lower lane."""
        k = min(range(len(self.makespans_scaled)), key=lambda i: (self.makespans_scaled[i], i))
        return self.lane_lo + k, Fraction(self.makespans_scaled[k], self.scale)


def _prepare(params: A2Params, jobs: Sequence[Fraction]):
    cls = []
    for p in jobs:
        c = a2_classify(params, p)
        if c is None:
            raise ValueError(
                f"job of size {p} exceeds the top class bound for T={params.T}; "
                "the assumed optimum is too small for a standalone run"
            )
        cls.append(c)
    ell_minus_cls = [Fraction(0)]
    ell_plus_cls = [Fraction(0)]
    for c in range(1, params.n_classes + 1):
        lo, hi = params.ell_bounds_of(c)
        ell_minus_cls.append(lo)
        ell_plus_cls.append(hi)
    to_scale = list(jobs) + ell_minus_cls + ell_plus_cls + [params.load_cap, params.fill_line]
    scale = common_scale(to_scale)
    jobs_s = scale_values(list(jobs), scale)
    emc = scale_values(ell_minus_cls, scale)
    epc = scale_values(ell_plus_cls, scale)
    cap = scale_values([params.load_cap], scale)[0]
    fill = scale_values([params.fill_line], scale)[0]
    return cls, scale, jobs_s, emc, epc, cap, fill


def a2_full_sweep(
    eps: Fraction,
    m: int,
    T: Fraction,
    jobs: Sequence[Fraction],
    lanes: Optional[tuple[int, int]] = None,
    check_fill_line: bool = True,
    backend: Optional[str] = None,
    lane_cap: Optional[int] = None,
) -> A2Sweep:
    """Simulate a lane range (default: the whole family) in one pass."""
    params = a2_params(Fraction(eps), m, Fraction(T))
    total_lanes = (params.kappa + 1) ** params.n_classes
    if lanes is None:
        if lane_cap is None:
            lane_cap = default_lane_cap()
        if total_lanes > lane_cap:
            raise RuntimeError(
                f"full family has {total_lanes} lanes, above the cap {lane_cap}"
            )
        lanes = (0, total_lanes)
    lane_lo, lane_hi = lanes
    if not 0 <= lane_lo <= lane_hi <= total_lanes:
        raise ValueError("lane range out of bounds")
    cls, scale, jobs_s, emc, epc, cap, fill = _prepare(params, jobs)
    chosen = active_backend(backend)
    if chosen == "kernel" and (sum(jobs_s) + cap) >= _I64_LIMIT:
        if backend == "kernel":
            raise OverflowError("scaled magnitudes too large for the compiled engine")
        chosen = "fallback"
    engine = _kernel if chosen == "kernel" else _fallback
    makespans, violations = engine.a2_sweep_scaled(
        jobs_s, cls, params.m, params.mu, params.m0, params.n_classes,
        params.levels, params.kappa, cap, fill, emc, epc,
        lane_lo, lane_hi, check_fill_line,
    )
    return A2Sweep(params, lane_lo, lane_hi, scale, list(makespans), int(violations), chosen)


def a2_lane_makespan(
    eps: Fraction,
    m: int,
    T: Fraction,
    jobs: Sequence[Fraction],
    lane: int,
    backend: Optional[str] = None,
) -> tuple[Fraction, int]:
    """Makespan and fill-line violations of a single lane."""
    sweep = a2_full_sweep(eps, m, T, jobs, lanes=(lane, lane + 1), backend=backend)
    return sweep.makespan(lane), sweep.fill_violations


def brute_force_opt(seq: JobSequence, backend: Optional[str] = None) -> Fraction:
    """Exact optimum by full m**n enumeration (test oracle, no pruning)."""
    sizes = seq.sizes()
    scale = common_scale(sizes)
    jobs_s = scale_values(sizes, scale)
    chosen = active_backend(backend)
    if chosen == "kernel" and sum(jobs_s) >= _I64_LIMIT:
        if backend == "kernel":
            raise OverflowError("scaled magnitudes too large for the compiled engine")
        chosen = "fallback"
    engine = _kernel if chosen == "kernel" else _fallback
    return Fraction(engine.opt_brute_scaled(jobs_s, seq.m), scale)
