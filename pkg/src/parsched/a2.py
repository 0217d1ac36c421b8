"""Configuration-guessing lane family with core and reserve machines.

Each lane commits to a *target configuration*: an assignment of one job
class (or none) to each core machine, derived from a sparse guess vector
u.  Large jobs fill their class's core slots and overflow to the reserve
machines by best fit; small jobs pile onto core machines under an exact
load ceiling.  The family size depends only on the accuracy parameter,
never on the machine count, which is the whole point of the
sparsification.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import Job, Schedule
from .rational import ceil_log

__all__ = [
    "A2Params",
    "TargetConfiguration",
    "A2State",
    "A2Family",
    "AlgoChoice",
    "a2_params",
    "a2_classify",
    "a2_config_from_u",
    "a2_is_valid",
    "a2_valid_u",
    "a2_family_size",
    "a2_family",
    "a2_class_counts",
    "a3_dispatch",
    "u_to_lane_index",
    "lane_index_to_u",
    "default_lane_cap",
]

SMALL = 0

_LANE_CAP_ENV = "PARSCHED_LANE_CAP"
_DEFAULT_LANE_CAP = 500_000


def default_lane_cap() -> int:
    return int(os.environ.get(_LANE_CAP_ENV, _DEFAULT_LANE_CAP))


@dataclass(frozen=True)
class A2Params:
    """Exact parameters of the configuration family for one (eps, m, T).

    Classes 1..levels cover medium jobs in (a_i, b_i] * T; classes
    levels+1..2*levels-1 cover their doubled ranges (2a_i, 2b_i] * T.
    Core machines are 1..mu, reserve machines mu+1..m.  All thresholds
    carry the factor T so that job sizes stay untouched in reports.
    """

    eps: Fraction
    eps_prime: Fraction
    lam: int
    levels: int  # l; class count is 2*levels - 1
    a: tuple[Fraction, ...]  # a[i-1] = a_i * T
    b: tuple[Fraction, ...]
    mu: int
    kappa: int
    m0: int
    m: int
    T: Fraction

    @property
    def n_classes(self) -> int:
        return 2 * self.levels - 1

    @property
    def small_max(self) -> Fraction:
        return self.a[0]

    @property
    def load_cap(self) -> Fraction:
        """Per-machine ceiling (4/3 + eps) * T enforced by every rule."""
        return (Fraction(4, 3) + self.eps) * self.T

    @property
    def fill_line(self) -> Fraction:
        """(1 + eps') * T, the level small loads are meant to reach."""
        return (1 + self.eps_prime) * self.T

    @property
    def class_bounds(self) -> tuple[Fraction, ...]:
        """Upper endpoints of classes 1..2*levels-1, strictly increasing."""
        doubled = tuple(2 * self.b[i] for i in range(self.levels - 1))
        return self.b + doubled

    @property
    def top_bound(self) -> Fraction:
        return 2 * self.b[self.levels - 2] if self.levels >= 2 else self.b[-1]

    def slots_of(self, cls: int) -> int:
        """Core slot count for a class: two medium jobs or one doubled job."""
        if not 1 <= cls <= self.n_classes:
            raise ValueError("class out of range")
        return 2 if cls <= self.levels else 1

    def ell_bounds_of(self, cls: int) -> tuple[Fraction, Fraction]:
        """(targeted minimum, targeted maximum) load of a class-cls machine."""
        if cls == 0:
            return Fraction(0), Fraction(0)
        base = cls if cls <= self.levels else cls - self.levels
        return 2 * self.a[base - 1], 2 * self.b[base - 1]

    def threshold(self) -> Fraction:
        """Machine count below which the census family takes over."""
        return 2 * self.levels / self.eps_prime**2


def a2_params(eps: Fraction, m: int, T: Fraction) -> A2Params:
    eps = Fraction(eps)
    T = Fraction(T)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if T <= 0:
        raise ValueError("assumed optimum must be positive")
    if m < 1:
        raise ValueError("machine count must be positive")
    eps_prime = eps / 8
    lam = ceil_log(Fraction(3, 8) + 1 / (48 * eps_prime), Fraction(2))
    levels = lam + 2
    third = Fraction(1, 3)
    slope = Fraction(1, 12) + Fraction(3, 2) * eps_prime
    a = []
    b = []
    for i in range(1, levels + 1):
        step_a = slope * Fraction(2) ** (i - lam - 1)
        step_b = slope * Fraction(2) ** (i - lam)
        a.append(max(third - 2 * eps_prime + step_a, third + 2 * eps_prime) * T)
        b.append((third - 2 * eps_prime + step_b) * T)
    mu = -((-(1 + eps_prime) * m) // (1 + 2 * eps_prime))  # exact ceiling
    kappa_val = 2 * (2 + 1 / eps_prime) * (2 * levels - 1)
    kappa = -((-kappa_val) // 1)
    m0 = (m - mu) // (2 * levels - 1)
    return A2Params(eps, eps_prime, lam, levels, tuple(a), tuple(b),
                    int(mu), int(kappa), int(m0), m, T)


def a2_classify(params: A2Params, p: Fraction) -> Optional[int]:
    """0 = small, 1..2*levels-1 = class index, None = above the top bound."""
    p = Fraction(p)
    if p <= 0:
        raise ValueError("processing time must be positive")
    if p <= params.small_max:
        return SMALL
    for i, bound in enumerate(params.class_bounds, start=1):
        if p <= bound:
            return i
    return None


def a2_class_counts(params: A2Params, jobs, clamp: bool = False) -> tuple[int, ...]:
    """Per-class counts of the large jobs in a stream (class 1..2l-1)."""
    counts = [0] * params.n_classes
    for job in jobs:
        cls = a2_classify(params, job.p)
        if cls is None:
            if clamp:
                continue
            raise ValueError(f"job of size {job.p} exceeds the top class bound")
        if cls != SMALL:
            counts[cls - 1] += 1
    return tuple(counts)


@dataclass(frozen=True)
class TargetConfiguration:
    """Vector c over the core machines; entry 0 means no large jobs."""

    params: A2Params
    c: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.c) != self.params.mu:
            raise ValueError("configuration length must equal the core size")
        if any(not 0 <= x <= self.params.n_classes for x in self.c):
            raise ValueError("configuration entries must lie in 0..2l-1")

    def machine_counts(self) -> tuple[int, ...]:
        """m_i = number of class-i core machines, i = 1..2l-1."""
        counts = [0] * self.params.n_classes
        for x in self.c:
            if x > 0:
                counts[x - 1] += 1
        return tuple(counts)

    def mu1(self) -> int:
        return sum(self.machine_counts()[: self.params.levels])

    def mu2(self) -> int:
        return sum(self.machine_counts()[self.params.levels :])


def a2_config_from_u(params: A2Params, u: Sequence[int]) -> TargetConfiguration:
    """Expand a sparse guess u into a concrete core configuration.

    Class i claims u_i * m0 consecutive core machines; the raw vector is
    truncated to the core size or padded with zero entries.
    """
    u = tuple(int(x) for x in u)
    if len(u) != params.n_classes:
        raise ValueError("u length must be 2l-1")
    if any(not 0 <= x <= params.kappa for x in u):
        raise ValueError("u entries must lie in 0..kappa")
    c: list[int] = []
    for i, ui in enumerate(u, start=1):
        if len(c) >= params.mu:
            break
        c.extend([i] * min(ui * params.m0, params.mu - len(c)))
    c.extend([0] * (params.mu - len(c)))
    return TargetConfiguration(params, tuple(c))


def a2_is_valid(params: A2Params, config: TargetConfiguration, counts: Sequence[int]) -> bool:
    """True iff the sequence census supports the configuration.

    Core demand must be covered class by class (two jobs per medium
    machine, one per doubled machine) and the surplus large jobs must
    fit on the reserve machines, pairing mediums two per machine.
    """
    counts = tuple(int(x) for x in counts)
    if len(counts) != params.n_classes:
        raise ValueError("counts length must be 2l-1")
    m_i = config.machine_counts()
    levels = params.levels
    for i in range(levels):
        if 2 * m_i[i] > counts[i]:
            return False
    for i in range(levels, params.n_classes):
        if m_i[i] > counts[i]:
            return False
    mu1 = config.mu1()
    mu2 = config.mu2()
    surplus_medium = sum(counts[:levels]) - 2 * mu1
    surplus_big = sum(counts[levels:]) - mu2
    need = (surplus_medium + 1) // 2 + surplus_big
    return need <= params.m - params.mu


def a2_valid_u(params: A2Params, counts: Sequence[int]) -> tuple[int, ...]:
    """The canonical guess floor(n_i / (2*m0)) / floor(n_i / m0).

    Requires the machine count to be at or above the family threshold
    and the census to be packable at all; under those premises the
    resulting configuration is always valid.
    """
    counts = tuple(int(x) for x in counts)
    if Fraction(params.m) < params.threshold():
        raise ValueError("machine count below the family threshold; dispatch elsewhere")
    levels = params.levels
    packing = (sum(counts[:levels]) + 1) // 2 + sum(counts[levels:])
    if packing > params.m:
        raise ValueError("census cannot belong to a sequence with optimum <= T")
    u = []
    for i in range(params.n_classes):
        if i < levels:
            u.append(counts[i] // (2 * params.m0))
        else:
            u.append(counts[i] // params.m0)
    if any(x > params.kappa for x in u):
        raise ValueError("guess entry above kappa; census inconsistent with T")
    return tuple(u)


def a2_family_size(params: A2Params) -> int:
    return (params.kappa + 1) ** params.n_classes


def u_to_lane_index(params: A2Params, u: Sequence[int]) -> int:
    """Position of u in the lexicographic enumeration (u_1 most significant)."""
    idx = 0
    for x in u:
        if not 0 <= x <= params.kappa:
            raise ValueError("u entries must lie in 0..kappa")
        idx = idx * (params.kappa + 1) + int(x)
    return idx


def lane_index_to_u(params: A2Params, idx: int) -> tuple[int, ...]:
    base = params.kappa + 1
    digits = []
    for _ in range(params.n_classes):
        digits.append(idx % base)
        idx //= base
    if idx:
        raise ValueError("lane index out of range")
    return tuple(reversed(digits))


class A2State:
    """Mutable lane state for one target configuration.

    check_fill_line=True verifies after every job that at most one core
    machine holds small jobs while sitting strictly below the fill line;
    violations are counted and optionally raised.
    """

    def __init__(
        self,
        config: TargetConfiguration,
        label: int = 0,
        check_fill_line: bool = True,
        strict: bool = False,
    ):
        params = config.params
        self.params = params
        self.config = config
        self.m = params.m
        self.label = label
        self.schedule = Schedule(params.m, label)
        self.loads = [Fraction(0)] * params.m
        self.ell_s = [Fraction(0)] * params.mu
        self.slots_left = [params.slots_of(cls) if cls else 0 for cls in config.c]
        bounds = [params.ell_bounds_of(cls) for cls in config.c]
        self.ell_minus = [lo for lo, _ in bounds]
        self.ell_plus = [hi for _, hi in bounds]
        self._admissible: list[list[int]] = [[] for _ in range(params.n_classes)]
        for j, cls in enumerate(config.c):
            if cls:
                self._admissible[cls - 1].append(j)
        for lst in self._admissible:
            lst.reverse()  # pop() yields the lowest index first
        self.check_fill_line = check_fill_line
        self.strict = strict
        self.fill_violations = 0
        self._open_below = 0  # core machines with ell_s > 0 below the fill line

    def _propose_large(self, cls: int, p: Fraction) -> int:
        lst = self._admissible[cls - 1]
        while lst and self.slots_left[lst[-1]] == 0:
            lst.pop()
        if lst:
            return lst[-1] + 1
        params = self.params
        if params.mu == params.m:
            # No reserve machines exist (tiny m); out of the guarantee
            # regime, complete with the least loaded core machine.
            j = min(range(params.m), key=lambda q: (self.loads[q], q))
            return j + 1
        best = -1
        for j in range(params.mu, params.m):
            if self.loads[j] + p <= params.load_cap:
                if best < 0 or self.loads[j] > self.loads[best]:
                    best = j
        if best < 0:
            best = params.mu
        return best + 1

    def _propose_small(self, p: Fraction) -> int:
        params = self.params
        cap = params.load_cap
        best = -1
        for j in range(params.mu):
            if self.ell_s[j] > 0:
                if self.ell_plus[j] + self.ell_s[j] + p <= cap:
                    return j + 1
            elif self.ell_plus[j] + p <= cap:
                if best < 0 or self.ell_minus[j] < self.ell_minus[best]:
                    best = j
        if best < 0:
            best = 0
        return best + 1

    def propose(self, job: Job) -> Optional[int]:
        cls = a2_classify(self.params, job.p)
        if cls is None:
            return None
        if cls == SMALL:
            return self._propose_small(job.p)
        return self._propose_large(cls, job.p)

    def record(self, job: Job, machine: int) -> None:
        cls = a2_classify(self.params, job.p)
        if cls is None:
            raise ValueError("cannot record a job that has no class")
        j = machine - 1
        if cls != SMALL and j < self.params.mu and self.config.c[j] == cls:
            if self.slots_left[j] > 0:
                self.slots_left[j] -= 1
        if cls == SMALL:
            if j >= self.params.mu:
                raise ValueError("small jobs belong on core machines")
            line = self.params.fill_line
            was_open = self.ell_s[j] > 0 and self.ell_minus[j] + self.ell_s[j] < line
            self.ell_s[j] += job.p
            now_open = self.ell_minus[j] + self.ell_s[j] < line
            if was_open and not now_open:
                self._open_below -= 1
            elif not was_open and now_open:
                self._open_below += 1
        self.loads[j] += job.p
        self.schedule.assign(machine, job)
        if self.check_fill_line and self._open_below > 1:
            self.fill_violations += 1
            if self.strict:
                raise AssertionError(
                    "more than one core machine holds small jobs below the fill line"
                )

    def step(self, job: Job) -> Optional[int]:
        machine = self.propose(job)
        if machine is not None:
            self.record(job, machine)
        return machine


class A2Family:
    """Enumerated guess vectors for one parameter choice; lanes on demand."""

    def __init__(self, params: A2Params, vectors: list[tuple[int, ...]]):
        self.params = params
        self.vectors = vectors

    @property
    def size(self) -> int:
        return len(self.vectors)

    def lane(self, k: int, **kwargs) -> A2State:
        config = a2_config_from_u(self.params, self.vectors[k])
        return A2State(config, label=k, **kwargs)

    def lanes(self, **kwargs) -> list[A2State]:
        return [self.lane(k, **kwargs) for k in range(self.size)]


def a2_family(
    eps: Fraction,
    m: int,
    T: Fraction,
    u: Optional[Sequence[int]] = None,
    lane_cap: Optional[int] = None,
) -> A2Family:
    """Full family (all u vectors, cap-guarded) or a single targeted lane."""
    params = a2_params(eps, m, T)
    if u is not None:
        return A2Family(params, [tuple(int(x) for x in u)])
    if lane_cap is None:
        lane_cap = default_lane_cap()
    total = a2_family_size(params)
    if total > lane_cap:
        raise RuntimeError(
            f"full family has {total} lanes, above the cap {lane_cap}; "
            "use a targeted vector or raise the cap"
        )
    vectors = list(itertools.product(range(params.kappa + 1), repeat=params.n_classes))
    return A2Family(params, vectors)


@dataclass(frozen=True)
class AlgoChoice:
    """Outcome of the machine-count dispatch between the two families."""

    kind: str  # "a1" or "a2"
    eps: Fraction
    m: int
    T: Fraction
    threshold: Fraction


def a3_dispatch(eps: Fraction, m: int, T: Fraction) -> AlgoChoice:
    """Configuration family when m clears the threshold, else census at 1/3."""
    eps = Fraction(eps)
    params = a2_params(eps, m, Fraction(T))
    threshold = params.threshold()
    if Fraction(m) < threshold:
        return AlgoChoice("a1", Fraction(1, 3), m, Fraction(T), threshold)
    return AlgoChoice("a2", eps, m, Fraction(T), threshold)
