"""Pure-Python engines mirroring parsched._speedups exactly.

Same inputs, same enumeration order, same tie-breaking, same outputs;
only the arithmetic container differs (Python ints, so no overflow
limit).  Keep the two files in lockstep when touching either.
"""

from __future__ import annotations

__all__ = ["a2_sweep_scaled", "opt_brute_scaled"]


def a2_sweep_scaled(
    jobs: list[int],
    cls: list[int],
    m: int,
    mu: int,
    m0: int,
    n_classes: int,
    levels: int,
    kappa: int,
    cap: int,
    fill_line: int,
    ell_minus_cls: list[int],
    ell_plus_cls: list[int],
    lane_lo: int,
    lane_hi: int,
    check_fill_line: bool = True,
):
    """Simulate configuration lanes lane_lo..lane_hi-1 over the job stream.

    Lane k's guess vector is the base-(kappa+1) digits of k, most
    significant first.  Returns (per-lane makespans, fill-line violation
    count summed over lanes and steps).
    """
    if mu >= m:
        raise ValueError("engine requires at least one reserve machine")
    n = len(jobs)
    base = kappa + 1
    makespans = []
    violations = 0
    for lane in range(lane_lo, lane_hi):
        # Decode the guess vector and lay out core blocks.
        digits = [0] * n_classes
        rem = lane
        for i in range(n_classes - 1, -1, -1):
            digits[i] = rem % base
            rem //= base
        start = [0] * (n_classes + 1)
        end = [0] * (n_classes + 1)
        pos = 0
        for i in range(1, n_classes + 1):
            start[i] = pos
            pos = min(pos + digits[i - 1] * m0, mu)
            end[i] = pos
        ell_minus = [0] * mu
        ell_plus = [0] * mu
        for i in range(1, n_classes + 1):
            for j in range(start[i], end[i]):
                ell_minus[j] = ell_minus_cls[i]
                ell_plus[j] = ell_plus_cls[i]
        slot_ptr = list(start)
        slot_cnt = [0] * (n_classes + 1)
        loads = [0] * m
        ell_s = [0] * mu
        open_below = 0
        lane_viol = 0
        for t in range(n):
            p = jobs[t]
            c = cls[t]
            if c > 0:
                if slot_ptr[c] < end[c]:
                    j = slot_ptr[c]
                    slot_cnt[c] += 1
                    if slot_cnt[c] == (2 if c <= levels else 1):
                        slot_ptr[c] += 1
                        slot_cnt[c] = 0
                else:
                    best = -1
                    for r in range(mu, m):
                        if loads[r] + p <= cap and (best < 0 or loads[r] > loads[best]):
                            best = r
                    j = best if best >= 0 else mu
                loads[j] += p
            else:
                j = -1
                best = -1
                for q in range(mu):
                    if ell_s[q] > 0:
                        if ell_plus[q] + ell_s[q] + p <= cap:
                            j = q
                            break
                    elif ell_plus[q] + p <= cap:
                        if best < 0 or ell_minus[q] < ell_minus[best]:
                            best = q
                if j < 0:
                    j = best if best >= 0 else 0
                was_open = ell_s[j] > 0 and ell_minus[j] + ell_s[j] < fill_line
                ell_s[j] += p
                loads[j] += p
                now_open = ell_minus[j] + ell_s[j] < fill_line
                if was_open and not now_open:
                    open_below -= 1
                elif not was_open and now_open:
                    open_below += 1
            if check_fill_line and open_below > 1:
                lane_viol += 1
        makespans.append(max(loads) if loads else 0)
        violations += lane_viol
    return makespans, violations


def opt_brute_scaled(jobs: list[int], m: int) -> int:
    """Minimum makespan over all m**n assignments, by plain enumeration."""
    n = len(jobs)
    if n == 0:
        return 0
    loads = [0] * m
    best = sum(jobs) + 1

    def walk(idx: int, cur_max: int) -> None:
        nonlocal best
        if idx == n:
            if cur_max < best:
                best = cur_max
            return
        p = jobs[idx]
        for j in range(m):
            loads[j] += p
            walk(idx + 1, loads[j] if loads[j] > cur_max else cur_max)
            loads[j] -= p

    walk(0, 0)
    return best
