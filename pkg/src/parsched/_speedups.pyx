# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled engines for the hot loops.

Semantics mirror parsched._fallback line for line; both run on the
scaled integers produced by parsched._scaling, so every comparison is
exact.  Inputs must fit comfortably in 64-bit integers — the caller
checks magnitudes and falls back to the pure-Python engine otherwise.
Keep the two files in lockstep when touching either.
"""

from libc.stdlib cimport calloc, free
from libc.string cimport memset

ctypedef long long i64


cdef inline void _fail_alloc() except *:
    raise MemoryError("engine allocation failed")


def a2_sweep_scaled(jobs, cls, int m, int mu, int m0, int n_classes, int levels,
                    int kappa, i64 cap, i64 fill_line,
                    ell_minus_cls, ell_plus_cls,
                    long long lane_lo, long long lane_hi,
                    bint check_fill_line=True):
    """Simulate configuration lanes lane_lo..lane_hi-1 over the job stream.

    Lane k's guess vector is the base-(kappa+1) digits of k, most
    significant first.  Returns (per-lane makespans, fill-line violation
    count summed over lanes and steps).
    """
    if mu >= m:
        raise ValueError("engine requires at least one reserve machine")
    cdef Py_ssize_t n = len(jobs)
    cdef i64 base = kappa + 1
    cdef i64 total = 0
    cdef Py_ssize_t t
    cdef i64* p_arr = <i64*> calloc(max(n, 1), sizeof(i64))
    cdef int* c_arr = <int*> calloc(max(n, 1), sizeof(int))
    cdef i64* emc = <i64*> calloc(n_classes + 1, sizeof(i64))
    cdef i64* epc = <i64*> calloc(n_classes + 1, sizeof(i64))
    cdef i64* loads = <i64*> calloc(m, sizeof(i64))
    cdef i64* ell_s = <i64*> calloc(mu, sizeof(i64))
    cdef i64* ell_minus = <i64*> calloc(mu, sizeof(i64))
    cdef i64* ell_plus = <i64*> calloc(mu, sizeof(i64))
    cdef int* digits = <int*> calloc(n_classes, sizeof(int))
    cdef int* start = <int*> calloc(n_classes + 1, sizeof(int))
    cdef int* end = <int*> calloc(n_classes + 1, sizeof(int))
    cdef int* slot_ptr = <int*> calloc(n_classes + 1, sizeof(int))
    cdef int* slot_cnt = <int*> calloc(n_classes + 1, sizeof(int))
    if (p_arr == NULL or c_arr == NULL or emc == NULL or epc == NULL or
            loads == NULL or ell_s == NULL or ell_minus == NULL or
            ell_plus == NULL or digits == NULL or start == NULL or
            end == NULL or slot_ptr == NULL or slot_cnt == NULL):
        _fail_alloc()
    makespans = []
    cdef i64 violations = 0
    cdef long long lane, rem
    cdef int i, j, q, best, c, pos, capacity
    cdef i64 p, lane_viol, mk, was_open, now_open
    cdef int open_below
    try:
        for t in range(n):
            p_arr[t] = jobs[t]
            c_arr[t] = cls[t]
            total += p_arr[t]
        for i in range(1, n_classes + 1):
            emc[i] = ell_minus_cls[i]
            epc[i] = ell_plus_cls[i]
        if total + cap < 0 or total > (<i64> 1) << 62:
            raise OverflowError("scaled magnitudes too large for the compiled engine")

        for lane in range(lane_lo, lane_hi):
            rem = lane
            for i in range(n_classes - 1, -1, -1):
                digits[i] = <int> (rem % base)
                rem //= base
            pos = 0
            for i in range(1, n_classes + 1):
                start[i] = pos
                pos = pos + digits[i - 1] * m0
                if pos > mu:
                    pos = mu
                end[i] = pos
                slot_ptr[i] = start[i]
                slot_cnt[i] = 0
            memset(ell_minus, 0, mu * sizeof(i64))
            memset(ell_plus, 0, mu * sizeof(i64))
            for i in range(1, n_classes + 1):
                for j in range(start[i], end[i]):
                    ell_minus[j] = emc[i]
                    ell_plus[j] = epc[i]
            memset(loads, 0, m * sizeof(i64))
            memset(ell_s, 0, mu * sizeof(i64))
            open_below = 0
            lane_viol = 0
            with nogil:
                for t in range(n):
                    p = p_arr[t]
                    c = c_arr[t]
                    if c > 0:
                        if slot_ptr[c] < end[c]:
                            j = slot_ptr[c]
                            slot_cnt[c] += 1
                            capacity = 2 if c <= levels else 1
                            if slot_cnt[c] == capacity:
                                slot_ptr[c] += 1
                                slot_cnt[c] = 0
                        else:
                            best = -1
                            for q in range(mu, m):
                                if loads[q] + p <= cap and (best < 0 or loads[q] > loads[best]):
                                    best = q
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
                        was_open = 1 if (ell_s[j] > 0 and ell_minus[j] + ell_s[j] < fill_line) else 0
                        ell_s[j] += p
                        loads[j] += p
                        now_open = 1 if ell_minus[j] + ell_s[j] < fill_line else 0
                        if was_open and not now_open:
                            open_below -= 1
                        elif now_open and not was_open:
                            open_below += 1
                    if check_fill_line and open_below > 1:
                        lane_viol += 1
            mk = 0
            for j in range(m):
                if loads[j] > mk:
                    mk = loads[j]
            makespans.append(mk)
            violations += lane_viol
    finally:
        free(p_arr); free(c_arr); free(emc); free(epc); free(loads)
        free(ell_s); free(ell_minus); free(ell_plus); free(digits)
        free(start); free(end); free(slot_ptr); free(slot_cnt)
    return makespans, violations


cdef i64 _walk(i64* p, Py_ssize_t n, Py_ssize_t idx, i64* loads, int m,
               i64 cur_max, i64 best) nogil:
    cdef int j
    cdef i64 nm, r
    if idx == n:
        return cur_max if cur_max < best else best
    for j in range(m):
        loads[j] += p[idx]
        nm = loads[j] if loads[j] > cur_max else cur_max
        r = _walk(p, n, idx + 1, loads, m, nm, best)
        if r < best:
            best = r
        loads[j] -= p[idx]
    return best


def opt_brute_scaled(jobs, int m) -> int:
    """Minimum makespan over all m**n assignments, by plain enumeration."""
    cdef Py_ssize_t n = len(jobs)
    if n == 0:
        return 0
    cdef i64* p_arr = <i64*> calloc(n, sizeof(i64))
    cdef i64* loads = <i64*> calloc(m, sizeof(i64))
    if p_arr == NULL or loads == NULL:
        _fail_alloc()
    cdef i64 total = 0
    cdef Py_ssize_t t
    cdef i64 best
    try:
        for t in range(n):
            p_arr[t] = jobs[t]
            total += p_arr[t]
        if total + 1 > (<i64> 1) << 62:
            raise OverflowError("scaled magnitudes too large for the compiled engine")
        best = total + 1
        with nogil:
            best = _walk(p_arr, n, 0, loads, m, 0, best)
    finally:
        free(p_arr)
        free(loads)
    return best
