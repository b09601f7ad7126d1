# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Diagonal construction of a sequence defeating a finite battery of (martingale, order) pairs.

Level s looks at x = xi|s. Case 1 holds when every entry e <= T(x) has revealed, by time
|x| + 1, some h_e(m) with m <= |x| and e + T(x) + 3 < h_e(m); the bit is then 0, F doubles and T
increments. Otherwise the bit minimizes delta = rounded weighted sum of the battery (ties to 0)
and F, T are copied.
"""

import logging
from dataclasses import dataclass, field
from typing import List

from .. import system
from .numeric import Dyadic, ONE, pow2, format_exact
from .errors import PreconditionViolated
from .martingales import weighted_sum, round_to_dyadic, check_fairness
from . import orders


class BatteryEntry:
    def __init__(self, d, h, tau=None, index=0):
        self.d, self.h = d, h
        self.tau = tau if tau is not None else orders.affine(1, index)
        if d.initial_capital > 1:
            raise PreconditionViolated('Battery entry %d starts with capital %s > 1' % (index, format_exact(d.initial_capital)), index=index)

    @staticmethod
    def from_inverse(d, p, tau=None, index=0):
        """Entry whose order is the inverse of a strictly increasing p."""
        return BatteryEntry(d, orders.inverse_order(p), tau, index)

    def describe(self):
        return {'d': self.d.describe(), 'h': self.h.spec, 'tau': self.tau.spec}


class Battery:
    def __init__(self, entries=()):
        self.entries = list(entries)

    @staticmethod
    def of(pairs):
        """Entries from (d, h) or (d, h, tau) tuples; tau defaults to m -> e + m."""
        return Battery([BatteryEntry(*p, index=e) if len(p) == 3 else BatteryEntry(p[0], p[1], None, index=e)
            for e, p in enumerate(pairs)])

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, e):
        return self.entries[e]

    def martingales(self):
        return [entry.d for entry in self.entries]

    def check(self, depth, horizon):
        """Entries whose martingale is unfair to `depth` or whose order/schedule decreases before `horizon`."""
        problems = []
        for e, entry in enumerate(self.entries):
            if not check_fairness(entry.d, depth):
                problems.append(('fairness', e))
            if entry.h.check_flags(horizon) is not None:
                problems.append(('order', e))
            if entry.tau.check_flags(horizon) is not None:
                problems.append(('schedule', e))
        return problems

    def describe(self):
        return [entry.describe() for entry in self.entries]


def _last_visible(tau, s):
    """Largest m <= s with tau(m) <= s + 1, or -1; tau is nondecreasing."""
    if tau(0) > s + 1:
        return -1
    lo, hi = 0, s
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if tau(mid) <= s + 1:
            lo = mid
        else:
            hi = mid - 1
    return lo


def case1_holds(x, T_x, battery):
    s = len(x)
    for e in range(min(T_x, len(battery) - 1) + 1):
        entry = battery[e]
        m = _last_visible(entry.tau, s)
        if m < 0 or not e + T_x + 3 < entry.h(m):
            return False
    return True


@dataclass
class DiagonalTrace:
    bits: str
    F_values: List[Dyadic]
    T_values: List[int]
    case_flags: List[bool]
    capped: List[bool]
    delta_values: list
    delta: object = field(repr=False, default=None)
    phi: object = field(repr=False, default=None)

    @property
    def horizon(self):
        return len(self.bits)

    @property
    def case1_levels(self):
        return [s for s, flag in enumerate(self.case_flags) if flag]

    def to_dict(self, samples=16):
        step = max(1, self.horizon // samples)
        return {'horizon': self.horizon, 'bits': self.bits,
            'F': [str(v) for v in self.F_values], 'T': list(self.T_values),
            'case1_levels': self.case1_levels,
            'capped_levels': [s for s, flag in enumerate(self.capped) if flag],
            'delta_samples': {str(s): format_exact(self.delta_values[s]) for s in range(0, self.horizon + 1, step)}}


def build_xi(battery, horizon):
    system.check_horizon(horizon, 'horizon')
    if horizon < 1:
        raise PreconditionViolated('build_xi() needs horizon >= 1, get: %d' % horizon)
    started = system.record_time()
    phi = weighted_sum(battery.martingales())
    delta = round_to_dyadic(phi)
    x, F, T = '', ONE, 0
    F_values, T_values, flags, capped, deltas = [F], [T], [], [], [delta('')]
    for s in range(horizon):
        case1 = case1_holds(x, T, battery)
        capped.append(T > len(battery) - 1)
        if case1:
            bit, F, T = '0', F.scale(1), T + 1
        else:
            left, right = delta.children(x)
            bit = '0' if left <= right else '1'
        x += bit
        flags.append(case1)
        F_values.append(F)
        T_values.append(T)
        deltas.append(delta(x))
    logging.info('Diagonal construction: horizon=%d, battery=%d, case-1 levels=%d (%.2fs)' % (
        horizon, len(battery), sum(flags), system.record_time() - started))
    return DiagonalTrace(x, F_values, T_values, flags, capped, deltas, delta, phi)


@dataclass
class TraceReport:
    horizon: int
    case1_count: int
    max_gap: int
    thresholds: List[object]
    claim4_thresholds: List[object]
    failures: List[tuple] = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {'horizon': self.horizon, 'ok': self.ok, 'case1_count': self.case1_count, 'max_gap': self.max_gap,
            'thresholds': list(self.thresholds), 'claim4_thresholds': list(self.claim4_thresholds),
            'failures': [list(f) for f in self.failures]}


def verify_trace(trace, battery):
    """Finite-horizon checks of the construction; failures are (claim tag, entry or level) pairs."""
    horizon, bits = trace.horizon, trace.bits
    delta = trace.delta or round_to_dyadic(weighted_sum(battery.martingales()))
    phi = trace.phi or delta.V
    failures = []

    for s in range(horizon + 1):
        x, T = bits[:s], trace.T_values[s]
        value = delta(x)
        if not value < pow2(T + 2):
            failures.append(('claim3', s))
        if not (phi(x) <= value <= phi(x) + 2):
            failures.append(('q2appro', s))
        if trace.F_values[s] != pow2(T) or T > s:
            failures.append(('doubling', s))
        if s > 0 and (trace.T_values[s] < trace.T_values[s - 1] or trace.F_values[s] < trace.F_values[s - 1]):
            failures.append(('monotone', s))
        for e, entry in enumerate(battery):
            if not entry.d(x) <= pow2(e) * phi(x):
                failures.append(('claim5-chain', s))
    for s, flag in enumerate(trace.case_flags):
        if flag and (bits[s] != '0' or trace.T_values[s + 1] != trace.T_values[s] + 1):
            failures.append(('case1-bit', s))

    thresholds, claim4 = [], []
    levels = trace.case1_levels
    for e, entry in enumerate(battery):
        threshold = horizon + 1
        for s in range(horizon, -1, -1):
            if entry.d(bits[:s]) >= pow2(entry.h(s)):
                break
            threshold = s
        thresholds.append(threshold if threshold <= horizon else None)
        s1 = next((s for s in levels if trace.T_values[s] >= e), None)
        if s1 is None or s1 + 1 > horizon:
            claim4.append(None)
            continue
        claim4.append(s1 + 1)
        for s in range(s1 + 1, horizon + 1):
            if not e + trace.T_values[s] + 2 < entry.h(s):
                failures.append(('claim4', e))
                break
        if thresholds[-1] is None or thresholds[-1] > s1 + 1:
            failures.append(('claim5', e))

    gaps = [b - a for a, b in zip([-1] + levels, levels + [horizon])]
    report = TraceReport(horizon, len(levels), max(gaps), thresholds, claim4, sorted(set(failures)))
    if report.failures:
        logging.warning('Trace verification failed: %s' % report.failures[:8])
    return report
