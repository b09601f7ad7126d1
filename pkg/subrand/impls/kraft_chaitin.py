# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Bounded request sets and the well-ordered Kraft-Chaitin construction.

Codewords are assigned from a residual set R of free strings (initially {empty}):
a request of length r consumes the longest z in R with |z| <= r, takes the
leftmost extension z0..0 of length r and returns z0^i1 (i < r - |z|) to R.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .. import system
from .numeric import Dyadic, ZERO, ClopenSet, as_bits, pow2, sqsubseteq_key, strings_of_length
from .errors import (WeightExceeded, InfeasibleStep, MeasureBoundViolated, PreconditionViolated,
    ClaimViolated, HorizonExhausted)
from .machines import MachineTable, MachineEntry, omega_at
from . import orders


class Request:
    __slots__ = ('length', 'payload', 'm')

    def __init__(self, length, payload='', m=None):
        if not isinstance(length, int) or length < 1:
            raise PreconditionViolated('Requested codeword length must be a positive integer, get: %r' % (length,))
        self.length, self.payload, self.m = length, as_bits(payload), m

    @staticmethod
    def from_pair(m, x):
        """(m, x) asks for a codeword of length |x| - m + 1 printing x."""
        if len(x) < m:
            raise PreconditionViolated('Request (%d, %r) has non-positive length %d' % (m, x, len(x) - m + 1))
        return Request(len(x) - m + 1, x, m)

    @property
    def pair(self):
        return (self.m, self.payload)

    def to_dict(self):
        if self.m is None:
            return {'length': self.length, 'payload': self.payload}
        return {'m': self.m, 'x': self.payload, 'length': self.length}

    def __repr__(self):
        return 'Request(%s)' % self.to_dict()


class RequestSet:
    """Ordered requests; (m, x) sets are kept in the well-order, generic ones in caller order."""

    def __init__(self, requests, well_ordered=False):
        self.requests = list(requests)
        self.well_ordered = well_ordered
        if well_ordered:
            self.requests.sort(key=lambda q: sqsubseteq_key(q.pair))

    @staticmethod
    def from_lengths(lengths, payloads=None):
        payloads = payloads or [''] * len(lengths)
        return RequestSet([Request(int(l), p) for l, p in zip(lengths, payloads)])

    @staticmethod
    def from_pairs(pairs):
        return RequestSet([Request.from_pair(m, x) for m, x in pairs], well_ordered=True)

    @property
    def weight(self):
        if not self.requests:
            return ZERO
        depth = max(q.length for q in self.requests)
        return Dyadic(sum(1 << (depth - q.length) for q in self.requests), depth)

    def __len__(self):
        return len(self.requests)

    def __iter__(self):
        return iter(self.requests)

    def to_list(self):
        return [q.to_dict() for q in self.requests]


@dataclass
class KCStep:
    request: Request
    codeword: str
    consumed: str
    residual: tuple

    def to_dict(self):
        return {'request': self.request.to_dict(), 'w': self.codeword, 'z': self.consumed, 'R': list(self.residual)}


@dataclass
class KCResult:
    steps: List[KCStep]
    emitted: MachineTable
    weight: Dyadic
    clock: Optional[object] = None

    @property
    def codewords(self):
        return [s.codeword for s in self.steps]

    @property
    def omega(self):
        return omega_at(self.emitted)

    def to_dict(self):
        return {'weight': str(self.weight), 'omega': str(self.omega), 'codewords': self.codewords,
            'steps': [s.to_dict() for s in self.steps], 'machine': self.emitted.to_list()}


def _residual_invariant(residual, step):
    lengths = [len(z) for z in residual]
    system.strict_or_warn(len(set(lengths)) == len(lengths),
        ClaimViolated('Residual strings share a length after step %d: %s' % (step, sorted(residual)), tag='claim-R-encoded', index=step))


def kc_steps(requests):
    """Yield (request, w, z, R) for each request in order; raises InfeasibleStep if R has no admissible string."""
    residual = ['']
    for step, q in enumerate(requests):
        admissible = [z for z in residual if len(z) <= q.length]
        if not admissible:
            raise InfeasibleStep('No residual string of length <= %d at step %d' % (q.length, step), index=step)
        z = max(admissible, key=len)
        w = z + '0' * (q.length - len(z))
        residual.remove(z)
        residual.extend(z + '0' * i + '1' for i in range(q.length - len(z)))
        residual.sort(key=len)
        _residual_invariant(residual, step)
        yield q, w, z, tuple(residual)


def kc_assign(L, halt_times=None):
    """Assign codewords for every request; halt time of the k-th codeword is k (1-based) unless given."""
    if L.weight > 1:
        raise WeightExceeded('Request weight %s exceeds 1' % L.weight)
    steps, entries = [], []
    for k, (q, w, z, R) in enumerate(kc_steps(L)):
        steps.append(KCStep(q, w, z, R))
        entries.append(MachineEntry(w, q.payload, k + 1 if halt_times is None else halt_times[k]))
    return KCResult(steps, MachineTable(entries), L.weight)


def first_stratum(X, m, x):
    """Least r with (m, x) in stratum(r); membership is monotone in r."""
    stage = X.stage_of(m, x)
    r = max(m, (len(x) + 1) // 2)
    while X.f(3 * r + 1) < stage:
        r += 1
        if r > X.f.witness_horizon:
            raise HorizonExhausted('f(3r+1) stays below stage %d of %r' % (stage, x))
    return r


def stratum(X, r):
    """{(m, x) : x in X_{m, f(3r+1)}, |x| <= 2r, m <= r}, in the well-order."""
    t = X.f(3 * r + 1)
    pairs = [(m, x) for m in range(min(r, X.n_max) + 1) for x, s in X.entries(m).items() if len(x) <= 2 * r and s <= t]
    return sorted(pairs, key=sqsubseteq_key)


class StratumClock:
    """clock(r) = sum_{r' <= r} (|stratum(r')| + 1): the sweep time by which stratum(r) has been replayed."""

    def __init__(self, X):
        self.first = {pair: first_stratum(X, *pair) for pair in X.requests()}
        self.total = len(self.first)
        self.top = max(self.first.values(), default=0)
        self.sizes = [0] * (self.top + 1)
        for r in self.first.values():
            self.sizes[r] += 1
        self.values, running, count = [], 0, 0
        for r in range(self.top + 1):
            count += self.sizes[r]
            running += count + 1
            self.values.append(running)

    def __call__(self, r):
        if r <= self.top:
            return self.values[r]
        return self.values[-1] + (r - self.top) * (self.total + 1)

    def halt_time(self, pair):
        return self(self.first[pair])


def check_measure_bound(X):
    for m in X.indices():
        mu = X.limit(m).measure()
        if mu > pow2(-2 * m):
            raise MeasureBoundViolated('mu([X_%d]) = %s exceeds 2^-%d' % (m, mu, 2 * m), index=m)


def build_machine_from_test(X):
    """Kraft-Chaitin machine sending w(m, x) to x for every x in X_m, halting on the stratification clock."""
    check_measure_bound(X)
    L = RequestSet.from_pairs(X.requests())
    clock = StratumClock(X)
    result = kc_assign(L, halt_times=[clock.halt_time(q.pair) for q in L])
    result.clock = clock
    logging.debug('Kraft-Chaitin machine: %d codewords, Omega = %s' % (len(result.steps), result.omega))
    return result


def staged_control_order(X, clock=None):
    """h(r) = clock(max(r, f(3r+1)) + 1): every w(m, x) with m <= r and x in X_{m, f(3r+1)} halts by h(r)."""
    clock = clock or StratumClock(X)
    f = X.f
    return orders.OrderFn({'kind': 'derived', 'op': 'staged_control', 'of': f.spec},
        lambda r: clock(max(r, f(3 * r + 1)) + 1), strictly_increasing=True,
        witness_horizon=f.witness_horizon)


def replay_decode(source, w):
    """Decode codeword w by re-running the assignment; returns the printed string or None (no halt).

    For a test family this sweeps stratum(|w|) in the well-order; for a request set it sweeps the
    requests in their order.
    """
    w = as_bits(w)
    if isinstance(source, RequestSet):
        requests = source.requests
    else:
        requests = [Request.from_pair(m, x) for m, x in stratum(source, len(w))]
    for q, code, _, _ in kc_steps(requests):
        if code == w:
            return q.payload
    return None


def replay_mismatches(source, result):
    """Codewords whose replay disagrees with the assignment."""
    return [s.codeword for s in result.steps if replay_decode(source, s.codeword) != s.request.payload]


@dataclass
class PrefixFreeStages:
    n: int
    tmax: int
    entries: dict
    inclusion_failures: List[int] = field(default_factory=list)
    slice_mismatches: List[int] = field(default_factory=list)

    @property
    def generators(self):
        return ClopenSet(self.entries)

    def to_dict(self):
        return {'n': self.n, 'tmax': self.tmax, 'Y': sorted(self.entries, key=lambda x: (len(x), x)),
            'inclusion_failures': self.inclusion_failures, 'slice_mismatches': self.slice_mismatches}


def prefix_free_stages(X, n, tmax):
    """x is in Y_n iff no prefix of x lies in X_{n, |x|-1} and some prefix lies in X_{n, |x|}; x enters at stage |x|."""
    entries = dict()
    for L in range(tmax + 1):
        previous = X.at(n, L - 1) if L > 0 else ClopenSet()
        fresh = [y for y in X.at(n, L).generators if len(y) <= L and y not in previous]
        for y in fresh:
            for tail in strings_of_length(L - len(y)):
                x = y + tail
                if not previous.covers(x):
                    entries[x] = L
    report = PrefixFreeStages(n, tmax, entries)
    for s in range(tmax + 1):
        up_to = ClopenSet(x for x, L in entries.items() if L <= s)
        staged = X.at(n, s)
        if any(up_to.conditional_measure(y) != 1 for y in staged.minimal):
            report.inclusion_failures.append(s)
        if up_to.measure() != staged.measure():
            report.slice_mismatches.append(s)
    if report.slice_mismatches:
        logging.info('Prefix-free stages of X_%d differ from the staged slices at %s' % (n, report.slice_mismatches))
    system.strict_or_warn(not report.inclusion_failures, ClaimViolated('Staged inclusion fails for X_%d at %s' % (n, report.inclusion_failures),
        tag='claim-pf-quadra', index=n))
    return report


def prefix_free_family(X, tmax=None):
    """The family of prefix-free stages Y_n, with the same controlling function."""
    from .ml_tests import StagedTestFamily
    tmax = X.t_max if tmax is None else tmax
    stages = {n: prefix_free_stages(X, n, tmax).entries for n in X.indices()}
    return StagedTestFamily(X.f, stages, n_max=X.n_max, t_max=max(tmax, X.t_max), provenance=X.provenance + ['prefix-free'])
