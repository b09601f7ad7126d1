# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Finite prefix-free machine tables with staged halting."""

from dataclasses import dataclass
from typing import List

from .numeric import (Dyadic, ClopenSet, INFINITY, NEG_INFINITY, as_bits, pow2,
    dyadic_sum_of_cylinders, llex_key)
from .errors import ControlViolated, MalformedInput, PreconditionViolated
from . import orders


class MachineEntry:
    __slots__ = ('code', 'out', 't')

    def __init__(self, code, out, t):
        self.code, self.out, self.t = as_bits(code), as_bits(out), t
        if not isinstance(t, int) or t < 1:
            raise MalformedInput('Halt time of codeword %r must be a positive integer, get: %r' % (code, t))

    def __iter__(self):
        return iter((self.code, self.out, self.t))

    def __eq__(self, other):
        return isinstance(other, MachineEntry) and tuple(self) == tuple(other)

    def __repr__(self):
        return 'MachineEntry(%r, %r, %d)' % (self.code, self.out, self.t)


class MachineTable:
    """Codeword -> (output, halt time) for a finite prefix-free machine."""

    def __init__(self, entries=()):
        self.entries = tuple(e if isinstance(e, MachineEntry) else MachineEntry(*e) for e in entries)
        codes = [e.code for e in self.entries]
        if len(set(codes)) != len(codes):
            raise MalformedInput('Machine codewords must be distinct')
        domain = ClopenSet(codes)
        if not domain.prefix_free:
            raise MalformedInput('Machine domain is not prefix-free: %s' % sorted(codes, key=llex_key))
        self.by_output = dict()
        for e in self.entries:
            self.by_output.setdefault(e.out, []).append(e)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def max_halt_time(self):
        return max((e.t for e in self.entries), default=0)

    def lookup(self, code):
        for e in self.entries:
            if e.code == code:
                return e
        return None

    def to_list(self):
        return [{'code': e.code, 'out': e.out, 't': e.t} for e in self.entries]


def staged_domain(M, t=INFINITY):
    return ClopenSet(e.code for e in M if t is INFINITY or e.t <= t)


def omega_at(M, t=INFINITY):
    return dyadic_sum_of_cylinders(e.code for e in M if t is INFINITY or e.t <= t)


def complexity(M, x, t=INFINITY):
    lengths = [len(e.code) for e in M.by_output.get(x, []) if t is INFINITY or e.t <= t]
    return min(lengths) if lengths else INFINITY


@dataclass
class ControlWitness:
    g: orders.OrderFn
    checked_range: tuple
    slack: List[Dyadic]

    def to_dict(self):
        return {'g': self.g.spec, 'checked_range': list(self.checked_range), 'slack': [str(s) for s in self.slack]}


def control_residuals(M, g, imax):
    omega = omega_at(M)
    return [omega - omega_at(M, g(i)) for i in range(imax + 1)]


def verify_measure_computable(M, g, imax):
    residuals = control_residuals(M, g, imax)
    for i, residual in enumerate(residuals):
        if residual > pow2(-i):
            raise ControlViolated('Omega_M - Omega_M[g(%d)] = %s exceeds 2^-%d' % (i, residual, i), index=i)
    return ControlWitness(g, (0, imax), residuals)


def fit_controlling_function(M, imax=0):
    """Least stages meeting the control inequality, strictified; exact for every i."""
    omega = omega_at(M)
    times = sorted({0} | {e.t for e in M})
    top = max(imax, max((len(e.code) for e in M), default=0) + 1)
    values = []
    for i in range(top + 1):
        values.append(next(t for t in times if omega - omega_at(M, t) <= pow2(-i)))
    return orders.strictify(orders.table(values, {'rule': 'affine', 'slope': 1}))


def rb_set(M, b, maxlen, staged_with=None):
    """{x : |x| <= maxlen, K(x) <= |x| - b}, with K staged at g(|x|) when a controlling function is given."""
    if staged_with is not None:
        try:
            verify_measure_computable(M, staged_with, maxlen)
        except ControlViolated as ex:
            raise PreconditionViolated('Staged R_b needs a valid control witness: %s' % ex, index=ex.index)
    members = []
    for x in M.by_output:
        if len(x) > maxlen:
            continue
        t = INFINITY if staged_with is None else staged_with(len(x))
        k = complexity(M, x, t)
        if k is not INFINITY and k <= len(x) - b:
            members.append(x)
    return ClopenSet(members)


def kolmogorov_margin(M, source, horizon):
    """max_{n <= horizon} n - K_M(xi|n); NEG_INFINITY when no prefix is produced."""
    if horizon < 1:
        raise PreconditionViolated('kolmogorov_margin() needs horizon >= 1, get: %d' % horizon)
    bits = source.prefix(horizon)
    margin = NEG_INFINITY
    for n in range(horizon + 1):
        k = complexity(M, bits[:n])
        if k is INFINITY:
            continue
        if margin is NEG_INFINITY or n - k > margin:
            margin = n - k
    return margin
