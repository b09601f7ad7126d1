# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Staged Martin-Loef tests and the two conversions between tests and martingales."""

import logging
from dataclasses import dataclass, field
from typing import List

from .. import system
from .numeric import (Dyadic, ZERO, ClopenSet, as_bits, pow2, format_exact, sqsubseteq_key,
    strings_up_to)
from .errors import PreconditionViolated, MalformedInput, ClaimViolated
from .martingales import Martingale, round_to_dyadic, scaled
from . import orders


class StagedTestFamily:
    """Per-index staged generator sets X_{n,t} with a controlling function f.

    `stages` maps n to {x: t}, t being the stage at which x enters X_n. The limit
    set X_n is reached at t_max.
    """

    def __init__(self, f, stages, n_max=None, t_max=None, provenance=None):
        self.f = f
        self.stages = {int(n): {as_bits(x): int(t) for x, t in dict(entries).items()} for n, entries in dict(stages).items()}
        self.n_max = max(self.stages, default=-1) if n_max is None else n_max
        last = max((t for entries in self.stages.values() for t in entries.values()), default=0)
        self.t_max = last if t_max is None else t_max
        if self.t_max < last:
            raise MalformedInput('Declared t_max = %d is below the last stage %d' % (self.t_max, last))
        if any(t < 0 for entries in self.stages.values() for t in entries.values()):
            raise MalformedInput('Stages must be non-negative')
        self.provenance = list(provenance or [])
        self._cache = dict()

    def entries(self, n):
        return self.stages.get(n, {})

    def at(self, n, t):
        """X_{n,t} as a clopen set."""
        t = min(t, self.t_max)
        key = (n, t)
        if key not in self._cache:
            self._cache[key] = ClopenSet(x for x, s in self.entries(n).items() if s <= t)
        return self._cache[key]

    def limit(self, n):
        return self.at(n, self.t_max)

    def stage_of(self, n, x):
        return self.entries(n).get(x)

    def indices(self):
        return range(self.n_max + 1)

    def requests(self):
        """Every (m, x) with x in X_m, in the well-order (llex on x, then m)."""
        return sorted(((m, x) for m in self.indices() for x in self.entries(m)), key=sqsubseteq_key)

    def describe(self):
        return {'f': self.f.spec, 'n_max': self.n_max, 't_max': self.t_max, 'provenance': list(self.provenance),
            'families': [{'n': n, 'stages': _stage_groups(self.entries(n))} for n in self.indices() if self.entries(n)]}

    def __repr__(self):
        return 'StagedTestFamily(n_max=%d, t_max=%d, f=%s)' % (self.n_max, self.t_max, self.f.spec)


def _stage_groups(entries):
    groups = dict()
    for x, t in entries.items():
        groups.setdefault(t, []).append(x)
    return [{'t': t, 'add': sorted(xs, key=lambda x: (len(x), x))} for t, xs in sorted(groups.items())]


@dataclass
class FamilyReport:
    strict: bool
    violations: List[tuple] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def indices(self, tag):
        return [(n, i) for t, n, i in self.violations if t == tag]

    def to_dict(self):
        return {'strict': self.strict, 'ok': self.ok, 'violations': [list(v) for v in self.violations]}


def control_residual(X, n, i):
    return X.limit(n).measure() - X.at(n, X.f(n + i)).measure()


def verify_family(X, strict=False):
    """Every invariant of a staged test; control is checked exhaustively for i in [0, t_max + 1].

    Residuals are nonincreasing in i and are at least 2^-L once positive (L the longest
    generator, L <= t_max), so a violation that exists shows up by i = t_max + 1.
    """
    report = FamilyReport(strict)
    for n in X.indices():
        for x, t in sorted(X.entries(n).items(), key=lambda p: (len(p[0]), p[0])):
            if t < len(x):
                report.violations.append(('stage-length', n, x))
        limit = X.limit(n)
        if not limit.prefix_free:
            report.violations.append(('prefix-free', n, None))
        mu = limit.measure()
        if mu > pow2(-n):
            report.violations.append(('measure', n, None))
        if strict and mu > pow2(-2 * n):
            report.violations.append(('measure-strict', n, None))
        for i in range(X.t_max + 2):
            if control_residual(X, n, i) > pow2(-i):
                report.violations.append(('control', n, i))
    if report.violations:
        logging.debug('Family verification found %d violations' % len(report.violations))
    return report


def reindex_family(X):
    """G_n -> G_2n, with controlling function j -> f(2j)."""
    stages = {n: dict(X.entries(2 * n)) for n in range(X.n_max // 2 + 1)}
    return StagedTestFamily(orders.scale_arg(X.f, 2), stages, n_max=X.n_max // 2, t_max=X.t_max,
        provenance=X.provenance + ['reindexed'])


def fit_controlling_function(stages, t_max=None):
    """Least strictly increasing f meeting the control inequality for a stage map {n: {x: t}}."""
    staged = StagedTestFamily(orders.identity(), stages, t_max=t_max)
    need = dict()
    for n in staged.indices():
        mu = staged.limit(n).measure()
        times = sorted({0} | set(staged.entries(n).values()))
        for i in range(staged.t_max + 2):
            need[(n, i)] = next(t for t in times if mu - staged.at(n, t).measure() <= pow2(-i))
    # past i = t_max + 1 the requirement is a zero residual, i.e. the last stage of X_n
    last = staged.t_max + 1
    top = staged.n_max + last + 1
    values = [max([need[(n, min(j - n, last))] for n in range(min(j, staged.n_max) + 1)] + [0]) for j in range(top + 1)]
    return orders.strictify(orders.table(values, {'rule': 'affine', 'slope': 1}))


def family_from_stages(stages, f=None, t_max=None, provenance=None):
    if f is None:
        f = fit_controlling_function(stages, t_max)
    return StagedTestFamily(f, stages, t_max=t_max, provenance=provenance)


def strict_form(X):
    """X itself when strict verification passes, else its reindexed form; PreconditionViolated otherwise."""
    report = verify_family(X, strict=True)
    if report.ok:
        return X
    if not verify_family(X).ok:
        raise PreconditionViolated('Family fails verification: %s' % report.violations[:8])
    reindexed = reindex_family(X)
    report = verify_family(reindexed, strict=True)
    if not report.ok:
        raise PreconditionViolated('Reindexed family fails strict verification: %s' % report.violations[:8])
    logging.info('Family reindexed (G_n -> G_2n) to meet mu(X_n) <= 2^-2n')
    return reindexed


class FamilyMartingale(Martingale):
    """B(x) = sum_{n, k} 2^k mu(C^k_n | x) with C^k_n = X_n minus X_{n, g(k)}; exact at desk scale."""
    kind = 'test_sum'

    def __init__(self, bundle):
        super().__init__()
        self.bundle = bundle

    def evaluate(self, x):
        total = ZERO
        for (n, k), C in self.bundle.pieces.items():
            total = total + C.conditional_measure(x).scale(k)
        return total

    def describe(self):
        return {'kind': self.kind, 'family': self.bundle.family.describe()}


class ConversionBundle:
    def __init__(self, family):
        self.family = X = family
        self.f = orders.strictify(X.f)
        self.g = orders.scale_arg(self.f, 5)
        self.k_cut = orders.inverse(self.g, X.t_max)
        self.h = orders.monus(orders.inverse_order(self.g), 1)
        self.pieces = dict()
        for n in X.indices():
            for k in range(self.k_cut):
                C = X.limit(n).difference(X.at(n, self.g(k)))
                if len(C):
                    self.pieces[(n, k)] = C
        self._clopen = dict()
        self.B = FamilyMartingale(self)

    def K(self, r, i):
        return r + i + 4

    def N(self, r, i, k):
        return r + i + 2 * k + 3

    def g_bar(self, r, i):
        return self.f(9 * r + 9 * i + 32)

    def _D(self, n, k, t):
        key = (n, k, min(t, self.family.t_max))
        if key not in self._clopen:
            X = self.family
            self._clopen[key] = X.at(n, t).difference(X.at(n, self.g(k)))
        return self._clopen[key]

    def _sum(self, x, i, bound_k, clopen):
        r, total = len(x), ZERO
        for k in range(min(bound_k, self.k_cut - 1) + 1):
            for n in range(min(self.N(r, i, k), self.family.n_max) + 1):
                C = clopen(n, k)
                if C is not None and len(C):
                    total = total + C.conditional_measure(x).scale(k)
        return total

    def F(self, x, i):
        """Dyadic approximant with 0 <= B(x) - F(x, i) <= 2^-i."""
        t = self.g_bar(len(x), i)
        return self._sum(x, i, self.K(len(x), i), lambda n, k: self._D(n, k, t))

    def truncations(self, x, i):
        """(B, B1, B2, F) at (x, i): B1 bounds n by N(|x|, i, k), B2 also bounds k by K(|x|, i)."""
        B = self.B(x)
        B1 = self._sum(x, i, self.k_cut, lambda n, k: self.pieces.get((n, k)))
        B2 = self._sum(x, i, self.K(len(x), i), lambda n, k: self.pieces.get((n, k)))
        return B, B1, B2, self.F(x, i)

    def describe(self):
        return {'g': self.g.spec, 'h': self.h.spec, 'k_cut': self.k_cut, 'B_root': format_exact(self.B('')),
            'family': self.family.describe()}


def test_to_martingale(X):
    """Martingale B and order h with B(xi|n) >= 2^h(n) i.o. on every xi the family captures."""
    return ConversionBundle(strict_form(X))


@dataclass
class ApproximationCheck:
    x: str
    i: int
    gaps: tuple

    @property
    def ok(self):
        B, B1, B2, F = self.gaps
        i = self.i
        return (ZERO <= B - F <= pow2(-i) and ZERO <= B - B1 <= pow2(-i - 2)
            and ZERO <= B1 - B2 <= pow2(-i - 2) and ZERO <= B2 - F <= pow2(-i - 1))


def check_approximation(bundle, maxlen, imax):
    """Sandwich and intermediate truncation bounds for every |x| <= maxlen, i <= imax."""
    failures = []
    for x in strings_up_to(maxlen):
        for i in range(imax + 1):
            check = ApproximationCheck(x, i, bundle.truncations(x, i))
            if not check.ok:
                failures.append(check)
    return failures


@dataclass
class HittingWitness:
    n: int
    i: int
    capital: Dyadic
    bound: Dyadic
    asserted: bool

    @property
    def ok(self):
        return not self.asserted or self.capital >= self.bound

    def to_dict(self):
        return {'n': self.n, 'i': self.i, 'capital': format_exact(self.capital), 'bound': format_exact(self.bound),
            'asserted': self.asserted, 'ok': self.ok}


def hitting_witness(bundle, source, horizon):
    X = bundle.family
    bits = source.prefix(horizon)
    witnesses = []
    for n in X.indices():
        limit = X.limit(n)
        hit = next((i for i in range(horizon + 1) if bits[:i] in limit), None)
        if hit is None:
            continue
        # only n > g(0) is covered by the hitting bound
        w = HittingWitness(n, hit, bundle.B(bits[:hit]), pow2(bundle.h(hit)), n > bundle.g(0))
        system.strict_or_warn(w.ok, ClaimViolated('B(xi|%d) = %s below 2^h = %s for n = %d' % (hit, w.capital, w.bound, n),
            tag='intersec', index=n))
        witnesses.append(w)
    return witnesses


def martingale_to_test(d, g, horizon, f=None):
    """Y_n = minimal x (|x| <= horizon) with d(x) >= 2^g(|x|) >= 2^n; x enters at stage |x|.

    The controlling function is r -> f(Inv_g(r) + r), f the evaluation-cost order (default j + 1).
    """
    if d.initial_capital > 1:
        raise PreconditionViolated('martingale_to_test() needs d(empty) <= 1, get: %s' % format_exact(d.initial_capital))
    system.check_horizon(horizon)
    if horizon > 20:
        logging.warning('martingale_to_test() walks all %d strings up to length %d' % ((2 << horizon) - 1, horizon))
    f = f or orders.affine(1, 1)
    stages = dict()
    stack = [('', -1)]
    while stack:
        x, covered = stack.pop()
        level = g(len(x))
        if level > covered and d(x) >= pow2(level):
            for n in range(covered + 1, level + 1):
                stages.setdefault(n, dict())[x] = len(x)
            covered = level
        if len(x) < horizon:
            stack.append((x + '1', covered))
            stack.append((x + '0', covered))
    control = orders.compose(f, orders.plus(orders.inverse_order(g), orders.identity()))
    return StagedTestFamily(control, stages, n_max=max(stages, default=-1), t_max=horizon,
        provenance=['martingale', d.kind])


@dataclass
class RoundTripReport:
    witnesses: List[HittingWitness]
    captured: List[tuple]
    scale: int

    @property
    def ok(self):
        return all(w.ok for w in self.witnesses) and all(c[-1] for c in self.captured)

    def to_dict(self):
        return {'scale': self.scale, 'ok': self.ok, 'witnesses': [w.to_dict() for w in self.witnesses],
            'captured': [list(c) for c in self.captured]}


def round_trip(X, source, horizon):
    """Test -> (B, h) -> rounded, normalised martingale -> test, checking xi stays captured."""
    bundle = test_to_martingale(X)
    witnesses = hitting_witness(bundle, source, horizon)
    rounded = round_to_dyadic(bundle.B, bundle.F)
    c = 0
    while rounded.initial_capital > pow2(c):
        c += 1
    d = scaled(rounded, c)
    g = orders.monus(bundle.h, c)
    Y = martingale_to_test(d, g, horizon)
    bits = source.prefix(horizon)
    captured = []
    for w in witnesses:
        # scaling by 2^-c keeps the hit only when h(i_n) >= c
        if not w.asserted or bundle.h(w.i) < c:
            continue
        level = g(w.i)
        ok = all(Y.limit(m).covers(bits[:w.i]) for m in range(level + 1))
        captured.append((w.n, w.i, level, ok))
    report = RoundTripReport(witnesses, captured, c)
    system.strict_or_warn(report.ok, ClaimViolated('Round trip lost the sequence: %s' % report.captured, tag='round-trip'))
    return report
