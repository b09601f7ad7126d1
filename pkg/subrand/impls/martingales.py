# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Dyadic-valued martingales: built-in families, transforms, fairness and success checks."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .numeric import (Dyadic, ZERO, ONE, ClopenSet, as_bits, as_fraction, pow2, floor_to_precision,
    strings_up_to, format_exact)
from .errors import PreconditionViolated
from . import orders


class Martingale:
    """A betting-capital function on binary strings, evaluated lazily with memoization."""
    kind = 'abstract'

    def __init__(self):
        self._memo = dict()

    def __call__(self, x):
        value = self._memo.get(x)
        if value is None:
            value = self._memo[x] = self.evaluate(x)
        return value

    def evaluate(self, x):
        raise NotImplementedError()

    @property
    def initial_capital(self):
        return self('')

    def children(self, x):
        return self(x + '0'), self(x + '1')

    def clear(self):
        self._memo = dict()

    def describe(self):
        return {'kind': self.kind}

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, self.describe())


class PathMartingale(Martingale):
    """Martingales defined by a value at the root and a per-bit recurrence along the path."""

    def root(self):
        raise NotImplementedError()

    def step(self, x, bit):
        raise NotImplementedError()

    def evaluate(self, x):
        j = len(x)
        while j > 0 and x[:j] not in self._memo:
            j -= 1
        if j == 0 and '' not in self._memo:
            self._memo[''] = self.root()
        for k in range(j, len(x)):
            prefix = x[:k + 1]
            self._memo[prefix] = self.step(x[:k], x[k])
        return self._memo[x]


class ConstantMartingale(Martingale):
    kind = 'constant'

    def __init__(self, c=ONE):
        super().__init__()
        self.c = Dyadic.coerce(c)
        if self.c < 0:
            raise PreconditionViolated('Martingale capital must be non-negative, get: %s' % self.c)

    def evaluate(self, x):
        return self.c

    def describe(self):
        return {'kind': self.kind, 'c': str(self.c)}


class TableMartingale(Martingale):
    """Explicit values for every string of length <= depth; beyond the table the capital is frozen."""
    kind = 'table'

    def __init__(self, values, depth=None):
        super().__init__()
        self.values = {as_bits(x): Dyadic.coerce(v) for x, v in dict(values).items()}
        self.depth = max((len(x) for x in self.values), default=0) if depth is None else depth
        missing = [x for x in strings_up_to(self.depth) if x not in self.values]
        if missing:
            raise PreconditionViolated('Martingale table of depth %d misses strings: %s' % (self.depth, missing[:8]))
        if any(v < 0 for v in self.values.values()):
            raise PreconditionViolated('Martingale capital must be non-negative')

    def evaluate(self, x):
        return self.values[x[:self.depth]]

    def describe(self):
        return {'kind': self.kind, 'depth': self.depth,
            'values': {x: str(v) for x, v in sorted(self.values.items(), key=lambda p: (len(p[0]), p[0]))}}


class ConditionalMartingale(Martingale):
    """x -> mu(A|x)."""
    kind = 'conditional'

    def __init__(self, A):
        super().__init__()
        self.A = ClopenSet.of(A)

    def evaluate(self, x):
        return self.A.conditional_measure(x)

    def describe(self):
        return {'kind': self.kind, 'set': [x for x in self.A]}


class LLNMartingale(Martingale):
    """F(x1) = (1+q)F(x), F(x0) = (1-q)F(x), F(empty) = 1."""
    kind = 'lln'

    def __init__(self, q):
        super().__init__()
        try:
            self.q = Dyadic.coerce(q)
        except TypeError:
            raise PreconditionViolated('LLN betting fraction must be dyadic, get: %r' % (q,))
        if not (0 < self.q < 1):
            raise PreconditionViolated('LLN betting fraction must lie in (0, 1), get: %s' % self.q)
        self.up, self.down = ONE + self.q, ONE - self.q

    def evaluate(self, x):
        ones = x.count('1')
        return self.up ** ones * self.down ** (len(x) - ones)

    def describe(self):
        return {'kind': self.kind, 'q': str(self.q)}


class WeightedSum(Martingale):
    """Phi(x) = sum_e 2^-e d_e(x) over a finite battery."""
    kind = 'weighted_sum'

    def __init__(self, battery):
        super().__init__()
        self.battery = list(battery)
        for e, d in enumerate(self.battery):
            if d.initial_capital > 1:
                raise PreconditionViolated('Battery member %d starts with capital %s > 1' % (e, format_exact(d.initial_capital)), index=e)

    def evaluate(self, x):
        total = ZERO
        for e, d in enumerate(self.battery):
            value = d(x)
            total = total + (value.scale(-e) if isinstance(value, Dyadic) else Fraction(value) / (1 << e))
        return total

    def describe(self):
        return {'kind': self.kind, 'battery': [d.describe() for d in self.battery]}


class ScaledMartingale(Martingale):
    """d * 2^-k."""
    kind = 'scaled'

    def __init__(self, d, k):
        super().__init__()
        self.d, self.k = d, k

    def evaluate(self, x):
        value = self.d(x)
        return value.scale(-self.k) if isinstance(value, Dyadic) else Fraction(value) / (1 << self.k)

    def describe(self):
        return {'kind': self.kind, 'k': self.k, 'of': self.d.describe()}


class TrackingMartingale(Martingale):
    """x -> sum_{i <= horizon/2} 2^i mu([xi|2i] | x); reaches 2^floor(j/2) on every prefix of xi."""
    kind = 'tracking'

    def __init__(self, source, horizon):
        super().__init__()
        self.source, self.horizon = source, horizon
        self.target = source.prefix(2 * (horizon // 2))

    def evaluate(self, x):
        total, n = ZERO, len(x)
        for i in range(self.horizon // 2 + 1):
            y = self.target[:2 * i]
            if n >= 2 * i:
                if x.startswith(y):
                    total = total + pow2(i)
            elif y.startswith(x):
                total = total + pow2(i + n - 2 * i)
        return total

    def describe(self):
        return {'kind': self.kind, 'horizon': self.horizon, 'sequence': self.source.describe()}


class SavingsMartingale(PathMartingale):
    """Savings-account surgery: half of the capital reached at each checkpoint f(n) is set aside."""
    kind = 'savings'

    def __init__(self, d, f, n0=0):
        super().__init__()
        if not f.strictly_increasing:
            raise PreconditionViolated('Savings checkpoints need a strictly increasing order, get: %s' % (f.spec,))
        self.d, self.f, self.n0 = d, f, n0
        self.start = f(n0)

    def _ratio(self, x, bit):
        base = self.d(x)
        if base == 0:
            raise PreconditionViolated('Savings transform divides by d(%r) = 0' % x, tag='division-by-zero')
        return as_fraction(self.d(x + bit)) / as_fraction(base)

    def root(self):
        return as_fraction(self.d(''))

    def step(self, x, bit):
        if len(x) < self.start:
            return as_fraction(self.d(x + bit))
        n = orders.inverse(self.f, len(x) + 1) - 1
        saved = self._memo[x[:self.f(n)]] / 2
        return saved + (self._memo[x] - saved) * self._ratio(x, bit)

    def guarantee(self, source, N):
        """Given d(xi|f(n)) >= 2^(2n+1) on [n0, N], indices m in (f(n0), f(N)] with capital below 2^h(m)."""
        premise = all(self.d(source.prefix(self.f(n))) >= pow2(2 * n + 1) for n in range(self.n0, N + 1))
        h = orders.monus(orders.inverse_order(self.f), 1)
        failures = [m for m in range(self.start + 1, self.f(N) + 1) if self(source.prefix(m)) < pow2(h(m))]
        return premise, failures

    def describe(self):
        return {'kind': self.kind, 'n0': self.n0, 'f': self.f.spec, 'of': self.d.describe()}


def default_approximant(V):
    def approximant(x, i):
        value = V(x)
        return value if isinstance(value, Dyadic) else floor_to_precision(value, i)
    return approximant


class RoundedMartingale(PathMartingale):
    """Exact dyadic martingale d with V <= d <= V + 2, driven by an approximant F(x, i) of V.

    d(empty) = F(empty, 5) + 1/4 and d(xb) = d(x) +/- (F(x0, |x|+5) - F(x, |x|+5)).
    The slack d - V starts within 2^-5 of 1/4 and drifts by at most 2^-(|x|+4) per level.
    """
    kind = 'rounded'
    seed_slack = Dyadic(1, 2)
    lookahead = 5

    def __init__(self, V, approximant=None):
        super().__init__()
        self.V = V
        self.approximant = approximant or default_approximant(V)

    def _approx(self, x, i):
        value = self.approximant(x, i)
        try:
            return Dyadic.coerce(value)
        except TypeError:
            raise PreconditionViolated('Approximant returned a non-dyadic value %r at (%r, %d)' % (value, x, i))

    def root(self):
        return self._approx('', self.lookahead) + self.seed_slack

    def step(self, x, bit):
        precision = len(x) + self.lookahead
        gain = self._approx(x + '0', precision) - self._approx(x, precision)
        return self._memo[x] + gain if bit == '0' else self._memo[x] - gain

    def describe(self):
        return {'kind': self.kind, 'of': self.V.describe()}


def constant_martingale(c=ONE):
    return ConstantMartingale(c)


def table_martingale(values, depth=None):
    return TableMartingale(values, depth)


def conditional_martingale(A):
    return ConditionalMartingale(A)


def lln_martingale(q):
    return LLNMartingale(q)


def weighted_sum(battery):
    return WeightedSum(battery)


def savings_transform(d, f, n0=0):
    return SavingsMartingale(d, f, n0)


def round_to_dyadic(V, approximant=None):
    return RoundedMartingale(V, approximant)


def scaled(d, k):
    return d if k == 0 else ScaledMartingale(d, k)


def tracking_martingale(source, horizon):
    return TrackingMartingale(source, horizon)


def check_fairness(d, depth):
    for x in strings_up_to(depth - 1):
        left, right = d.children(x)
        if left + right != 2 * d(x):
            logging.debug('Fairness fails at %r for %s' % (x, d.kind))
            return False
    return True


def fairness_violations(d, depth):
    return [x for x in strings_up_to(depth - 1) if sum(d.children(x)) != 2 * d(x)]


@dataclass
class SuccessReport:
    hit_indices: List[int]
    horizon: int
    max_capital: object = ZERO
    capitals: List = field(default_factory=list, repr=False)
    bounds: List = field(default_factory=list, repr=False)
    verdict_io: bool = field(init=False)
    verdict_ae_tail: Optional[int] = field(init=False)

    def __post_init__(self):
        hits = set(self.hit_indices)
        self.verdict_io = bool(hits)
        tail = None
        for i in range(self.horizon, -1, -1):
            if i not in hits:
                break
            tail = i
        self.verdict_ae_tail = tail

    def to_dict(self):
        return {'hit_indices': list(self.hit_indices), 'horizon': self.horizon, 'verdict_io': self.verdict_io,
            'verdict_ae_tail': self.verdict_ae_tail, 'max_capital': format_exact(self.max_capital)}

    def to_rows(self):
        """One [i, capital, bound, hit] row per checked index."""
        hits = set(self.hit_indices)
        return [[i, c, b, i in hits] for i, (c, b) in enumerate(zip(self.capitals, self.bounds))]


def success_report(d, h, source, horizon):
    if horizon < 1:
        raise PreconditionViolated('success_report() needs horizon >= 1, get: %d' % horizon)
    bits = source.prefix(horizon)
    hits, best, capitals, bounds = [], ZERO, [], []
    for i in range(horizon + 1):
        capital, bound = d(bits[:i]), pow2(h(i))
        capitals.append(capital)
        bounds.append(bound)
        if capital > best:
            best = capital
        if capital >= bound:
            hits.append(i)
    return SuccessReport(hits, horizon, best, capitals, bounds)


@dataclass
class VilleLevel:
    k: int
    hitting_set: List[str]
    measure: Dyadic
    bound: object

    @property
    def ok(self):
        return self.measure <= self.bound


def ville_check(d, kmax, maxlen):
    """Per threshold 2^k (k <= kmax): minimal strings of length <= maxlen reaching it, and their measure.

    A string is minimal for k when it reaches 2^k while every proper prefix stays below.
    """
    start = d.initial_capital
    bounds = [pow2(k) for k in range(kmax + 1)]
    sets = {k: [] for k in range(kmax + 1)}
    # second item: levels already reached by a proper prefix
    stack = [('', 0)]
    while stack:
        x, reached = stack.pop()
        capital = d(x)
        while reached <= kmax and capital >= bounds[reached]:
            sets[reached].append(x)
            reached += 1
        if len(x) < maxlen and reached <= kmax:
            stack.append((x + '1', reached))
            stack.append((x + '0', reached))
    levels = []
    for k in range(kmax + 1):
        hitting = ClopenSet(sets[k])
        levels.append(VilleLevel(k, [x for x in hitting], hitting.measure(), start * pow2(-k)))
    return levels
