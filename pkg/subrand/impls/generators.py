# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Seeded random instances for the property suites; every draw goes through one numpy Generator."""

import numpy as np

from .numeric import Dyadic, ZERO, ONE, pow2
from . import orders, martingales, kraft_chaitin, machines, ml_tests, diagonal, sequences


def make_rng(seed):
    return np.random.default_rng(seed)


def random_bits(rng, n):
    return ''.join('1' if b else '0' for b in rng.integers(0, 2, size=n).tolist())


def random_clopen(rng, maxlen=6, count=None):
    count = int(rng.integers(1, 6)) if count is None else count
    return [random_bits(rng, int(rng.integers(0, maxlen + 1))) for _ in range(count)]


def random_table_martingale(rng, depth=4, start=ONE):
    """Fair tree: each node moves a fraction a in {-1, -3/4, ..., 1} of its capital to the 0-branch."""
    values, frontier = {'': start}, ['']
    for _ in range(depth):
        children = []
        for x in frontier:
            a = Dyadic(int(rng.integers(-4, 5)), 2)
            values[x + '0'] = values[x] * (ONE + a)
            values[x + '1'] = values[x] * (ONE - a)
            children += [x + '0', x + '1']
        frontier = children
    return martingales.table_martingale(values, depth)


def random_martingale(rng, depth=4, kinds=('conditional', 'lln', 'table', 'weighted_sum')):
    """A martingale with d(empty) <= 1."""
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == 'conditional':
        return martingales.conditional_martingale(random_clopen(rng))
    if kind == 'lln':
        return martingales.lln_martingale(Dyadic(int(rng.integers(1, 4)), 2))
    if kind == 'table':
        return random_table_martingale(rng, depth, Dyadic(int(rng.integers(1, 5)), 2))
    inner = [random_martingale(rng, depth, kinds=('conditional', 'lln', 'table')) for _ in range(int(rng.integers(1, 4)))]
    # sum_e 2^-e d_e may start above 1; halve it back under
    return martingales.scaled(martingales.weighted_sum(inner), 1)


def random_request_set(rng, count=None, maxlen=8, payload_len=4):
    """Requests drawn one at a time, skipping lengths that would push the weight over 1."""
    count = int(rng.integers(1, 12)) if count is None else count
    lengths, payloads, weight = [], [], ZERO
    for _ in range(count):
        length = int(rng.integers(1, maxlen + 1))
        if weight + pow2(-length) > 1:
            continue
        weight = weight + pow2(-length)
        lengths.append(length)
        payloads.append(random_bits(rng, int(rng.integers(0, payload_len + 1))))
    if not lengths:
        lengths, payloads = [maxlen], ['']
    return kraft_chaitin.RequestSet.from_lengths(lengths, payloads)


def random_machine(rng, count=None, maxlen=8, max_halt=12):
    """A Kraft-Chaitin machine with random halt times, and its fitted controlling function."""
    L = random_request_set(rng, count, maxlen)
    halts = [int(t) for t in rng.integers(1, max_halt + 1, size=len(L)).tolist()]
    M = kraft_chaitin.kc_assign(L, halt_times=halts).emitted
    return M, machines.fit_controlling_function(M, maxlen)


def random_strict_family(rng, n_max=3, through=None, delay=2):
    """Prefix-free X_n of equal-length strings with mu(X_n) <= 2^-2n; x enters at a stage in [|x|, |x| + delay].

    With `through`, X_n also holds through|(2n+1), so the sequence extending `through` lies in every X_n.
    """
    stages = dict()
    for n in range(n_max + 1):
        if through is not None:
            L = 2 * n + 1
            picks = [through[:L]]
            other = random_bits(rng, L)
            if rng.integers(0, 2) and other != picks[0]:
                picks.append(other)
        else:
            L = 2 * n + int(rng.integers(1, 3))
            k = int(rng.integers(1, min(4, 1 << (L - 2 * n)) + 1))
            picks = [format(v, '0%db' % L) for v in sorted(rng.choice(1 << L, size=k, replace=False).tolist())]
        stages[n] = {x: len(x) + int(rng.integers(0, delay + 1)) for x in picks}
    return ml_tests.family_from_stages(stages, provenance=['random'])


MODERATE_ORDERS = (
    lambda: orders.closed_form('ceil_div', k=2),
    lambda: orders.closed_form('ceil_div', k=3),
    lambda: orders.closed_form('sqrt_ceil'),
    lambda: orders.identity(),
)


def random_battery(rng, size, depth=4):
    pairs = []
    for _ in range(size):
        h = MODERATE_ORDERS[int(rng.integers(0, len(MODERATE_ORDERS)))]()
        pairs.append((random_martingale(rng, depth), h))
    return diagonal.Battery.of(pairs)


def random_source(rng, horizon):
    return sequences.BitsSource(random_bits(rng, horizon), label='random')
