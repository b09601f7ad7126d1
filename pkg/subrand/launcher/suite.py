# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Randomized property suites; suite k draws from default_rng([seed, k])."""

import logging

from .. import system
from ..impls.numeric import Dyadic, pow2
from ..impls.errors import SubrandError
from ..impls import generators, martingales, machines, kraft_chaitin, ml_tests, diagonal, sequences, orders

suites_dict = dict()


def register_suite(name, count, budget=None):
    """`budget`: expected seconds at the default count; overruns are logged, never reported."""
    def register_suite_instance(func):
        assert name not in suites_dict, f"Suite `{name}` already exists."
        suites_dict[name] = (len(suites_dict), func, count, budget)
        return func
    return register_suite_instance


@register_suite('fairness', 50, budget=10)
def fairness_suite(rng, report, count, depth=12, **kwargs):
    cases = [('conditional', martingales.conditional_martingale(generators.random_clopen(rng))) for _ in range(count)]
    cases += [('lln', martingales.lln_martingale(Dyadic(k, 2))) for k in (1, 2, 3)]
    cases += [('weighted_sum', generators.random_martingale(rng, kinds=('weighted_sum',))) for _ in range(max(1, count // 10))]
    cases += [('savings', martingales.savings_transform(martingales.lln_martingale(Dyadic(k, 2)), orders.affine(2, 1))) for k in (1, 3)]
    cases += [('rounded', martingales.round_to_dyadic(generators.random_martingale(rng))) for _ in range(max(1, count // 10))]
    failed = [i for i, (_, d) in enumerate(cases) if not martingales.check_fairness(d, depth)]
    report.check('fairness', not failed, detail=[cases[i][0] for i in failed] or None)
    return {'martingales': len(cases), 'depth': depth}


@register_suite('ville', 100, budget=30)
def ville_suite(rng, report, count, kmax=8, maxlen=12, **kwargs):
    bad = []
    for index in range(count):
        d = generators.random_martingale(rng)
        bad += [(index, level.k) for level in martingales.ville_check(d, kmax, maxlen) if not level.ok]
    report.check('eq-tertio', not bad, detail=bad[:16] or None)
    return {'martingales': count, 'kmax': kmax, 'maxlen': maxlen}


@register_suite('kraft-chaitin', 200, budget=20)
def kraft_chaitin_suite(rng, report, count, **kwargs):
    lengths_bad, omega_bad, replay_bad = [], [], []
    for index in range(count):
        L = generators.random_request_set(rng)
        result = kraft_chaitin.kc_assign(L)
        if [len(w) for w in result.codewords] != [q.length for q in L]:
            lengths_bad.append(index)
        if result.omega != L.weight:
            omega_bad.append(index)
        if kraft_chaitin.replay_mismatches(L, result):
            replay_bad.append(index)
    report.check('kc-lengths', not lengths_bad, detail=lengths_bad or None)
    report.check('kc-omega', not omega_bad, detail=omega_bad or None)
    report.check('kc-replay', not replay_bad, detail=replay_bad or None)
    return {'request_sets': count}


@register_suite('goal-fact', 50)
def goal_fact_suite(rng, report, count, rmax=8, **kwargs):
    bad = []
    for index in range(count):
        X = generators.random_strict_family(rng)
        result = kraft_chaitin.build_machine_from_test(X)
        h = kraft_chaitin.staged_control_order(X, result.clock)
        residuals = machines.control_residuals(result.emitted, h, rmax)
        bad += [(index, r) for r, value in enumerate(residuals) if value > pow2(-r)]
    report.check('goal-fact', not bad, detail=bad[:16] or None)
    return {'families': count, 'rmax': rmax}


@register_suite('b-approx', 20, budget=60)
def approximation_suite(rng, report, count, maxlen=8, imax=8, **kwargs):
    bad = []
    for index in range(count):
        bundle = ml_tests.test_to_martingale(generators.random_strict_family(rng))
        bad += [(index, c.x, c.i) for c in ml_tests.check_approximation(bundle, maxlen, imax)]
    report.check('B-approx', not bad, detail=bad[:16] or None)
    return {'families': count, 'maxlen': maxlen, 'imax': imax}


@register_suite('round-trip', 10)
def round_trip_suite(rng, report, count, n_max=4, **kwargs):
    horizon = 2 * n_max + 4
    bad = []
    for index in range(count):
        bits = generators.random_bits(rng, horizon)
        X = generators.random_strict_family(rng, n_max, through=bits)
        try:
            if not ml_tests.round_trip(X, sequences.BitsSource(bits), horizon).ok:
                bad.append(index)
        except SubrandError as ex:
            bad.append((index, ex.tag))
    report.check('intersec', not bad, detail=bad or None)
    return {'families': count, 'horizon': horizon}


@register_suite('km-equivalence', 50)
def km_suite(rng, report, count, bmax=4, maxlen=10, **kwargs):
    differ, heavy = [], []
    for index in range(count):
        M, _ = generators.random_machine(rng)
        g = machines.fit_controlling_function(M, maxlen)
        for b in range(1, bmax + 1):
            unstaged = machines.rb_set(M, b, maxlen)
            if machines.rb_set(M, b, maxlen, staged_with=g) != unstaged:
                differ.append((index, b))
            if unstaged.measure() > pow2(-b):
                heavy.append((index, b))
    report.check('KM-equivalence', not differ, detail=differ[:16] or None)
    report.check('rb-measure', not heavy, detail=heavy[:16] or None)
    return {'machines': count, 'bmax': bmax, 'maxlen': maxlen}


@register_suite('diagonal', 10, budget=120)
def diagonal_suite(rng, report, count, horizon=4096, **kwargs):
    failures, sparse = [], []
    for index in range(count):
        battery = generators.random_battery(rng, 1 + index % 8)
        trace = diagonal.build_xi(battery, horizon)
        verdict = diagonal.verify_trace(trace, battery)
        failures += [(tag, index) + tuple(rest) for tag, *rest in verdict.failures]
        if verdict.case1_count < horizon // 512:
            sparse.append(index)
    report.check_failures(['claim3', 'q2appro', 'doubling', 'case1-bit', 'claim4', 'claim5'], failures)
    report.check('claim1', not sparse, detail=sparse or None)
    return {'batteries': count, 'horizon': horizon}


@register_suite('lln', 1)
def lln_suite(rng, report, count, horizon=1024, **kwargs):
    biased = sequences.density(3, 4)
    params = sequences.lln_parameters(biased, horizon)
    d, h = martingales.lln_martingale(params.q), params.order()
    hit = martingales.success_report(d, h, biased, horizon)
    report.check('large-numbers', hit.verdict_io and hit.verdict_ae_tail is not None)
    quiet = martingales.success_report(d, h, sequences.alternating(), horizon)
    report.check('large-numbers-balanced', all(i <= 2 for i in quiet.hit_indices))
    return {'parameters': params.to_dict(), 'horizon': horizon, 'ae_tail': hit.verdict_ae_tail,
        'balanced_hits': quiet.hit_indices}


def run_suites(report, seed, names=None, count=None, horizon=None):
    names = sorted(suites_dict, key=lambda n: suites_dict[n][0]) if not names or 'all' in names else names
    summary = dict()
    for name in names:
        index, func, default_count, budget = suites_dict[name]
        rng = generators.make_rng([seed, index])
        kwargs = {'horizon': horizon} if horizon and name in ('diagonal', 'lln') else {}
        started = system.record_time()
        summary[name] = func(rng, report, count or default_count, **kwargs)
        elapsed = system.record_time() - started
        logging.info('Suite %s finished in %.2fs' % (name, elapsed))
        if budget is not None and elapsed > budget:
            logging.warning('Suite %s took %.2fs, over its %ds budget' % (name, elapsed, budget))
    return summary
