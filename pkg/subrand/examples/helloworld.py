#!/usr/bin/env python3

# Copyright (c) subrand contributors.
# Licensed under the MIT license.

import argparse
import logging

from subrand import system
from subrand import randomness as rnd

parser = argparse.ArgumentParser()

parser.add_argument('--horizon', type=int, default=256)
parser.add_argument('--q', type=str, default='1/2')
parser.add_argument('--order', type=str, default='ceil_div')
parser.add_argument('--k', type=int, default=2)
parser.add_argument('--log_level', type=str, default=None)
args = parser.parse_args()

system.init_logging(args.log_level)

# a two-entry battery: a law-of-large-numbers bettor and the bettor on a single cylinder
h = rnd.closed_form(args.order, k=args.k) if args.order.endswith('_div') else rnd.closed_form(args.order)
battery = rnd.battery_of([
    (rnd.lln_martingale(rnd.parse_exact(args.q)), h),
    (rnd.conditional_martingale(['1']), h),
])

trace = rnd.build_xi(battery, args.horizon)
verdict = rnd.verify_trace(trace, battery)

print('xi[:64] = %s' % trace.bits[:64])
print('case-1 levels = %s' % trace.case1_levels[:16])
print('F(xi|%d) = %s, T = %d' % (trace.horizon, trace.F_values[-1], trace.T_values[-1]))
for e, entry in enumerate(battery):
    report = rnd.success_report(entry.d, entry.h, rnd.from_trace(trace), trace.horizon)
    print('entry %d: hits = %d, max capital = %s, a.e. tail from = %s' % (
        e, len(report.hit_indices), rnd.format_exact(report.max_capital), report.verdict_ae_tail))
if not verdict.ok:
    logging.warning('Trace verification failed: %s' % verdict.failures[:8])
print('trace verification: %s' % ('ok' if verdict.ok else 'FAILED'))
