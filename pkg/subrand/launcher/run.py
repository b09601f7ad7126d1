# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Command-line entry point: python -m subrand.launcher.run <command> [<action>] [flags]."""

import os, sys
import argparse
import logging

from .. import system
from ..impls import codec, orders, martingales, machines, kraft_chaitin, ml_tests, diagonal, sequences
from ..impls.numeric import INFINITY, pow2, format_exact, strings_up_to, as_bits
from ..impls.errors import SubrandError, MalformedInput
from .report import Report
from . import suite

TRACE_TAGS = ['claim3', 'q2appro', 'doubling', 'monotone', 'claim5-chain', 'case1-bit', 'claim4', 'claim5']
FAMILY_TAGS = ['stage-length', 'prefix-free', 'measure', 'measure-strict', 'control']

SEQUENCE_SHORTCUTS = {
    'alternating': lambda arg: sequences.alternating(),
    'champernowne': lambda arg: sequences.champernowne(),
    'constant': lambda arg: sequences.constant(arg or '0'),
    'periodic': lambda arg: sequences.periodic(arg),
    'density': lambda arg: sequences.density(*[int(v) for v in arg.split('/')]),
    'rational': lambda arg: sequences.rational_expansion(*[int(v) for v in arg.split('/')]),
    'bits': lambda arg: sequences.BitsSource(arg),
}


def parse_sequence(text):
    """A JSON description file, a 0/1 text file, or `name[:arg]` (e.g. density:3/4, constant:1)."""
    if os.path.isfile(text):
        if text.endswith('.json'):
            return codec.load('sequence', text)
        return sequences.from_file(text)
    name, _, arg = text.partition(':')
    if name not in SEQUENCE_SHORTCUTS:
        raise MalformedInput('Unrecognized sequence: %s (expecting a file or one of %s)' % (text, sorted(SEQUENCE_SHORTCUTS)))
    try:
        return SEQUENCE_SHORTCUTS[name](arg)
    except (TypeError, ValueError) as ex:
        raise MalformedInput('Bad sequence argument %r: %s' % (text, ex))


def parse_order(text):
    """A JSON description file or `name[:k=v,...]` of a closed form (e.g. floor_div:k=2)."""
    if os.path.isfile(text):
        return codec.load('order', text)
    name, _, arg = text.partition(':')
    params = dict()
    for item in filter(None, arg.split(',')):
        key, _, value = item.partition('=')
        try:
            params[key] = int(value)
        except ValueError:
            raise MalformedInput('Order parameter %r must be an integer' % item)
    return orders.closed_form(name, **params)


def require(args, name):
    value = getattr(args, name)
    if value is None:
        raise MalformedInput('Command `%s` needs --%s' % (args.command_name, name))
    return value


def run_fairness_check(args, report):
    d = codec.load('martingale', require(args, 'martingale'))
    bad = martingales.fairness_violations(d, args.depth)
    report.check('fairness', not bad, detail=bad[:16] or None)
    if args.ville is not None:
        levels = martingales.ville_check(d, args.ville, args.depth)
        for level in levels:
            report.check('eq-tertio', level.ok, index=level.k)
        report.results['ville'] = [{'k': l.k, 'measure': format_exact(l.measure), 'bound': format_exact(l.bound)} for l in levels]
    report.results['martingale'] = d.describe()
    report.results['root'] = format_exact(d(''))


def run_kc_build(args, report):
    L = codec.load('requests', require(args, 'requests'))
    result = kraft_chaitin.kc_assign(L)
    report.results.update(result.to_dict())
    report.check('kc-lengths', [len(w) for w in result.codewords] == [q.length for q in L])
    report.check('kc-omega', result.omega == L.weight)
    report.check('kc-replay', not kraft_chaitin.replay_mismatches(L, result))
    if args.emit:
        with open(args.emit, 'w') as fp:
            fp.write(codec.dumps(result.emitted.to_list()))


def run_convert_test_to_mart(args, report):
    X = codec.load('family', require(args, 'family'))
    bundle = ml_tests.test_to_martingale(X)
    report.results['bundle'] = bundle.describe()
    report.results['B'] = {x: format_exact(bundle.B(x)) for x in strings_up_to(min(args.depth, 4))}
    failures = ml_tests.check_approximation(bundle, args.depth, args.depth)
    report.check('B-approx', not failures, detail=[[c.x, c.i] for c in failures[:16]] or None)
    for text in args.sequence or []:
        witnesses = ml_tests.hitting_witness(bundle, parse_sequence(text), args.horizon)
        for w in witnesses:
            report.check('intersec', w.ok, index=[text, w.n])
        report.results.setdefault('witnesses', {})[text] = [w.to_dict() for w in witnesses]


def run_convert_mart_to_test(args, report):
    d = codec.load('martingale', require(args, 'martingale'))
    g = parse_order(require(args, 'order'))
    Y = ml_tests.martingale_to_test(d, g, args.horizon)
    verdict = ml_tests.verify_family(Y)
    report.results['family'] = Y.describe()
    report.check_failures(['stage-length', 'prefix-free', 'measure', 'control'], verdict.violations)


def run_machine(args, report):
    M = codec.load('machine', require(args, 'machine'))
    report.results['machine'] = M.to_list()
    if args.action == 'omega':
        t = INFINITY if args.at is None else args.at
        report.results['omega'] = format_exact(machines.omega_at(M, t))
        report.results['at'] = str(t)
    elif args.action == 'k':
        report.results['K'] = str(machines.complexity(M, as_bits(require(args, 'x'))))
    else:
        g = parse_order(args.g) if args.g else machines.fit_controlling_function(M, args.maxlen)
        report.results['g'] = g.spec
        unstaged = machines.rb_set(M, args.b, args.maxlen)
        staged = machines.rb_set(M, args.b, args.maxlen, staged_with=g)
        report.results['rb'] = [x for x in unstaged]
        report.results['rb_staged'] = [x for x in staged]
        report.results['measure'] = format_exact(unstaged.measure())
        report.check('rb-measure', unstaged.measure() <= pow2(-args.b))
        if args.b >= 1:
            report.check('KM-equivalence', staged == unstaged)


def _battery_trace(args, report):
    battery = codec.load('battery', require(args, 'battery'))
    if getattr(args, 'trace', None):
        trace = codec.load('trace', args.trace)
        report.results['horizon'] = trace.horizon
    else:
        trace = diagonal.build_xi(battery, args.horizon)
    verdict = diagonal.verify_trace(trace, battery)
    report.check_failures(TRACE_TAGS, verdict.failures)
    report.results['verdict'] = verdict.to_dict()
    return trace


def run_diagonalize(args, report):
    trace = _battery_trace(args, report)
    report.results['trace'] = trace.to_dict()
    report.set_table(['s', 'bit', 'F', 'T', 'case1', 'delta'],
        [[s, trace.bits[s], trace.F_values[s + 1], trace.T_values[s + 1], trace.case_flags[s], trace.delta_values[s + 1]]
            for s in range(trace.horizon)])


def run_verify(args, report):
    if args.action == 'trace':
        _battery_trace(args, report)
        return
    X = codec.load('family', require(args, 'family'))
    verdict = ml_tests.verify_family(X, strict=args.strict)
    report.results['family'] = X.describe()
    report.check_failures(FAMILY_TAGS if args.strict else [t for t in FAMILY_TAGS if t != 'measure-strict'], verdict.violations)


def run_battery(args, report):
    battery = codec.load('battery', require(args, 'battery'))
    rows, matrix = [], []
    for text in require(args, 'sequence'):
        source = parse_sequence(text)
        for e, entry in enumerate(battery):
            r = martingales.success_report(entry.d, entry.h, source, args.horizon)
            matrix.append({'entry': e, 'sequence': text, 'report': r.to_dict()})
            rows.extend([e, text] + row for row in r.to_rows())
    report.results['matrix'] = matrix
    report.set_table(['entry', 'sequence', 'i', 'capital', 'bound', 'hit'], rows)


def run_sequence(args, report):
    source = parse_sequence(require(args, 'sequence')[0])
    report.results['sequence'] = source.describe()
    if args.action == 'prefix':
        report.results['prefix'] = sequences.prefix(source, args.horizon)
        return
    params = sequences.lln_parameters(source, args.horizon)
    r = martingales.success_report(martingales.lln_martingale(params.q), params.order(), source, args.horizon)
    report.results['parameters'] = params.to_dict()
    report.results['success'] = r.to_dict()
    report.check('large-numbers', r.verdict_io and r.verdict_ae_tail is not None)


def run_suite(args, report):
    report.results['suites'] = suite.run_suites(report, args.seed, args.suite, args.count, args.horizon_override)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--horizon', type=int, default=64)
    common.add_argument('--depth', type=int, default=8)
    common.add_argument('--seed', type=int, default=system.SUBRAND_SEED)
    common.add_argument('--format', type=str, default='json', choices=['json', 'csv'])
    common.add_argument('--out', type=str, default='')
    common.add_argument('--log_level', type=str, default=None)
    common.add_argument('--battery', type=str, default=None)
    common.add_argument('--family', type=str, default=None)
    common.add_argument('--machine', type=str, default=None)
    common.add_argument('--requests', type=str, default=None)
    common.add_argument('--martingale', type=str, default=None)
    common.add_argument('--sequence', type=str, default=None, action='append')

    parser = argparse.ArgumentParser(prog='python -m subrand.launcher.run')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('fairness-check', parents=[common])
    p.add_argument('--ville', type=int, default=None)
    p.set_defaults(handler=run_fairness_check)

    kc = commands.add_parser('kc').add_subparsers(dest='action', required=True)
    p = kc.add_parser('build', parents=[common])
    p.add_argument('--emit', type=str, default='')
    p.set_defaults(handler=run_kc_build)

    convert = commands.add_parser('convert').add_subparsers(dest='action', required=True)
    convert.add_parser('test-to-mart', parents=[common]).set_defaults(handler=run_convert_test_to_mart)
    p = convert.add_parser('mart-to-test', parents=[common])
    p.add_argument('--order', type=str, default=None)
    p.set_defaults(handler=run_convert_mart_to_test)

    machine = commands.add_parser('machine').add_subparsers(dest='action', required=True)
    p = machine.add_parser('omega', parents=[common])
    p.add_argument('--at', type=int, default=None)
    p = machine.add_parser('k', parents=[common])
    p.add_argument('--x', type=str, default=None)
    p = machine.add_parser('rb', parents=[common])
    p.add_argument('--b', type=int, default=1)
    p.add_argument('--maxlen', type=int, default=10)
    p.add_argument('--g', type=str, default=None)
    for action in ('omega', 'k', 'rb'):
        machine.choices[action].set_defaults(handler=run_machine)

    commands.add_parser('diagonalize', parents=[common]).set_defaults(handler=run_diagonalize)

    battery = commands.add_parser('battery').add_subparsers(dest='action', required=True)
    battery.add_parser('run', parents=[common]).set_defaults(handler=run_battery)

    verify = commands.add_parser('verify').add_subparsers(dest='action', required=True)
    p = verify.add_parser('family', parents=[common])
    p.add_argument('--strict', default=False, action='store_true')
    p.set_defaults(handler=run_verify)
    p = verify.add_parser('trace', parents=[common])
    p.add_argument('--trace', type=str, default=None)
    p.set_defaults(handler=run_verify)

    p = commands.add_parser('suite', parents=[common])
    p.add_argument('--suite', type=str, default=None, action='append', choices=sorted(suite.suites_dict) + ['all'])
    p.add_argument('--count', type=int, default=None)
    p.add_argument('--horizon_override', type=int, default=None)
    p.set_defaults(handler=run_suite)

    sequence = commands.add_parser('sequence').add_subparsers(dest='action', required=True)
    sequence.add_parser('prefix', parents=[common]).set_defaults(handler=run_sequence)
    sequence.add_parser('lln', parents=[common]).set_defaults(handler=run_sequence)
    return parser


def echo_inputs(args):
    skip = {'handler', 'log_level', 'out', 'format', 'command_name'}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v not in (None, '', False)}


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.command_name = ' '.join(filter(None, [args.command, getattr(args, 'action', None)]))
    system.init_logging(args.log_level)
    for name in ('horizon', 'depth'):
        if getattr(args, name) < 1:
            logging.error('--%s must be positive, get: %d' % (name, getattr(args, name)))
            return 2

    report = Report(args.command_name, args.seed, echo_inputs(args))
    started = system.record_time()
    try:
        system.check_horizon(args.horizon)
        system.check_horizon(args.depth, 'depth')
        args.handler(args, report)
    except MalformedInput as ex:
        logging.error('Malformed input: %s' % ex)
        return 2
    except SubrandError as ex:
        logging.error('%s [%s]: %s' % (type(ex).__name__, ex.tag or 'precondition', ex))
        report.check(ex.tag or type(ex).__name__, False, index=ex.index, detail=str(ex))

    text = report.render(args.format)
    if args.out:
        with open(system.apply_seed_to_pattern(args.out, args.seed), 'w') as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)
    logging.info('Command `%s` finished in %.2fs: %s' % (args.command_name, system.record_time() - started,
        'ok' if report.ok else 'FAILED'))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
