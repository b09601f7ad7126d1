# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""JSON/CSV interchange for orders, martingales, sequences, families, machines, requests, batteries and diagonal traces."""

import csv
import io
import json

from .numeric import Dyadic, parse_exact, as_bits, format_exact
from .errors import MalformedInput, SubrandError
from . import orders, martingales, sequences, machines, kraft_chaitin, ml_tests, diagonal

decoders_dict = dict()


def register_decoder(category, kind=None):
    def register_decoder_instance(func):
        key = (category, kind)
        assert key not in decoders_dict, f"Decoder for `{category}:{kind}` already exists."
        decoders_dict[key] = func
        return func
    return register_decoder_instance


def decode(category, data):
    kind = data.get('kind') if isinstance(data, dict) else None
    func = decoders_dict.get((category, kind)) or decoders_dict.get((category, None))
    if func is None:
        known = sorted(k for c, k in decoders_dict if c == category and k)
        raise MalformedInput('Unrecognized %s kind: %r (expecting one of %s)' % (category, kind, known))
    try:
        return func(data)
    except SubrandError:
        raise
    except (KeyError, TypeError, ValueError) as ex:
        raise MalformedInput('Malformed %s description %r: %s' % (category, data, ex))


def _dyadic(text):
    value = parse_exact(text)
    if not isinstance(value, Dyadic):
        raise MalformedInput('Expecting a dyadic number, get: %r' % (text,))
    return value


@register_decoder('order')
def _order(data):
    return orders.from_spec(data)


@register_decoder('martingale', 'constant')
def _constant_martingale(data):
    return martingales.constant_martingale(_dyadic(data.get('c', '1')))


@register_decoder('martingale', 'table')
def _table_martingale(data):
    return martingales.table_martingale({x: _dyadic(v) for x, v in data['values'].items()}, data.get('depth'))


@register_decoder('martingale', 'conditional')
def _conditional_martingale(data):
    return martingales.conditional_martingale([as_bits(x) for x in data['set']])


@register_decoder('martingale', 'lln')
def _lln_martingale(data):
    return martingales.lln_martingale(_dyadic(data['q']))


@register_decoder('martingale', 'weighted_sum')
def _weighted_sum(data):
    return martingales.weighted_sum([decode('martingale', d) for d in data['battery']])


@register_decoder('martingale', 'savings')
def _savings(data):
    return martingales.savings_transform(decode('martingale', data['of']), decode('order', data['f']), int(data.get('n0', 0)))


@register_decoder('martingale', 'rounded')
def _rounded(data):
    return martingales.round_to_dyadic(decode('martingale', data['of']))


@register_decoder('martingale', 'scaled')
def _scaled(data):
    return martingales.scaled(decode('martingale', data['of']), int(data['k']))


@register_decoder('martingale', 'tracking')
def _tracking(data):
    return martingales.tracking_martingale(decode('sequence', data['sequence']), int(data['horizon']))


@register_decoder('martingale', 'test_sum')
def _test_sum(data):
    return ml_tests.test_to_martingale(decode('family', data['family'])).B


@register_decoder('sequence', 'constant')
def _constant_source(data):
    return sequences.constant(str(data.get('bit', '0')))


@register_decoder('sequence', 'periodic')
def _periodic_source(data):
    return sequences.periodic(data['word'])


@register_decoder('sequence', 'alternating')
def _alternating_source(data):
    return sequences.alternating()


@register_decoder('sequence', 'density')
def _density_source(data):
    return sequences.density(int(data['ones']), int(data['period']))


@register_decoder('sequence', 'champernowne')
def _champernowne_source(data):
    return sequences.champernowne()


@register_decoder('sequence', 'rational')
def _rational_source(data):
    return sequences.rational_expansion(int(data['p']), int(data['q']))


@register_decoder('sequence', 'file')
def _file_source(data):
    return sequences.from_file(data['path'])


@register_decoder('sequence', 'bits')
def _bits_source(data):
    return sequences.BitsSource(data['bits'])


@register_decoder('family')
def _family(data):
    stages = dict()
    for item in data.get('families', []):
        entries = stages.setdefault(int(item['n']), dict())
        for stage in item.get('stages', []):
            for x in stage.get('add', []):
                x, t = as_bits(x), int(stage['t'])
                entries[x] = min(t, entries.get(x, t))
    t_max = data.get('t_max')
    if 'f' in data:
        return ml_tests.StagedTestFamily(decode('order', data['f']), stages, n_max=data.get('n_max'), t_max=t_max)
    return ml_tests.family_from_stages(stages, t_max=t_max, provenance=['fitted-control'])


@register_decoder('machine')
def _machine(data):
    entries = data['entries'] if isinstance(data, dict) else data
    return machines.MachineTable([machines.MachineEntry(e['code'], e['out'], int(e['t'])) for e in entries])


@register_decoder('requests')
def _requests(data):
    items = data['requests'] if isinstance(data, dict) else data
    if all(isinstance(q, int) for q in items):
        return kraft_chaitin.RequestSet.from_lengths(items)
    if all(isinstance(q, dict) and 'm' in q for q in items):
        return kraft_chaitin.RequestSet.from_pairs([(int(q['m']), as_bits(q['x'])) for q in items])
    return kraft_chaitin.RequestSet([kraft_chaitin.Request(int(q['length']), q.get('payload', '')) for q in items])


@register_decoder('battery')
def _battery(data):
    items = data['entries'] if isinstance(data, dict) else data
    entries = []
    for e, item in enumerate(items):
        tau = decode('order', item['tau']) if 'tau' in item else None
        entries.append(diagonal.BatteryEntry(decode('martingale', item['d']), decode('order', item['h']), tau, index=e))
    return diagonal.Battery(entries)


@register_decoder('trace')
def _trace(data):
    """A `DiagonalTrace.to_dict()`, bare or inside a saved `diagonalize` report."""
    if 'results' in data:
        data = data['results']['trace']
    bits = as_bits(data['bits'])
    horizon = len(bits)
    F, T = [_dyadic(v) for v in data['F']], [int(v) for v in data['T']]
    if len(F) != horizon + 1 or len(T) != horizon + 1:
        raise MalformedInput('Trace of horizon %d needs %d values of F and T, get: %d, %d' % (horizon, horizon + 1, len(F), len(T)))
    levels, capped = set(data.get('case1_levels', [])), set(data.get('capped_levels', []))
    if any(not 0 <= s < horizon for s in levels | capped):
        raise MalformedInput('Trace levels must lie in [0, %d)' % horizon)
    return diagonal.DiagonalTrace(bits, F, T, [s in levels for s in range(horizon)], [s in capped for s in range(horizon)], [])


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise MalformedInput('Invalid JSON: %s' % ex)


def load(category, path):
    try:
        with open(path, 'r') as fp:
            data = loads(fp.read())
    except OSError as ex:
        raise MalformedInput('Cannot read %s file %s: %s' % (category, path, ex))
    return decode(category, data)


def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2) + '\n'


def rows_to_csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(['' if v is None else v if isinstance(v, (str, int, bool)) else format_exact(v) for v in row])
    return buffer.getvalue()
