# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Orders h: N -> N (nondecreasing, unbounded), their inverses and strictification.

Unboundedness is witnessed, never assumed: every order carries a witness
horizon and searches past it raise `HorizonExhausted` instead of looping.
"""

import math
import logging

from .. import system
from .errors import HorizonExhausted, MalformedInput, PreconditionViolated

closed_forms_dict = dict()


def register_closed_form(name=None):
    def register_closed_form_instance(func):
        key = name or func.__name__
        assert key not in closed_forms_dict, f"Closed-form order with name `{key}` already exists."
        closed_forms_dict[key] = func
        return func
    return register_closed_form_instance


@register_closed_form('identity')
def _identity():
    return lambda n: n, dict(strictly_increasing=True)

@register_closed_form('constant')
def _constant(c=0):
    return lambda n: c, dict(strictly_increasing=False, bounded=True)

@register_closed_form('affine')
def _affine(a=1, b=0):
    assert a >= 0 and b >= 0, "Affine order needs non-negative coefficients, get: a=%s, b=%s" % (a, b)
    return lambda n: a * n + b, dict(strictly_increasing=(a > 0), bounded=(a == 0))

@register_closed_form('floor_div')
def _floor_div(k=2):
    assert k >= 1, "Divisor must be positive, get: %s" % k
    return lambda n: n // k, dict(strictly_increasing=(k == 1))

@register_closed_form('ceil_div')
def _ceil_div(k=2):
    assert k >= 1, "Divisor must be positive, get: %s" % k
    return lambda n: -(-n // k), dict(strictly_increasing=(k == 1))

@register_closed_form('power')
def _power(p=2):
    assert p >= 1, "Exponent must be positive, get: %s" % p
    return lambda n: n ** p, dict(strictly_increasing=True)

@register_closed_form('sqrt_ceil')
def _sqrt_ceil():
    def fn(n):
        r = math.isqrt(n)
        return r if r * r == n else r + 1
    return fn, dict(strictly_increasing=False)

@register_closed_form('log_ceil')
def _log_ceil():
    # ceil(log2(n + 1))
    return lambda n: n.bit_length(), dict(strictly_increasing=False)


class OrderFn:
    """A total map N -> N with declared monotonicity flags.

    `spec` is the JSON-able description used by the codec; `evaluator` the
    callable. Derived orders (inverse, strictify, ...) memoize their values.
    """

    def __init__(self, spec, evaluator, nondecreasing=True, strictly_increasing=False, witness_horizon=None, bounded=False):
        self.spec = spec
        self._evaluator = evaluator
        self.nondecreasing = nondecreasing or strictly_increasing
        self.strictly_increasing = strictly_increasing
        self.bounded = bounded
        self.witness_horizon = system.SUBRAND_WITNESS_HORIZON if witness_horizon is None else witness_horizon

    def __call__(self, n):
        if n < 0:
            raise PreconditionViolated('Orders are defined on non-negative integers, get: %d' % n)
        return self._evaluator(n)

    def values(self, upto):
        return [self(n) for n in range(upto + 1)]

    def __repr__(self):
        return 'OrderFn(%s)' % (self.spec,)

    def check_flags(self, horizon):
        """Re-check the declared flags on [0, horizon]; returns the first offending index or None."""
        previous = self(0)
        for n in range(1, horizon + 1):
            value = self(n)
            if self.strictly_increasing and value <= previous:
                return n
            if self.nondecreasing and value < previous:
                return n
            previous = value
        return None

    def witness(self, n):
        """Least k with f(k) >= n below the witness horizon."""
        horizon = self.witness_horizon
        if self.nondecreasing:
            if self(horizon) < n:
                raise HorizonExhausted('No k <= %d with f(k) >= %d for order %s' % (horizon, n, self.spec))
            lo, hi = 0, horizon
            while lo < hi:
                mid = (lo + hi) // 2
                if self(mid) >= n:
                    hi = mid
                else:
                    lo = mid + 1
            return lo
        for k in range(horizon + 1):
            if self(k) >= n:
                return k
        raise HorizonExhausted('No k <= %d with f(k) >= %d for order %s' % (horizon, n, self.spec))


def closed_form(name, **params):
    if name not in closed_forms_dict:
        raise MalformedInput('Unrecognized closed-form order: %s (expecting one of %s)' % (name, sorted(closed_forms_dict)))
    try:
        evaluator, flags = closed_forms_dict[name](**params)
    except TypeError as ex:
        raise MalformedInput('Bad parameters for closed-form order `%s`: %s' % (name, ex))
    bounded = flags.pop('bounded', False)
    return OrderFn({'kind': 'closed_form', 'name': name, 'params': dict(params)}, evaluator,
        nondecreasing=True, bounded=bounded, **flags)


def identity():
    return closed_form('identity')


def constant(c):
    return closed_form('constant', c=c)


def affine(a, b=0):
    return closed_form('affine', a=a, b=b)


def table(values, extension=None):
    """Explicit values f(0..len-1) followed by a constant or affine extension rule."""
    values = [int(v) for v in values]
    if not values or any(v < 0 for v in values):
        raise MalformedInput('Order tables need at least one non-negative value, get: %s' % values)
    extension = dict(extension or {'rule': 'affine', 'slope': 1})
    rule = extension.get('rule', 'affine')
    if rule == 'constant':
        slope = 0
    elif rule == 'affine':
        slope = int(extension.get('slope', 1))
        if slope < 0:
            raise MalformedInput('Table extension slope must be non-negative, get: %d' % slope)
    else:
        raise MalformedInput('Unrecognized table extension rule: %s' % rule)
    last, size = values[-1], len(values)

    def fn(n):
        return values[n] if n < size else last + slope * (n - size + 1)

    nondecreasing = all(values[i] <= values[i + 1] for i in range(size - 1))
    strictly = slope > 0 and all(values[i] < values[i + 1] for i in range(size - 1))
    return OrderFn({'kind': 'table', 'values': values, 'extension': extension}, fn,
        nondecreasing=nondecreasing, strictly_increasing=strictly, bounded=(slope == 0))


class _Memo:
    def __init__(self, fn):
        self.fn = fn
        self.cache = dict()

    def __call__(self, n):
        if n not in self.cache:
            self.cache[n] = self.fn(n)
        return self.cache[n]


def inverse(f, n):
    """Inv_f(n): least k with f(k) >= n."""
    return f.witness(n)


def inverse_order(f):
    """Inv_f packaged as an order; Inv_f is nondecreasing for any f and unbounded when f is finite-valued."""
    if f.bounded:
        raise PreconditionViolated('Inverse of a bounded order is not total: %s' % (f.spec,))
    # Inv_f(n) stays within f's horizon H exactly for n <= max f on [0, H]
    if f.nondecreasing:
        horizon = f(f.witness_horizon)
    else:
        horizon = max(f(k) for k in range(f.witness_horizon + 1))
    return OrderFn({'kind': 'derived', 'op': 'inverse', 'of': f.spec}, _Memo(f.witness),
        nondecreasing=True, witness_horizon=max(horizon, 1))


def double_inverse_check(f, i):
    assert i >= 1, "double_inverse_check() is stated for i >= 1, get: %d" % i
    return inverse(inverse_order(f), i), f(i - 1) + 1


def strictify(f):
    """g(0) = f(0), g(n+1) = max(g(n) + 1, f(n+1)): strictly increasing and g >= f."""
    if f.strictly_increasing:
        return f
    values = [f(0)]

    def fn(n):
        while len(values) <= n:
            k = len(values)
            values.append(max(values[-1] + 1, f(k)))
        return values[n]

    return OrderFn({'kind': 'derived', 'op': 'strictify', 'of': f.spec}, fn,
        strictly_increasing=True, witness_horizon=f.witness_horizon)


def compose(f, g):
    """n -> f(g(n))."""
    return OrderFn({'kind': 'derived', 'op': 'compose', 'of': [f.spec, g.spec]}, lambda n: f(g(n)),
        nondecreasing=f.nondecreasing and g.nondecreasing,
        strictly_increasing=f.strictly_increasing and g.strictly_increasing,
        witness_horizon=g.witness_horizon, bounded=f.bounded or g.bounded)


def plus(f, g):
    """n -> f(n) + g(n)."""
    return OrderFn({'kind': 'derived', 'op': 'plus', 'of': [f.spec, g.spec]}, lambda n: f(n) + g(n),
        nondecreasing=f.nondecreasing and g.nondecreasing,
        strictly_increasing=(f.strictly_increasing and g.nondecreasing) or (g.strictly_increasing and f.nondecreasing),
        witness_horizon=min(f.witness_horizon, g.witness_horizon), bounded=f.bounded and g.bounded)


def monus(f, c):
    """n -> f(n) - c truncated at 0."""
    if c == 0:
        return f
    return OrderFn({'kind': 'derived', 'op': 'monus', 'c': c, 'of': f.spec}, lambda n: max(f(n) - c, 0),
        nondecreasing=f.nondecreasing, witness_horizon=f.witness_horizon, bounded=f.bounded)


def scale_arg(f, c):
    """n -> f(c * n)."""
    assert c >= 1, "Argument scale must be positive, get: %d" % c
    return OrderFn({'kind': 'derived', 'op': 'scale_arg', 'c': c, 'of': f.spec}, lambda n: f(c * n),
        nondecreasing=f.nondecreasing, strictly_increasing=f.strictly_increasing,
        witness_horizon=max(f.witness_horizon // c, 1), bounded=f.bounded)


def offset_arg(f, c):
    """n -> f(n + c)."""
    assert c >= 0, "Argument offset must be non-negative, get: %d" % c
    return OrderFn({'kind': 'derived', 'op': 'offset_arg', 'c': c, 'of': f.spec}, lambda n: f(n + c),
        nondecreasing=f.nondecreasing, strictly_increasing=f.strictly_increasing,
        witness_horizon=f.witness_horizon, bounded=f.bounded)


def true_order_lower(f):
    """Strictly increasing g with Inv_g(i) <= f(i) for i >= i0, built from f'(i) = f(i+1) - 1."""
    f_prime = monus(offset_arg(f, 1), 1)
    inv = inverse_order(f_prime)
    g = strictify(inv)
    i0 = next((i for i in range(1, f.witness_horizon + 1) if f(i) > 0), None)
    if i0 is None:
        raise HorizonExhausted('Order %s stays at 0 up to its witness horizon %d' % (f.spec, f.witness_horizon))
    return g, i0


def check_lower_bound(f, g, i0, horizon):
    """Indices i in [i0, horizon] where Inv_g(i) <= f(i) fails."""
    return [i for i in range(i0, horizon + 1) if inverse(g, i) > f(i)]


def check_order(f, horizon):
    """Inv_f nondecreasing and unbounded on [0, horizon], and the double-inverse identity on [1, min(64, horizon)]."""
    problems = []
    bad = f.check_flags(horizon)
    if bad is not None:
        problems.append(('flags', bad))
    inv = inverse_order(f)
    previous = inv(0)
    for n in range(1, horizon + 1):
        value = inv(n)
        if value < previous:
            problems.append(('inverse-nondecreasing', n))
            break
        previous = value
    for i in range(1, min(64, horizon) + 1):
        lhs, rhs = double_inverse_check(f, i)
        if lhs != rhs:
            problems.append(('inv-inv', i))
    if problems:
        logging.warning('Order %s failed checks: %s' % (f.spec, problems))
    return problems


def from_spec(spec):
    """Rebuild an order from its JSON description."""
    if not isinstance(spec, dict) or 'kind' not in spec:
        raise MalformedInput('Order description must be an object with a `kind` field, get: %r' % (spec,))
    kind = spec['kind']
    if kind == 'closed_form':
        return closed_form(spec.get('name'), **spec.get('params', {}))
    if kind == 'table':
        return table(spec.get('values', []), spec.get('extension'))
    if kind != 'derived':
        raise MalformedInput('Unrecognized order kind: %s' % kind)
    op = spec.get('op')
    if op in ('compose', 'plus'):
        f, g = [from_spec(x) for x in spec['of']]
        return compose(f, g) if op == 'compose' else plus(f, g)
    inner = from_spec(spec.get('of'))
    if op == 'inverse':
        return inverse_order(inner)
    if op == 'strictify':
        return strictify(inner)
    if op == 'monus':
        return monus(inner, int(spec['c']))
    if op == 'scale_arg':
        return scale_arg(inner, int(spec['c']))
    if op == 'offset_arg':
        return offset_arg(inner, int(spec['c']))
    raise MalformedInput('Unrecognized derived order op: %s' % op)
