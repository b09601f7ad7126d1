# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Deterministic run reports: inputs echoed, seed, per-assertion pass/fail, no timing."""

import json

from ..impls import codec


class Report:
    def __init__(self, command, seed, inputs=None):
        self.command, self.seed = command, seed
        self.inputs = dict(inputs or {})
        self.results = dict()
        self.assertions = []
        self.table = None

    def check(self, tag, ok, index=None, detail=None):
        item = {'tag': tag, 'index': index, 'ok': bool(ok)}
        if detail is not None:
            item['detail'] = detail
        self.assertions.append(item)
        return bool(ok)

    def check_failures(self, tags, failures):
        """One assertion per tag; `failures` holds (tag, index...) tuples."""
        for tag in tags:
            bad = [list(f[1:]) for f in failures if f[0] == tag]
            self.check(tag, not bad, detail=bad[:16] if bad else None)

    def set_table(self, header, rows):
        self.table = (list(header), [list(r) for r in rows])

    @property
    def ok(self):
        return all(a['ok'] for a in self.assertions)

    def to_dict(self):
        assertions = sorted(self.assertions, key=lambda a: (a['tag'], json.dumps(a['index'])))
        return {'command': self.command, 'seed': self.seed, 'inputs': self.inputs, 'results': self.results,
            'assertions': assertions, 'claims': sorted({a['tag'] for a in assertions}), 'ok': self.ok}

    def render(self, fmt='json'):
        if fmt == 'json':
            return codec.dumps(self.to_dict())
        if self.table is not None:
            return codec.rows_to_csv(*self.table)
        return codec.rows_to_csv(['tag', 'index', 'ok'], [[a['tag'], json.dumps(a['index']), a['ok']]
            for a in self.to_dict()['assertions']])
