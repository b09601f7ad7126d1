# Copyright (c) subrand contributors.
# Licensed under the MIT license.

import os, sys
import re
import time
import logging

SUBRAND_SEED = int(os.environ.get('SUBRAND_SEED', 0))
SUBRAND_MAX_HORIZON = int(os.environ.get('SUBRAND_MAX_HORIZON', 65536))
SUBRAND_WITNESS_HORIZON = int(os.environ.get('SUBRAND_WITNESS_HORIZON', 4096))
SUBRAND_STRICT = int(os.environ.get('SUBRAND_STRICT', 1))
SUBRAND_LOG_LEVEL = os.environ.get('SUBRAND_LOG_LEVEL', 'INFO')


def init_logging(level=None):
    level = (level or SUBRAND_LOG_LEVEL).upper()
    if not re.match('^[A-Z]+$', level) or not hasattr(logging, level):
        raise Exception('Unrecognized logging level specified: %s' % level)
    logging.basicConfig(level=getattr(logging, level), stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(message)s')


def record_time():
    return time.perf_counter()


def check_horizon(value, name='horizon'):
    from .impls.errors import HorizonExhausted, PreconditionViolated
    if not isinstance(value, int) or value < 0:
        raise PreconditionViolated('`%s` must be a non-negative integer, get: %r' % (name, value))
    if value > SUBRAND_MAX_HORIZON:
        raise HorizonExhausted('`%s` = %d exceeds SUBRAND_MAX_HORIZON = %d' % (name, value, SUBRAND_MAX_HORIZON))
    return value


def strict_or_warn(ok, error):
    if ok:
        return True
    if SUBRAND_STRICT:
        raise error
    logging.warning('%s (SUBRAND_STRICT=0, continuing)' % error)
    return False


def apply_seed_to_pattern(filename, seed, create_dir=True):
    if not re.search(r'\{seed\}', filename):
        logging.debug('Keyword `{seed}` is not found in file pattern: %s, the same path will be reused across seeds.' % filename)

    filename = re.sub(r'\{seed\}', str(seed), filename)
    if create_dir:
        filedir = os.path.dirname(filename)
        if filedir:
            try:
                os.makedirs(filedir)
            except FileExistsError:
                pass
    return filename
