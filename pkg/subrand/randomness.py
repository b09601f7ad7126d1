# Copyright (c) subrand contributors.
# Licensed under the MIT license.


# Exact arithmetic and Cantor-space primitives
from .impls.numeric import Dyadic, ZERO, ONE, INFINITY, NEG_INFINITY, pow2, format_exact, parse_exact
from .impls.numeric import ClopenSet, measure, conditional_measure, minimal_prefix_free, llex_cmp, sqsubseteq_cmp
from .impls.errors import (SubrandError, HorizonExhausted, ControlViolated, WeightExceeded, InfeasibleStep,
    MeasureBoundViolated, PreconditionViolated, MalformedInput, ClaimViolated)

# Orders
from .impls.orders import OrderFn, closed_form, table as order_table, inverse, inverse_order, true_order_lower, check_order

# Martingales
from .impls.martingales import (constant_martingale, table_martingale, conditional_martingale, lln_martingale,
    weighted_sum, savings_transform, round_to_dyadic, scaled, tracking_martingale, check_fairness,
    success_report, ville_check)

# Sequences
from .impls.sequences import (constant, periodic, alternating, density, champernowne, rational_expansion,
    from_file, from_trace, prefix, lln_statistic, lln_parameters)

# Machines and Kraft-Chaitin
from .impls.machines import MachineTable, MachineEntry, omega_at, complexity, verify_measure_computable, rb_set
from .impls.kraft_chaitin import (Request, RequestSet, kc_assign, stratum, build_machine_from_test,
    staged_control_order, replay_decode, prefix_free_stages)

# Tests and conversions
from .impls.ml_tests import (StagedTestFamily, verify_family, family_from_stages, reindex_family, test_to_martingale,
    check_approximation, hitting_witness, martingale_to_test, round_trip)

# Diagonal construction
from .impls.diagonal import Battery, BatteryEntry, build_xi, verify_trace

battery_of = Battery.of
