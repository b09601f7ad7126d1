# Copyright (c) subrand contributors.
# Licensed under the MIT license.

import unittest

from hypothesis import given, settings, strategies as st

from subrand.impls import machines, kraft_chaitin, ml_tests, orders, sequences, generators
from subrand.impls.numeric import Dyadic, ZERO, INFINITY, NEG_INFINITY, ClopenSet, sqsubseteq_key
from subrand.impls.errors import (ControlViolated, MalformedInput, PreconditionViolated, WeightExceeded,
    MeasureBoundViolated)


def sample_machine():
    return machines.MachineTable([('0', '00', 1), ('10', '0110', 3)])


def sample_family(f=None):
    return ml_tests.StagedTestFamily(f or orders.affine(1, 3), {0: {'0': 1}, 1: {'00': 4}})


class MachineTableTestCase(unittest.TestCase):
    """Prefix-free machines, staged halting probability and complexity."""

    def test_omega_and_residuals(self):
        """Omega_M, its stages and control residuals."""
        M = sample_machine()
        self.assertEqual(machines.omega_at(M), Dyadic(3, 2))
        self.assertEqual(machines.omega_at(M, 2), Dyadic(1, 1))
        self.assertEqual(machines.omega_at(M, 0), ZERO)
        self.assertEqual(machines.control_residuals(M, orders.identity(), 3),
            [Dyadic(3, 2), Dyadic(1, 2), Dyadic(1, 2), ZERO])
        witness = machines.verify_measure_computable(M, orders.identity(), 3)
        self.assertEqual(witness.checked_range, (0, 3))

    def test_control_violated(self):
        """g = 0 leaves 3/4 > 2^-1 unaccounted for at i = 1."""
        with self.assertRaises(ControlViolated) as ctx:
            machines.verify_measure_computable(sample_machine(), orders.constant(0), 3)
        self.assertEqual(ctx.exception.index, 1)

    def test_fit_controlling_function(self):
        """The fitted order passes verification well beyond its fitting range."""
        M = sample_machine()
        g = machines.fit_controlling_function(M, 4)
        self.assertTrue(g.strictly_increasing)
        machines.verify_measure_computable(M, g, 16)

    def test_complexity(self):
        """K_M, staged and unstaged."""
        M = sample_machine()
        self.assertEqual(machines.complexity(M, '00'), 1)
        self.assertEqual(machines.complexity(M, '0110'), 2)
        self.assertIs(machines.complexity(M, '0110', 2), INFINITY)
        self.assertIs(machines.complexity(M, '1'), INFINITY)

    def test_rb_set(self):
        """R_b = {x : K(x) <= |x| - b}."""
        M = sample_machine()
        rb = machines.rb_set(M, 1, 4)
        self.assertEqual(rb, ClopenSet(['00', '0110']))
        self.assertEqual(rb.measure(), Dyadic(5, 4))
        self.assertEqual(machines.rb_set(M, 1, 4, staged_with=orders.identity()), rb)
        self.assertEqual(machines.rb_set(M, 2, 4), ClopenSet(['0110']))
        self.assertEqual(machines.rb_set(M, 1, 3), ClopenSet(['00']))
        with self.assertRaises(PreconditionViolated) as ctx:
            machines.rb_set(M, 1, 4, staged_with=orders.constant(0))
        self.assertEqual(ctx.exception.index, 1)

    def test_rb_measure_bound(self):
        """mu(R_b) <= 2^-b on random Kraft-Chaitin machines."""
        rng = generators.make_rng(17)
        for index in range(20):
            M, g = generators.random_machine(rng)
            for b in range(1, 4):
                with self.subTest(index=index, b=b):
                    self.assertLessEqual(machines.rb_set(M, b, 12, staged_with=g).measure(), Dyadic(1, b))

    def test_kolmogorov_margin(self):
        """max n - K(xi|n) along a sequence."""
        M = sample_machine()
        self.assertEqual(machines.kolmogorov_margin(M, sequences.periodic('0110'), 8), 2)
        self.assertEqual(machines.kolmogorov_margin(M, sequences.constant('0'), 8), 1)
        self.assertIs(machines.kolmogorov_margin(machines.MachineTable(), sequences.constant('0'), 8), NEG_INFINITY)

    def test_malformed_tables(self):
        """Domains must be prefix-free, codewords distinct and halt times positive."""
        with self.assertRaises(MalformedInput):
            machines.MachineTable([('0', '', 1), ('01', '', 2)])
        with self.assertRaises(MalformedInput):
            machines.MachineTable([('0', '', 1), ('0', '1', 2)])
        with self.assertRaises(MalformedInput):
            machines.MachineTable([('0', '', 0)])


class KraftChaitinTestCase(unittest.TestCase):
    """Codeword assignment for bounded request sets."""

    def test_kc_examples(self):
        """Lengths 1, 2, 3 in two orders; weight 3/2 is refused."""
        result = kraft_chaitin.kc_assign(kraft_chaitin.RequestSet.from_lengths([1, 2, 3]))
        self.assertEqual(result.codewords, ['0', '10', '110'])
        self.assertEqual(result.omega, Dyadic(7, 3))
        result = kraft_chaitin.kc_assign(kraft_chaitin.RequestSet.from_lengths([2, 1, 3]))
        self.assertEqual(result.codewords, ['00', '1', '010'])
        self.assertEqual(result.weight, Dyadic(7, 3))
        self.assertEqual([e.t for e in result.emitted], [1, 2, 3])
        with self.assertRaises(WeightExceeded):
            kraft_chaitin.kc_assign(kraft_chaitin.RequestSet.from_lengths([1, 1, 1]))

    def test_kc_random(self):
        """Requested lengths are met, Omega equals the weight and replay agrees."""
        rng = generators.make_rng(23)
        for index in range(50):
            L = generators.random_request_set(rng)
            result = kraft_chaitin.kc_assign(L)
            with self.subTest(index=index):
                self.assertEqual([len(w) for w in result.codewords], [q.length for q in L])
                self.assertEqual(result.omega, L.weight)
                self.assertEqual(kraft_chaitin.replay_mismatches(L, result), [])

    def test_requests(self):
        """(m, x) pairs ask for length |x| - m + 1 and sort in the well-order."""
        L = kraft_chaitin.RequestSet.from_pairs([(1, '00'), (0, '0'), (0, '00')])
        self.assertEqual([q.pair for q in L], [(0, '0'), (0, '00'), (1, '00')])
        self.assertEqual([q.length for q in L], [2, 3, 2])
        with self.assertRaises(PreconditionViolated):
            kraft_chaitin.Request.from_pair(3, '01')
        with self.assertRaises(PreconditionViolated):
            kraft_chaitin.Request(0)


class TestMachineTestCase(unittest.TestCase):
    """Machines built from staged tests."""

    def test_stratum(self):
        """stratum(r) keeps m <= r and |x| <= 2r among elements present by f(3r+1)."""
        X = sample_family()
        self.assertEqual(kraft_chaitin.stratum(X, 0), [])
        self.assertEqual(kraft_chaitin.stratum(X, 1), [(0, '0'), (1, '00')])
        self.assertEqual(kraft_chaitin.stratum(X, 2), [(0, '0'), (1, '00')])

    def test_build_machine(self):
        """Codewords 00 and 01, both halting at clock(1) = 4."""
        X = sample_family()
        result = kraft_chaitin.build_machine_from_test(X)
        self.assertEqual(result.codewords, ['00', '01'])
        self.assertEqual([e.out for e in result.emitted], ['0', '00'])
        self.assertEqual([e.t for e in result.emitted], [4, 4])
        self.assertEqual(result.omega, Dyadic(1, 1))
        self.assertEqual(kraft_chaitin.replay_decode(X, '01'), '00')
        self.assertIsNone(kraft_chaitin.replay_decode(X, '1'))
        self.assertEqual(kraft_chaitin.replay_mismatches(X, result), [])

    def test_staged_control_order(self):
        """Every codeword has halted by h(r); the residuals vanish."""
        X = sample_family()
        result = kraft_chaitin.build_machine_from_test(X)
        h = kraft_chaitin.staged_control_order(X, result.clock)
        self.assertEqual(h(0), 16)
        self.assertEqual(machines.control_residuals(result.emitted, h, 8), [ZERO] * 9)

    def test_random_families(self):
        """Random strict families yield machines with replayable codewords and controlled Omega."""
        rng = generators.make_rng(29)
        for index in range(10):
            X = generators.random_strict_family(rng, n_max=3)
            result = kraft_chaitin.build_machine_from_test(X)
            h = kraft_chaitin.staged_control_order(X, result.clock)
            with self.subTest(index=index):
                self.assertEqual(kraft_chaitin.replay_mismatches(X, result), [])
                machines.verify_measure_computable(result.emitted, h, 8)

    def test_measure_bound(self):
        """mu(X_m) > 2^-2m is refused."""
        X = ml_tests.StagedTestFamily(orders.identity(), {0: {'0': 1}, 1: {'1': 1}})
        with self.assertRaises(MeasureBoundViolated) as ctx:
            kraft_chaitin.build_machine_from_test(X)
        self.assertEqual(ctx.exception.index, 1)

    def test_prefix_free_stages(self):
        """A generator entering late is replaced by its extensions at the stage length."""
        X = ml_tests.StagedTestFamily(orders.identity(), {0: {'0': 1}})
        self.assertEqual(kraft_chaitin.prefix_free_stages(X, 0, 3).entries, {'0': 1})
        X = ml_tests.StagedTestFamily(orders.identity(), {0: {'0': 2}})
        report = kraft_chaitin.prefix_free_stages(X, 0, 3)
        self.assertEqual(report.entries, {'00': 2, '01': 2})
        self.assertEqual(report.generators, ClopenSet(['00', '01']))
        self.assertEqual((report.inclusion_failures, report.slice_mismatches), ([], []))


def drawn_family(seed, n_max, through):
    """A random strict family, optionally forced through a random sequence."""
    rng = generators.make_rng(seed)
    prefix = generators.random_source(rng, 2 * n_max + 1).prefix(2 * n_max + 1) if through else None
    return generators.random_strict_family(rng, n_max=n_max, through=prefix)


families = st.tuples(st.integers(0, 2 ** 32 - 1), st.integers(0, 3), st.booleans())


class StratificationTestCase(unittest.TestCase):
    """Strata of random strict families."""

    @settings(max_examples=30, deadline=None)
    @given(families)
    def test_strata_are_initial_segments(self, drawn):
        """stratum(r) is an initial segment of the well-ordered requests, grows with r, and holds every r_{m,x} <= r."""
        X = drawn_family(*drawn)
        self.assertTrue(ml_tests.verify_family(X, strict=True).ok)
        requests = sorted(X.requests(), key=sqsubseteq_key)
        top = max(len(x) - m + 1 for m, x in requests)
        previous = []
        for r in range(top + 2):
            current = kraft_chaitin.stratum(X, r)
            self.assertEqual(current, requests[:len(current)])
            self.assertEqual(current[:len(previous)], previous)
            self.assertTrue(all((m, x) in current for m, x in requests if len(x) - m + 1 <= r))
            previous = current
        self.assertEqual(kraft_chaitin.stratum(X, top), requests)

    @settings(max_examples=30, deadline=None)
    @given(families)
    def test_request_bounds(self, drawn):
        """2m <= |x| <= 2 r_{m,x}, and x is present by f(3 r_{m,x} + 1)."""
        X = drawn_family(*drawn)
        for m, x in X.requests():
            r = len(x) - m + 1
            self.assertLessEqual(2 * m, len(x))
            self.assertLessEqual(len(x), 2 * r)
            self.assertLessEqual(m, r)
            self.assertLessEqual(X.stage_of(m, x), X.f(3 * r + 1))
            self.assertLessEqual(kraft_chaitin.first_stratum(X, m, x), r)

    @settings(max_examples=20, deadline=None)
    @given(families)
    def test_replay_agrees(self, drawn):
        """Replaying stratum(|w|) decodes every codeword the full assignment gave out."""
        X = drawn_family(*drawn)
        result = kraft_chaitin.build_machine_from_test(X)
        self.assertEqual(kraft_chaitin.replay_mismatches(X, result), [])
        for step in result.steps:
            self.assertEqual(kraft_chaitin.replay_decode(X, step.codeword), step.request.payload)
        L = kraft_chaitin.RequestSet.from_pairs(X.requests())
        self.assertEqual(kraft_chaitin.kc_assign(L).codewords, result.codewords)
        self.assertEqual(kraft_chaitin.replay_mismatches(L, result), [])


if __name__ == '__main__':
    unittest.main()
