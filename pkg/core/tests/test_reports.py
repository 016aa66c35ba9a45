"""
Tests for report emission and the report schema.
"""

import json
from fractions import Fraction

from django.test import SimpleTestCase

from core.serializers import ReportSerializer
from core.services.exact_algebra import INFINITY
from core.services.parsing import parse_ratfn
from core.services.reports import (
    SCHEMA_ID,
    CommandRecord,
    canonical,
    emit_report,
    exit_code,
    load_report,
    overall_status,
)
from core.services.script_runner import run_script


class CanonicalValueTests(SimpleTestCase):

    def test_exact_values(self):
        self.assertEqual(canonical(Fraction(3, 4)), '3/4')
        self.assertEqual(canonical(Fraction(4, 2)), '2')
        self.assertEqual(canonical(INFINITY), 'inf')
        self.assertEqual(canonical(parse_ratfn('x^3/(x^2+y^2)')), 'x^3/(x^2+y^2)')

    def test_sets_are_sorted(self):
        self.assertEqual(canonical({3, 1, 2}), [1, 2, 3])

    def test_unknown_type(self):
        with self.assertRaises(TypeError):
            canonical(object())


class ReportTests(SimpleTestCase):

    def test_empty_envelope(self):
        report = json.loads(emit_report([], 'abc', 7))
        self.assertEqual(report['schema'], SCHEMA_ID)
        self.assertEqual(report['commands'], [])
        self.assertEqual(report['input_digest'], 'abc')
        self.assertEqual(report['seed'], 7)

    def test_keys_sorted_and_stable(self):
        records = [CommandRecord('ord', 'pass', 3, {'value': Fraction(1, 2)})]
        first = emit_report(records, 'd', 1)
        self.assertEqual(first, emit_report(records, 'd', 1))
        keys = list(json.loads(first))
        self.assertEqual(keys, sorted(keys))

    def test_load_report(self):
        text = emit_report([CommandRecord('kd', 'inconclusive', 2, {'k_d': 2}, 'bound below k_d')], 'd', 5)
        report = load_report(text)
        self.assertEqual(report.statuses, ['inconclusive'])
        self.assertEqual(report.commands[0].message, 'bound below k_d')
        self.assertEqual(report.seed, 5)

    def test_load_rejects_other_schema(self):
        with self.assertRaises(ValueError):
            load_report(json.dumps({'schema': 'other', 'commands': []}))

    def test_exit_codes(self):
        self.assertEqual(exit_code([]), 0)
        self.assertEqual(exit_code(['pass', 'pass']), 0)
        self.assertEqual(exit_code(['pass', 'inconclusive']), 3)
        self.assertEqual(exit_code(['inconclusive', 'fail']), 1)
        self.assertEqual(exit_code(['fail', 'inconclusive']), 1)
        self.assertEqual(exit_code(['inconclusive', 'error', 'pass']), 1)
        self.assertEqual(exit_code(['error']), 1)

    def test_overall_status(self):
        self.assertEqual(overall_status([]), 'pass')
        self.assertEqual(overall_status(['pass', 'inconclusive']), 'inconclusive')
        self.assertEqual(overall_status(['fail', 'error', 'inconclusive']), 'error')

    def test_identical_runs_are_byte_identical(self):
        script = 'vars x y; let f = x^3/(x^2+y^2); resolve f; ord f; flatcheck f k=0;'
        _, first, code = run_script(script)
        _, second, _ = run_script(script)
        self.assertEqual(first, second)
        self.assertEqual(code, 0)

    def test_serializer_accepts_emitted_report(self):
        _, text, _ = run_script('vars x y; let f = x^2+y^2; resolve f; kd;')
        serializer = ReportSerializer(data=json.loads(text))
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_serializer_rejects_unknown_schema(self):
        serializer = ReportSerializer(data={
            'schema': 'other/v0', 'tool_version': '0', 'input_digest': '', 'seed': 0, 'commands': [],
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('schema', serializer.errors)
