"""
Tests for the expression and script language.
"""

from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings

from core.services.errors import ParseError, ScriptError
from core.services.parsing import infer_variables, parse_ratfn, parse_script, tokenize

from .strategies import VARS, rational_functions

SCRIPT = """\
# two commands
vars x y;
let f = x^7/(x^4+y^2);
let g = x^2;
resolve f;
rvals f g=g degree=4;
fuzz f k=1 at=(0, -1/2);
sos-check g squares=[g];
"""


class ExpressionTests(SimpleTestCase):

    def test_variables_inferred_in_sorted_order(self):
        self.assertEqual(infer_variables('y^2 + x'), ('x', 'y'))
        self.assertEqual(infer_variables('3'), ('x', 'y'))

    def test_rational_literal(self):
        f = parse_ratfn('x/2 + 1/3', VARS)
        self.assertEqual(f.as_mpoly().to_text(), '1/2*x+1/3')

    def test_unary_minus_binds_before_power(self):
        self.assertEqual(parse_ratfn('-x^2', VARS).to_text(), '-x^2')

    def test_explicit_multiplication_required(self):
        with self.assertRaises(ParseError):
            parse_ratfn('2x', VARS)

    def test_error_position(self):
        with self.assertRaises(ParseError) as ctx:
            parse_ratfn('x + * y', VARS)
        self.assertEqual((ctx.exception.line, ctx.exception.column), (1, 5))

    def test_division_by_zero_polynomial(self):
        with self.assertRaises(ParseError):
            parse_ratfn('x/(y-y)', VARS)

    def test_unknown_name(self):
        with self.assertRaises(ParseError):
            parse_ratfn('x + w', VARS)

    def test_comment_and_newline_tracking(self):
        tokens = tokenize('# note\nx + y')
        self.assertEqual([(t.text, t.line, t.column) for t in tokens[:3]],
                         [('x', 2, 1), ('+', 2, 3), ('y', 2, 5)])

    @given(rational_functions())
    @settings(max_examples=40, deadline=None)
    def test_canonical_text_parses_back(self, f):
        self.assertEqual(parse_ratfn(f.to_text(), VARS), f)


class ScriptTests(SimpleTestCase):

    def test_script_structure(self):
        script = parse_script(SCRIPT)
        self.assertEqual(script.variables, ('x', 'y'))
        self.assertEqual(set(script.definitions), {'f', 'g'})
        self.assertEqual([c.verb for c in script.commands], ['resolve', 'rvals', 'fuzz', 'sos-check'])

    def test_parameters(self):
        commands = parse_script(SCRIPT).commands
        self.assertEqual(commands[1].params, {'g': 'g', 'degree': 4})
        self.assertEqual(commands[2].param('at'), (Fraction(0), Fraction(-1, 2)))
        self.assertEqual(commands[2].param('k'), 1)
        self.assertEqual(commands[3].param('squares'), ('g',))
        self.assertEqual(commands[3].line, 8)

    def test_digest_is_sha256_of_source(self):
        self.assertEqual(len(parse_script(SCRIPT).digest), 64)
        self.assertNotEqual(parse_script(SCRIPT).digest, parse_script(SCRIPT + '\n').digest)

    def test_unknown_command(self):
        with self.assertRaises(ScriptError) as ctx:
            parse_script('vars x y;\nfrobnicate;')
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 1))

    def test_missing_exponent(self):
        with self.assertRaises(ParseError) as ctx:
            parse_script('vars x y;\nlet f = x^;')
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 11))

    def test_definition_needs_declaration(self):
        with self.assertRaises(ScriptError):
            parse_script('let f = 1;')

    def test_arity(self):
        with self.assertRaises(ScriptError):
            parse_script('vars x y; let f = x; decompose;')

    def test_unknown_parameter(self):
        with self.assertRaises(ScriptError):
            parse_script('vars x y; let f = x; decompose f mode=rep;')

    def test_required_parameter(self):
        with self.assertRaises(ScriptError):
            parse_script('vars x y; let f = x; extend f k=0;')

    def test_undefined_square(self):
        with self.assertRaises(ScriptError):
            parse_script('vars x y; let f = x^2; sos-check f squares=h;')

    def test_missing_semicolon(self):
        with self.assertRaises(ParseError):
            parse_script('vars x y; let f = x; resolve f')
