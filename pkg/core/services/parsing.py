"""
Input language: rational function expressions and tower scripts.

Grammar (LL(1), explicit ``*``):

    script    := (decl | letdef | command)*
    decl      := "vars" NAME+ ";"
    letdef    := "let" NAME "=" expr ";"
    command   := VERB NAME* param* ";"
    param     := NAME "=" value | "at" point
    value     := rational | point | "[" NAME ("," NAME)* "]" | NAME
    expr      := term (("+" | "-") term)*
    term      := factor (("*" | "/") factor)*
    factor    := ("-" | "+") factor | power
    power     := atom ("^" INT)?
    atom      := INT | NAME | "(" expr ")"

``#`` starts a comment running to the end of the line.
"""

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ParseError, ScriptError
from .exact_algebra import RatFn

TOKEN_RE = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<verb>sos-check\b)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),;=\[\]])
""", re.VERBOSE)

# verb -> (number of name targets, allowed params, required params)
VERBS: Dict[str, Tuple[int, frozenset, frozenset]] = {
    'blowup': (0, frozenset({'at', 'chart'}), frozenset({'at'})),
    'resolve': (1, frozenset(), frozenset()),
    'ord': (1, frozenset({'divisor'}), frozenset()),
    'kd': (0, frozenset({'divisor', 'degree'}), frozenset()),
    'rvals': (1, frozenset({'degree', 'g'}), frozenset()),
    'flatcheck': (1, frozenset({'k', 'mode'}), frozenset()),
    'decompose': (1, frozenset({'k'}), frozenset()),
    'extend': (1, frozenset({'k', 'normal'}), frozenset({'normal'})),
    'sos-check': (1, frozenset({'k', 'squares', 'mode'}), frozenset()),
    'thmB': (1, frozenset({'k', 'l', 'm'}), frozenset()),
    'fuzz': (1, frozenset({'k', 'at'}), frozenset()),
}

KEYWORDS = {'vars', 'let'} | set(VERBS)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


@dataclass
class Command:
    verb: str
    targets: Tuple[str, ...]
    params: Dict[str, object]
    line: int
    column: int

    def param(self, name: str, default=None):
        return self.params.get(name, default)


@dataclass
class Script:
    variables: Tuple[str, ...] = ()
    definitions: Dict[str, RatFn] = field(default_factory=dict)
    commands: List[Command] = field(default_factory=list)
    source: str = ''

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.source.encode('utf-8')).hexdigest()


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"Unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'newline':
            line, line_start = line + 1, match.end()
        elif kind not in ('space', 'comment'):
            tokens.append(Token(kind, match.group(), line, match.start() - line_start + 1))
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


class _Parser:
    """Recursive descent over a token list."""

    def __init__(self, tokens: List[Token], variables: Sequence[str],
                 definitions: Optional[Dict[str, RatFn]] = None):
        self.tokens = tokens
        self.pos = 0
        self.variables = tuple(variables)
        self.definitions = definitions if definitions is not None else {}

    # -- token helpers ---------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def check(self, text: str) -> bool:
        return self.current.kind in ('op', 'name', 'verb') and self.current.text == text

    def expect(self, text: str) -> Token:
        if not self.check(text):
            self.fail(f"Expected '{text}' but found {self.describe(self.current)}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            self.fail(f"Expected {what} but found {self.describe(self.current)}")
        return self.advance()

    @staticmethod
    def describe(token: Token) -> str:
        return 'end of input' if token.kind == 'eof' else f"'{token.text}'"

    def fail(self, message: str, token: Optional[Token] = None, error=ParseError):
        token = token or self.current
        raise error(message, token.line, token.column)

    # -- expressions -----------------------------------------------------------

    def expr(self) -> RatFn:
        value = self.term()
        while self.check('+') or self.check('-'):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == '+' else value - rhs
        return value

    def term(self) -> RatFn:
        value = self.factor()
        while self.check('*') or self.check('/'):
            op_token = self.advance()
            rhs = self.factor()
            if op_token.text == '*':
                value = value * rhs
            else:
                if rhs.is_zero():
                    self.fail("Division by the zero polynomial", op_token)
                value = value / rhs
        return value

    def factor(self) -> RatFn:
        if self.check('-'):
            self.advance()
            return -self.factor()
        if self.check('+'):
            self.advance()
            return self.factor()
        return self.power()

    def power(self) -> RatFn:
        base = self.atom()
        if self.check('^'):
            self.advance()
            exponent = int(self.expect_kind('int', 'an integer exponent').text)
            return base ** exponent
        return base

    def atom(self) -> RatFn:
        token = self.current
        if token.kind == 'int':
            self.advance()
            return RatFn.const(self.variables, int(token.text))
        if token.kind == 'name':
            self.advance()
            if token.text in self.variables:
                return RatFn.var(self.variables, token.text)
            if token.text in self.definitions:
                return self.definitions[token.text]
            self.fail(f"Unknown variable or name '{token.text}'", token)
        if self.check('('):
            self.advance()
            value = self.expr()
            self.expect(')')
            return value
        self.fail(f"Expected an expression but found {self.describe(token)}")

    # -- values ----------------------------------------------------------------

    def rational(self) -> Fraction:
        sign = 1
        if self.check('-'):
            self.advance()
            sign = -1
        numerator = int(self.expect_kind('int', 'a rational literal').text)
        denominator = 1
        if self.check('/'):
            self.advance()
            denominator = int(self.expect_kind('int', 'a denominator').text)
            if denominator == 0:
                self.fail("Zero denominator in rational literal")
        return sign * Fraction(numerator, denominator)

    def point(self) -> Tuple[Fraction, ...]:
        self.expect('(')
        coordinates = [self.rational()]
        while self.check(','):
            self.advance()
            coordinates.append(self.rational())
        self.expect(')')
        return tuple(coordinates)

    def value(self):
        if self.check('('):
            return self.point()
        if self.check('['):
            self.advance()
            names = [self.expect_kind('name', 'a name').text]
            while self.check(','):
                self.advance()
                names.append(self.expect_kind('name', 'a name').text)
            self.expect(']')
            return tuple(names)
        if self.current.kind == 'name':
            return self.advance().text
        value = self.rational()
        return value.numerator if value.denominator == 1 else value

    # -- scripts ---------------------------------------------------------------

    def script(self, source: str) -> Script:
        script = Script(source=source)
        self.definitions = script.definitions
        while self.current.kind != 'eof':
            if self.check('vars'):
                self.declaration(script)
            elif self.check('let'):
                self.definition(script)
            else:
                self.command(script)
        return script

    def declaration(self, script: Script):
        start = self.advance()
        names = []
        while self.current.kind == 'name' and not self.check(';'):
            names.append(self.advance().text)
        self.expect(';')
        if not names:
            self.fail("Declaration without variables", start, ScriptError)
        if len(set(names)) != len(names):
            self.fail("Duplicate variable in declaration", start, ScriptError)
        if script.variables:
            self.fail("Variables declared twice", start, ScriptError)
        script.variables = self.variables = tuple(names)

    def definition(self, script: Script):
        self.advance()
        name_token = self.expect_kind('name', 'a definition name')
        name = name_token.text
        if name in script.definitions or name in script.variables or name in KEYWORDS:
            self.fail(f"Name '{name}' is already in use", name_token, ScriptError)
        if not script.variables:
            self.fail("Definitions need a preceding 'vars' declaration", name_token, ScriptError)
        self.expect('=')
        script.definitions[name] = self.expr()
        self.expect(';')

    def command(self, script: Script):
        token = self.current
        if token.kind not in ('name', 'verb') or token.text not in VERBS:
            self.fail(f"Unknown command '{token.text}'", token, ScriptError)
        self.advance()
        arity, allowed, required = VERBS[token.text]
        targets = []
        while (self.current.kind == 'name' and self.current.text != 'at'
               and self.tokens[self.pos + 1].text != '='):
            name_token = self.advance()
            if name_token.text not in script.definitions:
                self.fail(f"Undefined name '{name_token.text}'", name_token, ScriptError)
            targets.append(name_token.text)
        if len(targets) != arity:
            self.fail(f"'{token.text}' expects {arity} name(s), got {len(targets)}", token, ScriptError)
        params: Dict[str, object] = {}
        while not self.check(';'):
            if self.current.kind == 'eof':
                self.fail("Missing ';' after command", token)
            key_token = self.expect_kind('name', 'a parameter')
            key = key_token.text
            if key == 'at':
                if self.check('='):
                    self.advance()
                params[key] = self.point()
            else:
                self.expect('=')
                params[key] = self.value()
            if key not in allowed:
                self.fail(f"Unknown parameter '{key}' for '{token.text}'", key_token, ScriptError)
        self.expect(';')
        missing = required - set(params)
        if missing:
            self.fail(f"'{token.text}' is missing {', '.join(sorted(missing))}", token, ScriptError)
        for key in ('g',):
            if key in params and params[key] not in script.definitions:
                self.fail(f"Undefined name '{params[key]}'", token, ScriptError)
        squares = params.get('squares', ())
        for name in (squares,) if isinstance(squares, str) else squares:
            if name not in script.definitions:
                self.fail(f"Undefined name '{name}'", token, ScriptError)
        script.commands.append(Command(token.text, tuple(targets), params, token.line, token.column))


def infer_variables(text: str) -> Tuple[str, ...]:
    names = sorted({t.text for t in tokenize(text) if t.kind == 'name'})
    return tuple(names) or ('x', 'y')


def parse_ratfn(text: str, variables: Optional[Sequence[str]] = None) -> RatFn:
    """Parse an expression; variables default to the sorted names it uses."""
    tokens = tokenize(text)
    parser = _Parser(tokens, variables or infer_variables(text))
    value = parser.expr()
    if parser.current.kind != 'eof':
        parser.fail(f"Unexpected {parser.describe(parser.current)} after expression")
    return value


def parse_script(text: str) -> Script:
    parser = _Parser(tokenize(text), ())
    return parser.script(text)
