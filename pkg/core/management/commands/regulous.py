"""
regulous management command.

    python manage.py regulous run scripts/decompose.rs-script --json out.json
    python manage.py regulous ord "x^4+y^2" --divisor 1

Exit codes: 0 all pass, 1 any fail or error, 2 usage or input error,
3 inconclusive without failures.
"""

import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.services.config import LabConfig
from core.services.errors import RegulousError
from core.services.parsing import infer_variables, parse_ratfn
from core.services.reports import canonical
from core.services.script_runner import run_script

EXIT_USAGE = 2

ONE_SHOT = ('ord', 'kd', 'rvals', 'flatcheck', 'decompose', 'extend', 'sos-check', 'thmB', 'fuzz')


class Command(BaseCommand):
    help = 'Run regulous-lab scripts and one-shot computations'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)

        run = subparsers.add_parser('run', help='Run a script file')
        run.add_argument('script', help='Path to a script')
        self.add_common(run)

        parse = subparsers.add_parser('parse', help='Print the canonical form of an expression')
        parse.add_argument('expression')
        parse.add_argument('--vars', nargs='+')
        self.add_common(parse)

        for verb in ONE_SHOT:
            sub = subparsers.add_parser(verb, help=f"One-shot '{verb}'")
            sub.add_argument('expression')
            sub.add_argument('--vars', nargs='+')
            self.add_common(sub)
            if verb in ('flatcheck', 'decompose', 'extend', 'sos-check', 'thmB', 'fuzz'):
                sub.add_argument('--k', type=int)
            if verb in ('ord', 'kd'):
                sub.add_argument('--divisor', type=int)
            if verb in ('kd', 'rvals'):
                sub.add_argument('--degree', type=int)
            if verb in ('flatcheck', 'sos-check'):
                sub.add_argument('--mode')
            if verb == 'rvals':
                sub.add_argument('--g', help='Expression whose v-value is wanted')
            if verb == 'extend':
                sub.add_argument('--normal', nargs='+', required=True)
            if verb == 'sos-check':
                sub.add_argument('--squares', nargs='+')
            if verb == 'thmB':
                sub.add_argument('--l', type=int)
                sub.add_argument('--m', type=int)
            if verb == 'fuzz':
                sub.add_argument('--at', nargs='+', help='Center coordinates as rationals')

    def add_common(self, parser):
        parser.add_argument('--json', dest='json_path', help='Write the report to this path')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--degree-bound', type=int)
        parser.add_argument('--blowup-budget', type=int)

    def handle(self, *args, **options):
        config = LabConfig.from_settings().with_overrides(
            seed=options.get('seed'),
            degree_bound=options.get('degree_bound'),
            blowup_budget=options.get('blowup_budget'),
        )
        action = options['action']
        if action == 'parse':
            return self.handle_parse(options)
        if action == 'run':
            text = self.read_script(options['script'])
        else:
            text = self.one_shot_script(action, options)

        try:
            records, report, code = run_script(text, config)
        except RegulousError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)

        self.emit(report, options.get('json_path'))
        for record in records:
            line = f"{record.verb} (line {record.line}): {record.status}"
            if record.message:
                line += f" - {record.message}"
            self.stderr.write(line)
        if code:
            raise CommandError(f"{sum(r.status != 'pass' for r in records)} command(s) did not pass",
                               returncode=code)

    # -- helpers ---------------------------------------------------------------

    def read_script(self, path: str) -> str:
        try:
            return Path(path).read_text(encoding='utf-8')
        except OSError as exc:
            raise CommandError(f"Cannot read {path}: {exc}", returncode=EXIT_USAGE)

    def emit(self, text: str, path=None):
        if not path:
            self.stdout.write(text, ending='')
            return
        try:
            Path(path).write_text(text, encoding='utf-8')
        except OSError as exc:
            raise CommandError(f"Cannot write {path}: {exc}", returncode=EXIT_USAGE)

    def handle_parse(self, options):
        try:
            f = parse_ratfn(options['expression'], options.get('vars'))
        except RegulousError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        record = {'canonical': f, 'numerator': f.num, 'denominator': f.den, 'vars': list(f.vars)}
        self.emit(json.dumps(canonical(record), sort_keys=True, indent=2) + '\n', options.get('json_path'))

    def one_shot_script(self, verb: str, options) -> str:
        """A script defining f (and helpers) and running the verb once."""
        expressions = [options['expression']] + list(options.get('squares') or [])
        if options.get('g'):
            expressions.append(options['g'])
        normal = list(options.get('normal') or [])
        variables = options.get('vars')
        if not variables:
            names = set()
            for text in expressions:
                names.update(infer_variables(text))
            variables = sorted(n for n in names if n not in normal)
            for fallback in ('x', 'y'):
                if verb != 'extend' and len(variables) < 2 and fallback not in variables:
                    variables.append(fallback)
        lines = [f"vars {' '.join(variables)};", f"let f = {options['expression']};"]
        params = []
        for index, square in enumerate(options.get('squares') or []):
            lines.append(f"let s{index} = {square};")
        if options.get('squares'):
            params.append(f"squares=[{', '.join(f's{i}' for i in range(len(options['squares'])))}]")
        if options.get('g'):
            lines.append(f"let g = {options['g']};")
            params.append('g=g')
        for key in ('k', 'l', 'm', 'divisor', 'degree', 'mode'):
            if options.get(key) is not None:
                params.append(f"{key}={options[key]}")
        if normal:
            params.append(f"normal=[{', '.join(normal)}]")
        if options.get('at'):
            params.append(f"at=({', '.join(options['at'])})")
        if verb == 'kd':
            lines.append('resolve f;')
            lines.append(' '.join(['kd'] + params) + ';')
        else:
            lines.append(' '.join([verb, 'f'] + params) + ';')
        return '\n'.join(lines) + '\n'
