"""
Script Runner Service.

Executes the commands of a parsed script in order against one evolving
tower and turns each outcome into a CommandRecord. Failures raised by the
services become records with status "error"; a failed certificate is a
"fail", an undecided oracle an "inconclusive".
"""

import logging
from typing import Callable, Dict, List, Optional

from .arc_oracle import default_scales, fuzz
from .blowup_tower import Tower, auto_resolve, resolution_defects
from .config import DEFAULT_CONFIG, LabConfig
from .decomposition import decompose
from .divisorial import kd_lower_bound, ord_or_infinity, r_multiplicity, rees_valuations, v_value
from .errors import DecompositionError, RegulousError, ScriptError
from .exact_algebra import RatFn
from .extension import extend
from .flatness import (
    CERTIFIED_NO,
    CERTIFIED_YES,
    check_relative_flatness,
    check_rk_flat_representation,
    k_regulous_test,
    lipschitz_test,
)
from .parsing import Command, Script, parse_script
from .reports import (
    STATUS_ERROR,
    STATUS_FAIL,
    STATUS_INCONCLUSIVE,
    STATUS_PASS,
    CommandRecord,
    emit_report,
    exit_code,
)
from .sos import check_power_flatness, check_sos, synth_sos_snc, theorem_b

logger = logging.getLogger(__name__)

VERDICT_STATUS = {
    CERTIFIED_YES: STATUS_PASS,
    CERTIFIED_NO: STATUS_FAIL,
}


def _status(passed: bool) -> str:
    return STATUS_PASS if passed else STATUS_FAIL


class ScriptRunner:
    """Runs one script; blowup and resolve commands replace the current tower."""

    def __init__(self, script: Script, config: LabConfig = DEFAULT_CONFIG):
        self.script = script
        self.config = config
        self.tower: Optional[Tower] = None
        self.handlers: Dict[str, Callable[[Command], CommandRecord]] = {
            'blowup': self.blowup,
            'resolve': self.resolve,
            'ord': self.ord,
            'kd': self.kd,
            'rvals': self.rvals,
            'flatcheck': self.flatcheck,
            'decompose': self.decompose,
            'extend': self.extend,
            'sos-check': self.sos_check,
            'thmB': self.theorem_b,
            'fuzz': self.fuzz,
        }

    # -- helpers ---------------------------------------------------------------

    def target(self, command: Command, index: int = 0) -> RatFn:
        return self.script.definitions[command.targets[index]]

    def base_tower(self) -> Tower:
        if self.tower is None:
            if len(self.script.variables) != 2:
                raise ScriptError("Towers need exactly two declared variables", 1, 1)
            self.tower = Tower.base(self.script.variables)
        return self.tower

    def tower_for(self, poly) -> Tower:
        """The current tower when it resolves poly, else a fresh resolution."""
        if poly.is_constant():
            return self.tower or Tower.base(poly.vars)
        if self.tower is not None and not resolution_defects(self.tower, poly):
            return self.tower
        return auto_resolve(poly.squarefree_part(), budget=self.config.blowup_budget).tower

    def record(self, command: Command, status: str, message: Optional[str] = None, **values) -> CommandRecord:
        return CommandRecord(command.verb, status, command.line, values, message)

    # -- verbs -----------------------------------------------------------------

    def blowup(self, command: Command) -> CommandRecord:
        tower = self.base_tower().blowup(command.param('chart', 0), command.param('at'))
        self.tower = tower
        divisor = tower.divisors[-1]
        return self.record(command, STATUS_PASS, divisor=divisor.id, charts=list(divisor.charts),
                           incident=list(divisor.incident), base_point=list(divisor.base_point))

    def resolve(self, command: Command) -> CommandRecord:
        f = self.target(command)
        poly = f.den if not f.is_polynomial() else f.num
        resolution = auto_resolve(poly.squarefree_part(), budget=self.config.blowup_budget)
        self.tower = resolution.tower
        return self.record(
            command, STATUS_PASS,
            steps=self.tower.steps,
            centers=[{'chart': c, 'point': list(p)} for c, p in self.tower.centers()],
            blown=[{'chart': r.chart_id, 'point': list(r.point), 'defect': r.defect}
                   for r in resolution.reports if r.defect],
            dual_graph=sorted(sorted(edge) for edge in self.tower.dual_graph()),
        )

    def ord(self, command: Command) -> CommandRecord:
        f = self.target(command)
        tower = self.tower or self.tower_for(f.num * f.den)
        chosen = command.param('divisor')
        divisors = [tower.divisor(chosen)] if chosen is not None else tower.divisors
        rows = [{'divisor': d.id, 'value': ord_or_infinity(tower, d.id, f)} for d in divisors]
        return self.record(command, STATUS_PASS, orders=rows)

    def kd(self, command: Command) -> CommandRecord:
        tower = self.base_tower()
        degree = command.param('degree', self.config.kd_degree_bound)
        chosen = command.param('divisor')
        divisors = [tower.divisor(chosen)] if chosen is not None else tower.divisors
        rows = []
        optimal = True
        for d in divisors:
            kd = r_multiplicity(tower, d.id)
            bound = kd_lower_bound(tower, d.id, degree, self.config.seed)
            optimal = optimal and bound.value == kd
            rows.append({'divisor': d.id, 'k_d': kd, 'lower_bound': bound.value,
                         'witness': bound.witness, 'searched': bound.searched})
        status = STATUS_PASS if optimal else STATUS_INCONCLUSIVE
        return self.record(command, status, multiplicities=rows)

    def rvals(self, command: Command) -> CommandRecord:
        f = self.target(command)
        degree = command.param('degree', self.config.degree_bound)
        rvals = rees_valuations(f, self.tower_for(f.num * f.den), degree)
        values = {'rvals': rvals}
        name = command.param('g')
        if name is not None:
            values['v'] = v_value(rvals, self.script.definitions[name])
        return self.record(command, STATUS_PASS, **values)

    def flatcheck(self, command: Command) -> CommandRecord:
        f = self.target(command)
        k = command.param('k', 1)
        mode = command.param('mode', 'rep')
        if mode == 'rep':
            certificate = check_rk_flat_representation(f.num, f.den, k, self.tower_for(f.den))
        elif mode in ('strict', 'underline'):
            certificate = check_relative_flatness(f, k, self.tower_for(f.num * f.den), mode)
        elif mode in ('regulous', 'lipschitz'):
            verdict = k_regulous_test(f, k, self.config) if mode == 'regulous' else lipschitz_test(f, self.config)
            status = VERDICT_STATUS.get(verdict.verdict, STATUS_INCONCLUSIVE)
            return self.record(command, status, verdict.diagnostic if status != STATUS_PASS else None,
                               test=verdict)
        elif mode == 'power':
            power = check_power_flatness(f, k, self.tower_for(f.num * f.den), derivative_condition=True,
                                         config=self.config)
            return self.record(command, _status(power.underline_passed), power=power)
        else:
            raise ScriptError(f"Unknown flatcheck mode '{mode}'", command.line, command.column)
        message = None
        if not certificate.passed:
            message = 'failing rows: ' + '; '.join(row.describe() for row in certificate.failing_rows)
        return self.record(command, _status(certificate.passed), message, certificate=certificate)

    def decompose(self, command: Command) -> CommandRecord:
        f = self.target(command)
        k = command.param('k', 1)
        try:
            result = decompose(f, k, config=self.config)
        except DecompositionError as exc:
            return self.record(command, STATUS_FAIL, str(exc), ledger=exc.ledger)
        return self.record(command, _status(result.passed), decomposition=result)

    def extend(self, command: Command) -> CommandRecord:
        f = self.target(command)
        normal = command.param('normal')
        normal = (normal,) if isinstance(normal, str) else tuple(normal)
        result = extend(f.num, f.den, command.param('k', 0), normal, self.config)
        status = _status(result.passed)
        if status == STATUS_PASS and result.oracle_verdict not in ('to-zero', 'not-run'):
            status = STATUS_INCONCLUSIVE
        return self.record(command, status, extension=result)

    def sos_check(self, command: Command) -> CommandRecord:
        f = self.target(command)
        k = command.param('k', 1)
        names = command.param('squares')
        if names is None:
            synthesis = synth_sos_snc(f, config=self.config)
            if not synthesis.supported:
                return self.record(command, STATUS_INCONCLUSIVE, 'no square pattern', synthesis=synthesis)
            return self.record(command, _status(synthesis.certificate.passed), synthesis=synthesis)
        names = (names,) if isinstance(names, str) else names
        squares = [self.script.definitions[n] for n in names]
        certificate = check_sos(f, squares, k, mode=command.param('mode', 'underline'), config=self.config)
        return self.record(command, _status(certificate.passed), sos=certificate)

    def theorem_b(self, command: Command) -> CommandRecord:
        f = self.target(command)
        record = theorem_b(f.num, f.den, command.param('k', 0), command.param('l', 1),
                           command.param('m', 1), self.config)
        return self.record(command, _status(record.passed), theorem_b=record)

    def fuzz(self, command: Command) -> CommandRecord:
        f = self.target(command)
        report = fuzz(f, command.param('k', 0), command.param('at'), seed=self.config.seed,
                      random_arcs=self.config.random_arcs,
                      scales=default_scales(self.config.scale_exponents))
        return self.record(command, STATUS_FAIL if report.falsified else STATUS_PASS, fuzz=report)

    # -- driver ----------------------------------------------------------------

    def run_command(self, command: Command) -> CommandRecord:
        try:
            return self.handlers[command.verb](command)
        except RegulousError as exc:
            logger.warning("Command '%s' on line %d failed: %s", command.verb, command.line, exc)
            return self.record(command, STATUS_ERROR, str(exc))

    def run(self) -> List[CommandRecord]:
        records = []
        for command in self.script.commands:
            logger.info("Running '%s' (line %d)", command.verb, command.line)
            records.append(self.run_command(command))
        return records


def run_script(text: str, config: LabConfig = DEFAULT_CONFIG):
    """Parse and run a script; returns (records, report text, exit code)."""
    script = parse_script(text)
    records = ScriptRunner(script, config).run()
    report = emit_report(records, script.digest, config.seed)
    return records, report, exit_code([r.status for r in records])
