"""
API Views for regulous-lab.
"""

import json
import logging

from rest_framework import mixins, status, viewsets
from rest_framework.response import Response
from rest_framework.views import APIView

from .models import ScriptRun
from .serializers import (
    ExpressionRequestSerializer,
    ReportSerializer,
    ScriptRunRequestSerializer,
    ScriptRunSerializer,
)
from .services.config import LabConfig
from .services.errors import ParseError, RegulousError
from .services.parsing import parse_ratfn
from .services.reports import overall_status
from .services.script_runner import run_script

logger = logging.getLogger(__name__)


def error_response(exc: RegulousError) -> Response:
    body = {'detail': str(exc), 'error': type(exc).__name__}
    if isinstance(exc, ParseError):
        body.update(line=exc.line, column=exc.column)
    return Response(body, status=status.HTTP_400_BAD_REQUEST)


# =============================================================================
# Script Runs
# =============================================================================

class ScriptRunViewSet(mixins.CreateModelMixin,
                       mixins.ListModelMixin,
                       mixins.RetrieveModelMixin,
                       viewsets.GenericViewSet):
    """
    POST /api/runs/ runs a script and stores the report.
    GET /api/runs/ and /api/runs/{id}/ read runs back.
    """
    queryset = ScriptRun.objects.all()

    def get_serializer_class(self):
        if self.action == 'create':
            return ScriptRunRequestSerializer
        return ScriptRunSerializer

    def create(self, request, *args, **kwargs):
        serializer = self.get_serializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        data = serializer.validated_data
        config = LabConfig.from_settings().with_overrides(seed=data.get('seed'))
        try:
            records, report_text, code = run_script(data['script'], config)
        except RegulousError as exc:
            return error_response(exc)

        report = json.loads(report_text)
        ReportSerializer(data=report).is_valid(raise_exception=True)
        run = ScriptRun.objects.create(
            script=data['script'],
            digest=report['input_digest'],
            seed=config.seed,
            status=overall_status([r.status for r in records]),
            exit_code=code,
            report=report,
        )
        logger.info("Stored run %s with status %s", run.id, run.status)
        return Response(ScriptRunSerializer(run).data, status=status.HTTP_201_CREATED)


# =============================================================================
# Expressions
# =============================================================================

class ExpressionParseView(APIView):
    """
    POST /api/parse/
    Parse an expression into its canonical reduced form.
    """

    def post(self, request):
        serializer = ExpressionRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        data = serializer.validated_data
        try:
            f = parse_ratfn(data['expression'], data.get('vars'))
        except RegulousError as exc:
            return error_response(exc)

        return Response({
            'canonical': f.to_text(),
            'numerator': f.num.to_text(),
            'denominator': f.den.to_text(),
            'vars': list(f.vars),
        })
