"""
DRF Serializers for regulous-lab.

The report serializers describe the versioned JSON report schema; the run
and parse serializers describe the API payloads.
"""

from rest_framework import serializers

from .models import ScriptRun
from .services.reports import SCHEMA_ID, STATUS_ERROR, STATUS_FAIL, STATUS_INCONCLUSIVE, STATUS_PASS


# =============================================================================
# Report schema
# =============================================================================

class CommandRecordSerializer(serializers.Serializer):
    """One command outcome of a report."""

    verb = serializers.CharField()
    status = serializers.ChoiceField(choices=[STATUS_PASS, STATUS_FAIL, STATUS_INCONCLUSIVE, STATUS_ERROR])
    line = serializers.IntegerField(min_value=0)
    values = serializers.DictField()
    message = serializers.CharField(required=False)


class ReportSerializer(serializers.Serializer):
    """Report envelope: schema id, tool version, input digest, seed and commands."""

    schema = serializers.CharField()
    tool_version = serializers.CharField()
    input_digest = serializers.CharField(allow_blank=True)
    seed = serializers.IntegerField()
    commands = CommandRecordSerializer(many=True)

    def validate_schema(self, value):
        if value != SCHEMA_ID:
            raise serializers.ValidationError(f"Unknown report schema '{value}'")
        return value


# =============================================================================
# Runs
# =============================================================================

class ScriptRunSerializer(serializers.ModelSerializer):
    """Serializer for stored script runs."""

    command_count = serializers.IntegerField(read_only=True)

    class Meta:
        model = ScriptRun
        fields = ['id', 'script', 'digest', 'seed', 'status', 'exit_code', 'command_count', 'report', 'created_at']
        read_only_fields = ['id', 'digest', 'status', 'exit_code', 'command_count', 'report', 'created_at']


class ScriptRunRequestSerializer(serializers.Serializer):
    """Serializer for a run request."""

    script = serializers.CharField(trim_whitespace=False)
    seed = serializers.IntegerField(required=False)


# =============================================================================
# Expressions
# =============================================================================

class ExpressionRequestSerializer(serializers.Serializer):
    """Serializer for an expression parse request."""

    expression = serializers.CharField(max_length=4000)
    vars = serializers.ListField(
        child=serializers.RegexField(r'^[A-Za-z_][A-Za-z0-9_]*$'),
        required=False,
        allow_empty=False,
    )
