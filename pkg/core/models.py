"""
Core models for regulous-lab.
"""

from django.db import models


class ScriptRun(models.Model):
    """One execution of a script with its JSON report."""

    class Status(models.TextChoices):
        PASS = 'pass', 'Pass'
        FAIL = 'fail', 'Fail'
        INCONCLUSIVE = 'inconclusive', 'Inconclusive'
        ERROR = 'error', 'Error'

    script = models.TextField()
    digest = models.CharField(max_length=64, db_index=True, help_text='sha256 of the script text')
    seed = models.IntegerField(default=7)
    status = models.CharField(max_length=20, choices=Status.choices)
    exit_code = models.PositiveSmallIntegerField(default=0)
    report = models.JSONField(default=dict)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'script run'
        verbose_name_plural = 'script runs'
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f"Run {self.digest[:12]} ({self.status})"

    @property
    def command_count(self) -> int:
        return len((self.report or {}).get('commands', []))
