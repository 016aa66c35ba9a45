"""
Django Admin Configuration for Core App.
"""

from django.contrib import admin

from .models import ScriptRun


@admin.register(ScriptRun)
class ScriptRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'digest', 'seed', 'status', 'exit_code', 'created_at']
    list_filter = ['status', 'created_at']
    search_fields = ['digest', 'script']
    readonly_fields = ['digest', 'report', 'created_at']
