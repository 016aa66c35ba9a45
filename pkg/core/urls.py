"""
URL Configuration for Core App.
"""

from django.urls import path, include
from rest_framework.routers import DefaultRouter

from .views import ExpressionParseView, ScriptRunViewSet

router = DefaultRouter()
router.register(r'runs', ScriptRunViewSet, basename='runs')

urlpatterns = [
    path('parse/', ExpressionParseView.as_view(), name='parse'),
    path('', include(router.urls)),
]
