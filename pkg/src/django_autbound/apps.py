"""Add an autbound command."""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class AutBoundConfig(AppConfig):
    """Automorphism bounds Django app config."""

    name = "django_autbound"
    verbose_name = _("Automorphism Bounds")
