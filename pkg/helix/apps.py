from django.apps import AppConfig


class HelixConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'helix'
    verbose_name = "Triple-Helix synergy analytics"
