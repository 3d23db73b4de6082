from django.apps import AppConfig


class FunctionalsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.functionals'
