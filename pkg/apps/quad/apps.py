from django.apps import AppConfig


class QuadConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.quad"
