from django.apps import AppConfig


class GenConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.gen"
