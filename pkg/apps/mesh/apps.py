from django.apps import AppConfig


class MeshConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.mesh"
