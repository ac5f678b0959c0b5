from django.urls import path

from .views import ValidateMeshView

urlpatterns = [
    path("meshes/validate/", ValidateMeshView.as_view(), name="mesh-validate"),
]
