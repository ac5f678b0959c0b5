from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import ConvergenceRunViewSet

router = DefaultRouter()
router.register(r"convergence-runs", ConvergenceRunViewSet, basename="convergence-run")

urlpatterns = [
    path("", include(router.urls)),
]
