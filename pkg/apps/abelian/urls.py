from django.urls import path

from .views import RiemannRochView

urlpatterns = [
    path("riemann-roch/", RiemannRochView.as_view(), name="riemann-roch"),
]
