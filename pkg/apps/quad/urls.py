from django.urls import path

from .views import QuadrangulateView

urlpatterns = [
    path("quadrangulate/", QuadrangulateView.as_view(), name="quadrangulate"),
]
