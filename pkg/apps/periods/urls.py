from django.urls import path

from .views import PeriodMatrixView

urlpatterns = [
    path("periods/", PeriodMatrixView.as_view(), name="period-matrices"),
]
