from django.urls import path

from .views import analysis_report, crosswalk_entries

urlpatterns = [
    path("report/", analysis_report, name="analysis-report"),
    path("crosswalk/", crosswalk_entries, name="crosswalk-entries"),
]
