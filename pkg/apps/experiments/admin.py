from django.contrib import admin

from .models import ConvergenceRun, ConvergenceSample


class ConvergenceSampleInline(admin.TabularInline):
    model = ConvergenceSample
    extra = 0
    readonly_fields = ("n", "h", "error", "scaled_error", "elapsed_seconds")
    exclude = ("pi_t",)


@admin.register(ConvergenceRun)
class ConvergenceRunAdmin(admin.ModelAdmin):
    list_display = ("id", "family", "gamma_s", "solver_tol", "created_at")
    list_filter = ("family", "created_at")
    inlines = [ConvergenceSampleInline]


@admin.register(ConvergenceSample)
class ConvergenceSampleAdmin(admin.ModelAdmin):
    list_display = ("run", "n", "h", "error", "scaled_error")
    list_filter = ("run__family",)
