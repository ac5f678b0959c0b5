from django.db import models


class ConvergenceRun(models.Model):
    """A convergence experiment: one surface family refined over several n"""

    FLAT_TORUS = "flat_torus"
    GENUS2_SQUARES = "genus2_squares"
    GENUS2_PARALLELOGRAMS = "genus2_parallelograms"

    FAMILY_CHOICES = [
        (FLAT_TORUS, "Flat torus"),
        (GENUS2_SQUARES, "Genus two, three squares"),
        (GENUS2_PARALLELOGRAMS, "Genus two, three parallelograms"),
    ]

    family = models.CharField(max_length=32, choices=FAMILY_CHOICES)
    eta_re = models.FloatField(null=True, blank=True)
    eta_im = models.FloatField(null=True, blank=True)
    reference = models.JSONField(help_text="Reference period matrix as [re, im] pairs")
    gamma_s = models.FloatField()
    solver_tol = models.FloatField()
    created_at = models.DateTimeField(auto_now_add=True)

    def __str__(self):
        return f"{self.get_family_display()} run {self.pk}"

    class Meta:
        ordering = ["-created_at"]


class ConvergenceSample(models.Model):
    """Period matrix error of one refinement level"""

    run = models.ForeignKey(
        ConvergenceRun, on_delete=models.CASCADE, related_name="samples"
    )
    n = models.PositiveIntegerField()
    h = models.FloatField()
    error = models.FloatField()
    scaled_error = models.FloatField()
    pi_t = models.JSONField()
    elapsed_seconds = models.FloatField()

    def __str__(self):
        return f"n={self.n}: {self.error:.4g}"

    class Meta:
        ordering = ["run", "n"]
        unique_together = ["run", "n"]
