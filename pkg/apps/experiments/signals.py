import logging

from django.db.models.signals import post_save
from django.dispatch import receiver

from .models import ConvergenceRun

logger = logging.getLogger(__name__)


@receiver(post_save, sender=ConvergenceRun)
def log_convergence_run(sender, instance, created, **kwargs):
    """Log every stored convergence run"""
    if created:
        logger.info(
            f"Stored convergence run {instance.pk} for {instance.family} "
            f"(gamma_s={instance.gamma_s:.4g}, tol={instance.solver_tol:g})"
        )
