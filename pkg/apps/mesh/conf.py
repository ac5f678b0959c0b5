from django.conf import settings

DEFAULTS = {
    "PERIODS_SOLVER_TOL": 1e-10,
    "PERIODS_IDENTITY_RTOL": 1e-8,
    "PERIODS_CONJUGATE_RTOL": 1e-8,
    "PERIODS_ZERO_THRESHOLD": 1e-9,
    "PERIODS_RANK_CUTOFF": 1e-8,
    "PERIODS_RANK_GAP": 1e3,
    "PERIODS_DENSE_EDGE_LIMIT": 2000,
    "PERIODS_CACHE_TIMEOUT": 3600,
}


def setting(name, override=None):
    """
    Return a numerical setting, preferring an explicit override, then the
    project settings, then the built-in default.
    """
    if override is not None:
        return override
    return getattr(settings, name, DEFAULTS[name])
