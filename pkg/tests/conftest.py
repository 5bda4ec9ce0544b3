from functools import lru_cache

from hypothesis import HealthCheck, settings

from heckelab.hecke import HeckeCtx

settings.register_profile(
    "heckelab", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("heckelab")


@lru_cache(maxsize=None)
def get_ctx(kind: str, n: int, aut=None) -> HeckeCtx:
    """Contexts are immutable apart from product caches, so tests share them."""
    return HeckeCtx.build(kind, n, aut)
