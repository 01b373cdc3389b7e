from __future__ import annotations

import pytest

from lvseg import PhantomSpec, generate_phantom

_cache: dict[tuple, tuple] = {}


def phantom(seed: int = 0, sigma: float = 6.0, **kwargs):
    """Cached phantom generation; clips are immutable so sharing is safe."""
    key = (seed, sigma, tuple(sorted(kwargs.items())))
    if key not in _cache:
        spec = PhantomSpec(seed=seed, speckle_sigma=sigma, **kwargs)
        _cache[key] = generate_phantom(spec)
    return _cache[key]


@pytest.fixture(scope="session")
def default_phantom():
    return phantom(seed=0, sigma=6.0)
