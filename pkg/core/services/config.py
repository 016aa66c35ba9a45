"""
Tunable limits of the toolkit, read from Django settings when available.
"""

from dataclasses import dataclass, replace
from typing import Tuple


@dataclass(frozen=True)
class LabConfig:
    seed: int = 7
    blowup_budget: int = 64
    degree_bound: int = 12
    kd_degree_bound: int = 6
    random_arcs: int = 20
    scale_exponents: Tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    alpha_denominator: int = 64
    exponent_budget: int = 16

    @classmethod
    def from_settings(cls) -> 'LabConfig':
        """Build a config from ``settings.REGULOUS_LAB``; missing keys keep defaults."""
        from django.conf import settings

        values = dict(getattr(settings, 'REGULOUS_LAB', {}) or {})
        known = {name: values[name] for name in cls.__dataclass_fields__ if name in values}
        if 'scale_exponents' in known:
            known['scale_exponents'] = tuple(int(e) for e in known['scale_exponents'])
        return cls(**known)

    def with_overrides(self, **overrides) -> 'LabConfig':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_CONFIG = LabConfig()
