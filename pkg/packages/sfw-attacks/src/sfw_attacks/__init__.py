"""Adversarial attacks over structured distortion balls."""

from __future__ import annotations

from sfw_attacks.frank_wolfe import fw_attack
from sfw_attacks.measure import build_result, clamp_box, quantized_nonzero, stacked_nuclear_norm
from sfw_attacks.projected import fgsm, pgd, pgd_nucl
from sfw_attacks.registry import Attack, AttackRegistry, default_registry, loss_spec_for
from sfw_attacks.seeding import derive_seed

__all__ = [
    "Attack",
    "AttackRegistry",
    "build_result",
    "clamp_box",
    "default_registry",
    "derive_seed",
    "fgsm",
    "fw_attack",
    "loss_spec_for",
    "pgd",
    "pgd_nucl",
    "quantized_nonzero",
    "stacked_nuclear_norm",
]
