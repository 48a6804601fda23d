"""Attack registry keyed by the names used in reports and on the command line."""

from __future__ import annotations

import logging
from collections.abc import Callable

from sfw_core.interfaces.gradient_model import GradientModel
from sfw_core.models.attack import AttackConfig, AttackResult
from sfw_core.models.loss import LossMode, LossSpec
from sfw_core.tensor import FloatArray

logger = logging.getLogger(__name__)

Attack = Callable[[GradientModel, FloatArray, LossSpec, AttackConfig], AttackResult]


def loss_spec_for(cfg: AttackConfig, true_label: int) -> LossSpec:
    """Loss specification for attacking an image whose label is ``true_label``."""
    if cfg.loss_mode is LossMode.TARGETED and cfg.target_label is not None:
        return LossSpec.targeted(cfg.target_label)
    return LossSpec.untargeted(true_label)


class AttackRegistry:
    """Registry of attack functions.

    Example:
        registry = AttackRegistry()
        registry.register("fw", fw_attack)
        result = registry.get("fw")(model, x, spec, cfg)
    """

    def __init__(self) -> None:
        """Initialize an empty registry."""
        self._attacks: dict[str, Attack] = {}

    def register(self, name: str, attack: Attack) -> None:
        """Register ``attack`` under ``name``.

        Raises:
            ValueError: If ``name`` is already taken.
        """
        if name in self._attacks:
            msg = f"Attack already registered: {name}"
            raise ValueError(msg)
        self._attacks[name] = attack
        logger.debug("Registered attack: %s -> %s", name, getattr(attack, "__name__", attack))

    def get(self, name: str) -> Attack:
        """Return the attack registered under ``name``.

        Raises:
            KeyError: If no attack has that name.
        """
        attack = self._attacks.get(name)
        if attack is None:
            msg = f"No attack registered for {name}. Available: {self.list_attacks()}"
            raise KeyError(msg)
        return attack

    def list_attacks(self) -> list[str]:
        """Sorted names of the registered attacks."""
        return sorted(self._attacks)

    def is_registered(self, name: str) -> bool:
        """Check whether ``name`` is registered."""
        return name in self._attacks


def _build_default_registry() -> AttackRegistry:
    from sfw_attacks.frank_wolfe import fw_attack
    from sfw_attacks.projected import fgsm, pgd, pgd_nucl

    registry = AttackRegistry()
    registry.register("fgsm", fgsm)
    registry.register("pgd", pgd)
    registry.register("pgd_nucl", pgd_nucl)
    registry.register("fw", fw_attack)
    return registry


#: Registry with the built-in attacks.
default_registry: AttackRegistry = _build_default_registry()
