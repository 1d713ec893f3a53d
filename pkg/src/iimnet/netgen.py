"""Seeded synthetic network generator.

Randomness comes from ``random.Random(seed)`` (the stdlib Mersenne Twister),
whose sequences are stable across platforms and Python versions for the
methods used here, so a configuration is a complete recipe for its network.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    CaseClass,
    EntityId,
    IDR,
    InterdependentNetwork,
    Layer,
    Minterm,
    ValidationError,
)


class InfeasibleConfigError(ValidationError):
    """The requested shape cannot be produced, e.g. minterms larger than a layer."""


@dataclass(frozen=True)
class GenConfig:
    """Recipe for one synthetic network.

    Each entity independently receives a rule with probability
    ``idr_density``; rules draw a uniform number of minterms on
    ``[1, max_minterms]`` and each minterm a uniform size on
    ``[1, max_minterm_size]`` with members sampled without replacement from
    the opposite layer.  The case class clamps the two maxima (CASE_I forces
    both to 1, CASE_II one minterm, CASE_III unit minterms).
    """

    case: CaseClass
    n_a: int
    n_b: int
    idr_density: float = 1.0
    max_minterms: int = 3
    max_minterm_size: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_a < 1 or self.n_b < 1:
            raise ValidationError("layer sizes must be positive")
        if not 0.0 < self.idr_density <= 1.0:
            raise ValidationError(f"idr_density must be in (0, 1], got {self.idr_density}")
        if self.max_minterms < 1 or self.max_minterm_size < 1:
            raise ValidationError("minterm limits must be positive")

    def effective_limits(self) -> tuple[int, int]:
        """(max minterms, max minterm size) after the case class clamps them."""
        minterms, size = self.max_minterms, self.max_minterm_size
        if self.case in (CaseClass.CASE_I, CaseClass.CASE_II):
            minterms = 1
        if self.case in (CaseClass.CASE_I, CaseClass.CASE_III):
            size = 1
        return minterms, size


def generate(cfg: GenConfig) -> InterdependentNetwork:
    """Produce the network described by ``cfg``; same seed, same network."""
    max_minterms, max_size = cfg.effective_limits()
    if max_size > min(cfg.n_a, cfg.n_b):
        raise InfeasibleConfigError(
            f"max minterm size {max_size} exceeds the smaller layer "
            f"({min(cfg.n_a, cfg.n_b)} entities)"
        )
    rng = random.Random(cfg.seed)
    pools = {
        Layer.A: [EntityId(Layer.A, i) for i in range(1, cfg.n_a + 1)],
        Layer.B: [EntityId(Layer.B, j) for j in range(1, cfg.n_b + 1)],
    }
    rules: list[IDR] = []
    for target in pools[Layer.A] + pools[Layer.B]:
        if rng.random() >= cfg.idr_density:
            continue
        opposite = pools[target.layer.opposite]
        wanted = rng.randint(1, max_minterms)
        minterms: list[frozenset[EntityId]] = []
        attempts = 0
        while len(minterms) < wanted and attempts < wanted * 8:
            attempts += 1
            size = rng.randint(1, max_size)
            members = frozenset(rng.sample(opposite, size))
            if members not in minterms:
                minterms.append(members)
        rules.append(IDR(target, tuple(Minterm(m) for m in minterms)))
    return InterdependentNetwork.build(cfg.n_a, cfg.n_b, rules)
