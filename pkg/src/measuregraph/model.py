"""ModelSpec: counting law, label law, edge transformation and weight function."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .distributions import (
    CountingDistribution,
    LabelDistribution,
    counting_from_dict,
    label_from_dict,
    parse_counting,
    parse_label,
)
from .edge_transforms import (
    IDENTITY,
    Digraphon,
    Transform,
    WeightFunction,
    parse_transform,
    transform_from_dict,
)
from .errors import ValidationError


@dataclass(frozen=True)
class ModelSpec:
    kappa: CountingDistribution
    nu: LabelDistribution
    transform: Transform
    weight: WeightFunction = IDENTITY
    validate: bool = True

    def __post_init__(self):
        kernel_dim = getattr(self.transform.kernel, "dim", None)
        if kernel_dim != self.nu.dim:
            raise ValidationError(
                f"kernel expects labels of dimension {kernel_dim}, label law has {self.nu.dim}"
            )
        if self.validate:
            self.transform.validate(self.nu)

    @property
    def directed(self) -> bool:
        return not self.transform.symmetric

    @property
    def self_edges(self) -> bool:
        if isinstance(self.transform, Digraphon):
            return True
        return not self.transform.zero_diagonal

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa.to_dict(),
            "nu": self.nu.to_dict(),
            "transform": self.transform.to_dict(),
            "weight": self.weight.to_dict(),
        }

    def spec_hash(self) -> str:
        try:
            payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        except ValidationError:
            payload = repr(self)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "ModelSpec":
        fields = {"kappa": self.kappa, "nu": self.nu, "transform": self.transform, "weight": self.weight}
        fields.update(changes)
        return ModelSpec(**fields, validate=self.validate)


SPEC_SCHEMA = {
    "type": "object",
    "required": ["kappa", "nu", "transform"],
    "properties": {
        "kappa": {"type": "object", "required": ["kind"]},
        "nu": {"type": "object", "required": ["kind"]},
        "transform": {"type": "object", "required": ["kind"]},
        "weight": {"type": "object", "required": ["kind"]},
    },
    "additionalProperties": False,
}


def spec_from_dict(d: dict) -> ModelSpec:
    import jsonschema

    try:
        jsonschema.validate(d, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"spec schema violation at {path}: {exc.message}") from None
    weight = WeightFunction(**d["weight"]) if "weight" in d else IDENTITY
    return ModelSpec(
        counting_from_dict(d["kappa"]),
        label_from_dict(d["nu"]),
        transform_from_dict(d["transform"]),
        weight,
    )


def spec_from_flags(kappa: str, nu: str, transform: str, self_edges: bool = False,
                    weight: str = "identity") -> ModelSpec:
    return ModelSpec(
        parse_counting(kappa),
        parse_label(nu),
        parse_transform(transform, zero_diagonal=not self_edges),
        WeightFunction(weight),
    )
