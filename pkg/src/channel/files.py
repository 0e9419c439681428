"""Self-describing instance files.

Gains are written in dB and the noise power in dBm; the ``units`` header
must read ``"dB"`` so a file holding linear values is never misread.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from src.channel.model import (
    LinkGains,
    NetworkInstance,
    PuParams,
    SuParams,
    db_to_linear,
    dbm_to_mw,
    linear_to_db,
    mw_to_dbm,
)
from src.validators.input_validators import ValidationError, validate_file_path

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class _Entry(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PuEntry(_Entry):
    id: int = Field(ge=0)
    direct_gain_db: float
    coop_time: float = Field(gt=0)
    position_tx: tuple[float, float] | None = None
    position_rx: tuple[float, float] | None = None


class SuEntry(_Entry):
    id: int = Field(ge=0)
    power_sensitivity: float = Field(gt=0)
    direct_gain_db: list[float]
    position_tx: tuple[float, float] | None = None
    position_rx: tuple[float, float] | None = None


class LinkEntry(_Entry):
    g1_db: float
    g2_db: float


class InstanceFile(_Entry):
    """On-disk representation of a NetworkInstance."""

    format: Literal["spectrum-market-instance"] = "spectrum-market-instance"
    version: int = FORMAT_VERSION
    units: Literal["dB"]
    label: str = ""
    log_base: Literal["natural", "base2"] = "natural"
    noise_dbm: float
    pus: list[PuEntry]
    sus: list[SuEntry]
    links: list[list[LinkEntry]]

    @classmethod
    def from_instance(cls, instance: NetworkInstance) -> "InstanceFile":
        return cls(
            units="dB",
            label=instance.label,
            log_base=instance.log_base,
            noise_dbm=mw_to_dbm(instance.noise_power),
            pus=[
                PuEntry(
                    id=pu.id,
                    direct_gain_db=linear_to_db(pu.direct_gain_sq),
                    coop_time=pu.coop_time,
                    position_tx=pu.position_tx,
                    position_rx=pu.position_rx,
                )
                for pu in instance.pus
            ],
            sus=[
                SuEntry(
                    id=su.id,
                    power_sensitivity=su.power_sensitivity,
                    direct_gain_db=[linear_to_db(g) for g in su.direct_gain_sq_per_pu],
                    position_tx=su.position_tx,
                    position_rx=su.position_rx,
                )
                for su in instance.sus
            ],
            links=[
                [LinkEntry(g1_db=linear_to_db(lk.g1_sq), g2_db=linear_to_db(lk.g2_sq)) for lk in row]
                for row in instance.links
            ],
        )

    def to_instance(self) -> NetworkInstance:
        return NetworkInstance(
            pus=tuple(
                PuParams(
                    id=pu.id,
                    direct_gain_sq=db_to_linear(pu.direct_gain_db),
                    coop_time=pu.coop_time,
                    position_tx=pu.position_tx,
                    position_rx=pu.position_rx,
                )
                for pu in self.pus
            ),
            sus=tuple(
                SuParams(
                    id=su.id,
                    power_sensitivity=su.power_sensitivity,
                    direct_gain_sq_per_pu=tuple(db_to_linear(g) for g in su.direct_gain_db),
                    position_tx=su.position_tx,
                    position_rx=su.position_rx,
                )
                for su in self.sus
            ),
            links=tuple(
                tuple(LinkGains(g1_sq=db_to_linear(lk.g1_db), g2_sq=db_to_linear(lk.g2_db)) for lk in row)
                for row in self.links
            ),
            noise_power=dbm_to_mw(self.noise_dbm),
            log_base=self.log_base,
            label=self.label,
        )


def instance_to_json(instance: NetworkInstance) -> str:
    return InstanceFile.from_instance(instance).model_dump_json(indent=2) + "\n"


def instance_from_json(text: str) -> NetworkInstance:
    """
    Parse an instance document.

    Raises:
        ValidationError: If the document is malformed or violates an invariant
    """
    try:
        document = InstanceFile.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ValidationError(f"Invalid JSON: {e}", "instance") from e
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ValidationError(first["msg"], location or "instance") from e

    return document.to_instance()


def write_instance(instance: NetworkInstance, path: Path | str) -> Path:
    """Write ``instance`` to ``path`` and return the path."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(instance_to_json(instance), encoding="utf-8")
    logger.debug(f"Wrote {instance.num_pus}x{instance.num_sus} instance to {out}")
    return out


def read_instance(path: Any) -> NetworkInstance:
    """
    Read an instance file.

    Args:
        path: Path to a ``.json`` instance file

    Returns:
        The validated NetworkInstance

    Raises:
        ValidationError: If the path or the content is invalid
    """
    file_path = validate_file_path(path, must_exist=True, allowed_extensions=(".json",), field="instance")
    instance = instance_from_json(file_path.read_text(encoding="utf-8"))
    logger.debug(f"Read {instance.num_pus}x{instance.num_sus} instance from {file_path}")
    return instance
