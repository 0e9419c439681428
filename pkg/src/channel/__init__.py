"""Channel model: network instances, gains and closed-form utilities."""

from src.channel.model import (
    NO_EXCHANGE,
    DerivedRates,
    LinkGains,
    NetworkInstance,
    PuParams,
    ResourceExchange,
    SuParams,
    db_to_linear,
    dbm_to_mw,
    derived_rates,
    direct_snr,
    gs_constant,
    linear_to_db,
    log_rate,
    mw_to_dbm,
    pu_utility,
    relay_snr,
    su_rate,
    su_type,
    su_utility,
)
from src.channel.files import (
    InstanceFile,
    instance_from_json,
    instance_to_json,
    read_instance,
    write_instance,
)

__all__ = [
    "NO_EXCHANGE",
    "DerivedRates",
    "LinkGains",
    "NetworkInstance",
    "PuParams",
    "ResourceExchange",
    "SuParams",
    "db_to_linear",
    "dbm_to_mw",
    "derived_rates",
    "direct_snr",
    "gs_constant",
    "linear_to_db",
    "log_rate",
    "mw_to_dbm",
    "pu_utility",
    "relay_snr",
    "su_rate",
    "su_type",
    "su_utility",
    "InstanceFile",
    "instance_from_json",
    "instance_to_json",
    "read_instance",
    "write_instance",
]
