import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict

# Ensure .env is loaded for any entrypoint (run.py, scripts, tests)
load_dotenv()


class Settings(BaseModel):
    """Enumeration guards and defaults, read from the environment."""

    model_config = ConfigDict(frozen=True)

    max_universe: int = 16
    max_oracle_universe: int = 6
    max_allocations: int = 200_000
    max_profiles: int = 200_000
    misreport_max_length: int = 4
    order_policy: str = "round-robin"
    log_level: str = "WARNING"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Build settings from environment variables

    Supported variables:
      - ASYLUM_MAX_UNIVERSE (subset audits, default 16)
      - ASYLUM_MAX_ORACLE_UNIVERSE (unique-rule oracle, default 6)
      - ASYLUM_MAX_ALLOCATIONS (stable-set enumeration, default 200000)
      - ASYLUM_MAX_PROFILES (misreport domains and sweeps, default 200000)
      - ASYLUM_MISREPORT_MAX_LENGTH (default 4)
      - ASYLUM_ORDER_POLICY (round-robin | lowest-id | highest-id)
      - ASYLUM_LOG_LEVEL (default WARNING)
    """
    return Settings(
        max_universe=_env_int("ASYLUM_MAX_UNIVERSE", 16),
        max_oracle_universe=_env_int("ASYLUM_MAX_ORACLE_UNIVERSE", 6),
        max_allocations=_env_int("ASYLUM_MAX_ALLOCATIONS", 200_000),
        max_profiles=_env_int("ASYLUM_MAX_PROFILES", 200_000),
        misreport_max_length=_env_int("ASYLUM_MISREPORT_MAX_LENGTH", 4),
        order_policy=os.getenv("ASYLUM_ORDER_POLICY", "round-robin").lower(),
        log_level=os.getenv("ASYLUM_LOG_LEVEL", "WARNING").upper(),
    )
