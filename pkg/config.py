"""
Runtime configuration

Default resource limits come from the environment (a local .env file is honoured).
Command-line flags override them per run.

Example .env:
    FPCERT_MAX_COSETS=200000
    FPCERT_LOG_LEVEL=INFO
"""

import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()


class Settings(BaseModel):
    max_cosets: int = Field(gt=0)
    max_seconds: float = Field(gt=0)
    lowindex_seconds: float = Field(gt=0)
    probe_cosets: int = Field(gt=0)
    quotient_bound: int = Field(ge=2)
    block_base: int = Field(ge=10)
    block_runs: int = Field(ge=2)
    escalation_factor: int = Field(ge=2)
    max_rounds: int = Field(ge=1)
    tietze_moves: int = Field(ge=0)
    tietze_max_length: int = Field(ge=0)
    log_level: str
    api_port: int = Field(gt=0, lt=65536)

    @field_validator('log_level')
    @classmethod
    def known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level: {value}")
        return value


def load_settings() -> Settings:
    """Read settings from the environment."""
    return Settings(
        max_cosets=os.getenv('FPCERT_MAX_COSETS', '100000'),
        max_seconds=os.getenv('FPCERT_MAX_SECONDS', '300'),
        lowindex_seconds=os.getenv('FPCERT_LOWINDEX_SECONDS', '300'),
        probe_cosets=os.getenv('FPCERT_PROBE_COSETS', '2000'),
        quotient_bound=os.getenv('FPCERT_QUOTIENT_BOUND', '6'),
        block_base=os.getenv('FPCERT_BLOCK_BASE', '10'),
        block_runs=os.getenv('FPCERT_BLOCK_RUNS', '20'),
        escalation_factor=os.getenv('FPCERT_ESCALATION', '2'),
        max_rounds=os.getenv('FPCERT_MAX_ROUNDS', '4'),
        tietze_moves=os.getenv('FPCERT_TIETZE_MOVES', '1000'),
        tietze_max_length=os.getenv('FPCERT_TIETZE_MAX_LENGTH', '64'),
        log_level=os.getenv('FPCERT_LOG_LEVEL', 'WARNING'),
        api_port=os.getenv('FPCERT_API_PORT', '5000'),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
