#settings.py
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Конфигурация приложения с использованием pydantic"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        populate_by_name=True,
        extra="ignore",
    )

    # Логирование
    LOG_LEVEL: str = Field("INFO", validation_alias="TOPO_LOG_LEVEL")
    LOG_FILE: str = Field("topodefects.log", validation_alias="TOPO_LOG_FILE")

    # Квадратуры и разностные схемы
    N_QUAD: int = Field(64, validation_alias="TOPO_N_QUAD")
    FD_STEP: float = Field(1e-5, validation_alias="TOPO_FD_STEP")
    WINDING_MAX_REFINEMENTS: int = Field(12, validation_alias="TOPO_WINDING_MAX_REFINEMENTS")

    # Пороги
    CHARGE_TOLERANCE: float = Field(1e-3, validation_alias="TOPO_CHARGE_TOLERANCE")
    EXCLUSION_RADIUS_MIN: float = Field(1.5, validation_alias="TOPO_EXCLUSION_RADIUS_MIN")
    SETTLE_TOLERANCE: float = Field(1e-3, validation_alias="TOPO_SETTLE_TOLERANCE")
    COMPAT_MIN_ORDER: float = Field(1.7, validation_alias="TOPO_COMPAT_MIN_ORDER")

    # Выходные файлы
    OUTPUT_DIR: str = Field("./output", validation_alias="TOPO_OUTPUT_DIR")


_settings = None


def get_settings() -> Config:
    """Возвращает общий экземпляр настроек"""
    global _settings
    if _settings is None:
        _settings = Config()
    return _settings


def reset_settings() -> None:
    """Сбрасывает кэш настроек (нужно после смены окружения)"""
    global _settings
    _settings = None
