# handlers/cli/run_config.py
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, TypeVar

from services.fields.constructors import AnalyticField, hedgehog, n3, skyrme_field, vacuum, vortex
from services.fields.profiles import parse_profile
from utils.errors import UsageError
from utils.file_utils import read_key_value_config

logger = logging.getLogger(__name__)

T = TypeVar("T")

CONFIG_NAMES = ("vortex", "hedgehog", "n3", "skyrme", "monopole", "vacuum")


@dataclass
class RunConfig:
    """Параметры запуска: файл key=value или имя конфигурации, поверх - флаги"""

    name: Optional[str] = None
    values: Dict[str, str] = field(default_factory=dict)
    source: Optional[str] = None

    @classmethod
    def load(cls, config: Optional[str]) -> "RunConfig":
        """Путь к существующему файлу читается как key=value, иначе строка - имя конфигурации"""
        if not config:
            return cls()
        path = Path(config)
        if path.is_file():
            values = read_key_value_config(str(path))
            logger.debug(f"Параметры запуска прочитаны из {path}")
            return cls(values.get("config"), values, str(path))
        if config not in CONFIG_NAMES:
            raise UsageError(
                f"--config: нет файла '{config}' и нет такой конфигурации, доступны: {', '.join(CONFIG_NAMES)}"
            )
        return cls(config, {"config": config})

    def override(self, key: str, value) -> None:
        """Флаг командной строки заменяет значение из файла"""
        if value is not None:
            self.values[key] = str(value)
            if key == "config":
                self.name = str(value)

    def get(self, key: str, default: T = None, cast: Callable[[str], T] = str) -> T:
        raw = self.values.get(key)
        if raw is None or raw == "":
            return default
        try:
            return cast(raw)
        except ValueError as e:
            raise UsageError(f"Параметр {key}={raw!r}: {e}")

    def require_name(self) -> str:
        if not self.name:
            raise UsageError(f"Не указана конфигурация (--config), доступны: {', '.join(CONFIG_NAMES)}")
        if self.name not in CONFIG_NAMES:
            raise UsageError(f"Неизвестная конфигурация '{self.name}'")
        return self.name

    def echo(self) -> Dict[str, str]:
        return dict(sorted(self.values.items()))


def float_list(text: str):
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def sign_pair(text: str):
    values = [int(v) for v in text.split(",")]
    if len(values) != 2:
        raise ValueError("ожидалось два знака через запятую")
    return tuple(values)


def analytic_field(run: RunConfig) -> AnalyticField:
    """Аналитическое поле единичных векторов по имени конфигурации"""

    name = run.require_name()
    N = run.get("N", 1, int)
    dim = run.get("dim", 3, int)
    if name == "vortex":
        return vortex(N)
    if name == "hedgehog":
        return hedgehog(dim)
    if name == "n3":
        return n3(N)
    if name == "skyrme":
        return skyrme_field(parse_profile(run.get("profile"), "skyrme-arctan"), N)
    if name == "vacuum":
        return vacuum(run.get("components", dim, int), dim)
    raise UsageError(f"Конфигурация '{name}' не задаёт поле единичных векторов")
