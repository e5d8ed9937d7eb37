# utils/file_utils.py

import io
import json
import logging
import math
import re
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class OutputManager:
    """Класс для работы с выходными файлами расчётов"""

    def __init__(self, base_dir: str = './output'):
        """
        Инициализация менеджера файлов.

        Args:
            base_dir: Базовая директория для результатов
        """
        self.base_dir = Path(base_dir)

    def get_output_path(self, prefix: str, suffix: Optional[str] = None) -> Path:
        """
        Создает путь к выходному файлу. Имя зависит только от аргументов,
        повторный запуск перезаписывает тот же файл.

        Args:
            prefix: Префикс имени файла
            suffix: Суффикс имени файла (расширение)

        Returns:
            Path: Путь к файлу
        """
        self.base_dir.mkdir(parents=True, exist_ok=True)
        filename = prefix
        if suffix:
            if not suffix.startswith('.'):
                suffix = f".{suffix}"
            filename += suffix
        return self.base_dir / filename

    @contextmanager
    def safe_open_file(self, file_path: Path, mode='w'):
        """
        Контекстный менеджер для безопасного открытия файлов.

        Args:
            file_path: Путь к файлу
            mode: Режим открытия файла
        """
        try:
            Path(file_path).parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, mode, encoding='utf-8', newline='') as f:
                yield f
        except Exception as e:
            logger.error(f"Ошибка при открытии файла {file_path}: {e}")
            raise


_FLOAT_MARK = "@@f17@@"
_FLOAT_PATTERN = re.compile(r'"@@f17@@([^"]*)"')


def _normalize(value):
    """Приводит значения numpy, перечисления и dataclass-отчёты к JSON-типам"""
    if hasattr(value, "to_dict"):
        return _normalize(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_normalize(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return f"{_FLOAT_MARK}{format(value, '.17g')}"
    return value


def to_json(payload) -> str:
    """Сериализация с сортировкой ключей и 17 значащими цифрами у чисел"""
    text = json.dumps(_normalize(payload), sort_keys=True, indent=2, ensure_ascii=False)
    return _FLOAT_PATTERN.sub(r"\1", text) + "\n"


def write_text(text: str, out_file: Optional[str] = None, stream=None) -> None:
    """Пишет текст в файл или в поток (по умолчанию stdout)"""
    if out_file:
        manager = OutputManager(str(Path(out_file).parent or '.'))
        with manager.safe_open_file(Path(out_file), 'w') as f:
            f.write(text)
        logger.info(f"Результат записан в {out_file}")
        return
    (stream or sys.stdout).write(text)


def rows_to_csv(header: Sequence[str], rows: np.ndarray) -> str:
    """CSV с заголовком; числа с 17 значащими цифрами"""
    buffer = io.StringIO()
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    np.savetxt(buffer, rows, delimiter=",", header=",".join(header), comments="", fmt="%.17g")
    return buffer.getvalue()


def records_to_csv(records: Iterable[Dict]) -> str:
    """CSV из плоских словарей (ключи первой записи задают столбцы)"""
    records = [_flatten(_normalize(r)) for r in records]
    if not records:
        return ""
    header = sorted(records[0].keys())
    lines = [",".join(header)]
    for record in records:
        lines.append(",".join(_csv_cell(record.get(k)) for k in header))
    return "\n".join(lines) + "\n"


def _flatten(record: Dict, prefix: str = "") -> Dict:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = " ".join(_csv_cell(v) for v in value)
        else:
            flat[name] = value
    return flat


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str) and value.startswith(_FLOAT_MARK):
        return value[len(_FLOAT_MARK):]
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def read_key_value_config(path: str) -> Dict[str, str]:
    """
    Читает конфигурацию key=value (по одной паре в строке, # - комментарий).

    Args:
        path: Путь к файлу

    Returns:
        Dict[str, str]: пары ключ-значение
    """
    result: Dict[str, str] = {}
    with open(path, 'r', encoding='utf-8') as f:
        for number, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError(f"{path}:{number}: ожидалась строка вида key=value")
            key, value = line.split('=', 1)
            key = key.strip().replace('-', '_')
            if not key:
                raise ValueError(f"{path}:{number}: пустой ключ")
            result[key] = value.strip()
    logger.debug(f"Прочитано {len(result)} параметров из {path}")
    return result
