# config/logging_config.py
import logging
import os
import sys


def setup_logging(log_level=logging.INFO, log_file="topodefects.log", quiet=False):
    """Настройка системы логирования приложения

    Args:
        log_level: уровень корневого логгера (число или имя уровня)
        log_file: путь к файлу журнала; пустая строка отключает запись в файл
        quiet: в консоль попадают только предупреждения и ошибки
    """
    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO

    # Создаем директорию для логов, если она не существует
    log_dir = os.path.dirname(log_file) if log_file else ""
    if log_dir and not os.path.exists(log_dir):
        os.makedirs(log_dir)

    # Форматирование логов
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    date_format = '%Y-%m-%d %H:%M:%S'
    formatter = logging.Formatter(log_format, date_format)

    # Настройка корневого логгера
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Очищаем существующие обработчики
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # Консоль пишет в stderr, stdout остаётся под JSON/CSV
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    if quiet:
        console_handler.setLevel(logging.WARNING)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    # Логирование необработанных исключений
    def handle_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            # Стандартная обработка для Ctrl+C
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        root_logger.error("Необработанное исключение", exc_info=(exc_type, exc_value, exc_traceback))

    sys.excepthook = handle_exception

    logging.debug("Система логирования инициализирована")
