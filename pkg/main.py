# main.py
import argparse
import importlib
import inspect
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Type

from dotenv import load_dotenv

from config.logging_config import setup_logging
from config.settings import get_settings
from handlers.cli.base_handler import BaseHandler, EXIT_ERROR, EXIT_USAGE
from services.charges.report import ChargeMethod
from utils.errors import TopoError, UsageError


class CliParser(argparse.ArgumentParser):
    """Ошибки разбора аргументов превращаются в UsageError вместо выхода с кодом 2"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def discover_handlers() -> Dict[str, Type[BaseHandler]]:
    """
    Автоматически обнаруживает все подкоманды в директории handlers/cli

    Returns:
        Dict[str, Type[BaseHandler]]: имя подкоманды -> класс обработчика
    """
    handlers = {}
    handlers_dir = Path(__file__).parent / "handlers" / "cli"

    # Игнорируем базовые и служебные файлы
    ignore_files = {"__init__.py", "base_handler.py"}

    for handler_file in sorted(handlers_dir.glob("*_handler.py")):
        if handler_file.name in ignore_files:
            continue

        module_name = f"handlers.cli.{handler_file.stem}"
        module = importlib.import_module(module_name)

        # Ищем классы-обработчики в модуле
        for name, obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(obj, BaseHandler) and obj is not BaseHandler and obj.__module__ == module_name:
                handlers[obj.command] = obj
                logging.debug(f"Обнаружен обработчик: {name} ({obj.command})")

    return handlers


def common_arguments() -> argparse.ArgumentParser:
    """Флаги, общие для всех подкоманд"""
    parent = CliParser(add_help=False)
    parent.add_argument("--config", help="Файл key=value или имя конфигурации")
    parent.add_argument("--grid", help='Решётка "lo,hi,n" или "lo,hi,n;lo,hi,n;..." по осям')
    parent.add_argument("--method", choices=[m.value for m in ChargeMethod], help="Метод вычисления заряда")
    parent.add_argument("--formula", choices=("det-B", "det-Gamma", "KKK", "all"), help="Формула барионного числа")
    parent.add_argument("--tolerance", type=float, help="Допуск квантования")
    parent.add_argument("--output", choices=("json", "csv"), default="json", help="Формат вывода")
    parent.add_argument("--out-file", dest="out_file", help="Файл результата (по умолчанию stdout)")
    parent.add_argument("--quiet", action="store_true", help="В консоль только предупреждения и ошибки")
    parent.add_argument("--seed", type=int, help="Зерно для случайных полей")
    parent.add_argument("--log-level", dest="log_level", help="Уровень логирования")
    return parent


def build_parser(handlers: Dict[str, BaseHandler]) -> argparse.ArgumentParser:
    parent = common_arguments()
    parser = CliParser(prog="topodefects", description="Топологические заряды и тождества теории дефектов")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, handler in handlers.items():
        sub = subparsers.add_parser(command, help=handler.help, parents=[parent])
        handler.add_arguments(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Точка входа командной строки; возвращает код завершения"""
    load_dotenv()
    config = get_settings()
    handlers = {command: cls(config) for command, cls in discover_handlers().items()}
    parser = build_parser(handlers)

    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{parser.format_usage()}{e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    setup_logging(args.log_level or config.LOG_LEVEL, config.LOG_FILE, quiet=args.quiet)
    handler = handlers[args.command]
    try:
        return handler.handle(args)
    except UsageError as e:
        logging.error(f"Ошибка аргументов: {e}")
        return EXIT_USAGE
    except (TopoError, ValueError, OSError) as e:
        logging.error(f"Команда {args.command} завершилась с ошибкой: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
