# handlers/cli/base_handler.py
import argparse
import logging
from typing import Dict, Iterable, Optional

from config.settings import Config
from handlers.cli.run_config import RunConfig
from services.grid.lattice import Grid, parse_grid
from utils.file_utils import records_to_csv, to_json, write_text

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2
EXIT_USAGE = 64


class BaseHandler:
    """Общая часть подкоманд: загрузка параметров запуска и вывод результата"""

    command: str = ""
    help: str = ""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(self.__class__.__module__)

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Аргументы, специфичные для подкоманды"""

    def handle(self, args: argparse.Namespace) -> int:
        raise NotImplementedError

    def load_run(self, args: argparse.Namespace) -> RunConfig:
        """Файл или имя конфигурации, затем общие флаги поверх"""
        run = RunConfig.load(getattr(args, "config", None))
        for key in ("grid", "method", "formula", "tolerance", "seed"):
            run.override(key, getattr(args, key, None))
        self.logger.debug(f"Параметры запуска {self.command}: {run.echo()}")
        return run

    def tolerance(self, run: RunConfig) -> float:
        return run.get("tolerance", self.config.CHARGE_TOLERANCE, float)

    def grid(self, run: RunConfig, dim: int, default: Optional[str] = None) -> Optional[Grid]:
        spec = run.get("grid", default)
        return parse_grid(spec, dim) if spec else None

    def payload(self, run: RunConfig, **data) -> Dict[str, object]:
        return {"command": self.command, "config_echo": run.echo(), **data}

    def emit(self, args: argparse.Namespace, payload: Dict[str, object],
             records: Optional[Iterable[Dict]] = None, csv_text: Optional[str] = None) -> None:
        """JSON (ключи отсортированы) или CSV в stdout либо в --out-file"""
        if args.output == "csv":
            text = csv_text if csv_text is not None else records_to_csv(records or [payload])
        else:
            text = to_json(payload)
        write_text(text, args.out_file)
