# handlers/cli/classify_handler.py
import argparse

from handlers.cli.base_handler import BaseHandler, EXIT_OK
from services.homotopy.classifier import OrderSpace, classify, probe_dimension
from utils.errors import UsageError


class ClassifyHandler(BaseHandler):
    command = "classify"
    help = "Гомотопическая классификация дефекта"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--m", type=int, required=True, help="Размерность среды")
        parser.add_argument("--d", type=int, required=True, help="Размерность дефекта")
        parser.add_argument("--space", required=True, help="Пространство параметра порядка (S2, RP2, SO3, ...)")

    def handle(self, args: argparse.Namespace) -> int:
        run = self.load_run(args)
        for key in ("m", "d", "space"):
            run.override(key, getattr(args, key))
        try:
            n = probe_dimension(args.m, args.d)
            space = OrderSpace.parse(args.space)
        except ValueError as e:
            raise UsageError(str(e))

        result = classify(space, n)
        self.logger.info(f"pi_{n}({space.name}) = {result.group.value}")
        payload = self.payload(run, m=args.m, d=args.d, **result.to_dict())
        self.emit(args, payload, [result.to_dict()])
        return EXIT_OK
