# handlers/cli/dump_field_handler.py
import argparse
from typing import List, Tuple

import numpy as np

from handlers.cli.base_handler import BaseHandler, EXIT_OK
from handlers.cli.run_config import analytic_field
from services.charges.currents import topological_density_grid
from services.defects.micropolar import contortion_from_rotation, nye_tensor
from services.defects.skyrme import skyrme_b
from services.fields.constructors import monopole_config, skyrme_field
from services.fields.profiles import parse_profile
from services.fields.rotation_fields import build_rotation_field
from services.grid.lattice import Grid
from services.monopole.thooft import thooft_magnitudes
from utils.errors import UsageError
from utils.file_utils import rows_to_csv, to_json, write_text

QUANTITIES = ("field", "density", "nye", "b", "thooft")
DEFAULT_GRID = "-2,2,21"


def _matrix_names(prefix: str) -> List[str]:
    return [f"{prefix}{i + 1}{j + 1}" for i in range(3) for j in range(3)]


class DumpFieldHandler(BaseHandler):
    command = "dump-field"
    help = "Выгрузка поля или производных величин в CSV для построения графиков"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--quantity", choices=QUANTITIES, help="Что выгружать")
        parser.add_argument("--field", help="Поле поворотов для nye (identity, twist, smooth, ...)")
        parser.add_argument("--profile", help="Радиальный профиль")
        parser.add_argument("--N", type=int, help="Число намотки")

    def handle(self, args: argparse.Namespace) -> int:
        run = self.load_run(args)
        for key in ("quantity", "field", "profile", "N"):
            run.override(key, getattr(args, key, None))
        quantity = run.get("quantity", "field")
        if quantity not in QUANTITIES:
            raise UsageError(f"Неизвестная величина '{quantity}', доступны: {', '.join(QUANTITIES)}")
        if args.output == "json" and not args.out_file:
            raise UsageError("Для --output json нужен --out-file: в stdout пишется сводка, CSV - в файл")

        grid, names, values = getattr(self, f"_{quantity}")(run)
        points = grid.mesh()
        header = [f"x{i + 1}" for i in range(grid.dim)] + names
        rows = np.hstack([points.reshape(-1, grid.dim), values.reshape(grid.size, -1)])
        text = rows_to_csv(header, rows)
        self.logger.info(f"Выгрузка {quantity}: {grid.size} узлов, {len(names)} столбцов")

        if args.output == "json":
            write_text(text, args.out_file)
            summary = self.payload(run, quantity=quantity, columns=header, rows=grid.size,
                                   grid=grid.to_dict(), out_file=args.out_file)
            write_text(to_json(summary))
        else:
            write_text(text, args.out_file)
        return EXIT_OK

    def _field(self, run) -> Tuple[Grid, List[str], np.ndarray]:
        field = analytic_field(run)
        grid = self.grid(run, field.dim, DEFAULT_GRID)
        sampled = field.sample(grid)
        singular = sampled.singular if sampled.singular is not None else np.zeros(grid.n, dtype=bool)
        names = [f"n{i + 1}" for i in range(field.components)] + ["singular"]
        return grid, names, np.concatenate([sampled.samples, singular[..., None].astype(float)], axis=-1)

    def _density(self, run) -> Tuple[Grid, List[str], np.ndarray]:
        field = analytic_field(run)
        grid = self.grid(run, field.dim, DEFAULT_GRID)
        density = topological_density_grid(field.sample(grid))
        return grid, ["density"], density.samples[..., None]

    def _nye(self, run) -> Tuple[Grid, List[str], np.ndarray]:
        grid = self.grid(run, 3, DEFAULT_GRID)
        kind = run.get("field", "smooth")
        skyrme = skyrme_field(parse_profile(run.get("profile"), "skyrme-arctan")) if kind == "skyrme" else None
        R = build_rotation_field(kind, grid, run.get("alpha", 1.0, float), run.get("seed", 0, int), skyrme)
        gamma = nye_tensor(contortion_from_rotation(R))
        return grid, _matrix_names("G"), gamma.samples

    def _b(self, run) -> Tuple[Grid, List[str], np.ndarray]:
        grid = self.grid(run, 3, DEFAULT_GRID)
        field = skyrme_field(parse_profile(run.get("profile"), "skyrme-arctan"), run.get("N", 1, int))
        pair = skyrme_b(field.sample(grid))
        values = np.concatenate([pair.rotation.samples.reshape(grid.n + (9,)),
                                 pair.trace.samples.reshape(grid.n + (9,))], axis=-1)
        return grid, _matrix_names("B") + _matrix_names("Btr"), values

    def _thooft(self, run) -> Tuple[Grid, List[str], np.ndarray]:
        grid = self.grid(run, 3, DEFAULT_GRID)
        cfg = monopole_config(run.get("N", 1, int), F_profile=parse_profile(run.get("higgs_profile"), "higgs-tanh"),
                              g=run.get("g", 1.0, float))
        return grid, ["F12", "F13", "F23", "B"], thooft_magnitudes(cfg, grid.mesh())
