# handlers/cli/compat_handler.py
import argparse

from handlers.cli.base_handler import BaseHandler, EXIT_FAILED, EXIT_OK
from handlers.cli.run_config import float_list
from services.defects.micropolar import (
    compat_residual, contortion_from_rotation, maurer_cartan_residual, nye_tensor,
    refinement_orders,
)
from services.fields.constructors import skyrme_field
from services.fields.profiles import parse_profile
from services.fields.rotation_fields import ROTATION_KINDS, build_rotation_field
from services.grid.lattice import Grid
from utils.errors import UsageError

DEFAULT_LEVELS = "0.2,0.1,0.05"
# остаток ниже этого уровня на всех шагах считается точным нулём
EXACT_RESIDUAL = 1e-9


class CompatHandler(BaseHandler):
    command = "compat"
    help = "Условие совместности Curl Gamma + Cof Gamma = 0 на последовательности решёток"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--field", choices=ROTATION_KINDS, help="Поле поворотов")
        parser.add_argument("--levels", help="Шаги решётки через запятую, например 0.1,0.05,0.025")
        parser.add_argument("--extent", type=float, help="Полуширина куба [-L, L]^3")
        parser.add_argument("--alpha", type=float, help="Шаг закрутки (twist) или амплитуда (smooth)")
        parser.add_argument("--residual", choices=("compat", "maurer-cartan"), help="Проверяемое тождество")
        parser.add_argument("--core-fraction", dest="core_fraction", type=float,
                            help="Доля полуширины, по которой берутся нормы")

    def handle(self, args: argparse.Namespace) -> int:
        run = self.load_run(args)
        for key in ("field", "levels", "extent", "alpha", "residual", "core_fraction"):
            run.override(key, getattr(args, key, None))

        kind = run.get("field", "twist")
        if kind not in ROTATION_KINDS:
            raise UsageError(f"Неизвестное поле поворотов '{kind}'")
        levels = run.get("levels", float_list(DEFAULT_LEVELS), float_list)
        if len(levels) < 2:
            raise UsageError("Для оценки порядка нужно не меньше двух уровней")
        extent = run.get("extent", 1.0, float)
        alpha = run.get("alpha", 1.0, float)
        identity = run.get("residual", "compat")
        core = run.get("core_fraction", 0.6, float)
        seed = run.get("seed", 0, int)
        skyrme = skyrme_field(parse_profile(run.get("profile"), "skyrme-arctan")) if kind == "skyrme" else None

        reports = []
        for h in levels:
            grid = Grid.from_spacing(-extent, extent, h, 3)
            M = build_rotation_field(kind, grid, alpha, seed, skyrme)
            if kind == "random":
                # контрольное поле не ортогонально, проверяется само как кандидат в Gamma
                reports.append(compat_residual(M, core))
                continue
            K = contortion_from_rotation(M)
            if identity == "maurer-cartan":
                reports.append(maurer_cartan_residual(K, core))
            else:
                reports.append(compat_residual(nye_tensor(K), core))

        orders = refinement_orders(reports)
        exact = all(r.max_norm < EXACT_RESIDUAL for r in reports)
        measured = [o for o in orders if o is not None]
        passed = exact or (bool(measured) and min(measured) >= self.config.COMPAT_MIN_ORDER)

        rows = []
        for i, report in enumerate(reports):
            row = report.to_dict()
            row["order"] = orders[i - 1] if i > 0 else None
            rows.append(row)
        payload = self.payload(run, field=kind, identity=identity, levels=rows, orders=orders,
                               exact=exact, passed=passed, min_order=self.config.COMPAT_MIN_ORDER)
        self.emit(args, payload, rows)

        if not passed:
            self.logger.warning(f"Порядок сходимости {measured} ниже {self.config.COMPAT_MIN_ORDER}")
            return EXIT_FAILED
        return EXIT_OK
