# handlers/cli/charge_handler.py
import argparse
from typing import Dict

from handlers.cli.base_handler import BaseHandler, EXIT_FAILED, EXIT_OK
from handlers.cli.run_config import RunConfig, analytic_field
from services.charges.integrals import charge
from services.charges.report import ChargeMethod, ChargeReport
from services.defects.skyrme import BaryonFormula, baryon_number, baryon_triality
from services.fields.constructors import monopole_config, skyrme_field
from services.fields.profiles import parse_profile
from services.monopole.thooft import monopole_charge
from utils.errors import UsageError

DEFAULT_GRIDS = {2: "-3,3,61", 3: "-3,3,61"}
SKYRME_GRID = "-6,6,97"


class ChargeHandler(BaseHandler):
    command = "charge"
    help = "Топологический заряд конфигурации"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--N", type=int, help="Число намотки")
        parser.add_argument("--dim", type=int, help="Размерность (hedgehog: 3 или 4)")
        parser.add_argument("--profile", help="Радиальный профиль, например skyrme-exp:a=2")
        parser.add_argument("--radius", type=float, help="Радиус контура или сферы")
        parser.add_argument("--n-quad", dest="n_quad", type=int, help="Число узлов квадратуры")
        parser.add_argument("--g", type=float, help="Константа связи монополя")

    def handle(self, args: argparse.Namespace) -> int:
        run = self.load_run(args)
        for key in ("N", "dim", "profile", "radius", "n_quad", "g"):
            run.override(key, getattr(args, key, None))
        name = run.require_name()
        tolerance = self.tolerance(run)
        self.logger.info(f"Вычисление заряда конфигурации {name}")

        if name == "skyrme":
            reports = self._skyrme(run)
        elif name == "monopole":
            reports = {"monopole": self._monopole(run)}
        else:
            reports = {name: self._static(run)}

        passed = all(r.within(tolerance) for r in reports.values())
        if len(reports) == 1:
            report = next(iter(reports.values()))
            payload = self.payload(run, **report.to_dict())
            records = [report.to_dict()]
        else:
            payload = self.payload(run, reports={k: r.to_dict() for k, r in reports.items()})
            records = [r.to_dict() for r in reports.values()]
        payload["quantized"] = passed
        self.emit(args, payload, records)

        if not passed:
            self.logger.warning(f"Заряд не квантован с допуском {tolerance}")
            return EXIT_FAILED
        return EXIT_OK

    def _static(self, run: RunConfig) -> ChargeReport:
        field = analytic_field(run)
        method = run.get("method")
        grid = None
        if method is not None and ChargeMethod(method) == ChargeMethod.VOLUME_DENSITY:
            grid = self.grid(run, field.dim, DEFAULT_GRIDS.get(field.dim))
        return charge(field, method=method, grid=grid, radius=run.get("radius", 1.0, float),
                      n_quad=run.get("n_quad", None, int))

    def _skyrme(self, run: RunConfig) -> Dict[str, ChargeReport]:
        profile = parse_profile(run.get("profile"), "skyrme-arctan")
        field = skyrme_field(profile, run.get("N", 1, int))
        U = field.sample(self.grid(run, 3, SKYRME_GRID))
        formula = run.get("formula", BaryonFormula.DET_B.value)
        b_form = run.get("b_form", "rotation")
        if formula == "all":
            return baryon_triality(U, b_form)
        try:
            formula = BaryonFormula(formula)
        except ValueError:
            raise UsageError(f"--formula: ожидалось det-B, det-Gamma, KKK или all, получено '{formula}'")
        return {formula.value: baryon_number(U, formula, b_form, details={"profile": profile.to_dict()})}

    def _monopole(self, run: RunConfig) -> ChargeReport:
        F = parse_profile(run.get("higgs_profile"), "higgs-tanh")
        g = run.get("g", 1.0, float)
        cfg = monopole_config(run.get("N", 1, int), F_profile=F, g=g, lam=run.get("lam", 0.0, float))
        return monopole_charge(cfg, run.get("radius", None, float), run.get("n_quad", None, int))
