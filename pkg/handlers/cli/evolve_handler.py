# handlers/cli/evolve_handler.py
import argparse
from pathlib import Path

import numpy as np

from handlers.cli.base_handler import BaseHandler, EXIT_FAILED, EXIT_OK
from handlers.cli.run_config import sign_pair
from services.solitons.sine_gordon import (
    Kink, energy, initial_state, kink_antikink, sector_charge, sine_gordon_params, snapshot_rows,
    trajectory,
)
from utils.errors import UsageError
from utils.file_utils import OutputManager, rows_to_csv

PROFILES = ("kink", "kink-antikink", "vacuum")
DEFAULT_GRID = "-20,20,4001"
# заряд считается сохранённым, если меняется не больше чем на это значение
CONSERVATION_TOLERANCE = 1e-12


class EvolveHandler(BaseHandler):
    command = "evolve"
    help = "Эволюция угла микроповорота по двойному уравнению синус-Гордона"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--profile", help="kink, kink-antikink или vacuum")
        parser.add_argument("--m", type=float, help="Масса")
        parser.add_argument("--b", type=float, help="Коэффициент при sin 2Theta")
        parser.add_argument("--v", type=float, help="Скорость кинка")
        parser.add_argument("--dt", type=float, help="Шаг по времени")
        parser.add_argument("--duration", type=float, help="Время эволюции")
        parser.add_argument("--stride", type=int, help="Шагов между снимками")
        parser.add_argument("--snapshots", help="CSV-файл для снимков (t, x, Theta)")

    def handle(self, args: argparse.Namespace) -> int:
        run = self.load_run(args)
        for key in ("profile", "m", "b", "v", "dt", "duration", "stride", "snapshots"):
            run.override(key, getattr(args, key, None))

        kind = run.get("profile", "kink")
        if kind not in PROFILES:
            raise UsageError(f"Неизвестный профиль '{kind}', доступны: {', '.join(PROFILES)}")
        params = sine_gordon_params(
            m=run.get("m", 1.0, float), v=run.get("v", 0.0, float), delta=run.get("delta", 0.0, float),
            signs=run.get("signs", (1, 1), sign_pair), b=run.get("b", 0.0, float),
        )
        grid = self.grid(run, 1, DEFAULT_GRID)
        dt = run.get("dt", 0.5 * grid.spacing[0], float)
        duration = run.get("duration", 5.0, float)
        steps = int(round(duration / dt))
        stride = run.get("stride", max(steps // 10, 1), int)

        if kind == "kink":
            profile = Kink(params)
        elif kind == "kink-antikink":
            profile = kink_antikink(params, run.get("separation", 10.0, float))
        else:
            profile = None

        start = initial_state(grid, profile)
        snapshots = trajectory(start, params, dt, steps, stride)
        final = snapshots[-1]

        charges = [sector_charge(s) for s in snapshots]
        drift = max(abs(c.value - charges[0].value) for c in charges)
        conserved = drift <= CONSERVATION_TOLERANCE
        e0, e1 = energy(start, params), energy(final, params)
        energy_drift = abs(e1 - e0) / abs(e0) if e0 != 0 else abs(e1)

        summary = {"steps": steps, "dt": dt, "t": final.t, "charge_drift": drift, "conserved": conserved,
                   "energy_initial": e0, "energy_final": e1, "energy_drift": energy_drift,
                   "params": params.to_dict(), "profile": kind}
        if isinstance(profile, Kink) and params.is_exact:
            exact = profile.theta(final.x, final.t)
            summary["linf_error"] = float(np.max(np.abs(final.theta - exact)))
            self.logger.info(f"L-inf отклонение от точного кинка при t={final.t:.6g}: {summary['linf_error']:.3e}")

        rows = np.vstack([snapshot_rows(s) for s in snapshots])
        snapshot_file = run.get("snapshots")
        if snapshot_file:
            path = Path(snapshot_file)
            manager = OutputManager(str(path.parent))
            if path.parent == Path("."):
                # голое имя файла кладём в каталог результатов
                manager = OutputManager(self.config.OUTPUT_DIR)
                path = manager.get_output_path(path.stem, path.suffix or "csv")
            with manager.safe_open_file(path) as f:
                f.write(rows_to_csv(("t", "x", "theta"), rows))
            summary["snapshots"] = str(path)

        payload = self.payload(run, report=charges[-1].to_dict(), summary=summary,
                               charges=[c.value for c in charges])
        self.emit(args, payload, csv_text=rows_to_csv(("t", "x", "theta"), rows))

        if not conserved:
            self.logger.warning(f"Заряд сектора изменился на {drift:.3e}")
            return EXIT_FAILED
        return EXIT_OK
