# services/grid/lattice.py
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from utils.errors import GridError, FieldError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    """Равномерная декартова решётка размерности 1..4"""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]
    n: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        n = tuple(int(v) for v in np.atleast_1d(self.n))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", n)

        if not (len(lo) == len(hi) == len(n)):
            raise GridError(f"Разная длина lo/hi/n: {len(lo)}, {len(hi)}, {len(n)}")
        if len(n) not in (1, 2, 3, 4):
            raise GridError(f"Размерность решётки должна быть 1..4, получено {len(n)}")
        for axis, (a, b, count) in enumerate(zip(lo, hi, n)):
            if count < 4:
                raise GridError(f"Ось {axis}: нужно не меньше 4 узлов, получено {count}")
            if not b > a:
                raise GridError(f"Ось {axis}: hi={b} должно быть больше lo={a}")

    @classmethod
    def cube(cls, lo: float, hi: float, n: int, dim: int) -> "Grid":
        """Одинаковые оси по всем направлениям"""
        return cls((lo,) * dim, (hi,) * dim, (n,) * dim)

    @classmethod
    def from_spacing(cls, lo: float, hi: float, h: float, dim: int) -> "Grid":
        """Куб с шагом h (число узлов округляется до целого)"""
        count = int(round((hi - lo) / h)) + 1
        return cls.cube(lo, hi, count, dim)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((b - a) / (count - 1) for a, b, count in zip(self.lo, self.hi, self.n))

    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.linspace(a, b, count) for a, b, count in zip(self.lo, self.hi, self.n))

    def mesh(self) -> np.ndarray:
        """Координаты всех узлов, массив формы (*n, dim)"""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.mesh(), axis=-1)

    def contains(self, points: np.ndarray) -> bool:
        points = np.asarray(points, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return bool(np.all(points >= lo) and np.all(points <= hi))

    def interior_mask(self, margin: int = 1) -> np.ndarray:
        """Узлы, отстоящие от границы не меньше чем на margin шагов"""
        mask = np.zeros(self.n, dtype=bool)
        index = tuple(slice(margin, count - margin) for count in self.n)
        mask[index] = True
        return mask

    def core_mask(self, fraction: float) -> np.ndarray:
        """Центральная часть области: доля fraction от полуширины по каждой оси"""
        mesh = self.mesh()
        center = 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))
        half = 0.5 * (np.asarray(self.hi) - np.asarray(self.lo))
        return np.all(np.abs(mesh - center) <= fraction * half + 1e-12, axis=-1)

    def coarsened(self) -> Optional["Grid"]:
        """Решётка из каждого второго узла с шагом 2h.

        None, если по какой-то оси чётное число узлов или их меньше 9.
        """
        if any(count % 2 == 0 or count < 9 for count in self.n):
            return None
        return Grid(self.lo, self.hi, tuple((count - 1) // 2 + 1 for count in self.n))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "lo": list(self.lo),
            "hi": list(self.hi),
            "n": list(self.n),
            "spacing": list(self.spacing),
        }


def parse_grid(spec: str, dim: int) -> Grid:
    """Разбирает строку вида "lo,hi,n" (одинаково по осям) или "lo,hi,n;lo,hi,n;..."

    Args:
        spec: описание осей
        dim: размерность, если задана одна ось

    Returns:
        Grid: решётка
    """
    parts = [p for p in spec.replace(" ", "").split(";") if p]
    try:
        axes = [tuple(float(v) for v in p.split(",")) for p in parts]
    except ValueError as e:
        raise GridError(f"Не удалось разобрать решётку '{spec}': {e}")
    if any(len(a) != 3 for a in axes):
        raise GridError(f"Каждая ось задаётся как lo,hi,n: '{spec}'")
    if len(axes) == 1:
        axes = axes * dim
    if len(axes) != dim:
        raise GridError(f"Ожидалось {dim} осей, получено {len(axes)}")
    return Grid(
        tuple(a[0] for a in axes),
        tuple(a[1] for a in axes),
        tuple(int(a[2]) for a in axes),
    )


@dataclass(frozen=True)
class SampledField:
    """Значения поля в узлах решётки; форма samples = (*grid.n, *value_shape)"""

    grid: Grid
    samples: np.ndarray
    singular: Optional[np.ndarray] = field(default=None, compare=False)

    value_rank = 0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.shape[: self.grid.dim] != self.grid.n:
            raise FieldError(
                f"Форма значений {samples.shape} не соответствует решётке {self.grid.n}"
            )
        if samples.ndim != self.grid.dim + self.value_rank:
            raise FieldError(
                f"Ожидался ранг значений {self.value_rank}, форма {samples.shape}"
            )
        if not np.all(np.isfinite(samples)):
            raise FieldError("Поле содержит нефинитные значения")
        if self.singular is not None and self.singular.shape != self.grid.n:
            raise FieldError("Маска особых точек не совпадает с решёткой")

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return self.samples.shape[self.grid.dim:]

    def regular_mask(self) -> np.ndarray:
        if self.singular is None:
            return np.ones(self.grid.n, dtype=bool)
        return ~self.singular

    def coarsened(self) -> Optional["SampledField"]:
        """То же поле в каждом втором узле (см. Grid.coarsened)"""
        coarse = self.grid.coarsened()
        if coarse is None:
            return None
        index = (slice(None, None, 2),) * self.grid.dim
        singular = None if self.singular is None else self.singular[index]
        return type(self)(coarse, self.samples[index], singular)


class ScalarField(SampledField):
    value_rank = 0


class VectorField(SampledField):
    value_rank = 1

    @property
    def components(self) -> int:
        return self.samples.shape[-1]


class MatrixField(SampledField):
    value_rank = 2


STENCIL_ORDERS = (2, 4)


def _central4(samples: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Пятиточечная центральная разность; в двух крайних узлах - шаблон второго порядка"""
    result = np.gradient(samples, h, axis=axis, edge_order=2)
    f = np.moveaxis(samples, axis, 0)
    out = np.moveaxis(result, axis, 0)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    return result


def gradient(samples: np.ndarray, grid: Grid, order: int = 2) -> np.ndarray:
    """Все частные производные по осям решётки.

    order=2: центральные разности второго порядка внутри и односторонние
    второго порядка на границе. order=4: пятиточечный центральный шаблон
    внутри, два узла у границы считаются со вторым порядком.
    Последняя ось результата нумерует направление.
    """
    if order not in STENCIL_ORDERS:
        raise GridError(f"Порядок шаблона должен быть 2 или 4, получено {order}")
    if order == 2:
        derivatives = np.gradient(samples, *grid.spacing, axis=tuple(range(grid.dim)), edge_order=2)
        if grid.dim == 1:
            derivatives = [derivatives]
    else:
        if min(grid.n) < 5:
            raise GridError(f"Для шаблона четвёртого порядка нужно не меньше 5 узлов по оси, n={grid.n}")
        derivatives = [_central4(samples, axis, h) for axis, h in enumerate(grid.spacing)]
    return np.stack(derivatives, axis=-1)


def partial(field: SampledField, axis: int, point: Sequence[int], one_sided: bool = False,
            component: Optional[Tuple[int, ...]] = None) -> float:
    """Производная одной компоненты поля в узле

    Args:
        field: поле на решётке
        axis: номер оси дифференцирования
        point: мультииндекс узла
        one_sided: разрешить односторонний шаблон у границы
        component: индекс компоненты для векторных и матричных полей

    Returns:
        float: значение производной
    """
    grid = field.grid
    if not 0 <= axis < grid.dim:
        raise GridError(f"Ось {axis} вне диапазона 0..{grid.dim - 1}")
    point = tuple(int(i) for i in point)
    if len(point) != grid.dim or any(not 0 <= i < count for i, count in zip(point, grid.n)):
        raise GridError(f"Узел {point} вне решётки {grid.n}")

    component = tuple(component or ())
    if len(component) != field.samples.ndim - grid.dim:
        raise GridError(f"Индекс компоненты {component} не подходит к полю {field.value_shape}")

    def value(offset: int) -> float:
        index = list(point)
        index[axis] += offset
        return float(field.samples[tuple(index) + component])

    h = grid.spacing[axis]
    i, last = point[axis], grid.n[axis] - 1

    if 0 < i < last:
        return (value(1) - value(-1)) / (2.0 * h)
    if not one_sided:
        raise GridError(f"Узел {point} на границе по оси {axis}; нужен односторонний шаблон")
    if i == 0:
        return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * h)
    return (3.0 * value(0) - 4.0 * value(-1) + value(-2)) / (2.0 * h)


def interpolate(field: SampledField, points: np.ndarray) -> np.ndarray:
    """Трилинейная (полилинейная) интерполяция поля в произвольных точках"""
    points = np.asarray(points, dtype=float)
    if not field.grid.contains(points):
        raise GridError("Точки интерполяции выходят за пределы решётки")
    interpolator = RegularGridInterpolator(field.grid.axes(), field.samples, method="linear")
    flat = points.reshape(-1, field.grid.dim)
    values = interpolator(flat)
    return values.reshape(points.shape[:-1] + field.value_shape)
