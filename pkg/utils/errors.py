# utils/errors.py
"""Исключения библиотеки. Все они наследуют ValueError, как и проверки параметров."""


class TopoError(ValueError):
    """Базовая ошибка вычислений"""


class GridError(TopoError):
    """Некорректная решётка или выход за её пределы"""


class FieldError(TopoError):
    """Некорректные значения поля (ненормированные, нефинитные и т.п.)"""


class SingularPointError(FieldError):
    """Вычисление в особой точке поля"""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class QuadratureError(TopoError):
    """Сфера или контур не помещаются в область, где известно поле"""


class MethodError(TopoError):
    """Метод интегрирования несовместим с размерностью"""


class StabilityError(TopoError):
    """Нарушено условие Куранта или состояние перестало быть конечным"""


class UsageError(TopoError):
    """Ошибка аргументов командной строки"""
