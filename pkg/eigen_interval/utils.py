from contextlib import contextmanager
import math

__all__ = [
    "is_integral",
    "round_significant",
    "parse_bound",
    "assert_exception",
]


def is_integral(x: float) -> bool:
    return math.isfinite(x) and float(x).is_integer()


def round_significant(x: float, digits: int = 15) -> float:
    """Round a finite float to `digits` significant digits, passing inf/nan/0 through."""

    if x == 0 or not math.isfinite(x):
        return x

    return float(f"{x:.{digits - 1}e}")


def parse_bound(token: str | float) -> float:
    """Parse an interval endpoint, accepting "inf", "+inf" and "-inf" in any case."""

    if isinstance(token, (int, float)):
        return float(token)

    text = token.strip().lower()

    if text in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if text in ("-inf", "-infinity"):
        return -math.inf

    value = float(text)

    if math.isnan(value):
        raise ValueError(f"Interval endpoint {token!r} is not a number.")

    return value


@contextmanager
def assert_exception(exc: type[Exception]):
    try:
        yield
    except exc:
        ...
    else:
        raise AssertionError(f"Expected {exc.__name__} to be raised.")
