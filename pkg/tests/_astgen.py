"""Random expression trees for round-trip tests."""
import numpy as np

from qgauge.defexpr import Add, Call, Div, Mul, PowInt, RealConst, Sub, Var

BINARY = (Add, Sub, Mul, Div)


def random_constant(rng: np.random.Generator) -> float:
    kind = rng.integers(4)
    if kind == 0:
        return float(rng.integers(-20, 21))
    if kind == 1:
        return float(rng.uniform(-5, 5))
    if kind == 2:
        return float(rng.uniform(0, 1) * 10.0 ** rng.integers(-30, 30))
    return float(rng.integers(1, 10**6)) / 8.0


def random_ast(rng: np.random.Generator, n: int, depth: int = 6):
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return RealConst(random_constant(rng))
        return Var(("abs2", "re", "im")[rng.integers(3)], int(rng.integers(1, n + 1)))
    r = rng.random()
    if r < 0.6:
        cls = BINARY[rng.integers(4)]
        return cls(random_ast(rng, n, depth - 1), random_ast(rng, n, depth - 1))
    if r < 0.8:
        return PowInt(random_ast(rng, n, depth - 1), int(rng.integers(-3, 6)))
    return Call(("exp", "log", "sqrt")[rng.integers(3)], random_ast(rng, n, depth - 1))
