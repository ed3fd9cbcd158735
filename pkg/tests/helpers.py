"""Shared loaders and generators for the test suite."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from importlib import resources

from mcmrcap.formats import parse_flows, parse_network, parse_placement
from mcmrcap.lp import LpModel


def data_text(name: str) -> str:
    return resources.files("mcmrcap.data").joinpath(name).read_text()


def data_doc(name: str) -> dict:
    return json.loads(data_text(name))


def load_network(name: str):
    return parse_network(data_doc(name))


def load_flows(name: str):
    return parse_flows(data_doc(name))


def load_placement(name: str):
    return parse_placement(data_doc(name))


def random_lp(rng: random.Random) -> LpModel:
    """A small random LP, biased toward feasible bounded instances.

    Sizes stay within 8 variables and 12 constraints; the joint size is
    capped so the vertex-enumeration oracle stays affordable.
    """
    model = LpModel()
    nvars = rng.randint(1, 8)
    nrows = rng.randint(1, min(12, 13 - nvars))
    for j in range(nvars):
        model.add_var(f"x{j}", Fraction(rng.randint(-2, 6), rng.randint(1, 4)))
    boxed = rng.random() < 0.8
    for i in range(nrows - 1 if boxed else nrows):
        terms = {
            f"x{j}": Fraction(rng.randint(-3, 9), rng.randint(1, 3))
            for j in range(nvars)
            if rng.random() < 0.7
        }
        if not terms:
            terms[f"x{rng.randrange(nvars)}"] = Fraction(1)
        rhs = Fraction(rng.randint(0, 12), rng.randint(1, 3))
        if rng.random() < 0.85:
            model.add_le(f"r{i}", terms, rhs)
        else:
            model.add_eq(f"r{i}", terms, rhs)
    if boxed:
        # a box row keeps most instances bounded
        model.add_le("box", {v: Fraction(1) for v in model.variables}, Fraction(rng.randint(4, 20)))
    return model
