"""Bundled example data and simulation scenario configs."""

from importlib import resources


def example20_path() -> str:
    """Filesystem path of the bundled 20-row example CSV (3 predictors, 4 levels)."""
    return str(resources.files(__package__) / "example20.csv")


def scenario_path(name: str) -> str:
    """Path of a shipped scenario config: one of 'a', 'b', 'c', 'd'.

    (a) 5 levels, (b) 9 levels, each with smooth default effect curves;
    (c)/(d) are the corresponding variants with stepwise-fused true effects.
    All ship with n=200; edit a copy for other sample sizes.
    """
    if name not in ("a", "b", "c", "d"):
        raise ValueError(f"unknown scenario {name!r}; expected a, b, c or d")
    return str(resources.files(__package__) / f"scenario_{name}.json")
