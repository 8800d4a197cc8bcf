"""Text grammars shared by the CLI and scenario files.

Family and sampler specs are ``name:key=value,...`` with ``|`` as the
list separator inside a value, e.g.

    normal-location:sigma=1
    exponential-rate:zeta=2
    tabulated:path=table.csv
    uniform:a=0,b=1
    gaussian-mixture:weights=0.5|0.5,means=0|3,sds=1|0.5
    point-mass:c=2

A ``zeta=`` key pins the conditioning value, which is how a family spec
names a fixed univariate CDF for the classic test.

Scenario files are flat ``key = value`` lines with ``#`` comments:

    zeta_sampler = uniform:a=0,b=1
    null_family  = normal-location:sigma=1
    data_family  = normal-location:sigma=2   # optional, defaults to null
    n = 100
    replicates = 1000
    seed = 42
"""

from __future__ import annotations

import os

from .conditional import (
    ConditionalCdfFamily,
    ExponentialRate,
    NormalLocation,
    TabulatedFamily,
    UniformWidth,
)
from .monte_carlo import (
    GaussianMixtureSampler,
    PointMassSampler,
    Scenario,
    UniformSampler,
    ZetaSampler,
)

_SCENARIO_KEYS = {"zeta_sampler", "null_family", "data_family", "n", "replicates", "seed"}
_REQUIRED_SCENARIO_KEYS = _SCENARIO_KEYS - {"data_family"}


def _split_spec(text: str, what: str) -> tuple[str, dict[str, str]]:
    text = text.strip()
    if not text:
        raise ValueError(f"empty {what} spec")
    name, _, rest = text.partition(":")
    name = name.strip()
    params: dict[str, str] = {}
    if rest.strip():
        for part in rest.split(","):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValueError(f"{what} spec {text!r}: malformed parameter {part!r}")
            if key in params:
                raise ValueError(f"{what} spec {text!r}: duplicate key {key!r}")
            params[key] = value.strip()
    return name, params


def _pop_float(params: dict[str, str], key: str, spec: str) -> float:
    raw = params.pop(key, None)
    if raw is None:
        raise ValueError(f"spec {spec!r}: missing required key {key!r}")
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"spec {spec!r}: {key}={raw!r} is not a number") from None


def _pop_float_list(params: dict[str, str], key: str, spec: str) -> list[float]:
    raw = params.pop(key, None)
    if raw is None:
        raise ValueError(f"spec {spec!r}: missing required key {key!r}")
    try:
        return [float(v) for v in raw.split("|")]
    except ValueError:
        raise ValueError(f"spec {spec!r}: {key}={raw!r} is not a |-separated number list") from None


def _reject_extras(params: dict[str, str], spec: str) -> None:
    if params:
        key = next(iter(params))
        raise ValueError(f"spec {spec!r}: unknown key {key!r}")


def parse_family_spec(text: str, base_dir: str | None = None
                      ) -> tuple[ConditionalCdfFamily, float | None]:
    """Parse a family spec; returns (family, pinned zeta or None)."""
    name, params = _split_spec(text, "family")
    pinned = None
    if "zeta" in params:
        pinned = _pop_float(params, "zeta", text)
    family: ConditionalCdfFamily
    if name == "normal-location":
        sigma = _pop_float(params, "sigma", text) if "sigma" in params else 1.0
        family = NormalLocation(sigma=sigma)
    elif name == "exponential-rate":
        family = ExponentialRate()
    elif name == "uniform-width":
        family = UniformWidth()
    elif name == "tabulated":
        path = params.pop("path", None)
        if path is None:
            raise ValueError(f"spec {text!r}: missing required key 'path'")
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        family = TabulatedFamily.from_csv(path)
    else:
        raise ValueError(f"unknown family {name!r} in spec {text!r}")
    _reject_extras(params, text)
    if pinned is not None:
        family.validate_zetas([pinned])
    return family, pinned


def parse_sampler_spec(text: str) -> ZetaSampler:
    name, params = _split_spec(text, "sampler")
    if name == "uniform":
        a = _pop_float(params, "a", text)
        b = _pop_float(params, "b", text)
        sampler: ZetaSampler = UniformSampler(a=a, b=b)
    elif name == "point-mass":
        sampler = PointMassSampler(c=_pop_float(params, "c", text))
    elif name == "gaussian-mixture":
        weights = _pop_float_list(params, "weights", text)
        means = _pop_float_list(params, "means", text)
        sds = _pop_float_list(params, "sds", text)
        if not len(weights) == len(means) == len(sds):
            raise ValueError(
                f"spec {text!r}: weights, means and sds must have equal length"
            )
        sampler = GaussianMixtureSampler(
            components=tuple(zip(weights, means, sds))
        )
    else:
        raise ValueError(f"unknown sampler {name!r} in spec {text!r}")
    _reject_extras(params, text)
    return sampler


def _pop_int(values: dict[str, str], key: str) -> int:
    raw = values.pop(key)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"scenario key {key!r}: {raw!r} is not an integer") from None


def load_scenario(path) -> Scenario:
    """Read a scenario config file.

    Relative ``tabulated:path=`` entries resolve against the scenario
    file's own directory.
    """
    base_dir = os.path.dirname(os.path.abspath(path))
    values: dict[str, str] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key or not value:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
            if key not in _SCENARIO_KEYS:
                raise ValueError(f"{path}: line {lineno}: unknown scenario key {key!r}")
            if key in values:
                raise ValueError(f"{path}: line {lineno}: duplicate key {key!r}")
            values[key] = value
    missing = _REQUIRED_SCENARIO_KEYS - values.keys()
    if missing:
        raise ValueError(f"{path}: missing scenario key {sorted(missing)[0]!r}")

    def load_family(key: str) -> ConditionalCdfFamily:
        family, pinned = parse_family_spec(values.pop(key), base_dir=base_dir)
        if pinned is not None:
            raise ValueError(
                f"scenario key {key!r}: a pinned zeta has no meaning here, "
                f"use a point-mass sampler instead"
            )
        return family

    null_family = load_family("null_family")
    data_family = load_family("data_family") if "data_family" in values else None
    return Scenario(
        zeta_sampler=parse_sampler_spec(values.pop("zeta_sampler")),
        null_family=null_family,
        data_family=data_family,
        n=_pop_int(values, "n"),
        replicates=_pop_int(values, "replicates"),
        seed=_pop_int(values, "seed"),
    )
