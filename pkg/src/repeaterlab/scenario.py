"""Scenario files: parsing, validation and evaluation into result tables.

A scenario is an INI file::

    [scenario]
    schema_version = 1
    name = fig5a
    preset = fig5                 ; optional base values
    outputs = fidelity_vs_distance, time_vs_distance

    [generation]  ; one of: optical rates, P_em + collection, or F0 + T0
    [link]
    [errors]
    [nesting]     ; optional
    [sweep]       ; optional: parameter = section.key, values = ...

Every table row is computed from floats only, so identical inputs give
byte-identical CSV bodies.
"""

from __future__ import annotations

import configparser
import copy
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .bell import BellVector, ErrorModel, shape_state
from .errors import DomainError, RepeaterError
from .nesting import (
    BASE_SCHEMES,
    NestingConfig,
    asymptote,
    aux_next_level,
    fixed_point,
    fixed_point_profile,
    recurse,
)
from .photonics import (
    Emission,
    GenerationOutcome,
    LinkParams,
    OpticalParams,
    PiPulseDouble,
    PiPulseSingle,
    Raman,
    ResonantScattering,
    generate,
    raman_from_emission,
    resonant_from_emission,
)
from .presets import PRESETS

SCHEMA_VERSION = 1
OUTPUT_KINDS = (
    "fidelity_vs_distance",
    "time_vs_distance",
    "fixed_point_curve",
    "asymptote_staircase",
    "generation_summary",
)
SCHEMES = ("resonant", "raman", "pi_single", "pi_double")
MIN_FIDELITY = 0.5


class ConfigError(RepeaterError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InfeasibleScenario(RepeaterError):
    """The physics of a well-formed scenario cannot produce entanglement."""


def _float(text):
    return float(text)


def _int(text):
    return int(text)


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _str(text):
    return text.strip()


def _float_list(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _int_list(text):
    """Comma list of ints, or ``start:stop:step`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        start, stop, step = parts
        if step <= 0:
            raise ValueError("range step must be positive")
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.replace(",", " ").split()]


def _str_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


NonNeg = lambda x: x >= 0  # noqa: E731
Pos = lambda x: x > 0  # noqa: E731
Unit = lambda x: 0 <= x <= 1  # noqa: E731

# section -> key -> (parser, check, description of check)
SCHEMA: dict[str, dict[str, tuple[Callable, Callable | None, str]]] = {
    "scenario": {
        "schema_version": (_int, lambda v: v == SCHEMA_VERSION, f"must be {SCHEMA_VERSION}"),
        "name": (_str, lambda v: bool(v), "must be non-empty"),
        "preset": (_str, lambda v: v in PRESETS, f"must be one of {sorted(PRESETS)}"),
        "outputs": (_str_list, lambda v: v and all(k in OUTPUT_KINDS for k in v), f"entries must be in {OUTPUT_KINDS}"),
    },
    "generation": {
        "scheme": (_str, lambda v: v in SCHEMES, f"must be one of {SCHEMES}"),
        "g": (_float, NonNeg, "must be >= 0"),
        "kappa": (_float, NonNeg, "must be >= 0"),
        "gamma": (_float, NonNeg, "must be >= 0"),
        "Gamma": (_float, NonNeg, "must be >= 0"),
        "Omega": (_float, NonNeg, "must be >= 0"),
        "t0": (_float, NonNeg, "must be >= 0"),
        "zeta": (_float, Unit, "must lie in [0, 1]"),
        "gamma_dc": (_float, NonNeg, "must be >= 0"),
        "gamma_e": (_float, NonNeg, "must be >= 0"),
        "P_em": (_float, NonNeg, "must be >= 0"),
        "collection": (_float, Unit, "must lie in [0, 1]"),
        "broadening": (_float, NonNeg, "must be >= 0"),
        "F0": (_float, lambda v: 0 < v <= 1, "must lie in (0, 1]"),
        "T0": (_float, Pos, "must be > 0"),
        "upsilon": (_float, lambda v: 0 <= v <= 1 / 3, "must lie in [0, 1/3]"),
        "resolve_photon_number": (_bool, None, ""),
        "phi": (_float, lambda v: 0 < v < math.pi / 2, "must lie in (0, pi/2)"),
        "T": (_float, Pos, "must be > 0"),
        "P": (_float, Pos, "must be > 0"),
    },
    "link": {
        "L0": (_float, Pos, "must be > 0"),
        "attenuation": (_float, NonNeg, "must be >= 0"),
        "signal_speed": (_float, Pos, "must be > 0"),
        "t_c": (_float, Pos, "must be > 0"),
    },
    "errors": {
        "p": (_float, lambda v: 0 < v <= 1, "must lie in (0, 1]"),
        "eta": (_float, lambda v: 0 < v <= 1, "must lie in (0, 1]"),
    },
    "nesting": {
        "M": (_int_list, lambda v: v and all(m >= 0 for m in v), "must be non-negative integers"),
        "n_total": (_int, lambda v: v >= 2, "must be >= 2"),
        "distances": (_int_list, lambda v: v and all(n >= 2 for n in v), "entries must be >= 2"),
        "base_scheme": (_str, lambda v: v in BASE_SCHEMES, f"must be one of {BASE_SCHEMES}"),
    },
    "sweep": {
        "parameter": (_str, None, ""),
        "values": (_float_list, lambda v: len(v) > 0, "must list at least one value"),
    },
}

REQUIRED = {"scenario": ("schema_version", "name", "outputs")}
OPTICAL_KEYS = ("g", "kappa", "gamma", "Gamma", "Omega", "t0", "zeta", "gamma_dc", "gamma_e")


def _parse_section(section: str, raw: dict[str, str]) -> dict[str, Any]:
    if section not in SCHEMA:
        raise ConfigError(section, f"unknown section (expected one of {sorted(SCHEMA)})")
    spec = SCHEMA[section]
    out = {}
    for key, text in raw.items():
        if key not in spec:
            raise ConfigError(f"{section}.{key}", "unknown key")
        parser, check, what = spec[key]
        try:
            value = parser(text)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}", f"cannot parse {text!r}: {exc}") from None
        if check is not None and not check(value):
            raise ConfigError(f"{section}.{key}", f"{what} (got {text!r})")
        out[key] = value
    return out


@dataclass
class Scenario:
    name: str
    values: dict[str, dict[str, Any]]
    outputs: list[str]
    sweep_parameter: str | None = None
    sweep_values: list[float] = field(default_factory=list)
    source_text: str = ""

    def points(self) -> list[tuple[float | None, dict[str, dict[str, Any]]]]:
        """Resolved value sets, one per sweep point (or a single unswept one)."""
        if self.sweep_parameter is None:
            return [(None, self.values)]
        section, key = self.sweep_parameter.split(".")
        pts = []
        for v in self.sweep_values:
            vals = copy.deepcopy(self.values)
            parser = SCHEMA[section][key][0]
            vals.setdefault(section, {})[key] = parser(repr(v)) if parser is not _float else v
            pts.append((v, vals))
        return pts


def _read_ini(text: str, origin: str) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keys are case-sensitive (gamma vs Gamma)
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).replace("\n", " ")) from None
    return {s: dict(cp.items(s)) for s in cp.sections()}


def parse_scenario(text: str, origin: str = "<string>") -> Scenario:
    raw = _read_ini(text, origin)
    parsed = {section: _parse_section(section, body) for section, body in raw.items()}
    for section, keys in REQUIRED.items():
        for key in keys:
            if key not in parsed.get(section, {}):
                raise ConfigError(f"{section}.{key}", "required key is missing")
    head = parsed.pop("scenario")
    sweep = parsed.pop("sweep", None)

    values: dict[str, dict[str, Any]] = {}
    if "preset" in head:
        base = PRESETS[head["preset"]]
        for section, body in base.items():
            if section == "source":
                continue
            values[section] = _parse_section(section, body)
    for section, body in parsed.items():
        values.setdefault(section, {}).update(body)

    sc = Scenario(name=head["name"], values=values, outputs=head["outputs"], source_text=text)
    if sweep is not None:
        if "parameter" not in sweep or "values" not in sweep:
            raise ConfigError("sweep", "needs both 'parameter' and 'values'")
        target = sweep["parameter"]
        section, _, key = target.partition(".")
        if section not in SCHEMA or key not in SCHEMA[section] or section in ("scenario", "sweep"):
            raise ConfigError("sweep.parameter", f"unknown parameter path {target!r}")
        sc.sweep_parameter = target
        sc.sweep_values = sweep["values"]
    # build every point once so schema/physics problems surface before running
    for _, vals in sc.points():
        _build_static(vals)
    return sc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, str(path))


@dataclass(frozen=True)
class Point:
    """Fully-typed inputs of one scenario evaluation."""

    link: LinkParams
    err: ErrorModel
    upsilon: float
    gen_builder: Callable[[], GenerationOutcome]
    nesting: dict[str, Any] | None
    scheme_name: str


def _build_static(vals: dict[str, dict[str, Any]]) -> Point:
    gen = dict(vals.get("generation", {}))
    link_v = vals.get("link", {})
    if "L0" not in link_v:
        raise ConfigError("link.L0", "required key is missing")
    try:
        link = LinkParams(
            L0=link_v["L0"],
            attenuation=link_v.get("attenuation", 0.2),
            signal_speed=link_v.get("signal_speed", 2.0e5),
            t_c_override=link_v.get("t_c"),
        )
    except DomainError as exc:
        raise ConfigError("link", str(exc)) from None
    err_v = vals.get("errors", {})
    err = ErrorModel(err_v.get("p", 1.0), err_v.get("eta", 1.0))
    scheme = gen.get("scheme", "resonant")
    upsilon = gen.get("upsilon", 0.0)

    if "F0" in gen:
        if "T0" not in gen:
            raise ConfigError("generation.T0", "required when F0 is given directly")
        F0, T0 = gen["F0"], gen["T0"]

        def builder():
            # given directly: P, P_em and epsilon are not defined
            nan = float("nan")
            return GenerationOutcome(F0=F0, P=nan, T0=T0, Pem=nan, epsilon=nan, t_c=link.t_c)
    elif "P_em" in gen:
        if scheme not in ("resonant", "raman"):
            raise ConfigError("generation.scheme", "P_em shortcut only applies to resonant/raman")
        em = Emission(
            Pem=gen["P_em"],
            collection=gen.get("collection", 1.0),
            t0=gen.get("t0", 0.0),
            gamma_e=gen.get("gamma_e", 0.0),
            gamma_dc=gen.get("gamma_dc", 0.0),
            broadening=gen.get("broadening", 0.0),
        )
        if scheme == "resonant":
            def builder():
                return resonant_from_emission(em, link, gen.get("resolve_photon_number", True))
        else:
            def builder():
                return raman_from_emission(em, link)
    else:
        missing = [k for k in ("g", "kappa", "gamma") if k not in gen]
        if missing:
            raise ConfigError(f"generation.{missing[0]}", "required for optical-rate generation")
        try:
            opt = OpticalParams(**{k: gen[k] for k in OPTICAL_KEYS if k in gen})
        except DomainError as exc:
            raise ConfigError("generation", str(exc)) from None
        if scheme == "resonant":
            kind = ResonantScattering(gen.get("resolve_photon_number", True))
        elif scheme == "raman":
            kind = Raman()
        elif scheme == "pi_single":
            if "phi" not in gen or "T" not in gen:
                raise ConfigError("generation.phi", "pi_single needs phi and T")
            kind = PiPulseSingle(gen["phi"], gen["T"])
        else:
            kind = PiPulseDouble(gen.get("P"))

        def builder():
            return generate(kind, opt, link)

    nest = vals.get("nesting")
    if nest is not None:
        nest = dict(nest)
        nest.setdefault("n_total", max(nest.get("distances", [2])))
        M = nest.get("M", [1])
        nest["M"] = M[0] if len(M) == 1 else tuple(M)
    return Point(link, err, upsilon, builder, nest, scheme)


def validate_physics(vals) -> tuple[GenerationOutcome, list[str]]:
    """Build the generation outcome and flag infeasible physics."""
    return _generate(_build_static(vals))


def _generate(point: Point) -> tuple[GenerationOutcome, list[str]]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            gen = point.gen_builder()
        except DomainError as exc:
            raise ConfigError("generation", str(exc)) from None
        except RepeaterError as exc:
            raise InfeasibleScenario(str(exc)) from None
    notes = list(dict.fromkeys([str(w.message) for w in caught] + list(gen.warnings)))
    if gen.F0 < MIN_FIDELITY:
        raise InfeasibleScenario(f"elementary fidelity F0={gen.F0:.4g} is below {MIN_FIDELITY}; purification cannot help")
    return gen, notes


@dataclass
class Table:
    kind: str
    columns: list[str]
    rows: list[list[float]]


def _distances(nest) -> list[int]:
    return nest.get("distances", [nest["n_total"]])


def evaluate_point(vals) -> dict[str, Table]:
    """Evaluate all output kinds for one value set (sweep column excluded)."""
    point = _build_static(vals)
    gen, _ = _generate(point)
    F0 = shape_state(gen.F0, point.upsilon)
    tables: dict[str, Table] = {}
    L0 = point.link.L0
    trace = None
    cfg = None
    if point.nesting is not None:
        cfg = NestingConfig(
            F0=F0, T0=gen.T0, t_c=gen.t_c, err=point.err, M=point.nesting["M"],
            n_total=point.nesting["n_total"], base_scheme=point.nesting.get("base_scheme", "fresh_pair"),
        )
        try:
            trace = recurse(cfg, _distances(point.nesting))
        except RepeaterError as exc:
            raise InfeasibleScenario(str(exc)) from None

    try:
        asym = asymptote(F0, point.err)
    except RepeaterError as exc:
        raise InfeasibleScenario(f"asymptote: {exc}") from None

    summary = [("F0", gen.F0), ("P", gen.P), ("T0_s", gen.T0), ("Pem", gen.Pem),
               ("epsilon", gen.epsilon), ("t_c_s", gen.t_c)]
    summary = [(k, v) for k, v in summary if math.isfinite(v)]
    gen_cols = [k for k, _ in summary]
    gen_row = [v for _, v in summary]
    if trace is not None:
        final = trace.final
        gen_cols += ["n_total", "L_km", "F_final", "T_final_s"]
        gen_row += [cfg.n_total, (cfg.n_total - 1) * L0, final.fidelity, final.avg_time]
    tables["generation_summary"] = Table("generation_summary", gen_cols, [gen_row])

    if trace is not None:
        ns = _distances(point.nesting)
        fps = fixed_point_profile(trace)
        tables["fidelity_vs_distance"] = Table(
            "fidelity_vs_distance",
            ["n", "L_km", "F_A", "F_FP", "F_inf"],
            [[n, (n - 1) * L0, trace.A(n).fidelity, fps[n].a, asym.fidelity] for n in ns],
        )
        tables["time_vs_distance"] = Table(
            "time_vs_distance",
            ["n", "L_km", "T_A_s", "T_A_over_T0"],
            [[n, (n - 1) * L0, trace.A(n).avg_time, trace.A(n).avg_time / gen.T0] for n in ns],
        )
    tables["asymptote_staircase"] = Table(
        "asymptote_staircase",
        ["level", "F_C", "F_A", "F_inf"],
        [[s.level, s.C.a, s.A.a, asym.fidelity] for s in asym.staircase],
    )
    # the two maps whose alternation draws the staircase
    curve = []
    for k in range(1, 51):
        x = 0.5 + 0.01 * k
        v = _curve_state(x, F0)
        curve.append([x, fixed_point(v, point.err).a, aux_next_level(v, F0, point.err).a])
    tables["fixed_point_curve"] = Table("fixed_point_curve", ["F_x", "F_fp", "F_fc"], curve)
    return tables


def _curve_state(f: float, F0: BellVector) -> BellVector:
    """Pair of fidelity ``f`` whose errors keep the proportions of ``F0``'s errors."""
    err_mass = 1.0 - F0.a
    if err_mass <= 0.0:
        return shape_state(f, 0.0)
    return BellVector.from_weights([f] + [(1.0 - f) * x / err_mass for x in F0.as_tuple()[1:]])
