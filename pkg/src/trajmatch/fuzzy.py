"""Mamdani fuzzy inference: membership functions, min-max rules, centroid.

The default rule base scores road-link candidates from two crisp inputs,
perpendicular distance (meters) and heading error (degrees), onto a 0-100
likelihood scale. It can be overridden from a YAML config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFUZZ_SAMPLES = 1001


@dataclass(frozen=True)
class MembershipFunction:
    """One of: triangular(a,b,c), trapezoidal(a,b,c,d), z(a,b), s(a,b)."""

    shape: str
    params: tuple[float, ...]

    def __post_init__(self):
        expected = {"triangular": 3, "trapezoidal": 4, "z": 2, "s": 2}
        if self.shape not in expected:
            raise ValueError(f"unknown membership shape {self.shape!r}")
        if len(self.params) != expected[self.shape]:
            raise ValueError(f"{self.shape} needs {expected[self.shape]} params")
        if list(self.params) != sorted(self.params):
            raise ValueError("membership parameters must be non-decreasing")
        if self.shape in ("z", "s") and self.params[0] == self.params[1]:
            raise ValueError(f"{self.shape} shape needs distinct parameters")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == "triangular":
            a, b, c = self.params
            left = np.where(a == b, 1.0, (x - a) / max(b - a, 1e-300))
            right = np.where(b == c, 1.0, (c - x) / max(c - b, 1e-300))
            return np.clip(np.minimum(left, right), 0.0, 1.0)
        if self.shape == "trapezoidal":
            a, b, c, d = self.params
            left = np.where(a == b, 1.0, (x - a) / max(b - a, 1e-300))
            right = np.where(c == d, 1.0, (d - x) / max(d - c, 1e-300))
            return np.clip(np.minimum(np.minimum(left, 1.0), right), 0.0, 1.0)
        a, b = self.params
        mid = (a + b) / 2.0
        # standard quadratic spline s-function
        s = np.where(
            x <= a, 0.0,
            np.where(x <= mid, 2 * ((x - a) / (b - a)) ** 2,
                     np.where(x <= b, 1 - 2 * ((b - x) / (b - a)) ** 2, 1.0)))
        return 1.0 - s if self.shape == "z" else s


def triangular(a, b, c) -> MembershipFunction:
    return MembershipFunction("triangular", (a, b, c))


def trapezoidal(a, b, c, d) -> MembershipFunction:
    return MembershipFunction("trapezoidal", (a, b, c, d))


def z_shaped(a, b) -> MembershipFunction:
    return MembershipFunction("z", (a, b))


def s_shaped(a, b) -> MembershipFunction:
    return MembershipFunction("s", (a, b))


@dataclass
class FuzzyVariable:
    name: str
    universe: tuple[float, float]
    labels: dict[str, MembershipFunction]

    def __post_init__(self):
        lo, hi = self.universe
        if not lo < hi:
            raise ValueError("universe min must be below max")
        # every universe point must be covered by at least one label
        grid = np.linspace(lo, hi, 401)
        cover = np.max([mf(grid) for mf in self.labels.values()], axis=0)
        if np.any(cover <= 0):
            raise ValueError(f"variable {self.name!r}: labels do not cover universe")

    def clamp(self, crisp: float) -> float:
        return min(self.universe[1], max(self.universe[0], crisp))


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[tuple[str, str], ...]  # (variable, label) conjunction
    consequent: str                          # output label
    weight: float = 1.0


@dataclass
class RuleBase:
    inputs: dict[str, FuzzyVariable]
    output: FuzzyVariable
    rules: list[Rule] = field(default_factory=list)

    def __post_init__(self):
        for rule in self.rules:
            for var, label in rule.antecedent:
                if label not in self.inputs[var].labels:
                    raise ValueError(f"rule references unknown label {var}.{label}")
            if rule.consequent not in self.output.labels:
                raise ValueError(f"rule references unknown output label {rule.consequent}")


def fuzzify(var: FuzzyVariable, crisp: float) -> dict[str, float]:
    """Membership of the (clamped) crisp value under every label."""
    x = var.clamp(crisp)
    return {label: float(mf(x)) for label, mf in var.labels.items()}


def infer(rules: RuleBase, memberships: dict[str, dict[str, float]]) -> np.ndarray:
    """Aggregated output membership, sampled on the output universe.

    Firing strength is min over the antecedent memberships times the rule
    weight; consequents are clipped and aggregated by pointwise max.
    """
    lo, hi = rules.output.universe
    grid = np.linspace(lo, hi, DEFUZZ_SAMPLES)
    agg = np.zeros_like(grid)
    for rule in rules.rules:
        strength = min(memberships[v][l] for v, l in rule.antecedent) * rule.weight
        if strength <= 0:
            continue
        clipped = np.minimum(rules.output.labels[rule.consequent](grid), strength)
        agg = np.maximum(agg, clipped)
    return agg


def defuzzify_centroid(aggregate: np.ndarray, universe: tuple[float, float]) -> float:
    """Centroid of the aggregated set; universe midpoint when mass is zero."""
    lo, hi = universe
    grid = np.linspace(lo, hi, len(aggregate))
    mass = float(np.sum(aggregate))
    if mass <= 0.0:
        return (lo + hi) / 2.0
    return float(np.sum(grid * aggregate) / mass)


def evaluate(rules: RuleBase, crisp_inputs: dict[str, float]) -> float:
    """Full fuzzify -> infer -> defuzzify pass; returns the crisp output."""
    memberships = {name: fuzzify(var, crisp_inputs[name])
                   for name, var in rules.inputs.items()}
    agg = infer(rules, memberships)
    return defuzzify_centroid(agg, rules.output.universe)


def default_rule_base() -> RuleBase:
    """Two-input likelihood scorer: near+aligned is good, far+opposed is bad."""
    pd = FuzzyVariable("pd", (0.0, 100.0), {
        "short": z_shaped(10.0, 40.0),
        "long": s_shaped(10.0, 40.0),
    })
    he = FuzzyVariable("he", (0.0, 180.0), {
        "small": z_shaped(15.0, 60.0),
        "large": s_shaped(15.0, 60.0),
    })
    likelihood = FuzzyVariable("likelihood", (0.0, 100.0), {
        "low": triangular(0.0, 0.0, 50.0),
        "average": triangular(25.0, 50.0, 75.0),
        "high": triangular(50.0, 100.0, 100.0),
    })
    rules = [
        Rule((("pd", "short"), ("he", "small")), "high"),
        Rule((("pd", "short"), ("he", "large")), "average"),
        Rule((("pd", "long"), ("he", "small")), "average"),
        Rule((("pd", "long"), ("he", "large")), "low"),
    ]
    return RuleBase({"pd": pd, "he": he}, likelihood, rules)


_SHAPE_BUILDERS = {
    "triangular": triangular,
    "trapezoidal": trapezoidal,
    "z": z_shaped,
    "s": s_shaped,
}


def _variable_from_config(name: str, node: dict) -> FuzzyVariable:
    labels = {}
    for label, spec in node["labels"].items():
        shape = spec["shape"]
        labels[label] = _SHAPE_BUILDERS[shape](*spec["params"])
    return FuzzyVariable(name, tuple(node["universe"]), labels)


def rule_base_from_config(node: dict) -> RuleBase:
    """Build a RuleBase from a parsed config mapping (see docs/config schema)."""
    inputs = {name: _variable_from_config(name, sub)
              for name, sub in node["inputs"].items()}
    output = _variable_from_config("likelihood", node["output"])
    rules = []
    for spec in node["rules"]:
        antecedent = tuple((var, label) for var, label in spec["if"])
        rules.append(Rule(antecedent, spec["then"], float(spec.get("weight", 1.0))))
    return RuleBase(inputs, output, rules)
