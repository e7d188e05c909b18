"""Experiment configuration documents for the ``simulate`` command.

A configuration is a JSON object::

    {"problem": {"seed": 0, "dim": 10, "mu": 1.0, "L": 10.0,
                 "placement": "endpoints_pinned"},
     "signal":  {"poles": "+1,pair:0.031415926535897934", "seed": 0,
                 "amplitude": 1.0},
     "filter":  {"design": "closed_form"},
     "K": 600}

``signal`` takes either ``poles`` or ``model`` (ascending coefficients), and
``"zero": true`` for ``b_k = 0``. ``filter`` is one of
``{"design": "closed_form"}`` (closed form for the signal's model),
``{"gradient_descent": {"alpha": ...}}`` (alpha defaults to ``2/(L+mu)``)
or an exported filter ``{"model": [...], "numerator": [...]}``.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .filters import design_for_model, filter_from_dict, gradient_descent_filter
from .model import SignalTrace, TimeVariationModel, build_model, generate_signal, parse_poles
from .sim import make_problem


@dataclass
class SimulationConfig:
    problem: dict = field(default_factory=dict)
    signal: dict = field(default_factory=dict)
    filter: dict = field(default_factory=dict)
    K: int = 600

    @classmethod
    def from_dict(cls, data):
        return cls(dict(data.get("problem", {})), dict(data.get("signal", {})),
                   dict(data.get("filter", {})), int(data.get("K", 600)))

    def to_dict(self):
        return asdict(self)

    def dumps(self):
        # repr-based float output round-trips doubles exactly
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())

    def build(self):
        """Instantiate ``(problem, filter, signal)`` from the document."""
        p = self.problem
        mu, L = float(p.get("mu", 1.0)), float(p.get("L", 10.0))
        problem = make_problem(int(p.get("seed", 0)), int(p.get("dim", 10)), mu, L,
                               p.get("placement", "endpoints_pinned"))
        model = model_from_record(self.signal)
        s = self.signal
        if s.get("zero"):
            signal = SignalTrace(np.zeros((self.K, problem.dim)), int(s.get("seed", 0)), model)
        else:
            signal = generate_signal(model, problem.dim, self.K, int(s.get("seed", 0)),
                                     float(s.get("amplitude", 1.0)))
        f = self.filter
        if "gradient_descent" in f:
            alpha = (f["gradient_descent"] or {}).get("alpha", 2.0 / (L + mu))
            filt = gradient_descent_filter(float(alpha))
        elif "numerator" in f:
            filt = filter_from_dict(f)
        else:
            filt = design_for_model(model, mu, L)
        return problem, filt, signal


def model_from_record(record):
    """Model from a record holding ``poles`` (text) or ``model`` (coefficients)."""
    if "poles" in record:
        return build_model(parse_poles(record["poles"]))
    if "model" in record:
        return TimeVariationModel.from_coeffs(record["model"])
    raise KeyError("record needs 'poles' or 'model'")
