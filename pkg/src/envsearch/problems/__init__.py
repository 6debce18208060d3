"""Case-study problems: the pluggable decode / restrictions / surrogate
fitness bundles the search engine runs against."""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path

from ..evolution import EvolutionConfig, Mode
from ..markov import MarkovChain
from ..schema import ScenarioSchema, TestCase


class Problem(ABC):
    """One scenario-generation case study."""

    name: str

    @property
    @abstractmethod
    def schema(self) -> ScenarioSchema: ...

    @property
    @abstractmethod
    def alpha(self) -> float:
        """Feasibility threshold on the raw fitness (constraint C1)."""

    @abstractmethod
    def check_restrictions(self, tc: TestCase) -> tuple[bool, str]:
        """(feasible, reason); reason names the first violated rule."""

    @abstractmethod
    def fitness(self, tc: TestCase) -> float:
        """Raw fault-revealing power, >= 0; 0 for restriction violations."""

    def markov_chain(self) -> MarkovChain | None:
        return None

    @abstractmethod
    def default_config(self, mode: Mode, **overrides) -> EvolutionConfig: ...

    @abstractmethod
    def export_scenario(self, tc: TestCase, out_dir: Path, stem: str) -> list[Path]:
        """Write the decoded scenario in its external format(s)."""


def get_problem(name: str) -> Problem:
    from .lkas import LkasProblem
    from .robot import RobotProblem
    from .thermostat import ThermostatProblem

    problems = {
        "thermostat": ThermostatProblem,
        "robot": RobotProblem,
        "lkas": LkasProblem,
    }
    try:
        return problems[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; expected one of {sorted(problems)}")


PROBLEM_NAMES = ("thermostat", "robot", "lkas")
