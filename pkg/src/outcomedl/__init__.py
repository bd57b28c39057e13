"""Reasoner for a modal defeasible logic of agent outcomes.

Two engines compute, for every literal and every mode in {B, O, D, G, I, SI},
whether it is defeasibly proved, refuted, or undecided: a direct fixpoint
over the proof conditions (`refengine`, the oracle) and a linear-time
transformation engine (`linengine`).  `analyzer` cross-checks them and
measures scaling; `textio` owns the theory file format; `service` and `cli`
expose everything over HTTP and the command line.
"""

from importlib import resources

from .core import (
    BodyElement,
    Literal,
    Mode,
    OutcomeChain,
    Rule,
    RuleKind,
    Theory,
    check_consistency,
    complement,
    complement_set,
    herbrand_base,
    normalize_chain,
    theory_size,
)
from .refengine import Extension, compute_extension_reference
from .linengine import compute_extension_linear
from .textio import parse_theory, render_theory, serialize_extension

__version__ = "0.1.0"


def fixture_names() -> list[str]:
    """Names of the bundled example theories (without extension)."""
    pkg = resources.files(__name__) / "fixtures"
    return sorted(p.name[:-4] for p in pkg.iterdir() if p.name.endswith(".dft"))


def fixture_source(name: str) -> str:
    """Source text of a bundled example theory."""
    return (resources.files(__name__) / "fixtures" / f"{name}.dft").read_text(encoding="utf-8")


def load_fixture(name: str) -> Theory:
    """Parse a bundled example theory."""
    return parse_theory(fixture_source(name))
