"""Enumerations shared across pylpstruct.

Space kinds, three-valued verdicts and the CLI exit-code scheme.
"""

from enum import Enum, IntEnum, unique


# ---------------------------------------------------------------------------
#  Spaces
# ---------------------------------------------------------------------------


@unique
class SpaceKind(Enum):
    """The five separable Lebesgue spaces (and the bare finite metric).

    The value is the structure keyword used in presentation files.
    """

    LP_N = "lp_n"           # ell^p_n
    LP = "lp"               # ell^p
    LP01 = "Lp01"           # L^p[0,1]
    LPN_SUM = "lpn_sum"     # ell^p_n (+)_p L^p[0,1]
    LP_SUM = "lp_sum"       # ell^p (+)_p L^p[0,1]
    FINITE_METRIC = "finite_metric"

    @property
    def has_atoms(self) -> bool:
        """``True`` when vectors carry an atomic (sequence) part."""
        return self in (
            SpaceKind.LP_N, SpaceKind.LP, SpaceKind.LPN_SUM, SpaceKind.LP_SUM
        )

    @property
    def has_continuum(self) -> bool:
        """``True`` when vectors carry a step-function part."""
        return self in (SpaceKind.LP01, SpaceKind.LPN_SUM, SpaceKind.LP_SUM)

    @property
    def is_finite_dimensional_atomic(self) -> bool:
        """``True`` when the atomic part is capped at a dimension ``n``."""
        return self in (SpaceKind.LP_N, SpaceKind.LPN_SUM)


# ---------------------------------------------------------------------------
#  Verdicts
# ---------------------------------------------------------------------------


@unique
class Certainty(Enum):
    """Three-valued outcome of a certified comparison."""

    HOLDS = "holds-certified"
    VIOLATED = "violated-certified"
    INCONCLUSIVE = "inconclusive"


@unique
class AtomVerdict(Enum):
    """Verdict on the limit of one almost norm-maximizing chain."""

    ZERO = "zero-certified"
    ATOM = "atom-certified"
    UNKNOWN = "unknown-at-depth"


@unique
class StageVerdict(Enum):
    """Stage-bounded membership verdict for the sets A1 and A2."""

    IN = "in"
    OUT = "out"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
#  CLI exit codes
# ---------------------------------------------------------------------------


@unique
class ExitCode(IntEnum):
    """Process exit status of the ``pylpstruct`` command."""

    OK = 0             # certified success
    VIOLATION = 1      # certified violation
    INCONCLUSIVE = 2   # inconclusive, unknown-at-depth or budget exhausted
    USAGE = 64         # EX_USAGE
    DATA_ERROR = 65    # EX_DATAERR (malformed input file)
