"""Linear social choice toolkit.

Voting rules, distortion computations, and instance-optimal lotteries for
candidates and voters embedded on the nonnegative unit simplex, plus the
adversarial instance generators and the benchmark harness that exercise the
provable bounds.
"""

from .errors import (
    LinChoiceError,
    LpFailure,
    RealizabilityError,
    StabilityError,
    ValidationError,
)
from .model import (
    CandidateSet,
    Instance,
    Lottery,
    PairwisePrefs,
    Profile,
    Ranking,
    UtilityProfile,
    ValidationReport,
    VoterSet,
    expected_welfare,
    min_favorite_utility,
    utilities_to_profile,
    utility,
    validate_candidates,
    validate_voters,
    welfare,
    welfare_vector,
)

__version__ = "0.1.0"
