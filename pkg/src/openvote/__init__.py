"""Self-tallying boardroom voting over a simulated ledger.

Voters encrypt yes/no choices so the published values sum to the count; every
off-chain computation (key generation, vote encryption, tallying) carries a
proof that a minimal contract checks before accepting, so cheating is rejected
outright instead of disputed. Includes the fixed-statement and progressive
commitment variants and a calibrated transaction cost model for scaling
experiments.
"""

__version__ = "0.1.0"

from .field_curve import CompactPoint, FieldElement, Point, Scalar  # noqa: F401
from .ovn_core import VoterKeypair, blinding_key, encrypt_vote, keygen, tally  # noqa: F401
