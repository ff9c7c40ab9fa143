"""Diffusive molecular communication with one transmitter and two absorbing receivers.

Analytic channel model (hitting probabilities, slot taps, one-vs-two receiver
gain), slot-level detection analysis (hypothesis statistics, ROC, AUC) and two
stochastic oracles to check them: a Brownian particle simulator and a
Monte-Carlo link simulator.
"""

__version__ = "0.1.0"

from .channel import (
    GainResult,
    SeriesConfig,
    TapVector,
    channel_taps,
    gain,
    p1_eventual,
    p1_hit,
    p2_eventual,
    p2_hit,
    p_total,
    p_total_eventual,
    reduction_eventual,
)
from .detection import (
    RocCurve,
    auc_closed_form,
    auc_empirical,
    auc_numeric,
    pd,
    pf,
    q_approx,
    q_exact,
    roc,
)
from .exceptions import (
    ConvergenceWarning,
    DegenerateStats,
    GeometryError,
    MismatchedSlot,
    SingleClass,
    ZeroRadialDistance,
)
from .geometry import FarGeometry, Scenario, derive_geometry, geometry_from_positions, validity_report
from .link import HypothesisStats, LinkSample, LinkSamples, hypothesis_stats, joint_stats, simulate_link, simulate_link_joint
from .particles import HitRecord, HitRecords, Outcome, SimConfig, empirical_hitting, error_map, simulate
