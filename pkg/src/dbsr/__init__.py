"""Round-based WSN lifetime simulator with a GA-repositioned mobile base station."""

from .energy import (Cause, EnergyLedgerEntry, RadioConstants, charge,
                     conservation_gap, radio_constants, rx_cost, tx_cost)
from .ga import (GaParams, WeightedSite, abf, crossover, decode, decode_raw,
                 default_big_m, encode, exhaustive_oracle, fitness, mutate,
                 random_chromosome, roulette_select, run_ga,
                 selection_probabilities, weight_of)
from .protocols import (ClusterAssignment, HeedClustering, HeedParams,
                        LeachClustering, LeachParams, ProtocolKind,
                        heed_initial_prob, make_clustering, run_round)
from .sim import (BatchResult, DbsrPolicy, LifetimeSummary, RoundMetrics,
                  RunResult, StaticPolicy, batch, reposition, simulate)
from .world import (NetworkConfig, NodeState, Position, Role, World, deploy,
                    distance)

__version__ = "0.1.0"
