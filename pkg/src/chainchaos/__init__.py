"""Chain-recurrence invariants and finite-scale distributional-chaos
certificates on exact finite approximations of interval maps, circle maps,
and shifts of finite type."""

from .chaingraph import (ChainGraph, Component, CyclicDecomposition,
                         chain_recurrent_set, cyclic_decomposition, find_chain,
                         reachability_threshold, verify_chain)
from .dc1 import (BlockOrbit, BlockSet, DC1Certificate, DC1Schedule, GridSpec,
                  TwoShiftFactor, approximate_dc1_near, build_block_orbit,
                  build_schedule, certify_dc1, dc1_pipeline, dc1_statistics,
                  default_grids, entropy_lower_bound, factor_construct,
                  gather_blocks)
from .errors import (ChainChaosError, DomainError, InputError,
                     PreconditionError, SearchError, SFTError, StoreError,
                     ValidationError)
from .pairlab import (PairClass, ThickProfile, classify_pair,
                      extract_pstar_pair, liyorke_to_relation, thick_profile)
from .pstar import SeparationWitness, omega_product, separated_cycles
from .relation import (EntropyPairs, MutualChains, RelationVerdict,
                       entropy_pairs, mutual_chains, related_at,
                       relate_schedule)
from .shadowing import (PseudoOrbit, shadow_sft, tracking_average,
                        tracking_distances, tracking_supremum_bound)
from .symbolic import ShiftPoint, word_distance
from .systems import (BoxCover, SystemSpec, box_cover, circle_map,
                      discretize, doubling_map, evaluate, full_shift,
                      golden_mean_shift, identity_map, interval_map,
                      load_system, metric, orbit, parse_system_config,
                      point_to_box, sft, tent_map)

__version__ = "0.1.0"
