"""Filtered DGAs, action-filtered complexes, persistence barcodes and Rabinowitz cones."""
from __future__ import annotations

from .algebra import FilteredDGA, FreeElement, Generator, format_element, parse_element
from .barcode import (Bar, Barcode, Birth, Death, EntryAbove, EntryBelow, ExitAbove, ExitBelow,
                      HandleSlide, apply_event, compute_barcode, rank_oracle_barcode)
from .bounds import (ChordSpectrum, ConformalProfile, action_growth_check,
                     adversarial_min_survivors, main_theorem_bound, oscillation_variants,
                     scf_energy_constant, trace_lengths)
from .complexes import (ConeData, DegreeEpsMap, FilteredComplex, HomotopyCertificate, Verdict,
                        build_cone, check_birth_death_shape, check_simple_equivalence,
                        window_subquotient)
from .errors import (ChainMapError, ContextError, DomainError, HypothesisViolation,
                     IllegalMoveError, ParseError, SearchSpaceError, UndefinedAugmentationError)
from .grading import (halfplane_index, plane_index, rpn_action_shift_script, rpn_generate_rfc,
                      rpn_mixed_chord)
from .pwc import (OscillationProfile, PLFunction, PWCScript, assemble_pwc_from_equivalences,
                  check_speed_law, check_window_admissibility, evolve)
from .rabinowitz import BananaCounts, LinkDGA, build_rfc, rfc_acyclicity
from .scalars import INF, PiLinear, pi_linear
from .tame import (STI, Augmentation, Destabilize, Elementary, Identify, Stabilize, apply_sti,
                   apply_tame, destabilize_pair, find_augmentations, linearize,
                   transport_augmentation)

__version__ = "0.1.0"
