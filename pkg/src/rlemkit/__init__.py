"""rlemkit: reversible logic elements with memory.

Enumerate and classify 2-state elements, simulate single-token circuits of
them, compile reversible sequential machines and Turing machines down to
rotary-element netlists, search for element-to-element simulation circuits,
and build refutation certificates for the non-universal 2-symbol elements.
"""

from .elements import (DIVERGENT, ROTARY_ELEMENT, ArityError, Census,
                       Degeneracy, FeedbackSpec, MoveTable, ParseError,
                       RangeError, Renaming, RlemError, RlemId, Rsm,
                       apply_renaming, canonical_serial, census,
                       classify_degeneracy, feedback_reduce, feedback_survey,
                       find_renaming, is_reversible, parse_table,
                       serial_to_table, table, table_to_serial)
from .circuits import (Configuration, Element, Netlist, StepLimitError, Trace,
                       backward_step, inject, parse_netlist, format_netlist,
                       run_sequence, single_element_netlist, validate,
                       verify_simulation)
from .synthesis import (Exhausted, SearchResult, SynthesizedRsm,
                        search_circuit, synthesize_rsm, universality_chain)
from .turing import (PARITY, Rtm, Quintuple, check_rtm, compile_to_re,
                     cross_validate, decompose, interpret, parse_rtm,
                     format_rtm)
from .analysis import (CrossingPartition, Hierarchy, InvariantViolation,
                       NotApplicable, Refutation, check_claims,
                       crossing_partition, hierarchy, refute)
from .kernels import backend_name

__version__ = "0.1.0"
