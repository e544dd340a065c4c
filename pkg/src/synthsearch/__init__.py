"""Search over semantically annotated synthesis procedures.

Two search modalities over the same corpus:

* graph-pattern search -- token/entity patterns with named captures and
  directed, labeled traversals over per-sentence action graphs;
* slot search -- conjunctive keyword filters over procedure-level metadata
  (reagent, solvent, product, ...), with ``?`` as the any-value wildcard.

Both are served from an immutable inverted index with two-step matching
(posting-list intersection, then full pattern verification) and are checked
against an index-free brute-force matcher.
"""

from synthsearch.corpus import Schema, default_schema
from synthsearch.engine import brute_force_search, search
from synthsearch.index import build_index, open_index
from synthsearch.queryir import parse_graph_query, parse_slot_query

__version__ = "0.1.0"

__all__ = [
    "Schema",
    "default_schema",
    "parse_graph_query",
    "parse_slot_query",
    "build_index",
    "open_index",
    "search",
    "brute_force_search",
    "__version__",
]
