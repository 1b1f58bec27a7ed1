"""Tests of structural balance in signed graphs."""

from .errors import DegenerateApproximation, GraphValidationError, StatisticUndefined
from .graph import (EmbeddednessIndex, SignedGraph, SummaryStats, TriadCensus, census,
                    diagnostics, embeddedness, from_edge_list, read_edge_list, sign_subgraph,
                    summary, triangles, write_edge_list)
from .kernels import BACKEND
from .mctest import (TestResult, binned_test, critical_value, mc_test, new_test, old_test,
                     structural_test)
from .nulls import (RademacherSpec, SeedSpec, sample_rademacher, shuffle_binned,
                    shuffle_stratified, shuffle_uniform)
from .gaussian import GaussianSummary, gaussian_summary, gaussian_test

__version__ = "0.1.0"
