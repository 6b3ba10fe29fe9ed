"""Global common-recourse counterfactual explanations for graph classifiers."""

from .canonical import canonical_key
from .classifiers import (ForbiddenMotifClassifier, Prediction,
                          SameLabelPairClassifier, TriangleThresholdClassifier)
from .embedding import RecourseVector, WLHashEmbedder, dist, make_recourse
from .estimators import CommonRecourseExplainer, LocalRandomWalkExplainer, \
    check_graphs
from .ged import exact_ged, normalized_ged
from .graphs import (EditPreconditionError, GraphEdit, GraphError,
                     LabeledGraph, apply_edit, edit_neighbors)
from .recourse import (CommonRecourse, RecoursePool, Summary, build_pool,
                       brute_force_best_R, cluster_recourse,
                       counterfactual_set_coverage, coverage, cost,
                       fc_filter_nearest, fc_objective, greedy_select,
                       randomized_greedy_fc, two_budget_two_cover)
from .walk import EditSpace, WalkConfig, WalkResult, run_vrrw, top_candidates

__version__ = "0.1.0"

__all__ = [
    "LabeledGraph", "GraphEdit", "GraphError", "EditPreconditionError",
    "apply_edit", "edit_neighbors", "canonical_key", "exact_ged",
    "normalized_ged", "WLHashEmbedder", "RecourseVector", "dist",
    "make_recourse", "Prediction", "SameLabelPairClassifier",
    "ForbiddenMotifClassifier", "TriangleThresholdClassifier",
    "WalkConfig", "WalkResult", "EditSpace", "run_vrrw", "top_candidates",
    "CommonRecourse", "RecoursePool", "Summary", "build_pool",
    "cluster_recourse", "coverage", "cost", "greedy_select",
    "brute_force_best_R", "fc_filter_nearest", "fc_objective",
    "randomized_greedy_fc", "two_budget_two_cover",
    "counterfactual_set_coverage", "CommonRecourseExplainer",
    "LocalRandomWalkExplainer", "check_graphs",
]
