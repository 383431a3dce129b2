"""Tree search over network evaluations.
"""

from mobilego.search.evaluator import (
    BatchedEvaluator,
    Evaluation,
    Evaluator,
    NetEvaluator,
    ScoreEvaluator,
    UniformEvaluator,
)
from mobilego.search.puct import PUCT, Budget, SearchResult, policy_move, puct_search, select_move
