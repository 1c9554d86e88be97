"""Statement-level clone detection for Solidity functions.

Pipeline: parse a function into an AST, decompose it into typed
statement trees, extract seven category-level token bags per tree,
score every cross-function tree pair with a boosted-tree classifier
(hyperparameters found by a cosine-schedule sampling search), and
aggregate the results into a dual-threshold clone verdict with
line-level localisation.
"""

from clonescope.ast_nodes import AstNode, FunctionAst, NodeKind
from clonescope.corpus import (
    FunctionGroup,
    PairRecord,
    group_corpus,
    load_pairs,
    make_tree_pairs,
    save_pairs,
    synthesize_clones,
)
from clonescope.diffusion import DiffusionSchedule, forward_step, marginal_sample
from clonescope.errors import (
    BudgetTooSmall,
    CloneScopeError,
    DegenerateData,
    DimensionMismatch,
    EmptyFunction,
    LexError,
    ParseError,
    SchemaError,
    UnsupportedConstruct,
    ZeroSplits,
)
from clonescope.evalnet import EvalNet, train_eval_net
from clonescope.features import (
    FeatureSet,
    NodeCategory,
    categorize_node,
    extract_features,
    pair_features,
)
from clonescope.gbdt import (
    GbdtModel,
    HyperPoint,
    LabeledPair,
    cross_entropy,
    feature_importance,
    load_model,
    predict_proba,
    save_model,
    train,
)
from clonescope.hpo import OptimizationResult, optimize
from clonescope.lexer import Token, TokenKind, tokenize
from clonescope.parser import parse_contract, parse_function
from clonescope.similarity import (
    SimilarityMatrix,
    SimilarityReport,
    aggregate,
    compare_functions,
    generate_report,
    verdict,
)
from clonescope.spans import SourceSpan
from clonescope.statements import (
    StatementTree,
    StatementTreeKind,
    classify_statement,
    decompose,
    kind_distribution,
)

__version__ = "0.1.0"
