"""Mine workflow event logs for resource-allocation rules.

Pipeline: parse and clean a delimited event log, mine frequent
process/task/resource itemsets with a constrained Apriori pass, turn the
3-itemsets into process AND task => resource rules, annotate negatively
correlated rules via lift, rank by confidence, and recommend or evaluate
via k-fold cross-validation.  A seeded synthetic generator supports
desk-scale experiments.
"""

__version__ = "0.1.0"

from .apriori import (
    FrequentLevels,
    Item,
    Itemset,
    apriori_gen,
    find_frequent_1,
    has_infrequent_subset,
    mine_frequent_3,
)
from .eventlog import (
    CleaningConfig,
    CleaningReport,
    Event,
    EventLog,
    FormatConfig,
    FrequencyStats,
    activity_id,
    clean_log,
    frequency_stats,
    parse_log,
    write_log,
)
from .evaluate import (
    EvalReport,
    FoldPlan,
    evaluate,
    kfold_split,
    majority_baseline,
    predict,
    train,
)
from .rules import (
    AnnotatedRuleSet,
    ByproductRule,
    MiningParams,
    PtrRule,
    Recommendation,
    annotate,
    byproduct_rules,
    confidence,
    generate_ptr_rules,
    lift,
    rank,
    recommend,
    render_text,
    support,
    three_stage,
    weighted_mean_residual,
)
from .synth import GeneratorSpec, bayes_optimal_accuracy, generate, load_bundled_spec
