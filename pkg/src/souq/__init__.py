"""Label-wise total, aleatoric and epistemic uncertainty for second-order predictions."""

__version__ = "0.1.0"

from .measures import (  # noqa: E402
    LabelWiseReport,
    MeasureFamily,
    ScoringRule,
    UncertaintyTriple,
    binary_entropy,
    dirichlet_variance_oracle,
    global_entropy_measures,
    label_entropy_measures,
    loss_based_measures,
    measure,
    shannon_entropy,
    variance_measures,
)
from .simplex import (  # noqa: E402
    BinaryMarginal,
    DirichletSecondOrder,
    EmpiricalSecondOrder,
    ProbVector,
    make_prob_vector,
    marginal,
    restrict,
    sample_dirichlet,
    second_order_mean,
)
